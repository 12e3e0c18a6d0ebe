from fractions import Fraction
from itertools import combinations

import pytest

from bilv.exactalg import LAM, MU, NU, Poly, cyclic_shift, x
from bilv.indexsets import enumerate_S_bruteforce
from bilv.integrals import (
    ConstraintViolation, K, K_b_expansion, K_b_via_exp, b_prime, c_from_b,
    deformed_casimir, jacobian_rank, op_D, op_Db, recursion_check, solve_b_from_c,
)
from bilv.poisson import BracketKind, ConstantStructure, generic_point
from conftest import B, X


def H(k):
    return sum((X(i) for i in range(1, 2 * k + 2)), Poly.zero())


def C(k):
    out = Poly.one()
    for i in range(1, 2 * k + 2):
        out = out * X(i)
    return out


def is_x(v):
    return v.kind == x(1).kind


def test_K_examples():
    assert K(1, 0) == H(1)
    assert K(2, 2) == C(2)
    assert K(2, 1) == (X(1) * X(2) * X(4) + X(1) * X(3) * X(4) + X(1) * X(3) * X(5)
                       + X(2) * X(3) * X(5) + X(2) * X(4) * X(5))


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_K_is_sum_over_definitional_sets(k):
    for ell in range(k + 1):
        expected = Poly({tuple((x(i), 1) for i in m): 1 for m in enumerate_S_bruteforce(k, ell)})
        assert K(k, ell) == expected
        assert K(k, ell).weighted_degrees(lambda v: 1) == {2 * ell + 1}


def test_b_prime_signs():
    s = ConstantStructure.symbolic(2)
    assert b_prime(s, 1, 3) == B(1, 3)     # distance k
    assert b_prime(s, 1, 4) == -B(1, 4)    # distance k+1
    with pytest.raises(ValueError):
        b_prime(s, 1, 2)


def test_deformed_casimir_k1():
    s = ConstantStructure.symbolic(1)
    expected = X(1) * X(2) * X(3) + B(2, 3) * X(1) - B(1, 3) * X(2) + B(1, 2) * X(3)
    got = deformed_casimir(1, s)
    assert got == expected
    # independent oracle: it must Poisson-commute with every coordinate
    kind = BracketKind.deformed(1, s)
    assert all(kind.bracket(X(i), expected).is_zero() for i in (1, 2, 3))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_casimir_degenerations(k):
    s = ConstantStructure.symbolic(k)
    assert deformed_casimir(k, ConstantStructure.zero(k)) == C(k)
    assert deformed_casimir(k, s).homogeneous_part(2 * k + 1, is_x) == K(k, k)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_casimir_property(k):
    s = ConstantStructure.symbolic(k)
    kind = BracketKind.deformed(k, s)
    cas = deformed_casimir(k, s)
    for i in range(1, 2 * k + 2):
        assert kind.bracket(X(i), cas).is_zero()


def test_casimir_fails_for_wrong_sign_rule():
    # flipping the sign of the distance-(k+1) pairs breaks the Casimir property
    s = ConstantStructure.symbolic(2)
    flipped = ConstantStructure(2, {p: (-v if p[1] - p[0] == 3 else v) for p, v in s.params.items()})
    cas = deformed_casimir(2, flipped)
    kind = BracketKind.deformed(2, s)
    assert any(not kind.bracket(X(i), cas).is_zero() for i in range(1, 6))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_expansion_examples(k):
    s = ConstantStructure.symbolic(k)
    Ks = K_b_expansion(k, s)
    assert Ks[0] == H(k)
    assert Ks[k] == deformed_casimir(k, s)
    assert K_b_expansion(k, ConstantStructure.zero(k)) == [K(k, ell) for ell in range(k + 1)]


def test_expansion_rejects_nu_in_parameters():
    s = ConstantStructure(1, {(1, 2): Poly.var(NU)})
    with pytest.raises(ValueError):
        K_b_expansion(1, s)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_leading_terms(k):
    for ell, Kb in enumerate(K_b_expansion(k, ConstantStructure.symbolic(k))):
        assert Kb.homogeneous_part(2 * ell + 1, is_x) == K(k, ell)
        assert Kb.degree(is_x) == 2 * ell + 1


def test_D_examples():
    assert op_D(1, C(1)) == H(1)
    assert op_D(2, Poly.const(5)).is_zero()
    s = ConstantStructure.symbolic(1)
    Db = op_Db(1, s, C(1))
    assert Db == deformed_casimir(1, s) - C(1)
    assert Db == B(1, 2) * X(3) + B(2, 3) * X(1) - B(1, 3) * X(2)


def test_via_exp_examples():
    s = ConstantStructure.symbolic(1)
    assert K_b_via_exp(1, 0, s) == H(1)
    assert K_b_via_exp(1, 1, s) == C(1) + op_Db(1, s, C(1))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_exp_route_matches_expansion(k):
    s = ConstantStructure.symbolic(k)
    assert [K_b_via_exp(k, ell, s) for ell in range(k + 1)] == K_b_expansion(k, s)


def test_recursion_examples():
    assert op_D(1, K(1, 1)) == K(1, 0)
    assert op_D(2, K(2, 2)) == K(2, 1)
    assert op_D(2, K(2, 1)) == 2 * K(2, 0)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_recursion_check(k):
    assert recursion_check(k)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_involution(k):
    s = ConstantStructure.symbolic(k)
    Ks = K_b_expansion(k, s)
    for kind in (BracketKind.deformed(k, s), BracketKind.constant(ConstantStructure.ones(k))):
        for a, c in combinations(range(k + 1), 2):
            assert kind.bracket(Ks[a], Ks[c]).is_zero()


@pytest.mark.parametrize("k", [1, 2, 3])
def test_bihamiltonian_ladder(k):
    s = ConstantStructure.symbolic(k)
    Ks = K_b_expansion(k, s)
    deformed = BracketKind.deformed(k, s)
    ones = BracketKind.constant(ConstantStructure.ones(k))
    for ell in range(k):
        assert deformed.vector_field(Ks[ell]) == ones.vector_field(Ks[ell + 1])
    # the top integral is a Casimir, so its ones-field is the only one left unpaired
    assert all(v.is_zero() for v in deformed.vector_field(Ks[k]))


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_pencil_casimir(k):
    # K_k^{b - nu 1} is a Casimir of the pencil
    s = ConstantStructure.symbolic(k)
    gen = deformed_casimir(k, s.shifted_forward(Poly.var(NU)))
    pencil = BracketKind.pencil(k, s)
    for i in range(1, 2 * k + 2):
        assert pencil.bracket(X(i), gen).is_zero()


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_jacobian_rank(k):
    Ks = K_b_expansion(k, ConstantStructure.symbolic(k))
    assert jacobian_rank(Ks, k, generic_point(k)) == k + 1


@pytest.mark.parametrize("k", [1, 2, 3])
def test_equivariance(k):
    s = ConstantStructure.symbolic(k)
    n = 2 * k + 1
    for ell, Kb in enumerate(K_b_expansion(k, s)):
        # shifting x and b together leaves the symbolic integral unchanged
        assert cyclic_shift(Kb, k) == Kb
        # shifting x alone is the same as rotating the parameters the other way
        x_only = Kb.rename(lambda v: x(v.i % n + 1) if is_x(v) else v)
        assert x_only == K_b_expansion(k, s.rotated(-1))[ell]


def test_solve_b_k1_symbolic():
    c1, c2, q = Poly.var(LAM), Poly.var(MU), Poly.var(NU)
    c = [c1, c2, -c1 - c2]
    s = solve_b_from_c(1, c, q)
    assert s.entry(1, 2) == c1 + q
    assert s.entry(2, 3) == c1 + c2 + q
    assert s.entry(3, 1) == q
    # oracle: b_{i,i+k} - b_{i-k,i} reproduces c
    assert c_from_b(s) == c


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_solve_b_residuals(k):
    n = 2 * k + 1
    c = [Fraction(i, 7) for i in range(1, n)]
    c.append(-sum(c))
    for free in (0, Fraction(3, 2)):
        s = solve_b_from_c(k, c, free)
        assert [v.constant_term() for v in c_from_b(s)] == c


def test_solve_b_trivial_cases():
    assert solve_b_from_c(2, [0] * 5) == ConstantStructure.zero(2)
    s = solve_b_from_c(2, [0] * 5, Fraction(5, 3))
    assert all(v == Poly.const(Fraction(5, 3)) for v in s.forward_values())


def test_solve_b_constraint():
    with pytest.raises(ConstraintViolation):
        solve_b_from_c(1, [1, 1, 1])
