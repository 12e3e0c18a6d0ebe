from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bilv.exactalg import LAM, Poly, x
from bilv.integrals import K_b_expansion, deformed_casimir
from bilv.poisson import ConstantStructure
from bilv.veselov import (
    F, beta, f_to_g, g_field, g_to_f, g_to_x, per_site_lax_check, poisson_map_check,
    rho, rho_inverse, vs_bracket_table, vs_equivalence_check, vs_trace_formula,
    vs_trace_formula_x, vs_transfer_trace, vs_vector_field_check, x_to_g,
)
from conftest import X


def prod_x(k):
    out = Poly.one()
    for i in range(1, 2 * k + 2):
        out = out * X(i)
    return out


def test_rho_examples():
    assert rho(2) == [1, 3, 5, 2, 4]
    # g_2 = x_3
    assert x_to_g(2, X(3)) == X(2)
    assert g_to_x(2, X(2)) == X(3)


@pytest.mark.parametrize("k", range(1, 51))
def test_rho_is_permutation(k):
    assert sorted(rho(k)) == list(range(1, 2 * k + 2))
    inv = rho_inverse(k)
    assert all(inv[r - 1] == ell for ell, r in enumerate(rho(k), start=1))


@given(st.integers(1, 3), st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_relabel_roundtrip(k, cs):
    p = cs[0] * X(1) * X(2 * k + 1) + cs[1] * X(2) ** 2 + cs[2]
    assert g_to_x(k, x_to_g(k, p)) == p


def test_hamiltonian_maps_to_sum():
    for k in (1, 2, 3):
        H = sum((X(i) for i in range(1, 2 * k + 2)), Poly.zero())
        assert x_to_g(k, H) == H


def test_f_g_examples():
    assert f_to_g([1, 0, 0, 0, 0]) == [1, 0, 0, 0, 1]
    assert g_to_f([2, 2, 2]) == [1, 1, 1]


@given(st.integers(1, 4).flatmap(lambda k: st.lists(
    st.fractions(min_value=-5, max_value=5, max_denominator=5), min_size=2 * k + 1, max_size=2 * k + 1)))
def test_f_g_inverse(g):
    assert f_to_g(g_to_f(g)) == g
    assert g_to_f(f_to_g(g)) == g


def test_f_g_needs_odd_length():
    with pytest.raises(ValueError):
        g_to_f([1, 2])


def test_vector_field_examples():
    assert vs_vector_field_check(1, ConstantStructure.zero(1))
    s = ConstantStructure.symbolic(2)
    assert vs_vector_field_check(2, s)
    bt = beta(2, s)
    bt[0] = bt[0] + 1
    assert not vs_vector_field_check(2, s, beta_override=bt)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_vector_field_symbolic(k):
    assert vs_vector_field_check(k, ConstantStructure.symbolic(k))


def test_transfer_trace_example():
    tr = vs_transfer_trace(1, [0, 0, 0], f=[1, 1, 1])
    assert tr.subs({LAM: 0}) == Poly.const(8)


def test_trace_formula_trivial():
    for k in (1, 2):
        n = 2 * k + 1
        assert vs_trace_formula(k, [0] * n).subs({LAM: 0}) == prod_x(k)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_equivalence(k):
    res = vs_equivalence_check(k, ConstantStructure.symbolic(k))
    assert res == {"product_equals_formula": True, "formula_equals_casimir": True,
                   "x_formula_equals_casimir": True}


def test_equivalence_degenerate():
    z = ConstantStructure.zero(2)
    assert g_to_x(2, vs_trace_formula(2, beta(2, z))).subs({LAM: 0}) == prod_x(2)
    assert vs_trace_formula_x(2, z).subs({LAM: 0}) == deformed_casimir(2, z)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_lambda_coefficients_are_the_integrals(k):
    s = ConstantStructure.symbolic(k)
    trace = g_to_x(k, vs_trace_formula(k, beta(k, s)))
    Ks = K_b_expansion(k, s)
    for ell in range(k + 1):
        assert trace.coeff_of(LAM, k - ell) == Ks[ell] * (-1) ** (k - ell)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_poisson_map(k):
    assert poisson_map_check(k, ConstantStructure.symbolic(k))


def test_wrap_pair_bracket():
    # {g_1, g_n} closes the chain like an adjacent pair: {g_n, g_1} = g_n g_1 + beta_1
    for k in (1, 2, 3):
        s = ConstantStructure.symbolic(k)
        n = 2 * k + 1
        table = vs_bracket_table(k, s)
        assert -table[(1, n)] == X(n) * X(1) + beta(k, s)[0]


@pytest.mark.parametrize("k", [1, 2, 3])
def test_F_is_undeformed_velocity(k):
    fdot = g_to_f(g_field(k, ConstantStructure.zero(k)))
    assert [F(k, i) for i in range(1, 2 * k + 2)] == fdot


@pytest.mark.parametrize("k", [1, 2])
def test_per_site_lax(k):
    assert per_site_lax_check(k, ConstantStructure.symbolic(k))
    assert per_site_lax_check(k, ConstantStructure.zero(k))
