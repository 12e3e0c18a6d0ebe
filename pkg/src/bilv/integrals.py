"""First integrals of the (deformed) Bogoyavlenskij-Itoh systems.

The deformed integrals ``K_l^b`` are available through three independent
constructions: the pencil expansion of the deformed Casimir
(:func:`K_b_expansion`), the exponential of the operator ``D_b``
(:func:`K_b_via_exp`), and the characteristic polynomial of the Lax operator
(:func:`bilv.lax.K_b_via_lax`).
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Mapping, Sequence

from .exactalg import NU, Poly, Var, bareiss_rank, x
from .indexsets import complement, enumerate_S, mod_index
from .poisson import ConstantStructure, DimensionMismatch

__all__ = [
    "ConstraintViolation", "K", "b_prime", "deformed_casimir", "K_b_expansion",
    "op_D", "op_Db", "K_b_via_exp", "recursion_check", "solve_b_from_c",
    "c_from_b", "jacobian_rank",
]


class ConstraintViolation(ValueError):
    pass


def K(k: int, ell: int) -> Poly:
    """Undeformed integral: sum of x_m over m in S_ell."""
    return Poly({tuple((x(i), 1) for i in m): 1 for m in enumerate_S(k, ell)})


def b_prime(b: ConstantStructure, r: int, s: int) -> Poly:
    """Sign-adjusted constant: b_rs when s - r = k, b_sr when s - r = k + 1 (r < s)."""
    if s - r == b.k:
        return b.entry(r, s)
    if s - r == b.k + 1:
        return b.entry(s, r)
    raise ValueError(f"({r}, {s}) is not an admissible pair")


def deformed_casimir(k: int, b: ConstantStructure) -> Poly:
    """Casimir of the deformed bracket, with leading term x_1 x_2 ... x_{2k+1}."""
    if b.k != k:
        raise DimensionMismatch("structure has a different k")
    total: dict = {}
    for ell in range(k + 1):
        half = k - ell
        for m in enumerate_S(k, ell):
            mp = complement(k, m)
            coeff = Poly.one()
            for j in range(half):
                coeff = coeff * b_prime(b, mp[j], mp[half + j])
                if not coeff:
                    break
            if not coeff:
                continue
            mono = tuple((x(i), 1) for i in m)
            for cm, c in coeff.items():
                key = tuple(sorted(cm + mono))
                total[key] = total.get(key, 0) + c
    return Poly(total)


def K_b_expansion(k: int, b: ConstantStructure) -> list[Poly]:
    """``[K_0^b, ..., K_k^b]`` read off the pencil Casimir.

    The pencil Casimir is the deformed Casimir with every ``b_{j+k, j}``
    replaced by ``b_{j+k, j} - nu``; ``K_l^b`` is the coefficient of
    ``nu**(k - l)``.
    """
    if any(NU in v.variables() for v in b.params.values()):
        raise ValueError("structure constants already involve nu")
    gen = deformed_casimir(k, b.shifted_forward(Poly.var(NU)))
    return [gen.coeff_of(NU, k - ell) for ell in range(k + 1)]


def op_D(k: int, p: Poly) -> Poly:
    """Sum over i of the second partial in x_i and x_{i+k}."""
    n = 2 * k + 1
    out = Poly.zero()
    for i in range(1, n + 1):
        d = p.partial(x(i))
        if d:
            out = out + d.partial(x(mod_index(i + k, k)))
    return out


def op_Db(k: int, b: ConstantStructure, p: Poly) -> Poly:
    """Like :func:`op_D` but each term weighted by b_{i, i+k}."""
    n = 2 * k + 1
    out = Poly.zero()
    for i in range(1, n + 1):
        w = b.forward(i)
        if not w:
            continue
        d = p.partial(x(i))
        if d:
            out = out + w * d.partial(x(mod_index(i + k, k)))
    return out


def K_b_via_exp(k: int, ell: int, b: ConstantStructure) -> Poly:
    # D_b drops the x-degree by two, so the series stops after ell terms
    term = K(k, ell)
    total = term
    for j in range(1, ell + 1):
        term = op_Db(k, b, term)
        if not term:
            break
        total = total + term / factorial(j)
    return total


def recursion_check(k: int, b: ConstantStructure | None = None) -> bool:
    """Check D K_i = (k-i+1) K_{i-1} and D K_{i+1}^b = (k-i) K_i^b."""
    b = ConstantStructure.symbolic(k) if b is None else b
    Ks = [K(k, i) for i in range(k + 1)]
    if any(op_D(k, Ks[i]) != Ks[i - 1] * (k - i + 1) for i in range(1, k + 1)):
        return False
    Kb = K_b_expansion(k, b)
    return all(op_D(k, Kb[i + 1]) == Kb[i] * (k - i) for i in range(k))


def solve_b_from_c(k: int, c: Sequence, free_const=0) -> ConstantStructure:
    """Constant structure whose Hamiltonian field for H has constant terms ``c``.

    Walks i = 1, 1+k, 1+2k, ... (mod 2k+1), accumulating
    ``b_{i,i+k} = c_1 + c_{1+k} + ... + c_i + free_const``.
    """
    n = 2 * k + 1
    if len(c) != n:
        raise DimensionMismatch(f"need {n} deformation constants, got {len(c)}")
    c = [v if isinstance(v, Poly) else Poly.const(Fraction(v)) for v in c]
    total = sum(c, Poly.zero())
    if total:
        raise ConstraintViolation(f"deformation constants must sum to zero (sum = {total})")
    forward: list = [None] * n
    acc = Poly.lift(free_const)
    i = 1
    for _ in range(n):
        acc = acc + c[i - 1]
        forward[i - 1] = acc
        i = mod_index(i + k, k)
    return ConstantStructure.from_forward(k, forward)


def c_from_b(b: ConstantStructure) -> list[Poly]:
    """Residual map ``c_i = b_{i,i+k} - b_{i-k,i}``."""
    return [b.forward(i) - b.forward(i - b.k) for i in range(1, b.n + 1)]


def jacobian_rank(polys: Sequence[Poly], k: int, point: Mapping[Var, object]) -> int:
    """Rank of the x-Jacobian of ``polys`` at a rational point."""
    n = 2 * k + 1
    rows = [[p.partial(x(i)).eval(point) for i in range(1, n + 1)] for p in polys]
    return bareiss_rank(rows)
