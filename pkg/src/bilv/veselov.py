"""Relabelling of the deformed system as the periodic Veselov-Shabat chain.

The chain variables ``g_i = x_{rho_i}`` are represented by the x-slot of the
same index, i.e. a polynomial "in g" uses ``x(i)`` for ``g_i``.  The 2x2
transfer matrices use ``lam`` as their spectral variable.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

from .exactalg import LAM, X_KIND, Poly, x
from .indexsets import mod_index
from .integrals import deformed_casimir
from .poisson import BracketKind, ConstantStructure, deformed_lv_field

__all__ = [
    "rho", "rho_inverse", "x_to_g", "g_to_x", "beta", "g_to_f", "f_to_g",
    "g_field", "vs_vector_field_check", "vs_bracket_table", "poisson_map_check",
    "vs_transfer_trace", "vs_trace_formula", "vs_trace_formula_x",
    "vs_equivalence_check", "F", "f_velocity_constants", "site_U", "per_site_lax_check",
]


def rho(k: int) -> list[int]:
    """``[rho_1, ..., rho_{2k+1}]`` with ``rho_l = (l-1)k + 1`` mod 2k+1."""
    n = 2 * k + 1
    if gcd(k, n) != 1:
        raise ValueError("k and 2k+1 must be coprime")
    return [mod_index((ell - 1) * k + 1, k) for ell in range(1, n + 1)]


def rho_inverse(k: int) -> list[int]:
    r = rho(k)
    inv = [0] * len(r)
    for ell, v in enumerate(r, start=1):
        inv[v - 1] = ell
    return inv


def _relabel(p: Poly, table: list[int]) -> Poly:
    def fn(v):
        if v.kind != X_KIND:
            return v
        return x(table[v.i - 1])
    return p.rename(fn)


def x_to_g(k: int, p: Poly) -> Poly:
    """Rewrite a polynomial in x as a polynomial in g (x_{rho_i} becomes g_i)."""
    return _relabel(p, rho_inverse(k))


def g_to_x(k: int, p: Poly) -> Poly:
    return _relabel(p, rho(k))


def beta(k: int, b: ConstantStructure) -> list[Poly]:
    """``[beta_1, ..., beta_{2k+1}]`` with ``beta_{i+1} = b_{rho_i, rho_i + k}``."""
    n = 2 * k + 1
    out = [Poly.zero()] * n
    for i, r in enumerate(rho(k), start=1):
        out[i % n] = b.forward(r)
    return out


def g_to_f(g: Sequence) -> list:
    n = len(g)
    if n % 2 == 0:
        raise ValueError("need an odd number of variables")
    half = Fraction(1, 2)
    out = []
    for i in range(n):
        s = sum(((-1) ** j * g[(i + j) % n] for j in range(n)), Poly.zero() if isinstance(g[0], Poly) else 0)
        out.append(s * half)
    return out


def f_to_g(f: Sequence) -> list:
    n = len(f)
    return [f[i] + f[(i + 1) % n] for i in range(n)]


def _g_vars(k: int) -> list[Poly]:
    return [Poly.var(x(i)) for i in range(1, 2 * k + 2)]


def g_field(k: int, b: ConstantStructure) -> list[Poly]:
    """The deformed flow pushed forward to the g-variables."""
    field = deformed_lv_field(k, b)
    return [x_to_g(k, field[r - 1]) for r in rho(k)]


def vs_vector_field_check(k: int, b: ConstantStructure, beta_override: Sequence | None = None) -> bool:
    """Does ``f_i' + f_{i+1}' = f_{i+1}^2 - f_i^2 + beta_{i+1} - beta_i`` hold identically?"""
    n = 2 * k + 1
    bt = [Poly.lift(v) for v in beta_override] if beta_override is not None else beta(k, b)
    f = g_to_f(_g_vars(k))
    gdot = g_field(k, b)
    # f_i' + f_{i+1}' is exactly g_i'
    return all(gdot[i] == f[(i + 1) % n] ** 2 - f[i] ** 2 + bt[(i + 1) % n] - bt[i] for i in range(n))


def vs_bracket_table(k: int, b: ConstantStructure) -> dict[tuple[int, int], Poly]:
    """``{g_i, g_j}`` for i < j, obtained by pushing the deformed bracket forward."""
    kind = BracketKind.deformed(k, b)
    r = rho(k)
    n = 2 * k + 1
    return {(i, j): x_to_g(k, kind.matrix[r[i - 1] - 1][r[j - 1] - 1])
            for i in range(1, n + 1) for j in range(i + 1, n + 1)}


def expected_vs_bracket(k: int, b: ConstantStructure, i: int, j: int) -> Poly:
    """Closed form of the chain bracket.

    Adjacent pairs give ``g_i g_{i+1} + beta_{i+1}``, other pairs
    ``(-1)^{j-i+1} g_i g_j``.  The wrap pair ``(1, 2k+1)`` is adjacent
    cyclically: ``{g_{2k+1}, g_1} = g_{2k+1} g_1 + beta_1``.
    """
    n = 2 * k + 1
    bt = beta(k, b)
    gi, gj = Poly.var(x(i)), Poly.var(x(j))
    if j == i + 1:
        return gi * gj + bt[j - 1]
    if (i, j) == (1, n):
        return -(gi * gj) - bt[0]
    return gi * gj * (-1) ** (j - i + 1)


def poisson_map_check(k: int, b: ConstantStructure) -> bool:
    return all(v == expected_vs_bracket(k, b, i, j) for (i, j), v in vs_bracket_table(k, b).items())


def _mat2_mul(a, c):
    return [[a[0][0] * c[0][0] + a[0][1] * c[1][0], a[0][0] * c[0][1] + a[0][1] * c[1][1]],
            [a[1][0] * c[0][0] + a[1][1] * c[1][0], a[1][0] * c[0][1] + a[1][1] * c[1][1]]]


def transfer_matrix(f_i, beta_i) -> list[list[Poly]]:
    f_i, beta_i = Poly.lift(f_i), Poly.lift(beta_i)
    lam = Poly.var(LAM)
    return [[f_i, Poly.one()], [f_i * f_i + beta_i - lam, f_i]]


def vs_transfer_trace(k: int, beta_: Sequence, f: Sequence | None = None) -> Poly:
    """Trace of ``L_1 L_2 ... L_{2k+1}``; ``f`` defaults to the f-variables written in g."""
    n = 2 * k + 1
    f = g_to_f(_g_vars(k)) if f is None else [Poly.lift(v) for v in f]
    prod = transfer_matrix(f[0], beta_[0])
    for i in range(1, n):
        prod = _mat2_mul(prod, transfer_matrix(f[i], beta_[i]))
    return prod[0][0] + prod[1][1]


def _apply_pair_operators(start: Poly, pairs: list[tuple[int, int, Poly]]) -> Poly:
    # product of commuting operators (1 + w d^2/dx_a dx_c), applied one at a time
    p = start
    for a, c, w in pairs:
        d = p.partial(x(a))
        if d:
            d = d.partial(x(c))
        p = p + w * d if d else p
    return p


def vs_trace_formula(k: int, beta_: Sequence) -> Poly:
    """``prod_i (1 + (beta_{i+1} - lam) d^2/dg_i dg_{i+1}) g_1 g_2 ... g_{2k+1}``."""
    n = 2 * k + 1
    lam = Poly.var(LAM)
    start = Poly({tuple((x(i), 1) for i in range(1, n + 1)): 1})
    ops = [(i, i % n + 1, Poly.lift(beta_[i % n]) - lam) for i in range(1, n + 1)]
    return _apply_pair_operators(start, ops)


def vs_trace_formula_x(k: int, b: ConstantStructure) -> Poly:
    """The same operator product written in x: factors ``1 + (b_{i,i+k} - lam) D_{i,i+k}``."""
    n = 2 * k + 1
    lam = Poly.var(LAM)
    start = Poly({tuple((x(i), 1) for i in range(1, n + 1)): 1})
    ops = [(i, mod_index(i + k, k), b.forward(i) - lam) for i in range(1, n + 1)]
    return _apply_pair_operators(start, ops)


def vs_equivalence_check(k: int, b: ConstantStructure) -> dict[str, bool]:
    """Compare the transfer-matrix trace, its operator formula and the shifted Casimir."""
    bt = beta(k, b)
    via_ops = vs_trace_formula(k, bt)
    via_product = vs_transfer_trace(k, bt)
    casimir = deformed_casimir(k, b.shifted_forward(-Poly.var(LAM)))
    return {
        "product_equals_formula": via_product == via_ops,
        "formula_equals_casimir": g_to_x(k, via_ops) == casimir,
        "x_formula_equals_casimir": vs_trace_formula_x(k, b) == casimir,
    }


def F(k: int, i: int) -> Poly:
    """Auxiliary polynomial of the site matrix U_i, written in g (indices mod 2k+1)."""
    def g(t):
        return Poly.var(x(mod_index(t, k)))

    total = Poly.zero()
    for t in range(1, k + 1):
        plus = sum((g(i + 2 * s) for s in range(t)), Poly.zero())
        minus = sum((g(i + 2 * s) for s in range(t, k + 1)), Poly.zero())
        total = total + g(i + 2 * t - 1) * (plus - minus)
    return total


def f_velocity_constants(k: int, b: ConstantStructure) -> list[Poly]:
    """Constant (beta-dependent) part of f_i' under the deformed flow."""
    n = 2 * k + 1
    bt = beta(k, b)
    return g_to_f([bt[(i + 1) % n] - bt[i] for i in range(n)])


def site_U(k: int, i: int, b: ConstantStructure) -> list[list[Poly]]:
    """Second matrix of the site Lax pair (1-based site i).

    Its lower-left entry is ``f_i^2 + beta_i - lam - F_i - gamma_i``, where
    ``gamma_i`` is the constant part of ``f_i'``; at b = 0 the velocity
    ``f_i'`` equals ``F_i``.
    """
    n = 2 * k + 1
    bt = beta(k, b)
    f = g_to_f(_g_vars(k))
    gamma = f_velocity_constants(k, b)
    j = (i - 1) % n
    lower = f[j] * f[j] + bt[j] - Poly.var(LAM) - F(k, j + 1) - gamma[j]
    return [[Poly.zero(), Poly.one()], [lower, Poly.zero()]]


def per_site_lax_check(k: int, b: ConstantStructure) -> bool:
    """Check ``L_i' = L_i U_{i+1} - U_i L_i`` entrywise for every site."""
    n = 2 * k + 1
    bt = beta(k, b)
    f = g_to_f(_g_vars(k))
    fdot = g_to_f(g_field(k, b))
    for i in range(1, n + 1):
        L = transfer_matrix(f[i - 1], bt[i - 1])
        fd = fdot[i - 1]
        Ldot = [[fd, Poly.zero()], [f[i - 1] * fd * 2, fd]]
        right = _mat2_mul(L, site_U(k, i + 1, b))
        left = _mat2_mul(site_U(k, i, b), L)
        if any(Ldot[a][c] != right[a][c] - left[a][c] for a in range(2) for c in range(2)):
            return False
    return True
