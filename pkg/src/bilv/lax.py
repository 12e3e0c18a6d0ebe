"""Lax operator ``L^b(lam) = X + lam^{-1} Delta + lam M`` and its spectral invariants."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Mapping

from .exactalg import LAM, MU, LaurentPoly, Poly, laurent_det, x
from .indexsets import mod_index
from .integrals import deformed_casimir
from .poisson import ConstantStructure, deformed_lv_field

__all__ = [
    "LaxParts", "LaxOperator", "build_lax", "lax_residual", "nonzero_entries",
    "det_lax", "det_lax_formula", "char_poly_lax", "char_poly_formula",
    "K_b_via_lax", "supporting_permutations",
]

PolyMatrix = list  # list[list[Poly]]


@dataclass(frozen=True)
class LaxParts:
    X: PolyMatrix
    M: PolyMatrix
    Delta: PolyMatrix
    B: PolyMatrix


@dataclass(frozen=True)
class LaxOperator:
    k: int
    b: ConstantStructure
    parts: LaxParts
    entries: list  # list[list[LaurentPoly]]

    def lam_cleared(self) -> PolyMatrix:
        """``lam * L`` as an honest polynomial matrix."""
        return [[e.to_lam_poly(1) for e in row] for row in self.entries]


def _zeros(n):
    return [[Poly.zero() for _ in range(n)] for _ in range(n)]


def _matmul(a, c):
    n = len(a)
    out = _zeros(n)
    for i in range(n):
        for t in range(n):
            if not a[i][t]:
                continue
            for j in range(n):
                if c[t][j]:
                    out[i][j] = out[i][j] + a[i][t] * c[t][j]
    return out


def _commutator(a, c):
    ac, ca = _matmul(a, c), _matmul(c, a)
    n = len(a)
    return [[ac[i][j] - ca[i][j] for j in range(n)] for i in range(n)]


def lax_parts(k: int, b: ConstantStructure) -> LaxParts:
    n = 2 * k + 1
    X, M, Delta, B = _zeros(n), _zeros(n), _zeros(n), _zeros(n)
    for i in range(1, n + 1):
        X[i - 1][mod_index(i - k, k) - 1] = Poly.var(x(i))
        M[i - 1][mod_index(i + 1, k) - 1] = Poly.one()
        Delta[i - 1][i - 1] = b.entry(i + k, i)
        B[i - 1][i - 1] = -sum((Poly.var(x(mod_index(i + t, k))) for t in range(k + 1)), Poly.zero())
    return LaxParts(X, M, Delta, B)


def build_lax(k: int, b: ConstantStructure | None = None) -> LaxOperator:
    b = ConstantStructure.zero(k) if b is None else b
    parts = lax_parts(k, b)
    n = 2 * k + 1
    entries = [[LaurentPoly({0: parts.X[i][j], -1: parts.Delta[i][j], 1: parts.M[i][j]})
                for j in range(n)] for i in range(n)]
    return LaxOperator(k, b, parts, entries)


def _time_derivative(p: Poly, field: list[Poly]) -> Poly:
    out = Poly.zero()
    for i, f in enumerate(field, start=1):
        d = p.partial(x(i))
        if d:
            out = out + d * f
    return out


def lax_residual(k: int, b: ConstantStructure | None = None,
                 B_perturbation: Mapping[tuple[int, int], Poly] | None = None) -> list[list[LaurentPoly]]:
    """Entrywise ``L' - [L, B - lam M^{k+1}]`` along the deformed flow.

    ``B_perturbation`` adds terms to B (1-based keys) for sanity checks.
    """
    lax = build_lax(k, b)
    n = 2 * k + 1
    B = [row[:] for row in lax.parts.B]
    for (i, j), extra in (B_perturbation or {}).items():
        B[i - 1][j - 1] = B[i - 1][j - 1] + Poly.lift(extra)
    Mpow = lax.parts.M
    for _ in range(k):
        Mpow = _matmul(Mpow, lax.parts.M)
    lam = Poly.var(LAM)
    second = [[B[i][j] - lam * Mpow[i][j] for j in range(n)] for i in range(n)]
    lamL = lax.lam_cleared()
    field = deformed_lv_field(k, lax.b)
    dot = [[_time_derivative(e, field) for e in row] for row in lamL]
    comm = _commutator(lamL, second)
    return [[LaurentPoly.from_lam_poly(dot[i][j] - comm[i][j], -1) for j in range(n)] for i in range(n)]


def nonzero_entries(matrix) -> list[tuple[int, int]]:
    return [(i + 1, j + 1) for i, row in enumerate(matrix) for j, e in enumerate(row) if not e.is_zero()]


def det_lax(k: int, b: ConstantStructure | None = None) -> LaurentPoly:
    return laurent_det(build_lax(k, b).entries)


def det_lax_formula(k: int, b: ConstantStructure | None = None) -> LaurentPoly:
    """``lam^{2k+1} + lam^{-(2k+1)} prod_j b_{j+k,j} + K_k^b``."""
    b = ConstantStructure.zero(k) if b is None else b
    n = 2 * k + 1
    prod = Poly.one()
    for j in range(1, n + 1):
        prod = prod * b.entry(j + k, j)
    return LaurentPoly({n: Poly.one(), -n: prod}) + LaurentPoly({0: deformed_casimir(k, b)})


def char_poly_lax(k: int, b: ConstantStructure | None = None) -> LaurentPoly:
    """``det(L^b(lam) - mu Id)`` as a Laurent polynomial in lam (coefficients in mu, x, b)."""
    lax = build_lax(k, b)
    n = 2 * k + 1
    mu = LaurentPoly({0: Poly.var(MU)})
    shifted = [[lax.entries[i][j] - mu if i == j else lax.entries[i][j] for j in range(n)] for i in range(n)]
    return laurent_det(shifted)


def char_poly_formula(k: int, b: ConstantStructure | None = None) -> LaurentPoly:
    """Closed form obtained by replacing every b_{j+k,j} with b_{j+k,j} - lam*mu."""
    b = ConstantStructure.zero(k) if b is None else b
    n = 2 * k + 1
    lm = Poly.var(LAM) * Poly.var(MU)
    prod = Poly.one()
    for j in range(1, n + 1):
        prod = prod * (b.entry(j + k, j) - lm)
    cas = deformed_casimir(k, b.shifted_forward(lm))
    return (LaurentPoly({n: Poly.one()}) + LaurentPoly.from_lam_poly(prod, -n)
            + LaurentPoly.from_lam_poly(cas))


def K_b_via_lax(k: int, b: ConstantStructure | None = None) -> list[Poly]:
    """``K_l^b`` as the coefficient of ``(lam mu)^{k-l}`` in the characteristic polynomial."""
    chi = char_poly_lax(k, b)
    return [chi.coeff(k - ell).coeff_of(MU, k - ell) for ell in range(k + 1)]


def supporting_permutations(k: int, b: ConstantStructure | None = None) -> list[tuple[int, ...]]:
    """Permutations (1-based images) with a nonzero Leibniz term in det(L E).

    ``L E`` moves the last k columns of L to the front, so its entry (i, c)
    is ``L[i][c - k]``.  Brute force over all (2k+1)! permutations.
    """
    lax = build_lax(k, b)
    n = 2 * k + 1
    Lam = [[lax.entries[i][(c - k) % n] for c in range(n)] for i in range(n)]
    out = []
    for perm in permutations(range(n)):
        if all(not Lam[i][perm[i]].is_zero() for i in range(n)):
            out.append(tuple(p + 1 for p in perm))
    return out
