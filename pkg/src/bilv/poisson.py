"""Quadratic Bogoyavlenskij-Itoh bracket, its constant deformations and pencils."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .exactalg import NU, X_KIND, Poly, Var, b, bareiss_rank, x
from .indexsets import _sign_matrix, mod_index

__all__ = [
    "DimensionMismatch", "AdmissibilityError", "build_A", "admissible_pairs", "is_admissible",
    "ConstantStructure", "BracketKind", "bracket", "hamiltonian_vector_field",
    "jacobi_violations", "jacobi_residuals", "rank_at_point", "generic_point",
    "deformed_lv_field",
]


class DimensionMismatch(ValueError):
    pass


class AdmissibilityError(ValueError):
    pass


def build_A(k: int) -> list[list[int]]:
    """The circulant sign matrix A^{(k)}: A_ij = 1 iff (j - i) mod 2k+1 lies in 1..k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return _sign_matrix(k)


def is_admissible(k: int, i: int, j: int) -> bool:
    return abs(i - j) in (k, k + 1)


def admissible_pairs(k: int) -> list[tuple[int, int]]:
    n = 2 * k + 1
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1) if is_admissible(k, i, j)]


@dataclass(frozen=True, eq=False)
class ConstantStructure:
    """Admissible constant Poisson structure ``{x_i, x_j}_b = b_ij``.

    ``params`` maps each admissible pair ``(i, j)`` with ``i < j`` to its
    value, a :class:`Poly` free of x-variables (a number or a symbolic
    expression in the b-variables).  Missing pairs are zero.
    """

    k: int
    params: Mapping[tuple[int, int], Poly] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (i, j), v in self.params.items():
            if i > j:
                i, j, v = j, i, -Poly.lift(v)
            if not (1 <= i < j <= 2 * self.k + 1) or not is_admissible(self.k, i, j):
                raise AdmissibilityError(f"pair ({i}, {j}) is not admissible for k={self.k}")
            v = Poly.lift(v)
            if any(w.kind == X_KIND for w in v.variables()):
                raise ValueError("structure constants may not depend on x")
            if v:
                clean[(i, j)] = v
        object.__setattr__(self, "params", clean)

    @property
    def n(self) -> int:
        return 2 * self.k + 1

    @classmethod
    def zero(cls, k: int) -> "ConstantStructure":
        return cls(k, {})

    @classmethod
    def symbolic(cls, k: int) -> "ConstantStructure":
        return cls(k, {(i, j): Poly.var(b(i, j)) for i, j in admissible_pairs(k)})

    @classmethod
    def from_forward(cls, k: int, values: Sequence) -> "ConstantStructure":
        """Build from ``values[r-1] = b_{r, r+k}`` (second index taken mod 2k+1)."""
        n = 2 * k + 1
        if len(values) != n:
            raise DimensionMismatch(f"need {n} values, got {len(values)}")
        return cls(k, {(r, mod_index(r + k, k)): Poly.lift(v) for r, v in zip(range(1, n + 1), values)})

    @classmethod
    def ones(cls, k: int) -> "ConstantStructure":
        """The pencil direction: ``b_{j+k, j} = 1`` for every j."""
        return cls.from_forward(k, [-1] * (2 * k + 1))

    def entry(self, i: int, j: int) -> Poly:
        """Skew lookup of b_ij for any i, j in I (indices reduced mod 2k+1)."""
        i, j = mod_index(i, self.k), mod_index(j, self.k)
        if i < j:
            return self.params.get((i, j), Poly.zero())
        if i > j:
            return -self.params.get((j, i), Poly.zero())
        return Poly.zero()

    def forward(self, r: int) -> Poly:
        """b_{r, r+k}; every admissible pair is ``{r, r+k}`` for exactly one r."""
        return self.entry(r, r + self.k)

    def forward_values(self) -> list[Poly]:
        return [self.forward(r) for r in range(1, self.n + 1)]

    def full(self) -> list[list[Poly]]:
        return [[self.entry(i, j) for j in range(1, self.n + 1)] for i in range(1, self.n + 1)]

    def __add__(self, other: "ConstantStructure") -> "ConstantStructure":
        if other.k != self.k:
            raise DimensionMismatch("structures for different k")
        keys = set(self.params) | set(other.params)
        return ConstantStructure(self.k, {p: self.params.get(p, Poly.zero()) + other.params.get(p, Poly.zero())
                                          for p in keys})

    def scaled(self, t) -> "ConstantStructure":
        t = Poly.lift(t)
        return ConstantStructure(self.k, {p: v * t for p, v in self.params.items()})

    def shifted_forward(self, t) -> "ConstantStructure":
        """Add ``t`` to every ``b_{r, r+k}``."""
        t = Poly.lift(t)
        return ConstantStructure.from_forward(self.k, [v + t for v in self.forward_values()])

    def rotated(self, steps: int) -> "ConstantStructure":
        """Structure with ``b'_{r, r+k} = b_{r+steps, r+steps+k}``."""
        return ConstantStructure.from_forward(
            self.k, [self.forward(r + steps) for r in range(1, self.n + 1)])

    def subs(self, point: Mapping[Var, object]) -> "ConstantStructure":
        return ConstantStructure(self.k, {p: v.subs(point) for p, v in self.params.items()})

    def is_numeric(self) -> bool:
        return all(v.is_constant() for v in self.params.values())

    def __eq__(self, other):
        return isinstance(other, ConstantStructure) and other.k == self.k and other.params == self.params

    def to_json(self) -> dict:
        out = {}
        for (i, j), v in sorted(self.params.items()):
            out[f"b_{i}_{j}"] = str(v.constant_term()) if v.is_constant() else v.to_json()
        return {"k": self.k, "params": out}

    @classmethod
    def from_json(cls, data: Mapping) -> "ConstantStructure":
        k = int(data["k"])
        return cls(k, _parse_params(k, data.get("params", {}), admissible_only=True))


def _parse_params(k: int, raw: Mapping, admissible_only: bool) -> dict[tuple[int, int], Poly]:
    params = {}
    for key, value in raw.items():
        parts = key.split("_")
        if len(parts) != 3 or parts[0] != "b":
            raise ValueError(f"bad parameter key {key!r}")
        i, j = int(parts[1]), int(parts[2])
        if not 1 <= i < j <= 2 * k + 1:
            raise ValueError(f"parameter {key!r} out of range for k={k}")
        if admissible_only and not is_admissible(k, i, j):
            raise AdmissibilityError(f"parameter {key!r} is not admissible for k={k}")
        params[(i, j)] = Poly.from_json(value) if isinstance(value, list) else Poly.const(Fraction(value))
    return params


def skew_matrix_from_json(data: Mapping) -> tuple[int, list[list[Poly]]]:
    """Load an arbitrary (possibly non-admissible) constant skew matrix."""
    k = int(data["k"])
    n = 2 * k + 1
    mat = [[Poly.zero()] * n for _ in range(n)]
    for (i, j), v in _parse_params(k, data.get("params", {}), admissible_only=False).items():
        mat[i - 1][j - 1] = v
        mat[j - 1][i - 1] = -v
    return k, mat


class BracketKind:
    """A Poisson bracket on the x-variables given by its structure matrix.

    Use the constructors :meth:`quadratic`, :meth:`constant`, :meth:`deformed`
    and :meth:`pencil`.
    """

    def __init__(self, name: str, k: int, matrix: list[list[Poly]]):
        self.name = name
        self.k = k
        self.n = 2 * k + 1
        self.matrix = matrix
        self._rows = [[(j, p) for j, p in enumerate(row) if p] for row in matrix]

    def __repr__(self):
        return f"BracketKind({self.name}, k={self.k})"

    @classmethod
    def quadratic(cls, k: int) -> "BracketKind":
        A = build_A(k)
        n = 2 * k + 1
        mat = [[Poly.zero() if A[i][j] == 0 else Poly.var(x(i + 1)) * Poly.var(x(j + 1)) * A[i][j]
                for j in range(n)] for i in range(n)]
        return cls("quadratic", k, mat)

    @classmethod
    def constant(cls, b_: ConstantStructure | list[list[Poly]], k: int | None = None) -> "BracketKind":
        """Constant bracket; also accepts a raw skew matrix (not necessarily admissible)."""
        if isinstance(b_, ConstantStructure):
            return cls("constant", b_.k, b_.full())
        if k is None:
            k = (len(b_) - 1) // 2
        return cls("constant", k, [[Poly.lift(v) for v in row] for row in b_])

    @classmethod
    def deformed(cls, k: int, b_: ConstantStructure | list[list[Poly]]) -> "BracketKind":
        q = cls.quadratic(k)
        c = cls.constant(b_, k)
        if c.n != q.n:
            raise DimensionMismatch("constant structure has the wrong size")
        return cls("deformed", k, _mat_add(q.matrix, c.matrix))

    @classmethod
    def pencil(cls, k: int, b_: ConstantStructure, nu=NU) -> "BracketKind":
        """``{,}_b^{(k)} - nu {,}_1``, the bracket whose Casimir generates the integrals."""
        ones = ConstantStructure.ones(k).full()
        nu = Poly.lift(nu)
        base = cls.deformed(k, b_).matrix
        return cls("pencil", k, [[base[i][j] - nu * ones[i][j] for j in range(len(base))]
                                 for i in range(len(base))])

    def _gradient(self, f: Poly) -> list[Poly]:
        for v in f.variables():
            if v.kind == X_KIND and not 1 <= v.i <= self.n:
                raise DimensionMismatch(f"{v} is not a coordinate for k={self.k}")
        return [f.partial(x(i)) for i in range(1, self.n + 1)]

    def bracket(self, f: Poly, g: Poly) -> Poly:
        f, g = Poly.lift(f), Poly.lift(g)
        df, dg = self._gradient(f), self._gradient(g)
        total = Poly.zero()
        for i, row in enumerate(self._rows):
            if not df[i]:
                continue
            q = Poly.zero()
            for j, p in row:
                if dg[j]:
                    q = q + p * dg[j]
            if q:
                total = total + df[i] * q
        return total

    def vector_field(self, h: Poly) -> list[Poly]:
        dh = self._gradient(Poly.lift(h))
        out = []
        for row in self._rows:
            comp = Poly.zero()
            for j, p in row:
                if dh[j]:
                    comp = comp + p * dh[j]
            out.append(comp)
        return out

    def jacobi_sum(self, i: int, j: int, m: int) -> Poly:
        """{{x_i, x_j}, x_m} + cyclic, with 1-based indices."""
        P = self.matrix

        def inner(a, c, d):
            # {P_ac, x_d}
            grad = self._gradient(P[a - 1][c - 1])
            return sum((grad[t] * P[t][d - 1] for t in range(self.n) if grad[t]), Poly.zero())

        return inner(i, j, m) + inner(j, m, i) + inner(m, i, j)


def _mat_add(a, c):
    return [[a[i][j] + c[i][j] for j in range(len(a))] for i in range(len(a))]


def bracket(kind: BracketKind, f: Poly, g: Poly) -> Poly:
    return kind.bracket(f, g)


def hamiltonian_vector_field(kind: BracketKind, h: Poly) -> list[Poly]:
    """Component i is ``{x_i, h}``."""
    return kind.vector_field(h)


def jacobi_residuals(kind: BracketKind) -> dict[tuple[int, int, int], Poly]:
    """Nonzero Jacobi sums over all triples i < j < m."""
    out = {}
    for i, j, m in combinations(range(1, kind.n + 1), 3):
        s = kind.jacobi_sum(i, j, m)
        if s:
            out[(i, j, m)] = s
    return out


def jacobi_violations(b_: ConstantStructure | list[list], k: int | None = None) -> list[tuple[int, int, int]]:
    """Triples (i, j, m), j < m, all distinct, with ``b_jm (A_ij + A_im) != 0``.

    ``b_`` may be any skew matrix; the result is empty iff the sum of the
    quadratic bracket and ``{,}_b`` satisfies the Jacobi identity.
    """
    if isinstance(b_, ConstantStructure):
        k, mat = b_.k, b_.full()
    else:
        mat = [[Poly.lift(v) for v in row] for row in b_]
        k = (len(mat) - 1) // 2 if k is None else k
    A = build_A(k)
    n = 2 * k + 1
    if len(mat) != n:
        raise DimensionMismatch(f"expected a {n}x{n} matrix")
    out = []
    for j, m in combinations(range(n), 2):
        if not mat[j][m]:
            continue
        for i in range(n):
            if i in (j, m):
                continue
            if A[i][j] + A[i][m] != 0:
                out.append((i + 1, j + 1, m + 1))
    return sorted(out)


def rank_at_point(kind: BracketKind, point: Mapping[Var, object]) -> int:
    """Rank of the structure matrix evaluated at a rational point."""
    rows = [[p.eval(point) for p in row] for row in kind.matrix]
    return bareiss_rank(rows)


def _primes(count: int) -> list[int]:
    out, c = [], 2
    while len(out) < count:
        if all(c % p for p in out if p * p <= c):
            out.append(c)
        c += 1
    return out


DEFAULT_SEED = 20240917


def generic_point(k: int, seed: int = DEFAULT_SEED) -> dict[Var, int]:
    """Distinct small primes for every x_i and admissible b_ij, shuffled by ``seed``."""
    pairs = admissible_pairs(k)
    n = 2 * k + 1
    pool = _primes(4 * (n + len(pairs)))
    chosen = random.Random(seed).sample(pool, n + len(pairs))
    point: dict[Var, int] = {x(i): chosen[i - 1] for i in range(1, n + 1)}
    for (i, j), val in zip(pairs, chosen[n:]):
        point[b(i, j)] = val
    return point


def deformed_lv_field(k: int, b_: ConstantStructure | None = None) -> list[Poly]:
    """Explicit deformed Lotka-Volterra field: x_i sum_j A_ij x_j + b_{i,i+k} - b_{i-k,i}."""
    A = build_A(k)
    n = 2 * k + 1
    b_ = ConstantStructure.zero(k) if b_ is None else b_
    out = []
    for i in range(1, n + 1):
        lin = sum((Poly.var(x(j)) * A[i - 1][j - 1] for j in range(1, n + 1) if A[i - 1][j - 1]), Poly.zero())
        out.append(Poly.var(x(i)) * lin + b_.forward(i) - b_.forward(i - k))
    return out
