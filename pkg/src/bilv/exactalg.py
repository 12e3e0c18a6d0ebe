"""Sparse multivariate polynomials over the rationals.

Variables are drawn from a single global pool: the phase variables ``x_i``,
the deformation parameters ``b_{i,j}`` (``i < j``), and the auxiliary
symbols ``lam``, ``mu`` and ``nu``.  A :class:`Poly` is an immutable map from
monomials to exact rational coefficients; integer coefficients are kept as
``int`` and everything else as :class:`fractions.Fraction`.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Callable, Iterable, Mapping, NamedTuple, Union

__all__ = [
    "Var", "Poly", "LaurentPoly", "MissingVariable",
    "x", "b", "LAM", "MU", "NU", "parse_var",
    "poly_add", "poly_mul", "poly_partial", "poly_eval", "poly_coeff_of",
    "cyclic_shift", "laurent_mul", "laurent_det", "poly_det",
    "bareiss_rank", "bareiss_det",
]

X_KIND, B_KIND, LAM_KIND, MU_KIND, NU_KIND = range(5)


class MissingVariable(KeyError):
    """Raised when an evaluation point does not cover a polynomial."""


class Var(NamedTuple):
    kind: int
    i: int = 0
    j: int = 0

    def __str__(self):
        if self.kind == X_KIND:
            return f"x{self.i}"
        if self.kind == B_KIND:
            return f"b_{self.i}_{self.j}"
        return ("lam", "mu", "nu")[self.kind - LAM_KIND]

    __repr__ = __str__


def x(i: int) -> Var:
    return Var(X_KIND, i)


def b(i: int, j: int) -> Var:
    if not i < j:
        raise ValueError(f"b-variables are stored with i < j, got ({i}, {j})")
    return Var(B_KIND, i, j)


LAM = Var(LAM_KIND)
MU = Var(MU_KIND)
NU = Var(NU_KIND)

_NAME_RE = re.compile(r"^(?:x(\d+)|b_(\d+)_(\d+)|(lam|mu|nu))$")


def parse_var(name: str) -> Var:
    m = _NAME_RE.match(name)
    if m is None:
        raise ValueError(f"not a variable name: {name!r}")
    if m.group(1):
        return x(int(m.group(1)))
    if m.group(2):
        return b(int(m.group(2)), int(m.group(3)))
    return {"lam": LAM, "mu": MU, "nu": NU}[m.group(4)]


Number = Union[int, Fraction]
Monomial = tuple  # sorted tuple of (Var, exponent) pairs


def _norm(c):
    if type(c) is Fraction:
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, bool) or not isinstance(c, (int, Fraction)):
        raise TypeError(f"coefficients must be int or Fraction, got {type(c).__name__}")
    return int(c)


def _mono_mul(a: Monomial, b_: Monomial) -> Monomial:
    if not a:
        return b_
    if not b_:
        return a
    d = dict(a)
    for v, e in b_:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def _mono_key(m: Monomial):
    # graded lex: higher degree first, then larger exponent on the earlier variable first
    return (-_mono_degree(m), [(v, -e) for v, e in m])


class Poly:
    """Immutable sparse polynomial with exact rational coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Number] | None = None):
        clean = {}
        if terms:
            for m, c in terms.items():
                c = _norm(c)
                if c:
                    clean[m] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "Poly":
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, c: Number) -> "Poly":
        return cls({(): c})

    @classmethod
    def var(cls, v: Var, power: int = 1) -> "Poly":
        if power < 0:
            raise ValueError("negative exponent")
        return cls({((v, power),) if power else (): 1})

    @classmethod
    def zero(cls) -> "Poly":
        return cls._raw({})

    @classmethod
    def one(cls) -> "Poly":
        return cls._raw({(): 1})

    @staticmethod
    def lift(value) -> "Poly":
        if isinstance(value, Poly):
            return value
        if isinstance(value, Var):
            return Poly.var(value)
        return Poly.const(value)

    # -- inspection --------------------------------------------------------

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def items(self):
        return self._terms.items()

    def terms(self) -> list[tuple[Monomial, Number]]:
        """Terms in canonical graded-lexicographic order."""
        return sorted(self._terms.items(), key=lambda t: _mono_key(t[0]))

    def variables(self) -> set[Var]:
        return {v for m in self._terms for v, _ in m}

    def is_constant(self) -> bool:
        return all(not m for m in self._terms)

    def constant_term(self) -> Fraction:
        return Fraction(self._terms.get((), 0))

    def degree(self, only: Callable[[Var], bool] | None = None) -> int:
        """Total degree, optionally counting only variables accepted by ``only``."""
        if not self._terms:
            return -1
        if only is None:
            return max(_mono_degree(m) for m in self._terms)
        return max(sum(e for v, e in m if only(v)) for m in self._terms)

    def weighted_degrees(self, weight: Callable[[Var], int]) -> set[int]:
        return {sum(weight(v) * e for v, e in m) for m in self._terms}

    def homogeneous_part(self, deg: int, only: Callable[[Var], bool] | None = None) -> "Poly":
        keep = (lambda v: True) if only is None else only
        return Poly._raw({m: c for m, c in self._terms.items()
                          if sum(e for v, e in m if keep(v)) == deg})

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        other = Poly.lift(other)
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = _norm(s)
            else:
                out.pop(m, None)
        return Poly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-Poly.lift(other))

    def __rsub__(self, other):
        return Poly.lift(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            if isinstance(other, Var):
                other = Poly.var(other)
            else:
                c = _norm(other)
                if not c:
                    return Poly.zero()
                return Poly._raw({m: _norm(v * c) for m, v in self._terms.items()})
        if not self._terms or not other._terms:
            return Poly.zero()
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Poly._raw({m: _norm(c) for m, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = Fraction(other)
        if not c:
            raise ZeroDivisionError("polynomial division by zero")
        return self * (1 / c)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result, base = Poly.one(), self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == ({(): other} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- calculus and substitution -----------------------------------------

    def partial(self, v: Var) -> "Poly":
        out: dict = {}
        for m, c in self._terms.items():
            for idx, (w, e) in enumerate(m):
                if w == v:
                    nm = m[:idx] + ((w, e - 1),) + m[idx + 1:] if e > 1 else m[:idx] + m[idx + 1:]
                    out[nm] = out.get(nm, 0) + c * e
                    break
        return Poly._raw({m: _norm(c) for m, c in out.items() if c})

    def eval(self, assignment: Mapping[Var, Number]) -> Fraction:
        total = Fraction(0)
        for m, c in self._terms.items():
            term = Fraction(c)
            for v, e in m:
                try:
                    term *= Fraction(assignment[v]) ** e
                except KeyError:
                    raise MissingVariable(str(v)) from None
            total += term
        return total

    def subs(self, mapping: Mapping[Var, object]) -> "Poly":
        """Substitute polynomials (or numbers) for variables; others are kept."""
        mapping = {v: Poly.lift(p) for v, p in mapping.items()}
        powers: dict = {}

        def power(v, e):
            key = (v, e)
            if key not in powers:
                powers[key] = mapping[v] ** e
            return powers[key]

        acc: dict = {}
        for m, c in self._terms.items():
            kept = tuple((v, e) for v, e in m if v not in mapping)
            factor = Poly._raw({kept: c})
            for v, e in m:
                if v in mapping:
                    factor = factor * power(v, e)
            for mm, cc in factor._terms.items():
                acc[mm] = acc.get(mm, 0) + cc
        return Poly._raw({m: _norm(c) for m, c in acc.items() if c})

    def rename(self, fn: Callable[[Var], Var]) -> "Poly":
        """Apply an injective relabelling of variables."""
        out: dict = {}
        for m, c in self._terms.items():
            nm = tuple(sorted((fn(v), e) for v, e in m))
            out[nm] = out.get(nm, 0) + c
        return Poly._raw({m: _norm(c) for m, c in out.items() if c})

    def coeff_of(self, v: Var, power: int) -> "Poly":
        if power < 0:
            raise ValueError("power must be non-negative")
        out = {}
        for m, c in self._terms.items():
            e = next((e for w, e in m if w == v), 0)
            if e == power:
                out[tuple((w, f) for w, f in m if w != v)] = c
        return Poly._raw(out)

    def coeffs_in(self, v: Var) -> dict[int, "Poly"]:
        """Split into ``{power: coefficient}`` with respect to one variable."""
        parts: dict[int, dict] = {}
        for m, c in self._terms.items():
            e = next((e for w, e in m if w == v), 0)
            parts.setdefault(e, {})[tuple((w, f) for w, f in m if w != v)] = c
        return {e: Poly._raw(t) for e, t in parts.items()}

    # -- serialization -----------------------------------------------------

    def to_json(self) -> list[dict]:
        return [{"coeff": str(Fraction(c)), "exps": {str(v): e for v, e in m}}
                for m, c in self.terms()]

    @classmethod
    def from_json(cls, data: Iterable[Mapping]) -> "Poly":
        terms: dict = {}
        for t in data:
            m = tuple(sorted((parse_var(name), int(e)) for name, e in t["exps"].items() if int(e)))
            terms[m] = terms.get(m, 0) + Fraction(t["coeff"])
        return cls(terms)

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for m, c in self.terms():
            mono = "*".join(f"{v}^{e}" if e > 1 else str(v) for v, e in m)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"Poly({self})"


# functional spellings used across the package
def poly_add(a: Poly, b_: Poly) -> Poly:
    return a + b_


def poly_mul(a: Poly, b_: Poly) -> Poly:
    return a * b_


def poly_partial(p: Poly, v: Var) -> Poly:
    return p.partial(v)


def poly_eval(p: Poly, assignment: Mapping[Var, Number]) -> Fraction:
    return p.eval(assignment)


def poly_coeff_of(p: Poly, v: Var, power: int) -> Poly:
    return p.coeff_of(v, power)


def cyclic_shift(p: Poly, k: int, steps: int = 1) -> Poly:
    """Rotate indices ``i -> i + steps`` (mod 2k+1) on x- and b-variables.

    b-variables map to the skew entry ``b_{i+1, j+1}``, so a pair that wraps
    around picks up a minus sign.
    """
    n = 2 * k + 1
    mapping: dict[Var, Poly] = {}
    for v in p.variables():
        if v.kind == X_KIND:
            mapping[v] = Poly.var(x((v.i - 1 + steps) % n + 1))
        elif v.kind == B_KIND:
            i, j = (v.i - 1 + steps) % n + 1, (v.j - 1 + steps) % n + 1
            mapping[v] = Poly.var(b(i, j)) if i < j else -Poly.var(b(j, i))
    return p.subs(mapping)


class LaurentPoly:
    """Laurent polynomial in ``lam`` with :class:`Poly` coefficients.

    ``shift`` is the lowest exponent present; ``coeffs`` maps the offset from
    ``shift`` to the coefficient.
    """

    __slots__ = ("_by_exp",)

    def __init__(self, by_exp: Mapping[int, Poly] | None = None):
        self._by_exp = {e: Poly.lift(c) for e, c in (by_exp or {}).items() if Poly.lift(c)}

    @classmethod
    def from_lam_poly(cls, p: Poly, shift: int = 0) -> "LaurentPoly":
        """Interpret ``p`` (polynomial in lam) times ``lam**shift``."""
        return cls({e + shift: c for e, c in p.coeffs_in(LAM).items()})

    @property
    def shift(self) -> int:
        return min(self._by_exp) if self._by_exp else 0

    @property
    def coeffs(self) -> dict[int, Poly]:
        s = self.shift
        return {e - s: c for e, c in sorted(self._by_exp.items())}

    def coeff(self, exp: int) -> Poly:
        return self._by_exp.get(exp, Poly.zero())

    def exponents(self) -> list[int]:
        return sorted(self._by_exp)

    def is_zero(self) -> bool:
        return not self._by_exp

    def to_lam_poly(self, shift: int = 0) -> Poly:
        """Return ``lam**shift * self`` as a polynomial; needs no negative powers."""
        out = Poly.zero()
        for e, c in self._by_exp.items():
            if e + shift < 0:
                raise ValueError("negative lam power remains")
            out = out + c * Poly.var(LAM, e + shift)
        return out

    def __add__(self, other):
        other = other if isinstance(other, LaurentPoly) else LaurentPoly({0: Poly.lift(other)})
        out = dict(self._by_exp)
        for e, c in other._by_exp.items():
            out[e] = out.get(e, Poly.zero()) + c
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -c for e, c in self._by_exp.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly({0: Poly.lift(other)})
        out: dict[int, Poly] = {}
        for e1, c1 in self._by_exp.items():
            for e2, c2 in other._by_exp.items():
                out[e1 + e2] = out.get(e1 + e2, Poly.zero()) + c1 * c2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly({0: Poly.lift(other)})
        return self._by_exp == other._by_exp

    def __hash__(self):
        return hash(frozenset(self._by_exp.items()))

    def __str__(self):
        if not self._by_exp:
            return "0"
        return " + ".join(f"({c})*lam^{e}" for e, c in sorted(self._by_exp.items(), reverse=True))

    __repr__ = __str__


def laurent_mul(a: LaurentPoly, b_: LaurentPoly) -> LaurentPoly:
    return a * b_


def poly_det(matrix: list[list[Poly]]) -> Poly:
    """Determinant by Laplace expansion along rows, memoized on column subsets.

    Zero entries are skipped, so sparse matrices (such as Lax operators) stay
    cheap even at size 9.
    """
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("matrix must be square")
    if n == 0:
        return Poly.one()
    cols_of = [[(j, e) for j, e in enumerate(row) if e] for row in matrix]
    memo: dict[int, Poly] = {}

    def minor(row: int, used: int) -> Poly:
        if row == n:
            return Poly.one()
        if used in memo:
            return memo[used]
        acc = Poly.zero()
        for j, e in cols_of[row]:
            if used >> j & 1:
                continue
            sub = minor(row + 1, used | (1 << j))
            if not sub:
                continue
            # sign = (-1)^(number of still-free columns to the left of j)
            left_free = sum(1 for c in range(j) if not used >> c & 1)
            term = e * sub
            acc = acc - term if left_free & 1 else acc + term
        memo[used] = acc
        return acc

    return minor(0, 0)


def laurent_det(matrix: list[list[LaurentPoly]]) -> LaurentPoly:
    """Determinant of a square matrix of Laurent polynomials in ``lam``.

    Every entry is multiplied by ``lam**s`` to clear negative powers; the
    polynomial determinant is then shifted back by ``lam**(-s*n)``.
    """
    n = len(matrix)
    entries = [[e if isinstance(e, LaurentPoly) else LaurentPoly({0: Poly.lift(e)}) for e in row]
               for row in matrix]
    s = max([0] + [-e.shift for row in entries for e in row if not e.is_zero()])
    cleared = [[e.to_lam_poly(s) for e in row] for row in entries]
    return LaurentPoly.from_lam_poly(poly_det(cleared), -s * n)


def _bareiss(rows: list[list[Fraction]]) -> tuple[int, Fraction]:
    """Fraction-free elimination with row pivoting; returns (rank, det-or-0)."""
    a = [list(map(Fraction, r)) for r in rows]
    m = len(a)
    ncols = len(a[0]) if a else 0
    prev = Fraction(1)
    rank = 0
    sign = 1
    for col in range(ncols):
        if rank == m:
            break
        piv = next((r for r in range(rank, m) if a[r][col] != 0), None)
        if piv is None:
            continue
        if piv != rank:
            a[rank], a[piv] = a[piv], a[rank]
            sign = -sign
        p = a[rank][col]
        for r in range(rank + 1, m):
            for c in range(col + 1, ncols):
                a[r][c] = (a[r][c] * p - a[r][col] * a[rank][c]) / prev
            a[r][col] = Fraction(0)
        prev = p
        rank += 1
    det = Fraction(0)
    if m == ncols and rank == m:
        det = sign * a[m - 1][m - 1] if m else Fraction(1)
    return rank, det


def bareiss_rank(rows: list[list[Number]]) -> int:
    if not rows:
        return 0
    return _bareiss(rows)[0]


def bareiss_det(rows: list[list[Number]]) -> Fraction:
    if not rows:
        return Fraction(1)
    return _bareiss(rows)[1]
