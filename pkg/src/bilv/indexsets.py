"""Index sets S_l of the Bogoyavlenskij-Itoh integrals and the maps between them.

Tuples are plain, strictly increasing, 1-based ``tuple[int, ...]`` over
``I = {1, ..., 2k+1}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

__all__ = [
    "WrongArity", "DomainViolation", "SMembership",
    "mod_index", "is_in_S", "enumerate_S", "enumerate_S_bruteforce",
    "sigma", "tau", "complement", "is_in_S_prime", "enumerate_S_prime",
    "phi1", "phi2", "S_plus", "S_minus",
]

IndexTuple = tuple


class WrongArity(ValueError):
    pass


class DomainViolation(ValueError):
    pass


def mod_index(r: int, k: int) -> int:
    """Representative of ``r`` modulo 2k+1 in ``{1, ..., 2k+1}``."""
    return (r - 1) % (2 * k + 1) + 1


def _sign_matrix(half: int) -> list[list[int]]:
    # A^{(half)}; half = 0 gives the 1x1 zero matrix
    n = 2 * half + 1
    return [[0 if i == j else (1 if (j - i) % n <= half else -1) for j in range(n)]
            for i in range(n)]


@dataclass(frozen=True)
class SMembership:
    tuple: IndexTuple
    ell: int
    in_S: bool
    witness: str | None = None


def is_in_S(k: int, ell: int, m: IndexTuple) -> SMembership:
    m = tuple(m)
    if len(m) != 2 * ell + 1:
        raise WrongArity(f"expected {2 * ell + 1} entries, got {len(m)}")
    # 1-based access: m_[i] == m_i
    m_ = (None,) + m
    for i in range(1, ell + 1):
        if not m_[ell + i] < m_[i] + k + 1:
            return SMembership(m, ell, False, f"(1) i={i}: m_{ell + i} < m_{i} + k + 1 fails")
        if not m_[i] + k + 1 <= m_[ell + i + 1]:
            return SMembership(m, ell, False, f"(1) i={i}: m_{i} + k + 1 <= m_{ell + i + 1} fails")
    if not m_[2 * ell + 1] < m_[ell + 1] + k + 1:
        return SMembership(m, ell, False, f"(2): m_{2 * ell + 1} < m_{ell + 1} + k + 1 fails")
    return SMembership(m, ell, True)


def enumerate_S(k: int, ell: int) -> list[IndexTuple]:
    """Members of S_ell in lexicographic order, by pruned backtracking."""
    if not 0 <= ell <= k:
        raise ValueError(f"ell must lie in [0, {k}]")
    n, size = 2 * k + 1, 2 * ell + 1
    out: list[IndexTuple] = []

    def feasible(prefix: list[int]) -> bool:
        # check every inequality whose indices are already fixed
        p = len(prefix)
        for i in range(1, ell + 1):
            if ell + i <= p and not prefix[ell + i - 1] < prefix[i - 1] + k + 1:
                return False
            if ell + i + 1 <= p and not prefix[i - 1] + k + 1 <= prefix[ell + i]:
                return False
        if p == size and not prefix[2 * ell] < prefix[ell] + k + 1:
            return False
        return True

    def extend(prefix: list[int]):
        if len(prefix) == size:
            out.append(tuple(prefix))
            return
        start = prefix[-1] + 1 if prefix else 1
        remaining = size - len(prefix)
        for v in range(start, n - remaining + 2):
            prefix.append(v)
            if feasible(prefix):
                extend(prefix)
            prefix.pop()

    extend([])
    return out


def enumerate_S_bruteforce(k: int, ell: int) -> list[IndexTuple]:
    """S_ell from its definition: tuples whose principal submatrix of A^{(k)} is A^{(ell)}."""
    big, small = _sign_matrix(k), _sign_matrix(ell)
    size = 2 * ell + 1
    return [m for m in combinations(range(1, 2 * k + 2), size)
            if all(big[m[i] - 1][m[j] - 1] == small[i][j] for i in range(size) for j in range(size))]


def sigma(k: int, m: IndexTuple) -> IndexTuple:
    return tuple(2 * k + 2 - v for v in reversed(m))


def tau(k: int, m: IndexTuple) -> IndexTuple:
    if not m:
        return ()
    if m[-1] < 2 * k + 1:
        return tuple(v + 1 for v in m)
    return (1,) + tuple(v + 1 for v in m[:-1])


def complement(k: int, m: IndexTuple) -> IndexTuple:
    present = set(m)
    return tuple(i for i in range(1, 2 * k + 2) if i not in present)


def is_in_S_prime(k: int, ell: int, mp: IndexTuple) -> bool:
    half = k - ell
    if len(mp) != 2 * half:
        raise WrongArity(f"expected {2 * half} entries, got {len(mp)}")
    return all(mp[half + j] - mp[j] in (k, k + 1) for j in range(half))


def enumerate_S_prime(k: int, ell: int) -> list[IndexTuple]:
    return sorted(complement(k, m) for m in enumerate_S(k, ell))


def S_plus(k: int, ell: int) -> list[IndexTuple]:
    return [m for m in enumerate_S(k, ell) if 1 in m]


def S_minus(k: int, ell: int) -> list[IndexTuple]:
    return [m for m in enumerate_S(k, ell) if 1 not in m]


def _insert(m: IndexTuple, extra: tuple[int, int]) -> IndexTuple:
    return tuple(sorted(m + extra))


def _check_phi_domain(k: int, ell: int, m: IndexTuple, extra: tuple[int, int]):
    if ell < 1:
        raise DomainViolation("phi maps need ell >= 1")
    if len(m) != 2 * ell - 1:
        raise DomainViolation(f"expected {2 * ell - 1} entries, got {len(m)}")
    if 1 in m:
        raise DomainViolation("input contains 1")
    if set(extra) & set(m):
        raise DomainViolation(f"input collides with inserted indices {extra}")
    if not is_in_S(k, ell - 1, m).in_S:
        raise DomainViolation(f"{m} is not in S_{ell - 1}")


def phi1(k: int, ell: int, m: IndexTuple) -> IndexTuple:
    m = tuple(m)
    _check_phi_domain(k, ell, m, (1, k + 2))
    if not m[ell - 1] <= k + 1:
        raise DomainViolation(f"phi1 needs m_{ell} <= {k + 1}")
    return _insert(m, (1, k + 2))


def phi2(k: int, ell: int, m: IndexTuple) -> IndexTuple:
    m = tuple(m)
    _check_phi_domain(k, ell, m, (1, k + 1))
    if not m[ell - 1] >= k + 2:
        raise DomainViolation(f"phi2 needs m_{ell} >= {k + 2}")
    return _insert(m, (1, k + 1))
