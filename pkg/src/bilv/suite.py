"""Named identity checks run by ``bilv verify``.

Every check takes ``(k, seed)`` and returns a :class:`CheckResult`.  Checks
whose cost grows too fast are skipped above a per-check ``max_k``.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations

from .dynamics import drift_converges, integrate, seeded_system
from .exactalg import Poly, x
from .indexsets import (
    complement, enumerate_S, enumerate_S_bruteforce, is_in_S, is_in_S_prime,
    phi1, phi2, sigma, tau,
)
from .integrals import (
    K_b_expansion, K_b_via_exp, deformed_casimir, jacobian_rank, recursion_check,
)
from .lax import K_b_via_lax, det_lax, det_lax_formula, lax_residual, nonzero_entries
from .poisson import (
    BracketKind, ConstantStructure, generic_point, is_admissible,
    jacobi_residuals, jacobi_violations,
)
from .veselov import per_site_lax_check, poisson_map_check, vs_equivalence_check, vs_vector_field_check

__all__ = ["CheckResult", "CHECKS", "run_suite", "thread_count"]


@dataclass
class CheckResult:
    name: str
    ok: bool | None  # None means skipped
    detail: str = ""
    seconds: float = 0.0

    @property
    def status(self) -> str:
        return "skipped" if self.ok is None else ("pass" if self.ok else "fail")

    def to_json(self) -> dict:
        return {"name": self.name, "status": self.status, "detail": self.detail}


def _fail(name, detail):
    return CheckResult(name, False, detail)


def check_index_oracle(k, seed):
    for ell in range(k + 1):
        if enumerate_S(k, ell) != enumerate_S_bruteforce(k, ell):
            return _fail("index_sets_oracle", f"mismatch at ell={ell}")
    return CheckResult("index_sets_oracle", True, f"ell=0..{k}")


def phi_diagram_counterexamples(k: int, ell: int) -> list[str]:
    """Problems with the phi1/phi2 bijection diagram at level ``ell``."""
    problems = []
    S_prev_minus = [m for m in enumerate_S(k, ell - 1) if 1 not in m]
    S_plus = [n for n in enumerate_S(k, ell) if 1 in n]
    dom1 = [m for m in S_prev_minus if m[ell - 1] <= k + 1]
    dom2 = [m for m in S_prev_minus if m[ell - 1] >= k + 2]
    img1 = [phi1(k, ell, m) for m in dom1]
    img2 = [phi2(k, ell, m) for m in dom2]
    if sorted(img1) != sorted(n for n in S_plus if k + 2 in n) or len(set(img1)) != len(img1):
        problems.append(f"phi1 is not a bijection onto its target (ell={ell})")
    if sorted(img2) != sorted(n for n in S_plus if k + 1 in n) or len(set(img2)) != len(img2):
        problems.append(f"phi2 is not a bijection onto its target (ell={ell})")
    for m in dom1:
        left = tau(k, sigma(k, m))
        if left not in dom2:
            problems.append(f"tau.sigma{m} leaves the lower-left set")
        elif phi2(k, ell, left) != tau(k, sigma(k, phi1(k, ell, m))):
            problems.append(f"diagram does not commute at {m}")
    return problems


def check_index_lemmas(k, seed):
    n = 2 * k + 1
    for ell in range(k + 1):
        members = set(enumerate_S(k, ell))
        for m in members:
            if sigma(k, m) not in members or tau(k, m) not in members:
                return _fail("index_sets_lemmas", f"closure fails at {m}")
        for m in combinations(range(1, n + 1), 2 * ell + 1):
            if (m in members) != is_in_S_prime(k, ell, complement(k, m)):
                return _fail("index_sets_lemmas", f"complement duality fails at {m}")
            if (m in members) != is_in_S(k, ell, m).in_S:
                return _fail("index_sets_lemmas", f"membership test disagrees at {m}")
        if ell >= 1:
            problems = phi_diagram_counterexamples(k, ell)
            if problems:
                return _fail("index_sets_lemmas", problems[0])
    return CheckResult("index_sets_lemmas", True, "closure, phi diagram, complement duality")


def check_compatibility(k, seed):
    n = 2 * k + 1
    for i, j in combinations(range(1, n + 1), 2):
        mat = [[Poly.zero()] * n for _ in range(n)]
        mat[i - 1][j - 1], mat[j - 1][i - 1] = Poly.one(), -Poly.one()
        if (not jacobi_violations(mat, k)) != is_admissible(k, i, j):
            return _fail("compatibility", f"classification wrong for support ({i},{j})")
    b = ConstantStructure.symbolic(k)
    for kind in (BracketKind.deformed(k, b), BracketKind.pencil(k, b)):
        res = jacobi_residuals(kind)
        if res:
            return _fail("compatibility", f"{kind.name}: Jacobi fails at {next(iter(res))}")
    return CheckResult("compatibility", True, f"{n * (n - 1) // 2} single-pair supports, symbolic b")


def check_casimir(k, seed):
    b = ConstantStructure.symbolic(k)
    kind = BracketKind.deformed(k, b)
    cas = deformed_casimir(k, b)
    for i in range(1, 2 * k + 2):
        if kind.bracket(Poly.var(x(i)), cas):
            return _fail("deformed_casimir", f"{{x{i}, K_k^b}} != 0")
    return CheckResult("deformed_casimir", True, "symbolic b")


def check_triple_route(k, seed):
    b = ConstantStructure.symbolic(k)
    exp_route = K_b_expansion(k, b)
    exp_op = [K_b_via_exp(k, ell, b) for ell in range(k + 1)]
    via_lax = K_b_via_lax(k, b)
    if exp_route != exp_op:
        return _fail("triple_route", "expansion and exponential routes differ")
    if exp_route != via_lax:
        return _fail("triple_route", "expansion and Lax routes differ")
    return CheckResult("triple_route", True, "symbolic b")


def check_lax(k, seed):
    b = ConstantStructure.symbolic(k)
    bad = nonzero_entries(lax_residual(k, b))
    if bad:
        return _fail("lax_identities", f"residual nonzero at {bad[:3]}")
    if det_lax(k, b) != det_lax_formula(k, b):
        return _fail("lax_identities", "determinant formula mismatch")
    return CheckResult("lax_identities", True, "symbolic b")


def check_involution(k, seed):
    b = ConstantStructure.symbolic(k)
    Ks = K_b_expansion(k, b)
    for kind in (BracketKind.deformed(k, b), BracketKind.constant(ConstantStructure.ones(k))):
        for ell, m in combinations(range(k + 1), 2):
            if kind.bracket(Ks[ell], Ks[m]):
                return _fail("involution", f"{kind.name}: {{K_{ell}, K_{m}}} != 0")
    return CheckResult("involution", True, "deformed and constant brackets, symbolic b")


def check_ladder(k, seed):
    b = ConstantStructure.symbolic(k)
    Ks = K_b_expansion(k, b)
    deformed = BracketKind.deformed(k, b)
    ones = BracketKind.constant(ConstantStructure.ones(k))
    for ell in range(k):
        if deformed.vector_field(Ks[ell]) != ones.vector_field(Ks[ell + 1]):
            return _fail("bihamiltonian_ladder", f"ladder breaks at ell={ell}")
    return CheckResult("bihamiltonian_ladder", True, "symbolic b")


def check_rank(k, seed):
    b = ConstantStructure.symbolic(k)
    point = generic_point(k, seed)
    r = jacobian_rank(K_b_expansion(k, b), k, point)
    return CheckResult("jacobian_rank", r == k + 1, f"rank {r} at the seeded generic point")


def check_recursion(k, seed):
    return CheckResult("recursion", recursion_check(k), "symbolic b")


def check_veselov(k, seed):
    b = ConstantStructure.symbolic(k)
    parts = {"poisson_map": poisson_map_check(k, b), "vector_field": vs_vector_field_check(k, b)}
    parts.update(vs_equivalence_check(k, b))
    if k <= 2:
        parts["per_site_lax"] = per_site_lax_check(k, b)
    failed = [name for name, ok in parts.items() if not ok]
    return CheckResult("veselov_shabat", not failed, ", ".join(failed) if failed else ", ".join(parts))


def check_conservation(k, seed):
    spec, x0 = seeded_system(k, seed)
    xs = [float(v) for v in x0]
    coarse = integrate(spec, xs, 10.0, 2e-12, 2e-12, stride=0.1)
    fine = integrate(spec, xs, 10.0, 1e-12, 1e-12, stride=0.1)
    worst = float(max(fine.max_rel_drift))
    ok = worst < 1e-8 and drift_converges(coarse.max_rel_drift, fine.max_rel_drift)
    return CheckResult("conservation", ok, f"max relative drift {worst:.3e}")


# (name, check, largest k it is run for)
CHECKS = [
    ("index_sets_oracle", check_index_oracle, 6),
    ("index_sets_lemmas", check_index_lemmas, 6),
    ("compatibility", check_compatibility, 3),
    ("deformed_casimir", check_casimir, 4),
    ("triple_route", check_triple_route, 3),
    ("lax_identities", check_lax, 3),
    ("involution", check_involution, 4),
    ("bihamiltonian_ladder", check_ladder, 3),
    ("jacobian_rank", check_rank, 4),
    ("recursion", check_recursion, 4),
    ("veselov_shabat", check_veselov, 3),
    ("conservation", check_conservation, 4),
]


def thread_count() -> int:
    raw = os.environ.get("BILV_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _run_one(args) -> CheckResult:
    index, k, seed = args
    name, fn, max_k = CHECKS[index]
    if k > max_k:
        return CheckResult(name, None, f"not run for k > {max_k}")
    start = time.perf_counter()
    try:
        res = fn(k, seed)
    except Exception as exc:  # report, don't crash the whole suite
        res = CheckResult(name, False, f"{type(exc).__name__}: {exc}")
    res.seconds = time.perf_counter() - start
    return res


def run_suite(k: int, seed: int, workers: int | None = None) -> list[CheckResult]:
    """Run every check for ``k``; results come back in a fixed order."""
    workers = thread_count() if workers is None else workers
    jobs = [(i, k, seed) for i in range(len(CHECKS))]
    if workers <= 1:
        return [_run_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_one, jobs))
