"""Command-line front end: ``bilv <subcommand> ...``.

Exit codes: 0 when every requested check passes, 1 when a check fails,
2 on configuration errors (bad flags, unreadable or invalid input).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from .exactalg import X_KIND, LaurentPoly
from .indexsets import WrongArity, enumerate_S, enumerate_S_prime
from .integrals import ConstraintViolation, K_b_expansion, solve_b_from_c
from .lax import char_poly_formula, char_poly_lax, det_lax, det_lax_formula, lax_residual, nonzero_entries
from .poisson import DEFAULT_SEED, ConstantStructure, jacobi_violations, skew_matrix_from_json

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(Exception):
    pass


# -- input helpers ---------------------------------------------------------

def _rationals(text: str) -> list[Fraction]:
    try:
        return [Fraction(v.strip()) for v in text.split(",") if v.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse rational list {text!r}: {exc}") from None


def _floats(text: str) -> list[float]:
    try:
        return [float(Fraction(v.strip())) for v in text.split(",") if v.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse number list {text!r}: {exc}") from None


def _read_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None


def _check_k(k: int, file_k: int):
    if file_k != k:
        raise ConfigError(f"--k {k} does not match k={file_k} in the b-file")


def _structure(args) -> ConstantStructure:
    """b from --b-file, or from --c/--free, or fully symbolic."""
    if getattr(args, "b_file", None):
        b = ConstantStructure.from_json(_read_json(args.b_file))
        _check_k(args.k, b.k)
        return b
    if getattr(args, "c", None) is not None:
        return solve_b_from_c(args.k, _rationals(args.c), Fraction(args.free))
    return ConstantStructure.symbolic(args.k)


def _dump(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: str | None):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _say(args, msg: str):
    # human summary goes to stderr when the machine-readable output owns stdout
    stream = sys.stderr if getattr(args, "out", "-") in (None, "-") else sys.stdout
    print(msg, file=stream)


# -- subcommands -----------------------------------------------------------

def cmd_sets(args) -> int:
    if not 0 <= args.ell <= args.k:
        raise ConfigError(f"--ell must lie in [0, {args.k}]")
    tuples = enumerate_S_prime(args.k, args.ell) if args.prime else enumerate_S(args.k, args.ell)
    for t in tuples:
        print(" ".join(str(v) for v in t))
    return EXIT_OK


def cmd_jacobi(args) -> int:
    data = _read_json(args.b_file)
    if args.admissible_only:
        b = ConstantStructure.from_json(data)
        k, violations = b.k, jacobi_violations(b)
    else:
        k, mat = skew_matrix_from_json(data)
        violations = jacobi_violations(mat, k)
    _check_k(args.k, k)
    report = {"k": k, "ok": not violations, "violations": [list(t) for t in violations]}
    _emit(_dump(report), args.out)
    _say(args, f"{len(violations)} Jacobi violation(s)")
    return EXIT_OK if not violations else EXIT_FAIL


def cmd_integrals(args) -> int:
    b = _structure(args)
    Ks = K_b_expansion(args.k, b)
    degrees = [p.degree(lambda v: v.kind == X_KIND) for p in Ks]
    report = {
        "metadata": {"k": args.k, "route": "expansion", "degrees": degrees},
        "b": b.to_json(),
        "integrals": {f"K{ell}": p.to_json() for ell, p in enumerate(Ks)},
    }
    _emit(_dump(report), args.out)
    _say(args, f"wrote K_0^b .. K_{args.k}^b (x-degrees {degrees})")
    return EXIT_OK


def _laurent_nonzero(diff: LaurentPoly) -> list[int]:
    return sorted(e for e in diff.exponents() if not diff.coeff(e).is_zero())


def cmd_lax(args) -> int:
    b = _structure(args)
    if args.check == "residual":
        bad = [list(e) for e in nonzero_entries(lax_residual(args.k, b))]
    elif args.check == "det":
        bad = _laurent_nonzero(det_lax(args.k, b) - det_lax_formula(args.k, b))
    else:
        bad = _laurent_nonzero(char_poly_lax(args.k, b) - char_poly_formula(args.k, b))
    report = {"k": args.k, "check": args.check, "ok": not bad, "nonzero_entries": bad}
    _emit(_dump(report), args.out)
    _say(args, f"lax {args.check}: {'ok' if not bad else 'FAILED'}")
    return EXIT_OK if not bad else EXIT_FAIL


def cmd_simulate(args) -> int:
    from .dynamics import StepSizeUnderflow, SystemSpec, integrate, seeded_system

    seeded, seeded_x0 = seeded_system(args.k, args.seed)
    c = _rationals(args.c) if args.c is not None else list(seeded.c)
    x0 = _floats(args.x0) if args.x0 is not None else [float(v) for v in seeded_x0]
    spec = SystemSpec(args.k, tuple(c), Fraction(args.free))
    try:
        traj = integrate(spec, x0, args.t_end, args.rel_tol, args.abs_tol, stride=args.stride)
    except StepSizeUnderflow as exc:
        print(f"integration failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.out_format == "json":
        data = traj.to_json()
        data["c"] = [str(v) for v in spec.c]
        text = _dump(data)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        n = spec.n
        w.writerow(["t"] + [f"x{i}" for i in range(1, n + 1)] + [f"K{i}" for i in range(args.k + 1)])
        values = spec.integral_values(traj.states())
        for s, ks in zip(traj.samples, values):
            w.writerow([repr(s.t)] + [repr(float(v)) for v in s.x] + [repr(float(v)) for v in ks])
        text = buf.getvalue()
    _emit(text, args.out)
    drift = ", ".join(f"K{i}={v:.3e}" for i, v in enumerate(traj.max_rel_drift))
    _say(args, f"{len(traj.samples)} samples, {traj.steps_accepted} steps; max relative drift {drift}")
    return EXIT_OK


def cmd_vs_check(args) -> int:
    from .veselov import per_site_lax_check, poisson_map_check, vs_equivalence_check

    b = _structure(args)
    report = {
        "k": args.k,
        "poisson_map": poisson_map_check(args.k, b),
        "trace_identity": all(vs_equivalence_check(args.k, b).values()),
        "per_site_lax": per_site_lax_check(args.k, b) if args.k <= 2 else "skipped",
    }
    _emit(_dump(report), args.out)
    ok = report["poisson_map"] and report["trace_identity"] and report["per_site_lax"] is not False
    _say(args, "vs-check: " + ("ok" if ok else "FAILED"))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args) -> int:
    from .suite import run_suite

    results = run_suite(args.k, args.seed)
    failed = [r for r in results if r.ok is False]
    report = {"k": args.k, "seed": args.seed, "ok": not failed, "checks": [r.to_json() for r in results]}
    _emit(_dump(report), args.out)
    for r in results:
        _say(args, f"{r.status.upper():7s} {r.name}: {r.detail}")
    return EXIT_OK if not failed else EXIT_FAIL


# -- parser ----------------------------------------------------------------

def _positive_k(text: str) -> int:
    k = int(text)
    if k < 1:
        raise argparse.ArgumentTypeError("k must be >= 1")
    return k


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bilv", description="Deformed Bogoyavlenskij-Itoh systems: exact checks and simulation.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out=True, b_source=False):
        sp.add_argument("--k", type=_positive_k, required=True)
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        if out:
            sp.add_argument("--out", default="-", help="output path, '-' for stdout")
        if b_source:
            sp.add_argument("--b-file", help="JSON {\"k\": K, \"params\": {\"b_1_3\": \"1/2\", ...}}")

    sp = sub.add_parser("sets", help="list the index sets S_l (or their complements)")
    common(sp, out=False)
    sp.add_argument("--ell", type=int, required=True)
    sp.add_argument("--prime", action="store_true", help="list complements instead")
    sp.set_defaults(func=cmd_sets)

    sp = sub.add_parser("jacobi", help="Jacobi violations of the quadratic plus constant bracket")
    common(sp)
    sp.add_argument("--b-file", required=True)
    sp.add_argument("--admissible-only", action="store_true",
                    help="reject parameters outside the admissible pairs")
    sp.set_defaults(func=cmd_jacobi)

    sp = sub.add_parser("integrals", help="the deformed integrals K_0^b .. K_k^b as JSON")
    common(sp, b_source=True)
    sp.add_argument("--c", help="deformation constants c1,...,cn (sum zero)")
    sp.add_argument("--free", default="0", help="free constant when solving b from c")
    sp.set_defaults(func=cmd_integrals)

    sp = sub.add_parser("lax", help="symbolic Lax identities")
    common(sp, b_source=True)
    sp.add_argument("--check", choices=["residual", "det", "charpoly"], required=True)
    sp.set_defaults(func=cmd_lax)

    sp = sub.add_parser("simulate", help="integrate the deformed flow")
    common(sp)
    sp.add_argument("--c", help="deformation constants (default: seeded)")
    sp.add_argument("--free", default="0")
    sp.add_argument("--x0", help="initial point (default: seeded)")
    sp.add_argument("--t-end", type=float, default=10.0)
    sp.add_argument("--rel-tol", type=float, default=1e-10)
    sp.add_argument("--abs-tol", type=float, default=1e-12)
    sp.add_argument("--stride", type=float, default=0.1)
    sp.add_argument("--out-format", choices=["csv", "json"], default="csv")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("vs-check", help="equivalence with the Veselov-Shabat chain")
    common(sp, b_source=True)
    sp.set_defaults(func=cmd_vs_check)

    sp = sub.add_parser("verify", help="run the full identity suite for one k")
    common(sp)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "simulate":
        if not (args.t_end > 0 and args.rel_tol > 0 and args.abs_tol > 0 and args.stride > 0):
            parser.error("t-end, tolerances and stride must be positive")
    try:
        return args.func(args)
    except (ConfigError, ConstraintViolation, WrongArity, ValueError, KeyError) as exc:
        print(f"bilv: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
