"""Floating-point simulation of the deformed Lotka-Volterra flow.

The integrator is an embedded Dormand-Prince 5(4) pair with a PI step-size
controller.  Conserved quantities are compiled once from their exact
polynomials into numpy evaluation tapes and tracked along the trajectory.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .exactalg import X_KIND, Poly
from .integrals import K_b_expansion, solve_b_from_c
from .poisson import ConstantStructure, DimensionMismatch, build_A

__all__ = [
    "StepSizeUnderflow", "SystemSpec", "State", "Trajectory", "IntegralTape",
    "vector_field", "integrate", "drift_report", "seeded_system", "drift_converges",
    "ROUNDOFF_FLOOR",
]


class StepSizeUnderflow(RuntimeError):
    pass


class IntegralTape:
    """A polynomial in x flattened to a coefficient vector and an exponent matrix."""

    def __init__(self, p: Poly, n: int):
        coeffs, rows = [], []
        for mono, c in p.terms():
            row = [0] * n
            for v, e in mono:
                if v.kind != X_KIND:
                    raise ValueError(f"tape needs a polynomial in x only, found {v}")
                row[v.i - 1] = e
            rows.append(row)
            coeffs.append(float(c))
        self.n = n
        self.coeffs = np.array(coeffs, dtype=float)
        self.exps = np.array(rows, dtype=np.int64).reshape(len(rows), n)

    def __call__(self, xs) -> np.ndarray | float:
        xs = np.asarray(xs, dtype=float)
        single = xs.ndim == 1
        pts = xs.reshape(-1, self.n)
        if not len(self.coeffs):
            out = np.zeros(len(pts))
        else:
            mons = np.prod(pts[:, None, :] ** self.exps[None, :, :], axis=2)
            out = mons @ self.coeffs
        return float(out[0]) if single else out


@dataclass(frozen=True)
class SystemSpec:
    k: int
    c: tuple
    free_const: object = 0

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(Fraction(v) for v in self.c))
        # fails early on a wrong length or a nonzero sum
        solve_b_from_c(self.k, self.c, self.free_const)

    @property
    def n(self) -> int:
        return 2 * self.k + 1

    @cached_property
    def b(self) -> ConstantStructure:
        return solve_b_from_c(self.k, self.c, self.free_const)

    @cached_property
    def A(self) -> np.ndarray:
        return np.array(build_A(self.k), dtype=float)

    @cached_property
    def c_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.c])

    @cached_property
    def integrals(self) -> list[Poly]:
        return K_b_expansion(self.k, self.b)

    @cached_property
    def tapes(self) -> list[IntegralTape]:
        return [IntegralTape(p, self.n) for p in self.integrals]

    def integral_values(self, xs) -> np.ndarray:
        """Rows are samples, columns K_0^b .. K_k^b."""
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        return np.stack([t(xs) for t in self.tapes], axis=1)


@dataclass(frozen=True)
class State:
    t: float
    x: np.ndarray


@dataclass
class Trajectory:
    samples: list[State]
    integrals_at_start: np.ndarray
    max_rel_drift: np.ndarray
    steps_accepted: int = 0
    steps_rejected: int = 0
    reversed: bool = False

    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    def states(self) -> np.ndarray:
        return np.array([s.x for s in self.samples])

    def to_json(self) -> dict:
        return {
            "samples": [{"t": s.t, "x": [float(v) for v in s.x]} for s in self.samples],
            "integrals_at_start": [float(v) for v in self.integrals_at_start],
            "drift": {f"K{i}": float(v) for i, v in enumerate(self.max_rel_drift)},
            "steps_accepted": self.steps_accepted,
            "steps_rejected": self.steps_rejected,
        }


def vector_field(spec: SystemSpec, x) -> np.ndarray:
    """``x_i (A x)_i + c_i``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.n,):
        raise DimensionMismatch(f"expected a vector of length {spec.n}, got shape {x.shape}")
    return x * (spec.A @ x) + spec.c_array


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4

# drifts below this are round-off and cannot improve with tighter tolerances
ROUNDOFF_FLOOR = 64 * np.finfo(float).eps

SAFETY = 0.9
MAX_GROWTH = 5.0
MIN_SHRINK = 0.2
# PI exponents for an order-4 error estimate
_ALPHA = 0.7 / 5
_BETA = 0.4 / 5


def _dp_step(f, t, y, h, k1):
    ks = [k1]
    for s in range(1, 7):
        ys = y + h * sum(a * kk for a, kk in zip(_A[s], ks))
        ks.append(f(t + _C[s] * h, ys))
    K = np.array(ks)
    y5 = y + h * (_B5 @ K)
    err = h * (_E @ K)
    # FSAL: the seventh stage is f at the new point
    return y5, err, ks[6]


def _initial_step(f, y, f0, rtol, atol, order=5):
    scale = atol + np.abs(y) * rtol
    d0 = np.sqrt(np.mean((y / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    f1 = f(h0, y + h0 * f0)
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / order)
    return min(100 * h0, h1)


def integrate(spec: SystemSpec, x0: Sequence[float], t_end: float, rel_tol: float = 1e-10,
              abs_tol: float = 1e-12, stride: float | None = None, reverse: bool = False,
              max_steps: int = 1_000_000) -> Trajectory:
    """Integrate from t = 0 to ``t_end`` and sample every ``stride``.

    With ``reverse`` the negated field is integrated, i.e. the flow is run
    backwards in time (sample times still count up from 0).
    """
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    if not (rel_tol > 0 and abs_tol > 0):
        raise ValueError("tolerances must be positive")
    y = np.array(x0, dtype=float)
    if y.shape != (spec.n,):
        raise DimensionMismatch(f"expected x0 of length {spec.n}, got shape {y.shape}")
    stride = t_end if stride is None else stride
    if not stride > 0:
        raise ValueError("stride must be positive")

    sign = -1.0 if reverse else 1.0

    def f(_t, v):
        return sign * vector_field(spec, v)

    n_samples = int(np.floor(t_end / stride + 1e-9))
    targets = [stride * i for i in range(1, n_samples + 1)]
    if not targets or targets[-1] < t_end * (1 - 1e-12):
        targets.append(t_end)

    samples = [State(0.0, y.copy())]
    t = 0.0
    k1 = f(t, y)
    h = _initial_step(f, y, k1, rel_tol, abs_tol)
    err_prev = 1.0
    accepted = rejected = 0
    for target in targets:
        while t < target:
            if accepted + rejected >= max_steps:
                raise StepSizeUnderflow(f"step budget exhausted at t={t}")
            last = h >= target - t
            step = target - t if last else h
            if step <= 16 * np.finfo(float).eps * max(1.0, abs(t)):
                raise StepSizeUnderflow(f"step size underflow at t={t}")
            y_new, err, k7 = _dp_step(f, t, y, step, k1)
            scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y_new))
            en = float(np.sqrt(np.mean((err / scale) ** 2)))
            if not np.isfinite(en) or not np.all(np.isfinite(y_new)):
                rejected += 1
                h = step * MIN_SHRINK
                continue
            if en <= 1.0:
                accepted += 1
                t = target if last else t + step
                y, k1 = y_new, k7
                if en == 0.0:
                    factor = MAX_GROWTH
                else:
                    factor = SAFETY * en ** -_ALPHA * err_prev ** _BETA
                factor = min(MAX_GROWTH, max(MIN_SHRINK, factor))
                err_prev = max(en, 1e-4)
                # a step clipped to hit a sample time does not shrink the next one
                h = max(h, step) * factor if last else step * factor
            else:
                rejected += 1
                h = step * max(MIN_SHRINK, SAFETY * en ** -_ALPHA)
        samples.append(State(float(target), y.copy()))

    traj = Trajectory(samples, spec.integral_values(samples[0].x)[0], np.zeros(spec.k + 1),
                      accepted, rejected, reverse)
    traj.max_rel_drift = np.array([drift_report(traj, spec)[i] for i in range(spec.k + 1)])
    return traj


def drift_report(traj: Trajectory, spec: SystemSpec) -> dict[int, float]:
    """``max_t |K_l(x(t)) - K_l(x0)| / max(1, |K_l(x0)|)`` for each l."""
    if not traj.samples:
        raise ValueError("empty trajectory")
    vals = spec.integral_values(traj.states())
    start = vals[0]
    rel = np.max(np.abs(vals - start), axis=0) / np.maximum(1.0, np.abs(start))
    return {i: float(v) for i, v in enumerate(rel)}


def drift_converges(coarse, fine, noise: float = 2.0) -> bool:
    """Did tightening the tolerances keep every drift within ``noise`` times the coarse one?

    Drifts already at round-off level are compared against the round-off floor.
    """
    return all(f <= noise * max(c, ROUNDOFF_FLOOR) for c, f in zip(coarse, fine))


def seeded_system(k: int, seed: int, c_scale: int = 10) -> tuple[SystemSpec, list[Fraction]]:
    """Rational deformation constants and a positive start point drawn from ``seed``.

    ``c_i`` are multiples of 1/100 in ``[-c_scale, c_scale] / 100`` adjusted to
    sum to zero; ``x0_i`` are multiples of 1/10 in ``[0.5, 2]``.
    """
    rng = random.Random(seed)
    n = 2 * k + 1
    c = [Fraction(rng.randint(-c_scale, c_scale), 100) for _ in range(n - 1)]
    c.append(-sum(c))
    x0 = [Fraction(rng.randint(5, 20), 10) for _ in range(n)]
    return SystemSpec(k, tuple(c)), x0
