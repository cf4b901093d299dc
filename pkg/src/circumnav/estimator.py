"""Decentralised circle estimation from shared (position, boundary distance) pairs."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import (
    AllFaultyError,
    DegenerateGeometryError,
    InconsistentIntervalError,
    InsufficientDataError,
    InvalidNoiseError,
    NonconvergenceError,
)
from .geometry import Vec2
from .target import TargetState

R_FLOOR = 1e-3
MAX_ITER = 100
GRAD_TOL = 1e-10
LAMBDA0 = 1e-3
DEGENERATE_TOL = 1e-9


@dataclass(frozen=True)
class Measurement:
    agent_id: int
    p: Vec2
    d_b: float
    valid: bool = True

    def __post_init__(self):
        if self.valid and not math.isfinite(self.d_b):
            raise ValueError(f"valid measurement from agent {self.agent_id} has d_b={self.d_b}")


@dataclass(frozen=True)
class CircleEstimate:
    c_hat: Vec2
    r_hat: float
    t: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.r_hat) and self.r_hat > 0.0):
            raise ValueError(f"estimated radius must be positive, got {self.r_hat}")


@dataclass(frozen=True)
class RateEstimate:
    c_dot_hat: Vec2 = Vec2(0.0, 0.0)
    r_dot_hat: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.r_dot_hat):
            raise ValueError("non-finite radius rate")


def objective(px, py, d, cx, cy, r) -> float:
    """Sum of squared residuals ``(|p_i - c| - (r + d_i))**2``."""
    px, py, d = np.asarray(px, float), np.asarray(py, float), np.asarray(d, float)
    f = np.hypot(px - cx, py - cy) - (r + d)
    return float(f @ f)


def fit_arrays(px, py, d, init: CircleEstimate, t: float | None = None,
               r_floor: float = R_FLOOR) -> CircleEstimate:
    """Array-level entry point for :func:`fit_circle`; all entries assumed valid."""
    if len(px) < 3:
        raise InsufficientDataError(f"need >= 3 valid measurements, got {len(px)}")
    cx, cy, r, cost, iters, status = kernels.fit_circle_lm(
        px, py, d, init.c_hat.x, init.c_hat.y, init.r_hat, r_floor,
        MAX_ITER, GRAD_TOL, LAMBDA0, DEGENERATE_TOL,
    )
    t = init.t if t is None else t
    if status == kernels.FIT_DEGENERATE:
        raise DegenerateGeometryError("measurement positions are (nearly) collinear")
    if status == kernels.FIT_NONCONVERGED:
        raise NonconvergenceError(
            f"circle fit did not converge in {MAX_ITER} iterations (cost {cost:g})",
            best=CircleEstimate(Vec2(cx, cy), r, t),
        )
    return CircleEstimate(Vec2(cx, cy), r, t)


def fit_circle(measurements, init: CircleEstimate, t: float | None = None) -> CircleEstimate:
    """Least-squares circle through the valid measurements, subject to ``r > 0``.

    Minimises ``sum_i (|p_i - c| - (r + d_i))**2`` by damped Gauss-Newton
    started from ``init``; the radius is projected onto ``r >= R_FLOOR``.
    """
    good = [m for m in measurements if m.valid]
    px = [m.p.x for m in good]
    py = [m.p.y for m in good]
    d = [m.d_b for m in good]
    return fit_arrays(px, py, d, init, t)


def estimate_rates(prev: CircleEstimate, cur: CircleEstimate, delta_T: float) -> RateEstimate:
    if not delta_T > 0.0:
        raise InconsistentIntervalError(f"delta_T must be positive, got {delta_T}")
    if abs((cur.t - prev.t) - delta_T) > 1e-9:
        raise InconsistentIntervalError(
            f"estimates are {cur.t - prev.t} apart, expected delta_T={delta_T}"
        )
    return RateEstimate(
        Vec2((cur.c_hat.x - prev.c_hat.x) / delta_T, (cur.c_hat.y - prev.c_hat.y) / delta_T),
        (cur.r_hat - prev.r_hat) / delta_T,
    )


def fuse_estimates(per_agent) -> CircleEstimate:
    """Component-wise mean of the valid ``(estimate, valid)`` pairs.

    Sums use ``math.fsum`` so the result does not depend on input order.
    """
    good = [est for est, ok in per_agent if ok]
    if not good:
        raise AllFaultyError("no valid per-agent estimate to fuse")
    k = len(good)
    cx = math.fsum(e.c_hat.x for e in good) / k
    cy = math.fsum(e.c_hat.y for e in good) / k
    r = math.fsum(e.r_hat for e in good) / k
    t = max(e.t for e in good)
    return CircleEstimate(Vec2(cx, cy), r, t)


def init_from_satellite(truth: TargetState, noise_c: float, noise_r: float,
                        seed: int) -> CircleEstimate:
    """Noisy initial estimate standing in for satellite image processing.

    The centre is offset uniformly within a disk of radius ``noise_c``; the
    radius is perturbed uniformly within ``[-noise_r, noise_r]``.
    """
    if noise_c < 0.0 or noise_r < 0.0:
        raise InvalidNoiseError("satellite noise amplitudes must be non-negative")
    if noise_r >= truth.r:
        raise InvalidNoiseError(
            f"noise_r={noise_r} must be below the true radius {truth.r}"
        )
    rng = np.random.default_rng(seed)
    u_rad, u_ang, u_r = rng.random(3)
    rho = noise_c * math.sqrt(u_rad)
    ang = 2.0 * math.pi * u_ang
    c = Vec2(truth.c.x + rho * math.cos(ang), truth.c.y + rho * math.sin(ang))
    r = truth.r + noise_r * (2.0 * u_r - 1.0)
    return CircleEstimate(c, r, truth.t)
