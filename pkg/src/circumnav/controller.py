"""Circumnavigation control law and its implementable limited forms.

For agent ``i`` with successor ``j`` the raw input is::

    u_i = c_dot + ((D_i - r) - r_dot) * psi_i + beta_i * D_i * E @ psi_i

where ``D_i = |c - p_i|``, ``psi_i`` is the unit bearing to the estimated
centre and ``beta_i`` is the counterclockwise angle from ``p_i - c`` to
``p_j - c``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from . import kernels
from .errors import BearingSingularityError
from .estimator import CircleEstimate, RateEstimate
from .geometry import SINGULARITY_EPS, Angle, Vec2

MODES = ("gain-scaled", "norm-saturated", "component-clamped")


@dataclass(frozen=True)
class ControlParams:
    """Gain and bound for the implementable input ``U_i``.

    gain-scaled: ``U = delta*u``. norm-saturated: ``u`` rescaled so that
    ``|U| <= u_max`` (``delta`` unused). component-clamped: ``delta*u`` with
    each component clipped to ``[-u_max, u_max]``.
    """

    delta: float = 1.0
    u_max: float = 1.0
    mode: str = "norm-saturated"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown control mode {self.mode!r}; expected one of {MODES}")
        if not self.delta >= 0.0:
            raise ValueError(f"delta must be >= 0, got {self.delta}")
        if not self.u_max > 0.0:
            raise ValueError(f"u_max must be > 0, got {self.u_max}")


@dataclass(frozen=True)
class ControlOutput:
    u_raw: Vec2
    u_applied: Vec2
    beta_used: Angle
    psi_used: Vec2


def control_input(p_i: Vec2, p_next: Vec2, est: CircleEstimate, rates: RateEstimate):
    """Return ``(u_raw, beta, psi)`` for a single agent."""
    ux, uy, beta, dc, psix, psiy, bad = kernels.control_law(
        [p_i.x, p_next.x], [p_i.y, p_next.y], est.c_hat.x, est.c_hat.y, est.r_hat,
        rates.c_dot_hat.x, rates.c_dot_hat.y, rates.r_dot_hat, SINGULARITY_EPS,
    )
    if bad >= 0:
        who = "agent" if bad == 0 else "successor"
        raise BearingSingularityError(f"{who} is on top of the estimated centre")
    return Vec2(ux[0], uy[0]), Angle(beta[0]), Vec2(psix[0], psiy[0])


def limit_xy(ux: float, uy: float, params: ControlParams) -> tuple[float, float]:
    mode = params.mode
    if mode == "gain-scaled":
        return params.delta * ux, params.delta * uy
    if mode == "norm-saturated":
        norm = math.sqrt(ux * ux + uy * uy)
        if norm <= params.u_max:
            return ux, uy
        s = params.u_max / norm
        return s * ux, s * uy
    cap = params.u_max
    ux *= params.delta
    uy *= params.delta
    return min(max(ux, -cap), cap), min(max(uy, -cap), cap)


def limit(u_raw: Vec2, params: ControlParams) -> Vec2:
    """Turn a raw input into an implementable one according to ``params.mode``."""
    return Vec2(*limit_xy(u_raw.x, u_raw.y, params))
