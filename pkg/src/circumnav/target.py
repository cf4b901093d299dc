"""Ground-truth target model: time-varying circles with derivative bounds.

Four trajectory kinds are supported:

``constant``
    ``c(t) = c0``, ``r(t) = r0``.
``linear-drift``
    ``c(t) = c0 + v*t``, ``r(t) = r0 + r_rate*t``.
``sinusoidal``
    ``c(t) = c0 + v*t + (ax*sin(wx*t), ay*sin(wy*t))`` and
    ``r(t) = r0 + r_rate*t + ar*sin(wr*t)``.
``waypoint-csv``
    piecewise-linear interpolation of a ``(t, x, y, r)`` table.

Sampling outside ``[0, horizon]`` is an error rather than an extrapolation.
"""
from __future__ import annotations

import bisect
import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import FormatError, InvalidTargetError, OutOfRangeError
from .geometry import Vec2

KINDS = ("constant", "linear-drift", "sinusoidal", "waypoint-csv")


@dataclass(frozen=True)
class TargetState:
    c: Vec2
    r: float
    t: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.r) and self.r > 0.0):
            raise InvalidTargetError(f"target radius must be positive, got {self.r}")


@dataclass(frozen=True)
class BoundaryPerturbation:
    """Radial ripple ``r_b = r * (1 + eta*sin(k*theta + phase))``."""

    eta: float = 0.0
    modes: int = 0
    phase: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.eta < 1.0:
            raise ValueError(f"perturbation amplitude must be in [0, 1), got {self.eta}")
        if self.modes < 0:
            raise ValueError(f"perturbation mode count must be >= 0, got {self.modes}")


@dataclass(frozen=True)
class TargetTrajectory:
    kind: str
    base: TargetState
    horizon: float
    velocity: Vec2 = Vec2(0.0, 0.0)
    r_rate: float = 0.0
    # sinusoidal terms: (amplitude, angular frequency)
    osc_x: tuple[float, float] = (0.0, 0.0)
    osc_y: tuple[float, float] = (0.0, 0.0)
    osc_r: tuple[float, float] = (0.0, 0.0)
    # waypoint table, columns t, x, y, r
    waypoints: tuple[tuple[float, float, float, float], ...] = field(default=(), repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown trajectory kind {self.kind!r}; expected one of {KINDS}")
        if not (math.isfinite(self.horizon) and self.horizon >= 0.0):
            raise ValueError(f"horizon must be finite and >= 0, got {self.horizon}")
        if self.kind == "waypoint-csv":
            if len(self.waypoints) < 2:
                raise FormatError("waypoint trajectory needs at least 2 rows")
            if self.horizon > self.waypoints[-1][0] - self.waypoints[0][0]:
                raise OutOfRangeError(
                    f"horizon {self.horizon} exceeds the waypoint table span"
                )

    @property
    def _wp_times(self):
        return [row[0] for row in self.waypoints]


def constant(c: Vec2, r: float, horizon: float) -> TargetTrajectory:
    return TargetTrajectory("constant", TargetState(c, r), horizon)


def linear_drift(c: Vec2, r: float, velocity: Vec2, horizon: float, r_rate: float = 0.0):
    return TargetTrajectory("linear-drift", TargetState(c, r), horizon,
                            velocity=velocity, r_rate=r_rate)


def sinusoidal(c: Vec2, r: float, horizon: float, *, osc_x=(0.0, 0.0), osc_y=(0.0, 0.0),
               osc_r=(0.0, 0.0), velocity: Vec2 = Vec2(0.0, 0.0), r_rate: float = 0.0):
    return TargetTrajectory("sinusoidal", TargetState(c, r), horizon, velocity=velocity,
                            r_rate=r_rate, osc_x=tuple(osc_x), osc_y=tuple(osc_y),
                            osc_r=tuple(osc_r))


def _evaluate(traj: TargetTrajectory, t: float) -> tuple[float, float, float]:
    """Raw ``(cx, cy, r)`` at ``t``; ``r`` is not checked for positivity."""
    b = traj.base
    if traj.kind == "constant":
        return b.c.x, b.c.y, b.r
    if traj.kind == "linear-drift":
        return (b.c.x + traj.velocity.x * t, b.c.y + traj.velocity.y * t,
                b.r + traj.r_rate * t)
    if traj.kind == "sinusoidal":
        (ax, wx), (ay, wy), (ar, wr) = traj.osc_x, traj.osc_y, traj.osc_r
        return (b.c.x + traj.velocity.x * t + ax * math.sin(wx * t),
                b.c.y + traj.velocity.y * t + ay * math.sin(wy * t),
                b.r + traj.r_rate * t + ar * math.sin(wr * t))
    # waypoint table; times are relative to the first row
    rows = traj.waypoints
    tt = rows[0][0] + t
    k = bisect.bisect_right(traj._wp_times, tt) - 1
    k = min(max(k, 0), len(rows) - 2)
    t0, x0, y0, r0 = rows[k]
    t1, x1, y1, r1 = rows[k + 1]
    s = (tt - t0) / (t1 - t0)
    return x0 + s * (x1 - x0), y0 + s * (y1 - y0), r0 + s * (r1 - r0)


def sample(traj: TargetTrajectory, t: float) -> TargetState:
    """Evaluate the trajectory at time ``t`` (0 <= t <= horizon)."""
    if not 0.0 <= t <= traj.horizon:
        raise OutOfRangeError(f"t={t} outside trajectory horizon [0, {traj.horizon}]")
    cx, cy, r = _evaluate(traj, t)
    return TargetState(Vec2(cx, cy), r, t)


def derivative_bounds(traj: TargetTrajectory) -> tuple[float, float]:
    """Upper bounds ``(eps1, eps2)`` on ``|dc/dt|`` and ``|dr/dt|``."""
    if traj.kind == "constant":
        return 0.0, 0.0
    if traj.kind == "linear-drift":
        return traj.velocity.norm(), abs(traj.r_rate)
    if traj.kind == "sinusoidal":
        (ax, wx), (ay, wy), (ar, wr) = traj.osc_x, traj.osc_y, traj.osc_r
        osc = math.hypot(ax * wx, ay * wy)
        return traj.velocity.norm() + osc, abs(traj.r_rate) + abs(ar * wr)
    eps1 = eps2 = 0.0
    rows = traj.waypoints
    for (t0, x0, y0, r0), (t1, x1, y1, r1) in zip(rows, rows[1:]):
        h = t1 - t0
        eps1 = max(eps1, math.hypot(x1 - x0, y1 - y0) / h)
        eps2 = max(eps2, abs(r1 - r0) / h)
    return eps1, eps2


def min_radius(traj: TargetTrajectory, samples: int = 10001) -> float:
    """Smallest radius over the horizon, by dense sampling (plus waypoint knots)."""
    times = [traj.horizon * k / (samples - 1) for k in range(samples)]
    r = min(_evaluate(traj, t)[2] for t in times)
    if traj.kind == "waypoint-csv":
        t0 = traj.waypoints[0][0]
        r = min([r] + [row[3] for row in traj.waypoints if row[0] - t0 <= traj.horizon])
    return r


def validate(traj: TargetTrajectory, r_min: float = 1e-6) -> None:
    """Check ``r(t) >= r_min`` over the whole horizon."""
    r = min_radius(traj)
    if r < r_min:
        raise InvalidTargetError(f"trajectory radius drops to {r:g} (< r_min={r_min:g})")


def measured_distance(traj: TargetTrajectory, pert: BoundaryPerturbation, p: Vec2,
                      t: float) -> float:
    """Sensor reading for an agent at ``p``: radial distance to the (rippled) boundary."""
    return boundary_distance(sample(traj, t), pert, p.x, p.y)


def boundary_distance(state: TargetState, pert: BoundaryPerturbation, x: float,
                      y: float) -> float:
    dx = state.c.x - x
    dy = state.c.y - y
    dist = math.sqrt(dx * dx + dy * dy)
    if pert.eta == 0.0:
        return dist - state.r
    theta = math.atan2(y - state.c.y, x - state.c.x)
    return dist - state.r * (1.0 + pert.eta * math.sin(pert.modes * theta + pert.phase))


def load_waypoints(rows, horizon: float | None = None) -> TargetTrajectory:
    """Build a waypoint trajectory from ``(t, x, y, r)`` rows.

    Row numbers in errors are 1-based data rows (the CSV header is not counted).
    """
    table = []
    for k, row in enumerate(rows, start=1):
        try:
            t, x, y, r = (float(v) for v in row)
        except (TypeError, ValueError) as exc:
            raise FormatError(f"row {k}: expected 4 numbers t,x,y,r ({exc})", row=k) from None
        if not all(math.isfinite(v) for v in (t, x, y, r)):
            raise FormatError(f"row {k}: non-finite value", row=k)
        if r <= 0.0:
            raise FormatError(f"row {k}: radius must be positive, got {r}", row=k)
        if table and t <= table[-1][0]:
            raise FormatError(f"row {k}: timestamps must be strictly increasing", row=k)
        table.append((t, x, y, r))
    if len(table) < 2:
        raise FormatError(f"need at least 2 waypoint rows, got {len(table)}", row=len(table))
    span = table[-1][0] - table[0][0]
    t0, x0, y0, r0 = table[0]
    return TargetTrajectory("waypoint-csv", TargetState(Vec2(x0, y0), r0), span if horizon is None else horizon,
                            waypoints=tuple(table))


def read_waypoint_csv(source, horizon: float | None = None) -> TargetTrajectory:
    """Parse a ``t,x,y,r`` CSV from a path or text."""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["t", "x", "y", "r"]:
        raise FormatError("waypoint CSV must start with the header 't,x,y,r'", row=0)
    return load_waypoints([row for row in reader if row], horizon)
