"""Fixed-timestep closed loop: sense, share, estimate, fuse, control, integrate.

Record ``k`` of a :class:`SimLog` describes time ``t_k = k*dt``: positions at
``t_k``, the truth, the fused estimate and rates in force at step ``k``, and
the control computed at step ``k`` (applied over ``[t_k, t_{k+1})``). A run of
``duration`` steps therefore has ``duration + 1`` records.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels, target
from .controller import ControlParams, limit_xy
from .errors import (
    AllFaultyError,
    BearingSingularityError,
    CircumnavError,
    ConfigError,
    InsufficientDataError,
    InvalidInitialConditionError,
    NonconvergenceError,
    DegenerateGeometryError,
    SimulationError,
)
from .estimator import CircleEstimate, RateEstimate, estimate_rates, fit_arrays, fuse_estimates, init_from_satellite
from .geometry import SINGULARITY_EPS, TWO_PI, Vec2
from .network import FaultSchedule, RingTopology, exchange, incidence_ring
from .target import BoundaryPerturbation, TargetTrajectory

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReportParams:
    """Multipliers used by the theorem report. ``None`` means "use delta_T"."""

    k1: float | None = None
    k2: float | None = None
    k3: float | None = None
    abs_tol: float = 1e-4
    beta_tol: float = 1e-3


@dataclass(frozen=True)
class SimConfig:
    trajectory: TargetTrajectory
    n: int = 4
    dt: float = 1.0
    est_every: int = 1
    duration: int = 100
    control: ControlParams = ControlParams()
    perturbation: BoundaryPerturbation = BoundaryPerturbation()
    faults: FaultSchedule = FaultSchedule()
    noise_c: float = 0.0
    noise_r: float = 0.0
    placement_margin: float = 1.0
    placement_angles: tuple[float, ...] | None = None
    seed: int = 0
    tail_fraction: float = 0.2
    report: ReportParams = ReportParams()

    def __post_init__(self):
        def bad(key, msg):
            raise ConfigError(f"{key}: {msg}", key=key)

        if self.n < 3:
            bad("n", "n must be ≥ 3")
        if not (math.isfinite(self.dt) and self.dt > 0.0):
            bad("dt", "dt must be > 0")
        if self.est_every < 1:
            bad("est_every", "est_every must be ≥ 1")
        if self.duration < 0:
            bad("duration", "duration must be ≥ 0")
        if not self.placement_margin >= 1.0:
            bad("placement_margin", "placement_margin must be ≥ 1")
        if not 0.0 < self.tail_fraction <= 1.0:
            bad("tail_fraction", "tail_fraction must be in (0, 1]")
        if self.noise_c < 0.0 or self.noise_r < 0.0:
            bad("satellite_noise_r", "satellite noise must be ≥ 0")
        if self.placement_angles is not None:
            a = self.placement_angles
            if len(a) != self.n:
                bad("placement_angles", f"expected {self.n} angles, got {len(a)}")
            if any(y <= x for x, y in zip(a, a[1:])) or a[-1] - a[0] >= TWO_PI:
                bad("placement_angles", "angles must increase strictly within one turn")
        if self.duration * self.dt > self.trajectory.horizon * (1 + 1e-12):
            bad("duration", f"run length {self.duration * self.dt} exceeds trajectory horizon "
                f"{self.trajectory.horizon}")
        r_min = target.min_radius(self.trajectory)
        if r_min <= 0.0:
            bad("trajectory", f"target radius drops to {r_min:g}")
        if self.noise_r >= self.trajectory.base.r:
            bad("satellite_noise_r", "satellite_noise_r must be below the initial radius")
        self.faults.check(self.n, (k * self.dt for k in range(self.duration + 1)))

    @property
    def delta_T(self) -> float:
        return self.est_every * self.dt


@dataclass
class SimState:
    k: int
    px: list[float]
    py: list[float]
    estimate: CircleEstimate
    rates: RateEstimate = RateEstimate()
    # fused estimate of the last successful estimation step, for rates
    last_fit: CircleEstimate | None = None


@dataclass
class Record:
    t: float
    truth: tuple[float, float, float]
    estimate: tuple[float, float, float]
    rates: tuple[float, float, float]
    px: list[float]
    py: list[float]
    db: list[float]
    dc: list[float]
    beta: list[float]
    ux_raw: list[float]
    uy_raw: list[float]
    ux: list[float]
    uy: list[float]
    valid: list[bool]


AGENT_FIELDS = ("px", "py", "db", "dc", "beta", "ux_raw", "uy_raw", "ux", "uy", "valid")


@dataclass
class SimLog:
    """Per-step time series. Agent arrays have shape ``(records, n)``."""

    n: int
    t: np.ndarray
    truth: np.ndarray
    estimate: np.ndarray
    rates: np.ndarray
    px: np.ndarray
    py: np.ndarray
    db: np.ndarray
    dc: np.ndarray
    beta: np.ndarray
    ux_raw: np.ndarray
    uy_raw: np.ndarray
    ux: np.ndarray
    uy: np.ndarray
    valid: np.ndarray
    dt: float = 1.0
    meta: dict = field(default_factory=dict)

    @classmethod
    def allocate(cls, n: int, records: int, dt: float = 1.0) -> SimLog:
        agent = {name: np.zeros((records, n)) for name in AGENT_FIELDS}
        agent["valid"] = np.zeros((records, n), dtype=bool)
        return cls(n=n, t=np.zeros(records), truth=np.zeros((records, 3)),
                   estimate=np.zeros((records, 3)), rates=np.zeros((records, 3)),
                   dt=dt, **agent)

    def __len__(self) -> int:
        return len(self.t)

    def put(self, k: int, rec: Record) -> None:
        self.t[k] = rec.t
        self.truth[k] = rec.truth
        self.estimate[k] = rec.estimate
        self.rates[k] = rec.rates
        for name in AGENT_FIELDS:
            getattr(self, name)[k] = getattr(rec, name)

    def truncated(self, records: int) -> SimLog:
        kw = {name: getattr(self, name)[:records] for name in ("t", "truth", "estimate", "rates") + AGENT_FIELDS}
        return SimLog(n=self.n, dt=self.dt, meta=dict(self.meta), **kw)

    @property
    def W(self) -> np.ndarray:
        """Boundary-tracking error ``D^c_i - r_hat`` per record and agent."""
        return self.dc - self.estimate[:, 2:3]


def place_agents_initial(est0: CircleEstimate, n: int, margin: float,
                         angles=None) -> list[Vec2]:
    """Ring of agents at ``margin * r_hat`` around the initial estimate.

    Default angles are ``2*pi*i/n``; indices run counterclockwise.
    """
    if n < 3 or margin < 1.0:
        raise ValueError("place_agents_initial needs n >= 3 and margin >= 1")
    if angles is None:
        angles = [TWO_PI * i / n for i in range(n)]
    rho = margin * est0.r_hat
    c = est0.c_hat
    return [Vec2(c.x + rho * math.cos(a), c.y + rho * math.sin(a)) for a in angles]


def initial_state(config: SimConfig) -> SimState:
    truth0 = target.sample(config.trajectory, 0.0)
    est0 = init_from_satellite(truth0, config.noise_c, config.noise_r, config.seed)
    pts = place_agents_initial(est0, config.n, config.placement_margin, config.placement_angles)
    return SimState(0, [p.x for p in pts], [p.y for p in pts], est0)


def _estimate(state: SimState, views, t: float) -> tuple[CircleEstimate, RateEstimate, CircleEstimate | None]:
    """Per-agent fits, fusion and rate update. Holds the previous values on failure."""
    fits = {}
    per_agent = []
    for view in views:
        if not view.own_valid:
            per_agent.append((None, False))
            continue
        key = id(view.shared)
        if key not in fits:
            # every view references the same broadcast, so the fit is shared
            px, py, d = view.shared.valid_arrays()
            try:
                fits[key] = fit_arrays(px, py, d, state.estimate, t)
            except (InsufficientDataError, NonconvergenceError, DegenerateGeometryError) as exc:
                log.debug("t=%g: agent %d fit failed: %s", t, view.agent_id, exc)
                fits[key] = None
        est = fits[key]
        per_agent.append((est, est is not None))
    try:
        fused = fuse_estimates(per_agent)
    except AllFaultyError:
        log.debug("t=%g: no valid estimate, holding previous", t)
        return state.estimate, state.rates, state.last_fit
    if state.last_fit is None:
        rates = RateEstimate()
    else:
        rates = estimate_rates(state.last_fit, fused, fused.t - state.last_fit.t)
    return fused, rates, fused


def _observe(state: SimState, config: SimConfig, topo: RingTopology):
    """Sense, share, estimate and compute controls at the state's time."""
    k = state.k
    t = k * config.dt
    truth = target.sample(config.trajectory, t)
    pert = config.perturbation
    db = [target.boundary_distance(truth, pert, x, y) for x, y in zip(state.px, state.py)]
    views = exchange(state.px, state.py, db, topo, config.faults, t, k)
    est, rates, last_fit = state.estimate, state.rates, state.last_fit
    if k % config.est_every == 0:
        est, rates, last_fit = _estimate(state, views, t)
    ux, uy, beta, dc, _, _, bad = kernels.control_law(
        state.px, state.py, est.c_hat.x, est.c_hat.y, est.r_hat,
        rates.c_dot_hat.x, rates.c_dot_hat.y, rates.r_dot_hat, SINGULARITY_EPS,
    )
    if bad >= 0:
        raise BearingSingularityError(f"agent {bad + 1} reached the estimated centre", agent=bad)
    applied = [limit_xy(a, b, config.control) for a, b in zip(ux, uy)]
    rec = Record(
        t=t,
        truth=(truth.c.x, truth.c.y, truth.r),
        estimate=(est.c_hat.x, est.c_hat.y, est.r_hat),
        rates=(rates.c_dot_hat.x, rates.c_dot_hat.y, rates.r_dot_hat),
        px=list(state.px), py=list(state.py), db=db, dc=dc, beta=beta,
        ux_raw=ux, uy_raw=uy, ux=[a for a, _ in applied], uy=[b for _, b in applied],
        valid=list(views[0].shared.valid),
    )
    return rec, replace(state, estimate=est, rates=rates, last_fit=last_fit)


def step(state: SimState, config: SimConfig, topo: RingTopology | None = None):
    """Advance one step; returns ``(next_state, record_of_this_step)``."""
    topo = topo or RingTopology(config.n)
    try:
        rec, cur = _observe(state, config, topo)
    except CircumnavError as exc:
        raise SimulationError(f"step {state.k}: {exc}", step=state.k, cause=exc) from exc
    dt = config.dt
    px = [x + dt * u for x, u in zip(cur.px, rec.ux)]
    py = [y + dt * u for y, u in zip(cur.py, rec.uy)]
    return replace(cur, k=cur.k + 1, px=px, py=py), rec


def run(config: SimConfig) -> SimLog:
    topo = RingTopology(config.n)
    state = initial_state(config)
    out = SimLog.allocate(config.n, config.duration + 1, config.dt)
    for k in range(config.duration):
        state, rec = step(state, config, topo)
        out.put(k, rec)
    try:
        rec, _ = _observe(state, config, topo)
    except CircumnavError as exc:
        raise SimulationError(f"step {state.k}: {exc}", step=state.k, cause=exc) from exc
    out.put(config.duration, rec)
    out.meta.update(kernel_backend=kernels.BACKEND, delta=config.control.delta,
                    mode=config.control.mode, delta_T=config.delta_T)
    return out


# ---------------------------------------------------------------------------
# metrics


def tail_slice(records: int, tail_fraction: float) -> slice:
    m = max(1, int(math.ceil(tail_fraction * records - 1e-9)))
    return slice(records - m, records)


def decay_rate(t: np.ndarray, w: np.ndarray, floor: float = 0.0) -> float:
    """Exponential rate of ``w`` over its transient, by log-linear regression.

    The transient runs from the first record until ``w`` first drops to
    ``max(1e-6, 100*floor)``; ``floor`` is the residual level the signal
    settles to, which the regression must stay clear of.
    """
    thresh = max(1e-6, 100.0 * floor)
    below = np.nonzero(w <= thresh)[0]
    end = below[0] if below.size else len(w)
    if end < 3:
        return float("nan")
    slope = np.polyfit(t[:end], np.log(w[:end]), 1)[0]
    return float(-slope)


def metrics(simlog: SimLog, tail_fraction: float = 0.2) -> dict:
    """Lim-sup proxies over the final ``tail_fraction`` of records, plus
    whole-run positivity/singularity minima and the W decay rate."""
    if not 0.0 < tail_fraction <= 1.0:
        raise ValueError("tail_fraction must be in (0, 1]")
    n = simlog.n
    tail = tail_slice(len(simlog), tail_fraction)
    target_beta = TWO_PI / n
    c_err = np.hypot(simlog.estimate[:, 0] - simlog.truth[:, 0],
                     simlog.estimate[:, 1] - simlog.truth[:, 1])
    r_err = np.abs(simlog.estimate[:, 2] - simlog.truth[:, 2])
    w_mean = np.abs(simlog.W).mean(axis=1)
    tail_w = float(w_mean[tail].mean())
    beta_sum = simlog.beta.sum(axis=1)
    return {
        "records": len(simlog),
        "center_error": float(c_err[tail].max()),
        "radius_error": float(r_err[tail].max()),
        "db_max": float(np.abs(simlog.db[tail]).max()),
        "beta_error": float(np.abs(simlog.beta[tail] - target_beta).max()),
        "min_dc": float(simlog.dc[tail].min()),
        "min_beta": float(simlog.beta[tail].min()),
        "min_dc_run": float(simlog.dc.min()),
        "min_beta_run": float(simlog.beta.min()),
        "beta_sum_error": float(np.abs(beta_sum - TWO_PI).max()),
        "w_tail": tail_w,
        "decay_rate": decay_rate(simlog.t, w_mean, tail_w),
    }


def consensus_predict(beta0, delta: float, t: float, dt: float = 1e-2) -> np.ndarray:
    """Integrate ``beta' = -delta * B^T beta`` with classical RK4, step ``dt/100``.

    RK4 on a linear system is multiplication by a fixed matrix per step, so
    the step count is applied by repeated squaring.
    """
    beta0 = np.asarray(beta0, dtype=float)
    if beta0.ndim != 1 or len(beta0) < 2:
        raise InvalidInitialConditionError("beta0 must be a vector of length >= 2")
    if np.any(beta0 < 0.0) or abs(beta0.sum() - TWO_PI) > 1e-9:
        raise InvalidInitialConditionError("beta0 must be non-negative and sum to 2*pi")
    if t < 0.0:
        raise InvalidInitialConditionError("t must be >= 0")
    a = -delta * incidence_ring(len(beta0))
    h = dt / 100.0
    steps = int(math.floor(t / h + 1e-9))
    rest = t - steps * h

    def rk4_matrix(hh):
        ha = hh * a
        ha2 = ha @ ha
        ha3 = ha2 @ ha
        return np.eye(len(beta0)) + ha + ha2 / 2.0 + ha3 / 6.0 + (ha3 @ ha) / 24.0

    out = np.linalg.matrix_power(rk4_matrix(h), steps) @ beta0
    if rest > 0.0:
        out = rk4_matrix(rest) @ out
    return out
