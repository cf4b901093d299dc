"""Post-run checks of the convergence claims against a :class:`SimLog`."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import target
from .geometry import TWO_PI
from .network import incidence_ring
from .sim import SimConfig, SimLog, metrics

CLAIMS = ("oi", "oi2", "oi3", "oi4", "W-decay", "positivity", "singularity")

PASS, FAIL, NA = "pass", "fail", "n/a"


@dataclass(frozen=True)
class BetaDynamicsResult:
    applicable: bool
    max_deviation: float | None
    steps: int


def _wrap(d):
    return (d + math.pi) % TWO_PI - math.pi


def validate_beta_dynamics(simlog: SimLog, delta: float, w_tol: float | None = None) -> BetaDynamicsResult:
    """Compare the logged finite-difference ``beta'`` with ``-delta * B^T beta``.

    Only steps where every agent sits on the estimated boundary qualify. With
    ``w_tol=None`` "on the boundary" means ``|W_i| <= 1e-4`` plus twice the
    outward drift explicit Euler leaves behind (``delta*dt*beta**2*D/2`` per
    agent); a fixed ``w_tol`` replaces that gate.
    """
    if len(simlog) < 2:
        return BetaDynamicsResult(False, None, 0)
    dt = np.diff(simlog.t)
    beta = simlog.beta
    w = np.abs(simlog.W[:-1])
    if w_tol is None:
        floor = delta * dt[:, None] * beta[:-1] ** 2 * simlog.dc[:-1]
        ok = np.all(w <= 1e-4 + floor, axis=1)
    else:
        ok = np.all(w <= w_tol, axis=1)
    if not ok.any():
        return BetaDynamicsResult(False, None, 0)
    bt = incidence_ring(simlog.n)
    fd = _wrap(np.diff(beta, axis=0)) / dt[:, None]
    model = -delta * beta[:-1] @ bt.T
    dev = np.abs(fd - model)[ok]
    return BetaDynamicsResult(True, float(dev.max()), int(ok.sum()))


@dataclass(frozen=True)
class ClaimResult:
    claim: str
    measured: float
    bound: float
    status: str
    # measured / eps for the eps-proportional claims, else None
    ratio: float | None = None

    @property
    def passed(self) -> bool | None:
        return None if self.status == NA else self.status == PASS


@dataclass(frozen=True)
class TheoremReport:
    entries: tuple[ClaimResult, ...]
    eps1: float
    eps2: float

    def __getitem__(self, claim: str) -> ClaimResult:
        for e in self.entries:
            if e.claim == claim:
                return e
        raise KeyError(claim)

    @property
    def all_passed(self) -> bool:
        return all(e.status != FAIL for e in self.entries)

    def to_text(self) -> str:
        head = f"{'claim':<12} {'measured':>14} {'bound':>14} {'ratio':>12}  status"
        lines = [head, "-" * len(head)]
        for e in self.entries:
            ratio = "-" if e.ratio is None else f"{e.ratio:12.6g}"
            lines.append(f"{e.claim:<12} {e.measured:14.6g} {e.bound:14.6g} {ratio:>12}  {e.status}")
        lines.append(f"eps1 = {self.eps1:.6g}, eps2 = {self.eps2:.6g}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        rows = ["claim,measured,bound,ratio,status"]
        for e in self.entries:
            ratio = "" if e.ratio is None else format(e.ratio, ".17g")
            rows.append(f"{e.claim},{e.measured:.17g},{e.bound:.17g},{ratio},{e.status}")
        return "\n".join(rows) + "\n"


def theorem_report(simlog: SimLog, config: SimConfig) -> TheoremReport:
    """Evaluate every claim once; each check is independent of the others."""
    eps1, eps2 = target.derivative_bounds(config.trajectory)
    m = metrics(simlog, config.tail_fraction)
    rp = config.report
    dT = config.delta_T
    k1 = dT if rp.k1 is None else rp.k1
    k2 = dT if rp.k2 is None else rp.k2
    k3 = dT if rp.k3 is None else rp.k3

    def bounded(claim, measured, k, eps):
        bound = k * eps + rp.abs_tol
        ratio = measured / eps if eps > 0.0 else None
        ok = math.isfinite(measured) and measured <= bound
        return ClaimResult(claim, measured, bound, PASS if ok else FAIL, ratio)

    entries = [
        bounded("oi", m["center_error"], k1, eps1),
        bounded("oi2", m["radius_error"], k2, eps2),
        bounded("oi3", m["db_max"], k3, eps2),
    ]
    be = m["beta_error"]
    entries.append(ClaimResult("oi4", be, rp.beta_tol,
                               PASS if math.isfinite(be) and be <= rp.beta_tol else FAIL))

    delta = config.control.delta
    rate = m["decay_rate"]
    if config.control.mode != "gain-scaled" or not math.isfinite(rate):
        entries.append(ClaimResult("W-decay", rate, delta, NA))
    else:
        ok = abs(rate - delta) <= 0.05 * delta
        entries.append(ClaimResult("W-decay", rate, delta, PASS if ok else FAIL, rate / delta))

    ordered = m["min_beta_run"] >= -1e-12 and m["beta_sum_error"] <= 1e-9
    entries.append(ClaimResult("positivity", m["min_beta_run"], 0.0, PASS if ordered else FAIL))
    dc = m["min_dc_run"]
    entries.append(ClaimResult("singularity", dc, 0.0, PASS if dc > 0.0 else FAIL))
    return TheoremReport(tuple(entries), eps1, eps2)
