"""Acceptance criteria, one test each.

Every test records a one-line verdict; ``conftest.py`` prints them at the end
of the session and ``python tests/test_acceptance.py`` prints them directly.
Runs are cached so the cross-cutting checks (positivity, singularity,
saturation, determinism) see every scenario exercised here.
"""
import math
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from circumnav import config as cfgmod  # noqa: E402
from circumnav import target  # noqa: E402
from circumnav.estimator import CircleEstimate, fit_arrays, objective  # noqa: E402
from circumnav.geometry import TWO_PI, Vec2  # noqa: E402
from circumnav.output import timeseries_csv  # noqa: E402
from circumnav.sim import consensus_predict, metrics, run  # noqa: E402

from oracles import grid_oracle  # noqa: E402

SCENARIOS = Path(__file__).resolve().parents[1] / "src" / "circumnav" / "scenarios"
SWEEP = (0.05, 0.1, 0.2)

RESULTS: dict[int, tuple[bool, str, str]] = {}
_RUNS: dict[tuple, tuple] = {}


def record(num, title, ok, detail):
    RESULTS[num] = (bool(ok), title, detail)
    return ok


def verdict_lines():
    return [f"[{'PASS' if ok else 'FAIL'}] {num:>2}. {title}: {detail}"
            for num, (ok, title, detail) in sorted(RESULTS.items())]


def load(name, overrides=()):
    raw = cfgmod.parse_raw((SCENARIOS / f"{name}.cfg").read_text())
    for key, value in overrides:
        raw = cfgmod.override(raw, key, value)
    return cfgmod.build_config(raw, SCENARIOS)


def acceptance_run(name, overrides=()):
    """``(config, log, seconds)`` for a scenario, run once per session."""
    key = (name, tuple(overrides))
    if key not in _RUNS:
        cfg = load(name, overrides)
        t0 = time.perf_counter()
        log = run(cfg)
        _RUNS[key] = (cfg, log, time.perf_counter() - t0)
    return _RUNS[key]


def ring_instance(rng, n, r, c):
    """Agents around the circle in ring order with jittered angles and offsets."""
    th = TWO_PI * (np.arange(n) + rng.uniform(-0.4, 0.4, n)) / n
    rho = r * rng.uniform(0.9, 1.5, n)
    return c[0] + rho * np.cos(th), c[1] + rho * np.sin(th)


def rough_init(rng, c, r):
    return CircleEstimate(Vec2(c[0] + rng.uniform(-0.1, 0.1) * r, c[1] + rng.uniform(-0.1, 0.1) * r),
                          r * rng.uniform(0.9, 1.1))


def test_c01_exact_recovery():
    rng = np.random.default_rng(20240101)
    worst = 0.0
    t0 = time.perf_counter()
    for _ in range(1000):
        n = int(rng.choice([3, 4, 6, 8]))
        r = rng.uniform(1, 100)
        c = rng.uniform(-100, 100, 2)
        px, py = ring_instance(rng, n, r, c)
        d = np.hypot(px - c[0], py - c[1]) - r
        fit = fit_arrays(px, py, d, rough_init(rng, c, r))
        worst = max(worst, abs(fit.c_hat.x - c[0]), abs(fit.c_hat.y - c[1]), abs(fit.r_hat - r))
    secs = time.perf_counter() - t0
    ok = worst <= 1e-9 and secs < 5
    assert record(1, "exact circle recovery", ok,
                  f"1000 instances, max abs error {worst:.2e} (<= 1e-9), {secs:.2f}s (< 5s)")


def test_c02_grid_oracle():
    rng = np.random.default_rng(42)
    worst_gap, worst_arg = -math.inf, 0.0
    t0 = time.perf_counter()
    for _ in range(50):
        n = int(rng.choice([4, 6, 8]))
        r = rng.uniform(5, 50)
        c = rng.uniform(-20, 20, 2)
        px, py = ring_instance(rng, n, r, c)
        d = np.hypot(px - c[0], py - c[1]) - r + rng.uniform(-0.1, 0.1, n)
        fit = fit_arrays(px, py, d, rough_init(rng, c, r))
        got = np.array([fit.c_hat.x, fit.c_hat.y, fit.r_hat])
        best, best_obj = grid_oracle(px, py, d, (c[0], c[1], r))
        worst_gap = max(worst_gap, objective(px, py, d, *got) - best_obj)
        worst_arg = max(worst_arg, float(np.abs(got - best).max()))
    secs = time.perf_counter() - t0
    ok = worst_gap <= 1e-6 and worst_arg <= 1e-3 and secs < 60
    assert record(2, "oracle equivalence under noise", ok,
                  f"50 instances, objective - oracle <= {worst_gap:.2e} (<= 1e-6), "
                  f"minimiser gap {worst_arg:.2e} (<= 1e-3), {secs:.1f}s (< 60s)")


def test_c03_w_decay():
    cfg, log, secs = acceptance_run("w_decay")
    rate = metrics(log, cfg.tail_fraction)["decay_rate"]
    delta = cfg.control.delta
    rel = abs(rate - delta) / delta
    ok = (cfg.control.mode == "gain-scaled" and cfg.dt == 1e-3 and cfg.placement_margin == 1.5
          and rel <= 0.05 and secs < 5)
    assert record(3, "W decay rate", ok,
                  f"fitted rate {rate:.4f} vs delta {delta:g} (rel. error {rel:.2%} <= 5%), {secs:.2f}s (< 5s)")


def test_c04_beta_consensus():
    cfg, log, secs = acceptance_run("beta_consensus")
    delta = cfg.control.delta
    beta0 = log.beta[0]
    assert np.allclose(beta0, [math.pi, math.pi / 3, math.pi / 3, math.pi / 3], atol=1e-12)
    worst = 0.0
    for s in (0.5, 1.0, 2.0, 5.0):
        k = int(round(s / delta / cfg.dt))
        pred = consensus_predict(beta0, delta, log.t[k])
        worst = max(worst, float(np.max(np.abs(log.beta[k] - pred) / np.abs(pred))))
    k20 = int(round(20.0 / delta / cfg.dt))
    final = float(np.abs(log.beta[k20] - math.pi / 2).max())
    ok = worst < 0.02 and final < 1e-4 and secs < 5
    assert record(4, "beta consensus", ok,
                  f"max rel. error vs RK4 {worst:.2e} (< 2%), |beta - pi/2| at t=20/delta "
                  f"{final:.2e} (< 1e-4), {secs:.2f}s (< 5s)")


def _sweep(name, key):
    return [acceptance_run(name, ((key, repr(v)),)) for v in SWEEP]


def test_c07_eps_scaling():
    lines, ok, secs = [], True, 0.0
    for name, key, metric in (("drift_center", "trajectory.vx", "center_error"),
                              ("drift_radius", "trajectory.r_rate", "radius_error")):
        runs = _sweep(name, key)
        secs += sum(s for _, _, s in runs)
        errs = [metrics(log, cfg.tail_fraction)[metric] for cfg, log, _ in runs]
        ratios = [e / v for e, v in zip(errs, SWEEP)]
        monotone = all(a <= b for a, b in zip(errs, errs[1:]))
        spread = max(ratios) / min(ratios)
        ok &= monotone and spread < 2
        lines.append(f"{metric} {', '.join(f'{e:.3g}' for e in errs)} "
                     f"(monotone={monotone}, ratio spread {spread:.3f} < 2)")
    ok &= secs < 30
    assert record(7, "eps-scaling of tracking bounds", ok, "; ".join(lines) + f", {secs:.2f}s (< 30s)")


def _paper_bounds(log, transient=0.1):
    start = int(math.ceil(transient * len(log)))
    db = float(np.abs(log.db[start:]).max())
    beta = float(np.abs(log.beta[start:] - TWO_PI / log.n).max())
    return db, beta


def test_c08_paper_replication():
    cfg, log, secs = acceptance_run("paper")
    traj = cfg.trajectory
    radii = [target.sample(traj, t).r for t in np.linspace(0, cfg.duration * cfg.dt, 2001)]
    shape_ok = (cfg.n == 4 and 10 <= min(radii) and max(radii) <= 30 and abs(cfg.duration - 960) <= 48
                and cfg.control.mode == "component-clamped" and cfg.control.u_max == 2.0
                and float(np.abs(log.db[0]).max()) == 0.0)
    db, beta = _paper_bounds(log)
    ok = shape_ok and db <= 2.0 and beta <= 0.2 and secs < 10
    assert record(8, "paper-scenario replication", ok,
                  f"r in [{min(radii):.1f}, {max(radii):.1f}], {cfg.duration} steps, max |D^b| {db:.3f} (<= 2), "
                  f"max |beta - pi/2| {beta:.3f} (<= 0.2), {secs:.2f}s (< 10s)")


def test_c09_saturation():
    acceptance_run("saturated")
    acceptance_run("paper")
    acceptance_run("paper_faulty")
    _sweep("drift_center", "trajectory.vx")
    worst_norm, worst_comp, n_sat, n_clamp = -math.inf, -math.inf, 0, 0
    for cfg, log, _ in _RUNS.values():
        cap = cfg.control.u_max
        if cfg.control.mode == "norm-saturated":
            n_sat += 1
            worst_norm = max(worst_norm, float(np.hypot(log.ux, log.uy).max() - cap))
        elif cfg.control.mode == "component-clamped":
            n_clamp += 1
            worst_comp = max(worst_comp, float(np.maximum(np.abs(log.ux), np.abs(log.uy)).max() - cap))
    ok = n_sat >= 1 and n_clamp >= 1 and worst_norm <= 1e-12 and worst_comp <= 0.0
    assert record(9, "saturation bound", ok,
                  f"{n_sat} norm-saturated runs, max |u| - u_max {worst_norm:.2e} (<= 1e-12); "
                  f"{n_clamp} component-clamped runs, max |u_k| - cap {worst_comp:.2e} (<= 0)")


def test_c10_fault_tolerance():
    cfg, log, secs = acceptance_run("paper_faulty")
    mission = cfg.duration * cfg.dt
    (agent, t0, t1), = cfg.faults.entries
    middle = agent == 1 and math.isclose(t0, mission / 3) and math.isclose(t1, 2 * mission / 3)
    flagged = not log.valid[(log.t >= t0) & (log.t <= t1), 1].any()
    finite = bool(np.all(np.isfinite(log.estimate)) and np.all(np.isfinite(log.rates)))
    db, beta = _paper_bounds(log)
    ok = middle and flagged and finite and db <= 3.0 and beta <= 0.3 and len(log) == cfg.duration + 1
    assert record(10, "fault tolerance", ok,
                  f"agent 2 invalid on [{t0:g}, {t1:g}], estimates finite={finite}, max |D^b| {db:.3f} (<= 3), "
                  f"max |beta - pi/2| {beta:.3f} (<= 0.3)")


def _all_runs():
    for name in ("w_decay", "beta_consensus", "paper", "paper_faulty", "saturated"):
        acceptance_run(name)
    _sweep("drift_center", "trajectory.vx")
    _sweep("drift_radius", "trajectory.r_rate")
    return list(_RUNS.items())


def test_c05_positivity_conservation():
    runs = _all_runs()
    min_beta = min(float(log.beta.min()) for _, (_, log, _) in runs)
    sum_err = max(float(np.abs(log.beta.sum(axis=1) - TWO_PI).max()) for _, (_, log, _) in runs)
    ok = min_beta >= -1e-12 and sum_err < 1e-9
    assert record(5, "positivity and conservation", ok,
                  f"{len(runs)} runs, min beta {min_beta:.4f} (>= -1e-12), "
                  f"max |sum beta - 2pi| {sum_err:.2e} (< 1e-9)")


def test_c06_singularity_avoidance():
    runs = _all_runs()
    min_dc = min(float(log.dc.min()) for _, (_, log, _) in runs)
    assert record(6, "singularity avoidance", min_dc > 0,
                  f"{len(runs)} runs, min D^c {min_dc:.4f} (> 0)")


def test_c11_determinism():
    runs = _all_runs()
    same = 0
    for (name, overrides), (_, log, _) in runs:
        again = run(load(name, overrides))
        same += timeseries_csv(again) == timeseries_csv(log)
    assert record(11, "determinism", same == len(runs),
                  f"{same}/{len(runs)} configs produced byte-identical CSVs on a second run")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted((k, v) for k, v in globals().items() if k.startswith("test_c")):
        try:
            fn()
        except AssertionError:
            failed += 1
    print("\n".join(verdict_lines()))
    sys.exit(1 if failed else 0)
