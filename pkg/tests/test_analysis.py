import math

import numpy as np
import pytest

from circumnav import target
from circumnav.analysis import CLAIMS, theorem_report, validate_beta_dynamics
from circumnav.controller import ControlParams
from circumnav.geometry import TWO_PI, Vec2
from circumnav.sim import SimConfig, run

ORIGIN = Vec2(0.0, 0.0)
GAIN = ControlParams(delta=1.0, mode="gain-scaled")
UNEVEN = (0.0, math.pi, 4 * math.pi / 3, 5 * math.pi / 3)


def uneven_config(dt, duration, **kw):
    return SimConfig(target.constant(ORIGIN, 10.0, 1e6), n=4, dt=dt, duration=duration,
                     control=GAIN, placement_angles=UNEVEN, **kw)


def test_beta_dynamics_equilibrium():
    log = run(SimConfig(target.constant(ORIGIN, 10.0, 1e6), n=4, dt=1e-3, duration=500, control=GAIN))
    res = validate_beta_dynamics(log, 1.0)
    assert res.applicable and res.steps == 500
    assert res.max_deviation <= 1e-6


def test_beta_dynamics_uneven_start():
    res = validate_beta_dynamics(run(uneven_config(1e-3, 3000)), 1.0)
    assert res.applicable
    assert res.max_deviation < 1e-2


def test_beta_dynamics_not_applicable_off_boundary():
    log = run(SimConfig(target.constant(ORIGIN, 10.0, 1e6), n=4, dt=1e-3, duration=50,
                        control=GAIN, placement_margin=2.0))
    res = validate_beta_dynamics(log, 1.0)
    assert not res.applicable and res.max_deviation is None and res.steps == 0


def test_beta_dynamics_improves_with_dt():
    coarse = validate_beta_dynamics(run(uneven_config(1e-2, 300)), 1.0)
    fine = validate_beta_dynamics(run(uneven_config(1e-3, 3000)), 1.0)
    assert fine.max_deviation <= coarse.max_deviation


def test_beta_dynamics_fixed_gate():
    log = run(uneven_config(1e-3, 200))
    # only the exact initial placement survives a zero-width gate
    assert validate_beta_dynamics(log, 1.0, w_tol=0.0).steps == 1
    assert validate_beta_dynamics(log, 1.0, w_tol=1.0).steps == 200


def test_report_stationary_all_pass():
    # n=8, r=1, dt=1e-4 keeps the Euler residual below the 1e-4 reporting level
    cfg = SimConfig(target.constant(ORIGIN, 1.0, 1e6), n=8, dt=1e-4, duration=2000, control=GAIN)
    report = theorem_report(run(cfg), cfg)
    assert [e.claim for e in report.entries] == list(CLAIMS)
    assert report.all_passed
    for claim in ("oi", "oi2", "oi3", "oi4"):
        assert report[claim].measured < 1e-4


def test_report_flags_positivity_violation():
    cfg = SimConfig(target.constant(ORIGIN, 10.0, 1e6), n=4, dt=1e-3, duration=50, control=GAIN)
    log = run(cfg)
    log.beta[10, 1] = -0.5
    log.beta[10, 2] += 0.5
    report = theorem_report(log, cfg)
    assert report["positivity"].status == "fail"
    assert report["singularity"].status == "pass"
    assert report["oi"].status == "pass"
    assert not report.all_passed


def test_report_ratio_for_moving_target():
    cfg = SimConfig(target.linear_drift(ORIGIN, 20.0, Vec2(0.1, 0.0), 1e6), n=4, dt=1.0,
                    duration=100, est_every=5,
                    control=ControlParams(delta=0.05, u_max=2.0, mode="component-clamped"))
    report = theorem_report(run(cfg), cfg)
    oi = report["oi"]
    assert oi.ratio == pytest.approx(oi.measured / 0.1)
    assert report["oi2"].ratio is None
    assert report["W-decay"].status == "n/a"


def test_report_text_and_csv():
    cfg = SimConfig(target.constant(ORIGIN, 10.0, 1e6), n=4, dt=1e-3, duration=20, control=GAIN)
    report = theorem_report(run(cfg), cfg)
    text = report.to_text()
    assert all(c in text for c in CLAIMS)
    rows = report.to_csv().strip().splitlines()
    assert rows[0] == "claim,measured,bound,ratio,status"
    assert [r.split(",")[0] for r in rows[1:]] == list(CLAIMS)
    with pytest.raises(KeyError):
        report["nope"]


def test_report_deterministic():
    cfg = uneven_config(1e-3, 300)
    assert theorem_report(run(cfg), cfg).to_csv() == theorem_report(run(cfg), cfg).to_csv()
