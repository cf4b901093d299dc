"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--scenario paper]

Times the circle fit, the control law and a full scenario run with each
backend and checks that both produce identical output.
"""
import argparse
import timeit
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from circumnav import kernels
from circumnav.config import load_config
from circumnav.output import timeseries_csv
from circumnav.sim import run

SCENARIOS = Path(__file__).resolve().parents[1] / "src" / "circumnav" / "scenarios"


@contextmanager
def backend(name):
    """Point the dispatch module at one backend for the duration of the block."""
    impl = kernels.load_backend(name)
    saved = {k: getattr(kernels, k) for k in ("fit_circle_lm", "control_law", "min_singular_centered")}
    for k in saved:
        setattr(kernels, k, getattr(impl, k))
    try:
        yield impl
    finally:
        for k, v in saved.items():
            setattr(kernels, k, v)


def fit_inputs(n=8, seed=0):
    rng = np.random.default_rng(seed)
    th = np.sort(rng.uniform(0, 2 * np.pi, n))
    px, py = 30 + 14 * np.cos(th), -5 + 14 * np.sin(th)
    d = rng.uniform(-0.1, 0.1, n)
    return list(px), list(py), list(d)


def bench(stmt, repeat, number):
    return min(timeit.repeat(stmt, repeat=repeat, number=number)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--scenario", default="paper")
    args = ap.parse_args()

    names = ["python"] + (["compiled"] if kernels.compiled_available() else [])
    px, py, d = fit_inputs()
    cfg = load_config(SCENARIOS / f"{args.scenario}.cfg")
    rows, outputs = [], {}
    for name in names:
        with backend(name) as impl:
            fit = bench(lambda: impl.fit_circle_lm(px, py, d, 29.0, -4.0, 13.0, 1e-3, 100, 1e-10, 1e-3, 1e-9),
                        args.repeat, 2000)
            ctl = bench(lambda: impl.control_law(px, py, 30.0, -5.0, 14.0, 0.01, 0.0, 0.0, 1e-9),
                        args.repeat, 5000)
            sim = bench(lambda: run(cfg), max(1, args.repeat // 2), 1)
            outputs[name] = timeseries_csv(run(cfg))
        rows.append((name, fit, ctl, sim))

    print(f"{'backend':<10} {'fit_circle_lm':>15} {'control_law':>13} {args.scenario + ' run':>14}")
    for name, fit, ctl, sim in rows:
        print(f"{name:<10} {fit * 1e6:12.1f} us {ctl * 1e6:10.2f} us {sim * 1e3:11.1f} ms")
    if len(rows) == 2:
        (_, f0, c0, s0), (_, f1, c1, s1) = rows
        print(f"{'speedup':<10} {f0 / f1:14.1f}x {c0 / c1:12.1f}x {s0 / s1:13.1f}x")
        same = outputs["python"] == outputs["compiled"]
        print(f"identical time series: {same}")
    else:
        print("compiled backend not available; only the Python backend was timed")


if __name__ == "__main__":
    main()
