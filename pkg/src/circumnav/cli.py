"""Command-line entry point: ``circumnav run|sweep|validate``.

Exit codes: 0 success, 1 engine or theorem-validation failure, 2 I/O,
config or usage failure. ``CIRCUMNAV_LOG`` sets the log level.
"""
from __future__ import annotations

import logging
import os
import shutil
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import click

from . import config as cfgmod
from . import kernels, target
from .analysis import theorem_report
from .errors import CircumnavError, ConfigError
from .output import summary_text, timeseries_csv
from .plots import figure_set
from .sim import SimConfig, metrics, run

log = logging.getLogger("circumnav")


@dataclass(frozen=True)
class RunArtifacts:
    timeseries: Path
    summary: Path
    theorem_txt: Path
    theorem_csv: Path
    plots: tuple[Path, ...]

    def all_paths(self) -> tuple[Path, ...]:
        return (self.timeseries, self.summary, self.theorem_txt, self.theorem_csv) + self.plots


class ArtifactIOError(CircumnavError, OSError):
    pass


def _write_atomically(out_dir: Path, files: dict[str, str]) -> dict[str, Path]:
    """Write every file or none: stage in a temp dir inside ``out_dir``, then move."""
    created = not out_dir.exists()
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        stage = Path(tempfile.mkdtemp(prefix=".circumnav-", dir=out_dir))
    except OSError as exc:
        raise ArtifactIOError(f"cannot write to {out_dir}: {exc}") from exc
    moved = []
    try:
        for name, text in files.items():
            with open(stage / name, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        for name in files:
            os.replace(stage / name, out_dir / name)
            moved.append(out_dir / name)
    except OSError as exc:
        for p in moved:
            p.unlink(missing_ok=True)
        if created:
            shutil.rmtree(out_dir, ignore_errors=True)
        raise ArtifactIOError(f"failed writing artifacts to {out_dir}: {exc}") from exc
    finally:
        shutil.rmtree(stage, ignore_errors=True)
    return {name: out_dir / name for name in files}


def execute(config: SimConfig):
    """Run a config and build everything the artifacts are made of."""
    simlog = run(config)
    summary = metrics(simlog, config.tail_fraction)
    report = theorem_report(simlog, config)
    return simlog, summary, report


def artifact_files(config: SimConfig, simlog, summary, report) -> dict[str, str]:
    files = {
        "timeseries.csv": timeseries_csv(simlog),
        "summary.txt": summary_text(summary, report, cfgmod.render(config), kernels.BACKEND),
        "theorem.txt": report.to_text(),
        "theorem.csv": report.to_csv(),
    }
    files.update(figure_set(simlog))
    return files


def cmd_run(config_path, out_dir) -> tuple[RunArtifacts, object]:
    """Execute one scenario and write its artifacts. Returns ``(artifacts, report)``."""
    config = cfgmod.load_config(config_path)
    simlog, summary, report = execute(config)
    paths = _write_atomically(Path(out_dir), artifact_files(config, simlog, summary, report))
    arts = RunArtifacts(paths["timeseries.csv"], paths["summary.txt"], paths["theorem.txt"],
                        paths["theorem.csv"],
                        tuple(p for name, p in paths.items() if name.endswith(".svg")))
    return arts, report


def _sweep_one(args):
    raw, key, value, seed, base_dir, out_dir = args
    raw = cfgmod.override(raw, key, value)
    raw = cfgmod.override(raw, "seed", str(seed))
    config = cfgmod.build_config(raw, base_dir)
    simlog, summary, report = execute(config)
    if out_dir is not None:
        _write_atomically(out_dir, artifact_files(config, simlog, summary, report))
    eps1, eps2 = target.derivative_bounds(config.trajectory)
    return {"value": value, "seed": seed, "eps1": eps1, "eps2": eps2, **summary}


def cmd_sweep(config_path, key: str, values, out_dir, jobs: int = 1) -> Path:
    """One run per value (seed = base seed + index); returns the sweep CSV path."""
    if key not in cfgmod.SWEEPABLE:
        raise click.UsageError(f"{key!r} is not sweepable; choose from {', '.join(cfgmod.SWEEPABLE)}")
    values = [v.strip() for v in values if v.strip()]
    if not values:
        raise click.UsageError("--values must list at least one value")
    config_path = Path(config_path)
    try:
        raw = cfgmod.parse_raw(config_path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ArtifactIOError(f"cannot read {config_path}: {exc}") from exc
    base = cfgmod.build_config(raw, config_path.parent)
    out_dir = Path(out_dir)
    tasks = [(raw, key, v, base.seed + i, config_path.parent, out_dir / f"run_{i:03d}")
             for i, v in enumerate(values)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_one, tasks))
    else:
        rows = [_sweep_one(t) for t in tasks]
    cols = ["key", "value", "seed", "eps1", "eps2"] + [c for c in rows[0] if c not in
                                                       ("value", "seed", "eps1", "eps2")]
    lines = [",".join(cols)]
    for row in rows:
        row = {"key": key, **row}
        lines.append(",".join(str(row[c]) if isinstance(row[c], (int, str)) else format(row[c], ".17g")
                              for c in cols))
    _write_atomically(out_dir, {"sweep.csv": "\n".join(lines) + "\n"})
    return out_dir / "sweep.csv"


def _setup_logging():
    level = os.environ.get("CIRCUMNAV_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@click.group()
def cli():
    """Estimate and circumnavigate a moving circular target with n agents."""
    _setup_logging()


@cli.command("run")
@click.argument("config_path", type=click.Path(dir_okay=False))
@click.option("-o", "--out", "out_dir", required=True, type=click.Path(file_okay=False),
              help="Directory receiving the run artifacts.")
@click.option("--strict", is_flag=True, help="Exit 1 if any theorem claim fails.")
def run_cmd(config_path, out_dir, strict):
    """Run one scenario and write CSV, summary, theorem report and SVG plots."""
    try:
        arts, report = cmd_run(config_path, out_dir)
    except (ConfigError, ArtifactIOError, OSError) as exc:
        _fail(2, str(exc))
    except CircumnavError as exc:
        _fail(1, str(exc))
    click.echo(report.to_text(), nl=False)
    for p in arts.all_paths():
        log.info("wrote %s", p)
    click.echo(f"artifacts written to {out_dir}")
    if strict and not report.all_passed:
        sys.exit(1)


@cli.command("sweep")
@click.argument("config_path", type=click.Path(dir_okay=False))
@click.option("--key", required=True, help="Sweepable key, e.g. trajectory.vx or control.delta.")
@click.option("--values", required=True, help="Comma-separated values.")
@click.option("-o", "--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("-j", "--jobs", default=1, show_default=True, help="Parallel runs.")
def sweep_cmd(config_path, key, values, out_dir, jobs):
    """Run a config once per value of KEY and tabulate the metrics."""
    try:
        path = cmd_sweep(config_path, key, values.split(","), out_dir, jobs)
    except click.UsageError:
        raise
    except (ConfigError, ArtifactIOError, OSError) as exc:
        _fail(2, str(exc))
    except CircumnavError as exc:
        _fail(1, str(exc))
    click.echo(f"sweep summary written to {path}")


@cli.command("validate")
@click.argument("config_path", type=click.Path(dir_okay=False))
def validate_cmd(config_path):
    """Parse and validate a config without running it."""
    try:
        config = cfgmod.load_config(config_path)
    except (ConfigError, OSError) as exc:
        _fail(2, str(exc))
    eps1, eps2 = target.derivative_bounds(config.trajectory)
    click.echo(f"ok: n={config.n} steps={config.duration} dt={config.dt} "
               f"eps1={eps1:.6g} eps2={eps2:.6g}")


def main(argv=None):
    try:
        cli.main(args=argv, prog_name="circumnav", standalone_mode=True)
    except SystemExit as exc:
        return exc.code
    return 0


if __name__ == "__main__":
    sys.exit(main())
