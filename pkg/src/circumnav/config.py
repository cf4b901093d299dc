"""Scenario config files: flat ``key = value`` lines grouped by ``[section]``.

Top-level keys (before any section header)::

    n = 4                      # agents, >= 3
    dt = 1.0                   # timestep
    duration = 100             # steps
    est_every = 1              # estimate every k steps (delta_T = k*dt)
    seed = 0
    placement_margin = 1.0     # initial ring radius as a multiple of r_hat(0)
    placement_angles = ...     # optional comma list of n increasing angles (rad)
    satellite_noise_c = 0.0
    satellite_noise_r = 0.0
    tail_fraction = 0.2

Sections: ``[control]`` (mode, delta, u_max), ``[trajectory]`` (kind, cx, cy,
r, horizon and per-kind keys), ``[perturbation]`` (eta, modes, phase),
``[faults]`` (noise, seed, faulty) and ``[report]`` (k1, k2, k3, abs_tol,
beta_tol). ``faulty`` is a comma list of ``agent@t_start:t_end`` with
1-based agent numbers. See README for defaults.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from . import target
from .controller import ControlParams
from .errors import CircumnavError, ConfigError
from .geometry import Vec2
from .network import FaultSchedule
from .sim import ReportParams, SimConfig
from .target import BoundaryPerturbation

TOP_KEYS = {
    "n": int, "dt": float, "duration": int, "est_every": int, "seed": int,
    "placement_margin": float, "placement_angles": "floats",
    "satellite_noise_c": float, "satellite_noise_r": float, "tail_fraction": float,
}
SECTION_KEYS = {
    "control": {"mode": str, "delta": float, "u_max": float},
    "trajectory": {
        "kind": str, "cx": float, "cy": float, "r": float, "horizon": float,
        "vx": float, "vy": float, "r_rate": float,
        "ax": float, "wx": float, "ay": float, "wy": float, "ar": float, "wr": float,
        "file": str, "waypoints": str,
    },
    "perturbation": {"eta": float, "modes": int, "phase": float},
    "faults": {"noise": float, "seed": int, "faulty": str},
    "report": {"k1": float, "k2": float, "k3": float, "abs_tol": float, "beta_tol": float},
}
KIND_KEYS = {
    "constant": {"kind", "cx", "cy", "r", "horizon"},
    "linear-drift": {"kind", "cx", "cy", "r", "horizon", "vx", "vy", "r_rate"},
    "sinusoidal": {"kind", "cx", "cy", "r", "horizon", "vx", "vy", "r_rate",
                   "ax", "wx", "ay", "wy", "ar", "wr"},
    "waypoint-csv": {"kind", "horizon", "file", "waypoints"},
}
SWEEPABLE = (
    "dt", "control.delta", "control.u_max", "faults.noise",
    "trajectory.vx", "trajectory.vy", "trajectory.r_rate",
    "trajectory.ax", "trajectory.ay", "trajectory.ar",
    "trajectory.wx", "trajectory.wy", "trajectory.wr",
)


@dataclass
class Entry:
    value: str
    line: int


def parse_raw(text: str) -> dict[str, dict[str, Entry]]:
    """Split config text into ``{section: {key: Entry}}``; top level is ``""``."""
    raw: dict[str, dict[str, Entry]] = {"": {}}
    section = ""
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if body.startswith("["):
            if not body.endswith("]"):
                raise ConfigError(f"line {lineno}: malformed section header {body!r}", line=lineno)
            section = body[1:-1].strip()
            if section not in SECTION_KEYS:
                raise ConfigError(f"line {lineno}: unknown section [{section}]", line=lineno)
            if section in raw:
                raise ConfigError(f"line {lineno}: section [{section}] repeated", line=lineno)
            raw[section] = {}
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value'", line=lineno)
        key, value = (s.strip() for s in body.split("=", 1))
        allowed = TOP_KEYS if section == "" else SECTION_KEYS[section]
        if key not in allowed:
            where = f"[{section}]" if section else "top level"
            raise ConfigError(f"line {lineno}: unknown key {key!r} at {where}", line=lineno, key=key)
        if key in raw[section]:
            first = raw[section][key].line
            raise ConfigError(
                f"line {lineno}: duplicate key {key!r} (first set on line {first})",
                line=lineno, key=key,
            )
        raw[section][key] = Entry(value, lineno)
    return raw


def _convert(section: str, key: str, entry: Entry, kind):
    name = f"{section}.{key}" if section else key
    try:
        if kind == "floats":
            out = tuple(float(v) for v in entry.value.split(","))
            ok = all(math.isfinite(v) for v in out)
        elif kind is int:
            out = int(entry.value)
            ok = True
        elif kind is float:
            out = float(entry.value)
            ok = math.isfinite(out)
        else:
            out = entry.value
            ok = bool(out)
    except ValueError:
        ok = False
    if not ok:
        raise ConfigError(f"line {entry.line}: {name}: cannot parse {entry.value!r}",
                          line=entry.line, key=name)
    return out


def _get(raw, section, key, default):
    entry = raw.get(section, {}).get(key)
    if entry is None:
        return default
    kinds = TOP_KEYS if section == "" else SECTION_KEYS[section]
    return _convert(section, key, entry, kinds[key])


def _parse_faulty(spec: str, line: int):
    entries = []
    for item in spec.split(","):
        item = item.strip()
        try:
            agent, span = item.split("@")
            t0, t1 = span.split(":")
            entries.append((int(agent) - 1, float(t0), float(t1)))
        except ValueError:
            raise ConfigError(
                f"line {line}: faults.faulty: expected 'agent@t_start:t_end', got {item!r}",
                line=line, key="faults.faulty",
            ) from None
    return tuple(entries)


def _parse_inline_waypoints(spec: str):
    return [tuple(part.split(":")) for part in spec.split(";") if part.strip()]


def _trajectory(raw, duration: int, dt: float, base_dir: Path | None):
    sec = raw.get("trajectory")
    if sec is None:
        raise ConfigError("missing [trajectory] section", key="trajectory")
    kind = _get(raw, "trajectory", "kind", None)
    if kind not in KIND_KEYS:
        raise ConfigError(f"trajectory.kind: must be one of {sorted(KIND_KEYS)}, got {kind!r}",
                          key="trajectory.kind")
    for key, entry in sec.items():
        if key not in KIND_KEYS[kind]:
            raise ConfigError(f"line {entry.line}: trajectory.{key} does not apply to kind {kind}",
                              line=entry.line, key=f"trajectory.{key}")
    g = lambda key, default=0.0: _get(raw, "trajectory", key, default)  # noqa: E731
    horizon = g("horizon", duration * dt)
    try:
        if kind == "waypoint-csv":
            if ("file" in sec) == ("waypoints" in sec):
                raise ConfigError("trajectory: waypoint-csv needs exactly one of 'file' or 'waypoints'",
                                  key="trajectory.file")
            if "file" in sec:
                path = Path(g("file"))
                if base_dir is not None and not path.is_absolute():
                    path = base_dir / path
                traj = target.read_waypoint_csv(path, horizon)
            else:
                traj = target.load_waypoints(_parse_inline_waypoints(g("waypoints")), horizon)
        else:
            if "r" not in sec:
                raise ConfigError("trajectory.r: base radius is required", key="trajectory.r")
            c = Vec2(g("cx"), g("cy"))
            v = Vec2(g("vx"), g("vy"))
            if kind == "constant":
                traj = target.constant(c, g("r"), horizon)
            elif kind == "linear-drift":
                traj = target.linear_drift(c, g("r"), v, horizon, g("r_rate"))
            else:
                traj = target.sinusoidal(c, g("r"), horizon, osc_x=(g("ax"), g("wx")),
                                         osc_y=(g("ay"), g("wy")), osc_r=(g("ar"), g("wr")),
                                         velocity=v, r_rate=g("r_rate"))
    except ConfigError:
        raise
    except (CircumnavError, ValueError, OSError) as exc:
        raise ConfigError(f"trajectory: {exc}", key="trajectory") from exc
    return traj


def build_config(raw, base_dir: Path | None = None) -> SimConfig:
    top = lambda key, default: _get(raw, "", key, default)  # noqa: E731
    n = top("n", 4)
    dt = top("dt", 1.0)
    duration = top("duration", 100)
    seed = top("seed", 0)
    # the default horizon depends on these, so check them before the trajectory
    if not dt > 0.0:
        raise ConfigError(f"dt: dt must be > 0, got {dt}", key="dt")
    if duration < 0:
        raise ConfigError(f"duration: duration must be ≥ 0, got {duration}", key="duration")
    traj = _trajectory(raw, duration, dt, base_dir)

    def section(name, factory, **kwargs):
        try:
            return factory(**kwargs)
        except ConfigError:
            raise
        except (CircumnavError, ValueError) as exc:
            raise ConfigError(f"[{name}] {exc}", key=name) from exc

    control = section("control", ControlParams,
                      mode=_get(raw, "control", "mode", "norm-saturated"),
                      delta=_get(raw, "control", "delta", 1.0),
                      u_max=_get(raw, "control", "u_max", 1.0))
    pert = section("perturbation", BoundaryPerturbation,
                   eta=_get(raw, "perturbation", "eta", 0.0),
                   modes=_get(raw, "perturbation", "modes", 0),
                   phase=_get(raw, "perturbation", "phase", 0.0))
    faulty_entry = raw.get("faults", {}).get("faulty")
    faults = section("faults", FaultSchedule,
                     entries=_parse_faulty(faulty_entry.value, faulty_entry.line) if faulty_entry else (),
                     noise=_get(raw, "faults", "noise", 0.0),
                     seed=_get(raw, "faults", "seed", seed))
    report = section("report", ReportParams,
                     k1=_get(raw, "report", "k1", None), k2=_get(raw, "report", "k2", None),
                     k3=_get(raw, "report", "k3", None),
                     abs_tol=_get(raw, "report", "abs_tol", 1e-4),
                     beta_tol=_get(raw, "report", "beta_tol", 1e-3))
    return SimConfig(
        trajectory=traj, n=n, dt=dt, est_every=top("est_every", 1), duration=duration,
        control=control, perturbation=pert, faults=faults,
        noise_c=top("satellite_noise_c", 0.0), noise_r=top("satellite_noise_r", 0.0),
        placement_margin=top("placement_margin", 1.0),
        placement_angles=top("placement_angles", None), seed=seed,
        tail_fraction=top("tail_fraction", 0.2), report=report,
    )


def parse_config(text: str, base_dir: Path | None = None) -> SimConfig:
    """Parse and validate config text. Relative waypoint paths resolve against ``base_dir``."""
    return build_config(parse_raw(text), base_dir)


def load_config(path) -> SimConfig:
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), path.parent)


def override(raw, key: str, value: str):
    """Copy of ``raw`` with ``section.key`` (or a top-level key) replaced."""
    section, _, name = key.rpartition(".")
    out = {sec: dict(entries) for sec, entries in raw.items()}
    out.setdefault(section, {})[name] = Entry(value, 0)
    return out


def _f(x: float) -> str:
    return repr(float(x))


def render(config: SimConfig) -> str:
    """Canonical text form; ``parse_config(render(c)) == c``."""
    lines = [
        f"n = {config.n}",
        f"dt = {_f(config.dt)}",
        f"duration = {config.duration}",
        f"est_every = {config.est_every}",
        f"seed = {config.seed}",
        f"placement_margin = {_f(config.placement_margin)}",
    ]
    if config.placement_angles is not None:
        lines.append("placement_angles = " + ", ".join(_f(a) for a in config.placement_angles))
    lines += [
        f"satellite_noise_c = {_f(config.noise_c)}",
        f"satellite_noise_r = {_f(config.noise_r)}",
        f"tail_fraction = {_f(config.tail_fraction)}",
        "",
        "[control]",
        f"mode = {config.control.mode}",
        f"delta = {_f(config.control.delta)}",
        f"u_max = {_f(config.control.u_max)}",
        "",
        "[trajectory]",
    ]
    tr = config.trajectory
    lines += [f"kind = {tr.kind}", f"horizon = {_f(tr.horizon)}"]
    if tr.kind == "waypoint-csv":
        rows = "; ".join(":".join(_f(v) for v in row) for row in tr.waypoints)
        lines.append(f"waypoints = {rows}")
    else:
        lines += [f"cx = {_f(tr.base.c.x)}", f"cy = {_f(tr.base.c.y)}", f"r = {_f(tr.base.r)}"]
    if tr.kind in ("linear-drift", "sinusoidal"):
        lines += [f"vx = {_f(tr.velocity.x)}", f"vy = {_f(tr.velocity.y)}",
                  f"r_rate = {_f(tr.r_rate)}"]
    if tr.kind == "sinusoidal":
        for axis, (amp, freq) in zip("xyr", (tr.osc_x, tr.osc_y, tr.osc_r)):
            lines += [f"a{axis} = {_f(amp)}", f"w{axis} = {_f(freq)}"]
    p = config.perturbation
    lines += ["", "[perturbation]", f"eta = {_f(p.eta)}", f"modes = {p.modes}",
              f"phase = {_f(p.phase)}", "", "[faults]",
              f"noise = {_f(config.faults.noise)}", f"seed = {config.faults.seed}"]
    if config.faults.entries:
        spec = ", ".join(f"{a + 1}@{_f(t0)}:{_f(t1)}" for a, t0, t1 in config.faults.entries)
        lines.append(f"faulty = {spec}")
    rp = config.report
    lines += ["", "[report]"]
    for key in ("k1", "k2", "k3"):
        if getattr(rp, key) is not None:
            lines.append(f"{key} = {_f(getattr(rp, key))}")
    lines += [f"abs_tol = {_f(rp.abs_tol)}", f"beta_tol = {_f(rp.beta_tol)}"]
    return "\n".join(lines) + "\n"
