"""Time-series CSV and summary file I/O."""
from __future__ import annotations

import csv
import io
import math
from pathlib import Path

import numpy as np

from .sim import SimLog

BASE_COLUMNS = ("t", "cx", "cy", "r", "chx", "chy", "rh", "cdx", "cdy", "rd")
AGENT_COLUMNS = ("p{i}x", "p{i}y", "db{i}", "dc{i}", "beta{i}", "ux{i}", "uy{i}", "valid{i}")
# SimLog attribute behind each per-agent column
_AGENT_SOURCES = ("px", "py", "db", "dc", "beta", "ux", "uy", "valid")


def header(n: int) -> list[str]:
    cols = list(BASE_COLUMNS)
    for i in range(1, n + 1):
        cols += [c.format(i=i) for c in AGENT_COLUMNS]
    return cols


def _g(x: float) -> str:
    return format(float(x), ".17g")


def timeseries_csv(simlog: SimLog) -> str:
    """Render the log; floats carry 17 significant digits so they round-trip exactly."""
    buf = io.StringIO()
    buf.write(",".join(header(simlog.n)) + "\n")
    base = np.column_stack([simlog.t, simlog.truth, simlog.estimate, simlog.rates])
    agent = [getattr(simlog, name) for name in _AGENT_SOURCES]
    for k in range(len(simlog)):
        cells = [_g(v) for v in base[k]]
        for i in range(simlog.n):
            for name, arr in zip(_AGENT_SOURCES, agent):
                cells.append(("1" if arr[k, i] else "0") if name == "valid" else _g(arr[k, i]))
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def write_timeseries_csv(simlog: SimLog, path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(timeseries_csv(simlog))
    return path


def read_timeseries_csv(source) -> SimLog:
    """Load a time-series CSV back into a :class:`SimLog` (raw controls are not stored)."""
    text = Path(source).read_text(encoding="utf-8") if not isinstance(source, str) or "\n" not in source else source
    rows = list(csv.reader(io.StringIO(text)))
    cols = rows[0]
    n = (len(cols) - len(BASE_COLUMNS)) // len(AGENT_COLUMNS)
    if cols != header(n):
        raise ValueError("time-series CSV header does not match the documented schema")
    data = np.array([[float(v) for v in row] for row in rows[1:]]).reshape(-1, len(cols))
    out = SimLog.allocate(n, data.shape[0])
    out.t[:] = data[:, 0]
    out.truth[:] = data[:, 1:4]
    out.estimate[:] = data[:, 4:7]
    out.rates[:] = data[:, 7:10]
    for j, name in enumerate(_AGENT_SOURCES):
        block = data[:, len(BASE_COLUMNS) + j::len(AGENT_COLUMNS)]
        getattr(out, name)[:] = block.astype(bool) if name == "valid" else block
    out.ux_raw[:] = np.nan
    out.uy_raw[:] = np.nan
    if len(out) > 1:
        out.dt = float(out.t[1] - out.t[0])
    return out


def summary_text(metrics: dict, report, config_text: str, backend: str) -> str:
    lines = ["# circumnav run summary", f"kernel_backend = {backend}", "", "[metrics]"]
    for key, value in metrics.items():
        lines.append(f"{key} = {value if isinstance(value, int) else _g(value)}")
    lines += ["", "[theorem]"]
    for e in report.entries:
        ratio = "" if e.ratio is None else f" ratio={_g(e.ratio)}"
        lines.append(f"{e.claim} = {e.status} measured={_g(e.measured)} bound={_g(e.bound)}{ratio}")
    lines += ["", "# theorem table", *("# " + ln for ln in report.to_text().splitlines())]
    lines += ["", "# --- canonical config ---", config_text.rstrip("\n")]
    return "\n".join(lines) + "\n"


def parse_summary_metrics(text: str) -> dict:
    """Read back the ``[metrics]`` block of a summary file."""
    out = {}
    section = None
    for line in text.splitlines():
        s = line.strip()
        if s.startswith("["):
            section = s
            continue
        if section == "[metrics]" and "=" in s:
            key, value = (p.strip() for p in s.split("=", 1))
            out[key] = int(value) if key == "records" else float(value)
    return out


def finite(x) -> bool:
    return isinstance(x, (int, float)) and math.isfinite(x)
