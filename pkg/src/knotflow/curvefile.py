"""Bit-exact text formats: curve files, energy logs, run metadata.

Curve files hold tangent samples, one per grid point, with shortest
round-trip decimal floats so that write -> read -> write is byte-identical:

    # knotflow-curve v1 n=<N>
    x,t1,t2,t3
    ...
"""

import csv
import io
import json
from pathlib import Path
from typing import List

import numpy as np

from . import spectral
from .errors import ParseError
from .fields import TangentField, constant_speed_project
from .flow import EnergyLogRow

CURVE_HEADER_PREFIX = "# knotflow-curve v1 n="
ENERGY_COLUMNS = ("t", "dt", "E_bend", "E_interaction", "E_total", "speed_err", "mean_err", "distortion")


def format_curve(tau: TangentField) -> str:
    lines = [f"{CURVE_HEADER_PREFIX}{tau.n}"]
    x = spectral.grid(tau.n)
    for j in range(tau.n):
        v = tau.values[j]
        lines.append(f"{x[j]!r},{v[0]!r},{v[1]!r},{v[2]!r}")
    return "\n".join(lines) + "\n"


def write_curve_file(path, tau: TangentField) -> None:
    Path(path).write_text(format_curve(tau), encoding="utf-8")


def parse_curve(text: str) -> TangentField:
    lines = text.splitlines()
    if not lines or not lines[0].startswith(CURVE_HEADER_PREFIX):
        raise ParseError("missing knotflow-curve v1 header")
    try:
        n = int(lines[0][len(CURVE_HEADER_PREFIX):])
    except ValueError as exc:
        raise ParseError(f"malformed grid size in header: {lines[0]!r}") from exc
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != n:
        raise ParseError(f"expected {n} sample lines, found {len(body)}")
    values = np.empty((n, 3))
    for j, ln in enumerate(body):
        parts = ln.split(",")
        if len(parts) != 4:
            raise ParseError(f"line {j + 2}: expected 4 comma-separated fields")
        try:
            values[j] = [float(parts[1]), float(parts[2]), float(parts[3])]
        except ValueError as exc:
            raise ParseError(f"line {j + 2}: bad float") from exc
    return TangentField.from_values(values)


def read_curve_file(path) -> TangentField:
    """Exact parse of a curve file; no projection applied."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read curve file {path}: {exc}") from exc
    return parse_curve(text)


def load_curve_file(path) -> TangentField:
    """Read a curve file and project onto the constraint manifold."""
    return constant_speed_project(read_curve_file(path))


def format_energy_log(rows: List[EnergyLogRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(ENERGY_COLUMNS)
    for r in rows:
        writer.writerow(
            [repr(v) for v in (r.t, r.dt, r.e_bend, r.e_interaction, r.e_total,
                               r.speed_err, r.mean_err, r.distortion)]
        )
    return buf.getvalue()


def write_energy_log(path, rows: List[EnergyLogRow]) -> None:
    Path(path).write_text(format_energy_log(rows), encoding="utf-8")


def read_energy_log(path) -> np.ndarray:
    """Energy log as a structured record array keyed by column name."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != ENERGY_COLUMNS:
            raise ParseError(f"unexpected energy log columns: {header}")
        rows = [[float(v) for v in row] for row in reader]
    arr = np.asarray(rows)
    return np.rec.fromarrays(arr.T, names=",".join(ENERGY_COLUMNS))


def write_run_json(path, config: dict, diagnostics: dict) -> None:
    payload = {"config": config, "diagnostics": diagnostics}
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
