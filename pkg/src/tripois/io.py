"""File formats: measures, regions, configs, results, with exact round-trips.

Every number is emitted with 17 significant digits (enough to reproduce an
IEEE double bit-exactly on re-ingest), files contain no clocks, locales, or
machine identifiers, and reruns of the same seeded computation produce
byte-identical bytes.  JSON writing is done by a small deterministic
serializer rather than the default float repr so the 17-digit rule holds
everywhere.
"""

from __future__ import annotations

import json
import math
import os
from typing import Sequence

import numpy as np

from .errors import FormatError
from .experiments import SimConfig, SimResult
from .geometry import Region, region_from_dict
from .measures import Measure, measure_from_dict
from .triangles import TriangleHit

REPLICATES_CSV = "replicates.csv"
SUMMARY_JSON = "summary.json"


def fmt(value) -> str:
    """One number as text: floats with 17 significant digits, ints as ints."""
    if isinstance(value, bool):
        raise TypeError("format booleans as JSON literals, not numbers")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if not math.isfinite(value):
        raise ValueError("refusing to serialize a non-finite number")
    return f"{value:.17g}"


def dumps_json(obj, indent: int = 2) -> str:
    """Deterministic JSON text with every float at 17 significant digits."""
    out: list[str] = []
    _write_json(obj, out, indent, 0)
    out.append("\n")
    return "".join(out)


def _write_json(obj, out: list[str], indent: int, level: int) -> None:
    pad = " " * (indent * (level + 1))
    close_pad = " " * (indent * level)
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(fmt(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for idx, (key, value) in enumerate(obj.items()):
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings: {key!r}")
            out.append(pad + json.dumps(key) + ": ")
            _write_json(value, out, indent, level + 1)
            out.append(",\n" if idx + 1 < len(obj) else "\n")
        out.append(close_pad + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if not items:
            out.append("[]")
            return
        out.append("[\n")
        for idx, value in enumerate(items):
            out.append(pad)
            _write_json(value, out, indent, level + 1)
            out.append(",\n" if idx + 1 < len(items) else "\n")
        out.append(close_pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} to JSON")


def load_json(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        try:
            return json.load(handle)
        except json.JSONDecodeError as exc:
            raise FormatError(path, f"not valid JSON: {exc}") from exc


def load_measure(path: str) -> Measure:
    return measure_from_dict(load_json(path))


def load_region(path: str) -> Region:
    return region_from_dict(load_json(path))


def load_sim_config(path: str) -> SimConfig:
    return SimConfig.from_dict(load_json(path))


# ---------------------------------------------------------------------------
# Point and triangle CSV
# ---------------------------------------------------------------------------

def write_points_csv(path: str, points: np.ndarray) -> None:
    points = np.asarray(points, dtype=float)
    lines = ["x,y"]
    lines.extend(f"{fmt(x)},{fmt(y)}" for x, y in points)
    _write_text(path, "\n".join(lines) + "\n")


def read_points_csv(path: str) -> np.ndarray:
    rows = _read_csv(path, expected_header=["x", "y"])
    return np.array([[float(a), float(b)] for a, b in rows], dtype=float)


def write_hits_csv(path: str, hits: Sequence[TriangleHit]) -> None:
    lines = ["i,j,k,area"]
    lines.extend(f"{h.i},{h.j},{h.k},{fmt(h.area)}" for h in hits)
    _write_text(path, "\n".join(lines) + "\n")


def read_hits_csv(path: str) -> list[TriangleHit]:
    rows = _read_csv(path, expected_header=["i", "j", "k", "area"])
    return [TriangleHit(int(i), int(j), int(k), float(a))
            for i, j, k, a in rows]


# ---------------------------------------------------------------------------
# Simulation result files
# ---------------------------------------------------------------------------

def replicates_header(result: SimResult) -> list[str]:
    cols = ["replicate"]
    cols.extend(f"delta{i + 1}" for i in range(result.k_order))
    cols.extend(f"T_alpha{a + 1}" for a in range(len(result.alphas)))
    cols.append("diam1")
    return cols


def write_replicates_csv(path: str, result: SimResult) -> None:
    """Per-replicate rows: rescaled areas ascending, counts per alpha, and
    the diameter of the smallest-area triangle."""
    lines = [",".join(replicates_header(result))]
    for rep in range(result.replicates):
        cells = [str(rep)]
        cells.extend(fmt(v) for v in result.scaled_areas[rep])
        cells.extend(str(int(c)) for c in result.counts[rep])
        cells.append(fmt(result.diameters[rep]))
        lines.append(",".join(cells))
    _write_text(path, "\n".join(lines) + "\n")


def read_replicates_csv(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as handle:
        raw = [line.rstrip("\n") for line in handle]
    raw = [line for line in raw if line]
    if not raw:
        raise FormatError(path, "file is empty")
    header = raw[0].split(",")
    if header[0] != "replicate" or header[-1] != "diam1":
        raise FormatError(path, "does not look like a replicates table")
    k_order = sum(1 for c in header if c.startswith("delta"))
    n_alpha = sum(1 for c in header if c.startswith("T_alpha"))
    if 1 + k_order + n_alpha + 1 != len(header):
        raise FormatError(path, f"unexpected columns: {header}")
    scaled = []
    counts = []
    diams = []
    for line in raw[1:]:
        cells = line.split(",")
        if len(cells) != len(header):
            raise FormatError(path, "row width differs from header")
        scaled.append([float(c) for c in cells[1:1 + k_order]])
        counts.append([int(c) for c in cells[1 + k_order:1 + k_order + n_alpha]])
        diams.append(float(cells[-1]))
    return {
        "scaled_areas": np.array(scaled, dtype=float),
        "counts": np.array(counts, dtype=np.int64),
        "diameters": np.array(diams, dtype=float),
    }


def write_result_dir(out_dir: str, result: SimResult, summary: dict) -> dict:
    """Write replicates.csv and summary.json into out_dir; returns paths."""
    os.makedirs(out_dir, exist_ok=True)
    rep_path = os.path.join(out_dir, REPLICATES_CSV)
    sum_path = os.path.join(out_dir, SUMMARY_JSON)
    write_replicates_csv(rep_path, result)
    _write_text(sum_path, dumps_json(summary))
    return {"replicates": rep_path, "summary": sum_path}


def read_result_dir(result_dir: str) -> tuple[dict, dict]:
    """Load (summary dict, replicate arrays) from a simulation output dir."""
    rep_path = os.path.join(result_dir, REPLICATES_CSV)
    sum_path = os.path.join(result_dir, SUMMARY_JSON)
    if not os.path.isfile(rep_path) or not os.path.isfile(sum_path):
        raise FileNotFoundError(
            f"{result_dir} does not contain {REPLICATES_CSV} and {SUMMARY_JSON}")
    return load_json(sum_path), read_replicates_csv(rep_path)


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)


def _read_csv(path: str, expected_header: list[str]) -> list[list[str]]:
    with open(path, "r", encoding="utf-8") as handle:
        raw = [line.rstrip("\n") for line in handle]
    raw = [line for line in raw if line]
    if not raw or raw[0].split(",") != expected_header:
        raise FormatError(
            path, f"must start with header {','.join(expected_header)!r}")
    rows = []
    for line in raw[1:]:
        cells = line.split(",")
        if len(cells) != len(expected_header):
            raise FormatError(path, "row width differs from header")
        rows.append(cells)
    return rows
