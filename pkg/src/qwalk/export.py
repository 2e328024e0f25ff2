"""Deterministic CSV/JSON writers.

Floats are written with ``repr`` (shortest string that round-trips, at most
17 significant digits), rows in a fixed order, files via temp + rename.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .convergence import ConvergenceReport
from .spectral import LimitLaw
from .walk import Distribution


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return "0.0" if v == 0 else repr(v)
    return str(value)


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def atomic_write(path: str | os.PathLike, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def json_text(obj) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n"


def write_csv(path, header, rows) -> Path:
    return atomic_write(path, csv_text(header, rows))


def write_json(path, obj) -> Path:
    return atomic_write(path, json_text(obj))


def distribution_table(dist: Distribution):
    header = [f"x_{i + 1}" for i in range(dist.dim)] + ["probability"]
    rows = [[*x, p] for x, p in zip(dist.positions.tolist(), dist.probabilities.tolist())]
    return header, rows


def law_table(law: LimitLaw):
    d = law.dim
    header = [f"k_{i + 1}" for i in range(d)] + ["J"] + [f"h_{i + 1}" for i in range(d)] + ["weight"]
    rows = [
        [*k, int(j) + 1, *h, w]
        for k, j, h, w in zip(law.k.tolist(), law.branch.tolist(), law.h.tolist(), law.weight.tolist())
    ]
    return header, rows


def report_table(report: ConvergenceReport):
    return report.table()
