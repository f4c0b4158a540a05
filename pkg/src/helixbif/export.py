"""CSV and JSON writers with a fixed, round-trip exact float format.

Every CSV starts with one provenance comment line
``# geometry=...,a=...,m=...,M=...,tol=...`` followed by the header row.
JSON files hold ``{"meta": {...}, "data": [...]}``.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ExportError

PROFILE_HEADER = ["s", "re_z", "im_z", "T1", "T2", "T3", "X1", "X2", "X3"]
BRANCH_HEADER = ["eta", "R", "lambda", "residual_inf", "newton_iters", "f_norm"]
EIGEN_HEADER = ["n", "branch", "R", "admissible", "transversal", "transversal_check"]
META_KEYS = ("geometry", "a", "m", "M", "tol")


def fmt(value) -> str:
    """17 significant digits for floats; plain text otherwise."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if value is None:
        return ""
    return str(value)


def provenance_line(meta: dict) -> str:
    return "# " + ",".join(f"{k}={fmt(meta.get(k))}" for k in META_KEYS)


def write_csv(path, meta: dict, header: list, rows) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            fh.write(provenance_line(meta) + "\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([fmt(v) for v in row])
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def read_csv(path) -> tuple[str, list, list]:
    """Provenance line, header and raw string rows."""
    with Path(path).open(newline="") as fh:
        first = fh.readline().rstrip("\n")
        reader = csv.reader(fh)
        header = next(reader)
        return first, header, list(reader)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        # JSON has no inf/nan literals; keep them as strings
        return v if math.isfinite(v) else repr(v)
    return value


def write_json(path, meta: dict, data) -> Path:
    path = Path(path)
    full_meta = {k: meta.get(k) for k in META_KEYS}
    full_meta["command"] = meta.get("command")
    full_meta["version"] = __version__
    doc = {"meta": _jsonable(full_meta), "data": _jsonable(data)}
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(doc, indent=2, sort_keys=False) + "\n")
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())


def profile_rows(sample):
    z = sample.z0
    for k in range(sample.s.size):
        yield (sample.s[k], z[k].real, z[k].imag, *sample.T0[k], *sample.X[k])


def branch_rows(branch):
    for p in branch.points:
        yield (p.eta, p.R, p.lam, p.residual_inf, p.newton_iters, p.f.norm())


def eigen_rows(table):
    for r in table:
        yield tuple(r.get(k) for k in EIGEN_HEADER)


def export(obj, fmt_: str, path, meta: dict) -> Path:
    """Write a curve sample, branch or eigen table (list of dicts)."""
    from .continuation import Branch
    from .reconstruct import CurveSample

    if isinstance(obj, CurveSample):
        header, rows = PROFILE_HEADER, list(profile_rows(obj))
    elif isinstance(obj, Branch):
        header, rows = BRANCH_HEADER, list(branch_rows(obj))
    elif isinstance(obj, list):
        header, rows = EIGEN_HEADER, list(eigen_rows(obj))
    else:
        raise TypeError(f"cannot export {type(obj).__name__}")
    if fmt_ == "csv":
        return write_csv(path, meta, header, rows)
    if fmt_ == "json":
        return write_json(path, meta, [dict(zip(header, r)) for r in rows])
    raise ValueError(f"unknown format {fmt_!r}")
