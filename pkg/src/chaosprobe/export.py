"""CSV and JSON export of averaged curves.

CSV layout (version 1)::

    # chaosprobe-curve v1
    # label: <label>
    # master_seed: <int>
    # spec_hash: <sha256 of the canonical run-spec JSON>
    # build_id: <version>+<source digest>
    # realizations: <count>
    t,mean_G,stderr_G[,analytic_G]
    <rows, %.17g>

The JSON file holds the same columns under ``"columns"`` plus a ``"metadata"``
mapping (label, seed, spec hash, build id, realizations, run-spec echo).
Nothing time-dependent is written, so two exports of one run are identical.
"""
from __future__ import annotations

import functools
import hashlib
import io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__

FORMAT_NAME = "chaosprobe-curve"
FORMAT_VERSION = 1
COLUMNS = ("t", "mean_G", "stderr_G")
ANALYTIC_COLUMN = "analytic_G"


@functools.lru_cache(maxsize=1)
def build_id() -> str:
    """Package version plus a digest of the installed sources."""
    h = hashlib.sha1()
    root = Path(__file__).parent
    for p in sorted(root.rglob("*")):
        if p.suffix in (".py", ".yaml") and "__pycache__" not in p.parts:
            h.update(p.relative_to(root).as_posix().encode())
            h.update(p.read_bytes())
    return f"{__version__}+{h.hexdigest()[:12]}"


@dataclass(frozen=True)
class CurveTable:
    columns: dict
    metadata: dict

    @property
    def t(self) -> np.ndarray:
        return self.columns["t"]

    @property
    def mean_G(self) -> np.ndarray:
        return self.columns["mean_G"]


def curve_table(stats, analytic=None, spec=None) -> CurveTable:
    cols = {"t": np.asarray(stats.times, dtype=float), "mean_G": np.asarray(stats.mean, dtype=float),
            "stderr_G": np.asarray(stats.stderr, dtype=float)}
    if analytic is not None:
        a = np.asarray(analytic, dtype=float)
        if a.shape != cols["t"].shape:
            raise ValueError("analytic column length differs from the time grid")
        cols[ANALYTIC_COLUMN] = a
    meta = {
        "label": spec.label if spec is not None else "",
        "master_seed": int(stats.master_seed),
        "spec_hash": stats.spec_hash,
        "build_id": build_id(),
        "realizations": int(stats.count),
    }
    if spec is not None:
        from .runspec_io import runspec_to_document
        meta["spec"] = runspec_to_document(spec)
    return CurveTable(cols, meta)


def _csv_text(table: CurveTable) -> str:
    out = io.StringIO()
    out.write(f"# {FORMAT_NAME} v{FORMAT_VERSION}\n")
    for key in ("label", "master_seed", "spec_hash", "build_id", "realizations"):
        out.write(f"# {key}: {table.metadata.get(key, '')}\n")
    names = list(table.columns)
    out.write(",".join(names) + "\n")
    data = np.column_stack([table.columns[n] for n in names])
    for row in data:
        out.write(",".join("%.17g" % v for v in row) + "\n")
    return out.getvalue()


def _json_text(table: CurveTable) -> str:
    doc = {"format": FORMAT_NAME, "version": FORMAT_VERSION, "metadata": table.metadata,
           "columns": {k: v.tolist() for k, v in table.columns.items()}}
    return json.dumps(doc, indent=1) + "\n"


def export_curve(stats, path, fmt: str | None = None, analytic=None, spec=None) -> Path:
    """Write ``stats`` (and optionally an analytic column) as CSV or JSON.

    The format follows ``fmt`` or else the file suffix.
    """
    return write_table(curve_table(stats, analytic, spec), path, fmt)


def write_table(table: CurveTable, path, fmt: str | None = None) -> Path:
    path = Path(path)
    fmt = (fmt or path.suffix.lstrip(".") or "csv").lower()
    if fmt == "csv":
        text = _csv_text(table)
    elif fmt == "json":
        text = _json_text(table)
    else:
        raise ValueError(f"unknown export format {fmt!r}; expected csv or json")
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    return path


def load_curve(path) -> CurveTable:
    path = Path(path)
    text = path.read_text()
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        if doc.get("format") != FORMAT_NAME:
            raise ValueError(f"{path} is not a {FORMAT_NAME} file")
        return CurveTable({k: np.array(v, dtype=float) for k, v in doc["columns"].items()}, doc["metadata"])
    meta = {}
    lines = text.splitlines()
    k = 0
    while k < len(lines) and lines[k].startswith("#"):
        key, sep, val = lines[k][1:].strip().partition(": ")
        if sep:
            meta[key] = val
        k += 1
    if k >= len(lines):
        raise ValueError(f"{path} has no header row")
    names = lines[k].split(",")
    rows = [list(map(float, ln.split(","))) for ln in lines[k + 1:] if ln]
    data = np.array(rows, dtype=float).reshape(-1, len(names))
    for key in ("master_seed", "realizations"):
        if key in meta:
            meta[key] = int(meta[key])
    return CurveTable({n: data[:, i].copy() for i, n in enumerate(names)}, meta)

