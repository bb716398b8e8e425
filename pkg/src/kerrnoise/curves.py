"""Sampled curves and the flat-file formats shared by every command."""
from __future__ import annotations

import hashlib
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

FLOAT_FMT = "%.17g"


@dataclass
class SampledCurve:
    """Values on a uniform grid (time, or frequency detuning from omega_ac)."""

    grid: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)
    imag_residue: np.ndarray | None = None

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values)
        if self.grid.ndim != 1 or self.grid.shape != self.values.shape:
            raise ValueError("grid and values must be 1-D arrays of equal length")
        if self.grid.size > 1:
            steps = np.diff(self.grid)
            if np.any(steps <= 0):
                raise ValueError("grid must be strictly increasing")
            # linspace rounding scales with |grid|, not with the step
            slack = 1e-12 * steps.max() + 8 * np.finfo(float).eps * np.max(np.abs(self.grid))
            if np.ptp(steps) > slack:
                raise ValueError("grid must be uniform")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("curve values must be finite")

    def to_csv(self, path=None, header: dict | None = None) -> str:
        cols = {"abscissa": self.grid, "value": np.real(self.values)}
        if np.iscomplexobj(self.values):
            cols["value_imag"] = np.imag(self.values)
        if self.imag_residue is not None:
            cols["imag_residue"] = self.imag_residue
        text = format_table(cols, header={**self.meta, **(header or {})})
        if path is not None:
            Path(path).write_text(text)
        return text


def params_hash(d: dict) -> str:
    blob = json.dumps(d, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    return FLOAT_FMT % v


def format_table(columns: dict, header: dict | None = None) -> str:
    """CSV text with '#'-prefixed JSON header lines and 17-digit floats."""
    buf = io.StringIO()
    for key, val in (header or {}).items():
        buf.write(f"# {key}: {json.dumps(val, sort_keys=True, default=_json_default)}\n")
    names = list(columns)
    buf.write(",".join(names) + "\n")
    arrays = [np.asarray(columns[n]) for n in names]
    n = len(arrays[0]) if arrays else 0
    for i in range(n):
        buf.write(",".join(_fmt(a[i]) for a in arrays) + "\n")
    return buf.getvalue()


def format_matrix(matrix: np.ndarray, header: dict | None = None) -> str:
    buf = io.StringIO()
    for key, val in (header or {}).items():
        buf.write(f"# {key}: {json.dumps(val, sort_keys=True, default=_json_default)}\n")
    for row in np.atleast_2d(matrix):
        buf.write(",".join(FLOAT_FMT % v for v in row) + "\n")
    return buf.getvalue()


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o)}")


def read_table(path_or_text) -> tuple[dict, dict]:
    """Parse a file written by :func:`format_table`; returns (header, columns)."""
    text = _text(path_or_text)
    header, body = _split_header(text)
    lines = [ln for ln in body if ln.strip()]
    if not lines:
        return header, {}
    names = lines[0].split(",")
    rows = [ln.split(",") for ln in lines[1:]]
    cols = {}
    for j, name in enumerate(names):
        raw = [r[j] for r in rows]
        try:
            cols[name] = np.array([float(x) for x in raw])
        except ValueError:
            cols[name] = np.array(raw, dtype=object)
    return header, cols


def read_matrix(path_or_text) -> tuple[dict, np.ndarray]:
    text = _text(path_or_text)
    header, body = _split_header(text)
    rows = [[float(x) for x in ln.split(",")] for ln in body if ln.strip()]
    return header, np.array(rows)


def _text(path_or_text) -> str:
    if isinstance(path_or_text, Path) or (isinstance(path_or_text, str) and "\n" not in path_or_text):
        return Path(path_or_text).read_text()
    return path_or_text


def _split_header(text: str):
    header, body = {}, []
    for ln in text.splitlines():
        if ln.startswith("#"):
            key, _, val = ln[1:].strip().partition(":")
            try:
                header[key.strip()] = json.loads(val)
            except json.JSONDecodeError:
                header[key.strip()] = val.strip()
        else:
            body.append(ln)
    return header, body
