"""CSV tables and JSON metadata sidecars.

Every table has a header row; floats are written with ``repr`` so a reread
reproduces the in-memory values bit for bit.  Readers check the header and
report the line and column of the first malformed field.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import SchemaError
from .sampling import QuasiprobEstimate
from .states import QuadratureData

QUADRATURE_HEADER = ("index", "phi", "x")
DISPLACEMENT_HEADER = ("index", "re_gamma", "im_gamma")
COUNTS_HEADER = ("alpha_re", "alpha_im", "n")
ESTIMATE_HEADER = ("re_alpha", "im_alpha", "p_w", "stderr", "significance")
SWEEP_HEADER = ("gamma_c", "bound")

try:
    from importlib.metadata import version as _pkg_version

    VERSION = _pkg_version("regp")
except Exception:  # running from a source tree without installed metadata
    VERSION = "0.1.0"


def fmt_float(x) -> str:
    """Shortest string that round-trips the float exactly."""
    return repr(float(x))


def write_table(path, header: Sequence[str], columns: Sequence[Sequence], formats: Sequence[Callable]):
    """Write equal-length columns as CSV, one formatter per column."""
    path = Path(path)
    n = len(columns[0]) if columns else 0
    if any(len(c) != n for c in columns):
        raise ValueError("columns must have equal length")
    with path.open("w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(header)
        for row in zip(*columns):
            out.writerow([f(v) for f, v in zip(formats, row)])
    return path


def read_table(path, header: Sequence[str], parsers: Sequence[Callable]) -> list[list]:
    """Read a CSV written by :func:`write_table`, returning parsed columns.

    Raises
    ------
    SchemaError
        Header mismatch, wrong field count or an unparsable field.
    """
    path = Path(path)
    cols = [[] for _ in header]
    with path.open(newline="") as fh:
        rows = csv.reader(fh)
        first = next(rows, None)
        if first is None:
            raise SchemaError("empty file, expected a header row", path=path, line=1)
        if tuple(h.strip() for h in first) != tuple(header):
            raise SchemaError(f"header {first} does not match {list(header)}", path=path, line=1)
        for lineno, row in enumerate(rows, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise SchemaError(f"expected {len(header)} fields, got {len(row)}", path=path, line=lineno)
            for j, (name, parse, field) in enumerate(zip(header, parsers, row)):
                try:
                    cols[j].append(parse(field))
                except ValueError:
                    raise SchemaError(f"cannot parse {field!r}", path=path, line=lineno, column=name) from None
    return cols


def _parse_int(s: str) -> int:
    return int(s)


def _parse_float(s: str) -> float:
    return float(s)


def _parse_count(s: str) -> int:
    n = int(s)
    if n < 0:
        raise ValueError("negative count")
    return n


def _parse_phase(s: str) -> float:
    phi = float(s)
    if not 0.0 <= phi < 2 * math.pi:
        raise ValueError("phase outside [0, 2 pi)")
    return phi


def write_quadratures(path, data: QuadratureData):
    idx = range(len(data))
    return write_table(path, QUADRATURE_HEADER, [idx, data.phi, data.x], [str, fmt_float, fmt_float])


def read_quadratures(path) -> QuadratureData:
    _, phi, x = read_table(path, QUADRATURE_HEADER, [_parse_int, _parse_phase, _parse_float])
    return QuadratureData(np.array(x, dtype=float), np.array(phi, dtype=float))


def write_displacements(path, gamma):
    gamma = np.asarray(gamma, dtype=complex)
    return write_table(path, DISPLACEMENT_HEADER, [range(gamma.size), gamma.real, gamma.imag],
                       [str, fmt_float, fmt_float])


def read_displacements(path) -> np.ndarray:
    _, re, im = read_table(path, DISPLACEMENT_HEADER, [_parse_int, _parse_float, _parse_float])
    return np.array(re, dtype=float) + 1j * np.array(im, dtype=float)


def write_counts(path, alphas, counts):
    """One row per event: the displacement it was recorded at and its photon count."""
    alphas = np.atleast_1d(np.asarray(alphas, dtype=complex))
    if len(alphas) != len(counts):
        raise ValueError("need one count array per displacement")
    a_col, n_col = [], []
    for a, c in zip(alphas, counts):
        c = np.asarray(c, dtype=np.int64)
        a_col.extend([a] * c.size)
        n_col.extend(c.tolist())
    a_col = np.array(a_col, dtype=complex)
    return write_table(path, COUNTS_HEADER, [a_col.real, a_col.imag, n_col], [fmt_float, fmt_float, str])


def read_counts(path) -> tuple[np.ndarray, list[np.ndarray]]:
    """Group counts by displacement, in order of first appearance."""
    re, im, n = read_table(path, COUNTS_HEADER, [_parse_float, _parse_float, _parse_count])
    groups: dict[complex, list[int]] = {}
    for a, k in zip(np.array(re) + 1j * np.array(im), n):
        groups.setdefault(complex(a), []).append(k)
    alphas = np.array(list(groups), dtype=complex)
    return alphas, [np.array(v, dtype=np.int64) for v in groups.values()]


def write_estimate(path, est: QuasiprobEstimate):
    g = est.grid.ravel()
    return write_table(path, ESTIMATE_HEADER,
                       [g.real, g.imag, est.value.ravel(), est.stderr.ravel(), est.significance.ravel()],
                       [fmt_float] * 5)


def read_estimate(path) -> QuasiprobEstimate:
    re, im, val, err, _ = read_table(path, ESTIMATE_HEADER, [_parse_float] * 5)
    return QuasiprobEstimate(np.array(re) + 1j * np.array(im), val, err)


def write_sweep(path, gamma_c, bound):
    return write_table(path, SWEEP_HEADER, [gamma_c, bound], [fmt_float, fmt_float])


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def write_sidecar(path, config: dict, seed=None, wall_time: float | None = None, extra: dict | None = None) -> Path:
    """Write ``<path>.json`` with the config, seed, package version and wall time."""
    meta = {"config": config, "seed": seed, "version": VERSION, "wall_time_s": wall_time}
    if extra:
        meta.update(extra)
    side = sidecar_path(path)
    side.write_text(json.dumps(meta, indent=2, sort_keys=True, default=_json_default) + "\n")
    return side


def read_sidecar(path) -> dict:
    return json.loads(sidecar_path(path).read_text())


def _json_default(obj):
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialise {type(obj).__name__}")
