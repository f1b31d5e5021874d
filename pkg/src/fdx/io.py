"""Delimited file formats for the command line tools.

All files are comma-separated with a header row, UTF-8, ``.`` decimal
point.  List-valued cells (CDF supports and cumulative values) join their
entries with ``;`` so they stay inside one CSV field.  Floats are written
with ``repr`` so a read back is bit-exact.

Formats
-------
p-values        id,pvalue
weights         id,weight
counts          id,x1,n1,x2,n2
CDF file        id,support,cum           (support/cum are ;-joined lists)
                id,pvalue,support,cum    (variant written by `fdx fisher-cdf`)
results         id,pvalue,adjusted_pvalue,rejected
curve           procedure,zeta,rejections
simulation      one row per scenario x procedure (see SIM_FIELDS)
"""
from __future__ import annotations

import csv

import numpy as np

from .distributions import StepCdf

__all__ = [
    "DataFormatError",
    "read_pvalues",
    "read_weights",
    "read_counts",
    "read_cdf_file",
    "write_results",
    "write_cdf_file",
    "write_curve",
    "write_sim_rows",
    "read_sim_config",
    "SIM_FIELDS",
]

SIM_FIELDS = [
    "m",
    "m1",
    "m2",
    "m3",
    "q3",
    "n_per_group",
    "alpha",
    "zeta",
    "replicates",
    "seed",
    "procedure",
    "mean_tdp",
    "se_tdp",
    "exceedance",
    "se_exceedance",
    "mean_rejections",
]


class DataFormatError(Exception):
    """Malformed or inconsistent input data (CLI exit code 2)."""


def _open_reader(path):
    return open(path, "r", encoding="utf-8", newline="")


def _read_table(path, expected_header):
    try:
        fh = _open_reader(path)
    except OSError as exc:
        raise DataFormatError(f"{path}: {exc.strerror or exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file") from None
        if [h.strip() for h in header] != list(expected_header):
            raise DataFormatError(
                f"{path}: expected header {','.join(expected_header)!r}, "
                f"got {','.join(header)!r}"
            )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(expected_header):
                raise DataFormatError(
                    f"{path}:{lineno}: expected {len(expected_header)} fields, got {len(row)}"
                )
            rows.append((lineno, row))
        if not rows:
            raise DataFormatError(f"{path}: no data rows")
        return rows


def _parse_float(path, lineno, name, text, lo=None, hi=None):
    try:
        val = float(text)
    except ValueError:
        raise DataFormatError(f"{path}:{lineno}: {name} {text!r} is not a number") from None
    if not np.isfinite(val):
        raise DataFormatError(f"{path}:{lineno}: {name} must be finite")
    if lo is not None and val < lo or hi is not None and val > hi:
        raise DataFormatError(f"{path}:{lineno}: {name} {val!r} out of range")
    return val


def _parse_int(path, lineno, name, text, lo=0):
    try:
        val = int(text)
    except ValueError:
        raise DataFormatError(f"{path}:{lineno}: {name} {text!r} is not an integer") from None
    if val < lo:
        raise DataFormatError(f"{path}:{lineno}: {name} must be >= {lo}")
    return val


def read_pvalues(path):
    """-> (ids, pvalues array)."""
    ids, vals = [], []
    for lineno, row in _read_table(path, ("id", "pvalue")):
        ids.append(row[0])
        vals.append(_parse_float(path, lineno, "pvalue", row[1], 0.0, 1.0))
    return ids, np.array(vals)


def read_weights(path):
    """-> (ids, weights array)."""
    ids, vals = [], []
    for lineno, row in _read_table(path, ("id", "weight")):
        ids.append(row[0])
        vals.append(_parse_float(path, lineno, "weight", row[1], 0.0))
    return ids, np.array(vals)


def read_counts(path):
    """-> (ids, x1, n1, x2, n2 int arrays); validates x <= n per row."""
    ids = []
    cols = ([], [], [], [])
    for lineno, row in _read_table(path, ("id", "x1", "n1", "x2", "n2")):
        ids.append(row[0])
        vals = [
            _parse_int(path, lineno, name, cell)
            for name, cell in zip(("x1", "n1", "x2", "n2"), row[1:])
        ]
        if vals[0] > vals[1]:
            raise DataFormatError(f"{path}:{lineno}: x1 exceeds n1")
        if vals[2] > vals[3]:
            raise DataFormatError(f"{path}:{lineno}: x2 exceeds n2")
        if vals[1] + vals[3] < 1:
            raise DataFormatError(f"{path}:{lineno}: empty table")
        for c, v in zip(cols, vals):
            c.append(v)
    return ids, *(np.array(c, dtype=np.int64) for c in cols)


def _parse_list(path, lineno, name, text):
    try:
        return np.array([float(tok) for tok in text.split(";")])
    except ValueError:
        raise DataFormatError(
            f"{path}:{lineno}: {name} must be a ';'-separated list of numbers"
        ) from None


def read_cdf_file(path):
    """Read a step-CDF file -> (ids, cdfs, pvalues-or-None).

    Accepts both the plain 3-column format (id,support,cum) and the
    4-column variant produced by ``fdx fisher-cdf`` that carries the
    observed p-value per hypothesis.
    """
    try:
        with _open_reader(path) as fh:
            header = next(csv.reader(fh), None)
    except OSError as exc:
        raise DataFormatError(f"{path}: {exc.strerror or exc}") from exc
    if header is None:
        raise DataFormatError(f"{path}: empty file")
    header = [h.strip() for h in header]
    if header == ["id", "support", "cum"]:
        has_pvalue = False
    elif header == ["id", "pvalue", "support", "cum"]:
        has_pvalue = True
    else:
        raise DataFormatError(
            f"{path}: expected header 'id,support,cum' or 'id,pvalue,support,cum'"
        )
    ids, cdfs, pvals = [], [], []
    for lineno, row in _read_table(path, tuple(header)):
        ids.append(row[0])
        offset = 1
        if has_pvalue:
            pvals.append(_parse_float(path, lineno, "pvalue", row[1], 0.0, 1.0))
            offset = 2
        support = _parse_list(path, lineno, "support", row[offset])
        cum = _parse_list(path, lineno, "cum", row[offset + 1])
        try:
            cdfs.append(StepCdf(support, cum))
        except ValueError as exc:
            raise DataFormatError(f"{path}:{lineno}: {exc}") from None
    return ids, cdfs, (np.array(pvals) if has_pvalue else None)


def _fmt(x) -> str:
    return repr(float(x))


def write_results(path, ids, pvals, adjusted, rejected_mask):
    """Write the per-hypothesis results table."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "pvalue", "adjusted_pvalue", "rejected"])
        for i, hid in enumerate(ids):
            w.writerow(
                [
                    hid,
                    _fmt(pvals[i]),
                    _fmt(adjusted[i]),
                    "true" if rejected_mask[i] else "false",
                ]
            )


def write_cdf_file(path, ids, pvals, cdfs):
    """Write the fisher-cdf output (p-value plus step CDF per hypothesis)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "pvalue", "support", "cum"])
        for hid, pv, cdf in zip(ids, pvals, cdfs):
            w.writerow(
                [
                    hid,
                    _fmt(pv),
                    ";".join(_fmt(v) for v in cdf.support),
                    ";".join(_fmt(v) for v in cdf.cum),
                ]
            )


def write_curve(path, rows):
    """Write (procedure, zeta, rejections) curve rows."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["procedure", "zeta", "rejections"])
        for proc, zeta, count in rows:
            w.writerow([proc, _fmt(zeta), int(count)])


def write_sim_rows(path, rows):
    """Write scenario summary rows (one per scenario x procedure)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SIM_FIELDS)
        for row in rows:
            w.writerow(
                [
                    row[f] if f in ("procedure",) else
                    (_fmt(row[f]) if isinstance(row[f], float) else row[f])
                    for f in SIM_FIELDS
                ]
            )


_SIM_CONFIG_TYPES = {
    "m": int,
    "m1": int,
    "m2": int,
    "m3": int,
    "q3": float,
    "n_per_group": int,
    "alpha": float,
    "zeta": float,
    "replicates": int,
    "seed": int,
}


def read_sim_config(path):
    """Parse a ``key = value`` scenario config -> (kwargs, procedures or None).

    Recognized keys mirror SimConfig plus an optional ``procedures`` list
    (comma-separated).  ``m2`` may be omitted; unknown keys are errors.
    """
    kwargs = {}
    procedures = None
    try:
        fh = _open_reader(path)
    except OSError as exc:
        raise DataFormatError(f"{path}: {exc.strerror or exc}") from exc
    with fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DataFormatError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key == "procedures":
                procedures = tuple(tok.strip() for tok in value.split(",") if tok.strip())
                continue
            if key not in _SIM_CONFIG_TYPES:
                raise DataFormatError(f"{path}:{lineno}: unknown config key {key!r}")
            if key in kwargs:
                raise DataFormatError(f"{path}:{lineno}: duplicate key {key!r}")
            try:
                kwargs[key] = _SIM_CONFIG_TYPES[key](value)
            except ValueError:
                raise DataFormatError(
                    f"{path}:{lineno}: bad value {value!r} for {key!r}"
                ) from None
    missing = {"m", "m1", "m3", "q3", "replicates", "seed"} - set(kwargs)
    if missing:
        raise DataFormatError(f"{path}: missing config keys: {', '.join(sorted(missing))}")
    if "m2" not in kwargs:
        kwargs["m2"] = kwargs["m"] - kwargs["m1"] - kwargs["m3"]
    return kwargs, procedures
