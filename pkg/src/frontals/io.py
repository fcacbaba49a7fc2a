"""CSV and JSON serialization for curves, normal-framed curves, curvature
pairs, and mate results.

Numbers are written with the shortest round-trip decimal representation, so
export followed by re-ingestion reproduces values exactly and identical
inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

CURVE_HEADER = ["t", "x", "y"]
FRONTAL_HEADER = ["t", "x", "y", "nx", "ny"]
PAIR_HEADER = ["t", "ell", "beta"]
MATE_HEADER = ["t", "x", "y", "nx", "ny", "lambda", "ell_bar", "beta_bar"]


def _fmt(v) -> str:
    return repr(float(v))


def _write_rows(path, header, columns) -> None:
    rows = zip(*[np.asarray(c, dtype=float) for c in columns])
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_curve_csv(path, ts, points) -> None:
    points = np.asarray(points, dtype=float)
    _write_rows(path, CURVE_HEADER, [ts, points[:, 0], points[:, 1]])


def write_frontal_csv(path, ts, points, normals) -> None:
    points = np.asarray(points, dtype=float)
    normals = np.asarray(normals, dtype=float)
    _write_rows(
        path, FRONTAL_HEADER, [ts, points[:, 0], points[:, 1], normals[:, 0], normals[:, 1]]
    )


def write_pair_csv(path, pair) -> None:
    _write_rows(path, PAIR_HEADER, [pair.grid, pair.ell, pair.beta])


def write_mate_csv(path, mp) -> None:
    ts = mp.lam.grid
    pts = mp.mate.gamma.position(ts)
    nus = mp.mate.nu(ts)
    mc = mp.mate_curvature
    _write_rows(
        path,
        MATE_HEADER,
        [ts, pts[:, 0], pts[:, 1], nus[:, 0], nus[:, 1], mp.lam.lam, mc.ell, mc.beta],
    )


def read_csv_columns(path):
    """(header, dict of column arrays) from a numeric CSV with a header row."""
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        rows = [row for row in reader if row]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    data = np.array([[float(v) for v in row] for row in rows])
    return header, {name: data[:, i] for i, name in enumerate(header)}


def read_curve_csv(path):
    """(ts, points, normals_or_None) from a t,x,y or t,x,y,nx,ny file."""
    header, cols = read_csv_columns(path)
    if header[:3] != CURVE_HEADER:
        raise ValueError(f"{path}: expected header starting with t,x,y, got {header}")
    ts = cols["t"]
    points = np.stack((cols["x"], cols["y"]), axis=-1)
    if header[:5] == FRONTAL_HEADER:
        return ts, points, np.stack((cols["nx"], cols["ny"]), axis=-1)
    return ts, points, None


def report_to_json(report) -> str:
    """Serialize a RunReport-shaped object to the stable JSON layout."""
    payload = {
        "checks": {
            name: {
                "max_residual": float(c["max_residual"]),
                "tolerance": float(c["tolerance"]),
                "pass": bool(c["pass"]),
            }
            for name, c in report.checks.items()
        },
        "cusps": [{"t0": float(c.t0), "kind": c.kind} for c in report.cusps],
        "inflections": [float(t) for t in report.inflections],
        "wall_time": float(report.wall_time),
    }
    return json.dumps(payload, indent=2, sort_keys=True)


def write_text(path, text: str) -> None:
    Path(path).write_text(text)
