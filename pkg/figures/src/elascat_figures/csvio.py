"""Readers for the solver's delimited outputs.

Every file starts with a ``#`` comment header (tool version and config hash)
followed by a column-name line.
"""

import os

import numpy as np


class FigureInputError(Exception):
    """Missing or inconsistent input file."""


def read_columns(path):
    """CSV into a dict of float arrays (non-numeric columns left as strings)."""
    if not os.path.exists(path):
        raise FigureInputError(f"input file not found: {path}")
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if not ln.startswith("#")]
    if not lines:
        raise FigureInputError(f"empty input file: {path}")
    names = lines[0].split(",")
    rows = [ln.split(",") for ln in lines[1:] if ln]
    if not rows:
        raise FigureInputError(f"no data rows in {path}")
    cols = {}
    for i, name in enumerate(names):
        values = [r[i] for r in rows]
        try:
            cols[name] = np.array([float(v) for v in values])
        except ValueError:
            cols[name] = np.array(values)
    return cols


def read_field(path):
    """(x1, x2, lambda_star) rows into sorted plaid arrays (X1, X2, V)."""
    cols = read_columns(path)
    for key in ("x1", "x2", "lambda_star"):
        if key not in cols:
            raise FigureInputError(f"{path} lacks column {key!r}")
    x1 = np.unique(cols["x1"])
    x2 = np.unique(cols["x2"])
    if len(x1) * len(x2) != len(cols["x1"]):
        raise FigureInputError(f"{path} is not a full tensor grid")
    order = np.lexsort((cols["x2"], cols["x1"]))
    V = cols["lambda_star"][order].reshape(len(x1), len(x2))
    return x1, x2, V


def same_grid(a, b, tol=1e-12):
    xa1, xa2, _ = a
    xb1, xb2, _ = b
    return (len(xa1) == len(xb1) and len(xa2) == len(xb2)
            and np.abs(xa1 - xb1).max() <= tol
            and np.abs(xa2 - xb2).max() <= tol)
