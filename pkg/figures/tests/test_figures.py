"""Figure scripts: rendering, determinism, input validation.

The fixtures write the CSV schemas directly; the solver package is not
imported anywhere here.
"""

import hashlib
import os

import numpy as np
import pytest

from elascat_figures.csvio import FigureInputError, read_field
from elascat_figures.reconstruction_figure import main as recon_main
from elascat_figures.setup_figure import main as setup_main

HEADER = "# elascat 0.1.0 config=deadbeef\n"


def write_csv(path, columns, rows):
    with open(path, "w") as fh:
        fh.write(HEADER)
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.17g}" if isinstance(v, float) else str(v)
                              for v in row) + "\n")


def make_setup_dir(base, n=8, N=9, K=3):
    os.makedirs(base, exist_ok=True)
    xs = np.linspace(-1.0, 1.0, N)
    rows = []
    for k in range(N):
        for j in range(N):
            inside = int(xs[k] ** 2 + xs[j] ** 2 <= 1.0)
            rows.append((k + 1, j + 1, float(xs[k]), float(xs[j]), inside))
    write_csv(os.path.join(base, "grid.csv"),
              ["k", "j", "x1", "x2", "inside"], rows)
    t = np.linspace(0.0, 2.0 * np.pi, 2 * n, endpoint=False)
    rows = [(j, float(t[j]), float(np.cos(t[j])), float(np.sin(t[j])),
             float(np.cos(t[j])), float(np.sin(t[j])), 1.0)
            for j in range(2 * n)]
    write_csv(os.path.join(base, "boundary.csv"),
              ["j", "t", "x1", "x2", "nx1", "nx2", "jacobian"], rows)
    xb = np.linspace(-1.0, 1.0, 41)
    centers = np.linspace(-1.0, 1.0, K)
    rows = [(float(x), *(float(np.exp(-2.0 * (x - z) ** 2)) for z in centers))
            for x in xb]
    write_csv(os.path.join(base, "basis.csv"),
              ["x"] + [f"g{i + 1}" for i in range(K)], rows)
    return base


def field_rows(values, xs):
    rows = []
    for k, x1 in enumerate(xs):
        for j, x2 in enumerate(xs):
            rows.append((float(x1), float(x2), float(values[k, j])))
    return rows


def make_invert_dir(base, N=9, bump=0.7):
    os.makedirs(base, exist_ok=True)
    xs = np.linspace(-1.0, 1.0, N)
    X1, X2 = np.meshgrid(xs, xs, indexing="ij")
    exact = np.exp(-2.0 * (X1**2 + X2**2))
    write_csv(os.path.join(base, "exact_field.csv"),
              ["x1", "x2", "lambda_star"], field_rows(exact, xs))
    write_csv(os.path.join(base, "initial_field.csv"),
              ["x1", "x2", "lambda_star"], field_rows(0.5 + 0.0 * X1, xs))
    for it, scale in ((0, 0.4), (1, bump)):
        write_csv(os.path.join(base, f"recon_iter_{it:02d}.csv"),
                  ["x1", "x2", "lambda_star"], field_rows(scale * exact, xs))
    return base


def file_hash(path):
    return hashlib.sha256(open(path, "rb").read()).hexdigest()


def test_plot_setup_renders_and_is_deterministic(tmp_path):
    src = make_setup_dir(str(tmp_path / "in"))
    out1 = str(tmp_path / "a.png")
    out2 = str(tmp_path / "b.png")
    assert setup_main(["--in", src, "--out", out1]) == 0
    assert setup_main(["--in", src, "--out", out2]) == 0
    assert os.path.getsize(out1) > 0
    assert file_hash(out1) == file_hash(out2)


def test_plot_setup_missing_file(tmp_path):
    empty = tmp_path / "empty"
    empty.mkdir()
    out = str(tmp_path / "x.png")
    assert setup_main(["--in", str(empty), "--out", out]) == 1
    assert not os.path.exists(out)


def test_plot_reconstruction_renders_and_is_deterministic(tmp_path):
    run = make_invert_dir(str(tmp_path / "run"))
    out1 = str(tmp_path / "p1.png")
    out2 = str(tmp_path / "p2.png")
    assert recon_main(["--in", run, "--out", out1]) == 0
    assert recon_main(["--in", run, "--noisy-dir", run, "--out", out2]) == 0
    assert file_hash(out1) == file_hash(out2)   # same inputs, same bytes


def test_plot_reconstruction_identical_inputs(tmp_path):
    """All four panels drawn from one field render without error."""
    run = str(tmp_path / "run")
    os.makedirs(run)
    xs = np.linspace(-1.0, 1.0, 7)
    X1, X2 = np.meshgrid(xs, xs, indexing="ij")
    f = np.exp(-(X1**2 + X2**2))
    for name in ("exact_field.csv", "initial_field.csv", "recon_iter_00.csv"):
        write_csv(os.path.join(run, name), ["x1", "x2", "lambda_star"],
                  field_rows(f, xs))
    out = str(tmp_path / "same.png")
    assert recon_main(["--in", run, "--out", out]) == 0
    assert os.path.getsize(out) > 0


def test_plot_reconstruction_grid_mismatch(tmp_path):
    run = make_invert_dir(str(tmp_path / "run"))
    other = make_invert_dir(str(tmp_path / "other"), N=7)
    out = str(tmp_path / "x.png")
    rc = recon_main(["--in", run, "--noisy-dir", other, "--out", out])
    assert rc == 1
    assert not os.path.exists(out)


def test_read_field_roundtrip(tmp_path):
    xs = np.linspace(-1.0, 1.0, 5)
    X1, X2 = np.meshgrid(xs, xs, indexing="ij")
    f = X1 + 10.0 * X2
    path = str(tmp_path / "f.csv")
    write_csv(path, ["x1", "x2", "lambda_star"], field_rows(f, xs))
    x1, x2, V = read_field(path)
    assert np.allclose(x1, xs)
    assert np.allclose(V, f)
    with pytest.raises(FigureInputError):
        read_field(str(tmp_path / "missing.csv"))
