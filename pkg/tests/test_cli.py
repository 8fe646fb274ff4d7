"""Command-line driver: outputs, determinism, exit codes."""

import json
import os

import numpy as np
import pytest

from elascat.cli import main
from elascat.config import load_config
from elascat.runner import read_csv, read_far_field

SMALL_CONFIG = """\
material: {lam: 2.0, mu: 1.0, rho: 1.0}
omega: 0.1
geometry: {n: 16, N: 15}
basis: {K: 3}
incidents: {mode: p, angles_deg: [0, 90, 180, 270]}
farfield: {directions: 16}
noise: {delta: 0.03, seed: 7}
inversion: {lambda0: 0.5, alpha0: 0.001, alpha_ratio: 0.5, iterations: 2}
target: {preset: example1}
output: {dir: out}
"""


@pytest.fixture(scope="module")
def config_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("cfg") / "small.yaml"
    path.write_text(SMALL_CONFIG)
    return str(path)


@pytest.fixture(scope="module")
def forward_dir(config_path, tmp_path_factory):
    out = str(tmp_path_factory.mktemp("fw"))
    assert main(["forward", "--config", config_path, "--out", out]) == 0
    return out


def test_forward_outputs(forward_dir, config_path):
    for name in ("grid.csv", "boundary.csv", "basis.csv", "interior.csv",
                 "farfield.csv"):
        assert os.path.exists(os.path.join(forward_dir, name))
    cfg = load_config(config_path)
    grid = read_csv(os.path.join(forward_dir, "grid.csv"))
    assert len(grid["k"]) == cfg.N ** 2
    ff = read_csv(os.path.join(forward_dir, "farfield.csv"))
    assert len(ff["angle"]) == 4 * 2 * cfg.directions
    bdry = read_csv(os.path.join(forward_dir, "boundary.csv"))
    assert len(bdry["t"]) == 2 * cfg.n


def test_forward_header_line(forward_dir, config_path):
    cfg = load_config(config_path)
    with open(os.path.join(forward_dir, "farfield.csv")) as fh:
        first = fh.readline()
    assert first.startswith("# elascat ")
    assert cfg.config_hash in first


def test_forward_deterministic(forward_dir, config_path, tmp_path):
    out2 = str(tmp_path / "fw2")
    assert main(["forward", "--config", config_path, "--out", out2]) == 0
    for name in ("farfield.csv", "grid.csv", "interior.csv"):
        a = open(os.path.join(forward_dir, name), "rb").read()
        b = open(os.path.join(out2, name), "rb").read()
        assert a == b


def test_zero_contrast_preset(tmp_path):
    cfg = SMALL_CONFIG.replace("target: {preset: example1}",
                               "target: {constant: 2.0}")
    path = tmp_path / "zero.yaml"
    path.write_text(cfg)
    out = str(tmp_path / "out")
    assert main(["forward", "--config", str(path), "--out", out]) == 0
    ff = read_csv(os.path.join(out, "farfield.csv"))
    mags = [abs(float(v)) for col in ("re_u1", "im_u1", "re_u2", "im_u2")
            for v in ff[col]]
    assert max(mags) < 1e-12


@pytest.fixture(scope="module")
def synth_dir(config_path, tmp_path_factory):
    out = str(tmp_path_factory.mktemp("sy"))
    assert main(["synth", "--config", config_path, "--out", out]) == 0
    return out


def test_synth_noise_level(synth_dir, config_path):
    cfg = load_config(config_path)
    clean = read_far_field(os.path.join(synth_dir, "farfield.csv"), cfg)
    noisy = read_far_field(os.path.join(synth_dir, "farfield_noisy.csv"), cfg)
    rel = np.linalg.norm(noisy - clean) / np.linalg.norm(clean)
    assert rel == pytest.approx(0.03, abs=1e-12)
    summary = json.load(open(os.path.join(synth_dir, "noise.json")))
    assert summary["relative_perturbation"] == pytest.approx(0.03, abs=1e-14)


def test_synth_zero_delta_and_seeds(config_path, tmp_path):
    base = open(config_path).read()
    p0 = tmp_path / "d0.yaml"
    p0.write_text(base.replace("delta: 0.03", "delta: 0.0"))
    out0 = str(tmp_path / "d0")
    assert main(["synth", "--config", str(p0), "--out", out0]) == 0
    a = open(os.path.join(out0, "farfield.csv"), "rb").read()
    b = open(os.path.join(out0, "farfield_noisy.csv"), "rb").read()
    assert a.split(b"\n", 1)[1] == b.split(b"\n", 1)[1]
    # different seeds differ in the noisy file, not the clean one
    out1 = str(tmp_path / "s1")
    out2 = str(tmp_path / "s2")
    assert main(["synth", "--config", config_path, "--out", out1,
                 "--seed", "1"]) == 0
    assert main(["synth", "--config", config_path, "--out", out2,
                 "--seed", "2"]) == 0
    c1 = open(os.path.join(out1, "farfield.csv")).readlines()[1:]
    c2 = open(os.path.join(out2, "farfield.csv")).readlines()[1:]
    assert c1 == c2
    n1 = open(os.path.join(out1, "farfield_noisy.csv")).readlines()[1:]
    n2 = open(os.path.join(out2, "farfield_noisy.csv")).readlines()[1:]
    assert n1 != n2


def test_invert_runs_and_logs(config_path, synth_dir, tmp_path):
    out = str(tmp_path / "inv")
    rc = main(["invert", "--config", config_path,
               "--data", os.path.join(synth_dir, "farfield.csv"),
               "--out", out])
    assert rc == 0
    logs = read_csv(os.path.join(out, "iterations.csv"))
    residuals = [float(v) for v in logs["residual"]]
    assert len(residuals) == 3          # two iterations plus the final state
    assert residuals[-1] < residuals[0]
    for name in ("exact_field.csv", "initial_field.csv",
                 "recon_iter_00.csv", "recon_iter_02.csv"):
        assert os.path.exists(os.path.join(out, name))


def test_invert_shape_mismatch(config_path, synth_dir, tmp_path):
    bad_cfg = tmp_path / "bad.yaml"
    bad_cfg.write_text(open(config_path).read().replace(
        "directions: 16", "directions: 32"))
    rc = main(["invert", "--config", str(bad_cfg),
               "--data", os.path.join(synth_dir, "farfield.csv"),
               "--out", str(tmp_path / "o")])
    assert rc == 2


def test_invert_self_data_fixed_point(tmp_path, config_path, synth_dir):
    """Data from the forward map of the initial guess: first update vanishes."""
    cfg = load_config(config_path)
    from elascat.basis import fit_constant
    from elascat.inversion import forward_map
    from elascat.runner import build_setup, write_far_field

    setup = build_setup(cfg)
    init = fit_constant(cfg.lambda0, cfg.K, setup.grid.flat_nodes)
    data = forward_map(init, setup, cfg.lam)
    path = tmp_path / "self.csv"
    write_far_field(str(path), data, cfg)
    out = str(tmp_path / "inv_self")
    assert main(["invert", "--config", config_path, "--data", str(path),
                 "--out", out]) == 0
    logs = read_csv(os.path.join(out, "iterations.csv"))
    assert float(logs["residual"][0]) < 1e-12


def test_analyze_symbol_cli(capsys):
    rc = main(["analyze-symbol", "--lam", "1", "--mu", "1",
               "--kappa-star", "2", "--mu-star", "2"])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert out["alpha"] == pytest.approx(17.0 / 12.0)
    assert out["beta"] == pytest.approx(1.0 / 3.0)
    assert out["class"] == "FullRank"
    assert out["det_numeric_max_dev"] <= 1e-10


def test_analyze_symbol_degenerate(capsys):
    # kappa* = kappa - mu (lam+2mu)/(lam+3mu), mu* = mu + 2 mu (lam+2mu)/(lam+mu)
    rc = main(["analyze-symbol", "--lam", "1", "--mu", "1",
               "--kappa-star", str(4.0 / 3.0 - 0.75), "--mu-star", "4.0"])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert out["class"] == "ZeroTensor"
    assert abs(out["det_closed"]) < 1e-15


def test_analyze_symbol_singular_contrast(capsys):
    rc = main(["analyze-symbol", "--lam", "1", "--mu", "1",
               "--kappa-star", str(4.0 / 3.0), "--mu-star", "2"])
    assert rc == 3
    out = json.loads(capsys.readouterr().out)
    assert out["error"] == "SingularContrast"


def test_eshelby_static_cli(tmp_path):
    out = str(tmp_path / "esh")
    rc = main(["eshelby-static", "--dkappa", "0.6666666666666666",
               "--dmu", "1.0", "--resolution", "32", "--radius", "0.3",
               "--out", out])
    assert rc == 0
    rows = read_csv(os.path.join(out, "eigenstrain.csv"))
    assert len(rows["h11"]) == 32 * 32
    summary = json.load(open(os.path.join(out, "eigenstrain.json")))
    assert summary["relative_residual"] <= 1e-8


def test_config_error_exit_code(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("material: {lam: 1.0, mu: -1.0}\n")
    assert main(["forward", "--config", str(bad), "--out", str(tmp_path)]) == 2
    assert main(["forward", "--config", str(tmp_path / "missing.yaml"),
                 "--out", str(tmp_path)]) == 2
