"""Experiment drivers behind the CLI subcommands.

All delimited output starts with a comment header carrying the tool version
and the sha256 hash of the resolved configuration; numbers are written with
17 significant digits so reruns are byte-identical.
"""

import hashlib
import json
import os

import numpy as np

from . import __version__
from .basis import LambdaField, basis_centers, fit_constant, width_exponent
from .config import ExperimentConfig
from .errors import ConfigError, Diverged
from .eshelby import (
    ContrastModuli,
    alpha_beta,
    classify_invertibility,
    disc_contrast,
    solve_periodic_eshelby,
    symbol_det_closed,
    symbol_matrix,
)
from .forward import add_noise_vector
from .greens import static_coeffs
from .inversion import (
    NewtonOptions,
    ScatteringSetup,
    function_contrast,
    lambda_contrast,
    newton_iterate,
)
from .tensors import IsotropicMaterial

FLOAT_FMT = "%.17g"


def preset_field(name: str):
    """Analytic target field and gradient for a named preset."""
    if name == "example1":
        def func(pts):
            pts = np.asarray(pts)
            return np.exp(-np.pi * (pts[..., 0] ** 2 + pts[..., 1] ** 2))

        def grad(pts):
            pts = np.asarray(pts)
            return -2.0 * np.pi * pts * func(pts)[..., None]
        return func, grad
    if name == "example2":
        center = np.array([0.5, 0.0])

        def func(pts):
            pts = np.asarray(pts)
            d = pts - center
            return np.exp(-15.0 * np.pi * (d[..., 0] ** 2 + d[..., 1] ** 2))

        def grad(pts):
            pts = np.asarray(pts)
            d = pts - center
            return -30.0 * np.pi * d * func(pts)[..., None]
        return func, grad
    raise ConfigError(f"unknown preset {name!r}")


def target_field_values(cfg: ExperimentConfig, points: np.ndarray) -> np.ndarray:
    """Ground-truth lambda* values of the configured target at points."""
    if cfg.target.kind == "preset":
        func, _ = preset_field(cfg.target.preset)
        return func(points)
    if cfg.target.kind == "constant":
        return np.full(np.asarray(points).shape[:-1], cfg.target.constant)
    f = LambdaField(K=cfg.K, coeffs=np.asarray(cfg.target.coeffs))
    return f.evaluate(points).reshape(np.asarray(points).shape[:-1])


def target_contrast(cfg: ExperimentConfig, grid):
    """Contrast fields of the configured target on a grid."""
    if cfg.target.kind == "preset":
        func, grad = preset_field(cfg.target.preset)
        return function_contrast(grid, func, grad, cfg.lam)
    if cfg.target.kind == "constant":
        value = cfg.target.constant

        def func(pts):
            return np.full(np.asarray(pts).shape[:-1], value)

        def grad(pts):
            return np.zeros(np.asarray(pts).shape)
        return function_contrast(grid, func, grad, cfg.lam)
    f = LambdaField(K=cfg.K, coeffs=np.asarray(cfg.target.coeffs))
    return lambda_contrast(grid, f, cfg.lam)


def write_csv(path, columns, rows, cfg_hash: str):
    """Delimited writer with the version/config header line."""
    with open(path, "w") as fh:
        fh.write(f"# elascat {__version__} config={cfg_hash}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(
                (FLOAT_FMT % v) if isinstance(v, float) else str(v)
                for v in row) + "\n")


def read_csv(path):
    """Read back a header-carrying CSV into column name -> string lists."""
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if not ln.startswith("#")]
    names = lines[0].split(",")
    cols = {name: [] for name in names}
    for ln in lines[1:]:
        if not ln:
            continue
        for name, val in zip(names, ln.split(",")):
            cols[name].append(val)
    return cols


def build_setup(cfg: ExperimentConfig, N: int = None) -> ScatteringSetup:
    mat = IsotropicMaterial(lam=cfg.lam, mu=cfg.mu, rho=cfg.rho)
    angles = [np.deg2rad(a) for a in cfg.incident_angles_deg]
    return ScatteringSetup(mat, cfg.omega, cfg.n, N if N is not None else cfg.N,
                           angles, cfg.directions, cfg.incident_mode)


def write_geometry_files(cfg: ExperimentConfig, setup: ScatteringSetup, out: str):
    h = cfg.config_hash
    grid = setup.grid
    rows = []
    for k in range(grid.N):
        for j in range(grid.N):
            rows.append((k + 1, j + 1, float(grid.nodes[k, j, 0]),
                         float(grid.nodes[k, j, 1]), int(grid.inside[k, j])))
    write_csv(os.path.join(out, "grid.csv"),
              ["k", "j", "x1", "x2", "inside"], rows, h)
    b = setup.boundary
    rows = [(j, float(b.t[j]), float(b.points[j, 0]), float(b.points[j, 1]),
             float(b.normals[j, 0]), float(b.normals[j, 1]),
             float(b.jacobians[j])) for j in range(2 * b.n)]
    write_csv(os.path.join(out, "boundary.csv"),
              ["j", "t", "x1", "x2", "nx1", "nx2", "jacobian"], rows, h)
    xs = np.linspace(-1.0, 1.0, 201)
    centers = basis_centers(cfg.K)
    a = width_exponent(cfg.K)
    rows = []
    for x in xs:
        rows.append((float(x), *(float(np.exp(-a * (x - z) ** 2)) for z in centers)))
    write_csv(os.path.join(out, "basis.csv"),
              ["x"] + [f"g{k + 1}" for k in range(cfg.K)], rows, h)


def write_far_field(path, stacked: np.ndarray, cfg: ExperimentConfig):
    """Far-field CSV in the stacked incident/mode/direction order."""
    M = cfg.directions
    n_inc = len(cfg.incident_angles_deg)
    angles = 2.0 * np.pi * np.arange(M) / M
    data = stacked.reshape(n_inc, 2, M, 2)
    rows = []
    for i in range(n_inc):
        for mode_idx, mode in enumerate(("p", "s")):
            for m in range(M):
                u = data[i, mode_idx, m]
                rows.append((i, mode, float(angles[m]),
                             float(u[0].real), float(u[0].imag),
                             float(u[1].real), float(u[1].imag)))
    write_csv(path, ["incident_index", "mode", "angle",
                     "re_u1", "im_u1", "re_u2", "im_u2"], rows, cfg.config_hash)


def read_far_field(path, cfg: ExperimentConfig) -> np.ndarray:
    """Read a far-field CSV back into the stacked complex vector."""
    cols = read_csv(path)
    M = cfg.directions
    n_inc = len(cfg.incident_angles_deg)
    expected = n_inc * 2 * M
    if len(cols["angle"]) != expected:
        raise ConfigError(
            f"far-field file has {len(cols['angle'])} rows, expected {expected} "
            f"for {n_inc} incidents and {M} directions")
    u1 = np.array([float(v) for v in cols["re_u1"]]) \
        + 1j * np.array([float(v) for v in cols["im_u1"]])
    u2 = np.array([float(v) for v in cols["re_u2"]]) \
        + 1j * np.array([float(v) for v in cols["im_u2"]])
    return np.stack([u1, u2], axis=-1).reshape(-1)


def write_field_csv(path, grid, values: np.ndarray, cfg: ExperimentConfig):
    rows = []
    for k in range(grid.N):
        for j in range(grid.N):
            rows.append((float(grid.nodes[k, j, 0]), float(grid.nodes[k, j, 1]),
                         float(values[k, j])))
    write_csv(path, ["x1", "x2", "lambda_star"], rows, cfg.config_hash)


def synthesize_data(cfg: ExperimentConfig):
    """Forward data of the configured target, on the synthesis grid if set."""
    setup = build_setup(cfg, N=cfg.synthesis_N)
    cf = target_contrast(cfg, setup.grid)
    stacked, solver, fields = setup.forward_stacked(cf)
    return setup, cf, stacked, fields


def cmd_forward(cfg: ExperimentConfig, out: str) -> int:
    os.makedirs(out, exist_ok=True)
    setup, cf, stacked, fields = synthesize_data(cfg)
    write_geometry_files(cfg, setup, out)
    rows = []
    grid = setup.grid
    for i, u in enumerate(fields):
        for k in range(grid.N):
            for j in range(grid.N):
                rows.append((i, k + 1, j + 1,
                             float(grid.nodes[k, j, 0]), float(grid.nodes[k, j, 1]),
                             int(grid.inside[k, j]),
                             float(u[k, j, 0].real), float(u[k, j, 0].imag),
                             float(u[k, j, 1].real), float(u[k, j, 1].imag)))
    write_csv(os.path.join(out, "interior.csv"),
              ["incident_index", "k", "j", "x1", "x2", "inside",
               "re_u1", "im_u1", "re_u2", "im_u2"], rows, cfg.config_hash)
    write_far_field(os.path.join(out, "farfield.csv"), stacked, cfg)
    return 0


def cmd_synth(cfg: ExperimentConfig, out: str) -> int:
    os.makedirs(out, exist_ok=True)
    setup, cf, stacked, fields = synthesize_data(cfg)
    write_geometry_files(cfg, setup, out)
    write_far_field(os.path.join(out, "farfield.csv"), stacked, cfg)
    noisy = add_noise_vector(stacked, cfg.delta, cfg.seed)
    write_far_field(os.path.join(out, "farfield_noisy.csv"), noisy, cfg)
    rel = np.linalg.norm(noisy - stacked) / np.linalg.norm(stacked) \
        if np.linalg.norm(stacked) > 0 else 0.0
    summary = {"delta": cfg.delta, "seed": cfg.seed,
               "relative_perturbation": rel, "samples": int(stacked.size)}
    with open(os.path.join(out, "noise.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def cmd_invert(cfg: ExperimentConfig, data_path: str, out: str) -> int:
    os.makedirs(out, exist_ok=True)
    data = read_far_field(data_path, cfg)
    setup = build_setup(cfg)
    grid = setup.grid
    truth = None
    if cfg.target.kind in ("preset", "constant", "coeffs"):
        truth = target_field_values(cfg, grid.nodes).reshape(grid.N, grid.N)
        write_field_csv(os.path.join(out, "exact_field.csv"), grid, truth, cfg)
    initial = fit_constant(cfg.lambda0, cfg.K, grid.flat_nodes)
    write_field_csv(os.path.join(out, "initial_field.csv"), grid,
                    initial.evaluate(grid.nodes).reshape(grid.N, grid.N), cfg)
    options = NewtonOptions(lambda0=cfg.lambda0, alpha0=cfg.alpha0,
                            alpha_ratio=cfg.alpha_ratio,
                            iterations=cfg.iterations)

    def on_record(rec):
        f = LambdaField(K=cfg.K, coeffs=rec.coeffs)
        write_field_csv(os.path.join(out, f"recon_iter_{rec.n:02d}.csv"), grid,
                        f.evaluate(grid.nodes).reshape(grid.N, grid.N), cfg)

    diverged = None
    try:
        records = newton_iterate(setup, data, cfg.K, cfg.lam, options,
                                 truth_values=truth, initial=initial,
                                 callback=on_record)
    except Diverged as exc:
        records = exc.records
        diverged = str(exc)
    rows = [(rec.n, float(rec.residual), float(rec.field_error))
            for rec in records]
    write_csv(os.path.join(out, "iterations.csv"),
              ["n", "residual", "coeff_error"], rows, cfg.config_hash)
    if diverged is not None:
        print(f"diverged: {diverged}")
        return 3
    return 0


def cmd_analyze_symbol(lam: float, mu: float, kappa_star: float,
                       mu_star: float, out_path: str = None) -> dict:
    """Constant-tensor diagnostics (alpha, beta, class, determinant)."""
    from .tensors import bulk_modulus

    kappa = bulk_modulus(lam, mu)
    contrast = ContrastModuli(d_kappa=kappa_star - kappa, d_mu=mu_star - mu)
    ab = alpha_beta(lam, mu, contrast)
    cls = classify_invertibility(ab, tol=1e-12)
    coeffs = static_coeffs(lam, mu)
    det_c = symbol_det_closed(ab, coeffs)
    rng = np.random.default_rng(12345)
    devs = []
    for _ in range(100):
        angle = rng.uniform(0.0, 2.0 * np.pi)
        radius = rng.uniform(0.1, 10.0)
        k = radius * np.array([np.cos(angle), np.sin(angle)])
        devs.append(abs(np.linalg.det(symbol_matrix(k, ab, coeffs)) - det_c))
    result = {
        "alpha": ab.alpha,
        "beta": ab.beta,
        "class": cls.variant.value,
        "det_closed": det_c,
        "det_numeric_max_dev": float(max(devs)),
    }
    if out_path:
        with open(out_path, "w") as fh:
            json.dump(result, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return result


def cmd_eshelby_static(lam: float, mu: float, d_kappa: float, d_mu: float,
                       resolution: int, radius: float, eps: tuple,
                       out: str) -> int:
    """Periodic-cell eigenstrain solve for a constant-contrast disc."""
    os.makedirs(out, exist_ok=True)
    dk, dm = disc_contrast(resolution, radius, d_kappa, d_mu)
    eps_inc = np.array([[eps[0], eps[2]], [eps[2], eps[1]]])
    result = solve_periodic_eshelby(dk, dm, eps_inc, lam, mu)
    x = -1.0 + 2.0 * (np.arange(resolution) + 0.5) / resolution
    rows = []
    for i in range(resolution):
        for j in range(resolution):
            rows.append((i, j, float(x[i]), float(x[j]),
                         int(result.support[i, j]),
                         float(result.h[i, j, 0, 0]), float(result.h[i, j, 1, 1]),
                         float(result.h[i, j, 0, 1])))
    payload = json.dumps({"lam": lam, "mu": mu, "d_kappa": d_kappa,
                          "d_mu": d_mu, "R": resolution, "radius": radius,
                          "eps": list(eps)}, sort_keys=True)
    h = hashlib.sha256(payload.encode()).hexdigest()
    write_csv(os.path.join(out, "eigenstrain.csv"),
              ["i", "j", "x1", "x2", "inside", "h11", "h22", "h12"], rows, h)
    summary = {"iterations": int(result.iterations),
               "relative_residual": float(result.residuals[-1]),
               "support_cells": int(result.support.sum())}
    with open(os.path.join(out, "eigenstrain.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0
