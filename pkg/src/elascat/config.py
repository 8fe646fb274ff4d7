"""Experiment configuration: YAML parsing, validation, canonical hashing.

Kept free of numpy imports so the CLI can configure threading before the
numerical stack loads.
"""

import hashlib
import json
from dataclasses import dataclass, field

import yaml

from .errors import ConfigError

PRESET_TARGETS = ("example1", "example2")


@dataclass
class TargetSpec:
    """Ground-truth lambda* specification: preset, constant, or coefficients."""

    kind: str                    # 'preset' | 'constant' | 'coeffs'
    preset: str = ""
    constant: float = 0.0
    coeffs: list = field(default_factory=list)


@dataclass
class ExperimentConfig:
    lam: float
    mu: float
    rho: float
    omega: float
    n: int
    N: int
    K: int
    incident_mode: str
    incident_angles_deg: list
    directions: int
    delta: float
    seed: int
    lambda0: float
    alpha0: float
    alpha_ratio: float
    iterations: int
    target: TargetSpec
    synthesis_N: int | None
    output_dir: str
    resolved: dict = field(default_factory=dict, repr=False)

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(
            json.dumps(self.resolved, sort_keys=True).encode()
        ).hexdigest()


def _require(cond: bool, message: str):
    if not cond:
        raise ConfigError(message)


def _as_target(raw) -> TargetSpec:
    if not isinstance(raw, dict) or len(raw) != 1:
        raise ConfigError("target must be one of {preset: ...}, "
                          "{constant: ...}, {coeffs: ...}")
    (kind, value), = raw.items()
    if kind == "preset":
        _require(value in PRESET_TARGETS, f"unknown preset {value!r}")
        return TargetSpec(kind="preset", preset=value)
    if kind == "constant":
        return TargetSpec(kind="constant", constant=float(value))
    if kind == "coeffs":
        _require(isinstance(value, list) and value
                 and all(isinstance(row, list) for row in value),
                 "coeffs must be a nested list")
        return TargetSpec(kind="coeffs", coeffs=value)
    raise ConfigError(f"unknown target kind {kind!r}")


def resolve_config(raw: dict) -> ExperimentConfig:
    """Validate a parsed config mapping and fill in defaults."""
    if not isinstance(raw, dict):
        raise ConfigError("config document must be a mapping")
    try:
        material = raw.get("material", {})
        lam = float(material.get("lam", 1.0))
        mu = float(material.get("mu", 1.0))
        rho = float(material.get("rho", 1.0))
        omega = float(raw.get("omega", 0.1))
        geometry = raw.get("geometry", {})
        n = int(geometry.get("n", 32))
        N = int(geometry.get("N", 41))
        K = int(raw.get("basis", {}).get("K", 5))
        incidents = raw.get("incidents", {})
        mode = str(incidents.get("mode", "p"))
        angles = [float(a) for a in incidents.get("angles_deg", [0.0, 90.0, 180.0, 270.0])]
        directions = int(raw.get("farfield", {}).get("directions", 64))
        noise = raw.get("noise", {})
        delta = float(noise.get("delta", 0.0))
        seed = int(noise.get("seed", 0))
        inversion = raw.get("inversion", {})
        lambda0 = float(inversion.get("lambda0", 0.5))
        alpha0 = float(inversion.get("alpha0", 1e-3))
        alpha_ratio = float(inversion.get("alpha_ratio", 0.5))
        iterations = int(inversion.get("iterations", 2))
        target = _as_target(raw.get("target", {"constant": lam}))
        synth_N = raw.get("synthesis", {}).get("N")
        synth_N = int(synth_N) if synth_N is not None else None
        output_dir = str(raw.get("output", {}).get("dir", "out"))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"malformed config value: {exc}") from exc

    _require(mu > 0.0 and lam + mu >= 0.0, "need mu > 0 and lam + mu >= 0")
    _require(rho > 0.0, "need rho > 0")
    _require(omega > 0.0, "need omega > 0")
    _require(n >= 4, "need n >= 4")
    _require(N >= 5, "need N >= 5")
    _require(K >= 2, "need K >= 2")
    _require(mode in ("p", "s"), "incident mode must be 'p' or 's'")
    _require(len(angles) >= 1, "need at least one incident angle")
    _require(directions >= 4, "need at least 4 observation directions")
    _require(delta >= 0.0, "noise level must be nonnegative")
    _require(lambda0 > 0.0, "initial guess must be positive")
    _require(alpha0 > 0.0 and 0.0 < alpha_ratio < 1.0,
             "regularization schedule must be positive and decreasing")
    _require(iterations >= 1, "need at least one Newton iteration")
    if target.kind == "coeffs":
        _require(len(target.coeffs) == K and all(len(r) == K for r in target.coeffs),
                 f"coefficient target must be {K} x {K}")
    if synth_N is not None:
        _require(synth_N >= 5, "synthesis grid needs N >= 5")

    if target.kind == "preset":
        target_resolved = {"preset": target.preset}
    elif target.kind == "constant":
        target_resolved = {"constant": target.constant}
    else:
        target_resolved = {"coeffs": target.coeffs}
    resolved = {
        "material": {"lam": lam, "mu": mu, "rho": rho},
        "omega": omega,
        "geometry": {"n": n, "N": N},
        "basis": {"K": K},
        "incidents": {"mode": mode, "angles_deg": angles},
        "farfield": {"directions": directions},
        "noise": {"delta": delta, "seed": seed},
        "inversion": {"lambda0": lambda0, "alpha0": alpha0,
                      "alpha_ratio": alpha_ratio, "iterations": iterations},
        "target": target_resolved,
        "synthesis": {"N": synth_N},
        "output": {"dir": output_dir},
    }
    return ExperimentConfig(
        lam=lam, mu=mu, rho=rho, omega=omega, n=n, N=N, K=K,
        incident_mode=mode, incident_angles_deg=angles, directions=directions,
        delta=delta, seed=seed, lambda0=lambda0, alpha0=alpha0,
        alpha_ratio=alpha_ratio, iterations=iterations, target=target,
        synthesis_N=synth_N, output_dir=output_dir, resolved=resolved,
    )


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from exc
    return resolve_config(raw if raw is not None else {})
