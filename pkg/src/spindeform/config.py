"""Run configuration: YAML parsing, strict validation, manifest writing.

Configs are nested key-value documents; unknown keys are rejected, and
every numeric parameter is checked against the module preconditions
before dispatch.  Randomized scans take their seed from the config so
identical configs produce bitwise-identical data files.
"""

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import yaml

from . import __version__

SUBCOMMANDS = ("dispersion", "junction", "gordon-fit", "sigma", "cech",
               "hausdorff", "evolve")


class ConfigError(ValueError):
    """Parse or validation failure, carrying the offending key path."""


_DEFAULTS = {
    "scenario": None,
    "seed": 20240915,
    "output_dir": "runs",
    "constants": {
        "mass": 1.0,
        "neutron_proton_mass_ratio": 1.00138,
        "inverse_fine_structure": 137.0,
        "moment_ratio": -1.913,
    },
    "profile": {
        "axis": 1,
        "sigma1_end": 0.0,
        "sigma2_end": 4.0,
        "k_slope": -0.005,
        "blend_width": 0.5,
        "theta_amplitude": 1.0,
        "theta_width": 0.5,
        "phi0": 1.0,
        "k_max": None,          # defaults to 0.01 * constants.mass
    },
    "dispersion": {
        "count": 100,
        "p_max": 5.0,
        "k": [0.0, 0.005, 0.0, 0.0],
    },
    "junction": {
        "offset": None,         # defaults to profile.sigma2_end
        "samples": 4,
        "extent": 1.0,
        "p": [0.5, -0.2, 0.3],
        "p_second": [-0.3, 0.4, 0.1],
        "second_coefficient": 0.6,
    },
    "gordon": {
        "e_abs": None,          # defaults to sqrt(4 pi / inverse_fine_structure)
        "beta": None,           # defaults to the mass ratio (self-consistent)
    },
    "sigma": {
        "target_dim": 2,
        "sites": 512,
        "steps": 512,
        "length": 2 * np.pi,
        "dt_factor": 0.25,
        "k": [0.0, 0.0, 0.0, 0.0],
        "preset": "standing_wave",
        "amplitude": 0.05,
    },
    "cech": {
        "nerve": None,          # path; None -> shipped circle nerve
    },
    "hausdorff": {
        "s": 1.0,
        "delta_max": 0.064,
        "delta_min": 1e-3,
        "set": None,            # path to a box-set file
        "boxes": [{"lo": [0.0], "hi": [1.0], "phi": 0.5}],
    },
}


@dataclass(frozen=True)
class RunConfig:
    data: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.data[key]

    def section(self, name):
        return self.data[name]


def _merge(defaults, user, path=""):
    if not isinstance(user, dict):
        raise ConfigError(f"expected a mapping at {path or '<root>'}")
    out = {}
    for key, default in defaults.items():
        here = f"{path}.{key}" if path else key
        if key in user:
            value = user[key]
            if isinstance(default, dict) and default:
                out[key] = _merge(default, value, here)
            else:
                out[key] = value
        else:
            out[key] = default
    unknown = set(user) - set(defaults)
    if unknown:
        k = sorted(unknown)[0]
        where = f"{path}.{k}" if path else k
        raise ConfigError(f"unknown key: {where}")
    return out


def _require(cond, msg):
    if not cond:
        raise ConfigError(msg)


def _validate(cfg):
    c = cfg["constants"]
    _require(c["mass"] > 0, "constants.mass: mass must be positive")
    _require(c["neutron_proton_mass_ratio"] > 0,
             "constants.neutron_proton_mass_ratio must be positive")
    _require(c["inverse_fine_structure"] > 0,
             "constants.inverse_fine_structure must be positive")

    k_max = cfg["profile"]["k_max"]
    if k_max is None:
        k_max = 0.01 * c["mass"]
        cfg["profile"]["k_max"] = k_max
    _require(k_max > 0, "profile.k_max must be positive")

    p = cfg["profile"]
    _require(0.0 < p["phi0"] <= 1.0, f"profile.phi0: phi out of (0,1]: {p['phi0']}")
    _require(p["sigma1_end"] < p["sigma2_end"],
             "profile: sigma1_end must lie below sigma2_end")
    _require(abs(p["k_slope"]) <= k_max,
             f"profile.k_slope: |k|={abs(p['k_slope'])} exceeds the bound k_max={k_max}")

    for section in ("dispersion", "sigma"):
        kvec = np.asarray(cfg[section]["k"], dtype=float)
        _require(kvec.shape == (4,), f"{section}.k must be a 4-vector")
        _require(np.linalg.norm(kvec) <= k_max,
                 f"{section}.k: |k|={np.linalg.norm(kvec):.4g} exceeds the bound "
                 f"k_max={k_max}")

    d = cfg["dispersion"]
    _require(d["count"] >= 1, "dispersion.count must be at least 1")
    _require(d["p_max"] > 0, "dispersion.p_max must be positive")

    s = cfg["sigma"]
    _require(s["target_dim"] >= 1, "sigma.target_dim must be at least 1")
    _require(s["sites"] >= 8, "sigma.sites must be at least 8")
    _require(s["steps"] >= 2, "sigma.steps must be at least 2")
    _require(s["length"] > 0, "sigma.length must be positive")
    _require(0 < s["dt_factor"] <= 0.5,
             "sigma.dt_factor must lie in (0, 0.5] (CFL-like bound dt <= h/2)")
    _require(0 < s["amplitude"] < 1, "sigma.amplitude must lie in (0, 1)")
    _require(s["preset"] in ("standing_wave", "constant"),
             f"sigma.preset: unknown preset {s['preset']!r}")

    j = cfg["junction"]
    _require(int(j["samples"]) >= 2, "junction.samples must be at least 2")
    _require(j["extent"] > 0, "junction.extent must be positive")
    _require(len(j["p"]) == 3 and len(j["p_second"]) == 3,
             "junction momenta must be 3-vectors")

    h = cfg["hausdorff"]
    _require(h["s"] >= 0, "hausdorff.s must be nonnegative")
    _require(0 < h["delta_min"] < h["delta_max"],
             "hausdorff: need 0 < delta_min < delta_max")
    for i, spec in enumerate(h["boxes"] or []):
        _require(set(spec) <= {"lo", "hi", "phi"},
                 f"hausdorff.boxes[{i}]: unknown key")
        _require(0 < spec["phi"] < 1,
                 f"hausdorff.boxes[{i}].phi out of (0,1): {spec['phi']}")

    g = cfg["gordon"]
    if g["e_abs"] is not None:
        _require(g["e_abs"] > 0, "gordon.e_abs must be positive")
    if g["beta"] is not None:
        _require(g["beta"] > 0, "gordon.beta must be positive")

    if cfg["scenario"] is not None:
        _require(cfg["scenario"] in SUBCOMMANDS,
                 f"scenario: unknown scenario {cfg['scenario']!r}")
    return cfg


def parse_config(path=None, text=None):
    """Load, default-fill and validate a config; None means all defaults."""
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
    user = {} if text is None else yaml.safe_load(text)
    if user is None:
        user = {}
    try:
        merged = _merge(_DEFAULTS, user)
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"config parse failure: {exc}") from exc
    return RunConfig(data=_validate(merged))


# --------------------------------------------------------------------------
# output helpers


def format_float(x):
    """17-significant-digit decimal form used in every CSV cell."""
    return f"{float(x):.17g}"


def write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(
            cell if isinstance(cell, str) else format_float(cell) for cell in row
        ))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_json(path, payload):
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def _sha256(path):
    digest = hashlib.sha256()
    digest.update(Path(path).read_bytes())
    return digest.hexdigest()


def write_manifest(outdir, cfg, outputs):
    """Record the config snapshot, version, timestamp and output checksums."""
    manifest = {
        "artifact_version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "config": cfg.data,
        "outputs": {Path(p).name: _sha256(p) for p in outputs},
    }
    path = Path(outdir) / "run_manifest.json"
    write_json(path, manifest)
    return path
