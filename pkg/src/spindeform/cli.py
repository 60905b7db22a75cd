"""Command-line entry point: config-driven runs with manifested outputs.

Subcommands: dispersion, junction, gordon-fit, sigma (alias: evolve),
cech, hausdorff.  Exit codes: 0 success, 1 numeric/model error, 2 usage
or configuration error.  The output directory comes from the config and
can be overridden by the SPINDEFORM_OUT environment variable only.
"""

import argparse
import json
import os
import struct
import sys
from pathlib import Path

import numpy as np

from . import cech as cech_mod
from . import hausdorff as hd
from . import sigma as sigma_mod
from .config import (ConfigError, format_float, parse_config, write_csv,
                     write_json, write_manifest)
from .deformation import SlabProfile
from .dirac import dispersion_approx, dispersion_exact
from .gordon import MomentFitInput, moment_ratio_roundtrip, neutron_fit
from .junction import CoordinateHyperplane, glue_currents, junction_residual
from .scenarios import continuous_junction_currents, standing_wave_initial


def _outdir(cfg):
    out = os.environ.get("SPINDEFORM_OUT", cfg["output_dir"])
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def run_dispersion(cfg, outdir):
    d = cfg.section("dispersion")
    m = cfg.section("constants")["mass"]
    k4 = np.asarray(d["k"], dtype=float)
    rng = np.random.default_rng(cfg["seed"])
    direction = rng.standard_normal((d["count"], 3))
    direction /= np.linalg.norm(direction, axis=1)[:, None]
    radii = rng.uniform(0.0, d["p_max"] * m, size=(d["count"], 1))
    momenta = direction * radii

    rows = []
    for p in momenta:
        e_plus, e_minus = dispersion_exact(p, k4, m)
        a_plus, a_minus = dispersion_approx(p, k4, m)
        err = max(abs(e_plus - a_plus), abs(e_minus - a_minus))
        rows.append(tuple(p) + tuple(k4) + (m,
                    e_plus.real, e_plus.imag, e_minus.real, e_minus.imag, err))
    path = outdir / "dispersion.csv"
    write_csv(path, ["px", "py", "pz", "k0", "kx", "ky", "kz", "m",
                     "ReE+", "ImE+", "ReE-", "ImE-", "approx_err"], rows)
    return [path]


def run_junction(cfg, outdir):
    prof = SlabProfile(**cfg.section("profile"))
    j = cfg.section("junction")
    m = cfg.section("constants")["mass"]
    offset = j["offset"] if j["offset"] is not None else prof.sigma2_end
    surf = CoordinateHyperplane(axis=prof.axis, offset=float(offset))
    j_minus, j_plus = continuous_junction_currents(
        prof, m, np.asarray(j["p"], dtype=float),
        np.asarray(j["p_second"], dtype=float), j["second_coefficient"])

    n = int(j["samples"])
    span = np.linspace(-j["extent"], j["extent"], n)
    zz = np.stack(np.meshgrid(span, span, span, indexing="ij"), axis=-1)
    z_points = zz.reshape(-1, 3)
    _, _, coeff = glue_currents(j_plus, j_minus, surf, z_points)
    residual = junction_residual(j_plus, j_minus, surf, z_points)

    rows = [tuple(z) + (c,) + tuple(r)
            for z, c, r in zip(z_points, coeff, residual)]
    path = outdir / "junction.csv"
    write_csv(path, ["z1", "z2", "z3", "singular_coefficient",
                     "residual_1", "residual_2", "residual_3"], rows)
    return [path]


def run_gordon_fit(cfg, outdir):
    c = cfg.section("constants")
    g = cfg.section("gordon")
    e_abs = g["e_abs"]
    if e_abs is None:
        e_abs = float(np.sqrt(4 * np.pi / c["inverse_fine_structure"]))
    beta = g["beta"] if g["beta"] is not None else c["neutron_proton_mass_ratio"]
    fit_input = MomentFitInput(
        mu_ratio=c["moment_ratio"],
        e_abs=e_abs,
        beta=beta,
        mass_ratio_nm=c["neutron_proton_mass_ratio"],
    )
    fit = neutron_fit(fit_input)
    payload = {
        "phi_bar_sq_over_beta": fit.phi_bar_sq_over_beta,
        "phi_bar": fit.phi_bar,
        "mu_over_muN_roundtrip": moment_ratio_roundtrip(fit, fit_input),
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    path = outdir / "gordon_fit.json"
    write_json(path, payload)
    return [path]


def run_sigma(cfg, outdir):
    s = cfg.section("sigma")
    nx = int(s["sites"])
    h = s["length"] / nx
    spec = sigma_mod.LatticeSpec(dt=s["dt_factor"] * h, h=h)
    if s["preset"] == "standing_wave":
        phi0, v0 = standing_wave_initial(nx, s["length"], int(s["target_dim"]),
                                         s["amplitude"])
    else:
        phi0 = np.full((nx, int(s["target_dim"])), s["amplitude"] / 2)
        v0 = np.zeros_like(phi0)
    result = sigma_mod.sigma_evolve(phi0, v0, np.asarray(s["k"], dtype=float),
                                    spec, int(s["steps"]))

    rows = []
    for n in range(len(result.times)):
        energy = result.energy[n] if n < len(result.energy) else result.energy[-1]
        res = result.eom_residual[n - 1] if 1 <= n - 1 < len(result.eom_residual) \
            else 0.0
        rows.append((n, result.times[n], result.max_chart_sq[n], energy, res))
    csv_path = outdir / "sigma_diagnostics.csv"
    write_csv(csv_path, ["step", "time", "max_chart_sq", "energy", "eom_residual"],
              [(str(int(r[0])),) + r[1:] for r in rows])

    dump_path = outdir / "sigma_final_field.bin"
    _write_field_dump(dump_path, result.history[-1])
    return [csv_path, dump_path]


def _write_field_dump(path, array):
    """Binary layout: int64 rank, int64 dims, then row-major float64 data."""
    arr = np.ascontiguousarray(array, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(struct.pack("<q", arr.ndim))
        fh.write(struct.pack(f"<{arr.ndim}q", *arr.shape))
        fh.write(arr.tobytes())


def read_field_dump(path):
    raw = Path(path).read_bytes()
    ndim = struct.unpack_from("<q", raw, 0)[0]
    dims = struct.unpack_from(f"<{ndim}q", raw, 8)
    data = np.frombuffer(raw, dtype="<f8", offset=8 + 8 * ndim)
    return data.reshape(dims)


def run_cech(cfg, outdir, args):
    section = cfg.section("cech")
    if getattr(args, "nerve", None):
        nerve = cech_mod.parse_nerve(Path(args.nerve).read_text(encoding="utf-8"))
    elif section["nerve"]:
        nerve = cech_mod.parse_nerve(Path(section["nerve"]).read_text(encoding="utf-8"))
    else:
        nerve = cech_mod.circle_nerve()

    payload = {"vertices": len(nerve.vertices), "edges": len(nerve.edges),
               "triangles": len(nerve.triangles)}
    if args.h1 or not (args.diff or args.glue):
        dim = cech_mod.h1_dimension(nerve)
        payload["h1_dimension"] = dim
        payload["structure_count"] = 2**dim
        print(f"h1 dimension: {dim}")
        print(f"structure count: {2**dim}")
    if args.diff:
        a = cech_mod.parse_cocycle(Path(args.diff[0]).read_text(encoding="utf-8"))
        b = cech_mod.parse_cocycle(Path(args.diff[1]).read_text(encoding="utf-8"))
        delta = cech_mod.difference_class(a, b, nerve)
        chi = cech_mod.is_coboundary(delta, nerve)
        payload["difference_class"] = {f"{e[0]} {e[1]}": v
                                       for e, v in sorted(delta.labels.items())}
        payload["equivalent"] = chi is not None
        print(f"difference class trivial: {chi is not None}")
    if args.glue:
        defo = cech_mod.parse_deformation(Path(args.glue).read_text(encoding="utf-8"))
        chi = {v: +1 for v in nerve.vertices}
        glue = cech_mod.deformed_gluing_check(chi, defo, nerve)
        payload["global_map_exists"] = glue["global_map_exists"]
        payload["obstructed_edges"] = [list(e) for e in glue["obstructed_edges"]]
        print(f"global map exists: {glue['global_map_exists']}")
        if glue["obstructed_edges"]:
            print(f"obstructed edges: {glue['obstructed_edges']}")
    path = outdir / "cech.json"
    write_json(path, payload)
    return [path]


def _load_boxes(cfg, args):
    section = cfg.section("hausdorff")
    if getattr(args, "set", None):
        return _parse_box_file(Path(args.set).read_text(encoding="utf-8"))
    pieces = []
    for spec in section["boxes"]:
        pieces.append((hd.Box(lo=tuple(spec["lo"]), hi=tuple(spec["hi"])),
                       float(spec["phi"])))
    return pieces


def _parse_box_file(text):
    """Lines of 2d+1 floats: lo_1..lo_d hi_1..hi_d phi."""
    pieces = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        vals = [float(v) for v in line.split()]
        if len(vals) < 3 or len(vals) % 2 == 0:
            raise ValueError(f"bad box record at line {lineno}: {raw!r}")
        d = (len(vals) - 1) // 2
        pieces.append((hd.Box(lo=tuple(vals[:d]), hi=tuple(vals[d:2 * d])),
                       vals[-1]))
    return pieces


def run_hausdorff(cfg, outdir, args):
    section = cfg.section("hausdorff")
    s = float(args.s) if getattr(args, "s", None) is not None else section["s"]
    delta_min = float(args.delta_min) if getattr(args, "delta_min", None) is not None \
        else section["delta_min"]
    pieces = _load_boxes(cfg, args)
    equipped = hd.EquippedLocalSet(pieces=tuple(pieces))
    spec = hd.CoveringSpec.geometric(section["delta_max"], delta_min)

    rows = []
    for delta in spec.deltas:
        one = hd.CoveringSpec(deltas=(delta,))
        result = hd.equipped_measure(equipped, s, one)
        rows.append((delta,) + result.per_piece + (result.direct, result.total,
                                                   result.gap))
    n = len(pieces)
    header = ["delta"] + [f"piece_{i + 1}" for i in range(n)] \
        + ["total", "closed_form", "gap"]
    path = outdir / "hausdorff.csv"
    write_csv(path, header, rows)
    return [path]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spindeform",
        description="Deformed spinor dynamics laboratory",
    )
    parser.add_argument("--config", help="YAML run configuration")
    sub = parser.add_subparsers(dest="subcommand")

    for name in ("dispersion", "junction", "gordon-fit", "sigma", "evolve"):
        sub.add_parser(name)

    cech_p = sub.add_parser("cech")
    cech_p.add_argument("--nerve", help="nerve description file")
    cech_p.add_argument("--h1", action="store_true",
                        help="report the GF(2) cohomology dimension")
    cech_p.add_argument("--diff", nargs=2, metavar=("A", "B"),
                        help="difference class of two cocycle files")
    cech_p.add_argument("--glue", metavar="DEFO",
                        help="gluing obstruction for a deformation file")

    hd_p = sub.add_parser("hausdorff")
    hd_p.add_argument("--set", help="box list file with phi per box")
    hd_p.add_argument("--s", type=float, help="measure exponent")
    hd_p.add_argument("--delta-min", dest="delta_min", type=float)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.subcommand is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        cfg = parse_config(args.config)
        if cfg["scenario"] is not None and cfg["scenario"] != args.subcommand:
            raise ConfigError(
                f"scenario {cfg['scenario']!r} does not match subcommand "
                f"{args.subcommand!r}"
            )
        outdir = _outdir(cfg)
        if args.subcommand == "dispersion":
            outputs = run_dispersion(cfg, outdir)
        elif args.subcommand == "junction":
            outputs = run_junction(cfg, outdir)
        elif args.subcommand == "gordon-fit":
            outputs = run_gordon_fit(cfg, outdir)
        elif args.subcommand in ("sigma", "evolve"):
            outputs = run_sigma(cfg, outdir)
        elif args.subcommand == "cech":
            outputs = run_cech(cfg, outdir, args)
        elif args.subcommand == "hausdorff":
            outputs = run_hausdorff(cfg, outdir, args)
        else:  # pragma: no cover - argparse rejects unknown subcommands
            parser.print_usage(sys.stderr)
            return 2
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    write_manifest(outdir, cfg, outputs)
    return 0


if __name__ == "__main__":
    sys.exit(main())
