"""Command-line entry point: simulate, verify, sweep, and operator access.

Config files are INI text with a single [run] section; keys are lower-case
(T is written t_final since INI keys are case-insensitive).  A manifest
written by `simulate` is itself a valid config, so runs can be reproduced
bit-exactly from their manifests.
"""

from __future__ import annotations

import argparse
import configparser
import datetime
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .basis import build_rectangle_basis, restrict
from .commutators import comm_lambda_mult, comm_neg_lambda_mult, multiplier_catalog
from .experiments import mode_sweep, viscosity_sweep
from .fractional import (
    apply_lambda_power,
    heat_semigroup,
    lambda_neg_power_heat,
    lambda_pos_power_heat,
    project,
)
from .galerkin import BlowUpError, GalerkinTensor, SimConfig, run
from .snapshots import (
    RunManifest,
    Snapshot,
    read_snapshot,
    write_diagnostics_csv,
    write_snapshot,
    write_table_csv,
)
from .verify import format_report, run_suite

CONFIG_KEYS = {
    "alpha": float,
    "epsilon": float,
    "m": int,
    "pad": float,
    "dt": float,
    "t_final": float,
    "stride": int,
    "initial": str,
    "seed": int,
}


class ConfigError(ValueError):
    pass


def load_config(path) -> SimConfig:
    cp = configparser.ConfigParser()
    try:
        read = cp.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if not read:
        raise ConfigError(f"{path}: config file not found or unreadable")
    if not cp.has_section("run"):
        raise ConfigError(f"{path}: missing [run] section")
    kwargs = {}
    for key, raw in cp["run"].items():
        if key not in CONFIG_KEYS:
            raise ConfigError(
                f"{path}: unknown key {key!r} in [run] "
                f"(known: {', '.join(sorted(CONFIG_KEYS))})"
            )
        try:
            kwargs[key] = CONFIG_KEYS[key](raw)
        except ValueError as exc:
            raise ConfigError(f"{path}: key {key!r}: {exc}") from exc
    if "t_final" in kwargs:
        kwargs["T"] = kwargs.pop("t_final")
    try:
        return SimConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def config_to_dict(cfg: SimConfig) -> dict:
    return {
        "alpha": cfg.alpha,
        "epsilon": cfg.epsilon,
        "m": cfg.m,
        "pad": cfg.pad,
        "dt": cfg.dt,
        "t_final": cfg.T,
        "stride": cfg.stride,
        "initial": cfg.initial,
        "seed": cfg.seed,
    }


def _make_manifest(cfg: SimConfig, tensor_mode: str, out_dir: str) -> RunManifest:
    return RunManifest(
        config=config_to_dict(cfg),
        tool_version=__version__,
        tensor_mode=tensor_mode,
        created=datetime.datetime.now(datetime.timezone.utc).isoformat(),
        output_dir=str(out_dir),
    )


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    traj = run(cfg)
    for i, t in enumerate(traj.times):
        snap = Snapshot(cfg.m, cfg.alpha, cfg.epsilon, float(t), traj.snaps[i])
        write_snapshot(out / f"snapshot_{i:06d}.bin", snap)
    write_diagnostics_csv(out / "diagnostics.csv", traj.times, traj.diagnostics)
    _make_manifest(cfg, "analytic", out).dump(out / "manifest.ini")
    print(f"wrote {len(traj.times)} snapshots to {out}")
    return 0


def cmd_verify(args) -> int:
    tensor = GalerkinTensor.load(args.tensor) if args.tensor else None
    results = run_suite(args.level, tensor=tensor)
    print(format_report(results))
    return 0 if all(r.passed for r in results) else 1


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    values = [v for v in args.values.split(",") if v.strip()]
    if not values:
        raise ConfigError("sweep values list is empty")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    if args.kind == "modes":
        rep = mode_sweep(cfg, [int(v) for v in values])
    else:
        rep = viscosity_sweep(cfg, [float(v) for v in values])

    columns = [rep.parameter] + list(rep.metrics) + list(rep.pair_diffs)
    rows = []
    for i, v in enumerate(rep.values):
        row = [float(v)] + [float(rep.metrics[k][i]) for k in rep.metrics]
        for k in rep.pair_diffs:
            d = rep.pair_diffs[k]
            row.append(float(d[i]) if i < len(d) else math.nan)
        rows.append(row)
    write_table_csv(out / f"sweep_{args.kind}.csv", columns, rows)
    _make_manifest(cfg, "analytic", out).dump(out / "manifest.ini")
    for name, val in rep.fits.items():
        print(f"{name}: {val:.4f}")
    print(f"wrote sweep report to {out / f'sweep_{args.kind}.csv'}")
    return 0


def _op_param(params: dict, key: str) -> float:
    if key not in params:
        raise ConfigError(f"operator requires parameter {key}=<value>")
    return float(params[key])


def cmd_op(args) -> int:
    snap = read_snapshot(args.input)
    basis = build_rectangle_basis(int(math.ceil(math.sqrt(snap.m))))
    coeffs = np.zeros(basis.size)
    coeffs[: snap.m] = snap.coeffs
    from .basis import SpectralField

    f = SpectralField(basis, coeffs)
    params = {}
    for item in args.param:
        if "=" not in item:
            raise ConfigError(f"malformed parameter {item!r}, expected key=value")
        k, v = item.split("=", 1)
        params[k] = v

    name = args.name
    if name == "lambda_pow":
        out_field = apply_lambda_power(f, _op_param(params, "s"))
    elif name == "heat":
        out_field = heat_semigroup(f, _op_param(params, "t"))
    elif name == "lambda_neg_heat":
        out_field = lambda_neg_power_heat(f, _op_param(params, "s"))
    elif name == "lambda_pos_heat":
        out_field = lambda_pos_power_heat(f, _op_param(params, "s"))
    elif name == "project":
        out_field = project(f, int(_op_param(params, "m")))
    elif name in ("comm_neg_mult", "comm_mult"):
        cat = multiplier_catalog()
        a_name = params.get("a", "one")
        if a_name not in cat:
            raise ConfigError(
                f"unknown multiplier {a_name!r} (available: {', '.join(cat)})"
            )
        op = comm_neg_lambda_mult if name == "comm_neg_mult" else comm_lambda_mult
        out_field = restrict(op(cat[a_name], f, _op_param(params, "s")), basis)
    else:
        known = (
            "lambda_pow, heat, lambda_neg_heat, lambda_pos_heat, project, "
            "comm_neg_mult, comm_mult"
        )
        raise ConfigError(f"unknown operator {name!r} (available: {known})")

    out_snap = Snapshot(
        snap.m, snap.alpha, snap.epsilon, snap.t, out_field.coeffs[: snap.m]
    )
    write_snapshot(args.out, out_snap)
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="gsqg",
        description="Spectral Galerkin simulator for the generalized "
        "surface quasi-geostrophic equation with singular velocity",
    )
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("simulate", help="run one trajectory from a config file")
    ps.add_argument("--config", required=True, help="INI config with a [run] section")
    ps.add_argument("--out", default="out", help="output directory")
    ps.add_argument("--seed", type=int, default=None, help="override the config seed")
    ps.set_defaults(func=cmd_simulate)

    pv = sub.add_parser("verify", help="run the property verification suite")
    pv.add_argument("--level", choices=("quick", "full"), default="quick")
    pv.add_argument("--tensor", default=None, help="check a saved tensor file (npz)")
    pv.set_defaults(func=cmd_verify)

    pw = sub.add_parser("sweep", help="mode or viscosity convergence sweep")
    pw.add_argument("kind", choices=("modes", "viscosity"))
    pw.add_argument("--config", required=True, help="template run config")
    pw.add_argument("--values", required=True, help="comma-separated sweep values")
    pw.add_argument("--out", default="out", help="output directory")
    pw.add_argument("--seed", type=int, default=None, help="override the config seed")
    pw.set_defaults(func=cmd_sweep)

    po = sub.add_parser("op", help="apply one operator to a snapshot file")
    po.add_argument("name", help="operator name, e.g. lambda_pow")
    po.add_argument("input", help="input field in snapshot format")
    po.add_argument("--out", default="out.bin", help="output snapshot path")
    po.add_argument(
        "--param", "-p", action="append", default=[], help="key=value, repeatable"
    )
    po.set_defaults(func=cmd_op)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BlowUpError as exc:
        print(f"blow-up abort: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
