"""Command-line surface: evaluate tables, run walks and verify the theorems.

Exit codes: 0 success / verdict passed, 1 computational failure or failed
verdict, 2 usage or configuration error.  Every data file gets a JSON sidecar
echoing the resolved configuration so reruns are byte-identical.
"""

import argparse
import csv
import json
import sys

import numpy as np

from . import __version__
from .diagnostics import clt_check, gyro_property_suite, lln_check, llt_check, variance_rate_check
from .geometry import as_dim
from .heat_kernel import hk, psi_clt
from .radial_density import profile_from_config
from .spectral import fh_transform
from .walk_sim import WalkConfig, run_walk


class ConfigError(ValueError):
    pass


def _parse_density(spec: str, dim: int) -> dict:
    """Parse the compact --density syntax 'bump:ETA_MAX'."""
    parts = spec.split(":")
    if parts[0] == "bump" and len(parts) == 2:
        return {"family": "bump", "eta_max": float(parts[1]), "dim": dim}
    raise ConfigError(f"unsupported density spec {spec!r}; expected bump:ETA_MAX")


def _parse_grid(spec: str) -> np.ndarray:
    """Inclusive grid 'start:stop:step'."""
    try:
        start, stop, step = (float(x) for x in spec.split(":"))
    except ValueError as exc:
        raise ConfigError(f"bad grid spec {spec!r}; expected start:stop:step") from exc
    if step <= 0.0 or stop < start:
        raise ConfigError(f"bad grid spec {spec!r}")
    count = int(round((stop - start) / step)) + 1
    return start + step * np.arange(count)


def _write_csv(path, header, rows):
    def fmt(x):
        return repr(float(x)) if isinstance(x, (float, np.floating)) else str(x)

    if path is None:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def _write_sidecar(out, payload: dict):
    if out is None:
        return
    payload = dict(payload)
    payload["version"] = __version__
    with open(f"{out}.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _emit_verdict(verdict, out) -> int:
    text = verdict.to_json()
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0 if verdict.passed else 1


def _error(message: str, code: int) -> int:
    print(json.dumps({"error": message}), file=sys.stderr)
    return code


def _load_config(path: str, allowed: set) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(cfg) - allowed
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return cfg


def _cmd_props(args) -> int:
    as_dim(args.dim)  # validates >= 2
    if args.trials < 1:
        raise ConfigError("--trials must be >= 1")
    verdict = gyro_property_suite([args.dim], args.trials, args.seed)
    return _emit_verdict(verdict, args.out)


def _cmd_transform(args) -> int:
    density = _parse_density(args.density, args.dim)
    profile = profile_from_config(density)
    lams = _parse_grid(args.lam)
    rows = [(lam, fh_transform(profile, lam)) for lam in lams]
    _write_csv(args.out, ["lambda", "value"], rows)
    _write_sidecar(args.out, {"command": "transform", "density": density,
                              "lambda_grid": args.lam})
    return 0


def _cmd_heat_kernel(args) -> int:
    as_dim(args.dim)
    if args.t <= 0.0:
        raise ConfigError("--t must be positive")
    etas = _parse_grid(args.eta)
    psi_vals = hk(args.t, etas, args.dim)
    big_psi = psi_clt(args.t, etas, args.dim)
    rows = list(zip(etas, psi_vals, big_psi))
    _write_csv(args.out, ["eta", "psi", "Psi"], rows)
    _write_sidecar(args.out, {"command": "heat-kernel", "dim": args.dim,
                              "t": args.t, "eta_grid": args.eta})
    return 0


def _cmd_walk(args) -> int:
    density = _parse_density(args.density, args.dim)
    profile = profile_from_config(density)
    cfg = WalkConfig(profile, args.N, args.paths, args.scaling, args.seed)
    ensemble = run_walk(cfg)
    rows = list(enumerate(ensemble.terminal_etas))
    _write_csv(args.out, ["path", "eta"], rows)
    _write_sidecar(args.out, {"command": "walk", **cfg.describe()})
    return 0


_VERIFY_KEYS = {
    "clt": {"density", "N", "paths", "seed", "t_scale", "bias_coeff", "threshold"},
    "llt": {"density", "Ns", "eta_points", "limit", "slope_max"},
    "lln": {"density", "Ns", "paths", "seed", "scaling"},
    "variance": {"density", "Ns", "slope_max"},
}


def _cmd_verify(args) -> int:
    cfg = _load_config(args.config, _VERIFY_KEYS[args.check])
    try:
        profile = profile_from_config(cfg["density"])
        if args.check == "clt":
            verdict = clt_check(
                profile, int(cfg["N"]), int(cfg["paths"]), int(cfg["seed"]),
                t_scale=float(cfg.get("t_scale", 1.0)),
                bias_coeff=float(cfg.get("bias_coeff", 5.0)),
                threshold=cfg.get("threshold"))
        elif args.check == "llt":
            eta_grid = None
            if "eta_points" in cfg:
                import math as _m

                from .radial_density import limit_time as _lt
                t = _lt(profile)
                eta_grid = np.linspace(0.0, 2.0 * _m.sqrt(t) + 2.0, int(cfg["eta_points"]))
            verdict = llt_check(profile, cfg["Ns"], eta_grid=eta_grid,
                                slope_max=float(cfg.get("slope_max", -0.8)),
                                limit=cfg.get("limit", "clt"))
        elif args.check == "lln":
            verdict = lln_check(profile, cfg["Ns"], int(cfg["paths"]),
                                int(cfg["seed"]), scaling=cfg.get("scaling", "lln"))
        else:
            verdict = variance_rate_check(profile, cfg["Ns"],
                                          slope_max=float(cfg.get("slope_max", -0.8)))
    except KeyError as exc:
        raise ConfigError(f"missing config key: {exc.args[0]}")
    return _emit_verdict(verdict, args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperwalk",
        description="Gyrogroup random walks and radial spectral analysis on the ball")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    props = sub.add_parser("props", help="run the gyrogroup identity suite")
    props.add_argument("--dim", type=int, required=True)
    props.add_argument("--trials", type=int, default=10000)
    props.add_argument("--seed", type=int, default=0)
    props.add_argument("--out")
    props.set_defaults(func=_cmd_props)

    tr = sub.add_parser("transform", help="tabulate the radial transform of a density")
    tr.add_argument("--dim", type=int, required=True)
    tr.add_argument("--density", required=True)
    tr.add_argument("--lambda", dest="lam", required=True, metavar="GRID")
    tr.add_argument("--out")
    tr.set_defaults(func=_cmd_transform)

    hkp = sub.add_parser("heat-kernel", help="tabulate the heat kernel and its half-time form")
    hkp.add_argument("--dim", type=int, required=True)
    hkp.add_argument("--t", type=float, required=True)
    hkp.add_argument("--eta", required=True, metavar="GRID")
    hkp.add_argument("--out")
    hkp.set_defaults(func=_cmd_heat_kernel)

    walk = sub.add_parser("walk", help="simulate a walk ensemble")
    walk.add_argument("--dim", type=int, required=True)
    walk.add_argument("--density", required=True)
    walk.add_argument("--N", type=int, required=True)
    walk.add_argument("--paths", type=int, required=True)
    walk.add_argument("--seed", type=int, required=True)
    walk.add_argument("--scaling", choices=("clt", "lln", "sturm"), default="clt")
    walk.add_argument("--out")
    walk.set_defaults(func=_cmd_walk)

    verify = sub.add_parser("verify", help="run a theorem verification check")
    verify.add_argument("check", choices=("clt", "llt", "lln", "variance"))
    verify.add_argument("--config", required=True)
    verify.add_argument("--out")
    verify.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, KeyError) as exc:
        return _error(f"configuration error: {exc}", 2)
    except Exception as exc:  # quadrature/truncation/boundary failures
        return _error(f"computation failed: {exc}", 1)


if __name__ == "__main__":
    sys.exit(main())
