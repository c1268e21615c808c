"""Command-line entry point.

Exit codes: 0 when every check row passes, 1 when any fails, 2 on usage or
schema errors.  Reports are written atomically; identical configuration and
seed produce identical bytes.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .checks import SUITES, run_suites
from .config import RunConfig, load_config
from .converse import NiceFamilyDataset, build_f, fit_A, validate_nice_family
from .eisenstein import EisensteinSeries, SpectralContext, fourier_coefficients
from .modgroup import cusps
from .report import VerificationReport, write_atomic

USAGE_ERROR = 2


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key = value config file (sections allowed)")
    p.add_argument("--level", type=int)
    p.add_argument("--weight", choices=["1/2", "3/2"])
    p.add_argument("--c-max", dest="c_max", type=int)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--w-re", dest="w_re", type=float)
    p.add_argument("--w-im", dest="w_im", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--out", help="report path (default: stdout)")
    p.add_argument("--csv", action="store_const", const=True, default=None,
                   help="flatten check rows to CSV")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="eisenkit",
        description="half-integral weight Eisenstein series verification toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    for name in ("cusps", "check-cocycle", "check-theta", "check-twist",
                 "check-lambda", "reconstruct", "fit-a"):
        p = sub.add_parser(name)
        _add_common(p)

    p = sub.add_parser("eval")
    _add_common(p)
    p.add_argument("--cusp-index", type=int, default=1)
    p.add_argument("--z", required=True, help="point as 're,im'")

    p = sub.add_parser("fourier")
    _add_common(p)
    p.add_argument("--cusp-index", type=int, default=1)
    p.add_argument("--at-cusp", type=int, default=1)

    p = sub.add_parser("validate")
    _add_common(p)
    p.add_argument("dataset", help="family dataset JSON file")
    return ap


def _config_from(args) -> RunConfig:
    overrides = {k: getattr(args, k, None)
                 for k in ("level", "weight", "c_max", "n_max", "w_re", "w_im",
                           "seed", "threads", "out", "csv")}
    return load_config(args.config, overrides)


def _emit(report: VerificationReport, cfg: RunConfig) -> int:
    data = report.csv_bytes() if cfg.csv else report.json_bytes()
    if cfg.out:
        write_atomic(cfg.out, data)
    else:
        sys.stdout.buffer.write(data)
    for line in report.summary_lines():
        print(line, file=sys.stderr)
    return 0 if report.all_pass else 1


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help
        return int(exc.code or 0)
    try:
        cfg = _config_from(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return USAGE_ERROR

    cmd = args.command
    try:
        if cmd == "cusps":
            return _emit(run_suites(["cusps"], cfg), cfg)
        if cmd == "check-cocycle":
            return _emit(run_suites(["check-cocycle"], cfg), cfg)
        if cmd == "check-theta":
            return _emit(run_suites(["check-theta"], cfg), cfg)
        if cmd == "check-twist":
            return _emit(run_suites(["check-twist"], cfg), cfg)
        if cmd == "check-lambda":
            return _emit(run_suites(["check-lambda", "check-contour"], cfg), cfg)
        if cmd == "reconstruct":
            return _emit(run_suites(["check-roundtrip", "check-sensitivity"], cfg), cfg)
        if cmd == "eval":
            return _cmd_eval(args, cfg)
        if cmd == "fourier":
            return _cmd_fourier(args, cfg)
        if cmd == "validate":
            return _cmd_validate(args, cfg)
        if cmd == "fit-a":
            return _emit(run_suites(["check-roundtrip"], cfg), cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    raise AssertionError("unreachable")


def _cmd_eval(args, cfg: RunConfig) -> int:
    try:
        re_s, im_s = args.z.split(",")
        z = complex(float(re_s), float(im_s))
    except Exception:
        print("error: --z expects 're,im'", file=sys.stderr)
        return USAGE_ERROR
    ctx = SpectralContext(cfg.level, cfg.weight_fraction)
    series = EisensteinSeries(ctx, args.cusp_index, cfg.c_max)
    val = complex(series.eval(z, cfg.w))
    out = {"level": cfg.level, "weight": cfg.weight, "cusp_index": args.cusp_index,
           "z": [z.real, z.imag], "w": [cfg.w.real, cfg.w.imag],
           "value": [val.real, val.imag],
           "tail_estimate": series.tail(cfg.w, z.imag)}
    payload = (json.dumps(out, indent=2, sort_keys=True) + "\n").encode()
    if cfg.out:
        write_atomic(cfg.out, payload)
    else:
        sys.stdout.buffer.write(payload)
    return 0


def _cmd_fourier(args, cfg: RunConfig) -> int:
    ctx = SpectralContext(cfg.level, cfg.weight_fraction)
    series = EisensteinSeries(ctx, args.cusp_index, cfg.c_max)
    exp = fourier_coefficients(series, args.at_cusp, cfg.w, n_max=cfg.n_max,
                               heights=cfg.heights)
    payload = (json.dumps(exp.to_json(), indent=2, sort_keys=True) + "\n").encode()
    if cfg.out:
        write_atomic(cfg.out, payload)
    else:
        sys.stdout.buffer.write(payload)
    return 0


def _cmd_validate(args, cfg: RunConfig) -> int:
    try:
        ds = NiceFamilyDataset.load(args.dataset)
    except FileNotFoundError:
        print(f"error: no such file {args.dataset}", file=sys.stderr)
        return USAGE_ERROR
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        print(f"schema error in {args.dataset}: {exc}", file=sys.stderr)
        return USAGE_ERROR
    try:
        rep = validate_nice_family(ds)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    return _emit(rep, cfg)


if __name__ == "__main__":
    raise SystemExit(main())
