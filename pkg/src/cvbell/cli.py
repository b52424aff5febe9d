"""
Command-line driver::

    cvbell sweep  --zeta-min 0 --zeta-max 1.5 --steps 31 --levels 0,1,inf --method both
    cvbell verify --tolerance 1e-8
    cvbell figure fig1 --output fig1.csv

Exit status: 0 success, 1 numeric or check failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys

import yaml

from .checks import DEFAULT_ZETAS, VerifyContext, run_checks
from .sweep import ConfigError, NumericFailure, SweepConfig, figure_config, render, run_sweep, write_atomic

log = logging.getLogger("cvbell")

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2

_SWEEP_KEYS = {
    "zeta_min": float,
    "zeta_max": float,
    "steps": int,
    "levels": None,
    "family": str,
    "method": str,
    "cutoff": None,
    "tolerance": float,
    "output": str,
    "format": str,
    "jobs": int,
}


class UsageError(Exception):
    pass


def _parse_cutoff(value):
    if value is None:
        return None
    if isinstance(value, str) and value.strip().lower() == "auto":
        return None
    try:
        return int(value)
    except (TypeError, ValueError):
        raise UsageError(f"cutoff must be an integer or 'auto', got {value!r}") from None


def _parse_levels(value):
    if isinstance(value, str):
        return [part for part in value.split(",") if part.strip()]
    if isinstance(value, (int, float)):
        return [value]
    return list(value)


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError(f"config {path} must be a mapping")
    out = {}
    for key, value in data.items():
        key = str(key).replace("-", "_")
        if key not in _SWEEP_KEYS:
            raise UsageError(f"unknown config key {key!r}")
        out[key] = value
    return out


def _sweep_config(args) -> SweepConfig:
    values = _load_config(args.config) if args.config else {}
    for key in _SWEEP_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    try:
        for key, conv in _SWEEP_KEYS.items():
            if key in values and conv is not None:
                values[key] = conv(values[key])
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad config value: {exc}") from None
    if "cutoff" in values:
        values["cutoff"] = _parse_cutoff(values["cutoff"])
    if "levels" in values:
        values["levels"] = _parse_levels(values["levels"])
    if "method" in values:
        values["method"] = {"closed_form": "closed"}.get(values["method"], values["method"])
    return SweepConfig(**values)


def _emit(config: SweepConfig) -> int:
    records = run_sweep(config)
    text = render(records, config.format)
    if config.output == "-":
        sys.stdout.write(text)
    else:
        write_atomic(config.output, text)
        log.info("wrote %d records to %s", len(records), config.output)
    return EXIT_OK


def cmd_sweep(args) -> int:
    return _emit(_sweep_config(args).validate())


def cmd_figure(args) -> int:
    config = figure_config(args.which, args.output, method=args.method, cutoff=_parse_cutoff(args.cutoff))
    config.format = args.format
    return _emit(config.validate())


def cmd_verify(args) -> int:
    zetas = DEFAULT_ZETAS if args.zeta is None else tuple(args.zeta)
    ctx = VerifyContext(tolerance=args.tolerance, cutoff=_parse_cutoff(args.cutoff), zetas=zetas)
    results = run_checks(ctx)
    lines = [r.line() for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} checks passed")
    report = "\n".join(lines) + "\n"
    sys.stdout.write(report)
    if args.report:
        write_atomic(args.report, report)
    return EXIT_OK if passed == len(results) else EXIT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cvbell", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="tabulate I, F and the maximal Bell value over a zeta grid")
    sw.add_argument("--config", help="YAML/JSON file with sweep settings; flags override it")
    sw.add_argument("--zeta-min", type=float)
    sw.add_argument("--zeta-max", type=float)
    sw.add_argument("--steps", type=int)
    sw.add_argument("--levels", help='comma list of degeneracy levels, "inf" for no truncation')
    sw.add_argument("--family", choices=["pseudospin", "parity"])
    sw.add_argument("--method", choices=["closed", "matrix", "both"])
    sw.add_argument("--cutoff", help="per-mode n_max, or 'auto'")
    sw.add_argument("--tolerance", type=float)
    sw.add_argument("--output", help="output file, '-' for stdout")
    sw.add_argument("--format", choices=["csv", "json"])
    sw.add_argument("--jobs", type=int)
    sw.set_defaults(func=cmd_sweep)

    ve = sub.add_parser("verify", help="run the invariant checks")
    ve.add_argument("--tolerance", type=float, default=1e-8)
    ve.add_argument("--cutoff", default="auto", help="force a per-mode n_max for truncation-sensitive checks")
    ve.add_argument("--zeta", type=float, action="append", help="squeezing value(s) to probe; repeatable")
    ve.add_argument("--report", help="also write the report to this file")
    ve.set_defaults(func=cmd_verify)

    fi = sub.add_parser("figure", help="emit the level {0,1,2,3,inf} dataset on zeta in [0, 3]")
    fi.add_argument("which", choices=["fig1", "fig2"])
    fi.add_argument("--output", required=True)
    fi.add_argument("--method", choices=["closed", "matrix", "both"], default="closed")
    fi.add_argument("--cutoff", default="auto")
    fi.add_argument("--format", choices=["csv", "json"], default="csv")
    fi.set_defaults(func=cmd_figure)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        parser.error(str(exc))  # exits with status 2
    except NumericFailure as exc:
        print(f"cvbell: numeric failure at {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as exc:
        print(f"cvbell: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
