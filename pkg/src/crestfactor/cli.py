"""Command-line entry point."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import ConfigurationError, CrestFactorError

log = logging.getLogger("crestfactor")


def _cmd_run(args) -> int:
    from .config import parse_config
    from .runner import output_root, run_batch

    scenarios = [parse_config(p).with_overrides(args.seed, args.dt, args.resolution) for p in args.config]
    root = Path(args.output) if args.output else output_root()
    status = 0
    for out_dir, code in run_batch(scenarios, root, args.workers):
        print(f"{out_dir}: {'ok' if code == 0 else 'verification failed'}")
        status = max(status, code)
    return status


def _cmd_verify(args) -> int:
    from .io import _jsonable
    from .runner import verify_dir

    report = verify_dir(args.trajectory_dir)
    print(json.dumps(report, indent=2, sort_keys=True, default=_jsonable))
    return 0 if report.get("pass", True) is not False else 1


def _cmd_classify(args) -> int:
    from .classifier import Thresholds, cf_statistics, classify
    from .crest import CrestSeries

    with open(args.series) as fh:
        series = CrestSeries.read_csv(fh)
    variants = series.variants
    variant = args.variant or ("forced" if "forced" in variants else variants[0])
    th = Thresholds(C_star=args.C_star, F_star=args.F_star, b_star=args.b_star)
    stats = cf_statistics(series.select(variant), args.trim, args.seed, args.stride)
    report = {"variant": variant, **classify(stats, th).to_dict()}
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def _cmd_calibrate(args) -> int:
    from .crest import GniConstants

    consts = GniConstants.load(Path(args.cache) if args.cache else None)
    c = consts.get(args.n, args.d, args.L, args.N, samples=args.samples, seed=args.seed)
    print(f"c(n={args.n}, d={args.d}, L={args.L!r}, N={args.N}) = {c!r}  [{consts.path}]")
    return 0


def _parse_params(items) -> dict:
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigurationError(f"--params expects key=value, got {item!r}")
        try:
            out[key] = json.loads(value)
        except json.JSONDecodeError:
            out[key] = value
    return out


def _cmd_oracle(args) -> int:
    from .config import from_mapping
    from .runner import DRIVERS, render_outputs

    params = _parse_params(args.params)
    time_keys = {"T", "t0", "samples", "periods", "spacing"}
    data = {"name": f"oracle-{args.name}", "equation": f"oracle:{args.name}",
            "physics": {k: v for k, v in params.items() if k not in time_keys and k != "preset"},
            "time": {k: v for k, v in params.items() if k in time_keys}}
    if "preset" in params:
        data["initial"] = {"preset": params["preset"]}
    s = from_mapping(data)
    texts = render_outputs(s, DRIVERS[s.equation](s))
    sys.stdout.write(texts["oracle.csv"])
    if args.report:
        sys.stdout.write(texts["verification.json"])
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="crestfactor", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one or more scenario files")
    r.add_argument("config", nargs="+")
    r.add_argument("--seed", type=int)
    r.add_argument("--dt", type=float)
    r.add_argument("--resolution", type=int)
    r.add_argument("--output", help="output root (default: $CRESTFACTOR_OUTPUT or ./runs)")
    r.add_argument("--workers", type=int)
    r.set_defaults(func=_cmd_run)

    v = sub.add_parser("verify", help="re-check the bounds on a stored trajectory")
    v.add_argument("trajectory_dir")
    v.set_defaults(func=_cmd_verify)

    c = sub.add_parser("classify", help="classify a crest-factor CSV series")
    c.add_argument("series")
    c.add_argument("--variant")
    c.add_argument("--trim", type=float, default=0.2)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--stride", type=int, default=1, help="decimation before the 0-1 test")
    c.add_argument("--C-star", dest="C_star", type=float, default=3.0)
    c.add_argument("--F-star", dest="F_star", type=float, default=6.0)
    c.add_argument("--b-star", dest="b_star", type=float, default=0.01)
    c.set_defaults(func=_cmd_classify)

    g = sub.add_parser("calibrate-gni", help="calibrate and cache an interpolation constant")
    g.add_argument("n", type=int)
    g.add_argument("d", type=int)
    g.add_argument("L", type=float)
    g.add_argument("N", type=int)
    g.add_argument("--samples", type=int, default=10_000)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--cache")
    g.set_defaults(func=_cmd_calibrate)

    o = sub.add_parser("oracle", help="evaluate a closed-form solution")
    o.add_argument("name", choices=["stokes2", "halfplane", "burgers", "stokes-green"])
    o.add_argument("--params", nargs="*", metavar="KEY=VALUE")
    o.add_argument("--report", action="store_true", help="also print the verification JSON")
    o.set_defaults(func=_cmd_oracle)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (CrestFactorError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
