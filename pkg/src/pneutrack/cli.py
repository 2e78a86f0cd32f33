"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import csvio
from .config import ConfigError, RunConfig, dumps_config, load_config, loads_config
from .harness import compare_methods, compute_metrics, identify_hysteresis, run_episode, sweep
from .signals import PRESETS
from .tuner import MODES, Mode

log = logging.getLogger("pneutrack")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", type=Path, default=default, help="TOML configuration file")
    parser.add_argument("--out", type=Path, default=default if suppress else Path("."), help="output directory")
    parser.add_argument("--seed", type=int, default=default, help="override run.seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pneutrack", description=__doc__.splitlines()[0])
    _global_flags(parser, suppress=False)
    parser.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("identify", parents=[common], help="drive a pressure triangle and record the hysteresis loop")

    track = sub.add_parser("track", parents=[common], help="run one tracking episode")
    track.add_argument("--mode", choices=[m.value for m in MODES], default=None)
    track.add_argument("--reference", choices=sorted(PRESETS), default=None)

    compare = sub.add_parser("compare", parents=[common], help="run every controller mode on the same reference")
    compare.add_argument("--reference", choices=sorted(PRESETS), default=None)
    compare.add_argument("--workers", type=int, default=1)
    compare.add_argument("--traces", action="store_true", help="also write one trace CSV per mode")

    sw = sub.add_parser("sweep", parents=[common], help="vary one config key and record metrics")
    sw.add_argument("--param", required=True, help="dotted key, e.g. tuner.m_fb")
    sw.add_argument("--values", required=True, help="comma-separated values")
    sw.add_argument("--mode", choices=[m.value for m in MODES], default=None)

    sub.add_parser("dump-config", parents=[common], help="print the effective configuration")
    return parser


def _load(args) -> RunConfig:
    cfg = load_config(args.config) if args.config is not None else loads_config("")
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("run.seed", "must be an unsigned integer")
        cfg = replace(cfg, seed=args.seed)
    if getattr(args, "reference", None):
        cfg = cfg.with_reference(PRESETS[args.reference]())
    return cfg


def _parse_value(text: str):
    text = text.strip()
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    if text in ("true", "false"):
        return text == "true"
    return text


def run(args) -> int:
    cfg = _load(args)
    out: Path = args.out
    if args.command == "dump-config":
        sys.stdout.write(dumps_config(cfg))
        return EXIT_OK
    out.mkdir(parents=True, exist_ok=True)
    if args.command == "identify":
        table = identify_hysteresis(cfg)
        path = csvio.write_loop(table, out / cfg.output.loop)
        upper, lower = table.dead_zones()
        print(f"loop written to {path}")
        print(f"loop area {table.area():.4g} deg*kPa; dead zone upper {upper:.4g} kPa, lower {lower:.4g} kPa")
    elif args.command == "track":
        mode = Mode(args.mode) if args.mode else cfg.tuner.mode
        trace = run_episode(cfg, mode)
        csvio.write_trace(trace, out / cfg.output.trace)
        report = compute_metrics(trace)
        csvio.write_metrics({mode.value: report}, out / cfg.output.metrics)
        print(f"{mode.value}: rmse {report.rmse:.4g} deg, e_max {report.e_max:.4g}, e_min {report.e_min:.4g}")
    elif args.command == "compare":
        result = compare_methods(cfg, workers=args.workers)
        csvio.write_metrics(result.reports, out / cfg.output.metrics)
        if args.traces:
            stem = Path(cfg.output.trace)
            for method, trace in result.traces.items():
                csvio.write_trace(trace, out / f"{stem.stem}_{method}{stem.suffix}")
        print(result.table())
    elif args.command == "sweep":
        values = [_parse_value(v) for v in args.values.split(",") if v.strip()]
        if not values:
            raise ConfigError(args.param, "no sweep values given")
        mode = Mode(args.mode) if args.mode else cfg.tuner.mode
        results = sweep(cfg, args.param, values, mode)
        csvio.write_sweep(args.param, mode.value, results, out / "sweep.csv")
        for value, rep in results:
            print(f"{args.param}={value}: rmse {rep.rmse:.4g}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - map every runtime failure to one exit code
        log.debug("runtime failure", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
