"""Command line front end: ``mfflow run|compare|presets|oracle``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import ConfigError, OracleConfig, build_config, default_output_root, load_config_file
from .oracle import ScalarFlow, comparison_table, terminal_error
from .presets import get_preset, presets
from .runner import EXIT_AUDIT, EXIT_CONFIG, EXIT_OK, CompareError, compare, run

# flag -> config key
RUN_FLAGS = {
    "d": int,
    "m": int,
    "n": int,
    "N_pop": int,
    "target": str,
    "mode": str,
    "half_width": float,
    "h": float,
    "T": int,
    "record_every": int,
    "seed": int,
    "train_on": str,
    "fit_t_lo": float,
    "fit_t_hi": float,
}


def _add_run(sub):
    p = sub.add_parser("run", help="run a preset or a config file")
    p.add_argument("--preset", help="named preset (see `mfflow presets`)")
    p.add_argument("--config", help="flat 'key = value' config file")
    p.add_argument("--output-dir", help="run directory (preset: parent of its run directories)")
    for key, typ in RUN_FLAGS.items():
        p.add_argument("--" + key.replace("_", "-"), dest=key, type=typ, default=None)
    p.add_argument("--alpha", type=float, default=None, help="oracle runs only")


def _add_compare(sub):
    p = sub.add_parser("compare", help="tabulate summaries of finished runs")
    p.add_argument("run_dirs", nargs="+")
    p.add_argument("--out", help="write CSV here instead of stdout")


def _add_oracle(sub):
    p = sub.add_parser("oracle", help="Euler vs closed-form table for F(x)=x^-alpha")
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--h", type=float, default=1e-4)
    p.add_argument("--T", type=int, default=10_000)
    p.add_argument("--record-every", dest="record_every", type=int, default=1000)
    p.add_argument("--out", help="write CSV here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mfflow", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_run(sub)
    _add_compare(sub)
    sub.add_parser("presets", help="list shipped presets")
    _add_oracle(sub)
    return parser


def _cmd_run(args) -> int:
    if not args.preset and not args.config:
        raise ConfigError("run needs --preset and/or --config")
    raw = load_config_file(args.config) if args.config else {}
    flags = {k: getattr(args, k) for k in (*RUN_FLAGS, "alpha") if getattr(args, k) is not None}
    if args.preset:
        preset = get_preset(args.preset)
        layered = {**raw, **flags}
        jobs = []
        for subname, base in preset.runs:
            jobs.append((subname, build_config(dict(layered), base)))
        root = Path(args.output_dir) if args.output_dir else default_output_root() / preset.name
        targets = [(root / s if s else root, cfg) for s, cfg in jobs]
    else:
        cfg = build_config({**raw, **flags})
        out = args.output_dir or cfg.output_dir or default_output_root() / cfg.run_id()
        targets = [(Path(out), cfg)]
    worst = EXIT_OK
    for run_dir, cfg in targets:
        status = run(cfg, run_dir)
        print(f"{run_dir}: exit {status}")
        worst = max(worst, status)
    return worst


def _cmd_oracle(args) -> int:
    cfg = OracleConfig(args.alpha, args.h, args.T, args.record_every)
    flow = ScalarFlow(cfg.alpha)
    table = comparison_table(flow, cfg.h, cfg.T, cfg.record_every)
    if args.out:
        Path(args.out).write_text(table)
    else:
        sys.stdout.write(table)
    return EXIT_OK if terminal_error(flow, cfg.h, cfg.T) <= cfg.tolerance else EXIT_AUDIT


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "compare":
            text = compare(args.run_dirs, args.out)
            if not args.out:
                sys.stdout.write(text)
            return EXIT_OK
        if args.command == "presets":
            for p in presets():
                print(f"{p.name:22s} {p.description}")
            return EXIT_OK
        if args.command == "oracle":
            return _cmd_oracle(args)
    except (ConfigError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CompareError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
