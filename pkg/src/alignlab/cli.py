"""Command-line entry point.

Exit codes: 0 success, 1 configuration error, 2 certification failure
under ``--strict``, 3 numerical abort.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .config import load_config, load_sweep
from .errors import ConfigError, NumericalAbort
from .runner import run_certify, run_profile, run_sweep, run_train

EXIT_OK, EXIT_CONFIG, EXIT_CERT, EXIT_NAN = 0, 1, 2, 3


def build_parser():
    p = argparse.ArgumentParser(prog="alignlab", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train one seed")
    t.add_argument("--config", help="YAML run config (defaults when omitted)")
    t.add_argument("--seed", type=int, help="overrides the config seed")
    t.add_argument("--episodes", type=int, help="overrides trainer.episodes")
    t.add_argument("--out", help="output directory")

    s = sub.add_parser("sweep", help="sensitivity sweep over one parameter")
    s.add_argument("--spec", required=True, help="YAML sweep spec")
    s.add_argument("--workers", type=int, help="overrides the sweep file's worker count")
    s.add_argument("--out", help="output directory")

    pr = sub.add_parser("profile", help="measured vs predicted cost")
    pr.add_argument("--config")
    pr.add_argument("--steps", type=int, default=1000, help="timed steps per measurement (>= 1000)")
    pr.add_argument("--out")

    c = sub.add_parser("certify", help="stability certification report")
    c.add_argument("--config")
    c.add_argument("--strict", action="store_true", help="exit 2 if any condition fails")
    c.add_argument("--rollout-episodes", type=int, default=2, help="episodes used to measure moments")
    c.add_argument("--out")
    return p


def _dump_abort(out_dir, exc):
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "abort.json")
    with open(path, "w") as fh:
        json.dump({"error": str(exc), **exc.diagnostics}, fh, indent=2, sort_keys=True)
    return path


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out_dir = None
    try:
        if args.command == "sweep":
            spec = load_sweep(args.spec)
            if args.workers is not None:
                if args.workers < 1:
                    raise ConfigError("must be >= 1", "--workers")
                spec.workers = args.workers
            out_dir = args.out or spec.base.output_dir()
            rows, _ = run_sweep(spec, out_dir)
            print(f"sweep: {len(rows)} rows -> {os.path.join(out_dir, 'sweep.csv')}")
            return EXIT_OK

        cfg = load_config(args.config)
        out_dir = args.out or cfg.output_dir()
        if args.command == "train":
            if args.episodes is not None:
                if args.episodes < 1:
                    raise ConfigError("must be >= 1", "--episodes")
                cfg.trainer.episodes = args.episodes
            records, trainer = run_train(cfg, out_dir, seed=args.seed)
            for w in trainer.startup_warnings:
                print(f"WARNING: {w}", file=sys.stderr)
            print(f"train: {len(records)} episodes -> {os.path.join(out_dir, 'metrics.jsonl')}")
            return EXIT_OK
        if args.command == "profile":
            if args.steps < 1000:
                raise ConfigError("timing needs at least 1000 steps", "--steps")
            table, fit = run_profile(cfg, out_dir, min_steps=args.steps)
            for row in table:
                print(f"{row['section']:>9} {row['name']:<40} {row['value']:.6g}")
            return EXIT_OK
        if args.command == "certify":
            result = run_certify(cfg, out_dir, rollout_episodes=args.rollout_episodes)
            print(result.render(), end="")
            if args.strict and not result.passed:
                return EXIT_CERT
            return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalAbort as exc:
        path = _dump_abort(out_dir or ".", exc)
        print(f"numerical abort: {exc} (diagnostics in {path})", file=sys.stderr)
        return EXIT_NAN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
