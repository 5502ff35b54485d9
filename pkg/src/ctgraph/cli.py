"""Command-line surface tying the library together.

Subcommands: run, analyze, validate, curriculum, images.
Exit codes: 0 ok, 1 validation failure, 2 configuration error,
3 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from . import analytics
from .agents import (
    navigation_policy,
    optimal_policy,
    q_learn,
    random_policy,
    write_learning_curve,
)
from .config import GraphSpec, PRESET_NAMES, load_config, preset
from .dynamics import build_model, run_episode, write_transcripts_csv
from .errors import ConfigError, CtGraphError
from .observations import write_image_set
from .rewards import make_curriculum, write_curriculum
from .rng import RngStreams

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

Z_LIMIT = 4.0


def _add_spec_args(parser: argparse.ArgumentParser) -> None:
    src = parser.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", type=Path, help="path to a JSON configuration")
    src.add_argument("--preset", choices=PRESET_NAMES, help="named baseline configuration")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the configuration's master seed")


def _load_spec(args: argparse.Namespace) -> GraphSpec:
    if args.config is not None:
        spec = load_config(args.config)
        if args.seed is not None:
            from dataclasses import replace
            spec = replace(spec, seed=args.seed)
        return spec
    return preset(args.preset, seed=args.seed)


def _cmd_run(args: argparse.Namespace) -> int:
    spec = _load_spec(args)
    streams = RngStreams.from_seed(spec.seed)
    model = build_model(spec, streams)

    if args.agent == "qlearn":
        result = q_learn(spec, episodes=args.episodes, streams=streams)
        if args.curve:
            write_learning_curve(args.curve, result)
        tail = result.returns[-100:]
        mean_tail = sum(tail) / len(tail) if tail else 0.0
        print(f"episodes={args.episodes} final_100_mean_return={mean_tail:.4f} "
              f"states_seen={len(result.q_table)}")
        if args.out:
            print(f"note: --out ignored for qlearn; use --curve", file=sys.stderr)
        return EXIT_OK

    policies = {
        "random": lambda: random_policy(spec.shape.branching, streams),
        "navigation": lambda: navigation_policy(spec.shape.branching, streams),
        "optimal": lambda: optimal_policy(model.task),
    }
    policy = policies[args.agent]()
    transcripts = [run_episode(policy, model, streams) for _ in range(args.episodes)]
    if args.out:
        write_transcripts_csv(args.out, transcripts)
    total = sum(t.total_reward for t in transcripts)
    steps = sum(t.length for t in transcripts)
    truncated = sum(t.truncated for t in transcripts)
    print(f"episodes={args.episodes} steps={steps} total_reward={total:g} "
          f"truncated={truncated}" + (f" out={args.out}" if args.out else ""))
    return EXIT_OK


def _cmd_analyze(args: argparse.Namespace) -> int:
    spec = _load_spec(args)
    result = analytics.analyze_shape(spec.shape)
    print(analytics.format_analytics(spec.shape, result))
    if args.csv:
        fields = ["b", "d", "p"] + list(result.as_dict())
        row = [spec.shape.branching, spec.shape.depth, spec.shape.wait_prob,
               *result.as_dict().values()]
        with Path(args.csv).open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(fields)
            writer.writerow(row)
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    spec = _load_spec(args)
    streams = RngStreams.from_seed(spec.seed)
    rows = analytics.validate_spec(spec, args.episodes, streams)
    header = f"{'quantity':<18} {'closed_form':>14} {'estimate':>14} {'stderr':>12} {'z':>8}"
    print(header)
    print("-" * len(header))
    worst = 0.0
    for row in rows:
        print(f"{row.name:<18} {row.closed_form:>14.6g} {row.estimate:>14.6g} "
              f"{row.stderr:>12.3g} {row.z:>8.2f}")
        worst = max(worst, abs(row.z))
    print(f"throughput={rows[0].steps_per_second:,.0f} steps/s")
    if worst > Z_LIMIT:
        print(f"FAIL: |z| = {worst:.2f} exceeds {Z_LIMIT}", file=sys.stderr)
        return EXIT_VALIDATION
    print(f"OK: all |z| <= {Z_LIMIT}")
    return EXIT_OK


def _cmd_curriculum(args: argparse.Namespace) -> int:
    spec = _load_spec(args)
    streams = RngStreams.from_seed(spec.seed)
    tasks = make_curriculum(spec, args.mode, args.tasks, streams,
                            aligned_goals=args.aligned)
    manifest = write_curriculum(tasks, args.out, mode=args.mode)
    print(f"wrote {len(tasks)} task configs and {manifest}")
    return EXIT_OK


def _cmd_images(args: argparse.Namespace) -> int:
    spec = _load_spec(args)
    written = write_image_set(spec.obs, args.out)
    print(f"wrote {len(written) - 1} images and manifest to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctgraph",
        description="Configurable tree-graph decision environment: run agents, "
                    "compute closed-form statistics, and validate them by simulation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="roll episodes with a reference agent")
    _add_spec_args(p)
    p.add_argument("--agent", choices=("random", "navigation", "optimal", "qlearn"),
                   default="random")
    p.add_argument("--episodes", type=int, default=1)
    p.add_argument("--out", type=Path, default=None, help="transcript CSV path")
    p.add_argument("--curve", type=Path, default=None,
                   help="learning-curve CSV path (qlearn only)")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("analyze", help="print the closed-form statistics block")
    _add_spec_args(p)
    p.add_argument("--csv", type=Path, default=None, help="also write one CSV row")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("validate", help="closed form vs Monte Carlo with z-scores")
    _add_spec_args(p)
    p.add_argument("--episodes", type=int, default=100_000)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("curriculum", help="generate a multi-task curriculum")
    _add_spec_args(p)
    p.add_argument("--mode", choices=("reward", "images", "depth"), required=True)
    p.add_argument("--tasks", type=int, required=True)
    p.add_argument("--aligned", action="store_true",
                   help="depth mode: make shallower goals prefixes of deeper ones")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=_cmd_curriculum)

    p = sub.add_parser("images", help="dump the canonical class images as PGM")
    _add_spec_args(p)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=_cmd_images)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CtGraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
