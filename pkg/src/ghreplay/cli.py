"""Command-line entry point.

Subcommands: ``generate`` (synthetic datasets), ``run`` (transfer
scenario), ``baseline`` (fresh model on one phase), ``compare``
(transferred vs fresh first-eval table). Every command is deterministic
under a fixed spec; flags override spec values. Exit codes: 0 success,
1 runtime failure, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import experiment, trainer
from .checkpoint import save_checkpoint
from .experiment import SpecError


def _spec_overrides(args: argparse.Namespace) -> dict:
    overrides: dict = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "out", None) is not None:
        overrides["out_dir"] = args.out
    if getattr(args, "replay_size", None) is not None:
        overrides.setdefault("scenario", {})["replay_size"] = args.replay_size
    if getattr(args, "memory_strategy", None) is not None:
        overrides.setdefault("memory", {})["strategy"] = args.memory_strategy
    return overrides


def _resolve(args: argparse.Namespace) -> tuple[dict, Path]:
    spec = experiment.resolve_spec(args.spec, args.preset, _spec_overrides(args))
    out_dir = Path(spec["out_dir"])
    return spec, out_dir


def cmd_generate(args: argparse.Namespace) -> int:
    spec, out_dir = _resolve(args)
    written = experiment.generate_datasets(spec, out_dir)
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    spec, out_dir = _resolve(args)
    phases, _ = experiment.build_phases(spec, out_dir)
    scenario = experiment.build_scenario(spec, phases)
    model_cfg = experiment.build_model_config(spec)
    memory_cfg = experiment.build_memory_config(spec)

    result = trainer.run_scenario(
        scenario,
        model_cfg,
        memory_cfg,
        retention=args.retention,
        record_memory=args.dump_memory,
    )

    out_dir.mkdir(parents=True, exist_ok=True)
    curve_path = out_dir / "curve.csv"
    trainer.write_curve_csv(curve_path, result.curve)
    trainer.write_boundaries_csv(trainer.boundaries_path_for(curve_path), result.curve)
    save_checkpoint(
        out_dir / "checkpoint.npz",
        model_cfg,
        result.state.params,
        result.state.adam,
        result.state.memory,
        {
            "replay": result.state.replay_rng.get_state(),
            "memory": result.state.memory_rng.get_state(),
        },
    )
    print(f"wrote {curve_path}")
    print(f"wrote {trainer.boundaries_path_for(curve_path)}")
    print(f"wrote {out_dir / 'checkpoint.npz'}")
    if args.retention:
        retention_path = out_dir / "retention.csv"
        trainer.write_retention_csv(retention_path, result.retention)
        print(f"wrote {retention_path}")
    if args.dump_memory:
        memory_path = out_dir / "memory.csv"
        trainer.write_memory_csv(memory_path, result.memory_rows)
        print(f"wrote {memory_path}")
    return 0


def cmd_baseline(args: argparse.Namespace) -> int:
    spec, out_dir = _resolve(args)
    phases, _ = experiment.build_phases(spec, out_dir)
    scenario = experiment.build_scenario(spec, phases)
    model_cfg = experiment.build_model_config(spec)
    memory_cfg = experiment.build_memory_config(spec)
    if all(p.label != args.phase for p in phases):
        raise SpecError(
            f"unknown phase {args.phase!r}, expected one of "
            f"{', '.join(p.label for p in phases)}"
        )
    result = trainer.run_baseline(scenario, model_cfg, memory_cfg, args.phase)
    out_dir.mkdir(parents=True, exist_ok=True)
    curve_path = out_dir / f"baseline_{args.phase}.csv"
    trainer.write_curve_csv(curve_path, result.curve)
    trainer.write_boundaries_csv(trainer.boundaries_path_for(curve_path), result.curve)
    print(f"wrote {curve_path}")
    print(f"wrote {trainer.boundaries_path_for(curve_path)}")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    run_curve = Path(args.run_curve)
    run_points = trainer.read_curve_csv(run_curve)
    run_starts = trainer.read_boundaries_csv(trainer.boundaries_path_for(run_curve))
    baselines = []
    for base_path in args.baselines:
        base_path = Path(base_path)
        starts = trainer.read_boundaries_csv(trainer.boundaries_path_for(base_path))
        if len(starts) != 1:
            raise ValueError(f"{base_path}: baseline must cover exactly one phase")
        baselines.append((starts[0][0], trainer.read_curve_csv(base_path)))
    rows = trainer.compare_transfer(run_points, run_starts, baselines)
    header = f"{'phase':<10} {'boundary':>8} {'transferred':>12} {'fresh':>12} {'ratio':>8}  result"
    print(header)
    for r in rows:
        print(
            f"{r.phase:<10} {r.boundary_update:>8} {r.transferred_mse:>12.6g} "
            f"{r.fresh_mse:>12.6g} {r.ratio:>8.3g}  "
            f"{'pass' if r.transfer_benefit else 'fail'}"
        )
    if args.out is not None:
        out_path = Path(args.out)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        trainer.write_compare_csv(out_path, rows)
        print(f"wrote {out_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ghreplay",
        description="Online LSTM training with episodic replay across greenhouse datasets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", type=Path, default=None, help="experiment spec JSON file")
    common.add_argument(
        "--preset",
        choices=sorted(experiment.PRESET_SPECS),
        default=None,
        help="base defaults to merge the spec into (default: desk)",
    )
    common.add_argument("--seed", type=int, default=None, help="override the spec seed")
    common.add_argument("--out", type=str, default=None, help="override the spec output directory")

    run_flags = argparse.ArgumentParser(add_help=False)
    run_flags.add_argument(
        "--replay-size", type=int, default=None, help="replayed samples per update (0 disables replay)"
    )
    run_flags.add_argument(
        "--memory-strategy",
        choices=["per-element", "per-sample", "per-batch"],
        default=None,
        help="memory substitution strategy",
    )

    p_gen = sub.add_parser("generate", parents=[common], help="write synthetic greenhouse CSVs")
    p_gen.set_defaults(func=cmd_generate)

    p_run = sub.add_parser("run", parents=[common, run_flags], help="run the transfer scenario")
    p_run.add_argument(
        "--retention",
        action="store_true",
        help="also evaluate earlier phases' test sets at each evaluation",
    )
    p_run.add_argument(
        "--dump-memory",
        action="store_true",
        help="record per-update memory occupancy fractions by origin label",
    )
    p_run.set_defaults(func=cmd_run)

    p_base = sub.add_parser(
        "baseline", parents=[common, run_flags], help="train a fresh model on a single phase"
    )
    p_base.add_argument("--phase", required=True, help="phase (greenhouse) label to train on")
    p_base.set_defaults(func=cmd_baseline)

    p_cmp = sub.add_parser("compare", help="compare a run curve against fresh baselines")
    p_cmp.add_argument("run_curve", type=Path, help="curve CSV produced by `run`")
    p_cmp.add_argument("baselines", nargs="+", type=Path, help="baseline curve CSVs")
    p_cmp.add_argument("--out", type=str, default=None, help="also write the table as CSV")
    p_cmp.set_defaults(func=cmd_compare)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename or exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
