"""Command-line front end for the experiment harness.

Subcommands: ``run <config.json>``, ``verify <suite>``,
``sweep <template.json> <grid.json>``, ``probe <conjecture> [budget]``.
Exit codes: 0 success, 1 assertion failure, 2 config error, 3 budget
exceeded.  The default output directory is ``$SEQPRED_OUT_DIR`` or
``./seqpred_out``.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .divergences import DEFAULT_BUDGET_LEAVES, BudgetExceededError
from .harness import (
    EXIT_ASSERTION,
    EXIT_BUDGET,
    EXIT_CONFIG,
    EXIT_OK,
    VERIFY_SUITES,
    ConfigError,
    ExperimentConfig,
    probe_conjectures,
    run,
    sweep,
    verify,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqpred",
        description="Sequence-prediction experiments: divergences, dominance, counterexamples.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out-dir", default=None, help="output directory (default $SEQPRED_OUT_DIR)")
        p.add_argument("--budget-leaves", type=int, default=None,
                       help="exact-enumeration leaf budget (default 2^24)")
        p.add_argument("--paths", type=int, default=None, help="Monte Carlo path count override")
        p.add_argument("--horizon", type=int, default=None, help="horizon override")

    p_run = sub.add_parser("run", help="run one scenario from a JSON config")
    p_run.add_argument("config", help="path to the experiment config JSON")
    add_common(p_run)

    p_verify = sub.add_parser("verify", help="run a named verification suite")
    p_verify.add_argument("suite", choices=sorted(VERIFY_SUITES))
    add_common(p_verify)

    p_sweep = sub.add_parser("sweep", help="run a config template over a parameter grid")
    p_sweep.add_argument("template", help="path to the template config JSON")
    p_sweep.add_argument("grid", help="path to the grid JSON (dotted config paths -> value lists)")
    add_common(p_sweep)

    p_probe = sub.add_parser("probe", help="randomized counterexample probe for a conjecture")
    p_probe.add_argument("conjecture", type=int, choices=(1, 2, 3))
    p_probe.add_argument("budget", type=int, nargs="?", default=30,
                         help="number of probe instances (default 30)")
    add_common(p_probe)
    return parser


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc


def _apply_overrides(raw: dict, args: argparse.Namespace) -> dict:
    over = {
        "seed": args.seed,
        "budget_leaves": args.budget_leaves,
        "paths": args.paths,
        "horizon": args.horizon,
        "out_dir": args.out_dir,
    }
    for key, value in over.items():
        if value is not None:
            raw[key] = value
    return raw


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            raw = _apply_overrides(dict(_load_json(args.config)), args)
            report = run(ExperimentConfig.from_dict(raw), out_dir=args.out_dir)
            print(report.to_json())
            if report.status == "INCOMPLETE":
                return EXIT_BUDGET
            return EXIT_OK if report.ok else EXIT_ASSERTION

        if args.command == "verify":
            status, report = verify(
                args.suite,
                seed=args.seed if args.seed is not None else 0,
                out_dir=args.out_dir,
                budget_leaves=args.budget_leaves or DEFAULT_BUDGET_LEAVES,
            )
            for v in report.verdicts:
                mark = "PASS" if v["passed"] else "FAIL"
                print(f"{mark} {v['claim']}: value={v['value']} tolerance={v['tolerance']}")
            print(f"verify {args.suite}: {'OK' if status == EXIT_OK else 'FAILED'} "
                  f"({sum(v['passed'] for v in report.verdicts)}/{len(report.verdicts)} assertions, "
                  f"{report.wall_clock_s:.1f}s)")
            return status

        if args.command == "sweep":
            template = _apply_overrides(dict(_load_json(args.template)), args)
            grid = _load_json(args.grid)
            if not isinstance(grid, dict):
                raise ConfigError("grid JSON must be an object mapping config paths to value lists")
            reports, agg = sweep(template, grid, out_dir=args.out_dir)
            print(f"{len(reports)} sweep points -> {agg}")
            return EXIT_OK

        if args.command == "probe":
            report = probe_conjectures(
                args.conjecture,
                budget=args.budget,
                seed=args.seed if args.seed is not None else 0,
                horizon=args.horizon or 4096,
                paths=args.paths or 16,
                out_dir=args.out_dir,
            )
            print(report.to_json())
            return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
