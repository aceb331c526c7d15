"""barbf – command-line interface.

Console entry-point declared in pyproject.toml::

    [project.scripts]
    barbf = "barbf.cli:main"

Subcommands
-----------
barbf run        Run one optimization and write its trace.
barbf replicate  Repeat a run with independent seeds and summarise the best values.
barbf scan       Brute-force a problem's grid and report the grid optimum.
barbf presets    List the bundled experiment presets.
barbf validate   Verify the installation and environment.
barbf version    Print the installed barbf version.

Exit codes: 0 success, 2 configuration or argument error, 3 run failure,
1 when ``--strict`` is set and a replication failed.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import NoReturn, Optional, Sequence

EXIT_STRICT = 1
EXIT_CONFIG = 2
EXIT_RUN = 3

logger = logging.getLogger("barbf.cli")


def _add_run_options(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--config", type=str, default=None, help="Experiment JSON file")
    src.add_argument("--preset", type=str, default=None, help="Bundled experiment preset (see 'barbf presets')")
    p.add_argument("--problem", type=str, default=None, help="branin, ronkkonen2, ronkkonen3, hartmann4, rastrigin:<d>")
    p.add_argument(
        "--method", type=str, default=None,
        choices=["barbf", "m-barbf", "barbf-gridfree", "gmsrbf", "ego"],
        help="Optimizer (default: barbf)",
    )
    p.add_argument("--seed", type=int, default=None, help="Master seed")
    p.add_argument("--n-min", type=int, default=None, dest="n_min", help="Initial design size")
    p.add_argument("--n-max", type=int, default=None, dest="n_max", help="Total evaluation budget")
    p.add_argument("--grid-step", type=float, default=None, dest="grid_step", help="Candidate grid spacing")
    p.add_argument(
        "--candidates", type=int, default=None,
        help="Uniform candidates per iteration for sampled candidate sets",
    )
    p.add_argument("--mcmc-iters", type=int, default=None, dest="mcmc_iters", help="Sweeps per chain")
    p.add_argument("--c-slab", type=float, default=None, dest="c_slab", help="Slab multiplier C")
    p.add_argument("--out", type=str, default=None, help="Output directory (default: $BARBF_RESULTS_DIR/<name>)")
    p.add_argument(
        "--diagnostics", action="store_true",
        help="Record chain diagnostics and final acquisition scores",
    )


def _add_logging_options(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--log-level", type=str, default=None, dest="log_level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging level (default: $BARBF_LOG_LEVEL or INFO)",
    )
    p.add_argument("--quiet", action="store_true", help="Only log warnings and errors")


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="barbf",
        description="Bayesian adaptive RBF optimization with sampled expected improvement",
    )
    sub = p.add_subparsers(dest="command", metavar="COMMAND")

    # ── run ──────────────────────────────────────────────────────────────────
    run_p = sub.add_parser("run", help="Run one optimization")
    _add_run_options(run_p)
    _add_logging_options(run_p)

    # ── replicate ────────────────────────────────────────────────────────────
    rep_p = sub.add_parser(
        "replicate",
        help="Repeat a run with independent seeds",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        description=(
            "Run independent replications and write summary.json, curves.csv\n"
            "and one trace per replication.\n\n"
            "Examples:\n"
            "  barbf replicate --preset branin-barbf-desk --jobs 4\n"
            "  barbf replicate --problem ronkkonen2 --method ego --reps 20\n"
            "  barbf replicate --config my_study.json --reps 5 --strict"
        ),
    )
    _add_run_options(rep_p)
    rep_p.add_argument("--reps", type=int, default=None, help="Number of replications")
    rep_p.add_argument("--jobs", type=int, default=None, help="Worker processes (default: 1)")
    rep_p.add_argument("--strict", action="store_true", default=None, help="Exit 1 if any replication fails")
    _add_logging_options(rep_p)

    # ── scan ─────────────────────────────────────────────────────────────────
    scan_p = sub.add_parser("scan", help="Brute-force the grid optimum of a problem")
    scan_p.add_argument("--problem", type=str, required=True)
    scan_p.add_argument("--grid-step", type=float, default=None, dest="grid_step")
    scan_p.add_argument("--decimals", type=int, default=4, help="Precision for counting grid maximizers")
    _add_logging_options(scan_p)

    # ── presets ──────────────────────────────────────────────────────────────
    sub.add_parser("presets", help="List bundled experiment presets")

    # ── validate ─────────────────────────────────────────────────────────────
    sub.add_parser("validate", help="Verify the installation and environment")

    # ── version ──────────────────────────────────────────────────────────────
    sub.add_parser("version", help="Print the installed barbf version")

    return p


def _configure_logging(args) -> None:
    level = "WARNING" if getattr(args, "quiet", False) else (
        getattr(args, "log_level", None) or os.environ.get("BARBF_LOG_LEVEL", "INFO")
    )
    logging.basicConfig(
        level=getattr(logging, str(level).upper(), logging.INFO),
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )


def _fail(message: str, code: int) -> NoReturn:
    print(f"error: {message}", file=sys.stderr)
    sys.exit(code)


def build_experiment(args):
    """Experiment from ``--config``/``--preset`` (or defaults) with command-line overrides applied."""
    from barbf.config.presets import load_preset
    from barbf.config.run_config import Experiment
    from barbf.config.schema import load_experiment

    if args.config:
        exp = load_experiment(args.config)
    elif args.preset:
        exp = load_preset(args.preset)
    else:
        exp = Experiment()

    run = exp.run
    overrides = {
        "problem": args.problem,
        "method": args.method,
        "n_min": args.n_min,
        "n_max": args.n_max,
        "grid_step": args.grid_step,
        "n_candidates": args.candidates,
        "c_slab": args.c_slab,
        "seed": args.seed,
    }
    run = replace(run, **{k: v for k, v in overrides.items() if v is not None})
    if args.mcmc_iters is not None:
        run = replace(run, chain=replace(run.chain, n_iter=args.mcmc_iters))
    if args.diagnostics:
        run = replace(run, record_diagnostics=True)

    exp_overrides = {
        "reps": getattr(args, "reps", None),
        "jobs": getattr(args, "jobs", None),
        "strict": getattr(args, "strict", None),
        "out": args.out,
        "seed": args.seed,
    }
    return replace(exp, run=run, **{k: v for k, v in exp_overrides.items() if v is not None})


def _out_dir(exp, label: str) -> Path:
    from barbf.env import results_dir

    return Path(exp.out) if exp.out else results_dir() / (exp.name or label)


def _cmd_run(args) -> None:
    import numpy as np

    from barbf.errors import ObjectiveEvaluationError
    from barbf.main import run_single
    from barbf.optimizer.trace import write_trace

    try:
        exp = build_experiment(args)
    except ValueError as exc:
        _fail(str(exc), EXIT_CONFIG)
    cfg = exp.run if exp.run.seed is not None else replace(exp.run, seed=exp.seed)
    out = _out_dir(exp, f"{cfg.problem.replace(':', '')}-{cfg.method}-run")

    try:
        res = run_single(cfg, out=out)
    except ValueError as exc:
        _fail(str(exc), EXIT_CONFIG)
    except ObjectiveEvaluationError as exc:
        partial = write_trace(exc.trace, out / "trace.partial.jsonl")
        _fail(f"{exc} ({len(exc.trace)} evaluations kept in {partial})", EXIT_RUN)
    except RuntimeError as exc:
        _fail(str(exc), EXIT_RUN)

    print(f"Problem / method:   {cfg.problem} / {cfg.method}")
    print(f"Evaluations:        {len(res['trace'])}")
    print(f"Best value:         {res['best']:.6f}")
    print(f"Best point:         {np.round(res['x_best'], 6).tolist()}")
    print(f"Execution time:     {res['elapsed_s']:.2f} s")
    print(f"Output:             {out}")


def _cmd_replicate(args) -> None:
    from barbf.config.validator import validate_run_config
    from barbf.parallelization.replicate import ReplicationRunner
    from barbf.results.export import export_failures, export_results, export_traces

    try:
        exp = build_experiment(args)
    except ValueError as exc:
        _fail(str(exc), EXIT_CONFIG)
    issues = validate_run_config(exp.run)
    if exp.reps < 1:
        issues.append(f"--reps must be >= 1 (got {exp.reps})")
    if exp.jobs is not None and exp.jobs < 1:
        issues.append(f"--jobs must be >= 1 (got {exp.jobs})")
    if issues:
        _fail("Configuration validation failed: " + "; ".join(issues), EXIT_CONFIG)

    out = _out_dir(exp, f"{exp.run.problem.replace(':', '')}-{exp.run.method}")
    try:
        result = ReplicationRunner(jobs=exp.jobs or 1).run(exp.run, exp.reps, exp.seed)
        export_results(result.summary, result.curves, out)
        export_traces(result.traces, out)
        if result.failures:
            export_failures(result.failures, out)
    except (RuntimeError, OSError) as exc:
        _fail(str(exc), EXIT_RUN)

    s = result.summary
    print(s.table_row().to_string())
    print(f"Replications:       {s.n_success} ok, {s.n_failed} failed")
    print(f"Output:             {out}")
    if exp.strict and result.any_failed:
        print(f"error: {s.n_failed} replication(s) failed (--strict)", file=sys.stderr)
        sys.exit(EXIT_STRICT)


def _cmd_scan(args) -> None:
    import numpy as np

    from barbf.testbed.problems import get_problem, scan_grid

    try:
        problem = get_problem(args.problem)
        result = scan_grid(problem, args.grid_step)
    except ValueError as exc:
        _fail(str(exc), EXIT_CONFIG)

    maximizers = result.maximizers(args.decimals)
    print(f"Problem:            {problem.name}")
    print(f"Grid points:        {result.grid.size}")
    print(f"Grid maximum:       {result.best_value:.6f}")
    print(f"Argmax:             {np.round(result.argmax, 6).tolist()}")
    print(f"Maximizers ({args.decimals} dp): {len(maximizers)}")
    if problem.known_optimum is not None:
        print(f"Reference value:    {problem.known_optimum}")


def _cmd_presets() -> None:
    from barbf.config.presets import load_preset, preset_names

    for name in preset_names():
        exp = load_preset(name)
        print(f"{name:<24s} {exp.reps:>3d} reps  {exp.description}")


def _run_validate() -> None:
    """Quick environment health-check printed to stdout."""
    ok = True
    lines: list[str] = []

    for pkg in ("numpy", "scipy", "pandas", "marshmallow", "dotenv"):
        try:
            __import__(pkg)
            lines.append(f"  [OK]  {pkg}")
        except ImportError as exc:
            lines.append(f"  [ERR] {pkg}: {exc}")
            ok = False

    try:
        from barbf.config.presets import preset_names

        lines.append(f"  [OK]  {len(preset_names())} bundled presets")
    except Exception as exc:
        lines.append(f"  [ERR] presets: {exc}")
        ok = False

    for var in ("BARBF_HOME", "BARBF_RESULTS_DIR", "BARBF_LOG_LEVEL"):
        val = os.environ.get(var)
        lines.append(f"  [ENV] {var} = {val if val else '(not set)'}")

    print("barbf Environment Validation")
    print("=" * 40)
    for line in lines:
        print(line)
    print("=" * 40)
    print("PASS" if ok else "FAIL: see errors above")
    if not ok:
        sys.exit(1)


def main(argv: Optional[Sequence[str]] = None) -> None:
    from barbf.env import load_env

    load_env()

    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.command is None:
        parser.print_help()
        sys.exit(0)

    _configure_logging(args)

    # ── run ──────────────────────────────────────────────────────────────────
    if args.command == "run":
        _cmd_run(args)

    # ── replicate ────────────────────────────────────────────────────────────
    elif args.command == "replicate":
        _cmd_replicate(args)

    # ── scan ─────────────────────────────────────────────────────────────────
    elif args.command == "scan":
        _cmd_scan(args)

    # ── presets ──────────────────────────────────────────────────────────────
    elif args.command == "presets":
        _cmd_presets()

    # ── validate ─────────────────────────────────────────────────────────────
    elif args.command == "validate":
        _run_validate()

    # ── version ──────────────────────────────────────────────────────────────
    elif args.command == "version":
        from barbf import __version__
        print(f"barbf {__version__}")


if __name__ == "__main__":
    main()
