"""Command-line harness: seeded single runs, benchmark campaigns, verification.

Exit codes: 0 success / full coverage, 1 coverage shortfall, 2 usage or
parse error, 3 internal consistency failure. The VSCIT_LOG environment
variable (off, info, trace) controls stderr logging.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import dataclass
from importlib import resources

from .fis import FisController, controller_from_config
from .model import ParseError, parse_config, parse_model, validate_config
from .pso import InternalCoverageError, RunResult, SwarmParams, generate_suite
from .verify import (
    read_suite,
    render_report_csv,
    render_report_text,
    suite_stats,
    verify_suite,
    write_suite,
)

LOG_ENV = "VSCIT_LOG"

EXIT_OK = 0
EXIT_SHORTFALL = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3

Target = tuple[str, str, str]  # (label, model spec, config text)


@dataclass
class RunConfig:
    """Everything one invocation needs; the seed for run r is base_seed + r."""

    targets: list[Target]
    variant: str = "fpso"
    swarm_size: int = 80
    iterations: int = 100
    runs: int = 1
    base_seed: int = 0
    out_path: str = ""
    mf_config: dict | None = None

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")
        if not self.targets:
            raise ValueError("nothing to run: no model/config given")


def load_preset(name_or_path: str) -> list[Target]:
    """Rows of a preset file: "label | model | config", '#' starts a comment.

    Accepts a shipped preset name ("table1", "table2", "table3") or a path.
    """
    if os.path.exists(name_or_path):
        with open(name_or_path) as fh:
            text = fh.read()
    else:
        res = resources.files("vscit").joinpath(f"presets/{name_or_path}.txt")
        if not res.is_file():
            raise ParseError(f"unknown preset {name_or_path!r} (and no such file)")
        text = res.read_text()
    targets: list[Target] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split("|")]
        if len(parts) != 3 or not all(parts):
            raise ParseError(
                f"preset line {line_no}: expected 'label | model | config', got {raw!r}"
            )
        targets.append((parts[0], parts[1], parts[2]))
    if not targets:
        raise ParseError(f"preset {name_or_path!r} has no benchmark rows")
    return targets


def _swarm_params(cfg: RunConfig, seed: int) -> SwarmParams:
    return SwarmParams(
        swarm_size=cfg.swarm_size,
        max_iterations=cfg.iterations,
        variant=cfg.variant,
        rng_seed=seed,
    )


def _fresh_controller(cfg: RunConfig) -> FisController | None:
    # Controller state (last emitted weight) must not leak between runs.
    if cfg.variant != "fpso" or cfg.mf_config is None:
        return None
    return controller_from_config(cfg.mf_config)


def _run_one(cfg: RunConfig, target: Target, seed: int) -> RunResult:
    label, model_spec, config_text = target
    model = parse_model(model_spec)
    config = validate_config(model, parse_config(config_text))
    return generate_suite(model, config, _swarm_params(cfg, seed),
                          controller=_fresh_controller(cfg))


def _write_run_log(result: RunResult, path: str) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("# test iteration fitness ncf d1 d2 nornubf w_selection w\n")
        for rec in result.iterations_log:
            nubf = "undef" if rec.nor_nubf is None else f"{rec.nor_nubf:.2f}"
            wsel = "undef" if rec.w_selection is None else f"{rec.w_selection:.2f}"
            fh.write(
                f"test={rec.test_index} iter={rec.iteration} fitness={rec.gbest_fitness} "
                f"ncf={rec.ncf:.2f} d1={rec.d1:.2f} d2={rec.d2:.2f} "
                f"nornubf={nubf} w_selection={wsel} w={rec.w:.3f}\n"
            )


def cmd_generate(cfg: RunConfig) -> int:
    """Single run: write the suite and its iteration log, print a summary line."""
    result = _run_one(cfg, cfg.targets[0], cfg.base_seed)
    out = cfg.out_path or "suite.txt"
    write_suite(result.suite, out)
    _write_run_log(result, out + ".log")
    print(f"size={len(result.suite)} seed={result.seed} variant={cfg.variant}")
    return EXIT_OK


def cmd_benchmark(cfg: RunConfig) -> int:
    """Seeded campaign over one or more configs; per-run sizes plus best/mean rows."""
    out = cfg.out_path or "benchmark.csv"
    rows: list[list[str]] = []
    for target in cfg.targets:
        label = target[0]
        results = [_run_one(cfg, target, cfg.base_seed + r) for r in range(cfg.runs)]
        best, mean, sizes = suite_stats(results)
        for r, size in enumerate(sizes):
            rows.append([label, cfg.variant, str(cfg.base_seed + r), str(size)])
        rows.append([label, cfg.variant, "best", str(best)])
        rows.append([label, cfg.variant, "mean", f"{mean:.2f}"])
        print(f"{label} variant={cfg.variant} runs={cfg.runs} best={best} mean={mean:.2f}")
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["config_label", "variant", "seed", "size"])
        writer.writerows(rows)
    return EXIT_OK


def cmd_verify(suite_path: str, csv_path: str | None = None) -> int:
    """Re-check a suite file against the coverage oracle and print the report."""
    suite = read_suite(suite_path)
    report = verify_suite(suite)
    print(render_report_text(report))
    if csv_path:
        with open(csv_path, "w", newline="\n") as fh:
            fh.write(render_report_csv(report))
    return EXIT_OK if report.complete else EXIT_SHORTFALL


def _add_run_options(parser: argparse.ArgumentParser, benchmark: bool) -> None:
    parser.add_argument("--model", help="model spec, e.g. '3^15' or '4^3 5^3 6^2'")
    parser.add_argument("--t", type=int, help="main interaction strength")
    parser.add_argument("--sub", action="append", default=[], metavar="I,J,..:S",
                        help="sub-configuration 'indices:strength'; repeatable")
    parser.add_argument("--variant", choices=("fpso", "cpso"), default="fpso")
    parser.add_argument("--swarm-size", type=int, default=80)
    parser.add_argument("--iterations", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0,
                        help="base RNG seed (run r uses seed + r)")
    parser.add_argument("--out", default="", help="output path (suite or CSV)")
    parser.add_argument("--mf-config", default="",
                        help="JSON file overriding membership functions / w bounds")
    if benchmark:
        parser.add_argument("--runs", type=int, default=30)
        parser.add_argument("--preset", default="",
                            help="benchmark matrix: table1, table2, table3, or a file path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vscit",
        description="Generate and verify variable-strength combinatorial test suites.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="one seeded run, writes a suite file")
    _add_run_options(gen, benchmark=False)

    bench = sub.add_parser("benchmark", help="seeded campaign, writes a CSV of sizes")
    _add_run_options(bench, benchmark=True)

    ver = sub.add_parser("verify", help="check a suite file for full coverage")
    ver.add_argument("suite", help="path to a suite file")
    ver.add_argument("--csv", default="", help="also write missing pairs as CSV")
    return parser


def _targets_from_args(args) -> list[Target]:
    if getattr(args, "preset", ""):
        if args.model or args.t is not None:
            raise ParseError("--preset cannot be combined with --model/--t")
        return load_preset(args.preset)
    if not args.model or args.t is None:
        raise ParseError("--model and --t are required (or --preset for benchmarks)")
    config_text = f"t={args.t}" + "".join(f"; sub={s}" for s in args.sub)
    return [(f"{args.model} {config_text}", args.model, config_text)]


def _run_config(args) -> RunConfig:
    mf_config = None
    if args.mf_config:
        try:
            with open(args.mf_config) as fh:
                mf_config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot load --mf-config {args.mf_config!r}: {exc}") from None
    return RunConfig(
        targets=_targets_from_args(args),
        variant=args.variant,
        swarm_size=args.swarm_size,
        iterations=args.iterations,
        runs=getattr(args, "runs", 1),
        base_seed=args.seed,
        out_path=args.out,
        mf_config=mf_config,
    )


def _configure_logging() -> None:
    levels = {"off": logging.WARNING, "info": logging.INFO, "trace": logging.DEBUG}
    level = levels.get(os.environ.get(LOG_ENV, "off").strip().lower(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        if args.command == "generate":
            return cmd_generate(_run_config(args))
        if args.command == "benchmark":
            return cmd_benchmark(_run_config(args))
        return cmd_verify(args.suite, args.csv or None)
    except (ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InternalCoverageError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
