"""Command-line entry point."""
from __future__ import annotations

import argparse
import sys
import traceback
from typing import Optional, Sequence

from . import __version__
from .interp import format_trace
from .orchestrator import (ARCHITECTURES, EXIT_INPUT, EXIT_INTERNAL, EXIT_OK, FIXED_MAX_K,
                           STRATEGIES, UNSUPPORTED_STRATEGIES, InputError, PipelineConfig,
                           load_spec, prepare, run_pipeline)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="wbfuzz",
        description="Generate test suites for MiniC programs by fuzzing and bounded model checking.")
    p.add_argument("benchmark", metavar="BENCHMARK_PATH", help="MiniC source file")
    p.add_argument("-a", "--arch", type=int, choices=ARCHITECTURES, default=32,
                   help="data model: 32 (ILP32) or 64 (LP64)")
    p.add_argument("-p", "--property", metavar="PROPERTY_FILE",
                   help="coverage property (default: cover calls to the error function)")
    p.add_argument("-s", "--strategy", default="incr",
                   choices=STRATEGIES + UNSUPPORTED_STRATEGIES,
                   help="incr: incremental unwinding; fixed: one pass at --max-k")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fuzz-budget", type=float, metavar="S",
                   help="fuzzing seconds (default 150, or 70 for branch coverage)")
    p.add_argument("--bmc-budget", type=float, metavar="S", default=700.0)
    p.add_argument("--selective-budget", type=float, metavar="S", default=50.0)
    p.add_argument("--fuzz-iters", type=int, metavar="N",
                   help="bound fuzzing by iterations instead of time")
    p.add_argument("--selective-iters", type=int, metavar="N",
                   help="bound selective fuzzing by trials instead of time")
    p.add_argument("--k-step", type=int, default=5, metavar="N")
    p.add_argument("--max-k", type=int, metavar="N",
                   help=f"largest unwinding bound (unlimited for incr, {FIXED_MAX_K} for fixed)")
    p.add_argument("--no-slice", action="store_true", help="disable cone-of-influence slicing")
    p.add_argument("--no-fold", action="store_true", help="disable constant folding")
    p.add_argument("--error-function", metavar="NAME",
                   help="error function to reach (overrides the property)")
    p.add_argument("--suite-dir", metavar="PATH", default="wbfuzz-out")
    p.add_argument("--testcase-dtd-version", default="1.1", metavar="V")
    p.add_argument("--parallel", action="store_true", help="run fuzzer and BMC concurrently")
    p.add_argument("--dump-goals", action="store_true", help="print the goal table and exit")
    p.add_argument("--trace", action="store_true", help="print the trace of every emitted test")
    p.add_argument("--dump-cnf", metavar="PATH", help="directory for DIMACS files of BMC queries")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def config_from_args(args: argparse.Namespace) -> PipelineConfig:
    return PipelineConfig(arch=args.arch, property_path=args.property, strategy=args.strategy,
                          fuzz_budget=args.fuzz_budget, bmc_budget=args.bmc_budget,
                          selective_budget=args.selective_budget, fuzz_iters=args.fuzz_iters,
                          selective_iters=args.selective_iters, seed=args.seed,
                          suite_dir=args.suite_dir, k_step=args.k_step, max_k=args.max_k,
                          slicing=not args.no_slice, folding=not args.no_fold,
                          error_function=args.error_function, parallel=args.parallel,
                          dump_cnf=args.dump_cnf, dtd_version=args.testcase_dtd_version)


def _dump_goals(cfg: PipelineConfig, path: str) -> int:
    try:
        cfg.check()
        spec = load_spec(cfg)
        with open(path, encoding="utf-8") as fh:
            source = fh.read()
        prog = prepare(source, spec, cfg.arch, path)
    except OSError as e:
        print(f"wbfuzz: cannot read program: {e}", file=sys.stderr)
        return EXIT_INPUT
    except InputError as e:
        print(f"wbfuzz: {e}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(prog.dump_goals())
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = config_from_args(args)
    if args.dump_goals:
        return _dump_goals(cfg, args.benchmark)
    try:
        result = run_pipeline(cfg, args.benchmark, log=print)
    except Exception:  # anything escaping the pipeline is a bug
        traceback.print_exc()
        return EXIT_INTERNAL
    if result.message:
        print(f"wbfuzz: {result.message}", file=sys.stderr)
    if args.trace:
        for i, t in enumerate(result.tests):
            print(f"--- testcase-{i}.xml ({t.source})")
            sys.stdout.write(format_trace(t.trace))
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
