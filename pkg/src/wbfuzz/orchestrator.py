"""The test-generation pipeline: fuzz, then incremental BMC, then selective fuzzing.

Every candidate test goes through the goal table, which replays it
before giving credit. The suite written to disk is then checked again by
:func:`validate_suite`, which knows nothing about the engines.
"""
from __future__ import annotations

import datetime as _dt
import glob
import hashlib
import os
import re
import threading
import time
from dataclasses import dataclass, field
from typing import Optional

from . import __version__
from .bmc import BmcConfig, run_incremental
from .formats import (CoverSpec, MalformedTestcase, SuiteMetadata, emit_metadata,
                      emit_testcase, emit_witness, parse_metadata, parse_property,
                      read_testcase, sha256_file)
from .frontend import FrontendError, parse_program
from .fuzz import FuzzReport, harvest_dictionary, run_fuzzer
from .goaltable import GoalTable
from .instrument import COVER_BRANCHES, COVER_ERROR, ERROR_CALL, InstrumentedProgram, inject_goals
from .interp import execute
from .sat.bitblast import WidthOverflow
from .selective import build_profile, generate_tests

FUZZ_BUDGET = 150.0
FUZZ_BUDGET_BRANCHES = 70.0
BMC_BUDGET = 700.0
SELECTIVE_BUDGET = 50.0
K_STEP = 5
FIXED_MAX_K = 10
ARCHITECTURES = (32, 64)
STRATEGIES = ("incr", "fixed")
UNSUPPORTED_STRATEGIES = ("kinduction", "falsi")

ZERO_BUDGET_NOTE = "zero budget: no engine ran"

EXIT_OK, EXIT_NO_ERROR_TEST, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3

_TESTCASE_RE = re.compile(r"testcase-(\d+)\.xml$")


class InputError(Exception):
    """Bad program, property or configuration; maps to exit code 2."""


class HashMismatch(Exception):
    pass


@dataclass
class PipelineConfig:
    arch: int = 32
    property_path: Optional[str] = None
    property_text: Optional[str] = None
    strategy: str = "incr"
    fuzz_budget: Optional[float] = None  # None: per-mode default
    bmc_budget: float = BMC_BUDGET
    selective_budget: float = SELECTIVE_BUDGET
    fuzz_iters: Optional[int] = None
    selective_iters: Optional[int] = None
    seed: int = 0
    suite_dir: str = "wbfuzz-out"
    k_step: int = K_STEP
    max_k: Optional[int] = None
    slicing: bool = True
    folding: bool = True
    error_function: Optional[str] = None  # overrides the property's function
    parallel: bool = False
    dump_cnf: Optional[str] = None
    dtd_version: str = "1.1"
    use_fuzz: bool = True
    use_bmc: bool = True
    use_selective: bool = True

    def fuzz_budget_for(self, mode: str) -> float:
        if self.fuzz_budget is not None:
            return self.fuzz_budget
        return FUZZ_BUDGET_BRANCHES if mode == COVER_BRANCHES else FUZZ_BUDGET

    def check(self) -> None:
        if self.arch not in ARCHITECTURES:
            raise InputError(f"architecture must be one of {ARCHITECTURES}")
        if self.strategy in UNSUPPORTED_STRATEGIES:
            raise InputError(f"strategy '{self.strategy}' is not supported (use incr or fixed)")
        if self.strategy not in STRATEGIES:
            raise InputError(f"unknown strategy '{self.strategy}'")
        for name in ("fuzz_budget", "bmc_budget", "selective_budget"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise InputError(f"{name.replace('_', '-')} must be non-negative")
        for name in ("fuzz_iters", "selective_iters"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise InputError(f"{name.replace('_', '-')} must be non-negative")
        if self.k_step < 1:
            raise InputError("k-step must be at least 1")
        if self.max_k is not None and self.max_k < 1:
            raise InputError("max-k must be at least 1")


@dataclass
class CoverageReport:
    goal_count: int = 0
    covered: tuple = ()  # goal ids
    error_covered: bool = False
    engine_tests: dict = field(default_factory=dict)  # engine -> tests credited
    engine_goals: dict = field(default_factory=dict)  # engine -> goals credited
    test_goals: list = field(default_factory=list)  # (testcase name, goals first hit)
    non_contributing: list = field(default_factory=list)
    malformed: list = field(default_factory=list)  # (file, message)
    phase_times: dict = field(default_factory=dict)
    unreachable: dict = field(default_factory=dict)  # goal -> bound
    notes: list = field(default_factory=list)

    @property
    def goals_covered(self) -> int:
        return len(self.covered)

    @property
    def ratio(self) -> float:
        return 1.0 if self.goal_count == 0 else self.goals_covered / self.goal_count

    def to_text(self) -> str:
        lines = [f"goals: {self.goals_covered}/{self.goal_count} covered ({self.ratio:.4f})",
                 f"error covered: {'yes' if self.error_covered else 'no'}",
                 f"tests: {len(self.test_goals)}"]
        for eng in sorted(self.engine_tests):
            lines.append(f"  {eng}: {self.engine_tests[eng]} tests, "
                         f"{self.engine_goals.get(eng, 0)} goals")
        for name, goals in self.test_goals:
            lines.append(f"  {name}: " + (" ".join(f"GOAL-{g}" for g in goals) or "-"))
        if self.unreachable:
            lines.append("unreachable within bound: " + " ".join(
                f"GOAL-{g}@{k}" for g, k in sorted(self.unreachable.items())))
        for phase, t in self.phase_times.items():
            lines.append(f"time {phase}: {t:.3f}s")
        lines.extend(f"note: {n}" for n in self.notes)
        return "\n".join(lines) + "\n"

    def to_kv(self) -> str:
        kv = [("goal_count", self.goal_count), ("goals_covered", self.goals_covered),
              ("coverage", f"{self.ratio:.6f}"), ("error_covered", str(self.error_covered).lower()),
              ("tests", len(self.test_goals)),
              ("covered_goals", ",".join(str(g) for g in self.covered))]
        for eng in sorted(self.engine_tests):
            kv.append((f"engine.{eng}.tests", self.engine_tests[eng]))
            kv.append((f"engine.{eng}.goals", self.engine_goals.get(eng, 0)))
        for phase, t in self.phase_times.items():
            kv.append((f"time.{phase}", f"{t:.3f}"))
        return "".join(f"{k}={v}\n" for k, v in kv)


@dataclass
class PipelineResult:
    exit_code: int
    report: CoverageReport
    suite_dir: Optional[str] = None
    prog: Optional[InstrumentedProgram] = None
    table: Optional[GoalTable] = None
    tests: list = field(default_factory=list)
    validated: Optional[CoverageReport] = None
    message: str = ""


# --------------------------------------------------------------- preparation


def load_spec(cfg: PipelineConfig) -> CoverSpec:
    if cfg.property_text is not None:
        text = cfg.property_text
    elif cfg.property_path is not None:
        try:
            with open(cfg.property_path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise InputError(f"cannot read property file: {e}") from None
    else:
        text = CoverSpec(COVER_ERROR, "main", "reach_error").text()
    try:
        spec = parse_property(text)
    except ValueError as e:
        raise InputError(str(e)) from None
    if cfg.error_function is not None and spec.mode == COVER_ERROR:
        spec = CoverSpec(spec.mode, spec.entry, cfg.error_function)
    return spec


def prepare(source: str, spec: CoverSpec, arch: int = 32,
            source_name: str = "<input>") -> InstrumentedProgram:
    err = spec.error_function or "reach_error"
    try:
        ast = parse_program(source, arch, entry=spec.entry, error_function=err)
    except FrontendError as e:
        raise InputError(f"{source_name}:{e}") from None
    return inject_goals(ast, spec.mode, source_name)


def _creation_time(path: str) -> str:
    mtime = int(os.stat(path).st_mtime)
    return _dt.datetime.fromtimestamp(mtime, _dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


# ------------------------------------------------------------------ pipeline


def _phase_bmc(prog, table, mode, cfg, budget, notes):
    if cfg.strategy == "fixed":
        k = cfg.max_k or FIXED_MAX_K
        bcfg = BmcConfig(k_start=k, k_step=cfg.k_step, k_max=k, folding=cfg.folding,
                         slicing=cfg.slicing, dump_cnf=cfg.dump_cnf)
    else:
        bcfg = BmcConfig(k_step=cfg.k_step, k_max=cfg.max_k, folding=cfg.folding,
                         slicing=cfg.slicing, dump_cnf=cfg.dump_cnf)
    try:
        return run_incremental(prog, table, mode, bcfg, budget)
    except (FrontendError, WidthOverflow) as e:
        notes.append(f"bmc skipped: {e}")
        return None


def run_engines(prog: InstrumentedProgram, cfg: PipelineConfig, table: Optional[GoalTable] = None,
                times: Optional[dict] = None, notes: Optional[list] = None) -> GoalTable:
    """Run the three engines over ``prog`` in order and return the goal table."""
    table = table or GoalTable.for_mode(prog)
    times = {} if times is None else times
    notes = [] if notes is None else notes
    mode = prog.mode
    fuzz_budget = cfg.fuzz_budget_for(mode)
    fuzz_on = cfg.use_fuzz and (fuzz_budget > 0 if cfg.fuzz_iters is None else cfg.fuzz_iters > 0)
    bmc_on = cfg.use_bmc and cfg.bmc_budget > 0
    fz: Optional[FuzzReport] = None
    bm = None

    def fuzz_phase():
        nonlocal fz
        t = time.monotonic()
        fz = run_fuzzer(prog, table, fuzz_budget, cfg.seed, iterations=cfg.fuzz_iters)
        times["fuzz"] = time.monotonic() - t

    def bmc_phase():
        nonlocal bm
        t = time.monotonic()
        bm = _phase_bmc(prog, table, mode, cfg, cfg.bmc_budget, notes)
        times["bmc"] = time.monotonic() - t

    if cfg.parallel and fuzz_on and bmc_on:
        th = threading.Thread(target=fuzz_phase, name="fuzz")
        th.start()
        bmc_phase()
        th.join()
    else:
        if fuzz_on and not table.done():
            fuzz_phase()
        if bmc_on and not table.done():
            bmc_phase()
    sel_on = cfg.use_selective and (cfg.selective_budget > 0 if cfg.selective_iters is None
                                    else cfg.selective_iters > 0)
    if not (fuzz_on or bmc_on or sel_on):
        notes.append(ZERO_BUDGET_NOTE)
    if sel_on and not table.done():
        t = time.monotonic()
        profile = build_profile(fz.observations if fz else (), bm.hints if bm else None,
                                harvest_dictionary(prog.ast), table.tests)
        generate_tests(profile, prog, table, cfg.selective_budget, cfg.seed + 1,
                       iterations=cfg.selective_iters)
        times["selective"] = time.monotonic() - t
    if bm is not None:
        for g, k in bm.unreachable.items():
            table.mark_unreachable(g, k)
        mismatches = sum(1 for r in bm.unknown.values() if r == "replay-mismatch")
        if mismatches:
            notes.append(f"bmc: {mismatches} model(s) failed replay and were dropped")
    return table


def reduce_suite(tests: list, goal_table: Optional[GoalTable] = None) -> list:
    """Keep, in order, each test that is the first to hit some goal."""
    tracked = goal_table.tracked if goal_table is not None else None
    seen: set = set()
    kept = []
    for t in tests:
        goals = t.trace.goals_hit if t.trace is not None else t.goals
        new = {g for g in goals if (tracked is None or g in tracked) and g not in seen}
        if new:
            seen |= new
            kept.append(t)
    return kept


def write_suite(suite_dir: str, md: SuiteMetadata, tests: list, dtd_version: str = "1.1") -> str:
    """Write ``metadata.xml`` and ``testcase-<n>.xml`` files; stale testcases are removed."""
    out = os.path.join(suite_dir, "test-suite")
    os.makedirs(out, exist_ok=True)
    for old in glob.glob(os.path.join(out, "testcase-*.xml")):
        os.remove(old)
    with open(os.path.join(out, "metadata.xml"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(emit_metadata(md, dtd_version))
    for i, t in enumerate(tests):
        with open(os.path.join(out, f"testcase-{i}.xml"), "w", encoding="utf-8",
                  newline="\n") as fh:
            fh.write(emit_testcase(t.tape, t.covers_error, dtd_version))
    return out


def validate_suite(prog: InstrumentedProgram, suite_dir: str,
                   program_path: Optional[str] = None) -> CoverageReport:
    """Replay every testcase of a suite and recompute coverage from scratch.

    ``suite_dir`` may be the suite root or its ``test-suite`` directory.
    The program hash recorded in the metadata must match ``program_path``
    (default: the metadata's ``programfile``).
    """
    d = suite_dir
    if not os.path.exists(os.path.join(d, "metadata.xml")):
        d = os.path.join(suite_dir, "test-suite")
    with open(os.path.join(d, "metadata.xml"), encoding="utf-8") as fh:
        md = parse_metadata(fh.read())
    path = program_path or md.programfile
    actual = sha256_file(path)
    if actual != md.programhash:
        raise HashMismatch(f"program hash {actual} does not match suite metadata "
                           f"{md.programhash}")
    if prog.mode == COVER_ERROR:
        tracked = {g.id for g in prog.goals if g.kind == ERROR_CALL}
    else:
        tracked = {g.id for g in prog.goals}
    files = []
    for name in os.listdir(d):
        m = _TESTCASE_RE.fullmatch(name)
        if m:
            files.append((int(m.group(1)), name))
    report = CoverageReport(goal_count=len(tracked))
    covered: list = []
    seen: set = set()
    for _, name in sorted(files):
        try:
            with open(os.path.join(d, name), encoding="utf-8") as fh:
                values, _ = read_testcase(fh.read())
        except MalformedTestcase as e:
            report.malformed.append((name, str(e)))
            continue
        trace = execute(prog, values)
        new = [g for g in trace.goals_hit if g in tracked and g not in seen]
        seen.update(new)
        covered.extend(new)
        report.test_goals.append((name, tuple(new)))
        if not new:
            report.non_contributing.append(name)
        if trace.error_reached:
            report.error_covered = True
    report.covered = tuple(sorted(covered))
    return report


def table_report(table: GoalTable, tests: list) -> CoverageReport:
    r = CoverageReport(goal_count=len(table.tracked))
    r.covered = tuple(sorted(g for g in table.tracked if table.is_covered(g)))
    r.error_covered = any(t.covers_error for t in tests)
    for i, t in enumerate(tests):
        r.test_goals.append((f"testcase-{i}.xml", tuple(t.goals)))
        r.engine_tests[t.source] = r.engine_tests.get(t.source, 0) + 1
        r.engine_goals[t.source] = r.engine_goals.get(t.source, 0) + len(t.goals)
    r.unreachable = dict(table.unreachable)
    return r


def run_pipeline(cfg: PipelineConfig, program_path: str, *, log=None) -> PipelineResult:
    """Generate, validate and write a test suite for the program at ``program_path``."""
    t_start = time.monotonic()
    times: dict = {}
    notes: list = []

    def say(msg: str) -> None:
        if log is not None:
            log(msg)

    try:
        cfg.check()
        spec = load_spec(cfg)
        try:
            with open(program_path, "rb") as fh:
                raw = fh.read()
        except OSError as e:
            raise InputError(f"cannot read program: {e}") from None
        try:
            source = raw.decode("utf-8")
        except UnicodeDecodeError:
            raise InputError(f"{program_path}: not valid UTF-8") from None
        prog = prepare(source, spec, cfg.arch, program_path)
    except InputError as e:
        return PipelineResult(EXIT_INPUT, CoverageReport(), message=str(e))
    times["parse"] = time.monotonic() - t_start
    table = GoalTable.for_mode(prog)
    run_engines(prog, cfg, table, times, notes)
    tests = reduce_suite(table.tests, table)
    md = SuiteMetadata(specification=spec.text(), programfile=program_path,
                       programhash=hashlib.sha256(raw).hexdigest(), entryfunction=spec.entry,
                       architecture=cfg.arch, creationtime=_creation_time(program_path),
                       producer=f"wbfuzz {__version__}")
    report = table_report(table, tests)
    report.notes = notes
    try:
        write_suite(cfg.suite_dir, md, tests, cfg.dtd_version)
        witness_path = os.path.join(cfg.suite_dir, "witness.graphml")
        if os.path.exists(witness_path):
            os.remove(witness_path)
        if prog.mode == COVER_ERROR and tests:
            with open(witness_path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(emit_witness(tests[0].trace, md))
    except OSError as e:
        return PipelineResult(EXIT_INTERNAL, report, prog=prog, table=table,
                              message=f"cannot write suite: {e}")
    t = time.monotonic()
    validated = validate_suite(prog, cfg.suite_dir, program_path)
    times["validate"] = time.monotonic() - t
    times["total"] = time.monotonic() - t_start
    report.phase_times = times
    if validated.covered != report.covered or validated.malformed:
        return PipelineResult(EXIT_INTERNAL, report, cfg.suite_dir, prog, table, tests, validated,
                              "validator disagrees with the goal table")
    with open(os.path.join(cfg.suite_dir, "report.txt"), "w", encoding="utf-8") as fh:
        fh.write(report.to_text())
    with open(os.path.join(cfg.suite_dir, "report.kv"), "w", encoding="utf-8") as fh:
        fh.write(report.to_kv())
    say(report.to_text().rstrip())
    code = EXIT_OK
    if prog.mode == COVER_ERROR and not validated.error_covered:
        code = EXIT_OK if ZERO_BUDGET_NOTE in notes else EXIT_NO_ERROR_TEST
    return PipelineResult(code, report, cfg.suite_dir, prog, table, tests, validated)

