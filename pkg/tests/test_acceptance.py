"""Acceptance criteria 1-8, one test each.

Every test records a PASS/FAIL line that the terminal summary prints
(see conftest.py); running this file directly prints the same lines.
"""
import filecmp
import glob
import os
import random
import time

import pytest

from conftest import CORPUS, GOLDEN
from fidelity import run_all as fidelity_sweep
from golden_data import golden_metadata, golden_testcase_tape, golden_witness_trace
from progen import generate
from wbfuzz.formats import (emit_metadata, emit_testcase, emit_witness, parse_testcase,
                            read_testcase)
from wbfuzz.frontend import parse_program
from wbfuzz.instrument import COVER_BRANCHES, inject_goals
from wbfuzz.interp import BudgetExceeded, count_reachable_goals_exhaustive
from wbfuzz.orchestrator import (ARCHITECTURES, PipelineConfig, run_pipeline)
from wbfuzz.bmc import BmcConfig
from wbfuzz.sat import Cnf, solve_cnf

BRANCHES = "COVER( init(main()), FQL(COVER EDGES(@DECISIONEDGE)) )"
SMALL_BUDGETS = dict(fuzz_budget=5, bmc_budget=20, selective_budget=2)


def corpus_files():
    return sorted(glob.glob(os.path.join(CORPUS, "*.c")))


def record(criteria, n, ok, detail):
    criteria[n] = (ok, detail)
    print(f"CRITERION {n}: {'PASS' if ok else 'FAIL'}  {detail}")


# ---------------------------------------------------------------- criterion 1


def test_criterion_1_error_finding(criteria, tmp_path):
    files = corpus_files()
    start = time.monotonic()
    found, missed = 0, []
    for path in files:
        name = os.path.basename(path)
        cfg = PipelineConfig(suite_dir=str(tmp_path / name), **SMALL_BUDGETS)
        res = run_pipeline(cfg, path)
        suite = tmp_path / name / "test-suite"
        flagged = [f for f in suite.glob("testcase-*.xml")
                   if read_testcase(f.read_text())[1]]
        if res.validated is not None and res.validated.error_covered and flagged:
            found += 1
        else:
            missed.append(name)
    elapsed = time.monotonic() - start
    rate = found / len(files)
    ok = len(files) >= 20 and rate >= 0.95 and elapsed < 600
    record(criteria, 1, ok, f"{found}/{len(files)} programs with a validated coversError test "
                            f"({rate:.1%}), {elapsed:.0f}s; missed: {missed or 'none'}")
    assert ok


# ---------------------------------------------------------------- criterion 2


def test_criterion_2_oracle_equivalence(criteria, tmp_path):
    checked, diffs = 0, []
    for path in corpus_files():
        with open(path) as fh:
            prog = inject_goals(parse_program(fh.read()), COVER_BRANCHES)
        try:
            oracle = count_reachable_goals_exhaustive(prog)
        except BudgetExceeded:
            continue
        checked += 1
        cfg = PipelineConfig(property_text=BRANCHES, suite_dir=str(tmp_path / os.path.basename(path)),
                             **SMALL_BUDGETS)
        res = run_pipeline(cfg, path)
        if set(res.validated.covered) != oracle:
            diffs.append((os.path.basename(path), sorted(oracle), list(res.validated.covered)))
    ok = checked > 0 and not diffs
    record(criteria, 2, ok, f"{checked} programs with <=16 input bits, "
                            f"{checked - len(diffs)} equal to the exhaustive oracle; diffs: {diffs or 'none'}")
    assert ok


# ---------------------------------------------------------------- criterion 3


def _columns(n):
    size = 1 << n
    cols = []
    for i in range(n):
        period = 1 << (i + 1)
        unit = ((1 << (1 << i)) - 1) << (1 << i)
        cols.append(unit * (((1 << size) - 1) // ((1 << period) - 1)))
    return cols, (1 << size) - 1


def brute_force_sat(n, clauses):
    cols, full = _columns(n)
    ok = full
    for cl in clauses:
        acc = 0
        for lit in cl:
            c = cols[abs(lit) - 1]
            acc |= c if lit > 0 else c ^ full
        ok &= acc
        if not ok:
            return False
    return True


def random_3cnf(rng):
    n = rng.randint(3, 18)
    m = min(80, max(1, round(n * rng.uniform(2.5, 6.5))))
    clauses = []
    for _ in range(m):
        vs = rng.sample(range(1, n + 1), 3)
        clauses.append([v if rng.random() < 0.5 else -v for v in vs])
    return n, clauses


def test_criterion_3_sat_vs_brute_force(criteria):
    rng = random.Random(3)
    start = time.monotonic()
    agree = sat = 0
    bad = []
    for i in range(1000):
        n, clauses = random_3cnf(rng)
        expected = brute_force_sat(n, clauses)
        res = solve_cnf(Cnf(n, clauses, {}))
        model_ok = True
        if res.is_sat:
            model_ok = all(any(res.model[abs(l)] == (l > 0) for l in cl) for cl in clauses)
        if res.is_sat == expected and model_ok:
            agree += 1
        else:
            bad.append(i)
        sat += expected
    elapsed = time.monotonic() - start
    ok = agree == 1000 and elapsed < 60
    record(criteria, 3, ok, f"{agree}/1000 verdicts agree ({sat} sat, {1000 - sat} unsat), "
                            f"models checked, {elapsed:.1f}s; disagreements: {bad[:5] or 'none'}")
    assert ok


# ---------------------------------------------------------------- criterion 4


def test_criterion_4_bitblast_fidelity(criteria):
    start = time.monotonic()
    results = fidelity_sweep(n=10_000, seed=2021, solver_sample=10)
    elapsed = time.monotonic() - start
    bad = [f"{r.op}/{r.width}/{'s' if r.signed else 'u'}" for r in results if not r.ok]
    pairs = sum(r.pairs for r in results)
    ok = not bad and elapsed < 300
    record(criteria, 4, ok, f"{len(results)} operator/width/sign cases, {pairs} pairs, "
                            f"{sum(r.solver_checked for r in results)} solver cross-checks, "
                            f"{elapsed:.1f}s; failing: {bad or 'none'}")
    assert ok


# ---------------------------------------------------------------- criterion 5


def test_criterion_5_transform_soundness(criteria, tmp_path):
    start = time.monotonic()
    # generous BMC budget: the comparison is between finished searches, not deadline races
    bmc_only = dict(fuzz_budget=0, selective_budget=0, bmc_budget=60, property_text=BRANCHES)
    replay_failures = 0
    deadline_hits = 0
    emitted = 0
    dropped_models = 0
    small = 0
    cov_diffs = []
    for seed in range(200):
        g = generate(seed, 16 if seed % 2 == 0 else 40)
        path = tmp_path / f"p{seed}.c"
        path.write_text(g.source)
        res = run_pipeline(PipelineConfig(suite_dir=str(tmp_path / f"s{seed}"), **bmc_only),
                           str(path))
        assert res.validated is not None, res.message
        emitted += len(res.tests)
        claimed = dict(res.report.test_goals)
        replayed = dict(res.validated.test_goals)
        replay_failures += sum(1 for k, v in claimed.items() if replayed.get(k) != v)
        dropped_models += sum(int(n.split()[1]) for n in res.report.notes
                              if n.startswith("bmc:") and "failed replay" in n)
        if g.input_bits <= 16:
            small += 1
            plain = run_pipeline(PipelineConfig(suite_dir=str(tmp_path / f"n{seed}"),
                                                slicing=False, folding=False, **bmc_only),
                                 str(path))
            if plain.validated.covered != res.validated.covered:
                cov_diffs.append(seed)
            deadline_hits += sum(r.report.phase_times.get("bmc", 0) >= bmc_only["bmc_budget"]
                                 for r in (res, plain))
    elapsed = time.monotonic() - start
    ok = replay_failures == 0 and not cov_diffs
    record(criteria, 5, ok, f"200 programs, {emitted} emitted tests, {replay_failures} replay "
                            f"failures ({dropped_models} models dropped before emission); "
                            f"{small} <=16-bit programs, coverage differences with "
                            f"--no-slice --no-fold: {cov_diffs or 'none'} "
                            f"({deadline_hits} runs hit the BMC deadline); {elapsed:.0f}s")
    assert ok


# ---------------------------------------------------------------- criterion 6


def test_criterion_6_defaults(criteria):
    cfg = PipelineConfig()
    checks = {
        "fuzz 150s (cover-error)": cfg.fuzz_budget_for("cover-error") == 150,
        "bmc 700s": cfg.bmc_budget == 700,
        "selective 50s": cfg.selective_budget == 50,
        "fuzz 70s (cover-branches)": cfg.fuzz_budget_for("cover-branches") == 70,
        "k_step 5": cfg.k_step == 5 and BmcConfig().k_step == 5,
        "arch {32,64}": set(ARCHITECTURES) == {32, 64},
    }
    from wbfuzz.cli import build_parser
    args = build_parser().parse_args(["x.c"])
    checks["cli defaults"] = (args.bmc_budget == 700 and args.selective_budget == 50
                              and args.k_step == 5 and args.arch == 32 and args.fuzz_budget is None)
    ok = all(checks.values())
    record(criteria, 6, ok, ", ".join(f"{k}: {'ok' if v else 'WRONG'}" for k, v in checks.items()))
    assert ok


# ---------------------------------------------------------------- criterion 7


def test_criterion_7_formats(criteria):
    def golden(name):
        with open(os.path.join(GOLDEN, name), encoding="utf-8", newline="") as fh:
            return fh.read()

    results = {
        "metadata.xml": emit_metadata(golden_metadata()) == golden("metadata.xml"),
        "testcase.xml": emit_testcase(golden_testcase_tape(), False) == golden("testcase.xml"),
        "witness.graphml": emit_witness(golden_witness_trace(), golden_metadata())
        == golden("witness.graphml"),
    }
    rng = random.Random(7)
    round_trips = 0
    for _ in range(1000):
        n = rng.randint(0, 12)
        tape = []
        for _ in range(n):
            w = rng.choice((1, 8, 16, 32, 64))
            signed = w > 1 and rng.random() < 0.5
            lo, hi = (-(1 << (w - 1)), (1 << (w - 1)) - 1) if signed else (0, (1 << w) - 1)
            tape.append(rng.randint(lo, hi))
        covers = rng.random() < 0.5
        text = emit_testcase(tape, covers)
        if parse_testcase(text) == tuple(tape) and read_testcase(text)[1] == covers:
            round_trips += 1
    ok = all(results.values()) and round_trips == 1000
    record(criteria, 7, ok, ", ".join(f"{k} {'matches' if v else 'DIFFERS'}"
                                      for k, v in results.items())
           + f"; round trip {round_trips}/1000")
    assert ok


# ---------------------------------------------------------------- criterion 8


def _tree_equal(a, b):
    cmp = filecmp.dircmp(a, b)
    if cmp.left_only or cmp.right_only:
        return False
    for name in cmp.common_files:
        with open(os.path.join(a, name), "rb") as fa, open(os.path.join(b, name), "rb") as fb:
            if fa.read() != fb.read():
                return False
    return all(_tree_equal(os.path.join(a, d), os.path.join(b, d)) for d in cmp.common_dirs)


def test_criterion_8_determinism(criteria, tmp_path):
    names = ["char_machine.c", "helper_call.c", "loop12.c", "bool_tree.c", "global_counter.c"]
    same = 0
    total = 0
    for name in names:
        path = os.path.join(CORPUS, name)
        for prop in (None, BRANCHES):
            total += 1
            dirs = []
            for run in range(2):
                d = tmp_path / f"{name}-{prop is None}-{run}"
                cfg = PipelineConfig(seed=42, fuzz_iters=300, selective_iters=300, bmc_budget=60,
                                     property_text=prop, suite_dir=str(d))
                run_pipeline(cfg, path)
                dirs.append(d)
            suite_same = _tree_equal(dirs[0] / "test-suite", dirs[1] / "test-suite")
            w = [d / "witness.graphml" for d in dirs]
            wit_same = (w[0].exists() == w[1].exists()
                        and (not w[0].exists() or w[0].read_bytes() == w[1].read_bytes()))
            same += suite_same and wit_same
    ok = same == total
    record(criteria, 8, ok, f"{same}/{total} run pairs produced byte-identical suites and witnesses")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
