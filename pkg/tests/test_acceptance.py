"""Acceptance gate: one test per exit criterion, tolerances pinned here.

A PASS/FAIL line per criterion is printed in the pytest terminal summary.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from hqea import knapsack
from hqea.algorithms import ALGORITHMS, OptimizerConfig, run_algorithm, run_hqea, run_qea
from hqea.bench_cli import ExperimentSpec, cmd_run, read_trace, walk_rows
from hqea.knapsack import Evaluator, brute_force_optimum, generate_instance
from hqea.qea_core import QbitIndividual, observe
from hqea.qhw_search import SearchParams, qhw_refine
from hqea.quantum_walk import run_walk, variance

from oracles import walk_by_paths

criterion = pytest.mark.criterion

CHECKPOINTS = (50, 100, 250, 500, 1000)


@criterion(1, "walk matches 2^n path summation for n <= 12 within 1e-9, < 1 s")
def test_c1_walk_oracle_equivalence():
    t0 = time.perf_counter()
    dists = {n: run_walk(n) for n in range(13)}
    elapsed = time.perf_counter() - t0
    for n, d in dists.items():
        ref = walk_by_paths(n)
        for k in range(-n, n + 1):
            assert abs(d[k] - ref.get(k, 0.0)) <= 1e-9, (n, k)
    assert elapsed < 1.0


@criterion(2, "exact small-walk values and variance(run_walk(3)) = 2, tol 1e-9")
def test_c2_exact_small_walks():
    expected = {
        1: {-1: 1.0},
        2: {-2: 0.5, 0: 0.5},
        3: {-3: 0.25, -1: 0.5, 1: 0.25},
    }
    for n, dist in expected.items():
        ref = walk_by_paths(n)
        got = run_walk(n)
        for k in range(-n, n + 1):
            assert abs(ref.get(k, 0.0) - dist.get(k, 0.0)) <= 1e-9
            assert abs(got[k] - dist.get(k, 0.0)) <= 1e-9
    assert abs(variance(run_walk(3)) - 2.0) <= 1e-9


@criterion(3, "variance ratio sigma^2(2n)/sigma^2(n) in [3.5, 4.5] at n = 50, 100; run_walk(200) < 1 s")
def test_c3_quadratic_spreading():
    for n in (50, 100):
        ratio = variance(run_walk(2 * n)) / variance(run_walk(n))
        assert 3.5 <= ratio <= 4.5, (n, ratio)
    t0 = time.perf_counter()
    run_walk(200)
    assert time.perf_counter() - t0 < 1.0


@criterion(4, "total probability = 1 within 1e-9 for n = 10, 100, 500")
def test_c4_normalization():
    for n in (10, 100, 500):
        assert abs(run_walk(n).total() - 1.0) <= 1e-9


@criterion(5, "walkdist support within [-0.1pi, 0.1pi] (n=10) and [-pi, pi] (n=100), n_max=100")
def test_c5_figure_data(tmp_path):
    from hqea.bench_cli import main

    for n, bound in ((10, 0.1 * math.pi), (100, math.pi)):
        out = tmp_path / f"walk{n}.csv"
        assert main(["walkdist", "--n", str(n), "--n-max", "100", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()[1:]
        angles = [float(line.split(",")[1]) for line in lines]
        assert angles and all(abs(a) <= bound + 1e-12 for a in angles)
        assert [r[1] for r in walk_rows(n, 100)] == angles


@criterion(6, "HQEA hits the brute-force optimum in >= 8/10 runs on each of 5 12-item instances, < 60 s")
def test_c6_small_instance_optimality():
    cfg = OptimizerConfig(max_generations=500)
    t0 = time.perf_counter()
    hits = {}
    for inst_seed in range(5):
        inst = generate_instance(12, "strongly_correlated", seed=inst_seed)
        opt = brute_force_optimum(inst)
        hits[inst.id] = sum(run_hqea(inst, cfg, s).best_per_generation[-1] == opt for s in range(10))
    elapsed = time.perf_counter() - t0
    assert all(h >= 8 for h in hits.values()), hits
    assert elapsed < 60.0, elapsed


@pytest.fixture(scope="module")
def trend_traces(tmp_path_factory):
    """Ten runs of every algorithm on one 200-item and one 500-item instance."""
    root = tmp_path_factory.mktemp("trend")
    paths = []
    for n in (200, 500):
        inst = generate_instance(n, seed=1)
        p = root / f"{inst.id}.json"
        inst.save(p)
        paths.append(str(p))
    spec = ExperimentSpec(
        instances=paths, runs=10, max_generations=1000, checkpoints=list(CHECKPOINTS),
        master_seed=0, output_dir=str(root / "traces"),
    )
    t0 = time.perf_counter()
    files = cmd_run(spec)
    elapsed = time.perf_counter() - t0
    return [read_trace(f) for f in files], elapsed


def _means(traces):
    out = {}
    for tr in traces:
        out.setdefault((tr.instance_id, tr.algorithm), []).append(tr)
    return {
        key: {k: Fraction(sum(t.best_at(k) for t in runs), len(runs)) for k in CHECKPOINTS}
        for key, runs in out.items()
    }


@criterion(7, "mean best over 10 runs: HQEA > QEA > CGA at 1000 and HQEA >= QEA >= CGA at every checkpoint")
def test_c7_table1_trend(trend_traces):
    traces, elapsed = trend_traces
    means = _means(traces)
    instances = sorted({i for i, _ in means})
    assert len(instances) == 2
    report = []
    failures = []
    for inst in instances:
        for k in CHECKPOINTS:
            c, q, h = (means[(inst, a)][k] for a in ALGORITHMS)
            report.append(f"{inst} @{k}: CGA={float(c):.1f} QEA={float(q):.1f} HQEA={float(h):.1f}")
            if not h >= q >= c:
                failures.append(f"{inst} @{k}")
            if k == 1000 and not h > q > c:
                failures.append(f"{inst} @1000 (strict)")
    print("\n".join(report))
    assert elapsed < 600.0, elapsed
    assert not failures, "ordering violated at " + ", ".join(failures) + "\n" + "\n".join(report)


@criterion(8, "10^4 randomized qhw_refine calls never lower fitness")
def test_c8_non_degradation():
    rng = np.random.default_rng(2024)
    insts = [generate_instance(n, p, seed=s) for n, p, s in
             [(8, "strongly_correlated", 1), (25, "uncorrelated", 2), (60, "strongly_correlated", 3)]]
    violations = 0
    for _ in range(10_000):
        inst = insts[rng.integers(len(insts))]
        steps = int(rng.integers(1, 101))
        params = SearchParams(walk_steps=steps, n_max=100, trials=int(rng.integers(0, 4)))
        ind = QbitIndividual(rng.uniform(-math.pi, math.pi, inst.num_items))
        ev = Evaluator(inst)
        x, f0 = ev(observe(ind, rng), rng)
        _, f1, x1 = qhw_refine(ind, params, ev, rng, fitness=f0, solution=x)
        if f1 < f0 or not inst.is_feasible(x1):
            violations += 1
    assert violations == 0


@criterion(9, "HQEA with m = 0 reproduces the QEA trace generation for generation")
def test_c9_stream_separation():
    cfg = OptimizerConfig(max_generations=300)
    for n, seed in ((30, 0), (100, 7)):
        inst = generate_instance(n, seed=seed)
        hq = run_hqea(inst, cfg.with_trials(0), seed)
        q = run_qea(inst, cfg, seed)
        assert hq.best_per_generation == q.best_per_generation


@criterion(10, "every trace is nondecreasing and every evaluated bitstring is feasible")
def test_c10_monotone_and_feasible(monkeypatch, trend_traces):
    real = knapsack.evaluate
    infeasible = []

    def checked(inst, x):
        if not inst.is_feasible(x):
            infeasible.append(x)
        return real(inst, x)

    monkeypatch.setattr(knapsack, "evaluate", checked)
    cfg = OptimizerConfig(max_generations=200, migration_period=50)
    traces = []
    for n, profile in ((15, "strongly_correlated"), (80, "uncorrelated")):
        inst = generate_instance(n, profile, seed=n)
        for name in ALGORITHMS:
            for seed in range(3):
                traces.append(run_algorithm(name, inst, cfg, seed))
    assert not infeasible
    traces.extend(trend_traces[0])
    assert all(t.is_monotone() for t in traces)
