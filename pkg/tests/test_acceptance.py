"""Acceptance criteria, one test each.

Every test records a PASS/FAIL line (collected in the terminal summary) and
then asserts, so a failing criterion also fails the test.
"""

from fractions import Fraction
from math import comb
from pathlib import Path
import time

import numpy as np
import pytest

from conftest import EX41, S1, S2, random_dag_matrix, record
from test_metrics import random_graph, recount
from tropmlbn.errors import Degenerate
from tropmlbn.harness import ExperimentConfig, run_census, run_simulation
from tropmlbn.learning import known_dag_estimate
from tropmlbn.metrics import evaluate
from tropmlbn.model import Dag, atom_sample, generate_sample, random_model
from tropmlbn.polytrope import (bounding_contains, cell_of_point, dual_subdivision, facet_reduce,
                                min_bounding_matrix, pseudovertices)
from tropmlbn.setcover import census, exact_cover_cells, sample_generic_heights
from tropmlbn.tropical import kleene_star, restrict_to_dag, wdp_violation

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
pytestmark = pytest.mark.acceptance


def load(name, **overrides):
    sets = [f"{k}={v}" for k, v in overrides.items()]
    return ExperimentConfig.load(CONFIGS / name, sets)


def catalan(m):
    return comb(2 * m, m) // (m + 1)


def test_example_golden():
    start = time.perf_counter()
    kappa3 = Dag(3, {(0, 1): 0.0, (0, 2): 0.0, (1, 2): 0.0})
    restricted = restrict_to_dag(min_bounding_matrix(S1), kappa3)
    matrix_ok = np.array_equal(restricted, EX41)
    sigma1 = {cell_of_point(EX41, p) for p in S1}
    s1_ok = sigma1 == {frozenset({(0, 1)}), frozenset({(0, 2), (1, 2)})}
    sigma2 = [cell_of_point(EX41, p) for p in S2]
    expected2 = {frozenset({(0, 2)}), frozenset({(1, 2)}), frozenset({(0, 1)})}
    s2_ok = set(sigma2) == expected2
    elapsed = time.perf_counter() - start
    ok = matrix_ok and s1_ok and s2_ok and elapsed < 1
    found2 = [sorted(c) for c in sigma2]
    record(1, "worked 3-node example", ok,
           f"C recovered={matrix_ok}, cells(S1) match={s1_ok}, cells(S2) match={s2_ok} "
           f"(got {found2}; the point (0,0,1) is interior), {elapsed:.3f}s")
    assert ok


def test_kappa4_facets_and_pseudovertices():
    start = time.perf_counter()
    rng = np.random.default_rng(42)
    facets, counts, types = set(), set(), set()
    for _ in range(500):
        C = sample_generic_heights(4, rng)
        R = facet_reduce(C)
        facets.add(int(np.isfinite(R).sum()) - 4)
        pvs = pseudovertices(C)
        counts.add(len(pvs))
        types.add(tuple(sorted(tuple(sorted(c)) for _, c in pvs)))
    kappa4_ok = facets == {6} and counts == {5} and len(types) == 2
    bound_ok = {}
    for d in (3, 5, 6):
        worst = max(len(pseudovertices(sample_generic_heights(d, rng))) for _ in range(500))
        bound_ok[d] = worst <= catalan(d - 1)
    elapsed = time.perf_counter() - start
    ok = kappa4_ok and all(bound_ok.values()) and elapsed < 120
    record(2, "kappa_4 facets/pseudovertices and Catalan bound", ok,
           f"facet counts {sorted(facets)}, pseudovertex counts {sorted(counts)}, "
           f"{len(types)} types, bound holds {bound_ok}, {elapsed:.1f}s")
    assert ok


def test_census_table():
    start = time.perf_counter()
    cfg = load("census_table1.toml")
    seed = int(cfg.seed)
    c = cfg["census"]
    sizes, agree, total = {}, 0, 0
    for d, num in zip(c["d"], c["num_samples"]):
        result = census(d, num, rng_seed=(seed, d), repetitions=c["greedy_repetitions"],
                        budget=c["budget"], threads=4)
        sizes[d] = result.cover_sizes("exact")
        for rec in result.types.values():
            total += 1
            agree += rec.min_cover_greedy == rec.min_cover_exact
    elapsed = time.perf_counter() - start
    expected = {3: [2], 4: [2, 3], 5: [3], 6: [3, 4]}
    ok = sizes == expected and agree >= 0.95 * total and elapsed < 1800
    record(3, "set cover census d=3..6", ok,
           f"sizes {sizes}, greedy = exact on {agree}/{total} types ({100 * agree / total:.1f}%), "
           f"{elapsed:.0f}s")
    assert ok


def test_bounding_matrix_is_star():
    rng = np.random.default_rng(4)
    exact = tight = 0
    rounding = 0
    for _ in range(10_000):
        d = int(rng.integers(2, 9))
        n = int(rng.integers(1, 51))
        # dyadic grid keeps every difference and path sum exact
        S = rng.integers(-2**20, 2**20, size=(n, d)) / 2**10
        C = min_bounding_matrix(S)
        exact += np.array_equal(kleene_star(C), C)
        D = S[:, :, None] - S[:, None, :]
        tight += bool(np.all(np.any(D == C[None], axis=0)))
        # continuous data: float rounding only, measured for the record
        Cc = min_bounding_matrix(rng.normal(size=(n, d)))
        rounding += not np.all(Cc <= (Cc[:, :, None] + Cc[None, :, :]).min(axis=1))
    ok = exact == tight == 10_000
    record(4, "bounding matrix equals its star, facets attained", ok,
           f"star fixpoint {exact}/10000, facets tight {tight}/10000 (dyadic samples); "
           f"continuous samples with 1-ulp triangle violations: {rounding}/10000")
    assert ok


def test_generated_samples_contained():
    rng = np.random.default_rng(5)
    inside = contains = 0
    for r in range(10_000):
        d = int(rng.integers(2, 9))
        model = random_model(d, float(rng.uniform(0.2, 1)), float(rng.uniform(0.5, 3)),
                             rng_seed=(5, r))
        S = generate_sample(model, int(rng.integers(1, 50)), rng_seed=(5, r, 1))
        inside += bool(np.all(wdp_violation(model.C_star, S) <= 1e-9))
        contains += bounding_contains(S, model.C_star)
    ok = inside == contains == 10_000
    record(5, "generated samples lie in wdp(C*)", ok,
           f"inside {inside}/10000, bounding_contains {contains}/10000")
    assert ok


def test_exact_recovery_from_covers():
    passed = recovered = minimal = 0
    rejected = 0
    r = 0
    while passed < 200:
        d = 3 + passed % 3
        model = random_model(d, p=1.0, rng_seed=(6, r))
        r += 1
        try:
            sigma = dual_subdivision(model.C_star)
        except Degenerate:
            rejected += 1
            continue
        cover = exact_cover_cells(sigma)
        S = atom_sample(model, cover, rng_seed=(6, r))
        est = known_dag_estimate(S, model.dag)
        star = model.C_star
        exact = all(abs(est[i, j] - star[i, j]) <= 1e-12 * max(1, abs(star[i, j]))
                    for j, i in sigma.universe)
        needed = True
        for k in range(len(cover)):
            if len(cover) == 1:
                continue  # nothing left: every maximum is over an empty set, i.e. -inf
            partial = known_dag_estimate(np.delete(S, k, axis=0), model.dag)
            if not any(partial[i, j] < star[i, j] - 1e-12 for j, i in sigma.universe):
                needed = False
        passed += 1
        recovered += exact
        minimal += needed
    ok = recovered == minimal == 200
    record(6, "exact recovery from set covers", ok,
           f"recovered {recovered}/200, every cell needed {minimal}/200, "
           f"{rejected} degenerate models rejected")
    assert ok


@pytest.fixture(scope="module")
def simulation_tables():
    start = time.perf_counter()
    g = run_simulation(load("table2a_gaussian.toml", threads=4))
    f = run_simulation(load("table2c_frechet.toml", threads=4))
    return g, f, time.perf_counter() - start


def test_fixed_ordering_simulation(simulation_tables):
    g, f, elapsed = simulation_tables
    tpr = lambda t, d: t.row(d)["tpr_mean"]
    checks = {
        "gauss d=5 TPR>=99%": tpr(g, 5) >= 0.99,
        "gauss d=5 nSHD<=1%": g.row(5)["nshd_mean"] <= 0.01,
        "gauss d=10 TPR>=98%": tpr(g, 10) >= 0.98,
        "frechet d=5 TPR>=99%": tpr(f, 5) >= 0.99,
        "frechet d=10 TPR>=96%": tpr(f, 10) >= 0.96,
        "d=30 TPR gauss>=frechet": tpr(g, 30) >= tpr(f, 30),
    }
    ok = all(checks.values()) and elapsed < 1200
    summary = ", ".join(f"{k.split()[0]} d={d} {100 * tpr(t, d):.1f}%"
                        for k, t in (("gauss", g), ("frechet", f)) for d in (5, 10, 30))
    failed = [k for k, v in checks.items() if not v]
    record(7, "fixed-ordering simulation tables", ok,
           f"TPR {summary}; gauss d=5 nSHD {100 * g.row(5)['nshd_mean']:.2f}%; "
           f"failed checks {failed or 'none'}; {elapsed:.0f}s")
    assert ok


def test_random_ordering_simulation():
    start = time.perf_counter()
    row = run_simulation(load("table3_random_order.toml", threads=4)).row(10)
    elapsed = time.perf_counter() - start
    ok = row["tpr_mean"] >= 0.95 and row["fdr_mean"] <= 0.08 and elapsed < 600
    record(8, "random-ordering robustness", ok,
           f"TPR {row['tpr_display']}, FDR {row['fdr_display']}, {elapsed:.0f}s")
    assert ok


def test_metrics_oracle():
    rng = np.random.default_rng(9)
    agree = 0
    for _ in range(10_000):
        d = int(rng.integers(2, 8))
        E = random_graph(rng, d, rng.uniform(0, 0.6))
        Ehat = random_graph(rng, d, rng.uniform(0, 0.6))
        r = evaluate(E, Ehat, d)
        agree += (r.shd, r.nshd, r.fdr, r.fpr, r.tpr) == tuple(recount(d, E, Ehat).values())
    r = evaluate({(0, 1)}, {(1, 0)}, d=3)
    worked = (r.shd, r.nshd, r.fdr, r.tpr, r.fpr) == (1, Fraction(1, 2), 1, 0, Fraction(1, 5))
    ok = agree == 10_000 and worked
    record(9, "metrics oracle", ok, f"agree {agree}/10000, worked reversal example {worked}")
    assert ok


def test_determinism(tmp_path):
    same = {}
    for name, mode in (("table3_random_order.toml", "simulate"), ("census_table1.toml", "census")):
        outs = []
        for threads in (1, 4):
            extra = {"threads": threads}
            if mode == "census":
                extra.update({"census.d": "[4,5]", "census.num_samples": "[200,300]"})
            cfg = load(name, **extra)
            out = tmp_path / f"{mode}{threads}"
            if mode == "simulate":
                run_simulation(cfg).write(out)
            else:
                run_census(cfg, out)
            outs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
        same[mode] = outs[0] == outs[1]
    ok = all(same.values())
    record(10, "byte-identical outputs across thread counts", ok, str(same))
    assert ok
