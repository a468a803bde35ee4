"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line with the measured values;
the lines are repeated in the terminal summary. Run directly with
``pytest tests/test_acceptance.py -v`` or ``python3 tests/test_acceptance.py``.
"""
import math
import time

import numpy as np
import pytest

from osncensus import kernels
from osncensus.crawler import crawl
from osncensus.demographics import (REPORT_DIMS, cross_tabulate, penetration, percentages,
                                    project_population)
from osncensus.graphmetrics import (bfs_from, build_graph, classify, degree_histogram,
                                    fit_power_law, path_stats)
from osncensus.model import EdgeStore
from osncensus.osn import OSNServer, Snapshot, page_count, paginate
from osncensus.synth import (BAModel, Mixing, SynthConfig, generate, generate_ba,
                             generate_er)
from osncensus.ties import gap_share, gender_mixing, mixing_report

from conftest import random_pairs, random_store
from oracles import count_cells, floyd_warshall, mixing_by_enumeration

RESULTS = []


def record(name, ok, detail, started):
    line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail} [{time.perf_counter() - started:.1f}s]"
    RESULTS.append(line)
    print(line)
    assert ok, line


def population(n, seed=0):
    return random_store(np.random.default_rng(seed), n)


def test_1_projection_and_penetration():
    t0 = time.perf_counter()
    rate = 0.0218
    bat = project_population(2_377_395, rate, 3)
    lag = project_population(2_669_847, rate, 2)
    p_bat = penetration(234_052, bat)
    p_lag = penetration(316_123, lag)
    ok = (abs(bat - 2_536_291) <= 15 and abs(lag - 2_787_522) <= 15
          and str(p_bat) == "9%" and str(p_lag) == "11%")
    record("1 projection and penetration", ok,
           f"Batangas {bat:,} ({p_bat.percent:.2f}% -> {p_bat}), "
           f"Laguna {lag:,} ({p_lag.percent:.2f}% -> {p_lag})", t0)


def test_2_crawl_fidelity():
    t0 = time.perf_counter()
    members, edges = generate(SynthConfig(n=5000, model=BAModel(4), seed=2013))
    truth = (set(members), {tuple(e) for e in edges})
    outcomes = {}
    with OSNServer(Snapshot(members, edges, page_size=10)) as server:
        for w in (1, 16):
            got_m, got_e, stats = crawl(server.url, "laguna", workers=w)
            outcomes[w] = ((set(got_m), {tuple(e) for e in got_e}) == truth, stats)
    ok = all(match for match, _ in outcomes.values())
    detail = ", ".join(f"W={w}: {'exact' if m else 'MISMATCH'} "
                       f"({s.members} members, {s.edges} edges, {s.pages_fetched} pages)"
                       for w, (m, s) in outcomes.items())
    record("2 crawl fidelity", ok, detail, t0)


def test_3_bfs_vs_floyd_warshall(monkeypatch):
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    mismatches = 0
    checked = 0
    for g_i in range(50):
        n = int(rng.integers(2, 201))
        pairs = random_pairs(rng, n, int(rng.integers(0, 4 * n)))
        g = build_graph(population(n, g_i), EdgeStore(pairs))
        want = floyd_warshall(n, pairs - 1)
        want = np.where(np.isinf(want), kernels.UNREACHABLE, want).astype(np.int64)
        for flavour in ("numba", "numpy"):
            monkeypatch.setattr(kernels, "bfs", getattr(kernels, f"bfs_{flavour}"))
            for s in range(n):
                checked += 1
                if not np.array_equal(bfs_from(g, s + 1), want[s]):
                    mismatches += 1
    record("3 BFS == Floyd-Warshall", mismatches == 0,
           f"50 graphs, {checked} source rows over both kernels, {mismatches} mismatches", t0)


def test_4_small_world():
    t0 = time.perf_counter()
    n = 10_000
    g = build_graph(population(n), generate_er(n, 10, seed=4))
    paths = path_stats(g, mode="sampled", sources=1000, seed=4)
    cls = classify(paths.mean, fit_power_law(degree_histogram(g)))
    target = math.log(n) / math.log(10)
    ok = abs(paths.mean - target) <= 0.4 and cls.small_world
    record("4 small world (ER n=10k, k=10)", ok,
           f"mean path {paths.mean:.3f} vs {target:.1f}+-0.4, small_world={cls.small_world}", t0)


def test_5_scale_free():
    t0 = time.perf_counter()
    n = 50_000
    store = population(n)
    g = build_graph(store, generate_ba(n, 5, seed=5))
    fit = fit_power_law(degree_histogram(g))
    paths = path_stats(g, mode="sampled", sources=200, seed=5)
    cls = classify(paths.mean, fit)
    ctrl = build_graph(store, generate_er(n, 10, seed=5))
    ctrl_fit = fit_power_law(degree_histogram(ctrl))
    ctrl_cls = classify(path_stats(ctrl, mode="sampled", sources=200, seed=5).mean, ctrl_fit)
    ok = (2.3 <= fit.alpha <= 3.2 and fit.r2 >= 0.85 and cls.scale_free
          and not ctrl_cls.scale_free)
    record("5 scale free (BA n=50k, m=5)", ok,
           f"alpha {fit.alpha:.3f}, r2 {fit.r2:.3f}, scale_free={cls.scale_free}; "
           f"ER control alpha {ctrl_fit.alpha:.3f}, r2 {ctrl_fit.r2:.3f}, "
           f"scale_free={ctrl_cls.scale_free}", t0)


def test_6_power_law_exactness():
    t0 = time.perf_counter()
    k = np.arange(1, 51)
    parts, ok = [], True
    for c in (1e2, 1e3, 1e4):
        exact = fit_power_law(dict(zip(k.tolist(), (c * k ** -2.5).tolist())))
        rounded = fit_power_law({int(x): max(1, round(c * x ** -2.5)) for x in k})
        ok &= abs(exact.alpha - 2.5) <= 5e-2 and abs(rounded.alpha - 2.5) <= 5e-2
        parts.append(f"C={c:g}: {exact.alpha:.4f} (integer counts {rounded.alpha:.4f})")
    record("6 power-law exponent recovery", ok, "; ".join(parts), t0)


def test_7_demographics_invariants():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    failures = 0
    for i in range(1000):
        n = int(rng.integers(1, 400))
        store = population(n, seed=10_000 + i)
        full = cross_tabulate(store, ("gender", "age", "status"))
        for dims in REPORT_DIMS:
            table = cross_tabulate(store, dims)
            if len(dims) == 1:
                pct = percentages(table).percents.sum()
                failures += table.counts.sum() != n or abs(pct - 100) > 1e-9
            failures += not np.array_equal(full.marginalize(dims).counts, table.counts)
        # brute-force spot check on every 50th store
        if i % 50 == 0:
            oracle = count_cells(store, ("gender", "age", "status"))
            failures += any(c != oracle.get(lab, 0) for lab, c in full.cells())
    record("7 demographics invariants", failures == 0,
           f"1000 stores, {failures} violations", t0)


def test_8_mixing_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    bad = 0
    for i in range(100):
        n = int(rng.integers(2, 501))
        store = population(n, seed=20_000 + i)
        pairs = random_pairs(rng, n, int(rng.integers(0, 4 * n)))
        r = mixing_report(store, EdgeStore(pairs))
        gender, gaps, statuses, skipped = mixing_by_enumeration(store, pairs.tolist())
        bad += r.gender_pairs != gender
        bad += {g: int(c) for g, c in enumerate(r.age_gap_histogram) if c} != dict(gaps)
        bad += {k: v for k, v in r.status_pairs.items() if v} != dict(statuses)
        bad += sum(r.gender_pairs.values()) != len(pairs) - skipped
    het_m, het_e = generate(SynthConfig(n=2000, model=BAModel(4), seed=81,
                                        mixing=Mixing(1.0, math.inf)))
    g = gender_mixing(het_m, het_e)
    hom_m, hom_e = generate(SynthConfig(n=2000, model=BAModel(4), seed=82,
                                        mixing=Mixing(0.5, 5.0)))
    share = gap_share(mixing_report(hom_m, hom_e).age_gap_histogram, 10)
    ok = bad == 0 and g["MF"] > g["MM"] + g["FF"] and share > 0.8
    record("8 mixing oracle", ok,
           f"100 graphs, {bad} mismatches; bias=1.0: MF {g['MF']} vs MM+FF "
           f"{g['MM'] + g['FF']}; scale=5: gap_share(10) {share:.3f}", t0)


def test_9_pagination_contract():
    t0 = time.perf_counter()
    problems = []
    for n in (0, 1, 9, 10, 11, 25, 100):
        store = random_store(np.random.default_rng(n), n)
        snap = Snapshot(store, EdgeStore(), page_size=10)
        pages, last = page_count(n, 10)
        served = [snap.search("laguna", k) for k in range(pages)]
        ids = [e["account_id"] for page in served for e in page["entries"]]
        sizes = [len(page["entries"]) for page in served]
        direct = [len(paginate(list(range(n)), 10, k).entries) for k in range(pages)]
        if (served[0]["total_pages"] != pages or sizes != direct
                or ids != sorted(r.account_id for r in store)
                or sizes[-1] != last or last != (n % 10 or (10 if n else 0))
                or any(s != 10 for s in sizes[:-1])):
            problems.append(n)
    record("9 pagination contract", not problems,
           "n in {0,1,9,10,11,25,100} " + (f"failed for {problems}" if problems else "all agree"),
           t0)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
