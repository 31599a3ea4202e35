"""Acceptance criteria 1-10, one test each.

Every test records a PASS/FAIL line that is printed in the terminal summary.
"""

import time

import numpy as np
import pytest
from helpers import SPHERE_BOUNDS, mc_hypervolume, record, sphere

from nbiswarm import metrics, reproduce
from nbiswarm.harness import RunConfig, frontier_csv, load_fixture, run_sweep
from nbiswarm.swarm import gsa, hopso, pso

FIXTURE_NAMES = ("A1", "A2", "A3")


def _claims(criterion):
    return [c for c in reproduce.fixture_claims() if c.criterion == criterion]


def _check_claims(criterion, budget):
    start = time.perf_counter()
    claims = [c for c in _claims(criterion) if c.passed is not None]
    elapsed = time.perf_counter() - start
    failed = [c.line() for c in claims if not c.passed]
    ok = bool(claims) and not failed and elapsed < budget
    record(criterion, ok, f"{len(claims) - len(failed)}/{len(claims)} checks in {elapsed:.2f}s"
           + (f"; failed: {failed}" if failed else ""))
    assert ok, failed


def test_criterion_1_point_hvi():
    start = time.perf_counter()
    rows = [(F, hvi) for alg in reproduce.RANKED.values() for F, hvi in alg.values()]
    rows.append(reproduce.GA_BEST)
    errors = [abs(metrics.hvi_point(F) - hvi) for F, hvi in rows]
    elapsed = time.perf_counter() - start
    ok = len(rows) == 10 and max(errors) <= 0.02 and elapsed < 1
    record(1, ok, f"10 printed HVIs, max error {max(errors):.4f} (tol 0.02), {elapsed:.3f}s")
    assert ok


def test_criterion_2_percentages():
    start = time.perf_counter()
    best = {alg: max(p.point_hvi for p in load_fixture(name).points)
            for alg, name in reproduce.FIXTURE_OF.items()}
    best["ga"] = load_fixture("table8_ga").points[0].point_hvi
    errors = {f"{a}/{b}": abs(metrics.pct_difference(best[a], best[b]) - pct)
              for a, b, pct in reproduce.PCT_CLAIMS}
    elapsed = time.perf_counter() - start
    ok = max(errors.values()) <= 0.01 and elapsed < 1
    record(2, ok, "max error " + f"{max(errors.values()):.5f} pp (tol 0.01), {elapsed:.3f}s")
    assert ok


def test_criterion_3_fixture_ranking():
    claims = _claims(3)
    gated = [c for c in claims if c.passed is not None]
    reported = [c for c in claims if c.label.endswith("weights")]
    failed = [c.line() for c in gated if not c.passed]
    ok = len(gated) == 9 and not failed
    record(3, ok, f"{len(gated) - len(failed)}/9 ranked rows match; "
           f"{len(reported)} listed weight disagreements reported")
    for c in reported:
        print(c.line())
    assert ok, failed


def _random_sets(n=100, seed=0):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        size = int(rng.integers(1, 51))
        scale = rng.uniform(1, 100, 3)
        yield rng.uniform(0.05, 1.0, (size, 3)) * scale


def test_criterion_4_exact_vs_monte_carlo():
    start = time.perf_counter()
    sets = [load_fixture(name).objectives for name in FIXTURE_NAMES] + list(_random_sets())
    worst = 0.0
    for i, P in enumerate(sets):
        exact = metrics.hvi_set(P)
        est = mc_hypervolume(P, samples=10**7, seed=i)
        worst = max(worst, abs(est - exact) / exact)
    elapsed = time.perf_counter() - start
    ok = worst <= 0.005 and elapsed < 60
    record(4, ok, f"{len(sets)} sets, worst relative gap {100 * worst:.3f}% (tol 0.5%), {elapsed:.1f}s")
    assert ok


def test_criterion_5_frontier_ordering():
    s = {alg: load_fixture(name).set_hvi() for alg, name in reproduce.FIXTURE_OF.items()}
    ok = s["hopso"] > s["pso"] > s["gsa"]
    pct = {k: metrics.pct_difference(s[k[0]], s[k[1]]) for k in reproduce.SET_HVI_PCT_REPORTED}
    record(5, ok, f"set HVI hopso {s['hopso']:.2f} > pso {s['pso']:.2f} > gsa {s['gsa']:.2f}; "
           + ", ".join(f"{a}/{b} {v:.4g}% (reported {reproduce.SET_HVI_PCT_REPORTED[(a, b)]}%, not gated)"
                       for (a, b), v in pct.items()))
    assert ok


def test_criterion_6_convergence():
    S = load_fixture("A3").objectives
    ranges = metrics.union_ranges(S)
    self_zero = metrics.convergence_metric(S, S, ranges) == 0.0
    ref = np.array([[1.0, 2.0, 3.0]])
    rng_box = np.array([[0.0, 10.0]] * 3)
    direction = np.array([1.0, -2.0, 0.5])
    values = [metrics.convergence_metric(ref + k * direction, ref, rng_box) for k in np.linspace(0, 3, 13)]
    increasing = all(b > a for a, b in zip(values, values[1:]))
    soft = [c for c in _claims(6) if c.passed is not None][0]
    ok = self_zero and increasing
    record(6, ok, f"C(S,S)=0: {self_zero}; strictly increasing under translation: {increasing}; "
           f"soft fixture check {soft.status} ({soft.detail})")
    assert ok


COMPETENCE = {
    "pso": lambda s: pso.run_pso(sphere, pso.PsoParams(
        swarm_size=20, social_influence=None, personal_influence=None, t_max=500,
        max_evaluations=10_000, stall_window=10**6), SPHERE_BOUNDS, s),
    "gsa": lambda s: gsa.run_gsa(sphere, gsa.GsaParams(
        n_agents=20, g0=5.0, alpha=0.04, t_max=500, max_evaluations=10_000,
        stall_window=10**6), SPHERE_BOUNDS, s),
    "hopso": lambda s: hopso.run_hopso(sphere, hopso.HopsoParams(
        swarm_size=20, social_influence=None, personal_influence=None, t_max=500,
        max_evaluations=10_000, stall_window=10**6), SPHERE_BOUNDS, s),
}


def test_criterion_7_solver_competence():
    start = time.perf_counter()
    hits, evals = {}, {}
    for alg, solve in COMPETENCE.items():
        results = [solve(s) for s in range(20)]
        hits[alg] = sum(np.linalg.norm(r.best_position) < 1e-2 for r in results)
        evals[alg] = max(r.evaluations for r in results)
    elapsed = time.perf_counter() - start
    ok = all(h >= 18 for h in hits.values()) and max(evals.values()) <= 10_000 and elapsed < 30
    record(7, ok, ", ".join(f"{a} {h}/20" for a, h in hits.items())
           + f" within {max(evals.values())} evaluations, {elapsed:.1f}s")
    assert ok


def test_criterion_8_sweep_plausibility():
    start = time.perf_counter()
    claims, _ = reproduce.sweep_claims(seed=0, n_seeds=5)
    elapsed = time.perf_counter() - start
    gated = [c for c in claims if c.criterion == 8 and c.passed is not None]
    info = [c for c in claims if c.criterion == 8 and c.passed is None]
    ok = all(c.passed for c in gated) and elapsed < 300
    record(8, ok, "; ".join(c.detail for c in gated + info) + f"; {elapsed:.1f}s")
    assert ok, [c.line() for c in gated]


def test_criterion_9_determinism(tmp_path):
    same = {}
    for alg in ("pso", "gsa", "hopso"):
        outs = []
        for k in range(2):
            out = tmp_path / f"{alg}{k}"
            run_sweep(RunConfig(algorithm=alg, seed=11, output=str(out)))
            outs.append((out / "frontier.csv").read_bytes())
        same[alg] = outs[0] == outs[1]
    ok = all(same.values())
    record(9, ok, "byte-identical repeated sweeps: " + ", ".join(f"{a} {v}" for a, v in same.items()))
    assert ok


def test_criterion_10_disabled_layer_matches_pso():
    steps = 100
    identical = []
    for seed in range(5):
        h_params = hopso.HopsoParams.disabled(t_max=steps, stall_window=10**6)
        p_params = pso.PsoParams(t_max=steps, stall_window=10**6)
        h = hopso.init_hopso(h_params, SPHERE_BOUNDS, seed, sphere)
        p = pso.init_swarm(p_params, SPHERE_BOUNDS, seed, sphere)
        ok = h.positions.tobytes() == p.positions.tobytes()
        for _ in range(steps):
            hopso.hopso_step(h, h_params, sphere)
            pso.pso_step(p, p_params, sphere)
            ok &= h.positions.tobytes() == p.positions.tobytes()
        identical.append(ok)
    record(10, all(identical), f"positions bitwise equal for {steps} steps on {sum(identical)}/5 seeds")
    assert all(identical)
