"""Acceptance suite: one test and one PASS/FAIL line per criterion.

Run alone with ``pytest tests/test_acceptance.py -v``; the summary lines
appear in the "acceptance criteria" section at the end of the report.
"""
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from chaos_bounds import bounds as B
from chaos_bounds.diagram import RowLayout, chaos_moment_via_diagrams, count_diagrams, embed_form
from chaos_bounds.distributions import gaussian_moments, get_input, limit_comparison
from chaos_bounds.form_core import v_squared
from chaos_bounds.moment_engine import (
    exact_moment_by_expansion,
    exact_moment_rademacher,
    rademacher_distribution,
)
from chaos_bounds.montecarlo import SE_MARGIN, sample_z

from conftest import random_form

CORPUS_SEED = 1729
TRIANGLE_SEED = 4242
RTOL = 1e-9


@pytest.fixture(scope="module")
def corpus():
    rng = np.random.default_rng(CORPUS_SEED)
    return [random_form(rng, k_values=(1, 2, 3), n_max=8, coeff=3) for _ in range(200)]


def u_grid(dist, points=20):
    return np.linspace(0.0, dist.max_abs, points)


def test_criterion_01_moment_domination(corpus, acceptance):
    start = time.perf_counter()
    failures = []
    for i, form in enumerate(corpus):
        v2 = v_squared(form)
        for M in (1, 2, 3):
            exact = exact_moment_rademacher(form, 2 * M)
            if not B.dominates(B.theorem2_moment_bound(form.k, M, v2), exact, RTOL):
                failures.append((i, M))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 60
    acceptance(1, ok, f"{len(corpus)} forms x M=1..3, {len(failures)} violations, {elapsed:.1f}s (<60s)")
    assert ok, failures


def test_criterion_02_gaussian_comparison(corpus, acceptance):
    gauss = gaussian_moments()
    failures = []
    for i, form in enumerate(corpus):
        dist = rademacher_distribution(form)
        for M in (1, 2, 3):
            gss = exact_moment_by_expansion(form.abs(), gauss, 2 * M)
            if not B.dominates(gss, dist.moment(2 * M), RTOL):
                failures.append((i, M))
    acceptance(2, not failures, f"Rademacher <= Gaussian(|a|) moments, {len(failures)} violations")
    assert not failures, failures


def test_criterion_03_oracle_triangle(acceptance):
    rng = np.random.default_rng(TRIANGLE_SEED)
    forms = [random_form(rng, k_values=(1, 2), n_max=5, coeff=3) for _ in range(50)]
    gauss = gaussian_moments()
    worst = 0.0
    failures = []
    for i, form in enumerate(forms):
        kernel = embed_form(form, True)
        sigma2 = kernel.squared_norm()
        for M in (1, 2):
            diag = chaos_moment_via_diagrams(kernel, M)
            expn = exact_moment_by_expansion(form.abs(), gauss, 2 * M)
            rel = abs(diag - expn) / max(1.0, abs(expn))
            worst = max(worst, rel)
            cap = B.double_factorial_odd(2 * form.k * M - 1) * sigma2**M
            if rel > RTOL or not (B.dominates(cap, diag) and B.dominates(cap, expn)):
                failures.append((i, M))
    acceptance(3, not failures, f"50 instances, max rel. disagreement {worst:.1e}, {len(failures)} failures")
    assert not failures, failures


def test_criterion_04_diagram_counts(acceptance):
    failures = []
    checked = 0
    for k in range(1, 7):
        for M in range(1, 7):
            if k * M > 6:
                continue
            layout = RowLayout.equal_rows(k, 2 * M)
            same = count_diagrams(layout, True)
            cross = count_diagrams(layout, False)
            df = math.prod(range(1, 2 * k * M, 2))
            checked += 1
            if same != df or cross > same:
                failures.append((k, M, same, cross, df))
    acceptance(4, not failures, f"{checked} (k, M) pairs with kM <= 6, {len(failures)} mismatches")
    assert not failures, failures


def test_criterion_05_tail_domination(corpus, acceptance):
    exact_failures = []
    for i, form in enumerate(corpus):
        dist = rademacher_distribution(form)
        v2 = v_squared(form)
        for u in u_grid(dist):
            if B.theorem1_tail_bound(float(u), form.k, v2) < dist.tail(float(u)):
                exact_failures.append((i, float(u)))
    samples = 100_000
    mc_failures = []
    for name in ("uniform", "gaussian"):
        inp = get_input(name)
        for i, form in enumerate(corpus):
            z = np.abs(sample_z(form, inp, samples, seed=i, stream=(5,)))
            v2 = v_squared(form)
            for u in np.linspace(0.0, 1.5 * float(z.max()), 20):
                p = np.count_nonzero(z > u) / samples
                se = math.sqrt(p * (1 - p) / samples)
                if B.theorem1_tail_bound(float(u), form.k, v2) < p - SE_MARGIN * se:
                    mc_failures.append((name, i, float(u)))
    ok = not exact_failures and not mc_failures
    acceptance(
        5, ok,
        f"exact: {len(exact_failures)} violations on 200x20 grid; "
        f"Monte Carlo (uniform, gaussian, 1e5 draws): {len(mc_failures)} beyond 5 SE",
    )
    assert ok, (exact_failures, mc_failures)


def test_criterion_06_stirling_step(acceptance):
    ratios = B.stirling_step_ratios(200)
    ok = B.stirling_step_holds(200)
    acceptance(6, ok, f"N=1..200, ratio {ratios[0]:.4f} -> {ratios[-1]:.6f}, all <= 1 and increasing")
    assert ok


def _log_sum_oracle(k, M):
    t2 = math.fsum(math.log(j) for j in range(1, 2 * k * M, 2))
    borell = k * M * math.log(2 * M - 1) + M * math.fsum(math.log(j) for j in range(1, k + 1))
    return t2, borell


def test_criterion_07_borell_comparison(acceptance):
    bad = [(k, M) for k in (1, 2, 3, 4) for M in range(50, 61)
           if not B.compare_theorem2_vs_borell(k, M, 1.0).log_ratio < 0]
    c = B.compare_theorem2_vs_borell(2, 20, 1.0)
    t2, borell = _log_sum_oracle(2, 20)
    close = (abs(c.log_theorem2 - 135.6) <= 0.5 and abs(c.log_borell - 160.4) <= 0.5
             and abs(c.log_theorem2 - t2) < 1e-9 and abs(c.log_borell - borell) < 1e-9)
    ok = not bad and close
    acceptance(
        7, ok,
        f"log_ratio < 0 for k=1..4, M=50..60 ({len(bad)} exceptions); "
        f"k=2, M=20: {c.log_theorem2:.2f} vs {c.log_borell:.2f}",
    )
    assert ok, bad


def test_criterion_08_k1_exponent(acceptance):
    mismatches = 0
    total = 0
    for v2 in (0.25, 1.0, 3.0, 17.5):
        for u in np.linspace(0.01, 10.0, 200):
            total += 1
            u = float(u)
            if B.theorem1_exponent(u, 1, v2) != B.hoeffding_exponent(u, v2):
                mismatches += 1
            elif B.theorem1_tail_bound(u, 1, v2, A=1.0) != min(1.0, B.hoeffding_tail_bound(u, v2)):
                mismatches += 1
    acceptance(8, mismatches == 0, f"{total} (u, v2) points, {mismatches} inexact exponents")
    assert mismatches == 0


@pytest.mark.slow
def test_criterion_09_sharpness_trend(acceptance):
    start = time.perf_counter()
    good = 0
    for seed in range(10):
        d = [r.ks_distance for r in limit_comparison(2, [10, 40, 160], 1.0, 100_000, seed)]
        good += d[0] >= d[1] >= d[2]
    elapsed = time.perf_counter() - start
    ok = good >= 9 and elapsed < 120
    acceptance(9, ok, f"KS non-increasing in {good}/10 seeds (need 9), {elapsed:.1f}s (<120s)")
    assert ok


def test_criterion_10_determinism(tmp_path, acceptance):
    outputs = []
    for run in range(2):
        target = tmp_path / f"selfcheck{run}.json"
        proc = subprocess.run(
            [sys.executable, "-m", "chaos_bounds", "selfcheck", "--seed", "7", "--out", str(target)],
            capture_output=True,
        )
        outputs.append(target.read_bytes() if proc.returncode == 0 else b"")
    ok = outputs[0] == outputs[1] and len(outputs[0]) > 0
    acceptance(10, ok, f"two selfcheck runs (seed 7), {len(outputs[0])} bytes, identical={ok}")
    assert ok
