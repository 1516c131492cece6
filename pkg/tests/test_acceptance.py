"""Acceptance suite: one PASS/FAIL line per criterion (shown in the pytest summary).

Tolerances and budgets are fixed here and must not be loosened.
"""

import math
import time

import numpy as np
import pytest

from haudim import kernels as K
from haudim import potential as P
from haudim.config import parse_config
from haudim.experiments import collision_dim_batch, inverse_dim_batch, level_dim_batch, run_experiment
from haudim.scaling import ProcessClass, collision_gamma, gamma_closed_form, gamma_numeric
from haudim.subordinator import SubordinatorSpec, half_stable_cdf, laplace_check, sample_subordinator
from haudim.timeset import Cantor
from scipy import stats

LOG2_LOG3 = math.log(2) / math.log(3)


def test_c01_gamma_oracle(record):
    rng = np.random.default_rng(20240601)
    t0 = time.perf_counter()
    worst, exact = 0.0, True
    for _ in range(200):
        d1, d2 = rng.uniform(0.5, 3.0, 2)
        a1, a2, b1, b2 = rng.uniform(0.5, 2.5, 4)
        p = ProcessClass.from_exponents(d1, a1, d2, a2)
        s = rng.uniform(0.0, 1.2 * d1)
        worst = max(worst, abs(gamma_numeric(p.volume, p.scale, s) - gamma_closed_form(p, s)))
        q1 = ProcessClass.from_exponents(d1, a1, d2, a2)
        q2 = ProcessClass.from_exponents(d1, b1, d2, b2)
        lo, hi = sorted((a1, b1))
        exact &= collision_gamma(q1, q2, s) == max((d1 - s) / lo + d1 / hi, 0.0)
    dt = time.perf_counter() - t0
    ok = worst <= 1e-6 and exact and dt < 5.0
    assert record(1, ok, f"max |numeric - closed| = {worst:.2e} (<= 1e-6), collision exact = {exact}, {dt:.1f}s (< 5s)")


def test_c02_brownian_level_set(record):
    t0 = time.perf_counter()
    b = level_dim_batch(2.0, n_steps=10**7, trials=20, seed=2002, tolerance=0.07)
    dt = time.perf_counter() - t0
    ok = b.passed and dt < 300
    assert record(2, ok, f"median slope {b.median:.4f} vs 0.5 +- 0.07, {dt:.0f}s (< 300s)")


def test_c03_stable_level_set(record):
    t0 = time.perf_counter()
    b = level_dim_batch(1.5, n_steps=10**7, trials=20, seed=2003, tolerance=0.08)
    dt = time.perf_counter() - t0
    ok = b.passed and abs(b.prediction.value - 1 / 3) < 1e-12 and dt < 300
    assert record(3, ok, f"median slope {b.median:.4f} vs 1/3 +- 0.08, {dt:.0f}s (< 300s)")


def test_c04_empty_regime(record):
    b = level_dim_batch(0.8, level=1.0, x0=0.0, n_steps=10**6, trials=100, seed=2004, empty_fraction=0.95)
    ok = b.prediction.empty and b.n_empty >= 95
    assert record(4, ok, f"Empty in {b.n_empty}/100 trials (>= 95)")


def test_c05_cantor_inverse_image(record):
    b = inverse_dim_batch(2.0, Cantor(1 / 3, 12), n_steps=10**6, trials=20, seed=2005, tolerance=0.10)
    pred = 1 - (1 - LOG2_LOG3) / 2
    ok = b.passed and abs(b.prediction.value - pred) < 1e-12
    assert record(5, ok, f"median slope {b.median:.4f} vs {pred:.3f} +- 0.10")


def test_c06_collision_sets(record):
    bm = collision_dim_batch(2.0, 2.0, n_steps=10**6, trials=20, seed=2006, tolerance=0.08)
    mixed = collision_dim_batch(1.2, 2.0, n_steps=10**6, trials=20, seed=2106, tolerance=0.10)
    ok = bm.passed and mixed.passed and bm.prediction.value == 0.5 and abs(mixed.prediction.value - 0.5) < 1e-12
    assert record(
        6, ok, f"two-Brownian median {bm.median:.4f} (0.5 +- 0.08); 1.2 vs 2 median {mixed.median:.4f} (0.5 +- 0.10)"
    )


def test_c07_subordinator(record):
    spec = SubordinatorSpec(0.5, 1.0)
    x = sample_subordinator(spec, 10**6, 2007)
    ks = stats.kstest(x, lambda s: half_stable_cdf(s, 1.0)).statistic
    z = max(abs(r["z"]) for r in laplace_check(x, spec, lams=(0.5, 1.0, 2.0)))
    ok = ks < 0.005 and z <= 3.0
    assert record(7, ok, f"KS {ks:.5f} (< 0.005), max Laplace |z| {z:.2f} (<= 3)")


def test_c08_subordination_identity(record):
    ts, xs = np.geomspace(0.1, 10, 9), np.linspace(0, 5, 11)
    e_half = max(
        abs(K.subordinated_kernel(2.0, 0.5, t, x) / (t / (math.pi * (t * t + x * x))) - 1) for t in ts for x in xs
    )
    e_34 = max(abs(K.subordinated_kernel(2.0, 0.75, t, x) / K.stable_kernel(1.5, t, x) - 1) for t in ts for x in xs)
    ok = e_half < 0.01 and e_34 < 0.015
    assert record(8, ok, f"Cauchy max rel err {e_half:.1e} (< 1%), 1.5-stable {e_34:.1e} (< 1.5%)")


def test_c09_heat_bounds(record):
    worst, finite = 0.0, True
    for a, g in ((2.0, 0.5), (1.6, 0.75), (1.2, 0.5)):
        for rep in K.check_subordinate_bounds(a, g):
            col = 0 if rep.trend_axis == "t" else 1
            axis = np.array([row[col] for row in rep.rows if row[col] > 0])
            span = axis.max() / axis.min()
            worst = max(worst, abs(rep.trend_slope))
            finite &= math.isfinite(rep.spread) and math.log10(span) >= 3
    ok = worst <= 0.1 and finite
    assert record(9, ok, f"max |trend slope| {worst:.3f} (<= 0.1), spreads finite over >= 3 decades: {finite}")


def test_c10_kernel_sanity(record):
    ck = mass = closed = 0.0
    for a in (0.8, 1.3, 1.7, 2.0):
        lhs, rhs = K.chapman_kolmogorov(a, 0.5, 1.5, 0.7)
        ck = max(ck, abs(lhs - rhs))
        mass = max(mass, abs(K.total_mass(a, 1.3) - 1))
    for t in (0.1, 1.0, 10.0):
        for x in (0.0, 0.5, 3.0):
            g = math.exp(-x * x / (4 * t)) / math.sqrt(4 * math.pi * t)
            c = t / (math.pi * (t * t + x * x))
            closed = max(closed, abs(K.fourier_kernel(2.0, t, x) - g), abs(K.fourier_kernel(1.0, t, x) - c))
    ok = ck <= 1e-6 and mass <= 1e-6 and closed <= 1e-8
    assert record(10, ok, f"CK {ck:.1e}, mass {mass:.1e} (<= 1e-6); closed forms {closed:.1e} (<= 1e-8)")


def test_c11_frostman(record):
    br = P.frostman_bracket(1 / 3, np.round(np.arange(0.30, 0.951, 0.01), 2))
    ok = abs(br.flip - LOG2_LOG3) <= 0.05
    assert record(11, ok, f"flip at s = {br.flip:.2f} vs {LOG2_LOG3:.4f} (within 0.05)")


def test_c12_wiener(record):
    def agree(maker):
        return sum(P.wiener_experiment(maker(seed=3000 + r)).agrees for r in range(10))

    n_bm, n_tr = agree(P.brownian_diagonal_config), agree(P.transient_pair_config)
    ok = n_bm >= 9 and n_tr >= 9
    assert record(12, ok, f"Brownian DivergesLikely {n_bm}/10, transient ConvergesLikely {n_tr}/10 (>= 9 each)")


REPRO = {
    "level-dim": "[process.1]\nalpha = 1.5\n[params]\nn_steps = 200000\ntrials = 16\ngamma = 0.8\n",
    "collision-dim": "[process.1]\nalpha = 1.2\n[params]\nn_steps = 200000\ntrials = 16\n",
    "inverse-dim": "[params]\nn_steps = 200000\ntrials = 16\n",
    "wiener": "[params]\ndesign = transient\ntrials = 200\n",
    "subordinator-check": "[params]\nsamples = 200000\n",
}


def test_c13_reproducibility(record):
    bad = []
    for kind, body in REPRO.items():
        cfg = parse_config(f"[experiment]\nkind = {kind}\nmaster_seed = 2013\n" + body)
        outs = {w: run_experiment(cfg, w).csv.encode("utf-8") for w in (1, 4, 16)}
        if not (outs[1] == outs[4] == outs[16]):
            bad.append(kind)
    ok = not bad
    assert record(13, ok, f"byte-identical CSV at 1/4/16 workers for {', '.join(REPRO)}" + (f"; differs: {bad}" if bad else ""))
