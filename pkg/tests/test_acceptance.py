"""Exit criteria: one test per criterion, each printing a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` (or execute this file directly)
to see the summary lines.
"""
import math
import time

import numpy as np
import pytest

from framemult import (
    MultiplierSystem,
    exact_constant,
    explicit_split,
    khintchine_witness,
    optimal_split,
    replicate_rational,
    spectral_summary,
)
from framemult.frames import frame_operator
from framemult.generators import (
    example_basis_pair,
    harmonic_funtf,
    make_rng,
    random_equalnorm_pair,
    random_equinorm_pair,
    random_gaussian,
    tight_equinorm_pair,
)
from framemult.splitting import reduced_pairs
from framemult.unconditionality import rademacher_mean_abs
from framemult.verify import kappa

import oracles

K1 = 2 ** -0.5

pytestmark = pytest.mark.acceptance


def report(number, title, ok, elapsed, limit, detail):
    ok = ok and elapsed < limit
    line = (f"CRITERION {number} {'PASS' if ok else 'FAIL'}: {title} "
            f"({detail}; {elapsed:.2f}s of {limit:.0f}s)")
    print(line)
    return ok


def sized(seed, n_max, m_max, base=0):
    rng = make_rng(50_000 + base + seed)
    m = int(rng.integers(1, m_max + 1))
    n = int(rng.integers(m, n_max + 1))
    return n, m


def test_c1_basis_pair_reproduction(capsys):
    t0 = time.perf_counter()
    worst = {"C": 0.0, "opt": 0.0}
    ok = True
    for n in (2, 4, 8, 12):
        sys = example_basis_pair(n)
        c = exact_constant(sys).value
        bf = spectral_summary(sys.f).bessel
        ex = explicit_split(sys)
        opt = optimal_split(sys).objective
        worst["C"] = max(worst["C"], abs(c - math.sqrt(n)))
        worst["opt"] = max(worst["opt"], abs(opt - math.sqrt(n)))
        ok &= abs(c - math.sqrt(n)) <= 1e-9
        ok &= bf == float(n)
        ok &= (ex.bessel_x, ex.bessel_f) == (1.0, float(n))
        ok &= abs(opt - math.sqrt(n)) <= 1e-3
    el = time.perf_counter() - t0
    with capsys.disabled():
        ok = report(1, "basis pair C = sqrt N, bounds (1, N), optimum sqrt N", ok, el, 5,
                    f"max |C - sqrt N| = {worst['C']:.1e}, max |opt - sqrt N| = {worst['opt']:.1e}")
    assert ok


def test_c2_funtf_frame_bound(capsys):
    t0 = time.perf_counter()
    errs = []
    for n, m in ((3, 2), (6, 3), (10, 4)):
        s = frame_operator(harmonic_funtf(n, m))
        errs.append(float(np.max(np.abs(s - (n / m) * np.eye(m)))))
    el = time.perf_counter() - t0
    ok = max(errs) <= 1e-10
    with capsys.disabled():
        ok = report(2, "harmonic frames have S = (n/m) I", ok, el, 1, f"max entry error {max(errs):.1e}")
    assert ok


def test_c3_par_split_suite(capsys):
    t0 = time.perf_counter()
    worst = math.inf
    ok = True
    for seed in range(1, 51):
        n, m = sized(seed, 8, 4)
        sys = random_gaussian(n, m, seed)
        c = exact_constant(sys).value
        b = float(np.min(sys.x.norms * sys.f.norms))
        split = explicit_split(sys)
        margin = c * c / b + 1e-8 - max(split.bessel_x, split.bessel_f)
        worst = min(worst, margin)
        ok &= margin >= 0
    el = time.perf_counter() - t0
    with capsys.disabled():
        ok = report(3, "explicit split bound <= C^2 / b on 50 systems", ok, el, 60,
                    f"smallest margin {worst:.3g}")
    assert ok


def test_c4_main_equal_norm_suite(capsys):
    t0 = time.perf_counter()
    kap = kappa(K1)
    worst = math.inf
    ok = abs(kap - 27.0) <= 1e-12
    for seed in range(1, 51):
        n, m = sized(seed, 8, 4, base=1000)
        sys = random_equalnorm_pair(n, m, seed)
        c = exact_constant(sys).value
        for frame in (sys.f, sys.x):
            summ = spectral_summary(frame)
            margin = kap * summ.beta ** 2 * c + 1e-8 - summ.bessel
            worst = min(worst, margin)
            ok &= margin >= 0
    el = time.perf_counter() - t0
    with capsys.disabled():
        ok = report(4, "lambda_1 <= 27 beta^2 C on 50 equal-norm pairs", ok, el, 90,
                    f"smallest margin {worst:.3g}")
    assert ok


def test_c5_trace_bound_equality(capsys):
    t0 = time.perf_counter()
    worst = 0.0
    for seed in range(1, 11):
        n, m = sized(seed, 10, 4, base=2000)
        sys = tight_equinorm_pair(n, m, seed)
        worst = max(worst, abs(optimal_split(sys).objective - n / m))
    el = time.perf_counter() - t0
    ok = worst <= 1e-4
    with capsys.disabled():
        ok = report(5, "optimal split equals N/M on 10 tight pairs", ok, el, 60,
                    f"max deviation {worst:.1e}")
    assert ok


def test_c6_khintchine_enumeration(capsys):
    t0 = time.perf_counter()
    rng = make_rng(6)
    lo = math.inf
    for i in range(1000):
        a = rng.standard_normal(1 + i % 14)
        lo = min(lo, rademacher_mean_abs(a) / float(np.linalg.norm(a)))
    pair = rademacher_mean_abs([1.0, 1.0]) / math.sqrt(2.0)
    el = time.perf_counter() - t0
    ok = lo >= K1 - 1e-12 and abs(pair - K1) <= 1e-15
    with capsys.disabled():
        ok = report(6, "Khintchine ratio >= 2^-1/2, attained at (1, 1)", ok, el, 30,
                    f"min ratio {lo:.12f}, (1,1) ratio - 2^-1/2 = {pair - K1:.1e}")
    assert ok


def test_c7_oracle_equivalence(capsys):
    t0 = time.perf_counter()
    enum_err = 0.0
    for seed in range(1, 21):
        n, m = sized(seed, 6, 4, base=3000)
        sys = random_gaussian(n, m, seed)
        ref = oracles.brute_constant(sys.x.vectors, sys.f.vectors)
        enum_err = max(enum_err, abs(exact_constant(sys).value - ref))
    grid_err = 0.0
    for seed in range(1, 11):
        n, m = sized(seed, 3, 3, base=4000)
        sys = random_gaussian(n, m, seed)
        _, x, f = reduced_pairs(sys)
        ref, _ = oracles.grid_split_minimum(x, f)
        grid_err = max(grid_err, abs(optimal_split(sys).objective - ref) / ref)
    el = time.perf_counter() - t0
    ok = enum_err <= 1e-12 and grid_err <= 1e-3
    with capsys.disabled():
        ok = report(7, "halved enumeration and optimizer match brute-force oracles", ok, el, 120,
                    f"enumeration {enum_err:.1e}, split rel {grid_err:.1e}")
    assert ok


def test_c8_witness_soundness(capsys):
    t0 = time.perf_counter()
    worst = math.inf
    ok = True
    for seed in range(1, 21):
        rng = make_rng(60_000 + seed)
        n, m = int(rng.integers(1, 9)), int(rng.integers(1, 7))
        sys = random_equinorm_pair(n, m, seed, scale=float(rng.uniform(0.5, 2.0)))
        w = khintchine_witness(sys, k1=K1, seed=seed)
        c = exact_constant(sys).value
        worst = min(worst, c + 1e-10 - w.certified_lower_bound)
        ok &= w.certified_lower_bound <= c + 1e-10
        # sum_i |sum_j delta_j a_ij| >= k1 D N, recomputed from the returned delta
        lhs = float(np.sum(np.abs(sys.f.vectors @ w.delta)))
        ok &= lhs >= K1 * w.norm * n * (1 - 1e-12)
    el = time.perf_counter() - t0
    with capsys.disabled():
        ok = report(8, "witness lower bound <= C and delta inequality", ok, el, 60,
                    f"smallest C - bound {worst:.3g}")
    assert ok


def test_c9_replication_invariance(capsys):
    t0 = time.perf_counter()
    op_err = 0.0
    worst = math.inf
    ok = True
    for seed in range(1, 11):
        rng = make_rng(70_000 + seed)
        n, m = int(rng.integers(2, 6)), int(rng.integers(1, 4))
        sys = random_gaussian(n, m, seed)
        k = rng.integers(1, 4, size=n)
        rep = replicate_rational(sys, k)
        for a, b in ((sys.x, rep.x), (sys.f, rep.f)):
            op_err = max(op_err, float(np.max(np.abs(frame_operator(a) - frame_operator(b)))))
        margin = exact_constant(sys).value + 1e-10 - exact_constant(rep).value
        worst = min(worst, margin)
        ok &= margin >= 0
    el = time.perf_counter() - t0
    ok &= op_err <= 1e-13
    with capsys.disabled():
        ok = report(9, "replication keeps frame operators and does not raise C", ok, el, 60,
                    f"operator error {op_err:.1e}, smallest margin {worst:.3g}")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
