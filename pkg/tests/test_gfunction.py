import math

import numpy as np
import pytest

from conftest import brute_g_trunc
from cotlab.errors import CapTooLargeError, EmptySampleError
from cotlab.gfunction import (
    EmpiricalCDF,
    G_SECOND_MOMENT_LIMIT,
    build_piecewise,
    g_trunc,
    g_trunc_many,
    kronecker_sequence,
    ks_distance,
    moment_exact,
    mu_integral,
    second_moment_gcd_oracle,
)


def test_g_trunc_examples():
    assert g_trunc(0.5, 4) == pytest.approx(0.75, abs=1e-15)
    assert g_trunc(1 / 3, 2) == pytest.approx(1 / 6, abs=1e-12)
    with pytest.raises(ValueError):
        g_trunc(0.0, 4)
    with pytest.raises(ValueError):
        g_trunc(1.0, 4)


def test_g_trunc_matches_bruteforce():
    for alpha in (0.1, 0.37, 0.5, 0.93):
        for cap in (1, 2, 17, 256):
            assert g_trunc(alpha, cap) == pytest.approx(brute_g_trunc(alpha, cap), abs=1e-13)


def test_g_trunc_antisymmetry():
    # alpha dyadic, l*alpha never integral for l <= cap: exact float mirror
    alpha = 1 / 64
    for cap in (2, 5, 31):
        assert abs(g_trunc(alpha, cap) + g_trunc(1 - alpha, cap)) < 1e-12


def test_g_trunc_many_matches_scalar():
    alphas = kronecker_sequence(200)
    vals = g_trunc_many(alphas, 64)
    for i in (0, 7, 199):
        assert vals[i] == pytest.approx(g_trunc(float(alphas[i]), 64), abs=1e-12)


def test_build_piecewise_cap1():
    rep = build_piecewise(1)
    assert rep.breakpoints() == [(0, 1), (1, 1)]
    assert rep.segment_count == 1
    assert rep.intercepts().tolist() == [1.0]
    assert rep.slope == -2.0


def test_build_piecewise_cap2():
    rep = build_piecewise(2)
    assert rep.breakpoints() == [(0, 1), (1, 2), (1, 1)]
    assert rep.intercepts().tolist() == [1.5, 2.5]
    assert rep.slope == -4.0


def test_build_piecewise_breakpoint_set():
    rep = build_piecewise(4)
    assert rep.breakpoints() == [
        (0, 1), (1, 4), (1, 3), (1, 2), (2, 3), (3, 4), (1, 1),
    ]


def test_piecewise_matches_direct_at_midpoints():
    rng = np.random.default_rng(2024)
    for cap in (3, 8, 64, 256, 1024):
        rep = build_piecewise(cap)
        mids = (rep.x[:-1] + rep.x[1:]) / 2.0
        take = rng.choice(mids.size, size=min(1000, mids.size), replace=False)
        for i in take.tolist():
            alpha = float(mids[i])
            assert abs(rep(alpha) - g_trunc(alpha, cap)) < 1e-12


def test_piecewise_right_continuous_at_breakpoints():
    rep = build_piecewise(8)
    # value at a breakpoint equals the direct sum there ({s*alpha} = 0 terms)
    for num, den in ((1, 2), (1, 3), (3, 8)):
        alpha = num / den
        assert rep(alpha) == pytest.approx(g_trunc(alpha, 8), abs=1e-12)


def test_cap_guard():
    with pytest.raises(CapTooLargeError):
        build_piecewise((1 << 12) + 1)
    with pytest.raises(ValueError):
        build_piecewise(0)


def test_moment_exact_first_moment_vanishes():
    for cap in (1, 2, 3, 17, 64, 256, 1024):
        assert abs(moment_exact(cap, 1)) < 1e-12


def test_moment_exact_examples():
    assert moment_exact(2, 2) == pytest.approx(7 / 12, abs=1e-12)
    assert moment_exact(123, 0) == 1.0
    expected_8 = second_moment_gcd_oracle(8)
    assert moment_exact(8, 2) == pytest.approx(expected_8, abs=1e-12)
    with pytest.raises(ValueError):
        moment_exact(4, 17)
    with pytest.raises(ValueError):
        moment_exact(4, -1)


def test_second_moment_vs_gcd_oracle():
    for cap in (1, 2, 5, 16, 64, 128, 256):
        assert abs(moment_exact(cap, 2) - second_moment_gcd_oracle(cap)) < 1e-10


def test_gcd_oracle_examples():
    assert second_moment_gcd_oracle(1) == pytest.approx(1 / 3, abs=1e-15)
    assert second_moment_gcd_oracle(2) == pytest.approx(7 / 12, abs=1e-15)
    # approach to the infinite-series limit 5 pi^2 / 36
    assert G_SECOND_MOMENT_LIMIT == pytest.approx(1.3707783890, abs=1e-9)
    assert abs(second_moment_gcd_oracle(256) - G_SECOND_MOMENT_LIMIT) < 0.04
    assert abs(second_moment_gcd_oracle(256) - G_SECOND_MOMENT_LIMIT) < abs(
        second_moment_gcd_oracle(16) - G_SECOND_MOMENT_LIMIT
    )


def test_odd_moments_vanish():
    for cap in (2, 16, 64, 256):
        for k in (1, 3, 5, 7):
            assert abs(moment_exact(cap, k)) < 1e-10


def test_moments_match_quasi_monte_carlo():
    n = 1_000_000
    for cap in (4, 64):
        samples = g_trunc_many(kronecker_sequence(n), cap)
        for k in (2, 4, 6):
            mc = float(np.mean(samples**k))
            se = float(np.std(samples**k)) / math.sqrt(n)
            exact = moment_exact(cap, k)
            assert abs(exact - mc) <= 3.0 * se + 1e-12


def test_mu_integral_examples():
    est = mu_integral(lambda x: np.ones_like(x), cap=16, n=1000)
    assert est.value == 1.0
    assert est.cap == 16
    ident = mu_integral(lambda x: x, cap=16, n=200_000)
    assert abs(ident.value) <= 3.0 / math.sqrt(ident.n) + 0.01
    sq = mu_integral(lambda x: x**2, cap=2, n=500_000)
    assert sq.value == pytest.approx(7 / 12, abs=5e-3)


def test_kronecker_sequence_avoids_small_denominators():
    xs = kronecker_sequence(10_000)
    assert np.all((xs > 0) & (xs < 1))
    # badly-approximable rotation: distance to rationals k/l scales like
    # 1/(sqrt(5) n l^2), far above float resolution for any l <= 8
    n = xs.size
    for l in range(1, 9):
        frac = np.abs(xs * l - np.round(xs * l)) / l
        assert frac.min() > 0.1 / (math.sqrt(5.0) * n * l * l)
        assert frac.min() > 1e-9


def test_empirical_cdf_and_ks():
    e1 = EmpiricalCDF(np.array([0.0, 1.0]))
    e2 = EmpiricalCDF(np.array([0.0, 0.0, 1.0, 1.0]))
    assert ks_distance(e1, e2) == 0.0
    assert ks_distance(e1, e1) == 0.0
    lo = EmpiricalCDF(np.array([0.0, 0.1, 0.2]))
    hi = EmpiricalCDF(np.array([5.0, 6.0]))
    assert ks_distance(lo, hi) == 1.0
    assert e1(0.5) == 0.5
    assert e1(-1.0) == 0.0
    assert e1(2.0) == 1.0
    with pytest.raises(EmptySampleError):
        EmpiricalCDF(np.array([]))


def test_ks_matches_direct_definition():
    rng = np.random.default_rng(5)
    a = rng.normal(size=300)
    b = rng.normal(0.3, 1.1, size=200)
    e1, e2 = EmpiricalCDF(a), EmpiricalCDF(b)
    pts = np.concatenate([a, b])
    direct = max(
        abs(np.count_nonzero(a <= p) / a.size - np.count_nonzero(b <= p) / b.size)
        for p in pts
    )
    assert ks_distance(e1, e2) == pytest.approx(direct, abs=1e-15)
