import math

import numpy as np
import pytest

from conftest import (
    brute_c0,
    brute_decompose,
    brute_q_sum,
    brute_vasyunin,
    rel_gap,
)
from cotlab.cotangent import (
    FareyFraction,
    c0,
    c0_q_sum_at,
    c0_q_sum_range,
    c0_vasyunin_over_units,
    cot_pi_frac,
    cot_table,
    decompose,
    block_sums,
    q_approx,
    q_split,
    q_sum,
    selection_mask,
    units_mod,
    vasyunin,
)
from cotlab.errors import NotCoprimeError, ThresholdTooLargeError
from cotlab.gfunction import g_trunc
from cotlab.numthy import mod_inverse


def test_farey_fraction_validation():
    FareyFraction(1, 1)  # identity edge case
    FareyFraction(3, 7)
    with pytest.raises(NotCoprimeError):
        FareyFraction(4, 6)
    with pytest.raises(ValueError):
        FareyFraction(5, 3)
    with pytest.raises(ValueError):
        FareyFraction(0, 3)


def test_cot_table_folding():
    ct = cot_table(8)
    assert ct[4] == 0.0  # exact zero at the half-period
    assert ct[1] == pytest.approx(1.0 / math.tan(math.pi / 8), rel=1e-15)
    assert ct[7] == -ct[1]
    assert cot_pi_frac(3, 8) == ct[3]
    assert cot_pi_frac(11, 8) == ct[3]  # period-1 reduction


def test_c0_examples():
    assert c0(FareyFraction(1, 2)) == 0.0
    assert c0(FareyFraction(1, 3)) == pytest.approx(math.sqrt(3) / 9, abs=1e-15)
    assert c0(FareyFraction(2, 3)) == pytest.approx(-math.sqrt(3) / 9, abs=1e-15)
    assert c0(FareyFraction(1, 1)) == 0.0  # empty sum


def test_c0_matches_bruteforce():
    for r, b in ((1, 5), (3, 10), (7, 97), (12, 37), (101, 360)):
        assert c0(FareyFraction(r, b)) == pytest.approx(brute_c0(r, b), abs=1e-10)


def test_vasyunin_examples():
    assert vasyunin(FareyFraction(1, 2)) == 0.0
    assert vasyunin(FareyFraction(1, 3)) == pytest.approx(-1 / (3 * math.sqrt(3)), abs=1e-15)
    # relation to the cotangent sum at the inverse numerator: 2*3 = 1 mod 5
    assert vasyunin(FareyFraction(2, 5)) == pytest.approx(-c0(FareyFraction(3, 5)), abs=1e-12)
    assert vasyunin(FareyFraction(1, 1)) == 0.0


def test_vasyunin_matches_bruteforce():
    for r, b in ((2, 5), (3, 10), (9, 97), (12, 37)):
        assert vasyunin(FareyFraction(r, b)) == pytest.approx(brute_vasyunin(r, b), abs=1e-10)


def test_vasyunin_relation_sampled():
    for b in (7, 64, 211, 1000):
        for r in units_mod(b)[:20].tolist():
            lhs = vasyunin(FareyFraction(r, b))
            rhs = -c0(FareyFraction(mod_inverse(r, b), b))
            assert rel_gap(lhs, rhs) < 1e-9


def test_antisymmetry_sampled():
    for b in (5, 12, 97, 500):
        for r in units_mod(b)[:15].tolist():
            assert rel_gap(c0(FareyFraction(b - r, b)), -c0(FareyFraction(r, b))) < 1e-9


def test_q_sum_examples():
    assert q_sum(1, 11) == 0.0
    expected = 1.0 / math.tan(6 * math.pi / 5) + 1.0 / math.tan(8 * math.pi / 5)
    assert q_sum(2, 5) == pytest.approx(expected, rel=1e-12)
    assert q_sum(2, 5) == pytest.approx(1.0514622242, abs=1e-9)
    with pytest.raises(NotCoprimeError):
        q_sum(5, 25)
    with pytest.raises(ValueError):
        q_sum(7, 5)


def test_q_sum_matches_bruteforce():
    for r, q in ((2, 5), (3, 7), (10, 101), (57, 211)):
        assert q_sum(r, q) == pytest.approx(brute_q_sum(r, q), abs=1e-9)


def test_reflection_formula_sampled(small_primes):
    # c0(r/q) = (c0(1/q) - q_sum(r, q)) / r
    for q in (7, 101, 499, 997):
        base = c0(FareyFraction(1, q))
        for r in (2, 3, q // 2, q - 1):
            lhs = c0(FareyFraction(r, q))
            rhs = (base - q_sum(r, q)) / r
            assert rel_gap(lhs, rhs) < 1e-9


def test_decompose_examples():
    dec = decompose(2, 5)
    assert dec.rows() == [(2, 1, 1), (1, 1, 2)]
    assert int(np.sum(dec.d + 1)) == 4
    with pytest.raises(NotCoprimeError):
        decompose(3, 9)
    with pytest.raises(ValueError):
        decompose(1, 5)


@pytest.mark.parametrize("q", [5, 7, 11, 101, 199])
def test_decompose_matches_bruteforce(q):
    for r_eff in range(2, q):
        dec = decompose(r_eff, q)
        assert dec.rows() == brute_decompose(r_eff, q)


def test_decompose_invariants():
    for q, r_eff in ((101, 37), (499, 498), (997, 500)):
        dec = decompose(r_eff, q)
        j = np.arange(r_eff)
        # closing relation
        assert np.all(q * j + dec.s + dec.d * r_eff + dec.t == q * (j + 1))
        # congruences
        assert np.all(dec.s % r_eff == (-q * j) % r_eff)
        assert np.all(dec.t % r_eff == (q * (j + 1)) % r_eff)
        # ranges (row 0 carries the boundary representative r_eff)
        assert dec.s[0] == r_eff
        assert np.all((dec.s[1:] >= 0) & (dec.s[1:] < r_eff))
        assert np.all((dec.t > 0) & (dec.t <= r_eff))
        # the blocks partition the multiples with 1 <= m <= q-1
        covered = sorted(
            q * jj + dec.s[jj] + h * r_eff
            for jj in range(r_eff)
            for h in range(dec.d[jj] + 1)
        )
        assert covered == [r_eff * m for m in range(1, q)]


def test_q_split_partition_bookkeeping():
    for q, r_eff, m1 in ((101, 37, 3), (499, 321, 5), (997, 996, 4)):
        sp = q_split(r_eff, q, m1)
        dec, blocks = block_sums(r_eff, q)
        mask = selection_mask(dec, m1)
        assert sp.selected_j.tolist() == np.nonzero(mask)[0].tolist()
        # exact same-term bookkeeping: the union of the two index sets
        # reproduces the q_sum terms as floating-point multisets
        ct = cot_table(q)
        m = np.arange(1, q, dtype=np.int64)
        prods = m * r_eff
        full_terms = np.sort(ct[prods % q] * (prods // q))
        split_terms = []
        for jj in range(r_eff):
            base = dec.s[jj] + r_eff * np.arange(dec.d[jj] + 1)
            split_terms.append(float(jj) * ct[base])
        split_terms = np.sort(np.concatenate(split_terms))
        assert np.array_equal(full_terms, split_terms)
        assert rel_gap(sp.q0 + sp.q1, q_sum(r_eff, q)) < 1e-9


def test_q_split_full_selection_raw_mode():
    # raw threshold >= r_eff admits every block: remainder is an empty sum
    sp = q_split(7, 1009, 3, mode="raw")
    assert sp.q1 == 0.0
    assert sp.q0 == pytest.approx(q_sum(7, 1009), rel=1e-12)
    assert sp.selected_j.size == 7


def test_q_split_threshold_guard():
    with pytest.raises(ThresholdTooLargeError):
        q_split(3, 7, 3)
    with pytest.raises(ValueError):
        q_split(3, 7, 0)


def test_q_approx_examples():
    # alpha = inverse of 7 mod 3 over 3 = 1/3, cap = 4
    expected = (3 * 7 / math.pi) * g_trunc(1 / 3, 4)
    assert q_approx(3, 7, 2, 0) == pytest.approx(expected, rel=1e-14)
    assert q_approx(1, 7, 2, 0) == 0.0  # degenerate modulus r + a = 1
    with pytest.raises(ValueError):
        q_approx(5, 7, 2, 3)


def test_range_sweep_matches_scalar():
    q = 101
    c0_vals, qs_vals = c0_q_sum_range(q, 1, q - 1, want_q_sum=True)
    for r in (1, 2, 50, 99, 100):
        assert c0_vals[r - 1] == pytest.approx(c0(FareyFraction(r, q)), abs=1e-11)
        assert qs_vals[r - 1] == pytest.approx(q_sum(r, q), abs=1e-9)


def test_range_sweep_threads_identical():
    q = 997
    seq = c0_q_sum_range(q, 10, 900, want_q_sum=True)
    par = c0_q_sum_range(q, 10, 900, want_q_sum=True, threads=2)
    assert np.array_equal(seq[0], par[0])
    assert np.array_equal(seq[1], par[1])


def test_point_sweep_matches_range():
    q = 211
    ns = np.array([3, 17, 100, 210])
    c0_vals, qs_vals = c0_q_sum_at(q, ns, want_q_sum=True)
    full_c0, full_qs = c0_q_sum_range(q, 1, q - 1, want_q_sum=True)
    assert np.allclose(c0_vals, full_c0[ns - 1], rtol=0, atol=1e-11)
    assert np.allclose(qs_vals, full_qs[ns - 1], rtol=0, atol=1e-9)


def test_units_sweep_matches_scalar():
    for b in (15, 97, 360):
        units, c0_vals, v_vals = c0_vasyunin_over_units(b)
        for i in (0, 1, units.size // 2, units.size - 1):
            r = int(units[i])
            assert c0_vals[i] == pytest.approx(c0(FareyFraction(r, b)), abs=1e-11)
            assert v_vals[i] == pytest.approx(vasyunin(FareyFraction(r, b)), abs=1e-11)
