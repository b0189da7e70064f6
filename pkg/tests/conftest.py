"""Shared brute-force oracles, kept deliberately independent of the library:
plain math/cmath term-by-term evaluation, no shared tables or index tricks."""

from __future__ import annotations

import cmath
import math

import pytest


def brute_c0(r: int, b: int) -> float:
    if b == 1:
        return 0.0
    return -math.fsum(
        (m / b) / math.tan(math.pi * ((m * r) % b) / b) for m in range(1, b)
    )


def brute_vasyunin(r: int, b: int) -> float:
    if b == 1:
        return 0.0
    return math.fsum(
        (((m * r) % b) / b) / math.tan(math.pi * m / b) for m in range(1, b)
    )


def brute_q_sum(r: int, q: int) -> float:
    return math.fsum(
        ((m * r) // q) / math.tan(math.pi * ((m * r) % q) / q) for m in range(1, q)
    )


def brute_decompose(r_eff: int, q: int):
    """Rows (s_j, d_j, t_j) by scanning every multiple r_eff*m, 1 <= m < q."""
    firsts = {}
    lasts = {}
    counts = {}
    for m in range(1, q):
        val = r_eff * m
        j = val // q
        if j not in firsts:
            firsts[j] = val
        lasts[j] = val
        counts[j] = counts.get(j, 0) + 1
    rows = []
    for j in range(r_eff):
        s = firsts[j] - q * j
        d = counts[j] - 1
        t = q * (j + 1) - lasts[j]
        rows.append((s, d, t))
    return rows


def brute_mixed_exp_sum(q: int, n: int, terms) -> complex:
    total = 0j
    for r in range(1, q):
        if any((r + a) % q == 0 for _, a in terms):
            continue
        phase = n * r
        for m, a in terms:
            phase += m * pow(r + a, -1, q)
        total += cmath.exp(2j * math.pi * (phase % q) / q)
    return total


def brute_g_trunc(alpha: float, cap: int) -> float:
    return math.fsum((1.0 - 2.0 * ((s * alpha) % 1.0)) / s for s in range(1, cap + 1))


def rel_gap(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(a), abs(b))


@pytest.fixture(scope="session")
def small_primes():
    sieve = [True] * 2001
    sieve[0] = sieve[1] = False
    for i in range(2, 45):
        if sieve[i]:
            for j in range(i * i, 2001, i):
                sieve[j] = False
    return [n for n in range(2, 2001) if sieve[n]]
