"""Complete and prime-restricted exponential sums with shifted-inverse poles.

The mixed sum over a full residue system,

    E(n, m_1..m_L; q) = sum_{r=1..q-1} e((n r + m_1 (r+a_1)* + ... ) / q),

exhibits square-root cancellation for any nonzero coefficient vector; the
classical Kloosterman sum is the L = 1, a_1 = 0 special case with the
sharp Weil bound 2*sqrt(q).  Sums over prime arguments obey the
Fouvry-Michel exponent pair (3/16, 25/32).  Sweeps here report empirical
|sum|/bound ratios; inverses are produced in batch (prefix-product trick,
one modular inversion per table) since inversion dominates at large q.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import CostGuardError
from .numthy import inverse_table, primes_in_range

_ROOTS_TABLE_MAX = 1 << 20
_PRIME_SIEVE_MAX = 10**8

FOUVRY_MICHEL_Q_EXP = 3.0 / 16.0 + 0.01
FOUVRY_MICHEL_X_EXP = 25.0 / 32.0


@dataclass(frozen=True)
class RationalExponentArg:
    """Exponent argument n*x + sum_l m_l / (x + a_l) with distinct shifts."""

    n: int
    terms: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        terms = tuple((int(m), int(a)) for m, a in self.terms)
        object.__setattr__(self, "terms", terms)
        shifts = [a for _, a in terms]
        if len(set(shifts)) != len(shifts):
            raise ValueError("pole shifts must be pairwise distinct")
        if any(a < 0 for a in shifts):
            raise ValueError("pole shifts must be non-negative")

    def coefficients(self) -> tuple[int, ...]:
        return (self.n,) + tuple(m for m, _ in self.terms)

    def is_zero_mod(self, q: int) -> bool:
        return all(c % q == 0 for c in self.coefficients())


@functools.lru_cache(maxsize=4)
def _roots_table(q: int) -> np.ndarray:
    table = np.exp((2j * math.pi / q) * np.arange(q))
    table.setflags(write=False)
    return table


@functools.lru_cache(maxsize=4)
def _inverse_table_cached(q: int) -> np.ndarray:
    table = inverse_table(q)
    table.setflags(write=False)
    return table


def _phase_to_unit(phase: np.ndarray, q: int) -> np.ndarray:
    if q <= _ROOTS_TABLE_MAX:
        return _roots_table(q)[phase]
    return np.exp((2j * math.pi / q) * phase)


def mixed_exp_sum(q: int, arg: RationalExponentArg) -> complex:
    """Exact complete sum over r = 1..q-1, skipping poles r + a_l = 0 mod q."""
    q = int(q)
    if q > 1 << 31:
        raise CostGuardError(f"complete sums limited to q <= 2^31, got {q}")
    r = np.arange(1, q, dtype=np.int64)
    inv = _inverse_table_cached(q)
    phase = ((arg.n % q) * r) % q
    keep = np.ones(q - 1, dtype=bool)
    for m, a in arg.terms:
        shifted = (r + a) % q
        keep &= shifted != 0
        phase = (phase + (m % q) * inv[shifted]) % q
    return complex(np.sum(_phase_to_unit(phase[keep], q)))


def kloosterman(m: int, n: int, q: int) -> complex:
    """K(m, n; q) = sum_r e((m r + n r^{-1})/q)."""
    return mixed_exp_sum(q, RationalExponentArg(n=m, terms=((n, 0),)))


@dataclass(frozen=True)
class RatioRow:
    q: int
    max_ratio: float
    mean_ratio: float
    p95_ratio: float
    trials: int


@dataclass(frozen=True)
class RatioSweepReport:
    kind: str
    L: int
    seed: int
    rows: tuple[RatioRow, ...]

    @property
    def max_ratio(self) -> float:
        return max(row.max_ratio for row in self.rows)


def bound_ratio_sweep(
    q_list, L: int, trials: int, seed: int = 0
) -> RatioSweepReport:
    """Sample random nonzero coefficient vectors and report |E|/sqrt(q).

    Shifts are fixed to 0..L-1; coefficients are drawn uniformly from the
    residue classes mod q with the all-zero vector rejected.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if L < 1:
        raise ValueError("L must be >= 1")
    rng = np.random.default_rng(seed)
    shifts = tuple(range(L))
    rows = []
    for q in q_list:
        q = int(q)
        ratios = np.empty(trials)
        root_q = math.sqrt(q)
        for i in range(trials):
            while True:
                coeffs = rng.integers(0, q, size=L + 1)
                if np.any(coeffs % q != 0):
                    break
            arg = RationalExponentArg(
                n=int(coeffs[0]),
                terms=tuple((int(c), a) for c, a in zip(coeffs[1:], shifts)),
            )
            ratios[i] = abs(mixed_exp_sum(q, arg)) / root_q
        rows.append(
            RatioRow(
                q=q,
                max_ratio=float(np.max(ratios)),
                mean_ratio=float(np.mean(ratios)),
                p95_ratio=float(np.quantile(ratios, 0.95)),
                trials=trials,
            )
        )
    return RatioSweepReport(kind="mixed", L=L, seed=seed, rows=tuple(rows))


@functools.lru_cache(maxsize=2)
def _primes_upto(x: int) -> np.ndarray:
    table = primes_in_range(2, x)
    table.setflags(write=False)
    return table


def prime_exp_sum(q: int, arg: RationalExponentArg, x: int) -> complex:
    """sum over primes p <= x of e(R(p mod q)/q), poles skipped."""
    q = int(q)
    if x > _PRIME_SIEVE_MAX:
        raise CostGuardError(f"sieve bound {x} exceeds {_PRIME_SIEVE_MAX}")
    if x < 2:
        return 0j
    p = _primes_upto(int(x)) % q
    inv = _inverse_table_cached(q)
    phase = ((arg.n % q) * p) % q
    keep = np.ones(p.size, dtype=bool)
    for m, a in arg.terms:
        shifted = (p + a) % q
        keep &= shifted != 0
        phase = (phase + (m % q) * inv[shifted]) % q
    return complex(np.sum(_phase_to_unit(phase[keep], q)))


def fouvry_michel_bound(q: int, x: int) -> float:
    """Reference envelope q^(3/16+0.01) * x^(25/32) for prime-argument sums."""
    return float(q) ** FOUVRY_MICHEL_Q_EXP * float(x) ** FOUVRY_MICHEL_X_EXP


def prime_ratio_sweep(
    q_list, x: int, trials: int, seed: int = 0, L: int = 1
) -> RatioSweepReport:
    """|S|/envelope ratios for random coefficient vectors over primes <= x."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    shifts = tuple(range(L))
    rows = []
    for q in q_list:
        q = int(q)
        bound = fouvry_michel_bound(q, x)
        ratios = np.empty(trials)
        for i in range(trials):
            while True:
                coeffs = rng.integers(0, q, size=L + 1)
                if np.any(coeffs % q != 0):
                    break
            arg = RationalExponentArg(
                n=int(coeffs[0]),
                terms=tuple((int(c), a) for c, a in zip(coeffs[1:], shifts)),
            )
            ratios[i] = abs(prime_exp_sum(q, arg, x)) / bound
        rows.append(
            RatioRow(
                q=q,
                max_ratio=float(np.max(ratios)),
                mean_ratio=float(np.mean(ratios)),
                p95_ratio=float(np.quantile(ratios, 0.95)),
                trials=trials,
            )
        )
    return RatioSweepReport(kind="prime", L=L, seed=seed, rows=tuple(rows))
