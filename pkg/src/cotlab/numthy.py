"""Integer and modular arithmetic primitives.

Everything here is exact integer arithmetic: extended gcd, canonical
modular inverses, deterministic 64-bit primality, residue/prime windows,
and the inverse-of-q residues that drive the equidistribution experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyWindowError, NotCoprimeError

# Witness set proving primality for every n < 2^64 (Sinclair's 7-witness list).
_MR_WITNESSES = (2, 325, 9375, 28178, 450775, 9780504, 1795265022)

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for all 64-bit inputs."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        if a % n == 0:
            continue
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) >= 0 and a*x + b*y = g."""
    if a == 0 and b == 0:
        raise ValueError("ext_gcd(0, 0) is undefined")
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r != 0:
        quot = old_r // r
        old_r, r = r, old_r - quot * r
        old_x, x = x, old_x - quot * x
        old_y, y = y, old_y - quot * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def mod_inverse(a: int, m: int) -> int:
    """Inverse of a mod m, canonical representative in [1, m-1]."""
    if m < 2:
        raise ValueError(f"modulus must be >= 2, got {m}")
    g, x, _ = ext_gcd(a, m)
    if g != 1:
        raise NotCoprimeError(f"gcd({a}, {m}) = {g} != 1")
    return x % m


def signed_residue(x: int, m: int) -> int:
    """Representative of x mod m in the half-open symmetric range (-m/2, m/2]."""
    r = x % m
    return r - m if 2 * r > m else r


@dataclass(frozen=True)
class PrimeModulus:
    """A positive integer asserted prime at construction time."""

    q: int

    def __post_init__(self) -> None:
        if self.q < 2 or not is_prime(self.q):
            raise ValueError(f"{self.q} is not prime")

    def __int__(self) -> int:
        return self.q

    def __index__(self) -> int:
        return self.q


@dataclass(frozen=True)
class ShiftSet:
    """Strictly increasing non-negative shifts a_1 < ... < a_L."""

    shifts: tuple[int, ...]

    def __post_init__(self) -> None:
        shifts = tuple(int(a) for a in self.shifts)
        object.__setattr__(self, "shifts", shifts)
        if not shifts:
            raise ValueError("at least one shift required")
        if any(a < 0 for a in shifts):
            raise ValueError("shifts must be non-negative")
        if any(b <= a for a, b in zip(shifts, shifts[1:])):
            raise ValueError("shifts must be strictly increasing")

    def __len__(self) -> int:
        return len(self.shifts)

    def __iter__(self):
        return iter(self.shifts)


@dataclass(frozen=True)
class Window:
    """Numerator window [a0*q, a1*q].

    The default constructor enforces 1/2 < a0 < a1 < 1; `Window.relaxed`
    admits the wider range 0 < a0 < a1 <= 1.
    """

    a0: float
    a1: float
    relaxed: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        if not (0.0 < self.a0 < self.a1 <= 1.0):
            raise ValueError(f"need 0 < a0 < a1 <= 1, got ({self.a0}, {self.a1})")
        if not self.relaxed and not (0.5 < self.a0 and self.a1 < 1.0):
            raise ValueError(
                f"default window requires 1/2 < a0 < a1 < 1, got ({self.a0}, {self.a1}); "
                "use Window.relaxed for the extended range"
            )

    @classmethod
    def relaxed_range(cls, a0: float, a1: float) -> "Window":
        return cls(a0, a1, relaxed=True)

    def bounds(self, q: int) -> tuple[int, int]:
        """Smallest and largest integers r with a0*q <= r <= a1*q."""
        lo = math.ceil(self.a0 * q)
        hi = math.floor(self.a1 * q)
        return lo, hi

    @property
    def width(self) -> float:
        return self.a1 - self.a0


def q_star(q: int, r: int, a: int = 0) -> int:
    """Inverse of q modulo r + a, canonical in [1, r+a-1].

    This is the residue whose ratio to r equidistributes as r sweeps a
    window below q.
    """
    q = int(q)
    modulus = r + a
    if modulus < 2:
        raise ValueError(f"r + a must be >= 2, got {modulus}")
    if q % modulus == 0:
        raise NotCoprimeError(f"{modulus} divides q = {q}")
    return mod_inverse(q % modulus, modulus)


def primes_in_range(lo: int, hi: int) -> np.ndarray:
    """All primes p with lo <= p <= hi (segmented sieve, ascending)."""
    lo = max(lo, 2)
    if hi < lo:
        return np.empty(0, dtype=np.int64)
    seg = np.ones(hi - lo + 1, dtype=bool)
    for p in range(2, math.isqrt(hi) + 1):
        if not is_prime(p):
            continue
        start = max(p * p, ((lo + p - 1) // p) * p)
        seg[start - lo :: p] = False
    return (np.nonzero(seg)[0] + lo).astype(np.int64)


def residues_in_window(q: int, w: Window, primes_only: bool = False) -> np.ndarray:
    """Ascending integers r with w.a0*q <= r <= w.a1*q, optionally primes only."""
    q = int(q)
    lo, hi = w.bounds(q)
    if hi < lo:
        raise EmptyWindowError(f"no integer in [{w.a0}*{q}, {w.a1}*{q}]")
    if primes_only:
        out = primes_in_range(lo, hi)
        if out.size == 0:
            raise EmptyWindowError(f"no prime in [{lo}, {hi}]")
        return out
    return np.arange(lo, hi + 1, dtype=np.int64)


def batch_mod_inverse(values, q: int) -> list[int]:
    """Inverses mod q of a batch of residues with a single modular inversion.

    Prefix products turn n inversions into one pow() plus 3n multiplications,
    the dominant saving in exponential-sum sweeps over full residue systems.
    """
    q = int(q)
    vals = [int(v) % q for v in values]
    if not vals:
        return []
    prefix = [0] * len(vals)
    acc = 1
    for i, v in enumerate(vals):
        if v == 0:
            raise NotCoprimeError(f"value at index {i} is divisible by {q}")
        acc = acc * v % q
        prefix[i] = acc
    inv = pow(acc, -1, q)
    out = [0] * len(vals)
    for i in range(len(vals) - 1, 0, -1):
        out[i] = inv * prefix[i - 1] % q
        inv = inv * vals[i] % q
    out[0] = inv
    return out


def inverse_table(q: int) -> np.ndarray:
    """inv[r] = r^{-1} mod q for r = 1..q-1 (inv[0] unused, set to 0)."""
    q = int(q)
    inv = batch_mod_inverse(range(1, q), q)
    table = np.zeros(q, dtype=np.int64)
    table[1:] = inv
    return table
