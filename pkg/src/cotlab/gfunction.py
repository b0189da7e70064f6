"""Truncated sawtooth series g(alpha; cap) = sum_{s<=cap} (1 - 2{s*alpha})/s.

The truncated series is piecewise linear with constant slope -2*cap,
breakpoints at every reduced fraction k/l with l <= cap, and an upward
jump of 2/l * H(cap//l) at each such breakpoint (H = harmonic number).
``build_piecewise`` materialises that representation exactly: breakpoints
are kept as integer pairs, and all accumulated values are carried in
hi/lo double-double form through error-free transforms, so segment values
are correct to about one ulp even with millions of breakpoints.  Exact
moments, quasi-Monte-Carlo integrals against the value distribution, and
empirical-CDF utilities live here too.

The untruncated series converges only almost everywhere and diverges at
rationals, so it is never evaluated directly; every distribution-level
quantity is reported at an explicit cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple

import numpy as np

from .errors import CapTooLargeError, EmptySampleError

MAX_CAP = 1 << 12

# cap -> infinity limit of the second moment: zeta(2)^3 / (3 zeta(4)).
G_SECOND_MOMENT_LIMIT = 5.0 * math.pi**2 / 36.0

_GOLDEN_STEP = (math.sqrt(5.0) - 1.0) / 2.0
_KRONECKER_OFFSET = 0.5


# ---------------------------------------------------------------------------
# error-free float transforms (scalar and elementwise-numpy alike)
# ---------------------------------------------------------------------------


def _two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def _fast_two_sum(a, b):
    # requires |a| >= |b|
    s = a + b
    return s, b - (s - a)


def _dd_add(hi, lo, xhi, xlo):
    s, e = _two_sum(hi, xhi)
    return _fast_two_sum(s, e + (lo + xlo))


def _split(a):
    # Veltkamp split into 26/27-bit halves (exact products with 12-bit ints).
    c = 134217729.0 * a
    hi = c - (c - a)
    return hi, a - hi


def _dd_div_int(num, den):
    """num/den as a hi/lo pair, for exactly representable num and small int den."""
    q = num / den
    qh, ql = _split(q)
    rem = (num - qh * den) - ql * den
    return q, rem / den


def _recip_dd(s: int) -> tuple[float, float]:
    hi = 1.0 / s
    return hi, float(Fraction(1, s) - Fraction(hi))


def _half_jump_table(cap: int) -> tuple[np.ndarray, np.ndarray]:
    """hj[l] = sum_{t <= cap//l} 1/(t*l) as hi/lo pairs; hj[1] = H(cap)."""
    rh = np.empty(cap + 1)
    rl = np.empty(cap + 1)
    rh[0] = rl[0] = 0.0
    for s in range(1, cap + 1):
        rh[s], rl[s] = _recip_dd(s)
    hj_hi = np.zeros(cap + 1)
    hj_lo = np.zeros(cap + 1)
    for l in range(1, cap + 1):
        hi = lo = 0.0
        for s in range(l, cap + 1, l):
            hi, lo = _dd_add(hi, lo, rh[s], rl[s])
        hj_hi[l] = hi
        hj_lo[l] = lo
    return hj_hi, hj_lo


def _farey_breakpoints(cap: int) -> tuple[np.ndarray, np.ndarray]:
    """All reduced k/l in [0, 1] with l <= cap, sorted ascending, as (k, l)."""
    ks = [np.array([0, 1], dtype=np.int64)]
    ls = [np.array([1, 1], dtype=np.int64)]
    for l in range(2, cap + 1):
        k = np.arange(1, l, dtype=np.int64)
        k = k[np.gcd(k, l) == 1]
        ks.append(k)
        ls.append(np.full(k.size, l, dtype=np.int64))
    num = np.concatenate(ks)
    den = np.concatenate(ls)
    order = np.argsort(num / den, kind="stable")
    return num[order], den[order]


@dataclass(frozen=True)
class TruncatedG:
    """Exact piecewise-linear form of g(.; cap) on [0, 1].

    Segment i covers [x[i], x[i+1]] with value v[i] - 2*cap*(alpha - x[i]);
    v[i] and the right-end value u[i] are stored prefolded from hi/lo
    arithmetic.  Breakpoints are the integer pairs (num[i], den[i]).
    """

    cap: int
    num: np.ndarray
    den: np.ndarray
    x: np.ndarray
    v: np.ndarray
    u: np.ndarray

    @property
    def slope(self) -> float:
        return -2.0 * self.cap

    @property
    def segment_count(self) -> int:
        return self.x.size - 1

    def breakpoints(self) -> list[tuple[int, int]]:
        return list(zip(self.num.tolist(), self.den.tolist()))

    def intercepts(self) -> np.ndarray:
        """Per-segment intercept c_i of the global form c_i - 2*cap*alpha."""
        return self.v + 2.0 * self.cap * self.x[:-1]

    def __call__(self, alpha):
        arr = np.asarray(alpha, dtype=np.float64)
        if np.any((arr <= 0.0) | (arr >= 1.0)):
            raise ValueError("alpha must lie in (0, 1)")
        i = np.searchsorted(self.x, arr, side="right") - 1
        i = np.clip(i, 0, self.segment_count - 1)
        out = self.v[i] - 2.0 * self.cap * (arr - self.x[i])
        return float(out) if np.isscalar(alpha) else out


def _check_cap(cap: int) -> int:
    cap = int(cap)
    if cap < 1:
        raise ValueError(f"cap must be >= 1, got {cap}")
    if cap > MAX_CAP:
        raise CapTooLargeError(f"cap {cap} exceeds limit {MAX_CAP}")
    return cap


_piecewise_cache: dict[int, TruncatedG] = {}


def build_piecewise(cap: int) -> TruncatedG:
    """Construct the exact piecewise-linear representation of g(.; cap)."""
    cap = _check_cap(cap)
    cached = _piecewise_cache.get(cap)
    if cached is not None:
        return cached

    hj_hi, hj_lo = _half_jump_table(cap)
    num, den = _farey_breakpoints(cap)
    x = num / den

    jh = hj_hi[den]
    jl = hj_lo[den]
    jh[0] = jl[0] = 0.0  # the 0/1 endpoint carries no jump

    # Exact prefix sums of the jumps: plain accumulate for the hi stream,
    # then the per-step rounding errors (recovered exactly by TwoSum) are
    # accumulated as the lo stream.
    c = np.add.accumulate(jh)
    prev = np.empty_like(c)
    prev[0] = 0.0
    prev[1:] = c[:-1]
    bb = c - prev
    step_err = (prev - (c - bb)) + (jh - bb)
    e = np.add.accumulate(step_err + jl)

    h_hi, h_lo = hj_hi[1], hj_lo[1]  # H(cap)
    ph, pl = _dd_div_int((2 * cap * num).astype(np.float64), den.astype(np.float64))

    def fold(t_hi, t_lo, d_hi, d_lo):
        # H(cap) + 2*T - P, combined in hi/lo arithmetic and folded once
        vh, vl = _dd_add(2.0 * t_hi, 2.0 * t_lo, -d_hi, -d_lo)
        vh, vl = _dd_add(vh, vl, h_hi, h_lo)
        return vh + vl

    v = fold(c[:-1], e[:-1], ph[:-1], pl[:-1])
    u = fold(c[:-1], e[:-1], ph[1:], pl[1:])

    for arr in (num, den, x, v, u):
        arr.setflags(write=False)
    rep = TruncatedG(cap=cap, num=num, den=den, x=x, v=v, u=u)
    if len(_piecewise_cache) >= 2:
        _piecewise_cache.pop(next(iter(_piecewise_cache)))
    _piecewise_cache[cap] = rep
    return rep


def g_trunc(alpha: float, cap: int) -> float:
    """Direct summation of the truncated series at a single point."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    cap = int(cap)
    if cap < 1:
        raise ValueError("cap must be >= 1")
    s = np.arange(1, cap + 1, dtype=np.float64)
    terms = (1.0 - 2.0 * np.mod(s * alpha, 1.0)) / s
    return math.fsum(terms.tolist())


def g_trunc_many(alphas: np.ndarray, cap: int, chunk: int = 1 << 22) -> np.ndarray:
    """Vectorised truncated series over many sample points."""
    cap = int(cap)
    s = np.arange(1, cap + 1, dtype=np.float64)
    recip = 1.0 / s
    alphas = np.asarray(alphas, dtype=np.float64)
    out = np.empty(alphas.size, dtype=np.float64)
    rows = max(1, chunk // cap)
    for lo in range(0, alphas.size, rows):
        block = alphas[lo : lo + rows, None] * s[None, :]
        np.mod(block, 1.0, out=block)
        out[lo : lo + rows] = (1.0 - 2.0 * block) @ recip
    return out


def moment_exact(cap: int, k: int) -> float:
    """integral_0^1 g(alpha; cap)^k d(alpha), by segment-wise antiderivative.

    Per segment the antiderivative telescopes to
    dx * (v^k + v^{k-1} u + ... + u^k) / (k+1), which avoids both the
    cancellation of differencing large powers and any polynomial expansion
    in the slope.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if k > 16:
        raise ValueError("moment order limited to k <= 16")
    if k == 0:
        return 1.0
    rep = build_piecewise(cap)
    dx = np.diff(rep.x)
    v, u = rep.v, rep.u
    power_mean = np.ones_like(v)
    upow = np.ones_like(u)
    for _ in range(k):
        upow = upow * u
        power_mean = power_mean * v + upow
    return float(np.sum(dx * power_mean) / (k + 1))


def second_moment_gcd_oracle(cap: int) -> float:
    """Independent target for the second moment:
    sum_{l,m <= cap} gcd(l,m)^2 / (3 l^2 m^2), by direct double loop."""
    cap = int(cap)
    if cap < 1:
        raise ValueError("cap must be >= 1")
    n = np.arange(1, cap + 1, dtype=np.int64)
    g = np.gcd.outer(n, n).astype(np.float64)
    sq = (n * n).astype(np.float64)
    return float(np.sum((g * g) / (3.0 * np.outer(sq, sq))))


def kronecker_sequence(n: int, offset: float = _KRONECKER_OFFSET) -> np.ndarray:
    """Golden-ratio Kronecker points frac(offset + i*phi), i = 1..n.

    Low-discrepancy and provably bounded away from every small-denominator
    rational, so truncated-series evaluations never sit on a breakpoint.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    i = np.arange(1, n + 1, dtype=np.float64)
    return np.mod(offset + i * _GOLDEN_STEP, 1.0)


class MuEstimate(NamedTuple):
    value: float
    cap: int
    n: int


_g_sample_cache: dict[tuple[int, int], np.ndarray] = {}


def g_samples(cap: int, n: int) -> np.ndarray:
    """g(.; cap) evaluated on the standard Kronecker points (cached)."""
    key = (int(cap), int(n))
    hit = _g_sample_cache.get(key)
    if hit is None:
        hit = g_trunc_many(kronecker_sequence(n), cap)
        hit.setflags(write=False)
        if len(_g_sample_cache) >= 2:
            _g_sample_cache.pop(next(iter(_g_sample_cache)))
        _g_sample_cache[key] = hit
    return hit


def mu_integral(f: Callable[[np.ndarray], np.ndarray], cap: int, n: int) -> MuEstimate:
    """Quasi-Monte-Carlo integral of f against the value distribution of
    g(.; cap): mean of f(g(alpha_i; cap)) over the Kronecker sequence."""
    vals = np.asarray(f(g_samples(cap, n)), dtype=np.float64)
    return MuEstimate(value=float(np.mean(vals)), cap=int(cap), n=int(n))


@dataclass(frozen=True)
class EmpiricalCDF:
    """Right-continuous empirical distribution function of a sample."""

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.sort(np.asarray(self.values, dtype=np.float64))
        if arr.size == 0:
            raise EmptySampleError("empty sample")
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return int(self.values.size)

    def __call__(self, z) -> float | np.ndarray:
        pos = np.searchsorted(self.values, z, side="right")
        out = pos / self.values.size
        return float(out) if np.isscalar(z) else out


def ks_distance(e1: EmpiricalCDF, e2: EmpiricalCDF) -> float:
    """Sup-norm distance of two empirical CDFs, evaluated at every jump."""
    pts = np.concatenate([e1.values, e2.values])
    return float(np.max(np.abs(e1(pts) - e2(pts))))
