"""Cotangent sums and their block decomposition.

Central objects:

* ``c0(r/b)``       = -sum_{m<b} (m/b) cot(pi m r / b)
* ``vasyunin(r/b)`` = sum_{m<b} {m r / b} cot(pi m / b)
* ``q_sum(r/q)``    = sum_{m<q} cot(pi m r / q) floor(m r / q)

plus the decomposition of the multiples of r into blocks lying between
consecutive multiples of q, the pole-dominated/cancelling split of the
q-sum driven by that decomposition, and the sawtooth-series approximant
of the pole-dominated part.

Arguments of cot are always reduced with exact integer arithmetic
(``m*r mod b``) before any floating-point work; cot(pi k/b) itself is
evaluated on k <= b/2 and extended by antisymmetry so the poles at 0 and
1 are approached only from the well-conditioned side.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import NotCoprimeError, ThresholdTooLargeError
from .gfunction import g_trunc
from .numthy import q_star


@dataclass(frozen=True)
class FareyFraction:
    """Reduced fraction r/b with 1 <= r <= b (b = 1 only for the r = b = 1 edge case)."""

    r: int
    b: int

    def __post_init__(self) -> None:
        if self.b < 1 or not (1 <= self.r <= self.b):
            raise ValueError(f"need 1 <= r <= b, got {self.r}/{self.b}")
        if math.gcd(self.r, self.b) != 1:
            raise NotCoprimeError(f"{self.r}/{self.b} is not reduced")


def _neumaier(values) -> float:
    """Compensated (two-term) summation in the given order."""
    total = 0.0
    comp = 0.0
    for x in values:
        t = total + x
        if abs(total) >= abs(x):
            comp += (total - t) + x
        else:
            comp += (x - t) + total
        total = t
    return total + comp


@functools.lru_cache(maxsize=8)
def cot_table(b: int) -> np.ndarray:
    """ct[k] = cot(pi k / b) for k = 1..b-1; ct[0] is unused and set to 0.

    Folding k -> b-k keeps the tan argument in (0, pi/2], where the
    evaluation is well conditioned; k = b/2 is pinned to exactly 0.
    """
    k = np.arange(1, b, dtype=np.int64)
    kk = np.minimum(k, b - k)
    vals = 1.0 / np.tan(np.pi * (kk / b))
    vals[kk * 2 == b] = 0.0
    ct = np.empty(b, dtype=np.float64)
    ct[0] = 0.0
    ct[1:] = np.where(2 * k > b, -vals, vals)
    ct.setflags(write=False)
    return ct


def cot_pi_frac(k: int, b: int) -> float:
    """cot(pi k / b) for 0 < k < b, by the same folding as the table."""
    k %= b
    if k == 0:
        raise ZeroDivisionError("cot pole at integer argument")
    kk = min(k, b - k)
    if 2 * kk == b:
        return 0.0
    val = 1.0 / math.tan(math.pi * (kk / b))
    return -val if 2 * k > b else val


def c0(f: FareyFraction) -> float:
    """The cotangent sum c0(r/b); empty sum 0 for b = 1."""
    r, b = f.r, f.b
    if b == 1:
        return 0.0
    ct = cot_table(b)
    m = np.arange(1, b, dtype=np.int64)
    terms = m * ct[(m * r) % b]
    return -_neumaier(terms.tolist()) / b


def vasyunin(f: FareyFraction) -> float:
    """The Vasyunin sum V(r/b) = sum_{m<b} {m r / b} cot(pi m / b).

    Satisfies V(r/b) = -c0(rbar/b) with r*rbar = 1 mod b.
    """
    r, b = f.r, f.b
    if b == 1:
        return 0.0
    ct = cot_table(b)
    m = np.arange(1, b, dtype=np.int64)
    terms = ((m * r) % b) * ct[1:]
    return _neumaier(terms.tolist()) / b


def q_sum(r: int, q: int) -> float:
    """sum_{m=1}^{q-1} cot(pi m r / q) * floor(m r / q) for gcd(r, q) = 1."""
    q = int(q)
    if not (1 <= r < q):
        raise ValueError(f"need 1 <= r < q, got r={r}, q={q}")
    if math.gcd(r, q) != 1:
        raise NotCoprimeError(f"gcd({r}, {q}) != 1")
    if r == 1:
        return 0.0
    ct = cot_table(q)
    m = np.arange(1, q, dtype=np.int64)
    prods = m * r
    terms = ct[prods % q] * (prods // q)
    return _neumaier(terms.tolist())


@dataclass(frozen=True)
class SubintervalDecomposition:
    """Blocks of multiples of r_eff between consecutive multiples of q.

    Row j (0 <= j < r_eff) describes the multiples r_eff*m, 1 <= m <= q-1,
    lying in [q*j, q*(j+1)): the first is q*j + s[j], there are d[j] + 1
    of them spaced r_eff apart, and t[j] is the gap from the last to
    q*(j+1).  Row 0 takes the representative s[0] = r_eff (not 0) so that
    m = 0 is excluded and the rows partition exactly the multiples with
    1 <= m <= q-1.
    """

    r_eff: int
    q: int
    s: np.ndarray
    d: np.ndarray
    t: np.ndarray

    def rows(self) -> list[tuple[int, int, int]]:
        return list(zip(self.s.tolist(), self.d.tolist(), self.t.tolist()))


def decompose(r_eff: int, q: int) -> SubintervalDecomposition:
    """Arithmetic construction of the block decomposition in O(r_eff)."""
    q = int(q)
    if not (2 <= r_eff < q):
        raise ValueError(f"need 2 <= r_eff < q, got r_eff={r_eff}, q={q}")
    if math.gcd(r_eff, q) != 1:
        raise NotCoprimeError(f"gcd({r_eff}, {q}) != 1")
    j = np.arange(r_eff, dtype=np.int64)
    qr = q % r_eff
    s = (-qr * j) % r_eff
    s[0] = r_eff
    t = (qr * (j + 1)) % r_eff
    t[t == 0] = r_eff
    d = (q - s - t) // r_eff
    return SubintervalDecomposition(r_eff=r_eff, q=q, s=s, d=d, t=t)


def block_sums(r_eff: int, q: int) -> tuple[SubintervalDecomposition, np.ndarray]:
    """Per-block cot sums B[j] = sum over the block's multiples of cot(pi*mult/q).

    Uses that floor(m*r_eff/q) is non-decreasing in m, so one ordered pass
    over m = 1..q-1 plus reduceat yields every block sum.
    """
    dec = decompose(r_eff, q)
    q = int(q)
    ct = cot_table(q)
    m = np.arange(1, q, dtype=np.int64)
    prods = m * r_eff
    j_of_m = prods // q
    vals = ct[prods - q * j_of_m]
    starts = np.searchsorted(j_of_m, np.arange(r_eff, dtype=np.int64), side="left")
    return dec, np.add.reduceat(vals, starts)


@dataclass(frozen=True)
class QSplit:
    """Pole-dominated part q0 plus cancelling remainder q1 of a q-sum."""

    q0: float
    q1: float
    m1: int
    selected_j: np.ndarray
    selection_mode: str = "scaled"


def selection_mask(
    dec: SubintervalDecomposition, m1: int, mode: str = "scaled"
) -> np.ndarray:
    """Blocks whose first or last multiple sits close to a pole of cot.

    mode "scaled": s[j]*q <= r_eff*2^m1 or t[j]*q <= r_eff*2^m1 (the literal
    fractional-part threshold 2^m1/q applied to s[j]/r_eff and t[j]/r_eff).
    mode "raw":    s[j] <= 2^m1 or t[j] <= 2^m1 (offsets compared directly,
    matching the truncation depth of the sawtooth approximant).
    """
    cap = 1 << m1
    if mode == "scaled":
        bound = dec.r_eff * cap
        return (dec.s * dec.q <= bound) | (dec.t * dec.q <= bound)
    if mode == "raw":
        return (dec.s <= cap) | (dec.t <= cap)
    raise ValueError(f"unknown selection mode {mode!r}")


def q_split(r_eff: int, q: int, m1: int, mode: str = "scaled") -> QSplit:
    """Split q_sum(r_eff, q) into the near-pole blocks and the rest.

    The two parts are sums over disjoint subsets of the exact same
    floating-point terms j * cot(pi*(s_j + h*r_eff)/q) that make up the
    full q-sum, so q0 + q1 re-sums the q-sum term partition.
    """
    q = int(q)
    if m1 < 1:
        raise ValueError("m1 must be >= 1")
    if (1 << m1) >= q:
        raise ThresholdTooLargeError(f"2^{m1} >= q = {q}")
    dec, blocks = block_sums(r_eff, q)
    mask = selection_mask(dec, m1, mode)
    j = np.arange(r_eff, dtype=np.float64)
    weighted = j * blocks
    q0 = _neumaier(weighted[mask].tolist())
    q1 = _neumaier(weighted[~mask].tolist())
    return QSplit(
        q0=q0,
        q1=q1,
        m1=m1,
        selected_j=np.nonzero(mask)[0].astype(np.int64),
        selection_mode=mode,
    )


def q_approx(r: int, q: int, m1: int, a: int = 0) -> float:
    """Sawtooth-series approximant (r*q/pi) * g(alpha; 2^m1) of the q0 part,
    with alpha the inverse of q modulo r+a divided by r+a."""
    q = int(q)
    if r + a >= q:
        raise ValueError(f"need r + a < q, got {r}+{a} >= {q}")
    if r + a < 2:
        return 0.0
    alpha = q_star(q, r, a) / (r + a)
    return (r * q / math.pi) * g_trunc(alpha, 1 << m1)


# ---------------------------------------------------------------------------
# batch sweeps (shared by the experiment harness and the verification suites)
# ---------------------------------------------------------------------------


def _range_chunk(
    q: int, n_lo: int, n_hi: int, want_q_sum: bool
) -> tuple[np.ndarray, np.ndarray | None]:
    ct = cot_table(q)
    m = np.arange(1, q, dtype=np.int64)
    mf = m.astype(np.float64)
    idx = (n_lo * m) % q
    floors = (n_lo * m) // q if want_q_sum else None
    n_count = n_hi - n_lo + 1
    c0_vals = np.empty(n_count, dtype=np.float64)
    qs_vals = np.empty(n_count, dtype=np.float64) if want_q_sum else None
    for i in range(n_count):
        gathered = ct[idx]
        c0_vals[i] = -np.dot(mf, gathered) / q
        if want_q_sum:
            qs_vals[i] = np.dot(gathered, floors.astype(np.float64))
        if i + 1 < n_count:
            idx += m
            wrap = idx >= q
            np.subtract(idx, q, out=idx, where=wrap)
            if want_q_sum:
                floors += wrap
    return c0_vals, qs_vals


def c0_q_sum_range(
    q: int, n_lo: int, n_hi: int, want_q_sum: bool = False, threads: int = 1
) -> tuple[np.ndarray, np.ndarray | None]:
    """c0(n/q) (and optionally q_sum(n, q)) for every numerator n in [n_lo, n_hi].

    One cot table is shared across the whole range and the index arrays
    (m*n mod q, floor(m*n/q)) are updated incrementally (add/wrap, no
    division), which is what makes exhaustive window sweeps at q ~ 1e5
    affordable.  With threads > 1 the range is cut into contiguous chunks
    (each re-seeding its own index arrays) and results are reassembled in
    chunk order, so the output is identical to the single-thread sweep.
    """
    q = int(q)
    if not (1 <= n_lo <= n_hi < q):
        raise ValueError(f"need 1 <= n_lo <= n_hi < q, got [{n_lo}, {n_hi}], q={q}")
    n_count = n_hi - n_lo + 1
    threads = max(1, int(threads))
    if threads == 1 or n_count < 4 * threads:
        return _range_chunk(q, n_lo, n_hi, want_q_sum)
    import concurrent.futures

    bounds = np.linspace(n_lo, n_hi + 1, threads + 1).astype(int)
    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(
            pool.map(
                lambda se: _range_chunk(q, int(se[0]), int(se[1]) - 1, want_q_sum),
                zip(bounds[:-1], bounds[1:]),
            )
        )
    c0_vals = np.concatenate([p[0] for p in parts])
    qs_vals = np.concatenate([p[1] for p in parts]) if want_q_sum else None
    return c0_vals, qs_vals


def c0_q_sum_at(
    q: int, numerators, want_q_sum: bool = False
) -> tuple[np.ndarray, np.ndarray | None]:
    """c0(n/q) (and optionally q_sum) at an arbitrary set of numerators."""
    q = int(q)
    ns = np.asarray(numerators, dtype=np.int64)
    if ns.size and not (1 <= int(ns.min()) and int(ns.max()) < q):
        raise ValueError("numerators must lie in [1, q-1]")
    ct = cot_table(q)
    m = np.arange(1, q, dtype=np.int64)
    mf = m.astype(np.float64)
    c0_vals = np.empty(ns.size, dtype=np.float64)
    qs_vals = np.empty(ns.size, dtype=np.float64) if want_q_sum else None
    for i, n in enumerate(ns.tolist()):
        prods = m * n
        idx = prods % q
        gathered = ct[idx]
        c0_vals[i] = -np.dot(mf, gathered) / q
        if want_q_sum:
            qs_vals[i] = np.dot(gathered, (prods // q).astype(np.float64))
    return c0_vals, qs_vals


def units_mod(b: int) -> np.ndarray:
    """Ascending residues 1 <= r < b with gcd(r, b) = 1 (all of 1..b-1 if b prime)."""
    r = np.arange(1, b, dtype=np.int64)
    return r[np.gcd(r, b) == 1]


def c0_vasyunin_over_units(b: int, block: int = 64) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(units, c0 values, Vasyunin values) for every reduced fraction r/b.

    Processes residues in blocks so the m*r mod b reduction is a single
    2-d integer operation per block.
    """
    if b < 2:
        raise ValueError("b must be >= 2")
    units = units_mod(b)
    ct = cot_table(b)
    m = np.arange(1, b, dtype=np.int64)
    mf = m.astype(np.float64)
    ctm = ct[1:]
    c0_vals = np.empty(units.size, dtype=np.float64)
    v_vals = np.empty(units.size, dtype=np.float64)
    for lo in range(0, units.size, block):
        rs = units[lo : lo + block]
        idx = (rs[:, None] * m[None, :]) % b
        c0_vals[lo : lo + rs.size] = -(ct[idx] @ mf) / b
        v_vals[lo : lo + rs.size] = (idx @ ctm) / b
    return units, c0_vals, v_vals
