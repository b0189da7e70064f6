"""Runnable experiments over numerator windows.

Each experiment sweeps the numerators r in a window [a0*q, a1*q] (all
residues, or primes only), evaluates cotangent/q-sum statistics at the
shifted arguments (r + a_l)/q, and compares against the corresponding
truncated-sawtooth targets:

* inverse-ratio box counts (do the ratios q*(r;l)/r fill boxes evenly?),
* joint moments of the normalised q-sums and cotangent sums,
* joint distributional checks with bounded test functions, including
  marginal Kolmogorov-Smirnov distances against sampled g values.

Every empirical average is normalised by the exact number of summands in
the window, which keeps all statistics finite and comparable across
windows; the raw textbook normalisations (phi(q) with window-width powers)
are available behind ``normalization="printed"`` for side-by-side output.
Reports carry both sides of every comparison and serialise to a fixed CSV
schema plus a JSON mirror.
"""

from __future__ import annotations

import configparser
import csv
import hashlib
import io
import json
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .cotangent import c0_q_sum_at, c0_q_sum_range
from .errors import ConfigParseError, CostGuardError, EmptyWindowError, NotCoprimeError
from .gfunction import (
    EmpiricalCDF,
    g_samples,
    ks_distance,
    moment_exact,
    mu_integral,
)
from .numthy import ShiftSet, Window, is_prime, primes_in_range, q_star

MAX_Q = 1 << 40
SUBSAMPLE_THRESHOLD = 200_000
DEFAULT_SAMPLE_LIMIT = 100_000
DEFAULT_SCALE = math.pi
DEFAULT_PRIME_LADDER = (1009, 10007, 30011, 100003)

CSV_COLUMNS = ("name", "empirical", "target", "abs_gap", "rel_gap", "n", "q", "runtime_ms")


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoxSpec:
    """Axis-aligned box prod_l [alpha_l, alpha_l + delta] inside [0, 1)^L."""

    alphas: tuple[float, ...]
    delta: float

    def __post_init__(self) -> None:
        alphas = tuple(float(a) for a in self.alphas)
        object.__setattr__(self, "alphas", alphas)
        if not alphas:
            raise ValueError("at least one alpha required")
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if any(a < 0 for a in alphas):
            raise ValueError("alphas must be non-negative")
        if any(a + self.delta >= 1 for a in alphas):
            raise ValueError("alpha + delta must stay below 1")


@dataclass(frozen=True)
class MomentSpec:
    """Exponent tuple and normalisation for joint moment experiments."""

    k: tuple[int, ...]
    cap_exponent: int
    scale: float = DEFAULT_SCALE
    mode: str = "all"

    def __post_init__(self) -> None:
        k = tuple(int(v) for v in self.k)
        object.__setattr__(self, "k", k)
        if any(v < 0 for v in k):
            raise ValueError("moment exponents must be non-negative")
        if self.cap_exponent < 1:
            raise ValueError("cap_exponent must be >= 1")
        if self.mode not in ("all", "primes"):
            raise ValueError(f"mode must be 'all' or 'primes', got {self.mode!r}")

    @property
    def cap(self) -> int:
        return 1 << self.cap_exponent


@dataclass(frozen=True)
class StatRecord:
    """One empirical/target comparison."""

    name: str
    empirical: float
    target: float
    n: int

    @property
    def abs_gap(self) -> float:
        return abs(self.empirical - self.target)

    @property
    def rel_gap(self) -> float:
        return self.abs_gap / max(1.0, abs(self.empirical), abs(self.target))


@dataclass
class ExperimentReport:
    """Serializable record of one experiment cell."""

    name: str
    q: int
    window: tuple[float, float]
    shifts: tuple[int, ...]
    records: list[StatRecord]
    sample_count: int
    seed: int
    config: dict
    runtime_ms: float = 0.0
    extras: dict = field(default_factory=dict)
    arrays: dict = field(default_factory=dict, repr=False)

    @property
    def config_hash(self) -> str:
        canon = json.dumps(self.config, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:12]

    def to_json_obj(self) -> dict:
        return {
            "name": self.name,
            "q": self.q,
            "window": list(self.window),
            "shifts": list(self.shifts),
            "sample_count": self.sample_count,
            "seed": self.seed,
            "runtime_ms": self.runtime_ms,
            "config": self.config,
            "config_hash": self.config_hash,
            "extras": self.extras,
            "records": [
                {
                    "name": r.name,
                    "empirical": r.empirical,
                    "target": r.target,
                    "abs_gap": r.abs_gap,
                    "rel_gap": r.rel_gap,
                    "n": r.n,
                }
                for r in self.records
            ],
        }


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(reports: Iterable[ExperimentReport], stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rep in reports:
        for rec in rep.records:
            writer.writerow(
                [
                    rec.name,
                    fmt_float(rec.empirical),
                    fmt_float(rec.target),
                    fmt_float(rec.abs_gap),
                    fmt_float(rec.rel_gap),
                    rec.n,
                    rep.q,
                    fmt_float(rep.runtime_ms),
                ]
            )


def reports_to_csv_text(reports: Iterable[ExperimentReport]) -> str:
    buf = io.StringIO()
    write_csv(reports, buf)
    return buf.getvalue()


def write_json(reports: Iterable[ExperimentReport], stream) -> None:
    json.dump({"reports": [r.to_json_obj() for r in reports]}, stream, indent=2)
    stream.write("\n")


# ---------------------------------------------------------------------------
# bounded test functions for the distributional checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TestFunction:
    """Named bounded continuous function vanishing at infinity."""

    spec: str
    fn: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x):
        return self.fn(x)


def make_test_function(spec: str) -> TestFunction:
    """Parse "gauss:c:w", "bump:c:w" (clipped quartic), or "one"."""
    parts = spec.split(":")
    kind = parts[0]
    if kind == "one":
        return TestFunction(spec="one", fn=lambda x: np.ones_like(np.asarray(x, dtype=float)))
    try:
        center = float(parts[1]) if len(parts) > 1 else 0.0
        width = float(parts[2]) if len(parts) > 2 else 1.0
    except ValueError as exc:
        raise ValueError(f"bad test-function spec {spec!r}") from exc
    if width <= 0:
        raise ValueError("test-function width must be positive")
    if kind == "gauss":
        return TestFunction(
            spec=f"gauss:{center}:{width}",
            fn=lambda x: np.exp(-(((np.asarray(x, dtype=float) - center) / width) ** 2)),
        )
    if kind == "bump":
        def poly(x):
            z = (np.asarray(x, dtype=float) - center) / width
            return np.maximum(0.0, 1.0 - z * z) ** 2
        return TestFunction(spec=f"bump:{center}:{width}", fn=poly)
    raise ValueError(f"unknown test-function kind {kind!r}")


def gaussian_bump(center: float = 0.0, width: float = 1.0) -> TestFunction:
    return make_test_function(f"gauss:{center}:{width}")


def poly_bump(center: float = 0.0, width: float = 1.0) -> TestFunction:
    return make_test_function(f"bump:{center}:{width}")


# ---------------------------------------------------------------------------
# window sweeps
# ---------------------------------------------------------------------------


@dataclass
class WindowSweep:
    """Cotangent-sum (and optional q-sum) values over a numerator window."""

    q: int
    base: np.ndarray          # admissible base numerators r
    lo: int                   # first numerator covered by the value arrays
    c0_vals: np.ndarray       # c0(n/q) for n = lo .. lo + len - 1
    qs_vals: np.ndarray | None
    subsampled: bool

    def c0_at_shift(self, a: int) -> np.ndarray:
        return self.c0_vals[self.base - self.lo + a]

    def q_sum_at_shift(self, a: int) -> np.ndarray:
        return self.qs_vals[self.base - self.lo + a]


_sweep_cache: dict[tuple, tuple[np.ndarray, np.ndarray | None]] = {}


def _range_values(q: int, lo: int, hi: int, want_qs: bool, threads: int) -> tuple[np.ndarray, np.ndarray | None]:
    """Window value arrays, served from any cached sweep covering the span."""
    for (cq, clo, chi, cwq), (c0v, qsv) in _sweep_cache.items():
        if cq == q and clo <= lo and chi >= hi and (cwq or not want_qs):
            sl = slice(lo - clo, hi - clo + 1)
            return c0v[sl], (qsv[sl] if want_qs else None)
    vals = c0_q_sum_range(q, lo, hi, want_q_sum=want_qs, threads=threads)
    if len(_sweep_cache) >= 3:
        _sweep_cache.pop(next(iter(_sweep_cache)))
    _sweep_cache[(q, lo, hi, want_qs)] = vals
    return vals


def window_sweep(
    q: int,
    w: Window,
    shifts: ShiftSet,
    mode: str = "all",
    want_q_sum: bool = False,
    seed: int = 0,
    sample_limit: int = DEFAULT_SAMPLE_LIMIT,
    threads: int = 1,
) -> WindowSweep:
    """Evaluate c0 (and optionally the q-sum) at every shifted numerator.

    Exhaustive below the subsampling threshold; above it a fixed-seed
    random subset of at most ``sample_limit`` base numerators is used and
    recorded.  The value arrays cover the contiguous span including every
    shift, so all shifted lookups come from one pass.
    """
    q = int(q)
    if q > MAX_Q:
        raise CostGuardError(f"q = {q} exceeds the 2^40 cost guard")
    if not is_prime(q):
        raise ValueError(f"q = {q} must be prime")
    lo, hi = w.bounds(q)
    if hi < lo:
        raise EmptyWindowError(f"no integer in [{w.a0}*{q}, {w.a1}*{q}]")
    max_a = max(shifts)
    if hi + max_a >= q:
        raise ValueError(f"window plus shift reaches the modulus: {hi}+{max_a} >= {q}")
    if mode == "primes":
        base = primes_in_range(lo, hi)
        if base.size == 0:
            raise EmptyWindowError(f"no prime in [{lo}, {hi}]")
    elif mode == "all":
        base = np.arange(lo, hi + 1, dtype=np.int64)
    else:
        raise ValueError(f"mode must be 'all' or 'primes', got {mode!r}")

    subsampled = q > SUBSAMPLE_THRESHOLD and base.size > sample_limit
    if subsampled:
        rng = np.random.default_rng(seed)
        base = np.sort(rng.choice(base, size=sample_limit, replace=False))
        numerators = np.unique(
            np.concatenate([base + a for a in shifts])
        )
        c0_vals, qs_vals = c0_q_sum_at(q, numerators, want_q_sum=want_q_sum)
        # scatter into a dense lookup spanning [lo, hi + max_a]
        dense_c0 = np.full(hi + max_a - lo + 1, np.nan)
        dense_c0[numerators - lo] = c0_vals
        dense_qs = None
        if want_q_sum:
            dense_qs = np.full(hi + max_a - lo + 1, np.nan)
            dense_qs[numerators - lo] = qs_vals
        return WindowSweep(q=q, base=base, lo=lo, c0_vals=dense_c0, qs_vals=dense_qs, subsampled=True)

    c0_vals, qs_vals = _range_values(q, lo, hi + max_a, want_q_sum, threads)
    return WindowSweep(q=q, base=base, lo=lo, c0_vals=c0_vals, qs_vals=qs_vals, subsampled=False)


# ---------------------------------------------------------------------------
# inverse-ratio box counting
# ---------------------------------------------------------------------------


def _inverse_ratios(q: int, w: Window, shifts: ShiftSet) -> tuple[np.ndarray, np.ndarray]:
    """Admissible base numerators and the ratio matrix q*(r;l)/r (L x n)."""
    q = int(q)
    lo, hi = w.bounds(q)
    if hi < lo:
        raise EmptyWindowError(f"no integer in [{w.a0}*{q}, {w.a1}*{q}]")
    rs = []
    ratios = []
    for r in range(lo, hi + 1):
        row = []
        try:
            for a in shifts:
                row.append(q_star(q, r, a) / r)
        except NotCoprimeError:
            continue  # r + a hits a multiple of q; numerator inadmissible
        rs.append(r)
        ratios.append(row)
    return np.asarray(rs, dtype=np.int64), np.asarray(ratios, dtype=np.float64).T


def count_inverse_box(
    q: int, w: Window, shifts: ShiftSet, box: BoxSpec
) -> tuple[int, float]:
    """Exact count of window numerators whose inverse ratios fall in the box,
    and the equidistribution target delta^L * (a1 - a0) * q."""
    if len(box.alphas) != len(shifts):
        raise ValueError("box dimension must match the number of shifts")
    _, ratios = _inverse_ratios(q, w, shifts)
    inside = np.ones(ratios.shape[1], dtype=bool)
    for ax, alpha in enumerate(box.alphas):
        inside &= (ratios[ax] >= alpha) & (ratios[ax] <= alpha + box.delta)
    target = box.delta ** len(shifts) * w.width * int(q)
    return int(np.count_nonzero(inside)), float(target)


def inverse_box_partition(
    q: int, w: Window, shifts: ShiftSet, n_boxes: int
) -> tuple[np.ndarray, int]:
    """Histogram the ratio vectors over an n_boxes^L grid.

    Every admissible numerator lands in exactly one cell (the top cell
    absorbs ratios >= 1, which occur only for positive shifts), so the
    cell counts sum to the number of admissible numerators exactly.
    """
    if n_boxes < 1:
        raise ValueError("n_boxes must be >= 1")
    rs, ratios = _inverse_ratios(q, w, shifts)
    idx = np.minimum((ratios * n_boxes).astype(np.int64), n_boxes - 1)
    counts = np.zeros((n_boxes,) * len(shifts), dtype=np.int64)
    np.add.at(counts, tuple(idx), 1)
    return counts, int(rs.size)


def inverse_box_report(
    q: int,
    w: Window,
    shifts: ShiftSet,
    box: BoxSpec,
    name: str = "inverse-box",
    seed: int = 0,
) -> ExperimentReport:
    t0 = time.perf_counter()
    count, target = count_inverse_box(q, w, shifts, box)
    lo, hi = w.bounds(int(q))
    rec = StatRecord(name="inverse_box_count", empirical=float(count), target=target, n=hi - lo + 1)
    return ExperimentReport(
        name=name,
        q=int(q),
        window=(w.a0, w.a1),
        shifts=tuple(shifts),
        records=[rec],
        sample_count=hi - lo + 1,
        seed=seed,
        config={
            "kind": "inverse-box",
            "q": int(q),
            "window.a0": w.a0,
            "window.a1": w.a1,
            "shifts": list(shifts),
            "box.alphas": list(box.alphas),
            "box.delta": box.delta,
            "seed": seed,
        },
        runtime_ms=(time.perf_counter() - t0) * 1e3,
    )


# ---------------------------------------------------------------------------
# joint moments
# ---------------------------------------------------------------------------


def _phi(q: int) -> int:
    if is_prime(q):
        return q - 1
    r = np.arange(1, q, dtype=np.int64)
    return int(np.count_nonzero(np.gcd(r, q) == 1))


def _moment_products(
    sweep: WindowSweep,
    shifts: ShiftSet,
    spec: MomentSpec,
    use_q_sum: bool,
) -> np.ndarray:
    prod = np.ones(sweep.base.size, dtype=np.float64)
    q = sweep.q
    for a, k in zip(shifts, spec.k):
        if k == 0:
            continue
        if use_q_sum:
            vals = spec.scale * sweep.q_sum_at_shift(a) / ((sweep.base + a) * float(q))
        else:
            vals = spec.scale * sweep.c0_at_shift(a) / float(q)
        prod *= vals**k
    return prod


def _cap_ladder(spec: MomentSpec) -> list[tuple[int, float]]:
    ladder = []
    for exp in range(max(1, spec.cap_exponent - 5), spec.cap_exponent + 1):
        cap = 1 << exp
        ladder.append((cap, math.prod(moment_exact(cap, k) for k in spec.k)))
    return ladder


def _joint_moments(
    q: int,
    w: Window,
    shifts: ShiftSet,
    spec: MomentSpec,
    use_q_sum: bool,
    name: str,
    seed: int,
    sample_limit: int,
    threads: int,
    normalization: str,
) -> ExperimentReport:
    if len(spec.k) != len(shifts):
        raise ValueError("one exponent per shift required")
    if normalization not in ("count", "printed"):
        raise ValueError(f"unknown normalization {normalization!r}")
    t0 = time.perf_counter()
    sweep = window_sweep(
        q, w, shifts, mode=spec.mode, want_q_sum=use_q_sum,
        seed=seed, sample_limit=sample_limit, threads=threads,
    )
    prods = _moment_products(sweep, shifts, spec, use_q_sum)
    empirical = float(np.mean(prods))
    std_error = float(np.std(prods)) / math.sqrt(prods.size)
    ladder = _cap_ladder(spec)
    target = ladder[-1][1]
    records = [
        StatRecord(
            name=f"{name}_k={','.join(map(str, spec.k))}",
            empirical=empirical,
            target=target,
            n=sweep.base.size,
        )
    ]
    if sum(spec.k) % 2 == 1:
        # the sign of the scale is a convention; odd total degree flips with
        # it, so the mirrored statistic is reported alongside
        records.append(
            StatRecord(
                name=f"{name}_k={','.join(map(str, spec.k))}_negated",
                empirical=-empirical,
                target=target,
                n=sweep.base.size,
            )
        )
    if normalization == "printed":
        # Raw textbook form: sum over the window of the unscaled products,
        # divided by phi(q), with the window-width power made explicit.
        raw = _moment_products(
            sweep, shifts, MomentSpec(k=spec.k, cap_exponent=spec.cap_exponent, scale=1.0, mode=spec.mode),
            use_q_sum,
        )
        power = len(shifts) if use_q_sum else sum(spec.k)
        printed = float(np.sum(raw)) / _phi(int(q)) / w.width**power
        records.append(
            StatRecord(name=f"{name}_printed", empirical=printed, target=target, n=sweep.base.size)
        )
    rep = ExperimentReport(
        name=name,
        q=int(q),
        window=(w.a0, w.a1),
        shifts=tuple(shifts),
        records=records,
        sample_count=sweep.base.size,
        seed=seed,
        config={
            "kind": name,
            "q": int(q),
            "window.a0": w.a0,
            "window.a1": w.a1,
            "shifts": list(shifts),
            "moments.k": list(spec.k),
            "cap_exponent": spec.cap_exponent,
            "scale": spec.scale,
            "mode": spec.mode,
            "seed": seed,
            "sample_limit": sample_limit,
            "normalization": normalization,
        },
        extras={
            "cap_ladder": [[cap, t] for cap, t in ladder],
            "subsampled": sweep.subsampled,
            "std_error": std_error,
        },
    )
    rep.runtime_ms = (time.perf_counter() - t0) * 1e3
    return rep


def joint_q_moments(
    q: int,
    w: Window,
    shifts: ShiftSet,
    spec: MomentSpec,
    seed: int = 0,
    sample_limit: int = DEFAULT_SAMPLE_LIMIT,
    threads: int = 1,
    normalization: str = "count",
) -> ExperimentReport:
    """Joint moments of scale*q_sum((r+a)/q) / ((r+a) q) against the
    truncated-series moment products."""
    return _joint_moments(
        q, w, shifts, spec, True, "q-moments", seed, sample_limit, threads, normalization
    )


def joint_c0_moments(
    q: int,
    w: Window,
    shifts: ShiftSet,
    spec: MomentSpec,
    seed: int = 0,
    sample_limit: int = DEFAULT_SAMPLE_LIMIT,
    threads: int = 1,
    normalization: str = "count",
) -> ExperimentReport:
    """Joint moments of scale*c0((r+a)/q)/q over all or prime numerators."""
    return _joint_moments(
        q, w, shifts, spec, False, "c0-moments", seed, sample_limit, threads, normalization
    )


# ---------------------------------------------------------------------------
# distributional factorization check
# ---------------------------------------------------------------------------


def theorem_check(
    q: int,
    w: Window,
    shifts: ShiftSet,
    f_family: Sequence[TestFunction],
    mode: str = "all",
    cap: int = 1 << 12,
    scale: float = DEFAULT_SCALE,
    g_sample_count: int = 100_000,
    seed: int = 0,
    sample_limit: int = DEFAULT_SAMPLE_LIMIT,
    threads: int = 1,
    normalization: str = "count",
) -> ExperimentReport:
    """Joint average of prod_l f_l(scale*c0((r+a_l)/q)/q) versus the product
    of integrals against the truncated-series value distribution, plus
    marginal empirical CDFs and their KS distance to a g sample."""
    if len(f_family) != len(shifts):
        raise ValueError("one test function per shift required")
    t0 = time.perf_counter()
    sweep = window_sweep(
        q, w, shifts, mode=mode, want_q_sum=False,
        seed=seed, sample_limit=sample_limit, threads=threads,
    )
    n = sweep.base.size
    marginals = {a: scale * sweep.c0_at_shift(a) / float(q) for a in shifts}
    g_vals = g_samples(cap, g_sample_count)
    g_cdf = EmpiricalCDF(g_vals)

    joint = np.ones(n, dtype=np.float64)
    marginal_means = []
    mu_values = []
    records = []
    for pos, (a, f) in enumerate(zip(shifts, f_family), start=1):
        fx = np.asarray(f(marginals[a]), dtype=np.float64)
        joint *= fx
        marginal_means.append(float(np.mean(fx)))
        mu = mu_integral(f, cap, g_sample_count)
        mu_values.append(mu.value)
        records.append(
            StatRecord(
                name=f"marginal_f_avg_l={pos}",
                empirical=marginal_means[-1],
                target=mu.value,
                n=n,
            )
        )
        records.append(
            StatRecord(
                name=f"marginal_ks_l={pos}",
                empirical=ks_distance(EmpiricalCDF(marginals[a]), g_cdf),
                target=0.0,
                n=n,
            )
        )
    joint_avg = float(np.mean(joint))
    target = math.prod(mu_values)
    records.insert(
        0, StatRecord(name="joint_f_avg", empirical=joint_avg, target=target, n=n)
    )
    records.append(
        StatRecord(
            name="independence_gap",
            empirical=abs(joint_avg - math.prod(marginal_means)),
            target=0.0,
            n=n,
        )
    )
    if normalization == "printed":
        raw_joint = np.ones(n, dtype=np.float64)
        for a, f in zip(shifts, f_family):
            raw_joint *= np.asarray(f(sweep.c0_at_shift(a)), dtype=np.float64)
        printed = float(np.sum(raw_joint)) / _phi(int(q)) / w.width ** len(shifts)
        records.append(
            StatRecord(name="joint_f_avg_printed", empirical=printed, target=target, n=n)
        )
    rep = ExperimentReport(
        name="theorem11",
        q=int(q),
        window=(w.a0, w.a1),
        shifts=tuple(shifts),
        records=records,
        sample_count=n,
        seed=seed,
        config={
            "kind": "theorem11",
            "q": int(q),
            "window.a0": w.a0,
            "window.a1": w.a1,
            "shifts": list(shifts),
            "f_family": [f.spec for f in f_family],
            "cap_exponent": int(math.log2(cap)),
            "scale": scale,
            "mode": mode,
            "seed": seed,
            "sample_limit": sample_limit,
            "g_sample_count": g_sample_count,
            "normalization": normalization,
        },
        extras={"mu_values": mu_values, "subsampled": sweep.subsampled},
        arrays={
            "g_samples": g_vals,
            **{f"marginal_l={pos}": marginals[a] for pos, a in enumerate(shifts, start=1)},
        },
    )
    rep.runtime_ms = (time.perf_counter() - t0) * 1e3
    return rep


def calibrate_scale(
    q: int,
    w: Window,
    shifts: ShiftSet,
    mode: str = "all",
    cap: int = 1 << 12,
    g_sample_count: int = 100_000,
    lo: float = 1.0,
    hi: float = 6.0,
    iterations: int = 40,
    seed: int = 0,
    sample_limit: int = DEFAULT_SAMPLE_LIMIT,
    threads: int = 1,
) -> tuple[float, float]:
    """Best scale s minimising the KS distance between the s*c0/q marginal
    and the g sample, by golden-section search; returns (scale, ks).

    Quantifies the default pi: the minimiser lands near pi because the
    q-sum tracks (numerator*q/pi) times the sawtooth series.
    """
    sweep = window_sweep(
        q, w, shifts, mode=mode, seed=seed, sample_limit=sample_limit, threads=threads
    )
    base = sweep.c0_at_shift(shifts.shifts[0]) / float(q)
    g_cdf = EmpiricalCDF(g_samples(cap, g_sample_count))

    def ks_at(scale: float) -> float:
        return ks_distance(EmpiricalCDF(scale * base), g_cdf)

    ratio = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    for _ in range(iterations):
        m1 = b - ratio * (b - a)
        m2 = a + ratio * (b - a)
        if ks_at(m1) < ks_at(m2):
            b = m2
        else:
            a = m1
    best = (a + b) / 2.0
    return best, ks_at(best)


# ---------------------------------------------------------------------------
# config-driven batch runs
# ---------------------------------------------------------------------------


def _parse_int(section: str, parser_section, key: str, default=None) -> int:
    raw = parser_section.get(key)
    if raw is None:
        if default is not None:
            return default
        raise ConfigParseError(f"[{section}] missing required field {key!r}")
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigParseError(f"[{section}] field {key!r}: not an integer: {raw!r}") from exc


def _parse_float(section: str, parser_section, key: str, default=None) -> float:
    raw = parser_section.get(key)
    if raw is None:
        if default is not None:
            return default
        raise ConfigParseError(f"[{section}] missing required field {key!r}")
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigParseError(f"[{section}] field {key!r}: not a number: {raw!r}") from exc


def _parse_int_list(section: str, parser_section, key: str) -> list[int]:
    raw = parser_section.get(key)
    if raw is None:
        raise ConfigParseError(f"[{section}] missing required field {key!r}")
    try:
        return [int(v.strip()) for v in raw.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise ConfigParseError(f"[{section}] field {key!r}: bad integer list: {raw!r}") from exc


def _parse_float_list(section: str, parser_section, key: str) -> list[float]:
    raw = parser_section.get(key)
    if raw is None:
        raise ConfigParseError(f"[{section}] missing required field {key!r}")
    try:
        return [float(v.strip()) for v in raw.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise ConfigParseError(f"[{section}] field {key!r}: bad number list: {raw!r}") from exc


def _parse_window(section: str, parser_section) -> Window:
    a0 = _parse_float(section, parser_section, "window.a0")
    a1 = _parse_float(section, parser_section, "window.a1")
    try:
        return Window.relaxed_range(a0, a1)
    except ValueError as exc:
        raise ConfigParseError(f"[{section}] field 'window.a0/window.a1': {exc}") from exc


def run_config(path: str, threads: int = 1) -> list[ExperimentReport]:
    """Execute every experiment cell declared in a key=value config file."""
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigParseError(f"cannot read config {path!r}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigParseError(f"config parse error: {exc}") from exc

    reports: list[ExperimentReport] = []
    for section in parser.sections():
        sec = parser[section]
        kind = sec.get("kind")
        if kind is None:
            raise ConfigParseError(f"[{section}] missing required field 'kind'")
        q = _parse_int(section, sec, "q")
        if q > MAX_Q:
            raise CostGuardError(f"[{section}] q = {q} exceeds the 2^40 cost guard")
        if not is_prime(q):
            raise ConfigParseError(f"[{section}] field 'q': {q} is not prime")
        window = _parse_window(section, sec)
        shifts = ShiftSet(tuple(_parse_int_list(section, sec, "shifts")))
        seed = _parse_int(section, sec, "seed", default=0)
        sample_limit = _parse_int(section, sec, "sample_limit", default=DEFAULT_SAMPLE_LIMIT)

        if kind == "inverse-box":
            box = BoxSpec(
                alphas=tuple(_parse_float_list(section, sec, "box.alphas")),
                delta=_parse_float(section, sec, "box.delta"),
            )
            rep = inverse_box_report(q, window, shifts, box, name=section, seed=seed)
        elif kind in ("q-moments", "c0-moments"):
            spec = MomentSpec(
                k=tuple(_parse_int_list(section, sec, "moments.k")),
                cap_exponent=_parse_int(section, sec, "cap_exponent"),
                scale=_parse_float(section, sec, "scale", default=DEFAULT_SCALE),
                mode=sec.get("mode", "all"),
            )
            fn = joint_q_moments if kind == "q-moments" else joint_c0_moments
            rep = fn(q, window, shifts, spec, seed=seed, sample_limit=sample_limit, threads=threads)
            rep.name = section
        elif kind == "theorem11":
            f_specs = sec.get("f_family")
            if f_specs is None:
                raise ConfigParseError(f"[{section}] missing required field 'f_family'")
            family = [make_test_function(s.strip()) for s in f_specs.split(",")]
            rep = theorem_check(
                q,
                window,
                shifts,
                family,
                mode=sec.get("mode", "all"),
                cap=1 << _parse_int(section, sec, "cap_exponent", default=12),
                scale=_parse_float(section, sec, "scale", default=DEFAULT_SCALE),
                g_sample_count=_parse_int(section, sec, "g_sample_count", default=100_000),
                seed=seed,
                sample_limit=sample_limit,
                threads=threads,
            )
            rep.name = section
        else:
            raise ConfigParseError(f"[{section}] field 'kind': unknown kind {kind!r}")
        reports.append(rep)
    return reports
