"""Desk-scale laboratory for cotangent sums and their value distribution."""

from .cotangent import (
    FareyFraction,
    QSplit,
    SubintervalDecomposition,
    c0,
    decompose,
    q_approx,
    q_split,
    q_sum,
    vasyunin,
)
from .errors import (
    CapTooLargeError,
    ConfigParseError,
    CostGuardError,
    CotlabError,
    EmptySampleError,
    EmptyWindowError,
    NotCoprimeError,
    ThresholdTooLargeError,
)
from .gfunction import (
    EmpiricalCDF,
    TruncatedG,
    build_piecewise,
    g_trunc,
    ks_distance,
    moment_exact,
    mu_integral,
    second_moment_gcd_oracle,
)
from .numthy import (
    PrimeModulus,
    ShiftSet,
    Window,
    ext_gcd,
    is_prime,
    mod_inverse,
    q_star,
    residues_in_window,
)

__version__ = "0.1.0"
