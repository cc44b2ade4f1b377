"""Zero-truncated Poisson distribution: pmf, cdf, moments, sampling, MLE.

A zero-truncated Poisson variate is a Poisson(lambda) count conditioned on
being at least 1, so the pmf is e^(-lam) lam^k / (k! (1 - e^(-lam))) on
k = 1, 2, ....  All probability quantities route their exponentials through
``expm1``/``log`` so nothing degrades as lambda approaches 0, where the
distribution collapses onto the point k = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .specfun import reg_lower_gamma, reg_upper_gamma

__all__ = [
    "ZtpParams",
    "Sample",
    "MleResult",
    "DEGENERATE_RATE",
    "pmf",
    "log_pmf",
    "cdf",
    "mean",
    "size_biased_pmf",
    "laplace_transform",
    "h_function",
    "sample",
    "solve_rate_for_mean",
    "mle",
]

# Rate reported for samples whose mean is (numerically) 1: the MLE runs to
# the boundary lambda -> 0, so estimates are clamped here and flagged.
DEGENERATE_RATE = 1e-8


@dataclass(frozen=True)
class ZtpParams:
    """Parameters of a zero-truncated Poisson distribution (rate > 0)."""

    lam: float

    def __post_init__(self) -> None:
        lam = float(self.lam)
        if not (math.isfinite(lam) and lam > 0.0):
            raise ValueError(f"rate must be a positive finite float, got {self.lam!r}")
        object.__setattr__(self, "lam", lam)


class Sample:
    """An observed sample of positive integer counts.

    Wraps an int64 array; rejects empty input, values below 1, and any
    non-integer values rather than truncating them silently.
    """

    __slots__ = ("values",)

    def __init__(self, values: Iterable[int]):
        arr = np.asarray(values)
        if arr.ndim != 1:
            raise TypeError(f"sample values must be one-dimensional, got shape {arr.shape}")
        if arr.size == 0:
            raise ValueError("sample must contain at least one observation")
        if arr.dtype.kind not in "iu":
            if arr.dtype.kind != "f" or not np.all(arr == np.floor(arr)):
                raise TypeError(f"sample values must be integers, got dtype {arr.dtype}")
        out = arr.astype(np.int64)
        if np.any(out < 1):
            raise ValueError("sample values must all be >= 1")
        object.__setattr__(self, "values", out)
        out.setflags(write=False)

    @property
    def n(self) -> int:
        return int(self.values.size)

    def total(self) -> int:
        return int(self.values.sum())

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"Sample(n={self.n}, total={self.total()})"


class MleResult(NamedTuple):
    lam_hat: float
    degenerate: bool


def _log_one_minus_exp_neg(lam: float) -> float:
    """ln(1 - e^(-lam)), accurate for small lam via expm1."""
    return math.log(-math.expm1(-lam))


def log_pmf(params: ZtpParams, k: int) -> float:
    """Log probability of observing the count k >= 1."""
    k = _check_count(k)
    lam = params.lam
    return k * math.log(lam) - lam - math.lgamma(k + 1.0) - _log_one_minus_exp_neg(lam)


def pmf(params: ZtpParams, k: int) -> float:
    """Probability of observing the count k >= 1."""
    return math.exp(log_pmf(params, k))


def _check_count(k) -> int:
    if isinstance(k, float):
        if not k.is_integer():
            raise TypeError(f"count must be an integer, got {k!r}")
        k = int(k)
    if not isinstance(k, (int, np.integer)):
        raise TypeError(f"count must be an integer, got {k!r}")
    k = int(k)
    if k < 1:
        raise ValueError(f"count must be >= 1, got {k}")
    return k


def cdf(params: ZtpParams, x: float) -> float:
    """P(X <= x).  Zero below 1; steps at the integers.

    Uses the Poisson-tail identity: for m = floor(x) >= 1 the survivor mass
    past m is P(m+1, lam) / (1 - e^(-lam)) with P the regularized lower
    incomplete gamma function.
    """
    x = float(x)
    if math.isnan(x):
        raise ValueError("cdf requires a non-NaN argument")
    if x < 1.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    m = math.floor(x)
    lam = params.lam
    return 1.0 - reg_lower_gamma(m + 1.0, lam) / (-math.expm1(-lam))


def mean(params: ZtpParams) -> float:
    """E(X) = lam / (1 - e^(-lam)).

    Below lam = 1e-6 the ratio is taken from its Taylor development
    1 + lam/2 + lam^2/12 to avoid the 0/0 ramp at the origin.
    """
    lam = params.lam
    if lam < 1e-6:
        return 1.0 + lam / 2.0 + lam * lam / 12.0
    return lam / (-math.expm1(-lam))


def _mean_of_rate(lam: float) -> float:
    if lam < 1e-6:
        return 1.0 + lam / 2.0 + lam * lam / 12.0
    return lam / (-math.expm1(-lam))


def _mean_derivative(lam: float) -> float:
    """d/dlam of lam / (1 - e^(-lam))."""
    if lam < 1e-5:
        return 0.5 + lam / 6.0 - lam**3 / 180.0
    em = -math.expm1(-lam)
    return (em - lam * math.exp(-lam)) / (em * em)


def size_biased_pmf(params: ZtpParams, k: int) -> float:
    """Pmf of the size-biased companion variate: k * pmf(k) / mean.

    Algebraically this is a shifted Poisson, e^(-lam) lam^(k-1) / (k-1)!,
    so the truncation normalizer cancels out entirely.
    """
    k = _check_count(k)
    lam = params.lam
    return math.exp((k - 1) * math.log(lam) - lam - math.lgamma(float(k)))


def laplace_transform(params: ZtpParams, x: float) -> float:
    """E(e^(-xX)) for x > 0, i.e. sum_k e^(-xk) pmf(k).

    Closed form: e^(-lam) * (e^(lam e^(-x)) - 1) / (1 - e^(-lam)), with the
    numerator taken through expm1 so small exponents keep their accuracy.
    """
    x = float(x)
    if not (math.isfinite(x) and x > 0.0):
        raise ValueError(f"laplace_transform requires finite x > 0, got {x!r}")
    lam = params.lam
    a = lam * math.exp(-x)
    return math.exp(-lam) * math.expm1(a) / (-math.expm1(-lam))


def h_function(params: ZtpParams, x: float, xstar: int) -> float:
    """Partial Laplace sum sum_{1 <= k < xstar} e^(-xk) pmf(k), for x > 0.

    Closed form via the upper incomplete gamma function:
    [e^(-lam)/(1-e^(-lam))] * (e^a Q(xstar, a) - 1) with a = lam e^(-x),
    using the identity e^a Q(m, a) = sum_{k<m} a^k / k!.  The subtraction
    is rearranged through expm1 when the lower gamma part is the smaller
    one, so the near-cancellation at small a costs no accuracy.
    """
    x = float(x)
    if not (math.isfinite(x) and x > 0.0):
        raise ValueError(f"h_function requires finite x > 0, got {x!r}")
    if not isinstance(xstar, (int, np.integer)) or xstar < 1:
        raise ValueError(f"h_function requires integer xstar >= 1, got {xstar!r}")
    lam = params.lam
    a = lam * math.exp(-x)
    if xstar == 1:
        return 0.0
    p = reg_lower_gamma(float(xstar), a)
    if p <= 0.5:
        core = math.expm1(a) - math.exp(a) * p
    else:
        core = math.exp(a) * reg_upper_gamma(float(xstar), a) - 1.0
    return math.exp(-lam) * core / (-math.expm1(-lam))


def sample(params: ZtpParams, n: int, rng: np.random.Generator) -> Sample:
    """Draw n counts by inverse-CDF search.

    Consumes exactly n uniforms from ``rng``.  Each uniform is walked up the
    cdf starting at k = 1 with the recursion p_{k+1} = p_k * lam / (k + 1);
    the search is vectorized over the still-unassigned draws but assigns the
    same values a scalar sequential search would.  Expected cost is
    O(n * (1 + lam)).  For very large rates (lam > 500), where the start of
    the recursion underflows, draws fall back to Poisson rejection, whose
    acceptance probability 1 - e^(-lam) is then indistinguishable from 1.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"sample size must be a positive integer, got {n!r}")
    lam = params.lam
    if lam > 500.0:
        out = rng.poisson(lam, size=n).astype(np.int64)
        while True:
            zeros = np.flatnonzero(out == 0)
            if zeros.size == 0:
                break
            out[zeros] = rng.poisson(lam, size=zeros.size)
        return Sample(out)

    u = rng.random(n)
    out = np.empty(n, dtype=np.int64)
    remaining = np.arange(n)
    k = 1
    p = lam * math.exp(-lam) / (-math.expm1(-lam))
    c = p
    while True:
        hit = u[remaining] < c
        out[remaining[hit]] = k
        remaining = remaining[~hit]
        if remaining.size == 0:
            break
        k += 1
        p *= lam / k
        c += p
        if p == 0.0:
            # Cumulative mass saturated below some residual uniforms; the
            # event has probability ~1e-16 per draw.  Park them at the
            # first unreachable count.
            out[remaining] = k
            break
    return Sample(out)


def solve_rate_for_mean(xbar: float) -> float:
    """Invert the mean function: the rate whose ZTP mean equals xbar > 1.

    Bisection on the bracket [1e-8, 51 * xbar] (the mean function is
    strictly increasing) followed by Newton polish; the returned rate
    reproduces xbar to a relative residual of about machine epsilon.
    """
    xbar = float(xbar)
    if not (math.isfinite(xbar) and xbar > 1.0):
        raise ValueError(f"solve_rate_for_mean requires finite xbar > 1, got {xbar!r}")
    lo = 1e-8
    hi = 51.0 * xbar
    if _mean_of_rate(lo) >= xbar:
        return lo
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _mean_of_rate(mid) < xbar:
            lo = mid
        else:
            hi = mid
    lam = 0.5 * (lo + hi)
    for _ in range(4):
        resid = _mean_of_rate(lam) - xbar
        if abs(resid) <= 1e-14 * xbar:
            break
        step = resid / _mean_derivative(lam)
        if lam - step <= 0.0:
            step = lam / 2.0
        lam -= step
    return lam


def mle(s: Sample) -> MleResult:
    """Maximum-likelihood rate for an observed sample.

    The likelihood equation is mean(lam) = xbar.  A sample of all ones has
    its MLE at the boundary lam -> 0; such samples are clamped to
    ``DEGENERATE_RATE`` and flagged.
    """
    if not isinstance(s, Sample):
        raise TypeError(f"mle expects a Sample, got {type(s).__name__}")
    xbar = s.total() / s.n
    if xbar <= 1.0 + 1e-12:
        return MleResult(DEGENERATE_RATE, True)
    return MleResult(solve_rate_for_mean(xbar), False)
