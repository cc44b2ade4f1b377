"""Brute-force reference implementations and consistency checking.

Everything in this module is computed from defining expressions: pmf values
by the ratio recursion p_{k+1} = p_k * lam / (k+1), moments and mean
absolute differences by truncated series, estimator expectations by
exhaustive enumeration over the discrete sample space.  None of the closed
forms under test in :mod:`ztpgini.gini` are used on the oracle side, so an
agreement between the two is evidence, not tautology.

Also home to the golden-fixture machinery: ``python -m ztpgini.oracles
--write PATH`` regenerates the CSV of oracle values that the test suite and
the ``verify`` subcommand compare against.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass
from itertools import product

from .gini import (
    expected_g_diag,
    expected_gini,
    gini_population,
    prob_equal,
    prob_less,
    r1,
    r1_via_marcum,
    r_infinity,
)
from .specfun import DEFAULT_QUAD, QuadSpec, integrate_half_line
from .ztp import ZtpParams, h_function, laplace_transform, mean

__all__ = [
    "DEFAULT_TAIL",
    "IdentityCheck",
    "IdentityReport",
    "gini_population_bruteforce",
    "expected_gini_enumeration",
    "default_kmax",
    "identity_suite",
    "generate_golden",
    "write_golden",
    "GOLDEN_COLUMNS",
]

DEFAULT_TAIL = 1e-12

# Enumeration cost is kmax^n tuples; anything past this is a mistake.
_ENUM_BUDGET = 10**7


def _pmf_table(lam: float, kmax: int) -> list[float]:
    """pmf values p_1..p_kmax via the ratio recursion, index 0 unused."""
    p = [0.0] * (kmax + 1)
    p[1] = lam * math.exp(-lam) / (-math.expm1(-lam))
    for k in range(1, kmax):
        p[k + 1] = p[k] * lam / (k + 1)
    return p


def default_kmax(params: ZtpParams, tail: float = DEFAULT_TAIL) -> int:
    """Smallest k whose cdf complement provably drops below ``tail``.

    The complement past k is bounded by the geometric majorant
    p_{k+1} / (1 - lam/(k+2)) once k + 2 > lam; this bound, unlike a
    running 1 - cumsum, cannot stall on float cancellation.
    """
    if not (tail > 0.0):
        raise ValueError(f"tail must be positive, got {tail!r}")
    lam = params.lam
    p = lam * math.exp(-lam) / (-math.expm1(-lam))
    k = 1
    while True:
        p_next = p * lam / (k + 1)
        ratio = lam / (k + 2)
        if ratio < 1.0 and p_next < tail * (1.0 - ratio):
            return k
        k += 1
        p = p_next
        if k > 100000:
            raise ValueError("tail threshold not reached; lam too large for enumeration")


def gini_population_bruteforce(params: ZtpParams, tail: float = DEFAULT_TAIL) -> float:
    """Population Gini from the mean-absolute-difference definition.

    G = E|X1 - X2| / (2 mu) with E|X1 - X2| = 2 * sum_{k>=1} F(k)(1 - F(k)),
    all three series truncated once the cdf complement is below ``tail``.
    """
    kmax = default_kmax(params, tail)
    p = _pmf_table(params.lam, kmax)
    mu = sum(k * p[k] for k in range(1, kmax + 1))
    cdf_val = 0.0
    fbar_sum = 0.0
    for k in range(1, kmax + 1):
        cdf_val += p[k]
        fbar_sum += cdf_val * (1.0 - cdf_val)
    return fbar_sum / mu


def _mean_abs_diff_double_sum(params: ZtpParams, tail: float = DEFAULT_TAIL) -> float:
    """E|X1 - X2| as 2 * sum_{k<l} (l - k) p_k p_l; alternate series form."""
    kmax = default_kmax(params, tail)
    p = _pmf_table(params.lam, kmax)
    acc = 0.0
    for k in range(1, kmax + 1):
        for l in range(k + 1, kmax + 1):
            acc += (l - k) * p[k] * p[l]
    return 2.0 * acc


def _gini_of_tuple(values: tuple[int, ...]) -> float:
    """The pairwise estimator straight from its definition (double loop)."""
    n = len(values)
    acc = 0
    for i in range(n):
        for j in range(i + 1, n):
            acc += abs(values[i] - values[j])
    return acc / ((n - 1) * sum(values))


def expected_gini_enumeration(
    params: ZtpParams,
    n: int,
    kmax: int | None = None,
    allow_slow: bool = False,
) -> float:
    """E(G_hat) by exhaustive enumeration of {1..kmax}^n.

    Exact up to the truncated tail mass.  n = 4 costs kmax^4 tuples and
    must be opted into via ``allow_slow``; larger n is refused outright.
    """
    if n not in (2, 3, 4):
        raise ValueError(f"enumeration supports n in {{2, 3, 4}}, got {n!r}")
    if n == 4 and not allow_slow:
        raise ValueError("n=4 enumeration is expensive; pass allow_slow=True to run it")
    if kmax is None:
        kmax = default_kmax(params)
    if kmax < 1 or kmax**n > _ENUM_BUDGET:
        raise ValueError(f"enumeration budget exceeded: kmax={kmax}, n={n}")
    p = _pmf_table(params.lam, kmax)
    acc = 0.0
    for values in product(range(1, kmax + 1), repeat=n):
        weight = 1.0
        for v in values:
            weight *= p[v]
        acc += weight * _gini_of_tuple(values)
    return acc


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    lhs: float
    rhs: float
    tol: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def passed(self) -> bool:
        return math.isfinite(self.lhs) and math.isfinite(self.rhs) and self.residual <= self.tol


@dataclass(frozen=True)
class IdentityReport:
    lam: float
    n: int
    checks: tuple[IdentityCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[IdentityCheck]:
        return [c for c in self.checks if not c.passed]


def _r_infinity_numeric(params: ZtpParams, n: int, spec: QuadSpec) -> float:
    """r_infinity from its defining half-line integral (pre-closed-form).

    [e^(-n lam) / (1 - e^(-lam))^(n-1)]
        * int_0^inf exp(lam e^(-x) - x) * [exp(lam e^(-x)) - 1]^(n-1) dx,
    with the whole integrand fused into a single exponent.
    """
    lam = params.lam
    log_pref = -n * lam - (n - 1) * math.log(-math.expm1(-lam))

    def integrand(x: float) -> float:
        a = lam * math.exp(-x)
        return math.exp(log_pref + a - x + (n - 1) * math.log(math.expm1(a)))

    return integrate_half_line(integrand, 0.0, spec)


def _laplace_series(params: ZtpParams, x: float, kmax: int) -> float:
    p = _pmf_table(params.lam, kmax)
    return sum(math.exp(-x * k) * p[k] for k in range(1, kmax + 1))


def _partial_laplace_series(params: ZtpParams, x: float, xstar: int, kmax: int) -> float:
    p = _pmf_table(params.lam, min(kmax, max(xstar - 1, 1)))
    return sum(math.exp(-x * k) * p[k] for k in range(1, min(xstar, kmax + 1)))


_PROBE_X = (0.25, math.log(2.0), 1.5)
_PROBE_XSTAR = (1, 2, 5)


def identity_suite(
    params: ZtpParams,
    n: int,
    spec: QuadSpec = DEFAULT_QUAD,
) -> IdentityReport:
    """Cross-path consistency checks tying the closed forms together.

    (a) the population Gini against its order/tie characterization,
    (b) the assembled expectation against its three-piece decomposition,
    (c) the Bessel form of r1 against its Marcum-Q integral form,
    (d) closed-form r_infinity against its defining integral,
    (e) the Laplace transform and its partial sum against defining series.

    Never raises on a failed check; inspect the returned report.
    """
    lam = params.lam
    checks: list[IdentityCheck] = []

    g = gini_population(params, spec)
    characterization = 2.0 * prob_less(params, spec) - 1.0 + prob_equal(params)
    checks.append(IdentityCheck("population_vs_characterization", g, characterization, 1e-10))

    assembled = expected_gini(params, n, spec)
    decomposed = (
        n
        * mean(params)
        * (2.0 * r1(params, n, spec) - r_infinity(params, n) + expected_g_diag(params, n, spec))
    )
    checks.append(IdentityCheck("expectation_vs_decomposition", assembled, decomposed, 1e-10))

    checks.append(
        IdentityCheck(
            "r1_bessel_vs_marcum",
            r1(params, n, spec),
            r1_via_marcum(params, n, spec),
            1e-8,
        )
    )

    checks.append(
        IdentityCheck(
            "r_infinity_closed_vs_integral",
            r_infinity(params, n),
            _r_infinity_numeric(params, n, spec),
            1e-9,
        )
    )

    kmax = default_kmax(params, tail=1e-16) + 5
    worst = None
    for x in _PROBE_X:
        check = IdentityCheck(
            "laplace_vs_series",
            laplace_transform(params, x),
            _laplace_series(params, x, kmax),
            1e-12,
        )
        if worst is None or check.residual > worst.residual:
            worst = check
    checks.append(worst)

    worst = None
    for x in _PROBE_X:
        for xstar in _PROBE_XSTAR:
            check = IdentityCheck(
                "partial_laplace_vs_series",
                h_function(params, x, xstar),
                _partial_laplace_series(params, x, xstar, kmax),
                1e-12,
            )
            if worst is None or check.residual > worst.residual:
                worst = check
    checks.append(worst)

    return IdentityReport(lam=lam, n=n, checks=tuple(checks))


GOLDEN_COLUMNS = ("quantity", "lambda", "n", "value", "tail", "kmax")

_GOLDEN_POPULATION_RATES = (0.1, 0.5, 1.0, 2.0, 5.0)
_GOLDEN_EXPECTATION_RATES = (0.5, 1.0, 2.0)
_GOLDEN_EXPECTATION_SIZES = (2, 3)


def generate_golden() -> list[dict[str, str]]:
    """Recompute every golden-fixture row from the oracles."""
    rows: list[dict[str, str]] = []
    for lam in _GOLDEN_POPULATION_RATES:
        params = ZtpParams(lam)
        value = gini_population_bruteforce(params, tail=DEFAULT_TAIL)
        rows.append(
            {
                "quantity": "gini_population",
                "lambda": repr(lam),
                "n": "",
                "value": repr(value),
                "tail": repr(DEFAULT_TAIL),
                "kmax": "",
            }
        )
    for lam in _GOLDEN_EXPECTATION_RATES:
        params = ZtpParams(lam)
        kmax = default_kmax(params)
        for n in _GOLDEN_EXPECTATION_SIZES:
            value = expected_gini_enumeration(params, n, kmax=kmax)
            rows.append(
                {
                    "quantity": "expected_gini",
                    "lambda": repr(lam),
                    "n": str(n),
                    "value": repr(value),
                    "tail": "",
                    "kmax": str(kmax),
                }
            )
    return rows


def write_golden(path: str) -> int:
    """Write the golden fixture CSV; returns the number of data rows."""
    rows = generate_golden()
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=GOLDEN_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return len(rows)


def load_golden() -> list[dict[str, str]]:
    """Read the packaged golden fixture."""
    from importlib import resources

    ref = resources.files("ztpgini").joinpath("data/oracle_golden.csv")
    with ref.open("r", newline="") as fh:
        return list(csv.DictReader(fh))


def _main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="python -m ztpgini.oracles",
        description="Regenerate the golden oracle fixture CSV.",
    )
    parser.add_argument(
        "--write",
        metavar="PATH",
        default="oracle_golden.csv",
        help="output path (default: ./oracle_golden.csv)",
    )
    args = parser.parse_args(argv)
    count = write_golden(args.write)
    print(f"wrote {count} oracle rows to {args.write}")
    return 0


if __name__ == "__main__":
    sys.exit(_main())
