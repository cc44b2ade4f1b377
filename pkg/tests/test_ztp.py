"""Zero-truncated Poisson layer: pmf/cdf/moments, sampling, rate MLE.

Frozen constants are mpmath values at 40 digits.
"""

import math

import numpy as np
import pytest

from ztpgini.ztp import (
    DEGENERATE_RATE,
    MleResult,
    Sample,
    ZtpParams,
    cdf,
    h_function,
    laplace_transform,
    log_pmf,
    mean,
    mle,
    pmf,
    sample,
    size_biased_pmf,
    solve_rate_for_mean,
)


def test_params_validation():
    assert ZtpParams(2.5).lam == 2.5
    with pytest.raises(ValueError):
        ZtpParams(0.0)
    with pytest.raises(ValueError):
        ZtpParams(-1.0)
    with pytest.raises(ValueError):
        ZtpParams(math.inf)


# --------------------------------------------------------------------- pmf


def test_pmf_values():
    p1 = ZtpParams(1.0)
    assert math.isclose(pmf(p1, 1), 0.58197670686932642, rel_tol=1e-14)
    assert math.isclose(pmf(p1, 2), 0.29098835343466321, rel_tol=1e-14)
    assert math.isclose(pmf(ZtpParams(0.1), 1), 0.95083319447750496, rel_tol=1e-14)


def test_pmf_sums_to_one():
    for lam in (0.1, 1.0, 2.0, 5.0):
        params = ZtpParams(lam)
        total = sum(pmf(params, k) for k in range(1, 80))
        assert abs(total - 1.0) <= 1e-12


def test_pmf_ratio_recursion():
    params = ZtpParams(1.7)
    for k in range(1, 20):
        assert math.isclose(pmf(params, k + 1), pmf(params, k) * 1.7 / (k + 1), rel_tol=1e-13)


def test_log_pmf_consistent_with_pmf():
    params = ZtpParams(0.5)
    for k in (1, 2, 7, 40):
        assert math.isclose(math.exp(log_pmf(params, k)), pmf(params, k), rel_tol=1e-14)


def test_pmf_rejects_bad_counts():
    params = ZtpParams(1.0)
    with pytest.raises(ValueError):
        pmf(params, 0)
    with pytest.raises(TypeError):
        pmf(params, 1.5)
    # integral floats pass through
    assert pmf(params, 2.0) == pmf(params, 2)


# --------------------------------------------------------------------- cdf


def test_cdf_values_and_steps():
    params = ZtpParams(1.0)
    assert cdf(params, 0.0) == 0.0
    assert cdf(params, 0.999) == 0.0
    assert cdf(params, math.inf) == 1.0
    assert math.isclose(cdf(params, 2.7), 0.87296506030398964, rel_tol=1e-14)
    # constant between integers
    assert cdf(params, 2.0) == cdf(params, 2.999)


def test_cdf_matches_cumulative_pmf():
    for lam in (0.1, 1.0, 3.0):
        params = ZtpParams(lam)
        running = 0.0
        for k in range(1, 25):
            running += pmf(params, k)
            assert abs(cdf(params, k) - running) <= 1e-14


def test_cdf_rejects_nan():
    with pytest.raises(ValueError):
        cdf(ZtpParams(1.0), math.nan)


# ------------------------------------------------------------------ moments


def test_mean_values():
    assert math.isclose(mean(ZtpParams(1.0)), 1.5819767068693264, rel_tol=1e-14)
    assert math.isclose(mean(ZtpParams(2.0)), 2.3130352854993313, rel_tol=1e-14)


def test_mean_small_rate_expansion():
    # below the switch the Taylor development takes over; it must join the
    # closed form smoothly and stay above 1
    lam = 1e-8
    assert math.isclose(mean(ZtpParams(lam)), 1.0 + lam / 2.0 + lam * lam / 12.0, rel_tol=1e-15)
    assert math.isclose(mean(ZtpParams(2e-6)), mean(ZtpParams(1.999e-6)), rel_tol=1e-9)
    assert mean(ZtpParams(1e-12)) > 1.0


def test_mean_monotone_in_rate():
    rates = (0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0)
    values = [mean(ZtpParams(lam)) for lam in rates]
    assert all(a < b for a, b in zip(values, values[1:]))


def test_size_biased_pmf_is_reweighted_pmf():
    for lam in (0.3, 1.0, 4.0):
        params = ZtpParams(lam)
        mu = mean(params)
        for k in (1, 2, 3, 9):
            assert math.isclose(size_biased_pmf(params, k), k * pmf(params, k) / mu, rel_tol=1e-13)


def test_size_biased_pmf_values():
    p1 = ZtpParams(1.0)
    # shifted Poisson form: e^-1 at k=1, e^-1/2 at k=3
    assert math.isclose(size_biased_pmf(p1, 1), 0.36787944117144232, rel_tol=1e-14)
    assert math.isclose(size_biased_pmf(p1, 3), 0.18393972058572116, rel_tol=1e-14)


# --------------------------------------------------------- laplace / partial


def test_laplace_transform_value():
    assert math.isclose(
        laplace_transform(ZtpParams(1.0), math.log(2.0)), 0.37754066879814544, rel_tol=1e-14
    )


def test_laplace_transform_matches_series():
    for lam in (0.2, 1.0, 3.0):
        params = ZtpParams(lam)
        for x in (0.05, 0.7, 2.0):
            series = sum(math.exp(-x * k) * pmf(params, k) for k in range(1, 120))
            assert math.isclose(laplace_transform(params, x), series, rel_tol=1e-12)


def test_laplace_transform_validation():
    with pytest.raises(ValueError):
        laplace_transform(ZtpParams(1.0), 0.0)
    with pytest.raises(ValueError):
        laplace_transform(ZtpParams(1.0), -1.0)


def test_h_function_values():
    p1 = ZtpParams(1.0)
    assert h_function(p1, 0.25, 1) == 0.0
    # xstar=2 keeps only the k=1 term, e^(-x) pmf(1)
    assert math.isclose(h_function(p1, math.log(2.0), 2), 0.29098835343466321, rel_tol=1e-13)


def test_h_function_matches_partial_series():
    for lam in (0.2, 1.0, 3.0):
        params = ZtpParams(lam)
        for x in (0.1, 0.9):
            for xstar in (1, 2, 3, 6, 15):
                series = sum(math.exp(-x * k) * pmf(params, k) for k in range(1, xstar))
                assert abs(h_function(params, x, xstar) - series) <= 1e-13


def test_h_function_approaches_full_transform():
    params = ZtpParams(2.0)
    x = 0.4
    assert abs(h_function(params, x, 90) - laplace_transform(params, x)) <= 1e-15


def test_h_function_validation():
    with pytest.raises(ValueError):
        h_function(ZtpParams(1.0), -0.5, 2)
    with pytest.raises(ValueError):
        h_function(ZtpParams(1.0), 0.5, 0)


# ------------------------------------------------------------------ Sample


def test_sample_container_basics():
    s = Sample([3, 1, 2])
    assert s.n == 3
    assert len(s) == 3
    assert s.total() == 6
    assert "n=3" in repr(s)
    assert s.values.dtype == np.int64


def test_sample_container_accepts_integral_floats():
    assert Sample([1.0, 4.0]).total() == 5


def test_sample_container_rejects_bad_input():
    with pytest.raises(ValueError):
        Sample([])
    with pytest.raises(ValueError):
        Sample([1, 0, 2])
    with pytest.raises(TypeError):
        Sample([1.5, 2.0])
    with pytest.raises(TypeError):
        Sample([[1, 2], [3, 4]])


def test_sample_container_is_read_only():
    s = Sample([1, 2])
    with pytest.raises(ValueError):
        s.values[0] = 9


# ---------------------------------------------------------------- sampling


def _scalar_reference_draws(lam: float, n: int, seed: int) -> np.ndarray:
    """Sequential inverse-cdf search, one uniform per draw."""
    rng = np.random.default_rng(seed)
    u = rng.random(n)
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        k = 1
        p = lam * math.exp(-lam) / (-math.expm1(-lam))
        c = p
        while u[i] >= c:
            k += 1
            p *= lam / k
            c += p
            if p == 0.0:
                break
        out[i] = k
    return out


@pytest.mark.parametrize("lam", [0.1, 1.0, 2.0, 7.5])
def test_sample_matches_scalar_reference(lam):
    seed = 4321
    drawn = sample(ZtpParams(lam), 500, np.random.default_rng(seed))
    reference = _scalar_reference_draws(lam, 500, seed)
    assert np.array_equal(drawn.values, reference)


def test_sample_consumes_exactly_n_uniforms():
    rng_a = np.random.default_rng(99)
    rng_b = np.random.default_rng(99)
    sample(ZtpParams(1.5), 100, rng_a)
    rng_b.random(100)
    assert rng_a.random() == rng_b.random()


def test_sample_support_and_determinism():
    params = ZtpParams(0.7)
    a = sample(params, 50, np.random.default_rng(7)).values
    b = sample(params, 50, np.random.default_rng(7)).values
    assert np.array_equal(a, b)
    assert a.min() >= 1


def test_sample_large_rate_fallback():
    drawn = sample(ZtpParams(600.0), 400, np.random.default_rng(11))
    values = drawn.values
    assert values.min() >= 1
    # CLT band: sd ~ sqrt(600), so the mean of 400 draws sits within ~5 sigma
    assert abs(values.mean() - 600.0) < 6.0


def test_sample_empirical_mean_matches_theory():
    params = ZtpParams(1.0)
    values = sample(params, 200_000, np.random.default_rng(321)).values
    mu = mean(params)
    sd = values.std()
    assert abs(values.mean() - mu) < 4.0 * sd / math.sqrt(values.size)


def test_sample_validation():
    with pytest.raises(ValueError):
        sample(ZtpParams(1.0), 0, np.random.default_rng(0))


# --------------------------------------------------------------------- MLE


def test_solve_rate_for_mean_round_trip():
    for xbar in (1.0001, 4.0 / 3.0, 2.0, 10.0, 50.0):
        lam = solve_rate_for_mean(xbar)
        assert abs(mean(ZtpParams(lam)) - xbar) <= 1e-12 * xbar


def test_solve_rate_for_mean_value():
    assert math.isclose(solve_rate_for_mean(4.0 / 3.0), 0.60585997791900034, rel_tol=1e-12)


def test_solve_rate_for_mean_validation():
    with pytest.raises(ValueError):
        solve_rate_for_mean(1.0)
    with pytest.raises(ValueError):
        solve_rate_for_mean(0.5)


def test_mle_round_trip():
    result = mle(Sample([1, 1, 2]))
    assert isinstance(result, MleResult)
    assert not result.degenerate
    assert math.isclose(result.lam_hat, 0.60585997791900034, rel_tol=1e-12)


def test_mle_degenerate_all_ones():
    result = mle(Sample([1, 1, 1, 1]))
    assert result.degenerate
    assert result.lam_hat == DEGENERATE_RATE


def test_mle_recovers_rate_at_scale():
    values = sample(ZtpParams(1.0), 100_000, np.random.default_rng(555))
    result = mle(values)
    xbar = values.total() / values.n
    # the defining equation is solved essentially exactly...
    assert abs(mean(ZtpParams(result.lam_hat)) - xbar) <= 1e-12 * xbar
    # ...and the estimate sits near the truth at this sample size
    assert abs(result.lam_hat - 1.0) < 0.02


def test_mle_requires_sample_type():
    with pytest.raises(TypeError):
        mle([1, 2, 3])
