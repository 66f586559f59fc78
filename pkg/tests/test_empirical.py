import json
import math

import numpy as np
import pytest
import scipy.integrate
import scipy.stats

from becert import empirical
from becert.constants import UNIVERSAL
from becert.empirical import (LatticeDistribution, MomentProfile,
                              compound_poisson, convolve_power, from_json,
                              kolmogorov_to_normal, limit_cdf, moments,
                              rademacher, standardize, two_point,
                              verify_inequality)
from becert.quadrature import normal_cdf


def test_moments_rademacher():
    m = moments(rademacher())
    assert (m.mu, m.sigma2, m.beta3) == (0.0, 1.0, 1.0)


def test_moments_two_point_closed_form():
    p, q = 0.9, 0.1
    m = moments(two_point(p))
    assert m.mu == pytest.approx(0.0, abs=1e-15)
    assert m.sigma2 == pytest.approx(1.0, rel=1e-14)
    # (p^2 + q^2)/sqrt(p q) for the standardized asymmetric two-point law
    assert m.beta3 == pytest.approx((p * p + q * q) / math.sqrt(p * q), rel=1e-12)
    assert m.beta3 == pytest.approx(0.82 / 0.3, rel=1e-12)


def test_moments_zero_variance_rejected():
    with pytest.raises(ValueError):
        moments(LatticeDistribution([1.0], [1.0]))


def test_moment_profile_lyapunov_floor():
    with pytest.raises(ValueError):
        MomentProfile(0.0, 1.0, 0.5)
    MomentProfile(0.0, 1.0, 1.0)  # boundary admissible


def test_standardize_rademacher_fixed_point():
    d = standardize(rademacher())
    assert np.allclose(d.xs, [-1.0, 1.0])
    assert np.allclose(d.ps, [0.5, 0.5])


def test_standardize_shift_scale():
    d = standardize(LatticeDistribution([0.0, 2.0], [0.5, 0.5]))
    assert np.allclose(d.xs, [-1.0, 1.0])


def test_standardize_idempotent():
    d1 = standardize(two_point(0.7))
    d2 = standardize(d1)
    assert np.allclose(d1.xs, d2.xs)
    assert np.allclose(d1.ps, d2.ps)


def test_convolve_rademacher_two():
    d = convolve_power(rademacher(), 2)
    assert np.allclose(d.xs, [-math.sqrt(2.0), 0.0, math.sqrt(2.0)])
    assert np.allclose(d.ps, [0.25, 0.5, 0.25])


def test_convolve_preserves_standardization():
    for n in (3, 7, 16):
        d = convolve_power(two_point(0.8), n)
        m = moments(d)
        assert m.mu == pytest.approx(0.0, abs=1e-12)
        assert m.sigma2 == pytest.approx(1.0, rel=1e-10)


def test_convolve_rademacher_binomial_pmf():
    d = convolve_power(rademacher(), 20)
    ref = scipy.stats.binom.pmf(np.arange(21), 20, 0.5)
    assert np.allclose(d.ps, ref, rtol=1e-13, atol=0.0)
    assert np.allclose(d.xs, (2.0 * np.arange(21) - 20.0) / math.sqrt(20.0))


def test_convolve_symmetric_input_symmetric_masses():
    d = convolve_power(rademacher(), 9)
    assert np.allclose(d.ps, d.ps[::-1], rtol=0.0, atol=0.0)


def test_convolve_rejects_non_lattice():
    d = LatticeDistribution([0.0, 1.0, math.sqrt(2.0)], [0.25, 0.25, 0.5])
    with pytest.raises(ValueError):
        convolve_power(d, 2)


def test_convolve_rejects_oversized():
    xs = np.arange(2000, dtype=float)
    ps = np.full(2000, 1.0 / 2000.0)
    with pytest.raises(ValueError):
        convolve_power(LatticeDistribution(xs, ps), 1000)


def test_kolmogorov_rademacher_independent_enumeration():
    # oracle: the two-atom CDF by hand; sup attained at x = 1
    rho = kolmogorov_to_normal(rademacher())
    oracle = max(
        abs(0.0 - normal_cdf(-1.0)), abs(0.5 - normal_cdf(-1.0)),
        abs(0.5 - normal_cdf(1.0)), abs(1.0 - normal_cdf(1.0)),
    )
    assert rho == pytest.approx(oracle, abs=1e-15)
    assert rho == pytest.approx(normal_cdf(1.0) - 0.5, abs=1e-15)


def test_kolmogorov_point_mass():
    assert kolmogorov_to_normal(LatticeDistribution([0.0], [1.0])) == pytest.approx(0.5)


def test_kolmogorov_below_universal_bound():
    for d in (rademacher(), two_point(0.9), two_point(0.7),
              convolve_power(rademacher(), 3), convolve_power(two_point(0.6), 5)):
        assert kolmogorov_to_normal(d) <= UNIVERSAL.bhattacharya_bound


def test_kolmogorov_atom_scan_equals_dense_grid():
    rng = np.random.default_rng(11)
    xs = np.sort(rng.uniform(-2.0, 2.0, 6))
    ps = rng.dirichlet(np.ones(6))
    d = LatticeDistribution(xs, ps / np.sum(ps))
    exact = empirical.kolmogorov_distance(d, empirical.normal_cdf_arr)
    grid = np.linspace(-5.0, 5.0, 10 ** 6)
    cdf_vals = np.searchsorted(d.xs, grid, side="left")
    cum = np.concatenate(([0.0], np.cumsum(d.ps)))
    dense = float(np.max(np.abs(cum[cdf_vals] - empirical.normal_cdf_arr(grid))))
    assert dense <= exact + 1e-12
    assert exact <= dense + 1e-5


def test_universal_bounds_hold_for_lattice_family():
    for d in (rademacher(), two_point(0.9)):
        beta3 = moments(d).beta3
        for n in range(1, 21):
            rho = kolmogorov_to_normal(convolve_power(d, n))
            assert rho <= 0.335789 * (beta3 + 0.425) / math.sqrt(n)
            assert rho <= 0.3051 * (beta3 + 1.0) / math.sqrt(n)


def test_verify_inequality_rows():
    rows = verify_inequality(rademacher(), range(1, 21), "theorem2")
    assert len(rows) == 20
    assert all(r["passed"] for r in rows)
    assert rows[0]["distance"] == pytest.approx(normal_cdf(1.0) - 0.5, abs=1e-12)
    assert rows[0]["bound"] == pytest.approx(0.3051 * 2.0)


def test_verify_inequality_classical():
    rows = verify_inequality(rademacher(), [1, 4], ("classical", 0.4785))
    assert rows[0]["bound"] == pytest.approx(0.4785)
    assert all(r["passed"] for r in rows)


def test_verify_inequality_requires_standardized():
    with pytest.raises(ValueError):
        verify_inequality(LatticeDistribution([0.0, 2.0], [0.5, 0.5]),
                          [1], "theorem1")


def test_compound_poisson_small_lambda():
    d = LatticeDistribution([1.0, 3.0], [0.5, 0.5])
    mix, trunc = compound_poisson(d, 0.01)
    prof = moments(d)
    expected_atom = -0.01 * prof.mu / math.sqrt(0.01 * (prof.mu ** 2 + prof.sigma2))
    i = int(np.argmax(mix.ps))
    assert mix.xs[i] == pytest.approx(expected_atom, abs=1e-12)
    assert mix.ps[i] == pytest.approx(math.exp(-0.01), abs=1e-4)


def test_compound_poisson_mass_accounting():
    mix, trunc = compound_poisson(rademacher(), 4.0, tail_tol=1e-10)
    assert trunc <= 1e-10
    assert float(np.sum(mix.ps)) == pytest.approx(1.0 - trunc, abs=1e-12)


def test_compound_poisson_bound_lambda_4():
    mix, trunc = compound_poisson(rademacher(), 4.0, tail_tol=1e-10)
    rho = kolmogorov_to_normal(mix)
    assert rho - trunc <= 0.3051 / 2.0
    assert rho - trunc <= 0.15255


def test_compound_poisson_truncation_stability():
    mix1, t1 = compound_poisson(rademacher(), 4.0, tail_tol=1e-6)
    mix2, t2 = compound_poisson(rademacher(), 4.0, tail_tol=1e-12)
    r1 = kolmogorov_to_normal(mix1)
    r2 = kolmogorov_to_normal(mix2)
    assert abs(r1 - r2) <= t1 + 1e-12


def test_compound_poisson_rejects_bad_lambda():
    with pytest.raises(ValueError):
        compound_poisson(rademacher(), 0.0)


def test_lattice_validation():
    with pytest.raises(ValueError):
        LatticeDistribution([1.0, 0.5], [0.5, 0.5])       # not increasing
    with pytest.raises(ValueError):
        LatticeDistribution([0.0, 1.0], [0.7, 0.4])        # sum != 1
    with pytest.raises(ValueError):
        LatticeDistribution([0.0, 1.0], [-0.1, 1.1])       # negative mass
    with pytest.raises(ValueError):
        LatticeDistribution([], [])


def test_from_json_roundtrip():
    blob = json.dumps({"atoms": [{"x": 1.0, "p": 0.5}, {"x": -1.0, "p": 0.5}]})
    d = from_json(blob)
    assert np.allclose(d.xs, [-1.0, 1.0])


def test_laplace_cdf():
    assert limit_cdf("laplace", 0.0) == pytest.approx(0.5)
    for x in (0.3, 1.0, 2.5):
        assert limit_cdf("laplace", x) + limit_cdf("laplace", -x) == pytest.approx(1.0)


def test_gamma_mixture_r1_matches_laplace():
    for x in np.linspace(-3.0, 3.0, 21):
        mix = limit_cdf("gamma_scale_mixture", float(x), r=1.0)
        assert mix == pytest.approx(limit_cdf("laplace", float(x)), abs=1e-6)


def test_gamma_mixture_against_scipy_oracle():
    # independent quadrature of Phi(x/sqrt(y)) against the gamma density
    for (x, r) in [(0.7, 2.0), (-1.2, 0.8)]:
        dens = scipy.stats.gamma(a=r, scale=1.0 / r).pdf
        ref, _ = scipy.integrate.quad(
            lambda y: dens(y) * normal_cdf(x / math.sqrt(y)), 0.0, np.inf)
        assert limit_cdf("gamma_scale_mixture", x, r=r) == pytest.approx(ref, abs=1e-7)


def test_limit_cdf_unknown_kind():
    with pytest.raises(ValueError):
        limit_cdf("cauchy", 0.0)
