"""Multiplicity entropy, the entropy functional, and its gamma stationary point."""

import math

import numpy as np
import pytest

from gammakinetics.entropy import (
    ConstraintSet,
    DiscretizedDensity,
    canonical_occupancy,
    discretized_gamma,
    effective_entropy,
    gamma_entropy_reference,
    graded_grid,
    hypersphere_surface,
    maxwell_boltzmann_check,
    multinomial_entropy,
    stationarity_check,
    trapezoid_weights,
)
from gammakinetics.errors import ConfigurationError, DomainError
from gammakinetics.stats import GammaParams, gamma_pdf


def _round_to_total(fractions: np.ndarray, total: int) -> np.ndarray:
    """Largest-remainder rounding of fractional occupancies to an exact sum."""
    raw = fractions * total
    base = np.floor(raw).astype(np.int64)
    short = total - int(base.sum())
    order = np.argsort(-(raw - base))
    base[order[:short]] += 1
    return base


class TestConstraintSet:
    def test_defaults_and_validation(self):
        c = ConstraintSet()
        assert c.normalization == 1.0 and c.mean == 1.0
        with pytest.raises(DomainError):
            ConstraintSet(normalization=0.0)
        with pytest.raises(DomainError):
            ConstraintSet(mean=-1.0)


class TestDiscretizedDensity:
    def test_integral_and_mean(self):
        # triangular density on [0, 2]: f(x) = x/2 up to 1 ... use a dense
        # grid of the exponential instead, renormalized by construction
        grid = graded_grid(30.0, 2000)
        vals = np.exp(-grid)
        w = trapezoid_weights(grid)
        vals = vals / float(np.dot(w, vals))
        dens = DiscretizedDensity(grid=grid, values=vals)
        assert dens.integral() == pytest.approx(1.0, abs=1e-13)
        assert dens.mean() == pytest.approx(1.0, abs=1e-5)

    def test_validation(self):
        good = np.linspace(0.0, 1.0, 11)
        flat = np.full(11, 1.0)
        DiscretizedDensity(grid=good, values=flat)
        with pytest.raises(DomainError):
            DiscretizedDensity(grid=np.array([0.0, 1.0]), values=np.array([1.0, 1.0]))
        with pytest.raises(DomainError):
            DiscretizedDensity(grid=good - 0.5, values=flat)
        with pytest.raises(DomainError):
            DiscretizedDensity(grid=good[::-1].copy(), values=flat)
        with pytest.raises(DomainError):
            DiscretizedDensity(grid=good, values=flat[:5])
        with pytest.raises(DomainError):
            DiscretizedDensity(grid=good, values=-flat)
        with pytest.raises(DomainError):
            DiscretizedDensity(grid=good, values=2.0 * flat)  # integrates to 2


class TestGrids:
    def test_trapezoid_weights_uniform(self):
        w = trapezoid_weights(np.array([0.0, 1.0, 2.0, 3.0]))
        assert np.allclose(w, [0.5, 1.0, 1.0, 0.5])
        assert w.sum() == pytest.approx(3.0, rel=1e-15)

    def test_trapezoid_weights_nonuniform(self):
        grid = np.array([0.0, 1.0, 4.0])
        w = trapezoid_weights(grid)
        assert np.allclose(w, [0.5, 2.0, 1.5])
        # integrates linear functions exactly
        assert float(np.dot(w, 2.0 * grid + 1.0)) == pytest.approx(20.0, rel=1e-15)

    def test_graded_grid(self):
        g = graded_grid(9.0, 101)
        assert g[0] == 0.0 and g[-1] == 9.0
        assert np.all(np.diff(g) > 0.0)
        # quadratic grading: node k sits at x_max (k/(n-1))^2
        assert g[50] == pytest.approx(9.0 * 0.25, rel=1e-14)
        open_g = graded_grid(9.0, 101, include_zero=False)
        assert open_g[0] > 0.0 and open_g[-1] == 9.0
        with pytest.raises(DomainError):
            graded_grid(0.0, 100)
        with pytest.raises(DomainError):
            graded_grid(1.0, 2)


class TestDiscretizedGamma:
    @pytest.mark.parametrize("dimension,rate", [(2.0, 1.0), (3.0, 1.0), (6.0, 2.0)])
    def test_normalized_with_correct_mean(self, dimension, rate):
        dens = discretized_gamma(dimension, rate)
        assert dens.integral() == pytest.approx(1.0, abs=1e-13)
        # trapezoid bias at the default resolution peaks near 2e-6 at N = 2
        assert dens.mean() == pytest.approx(0.5 * dimension / rate, abs=5e-6)

    def test_singular_shape_starts_off_zero(self):
        dens = discretized_gamma(1.0)
        assert dens.grid[0] > 0.0
        assert dens.integral() == pytest.approx(1.0, abs=1e-13)

    def test_validation(self):
        with pytest.raises(DomainError):
            discretized_gamma(0.5)
        with pytest.raises(DomainError):
            discretized_gamma(3.0, rate=0.0)


class TestMultinomialEntropy:
    def test_base_cases(self):
        assert multinomial_entropy([7]) == pytest.approx(0.0, abs=1e-12)
        assert multinomial_entropy([0, 5, 0]) == pytest.approx(0.0, abs=1e-12)
        assert multinomial_entropy([1, 1]) == pytest.approx(math.log(2.0), rel=1e-12)
        # ln C(4, 2) = ln 6
        assert multinomial_entropy([2, 2]) == pytest.approx(math.log(6.0), rel=1e-12)

    def test_permutation_invariance(self):
        assert multinomial_entropy([3, 1, 5]) == multinomial_entropy([5, 3, 1])

    def test_uniform_occupation_is_maximal(self):
        w_uniform = multinomial_entropy([4, 4, 4])
        assert w_uniform > multinomial_entropy([6, 3, 3])
        assert w_uniform > multinomial_entropy([10, 1, 1])
        assert w_uniform > multinomial_entropy([12, 0, 0])

    def test_float_integral_values_accepted(self):
        assert multinomial_entropy([2.0, 3.0]) == multinomial_entropy([2, 3])
        with pytest.raises(DomainError):
            multinomial_entropy([2.5, 3.0])

    def test_shannon_limit(self):
        total = 10_000
        levels = 0.2 * np.arange(10)
        p = canonical_occupancy(levels, beta=1.0)
        occ = _round_to_total(p, total)
        frac = occ / total
        shannon = -float(np.sum(frac[frac > 0.0] * np.log(frac[frac > 0.0])))
        per_unit = multinomial_entropy(occ) / total
        assert abs(per_unit - shannon) / shannon < 0.01

    def test_errors(self):
        with pytest.raises(DomainError):
            multinomial_entropy([])
        with pytest.raises(DomainError):
            multinomial_entropy([-1, 2])
        with pytest.raises(DomainError):
            multinomial_entropy([0, 0])


class TestCanonicalOccupancy:
    def test_two_level_example(self):
        p = canonical_occupancy([0.0, math.log(2.0)], beta=1.0)
        assert np.allclose(p, [2.0 / 3.0, 1.0 / 3.0], atol=1e-15)

    def test_zero_beta_is_uniform(self):
        p = canonical_occupancy([0.0, 1.0, 5.0, 9.0], beta=0.0)
        assert np.allclose(p, 0.25, atol=1e-15)

    def test_shift_invariance(self):
        levels = np.array([0.3, 1.1, 2.9])
        a = canonical_occupancy(levels, beta=1.7)
        b = canonical_occupancy(levels + 100.0, beta=1.7)
        assert np.allclose(a, b, rtol=1e-12, atol=0.0)

    def test_monotone_in_level(self):
        p = canonical_occupancy(np.arange(6.0), beta=0.8)
        assert np.all(np.diff(p) < 0.0)
        assert p.sum() == pytest.approx(1.0, rel=1e-15)

    def test_errors(self):
        with pytest.raises(DomainError):
            canonical_occupancy([], beta=1.0)
        with pytest.raises(DomainError):
            canonical_occupancy([0.0, np.inf], beta=1.0)
        with pytest.raises(DomainError):
            canonical_occupancy([0.0, 1.0], beta=-0.1)


class TestHypersphereSurface:
    def test_known_values(self):
        assert hypersphere_surface(1) == pytest.approx(2.0, rel=1e-13)
        assert hypersphere_surface(2) == pytest.approx(2.0 * math.pi, rel=1e-13)
        assert hypersphere_surface(3) == pytest.approx(4.0 * math.pi, rel=1e-13)

    def test_recursion(self):
        # sigma(N + 2) = 2 pi sigma(N) / N
        for n in range(1, 41):
            lhs = hypersphere_surface(n + 2)
            rhs = 2.0 * math.pi * hypersphere_surface(n) / n
            assert abs(lhs - rhs) <= 1e-12 * rhs

    def test_domain(self):
        with pytest.raises(DomainError):
            hypersphere_surface(0)


class TestEffectiveEntropy:
    @pytest.mark.parametrize("dimension", [2.0, 3.0, 6.0, 8.0])
    @pytest.mark.parametrize("rate", [0.7, 1.0, 2.0])
    def test_matches_closed_form_at_gamma(self, dimension, rate):
        # a fine grid: the N = 2 integrand carries the largest trapezoid bias
        dens = discretized_gamma(dimension, rate, nodes=4000)
        s = effective_entropy(dens, dimension, rate)
        assert abs(s - gamma_entropy_reference(dimension, rate)) < 1e-6

    def test_multiplier_shifts_linearly(self):
        dens = discretized_gamma(3.0, 1.0)
        s0 = effective_entropy(dens, 3.0, 1.0, mu=0.0)
        s2 = effective_entropy(dens, 3.0, 1.0, mu=2.0)
        # the mu term integrates to mu times the total mass
        assert s2 - s0 == pytest.approx(2.0 * dens.integral(), abs=1e-12)

    def test_pointwise_integrand_identity(self):
        # ln(f / (sigma x^(N/2-1))) = (N/2) ln b - ln sigma - ln Gamma(N/2) - b x
        dimension, rate = 3.0, 1.3
        shape = 0.5 * dimension
        sigma = hypersphere_surface(3)
        xs = np.linspace(0.1, 8.0, 50)
        f = gamma_pdf(xs, GammaParams(shape=shape, rate=rate))
        lhs = np.log(f) - (shape - 1.0) * np.log(xs) - math.log(sigma)
        k = shape * math.log(rate) - math.log(sigma) - math.lgamma(shape)
        assert np.max(np.abs(lhs - (k - rate * xs))) < 1e-10

    def test_grid_refinement_converges(self):
        coarse = effective_entropy(discretized_gamma(3.0, 1.0, nodes=2000), 3.0, 1.0)
        fine = effective_entropy(discretized_gamma(3.0, 1.0, nodes=4000), 3.0, 1.0)
        assert abs(coarse - fine) < 1e-6

    def test_origin_node_with_mismatched_exponent(self):
        # a density that is finite at x = 0 evaluated with N != 2 exercises
        # the open-ended first panel; the result must stay finite
        dens = discretized_gamma(2.0, 1.0)  # exponential, f(0) = 1
        s = effective_entropy(dens, 3.0, 1.0)
        assert math.isfinite(s)

    def test_validation(self):
        dens = discretized_gamma(3.0, 1.0)
        with pytest.raises(DomainError):
            effective_entropy(dens, 0.5, 1.0)
        with pytest.raises(DomainError):
            effective_entropy(dens, 3.0, 0.0)
        with pytest.raises(DomainError):
            gamma_entropy_reference(0.5, 1.0)


class TestRadialChain:
    @pytest.mark.parametrize("dimension", [2, 3, 5])
    def test_gamma_from_gaussian_weight(self, dimension):
        # N-dimensional Gaussian -> radial density -> energy density
        rate = 1.0
        xs = np.linspace(0.01, 12.0, 300)
        q = np.sqrt(2.0 * xs)
        f_n = (rate / (2.0 * math.pi)) ** (0.5 * dimension) * np.exp(-0.5 * rate * q * q)
        f_1 = hypersphere_surface(dimension) * q ** (dimension - 1.0) * f_n
        f_x = f_1 / q
        expected = gamma_pdf(xs, GammaParams(shape=0.5 * dimension, rate=rate))
        assert np.max(np.abs(f_x - expected)) < 1e-10


class TestStationarity:
    @pytest.mark.parametrize("dimension", [2.0, 3.0])
    def test_margins_nonnegative(self, dimension):
        report = stationarity_check(dimension, trials=40, seed=5)
        assert report.margins.shape == (40,)
        assert report.min_margin >= -1e-10
        assert report.trials == 40
        assert report.dimension == dimension

    def test_quadratic_amplitude_scaling(self):
        big = stationarity_check(3.0, trials=50, amplitude=1e-2, seed=11)
        small = stationarity_check(3.0, trials=50, amplitude=5e-3, seed=11)
        ratio = big.mean_margin / small.mean_margin
        assert 3.2 < ratio < 4.8

    def test_margins_are_second_order_small(self):
        report = stationarity_check(4.0, trials=20, amplitude=1e-3, seed=7)
        assert report.min_margin >= -1e-10
        assert report.mean_margin < 1e-4

    def test_errors(self):
        with pytest.raises(ConfigurationError):
            stationarity_check(3.0, trials=9)
        with pytest.raises(ConfigurationError):
            stationarity_check(3.0, amplitude=0.0)
        with pytest.raises(ConfigurationError):
            stationarity_check(3.0, amplitude=0.02)


class TestMaxwellBoltzmann:
    def test_pointwise_identity(self):
        for rate in (0.5, 1.0, 3.0):
            report = maxwell_boltzmann_check(rate=rate)
            assert report.max_abs_error <= 1e-10

    def test_frozen_density_value(self):
        # f(1) = 2 e^(-1) / sqrt(pi) at beta = 1
        val = gamma_pdf(1.0, GammaParams(shape=1.5, rate=1.0))
        assert val == pytest.approx(0.4151074974205948, abs=1e-15)
        assert val == pytest.approx(2.0 * math.exp(-1.0) / math.sqrt(math.pi), rel=1e-14)

    def test_quadrature_mean_matches_equipartition(self):
        for rate in (0.5, 1.0, 3.0):
            report = maxwell_boltzmann_check(rate=rate)
            assert report.expected_mean == 1.5 / rate
            assert abs(report.quadrature_mean - report.expected_mean) < 1e-10

    def test_errors(self):
        with pytest.raises(DomainError):
            maxwell_boltzmann_check(rate=0.0)
        with pytest.raises(DomainError):
            maxwell_boltzmann_check(points=1)
