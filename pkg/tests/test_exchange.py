"""Trade rules, the saving <-> dimension mapping, and the exchange loop."""

import numpy as np
import pytest

from gammakinetics.errors import ConfigurationError, DomainError
from gammakinetics.exchange import (
    ExchangeParams,
    WealthEnsemble,
    effective_dimension,
    effective_temperature,
    mean_exchanged_fraction,
    reshuffle_trade,
    run_exchange,
    sample_equilibrium,
    saving_of_dimension,
    saving_trade,
)
from gammakinetics.rng import Xoshiro256PP
from gammakinetics.stats import fit_gamma_moments


class TestTradeRules:
    def test_reshuffle_even_split(self):
        assert reshuffle_trade(1.0, 1.0, 0.5) == (1.0, 1.0)

    def test_reshuffle_uneven_split(self):
        assert reshuffle_trade(2.0, 0.0, 0.25) == (0.5, 1.5)

    def test_saving_degenerate_split(self):
        # eps = 0 hands the whole pool to the second agent
        assert saving_trade(2.0, 0.0, 0.5, 0.0) == (1.0, 1.0)

    def test_saving_symmetric_fixed_point(self):
        assert saving_trade(1.0, 1.0, 0.5, 0.5) == (1.0, 1.0)

    def test_conservation_per_trade(self):
        rng = np.random.default_rng(7)
        for _ in range(2000):
            xi, xj = rng.uniform(0.0, 10.0, size=2)
            eps = rng.uniform(1e-9, 1.0 - 1e-9)
            s = rng.uniform(0.0, 0.999)
            a, b = saving_trade(xi, xj, s, eps)
            assert a + b == pytest.approx(xi + xj, rel=1e-15)
            c, d = reshuffle_trade(xi, xj, eps)
            assert c + d == pytest.approx(xi + xj, rel=1e-15)

    def test_zero_saving_reduces_to_reshuffle_bitwise(self):
        rng = np.random.default_rng(11)
        for _ in range(500):
            xi, xj = rng.uniform(0.0, 5.0, size=2)
            eps = rng.uniform(1e-6, 1.0 - 1e-6)
            assert saving_trade(xi, xj, 0.0, eps) == reshuffle_trade(xi, xj, eps)

    def test_saving_floor_and_nonnegativity(self):
        rng = np.random.default_rng(13)
        for _ in range(2000):
            xi, xj = rng.uniform(0.0, 10.0, size=2)
            eps = rng.uniform(0.0, 1.0)
            s = rng.uniform(0.0, 0.999)
            a, b = saving_trade(xi, xj, s, eps)
            assert a >= s * xi - 1e-15 * xi
            assert b >= s * xj - 1e-15 * xj
            assert a >= 0.0 and b >= 0.0

    def test_reshuffle_rejects_boundary_eps(self):
        for eps in (0.0, 1.0, -0.1, 1.1):
            with pytest.raises(DomainError):
                reshuffle_trade(1.0, 1.0, eps)

    def test_saving_accepts_boundary_eps_rejects_outside(self):
        assert saving_trade(1.0, 1.0, 0.2, 0.0)[0] + saving_trade(1.0, 1.0, 0.2, 0.0)[1] == 2.0
        saving_trade(1.0, 1.0, 0.2, 1.0)
        for eps in (-1e-9, 1.0 + 1e-9):
            with pytest.raises(DomainError):
                saving_trade(1.0, 1.0, 0.2, eps)

    def test_trade_domain_errors(self):
        with pytest.raises(DomainError):
            reshuffle_trade(-1.0, 1.0, 0.5)
        with pytest.raises(DomainError):
            saving_trade(1.0, -1.0, 0.5, 0.5)
        for s in (-0.1, 1.0, 1.5):
            with pytest.raises(DomainError):
                saving_trade(1.0, 1.0, s, 0.5)


class TestDimensionMapping:
    def test_effective_dimension_values(self):
        assert effective_dimension(0.0) == 1.0
        assert effective_dimension(0.5) == pytest.approx(4.0, rel=1e-15)
        assert effective_dimension(0.9) == pytest.approx(28.0, rel=1e-12)

    def test_effective_dimension_identity_form(self):
        # (1 + 2s)/(1 - s) = 1 + 3s/(1 - s)
        for s in (0.0, 0.1, 0.3, 0.7, 0.99):
            assert effective_dimension(s) == pytest.approx(1.0 + 3.0 * s / (1.0 - s), rel=1e-14)

    def test_effective_dimension_domain(self):
        for s in (1.0, -0.1, 1.5):
            with pytest.raises(DomainError):
                effective_dimension(s)

    def test_saving_of_dimension_values(self):
        assert saving_of_dimension(2.0) == 0.0
        assert saving_of_dimension(8.0) == pytest.approx(0.5, rel=1e-15)

    def test_round_trip_through_full_dimension(self):
        for s in (0.0, 0.3, 0.5, 0.9, 0.99):
            n_full = 2.0 * effective_dimension(s)
            assert saving_of_dimension(n_full) == pytest.approx(s, abs=1e-12)

    def test_saving_of_dimension_domain(self):
        with pytest.raises(DomainError):
            saving_of_dimension(1.9)

    def test_effective_temperature(self):
        assert effective_temperature(1.0, 2.0) == 1.0
        assert effective_temperature(1.0, 8.0) == 0.25
        with pytest.raises(DomainError):
            effective_temperature(0.0, 2.0)
        with pytest.raises(DomainError):
            effective_temperature(-1.0, 2.0)
        with pytest.raises(DomainError):
            effective_temperature(1.0, 1.5)

    def test_mean_exchanged_fraction(self):
        assert mean_exchanged_fraction(0.0) == 0.5
        assert mean_exchanged_fraction(0.5) == 0.25
        # in dimension terms: (1 - s)/2 = 3/(N + 4) with N = 2 n(s)
        for s in (0.0, 0.2, 0.5, 0.8):
            n_full = 2.0 * effective_dimension(s)
            assert mean_exchanged_fraction(s) == pytest.approx(3.0 / (n_full + 4.0), rel=1e-13)
        with pytest.raises(DomainError):
            mean_exchanged_fraction(1.0)


class TestParamsAndEnsemble:
    def test_params_validation(self):
        ExchangeParams(saving=0.0, trades=0, seed=1)
        with pytest.raises(DomainError):
            ExchangeParams(saving=1.0, trades=1, seed=1)
        with pytest.raises(ConfigurationError):
            ExchangeParams(saving=0.5, trades=-1, seed=1)
        with pytest.raises(ConfigurationError):
            ExchangeParams(saving=0.5, trades=1, seed=1, stream=-1)

    def test_ensemble_validation(self):
        with pytest.raises(DomainError):
            WealthEnsemble(np.array([1.0]))
        with pytest.raises(DomainError):
            WealthEnsemble(np.array([1.0, -0.5]))
        with pytest.raises(DomainError):
            WealthEnsemble(np.ones((2, 2)))
        with pytest.raises(DomainError):
            WealthEnsemble.equal(1)

    def test_ensemble_copies_input(self):
        src = np.array([1.0, 2.0, 3.0])
        ens = WealthEnsemble(src)
        src[0] = 99.0
        assert ens.wealths[0] == 1.0

    def test_ensemble_totals(self):
        ens = WealthEnsemble.equal(10, wealth=2.0)
        assert ens.agents == 10
        assert ens.total == 20.0
        assert ens.mean == 2.0


class TestExchangeLoop:
    def test_single_trade_matches_direct_rule(self):
        # M = 2, trades = 1: replay the kernel's own draws with the mirror
        # generator and apply the trade rule by hand.
        for seed, stream, saving in ((3, 0, 0.0), (3, 1, 0.5), (17, 2, 0.8)):
            mirror = Xoshiro256PP(seed, stream)
            i, j = mirror.pair_indices(2)
            eps = mirror.uniform_open()
            start = np.array([3.0, 1.0])
            expected = list(start)
            expected[i], expected[j] = saving_trade(start[i], start[j], saving, eps)
            out = run_exchange(
                WealthEnsemble(start), ExchangeParams(saving=saving, trades=1, seed=seed, stream=stream)
            )
            assert out.wealths.tolist() == expected

    def test_conservation_over_many_trades(self):
        ens = WealthEnsemble.equal(100)
        out = run_exchange(ens, ExchangeParams(saving=0.3, trades=1_000_000, seed=5))
        assert abs(out.total - ens.total) <= 1e-9 * ens.total

    def test_determinism(self):
        ens = WealthEnsemble.equal(50)
        params = ExchangeParams(saving=0.2, trades=10_000, seed=42, stream=3)
        a = run_exchange(ens, params)
        b = run_exchange(ens, params)
        assert np.array_equal(a.wealths, b.wealths)

    def test_streams_differ(self):
        ens = WealthEnsemble.equal(50)
        a = run_exchange(ens, ExchangeParams(saving=0.2, trades=10_000, seed=42, stream=0))
        b = run_exchange(ens, ExchangeParams(saving=0.2, trades=10_000, seed=42, stream=1))
        assert not np.array_equal(a.wealths, b.wealths)

    def test_zero_trades_is_identity(self):
        ens = WealthEnsemble(np.array([1.0, 2.0, 3.0]))
        out = run_exchange(ens, ExchangeParams(saving=0.5, trades=0, seed=1))
        assert np.array_equal(out.wealths, ens.wealths)


class TestSampleEquilibrium:
    def test_snapshot_count_and_metadata(self):
        ens = WealthEnsemble.equal(10)
        params = ExchangeParams(saving=0.0, trades=1000, seed=9)
        samples = sample_equilibrium(ens, params)
        # default discard 500, every 10 -> 50 snapshots of 10 agents
        assert samples.snapshots == 50
        assert samples.values.shape == (500,)
        assert samples.agents == 10
        assert samples.final.shape == (10,)
        assert samples.final.sum() == pytest.approx(10.0, rel=1e-12)

    def test_explicit_protocol(self):
        ens = WealthEnsemble.equal(4)
        params = ExchangeParams(saving=0.0, trades=100, seed=9)
        samples = sample_equilibrium(ens, params, discard=20, every=16)
        assert samples.snapshots == 5
        assert samples.values.shape == (20,)

    def test_protocol_errors(self):
        ens = WealthEnsemble.equal(4)
        params = ExchangeParams(saving=0.0, trades=100, seed=9)
        with pytest.raises(ConfigurationError):
            sample_equilibrium(ens, params, discard=-1)
        with pytest.raises(ConfigurationError):
            sample_equilibrium(ens, params, discard=101)
        with pytest.raises(ConfigurationError):
            sample_equilibrium(ens, params, every=0)
        with pytest.raises(ConfigurationError):
            sample_equilibrium(ens, params, discard=90, every=50)

    def test_equilibrium_shape_moderate_run(self):
        # Small-scale version of the acceptance check: lambda = 0.5 should
        # give a fitted shape near 4.
        ens = WealthEnsemble.equal(200)
        params = ExchangeParams(saving=0.5, trades=400_000, seed=21)
        samples = sample_equilibrium(ens, params)
        fitted = fit_gamma_moments(samples.values)
        assert fitted.shape == pytest.approx(4.0, rel=0.10)
        assert samples.values.min() >= 0.0
