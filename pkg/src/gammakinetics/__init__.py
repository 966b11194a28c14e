"""Kinetic exchange and gas Monte Carlo with gamma-equilibrium analysis.

Pairwise random exchange of a conserved quantity (wealth or kinetic
energy) relaxes to a gamma distribution whose shape is set by the
microscopic rule: a saving propensity in the exchange picture, half the
space dimension in the gas picture. This package simulates both
processes with a deterministic counter-based RNG, fits and tests the
gamma form, computes inequality measures, and checks the variational
characterization of the equilibrium.
"""

from .errors import (
    ConfigurationError,
    DegenerateDistributionError,
    DomainError,
    GammaKineticsError,
)
from .exchange import (
    ExchangeParams,
    ExchangeSamples,
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
from .gas import (
    CollisionCosines,
    GasSamples,
    GasState,
    MeanSquareCosineEstimate,
    collide,
    collision_cosines,
    energy_update_form,
    mean_square_cosine,
    run_gas,
    sample_equilibrium_energies,
    sample_unit_direction,
    velocity_transfer,
)
from .stats import (
    BinSpec,
    GammaParams,
    Histogram,
    InequalityReport,
    fit_gamma_mle,
    fit_gamma_moments,
    gamma_cdf,
    gamma_pdf,
    gibrat_index,
    gibrat_pdf,
    gini,
    gini_of_gamma,
    histogram,
    inequality_report,
    ks_statistic,
    lorenz_curve,
    pareto_pdf,
)
from .entropy import (
    ConstraintSet,
    DiscretizedDensity,
    MaxwellBoltzmannReport,
    StationarityReport,
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
from .special import (
    digamma,
    gamma_function,
    log_gamma,
    regularized_gamma_p,
    regularized_gamma_p_array,
)
from .rng import Xoshiro256PP, stream_state
from .cli import ExperimentConfig, RunReport, emit_plot_data, run_experiment

__version__ = "0.1.0"

__all__ = [
    "BinSpec",
    "CollisionCosines",
    "ConfigurationError",
    "ConstraintSet",
    "DegenerateDistributionError",
    "DiscretizedDensity",
    "DomainError",
    "ExchangeParams",
    "ExchangeSamples",
    "ExperimentConfig",
    "GammaKineticsError",
    "GammaParams",
    "GasSamples",
    "GasState",
    "Histogram",
    "InequalityReport",
    "MaxwellBoltzmannReport",
    "MeanSquareCosineEstimate",
    "RunReport",
    "StationarityReport",
    "WealthEnsemble",
    "Xoshiro256PP",
    "canonical_occupancy",
    "collide",
    "collision_cosines",
    "digamma",
    "discretized_gamma",
    "effective_dimension",
    "effective_entropy",
    "effective_temperature",
    "emit_plot_data",
    "energy_update_form",
    "fit_gamma_mle",
    "fit_gamma_moments",
    "gamma_cdf",
    "gamma_entropy_reference",
    "gamma_function",
    "gamma_pdf",
    "gibrat_index",
    "gibrat_pdf",
    "gini",
    "gini_of_gamma",
    "graded_grid",
    "histogram",
    "hypersphere_surface",
    "inequality_report",
    "ks_statistic",
    "log_gamma",
    "lorenz_curve",
    "maxwell_boltzmann_check",
    "mean_exchanged_fraction",
    "mean_square_cosine",
    "multinomial_entropy",
    "pareto_pdf",
    "regularized_gamma_p",
    "regularized_gamma_p_array",
    "reshuffle_trade",
    "run_exchange",
    "run_experiment",
    "run_gas",
    "sample_equilibrium",
    "sample_equilibrium_energies",
    "sample_unit_direction",
    "saving_of_dimension",
    "saving_trade",
    "stationarity_check",
    "stream_state",
    "trapezoid_weights",
    "velocity_transfer",
]
