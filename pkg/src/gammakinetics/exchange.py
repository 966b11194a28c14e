"""Pairwise wealth-exchange Monte Carlo.

Agents carry nonnegative wealth and meet in random pairs. In the basic
rule the pair's combined wealth is randomly reshuffled; with a saving
propensity ``s`` each agent first sets aside the fraction ``s`` of its
own wealth and only the remainder of the pair total is reshuffled:

    x_i' = s * x_i + eps * (1 - s) * (x_i + x_j)
    x_j' = s * x_j + (1 - eps) * (1 - s) * (x_i + x_j)

with eps drawn uniformly from the open interval (0, 1). Total wealth is
conserved by every trade. The stationary distribution is well described
by a gamma law whose shape

    n(s) = (1 + 2 s) / (1 - s)

plays the role of half an effective dimension N = 2 n. The mean
exchanged fraction is <eps * (1 - s)> = (1 - s) / 2 = 3 / (N + 4), or
equivalently 1 - s = 6 / (N + 4).

Runs are driven by seeded xoshiro256++ streams (see ``rng``), so a
(seed, stream) pair reproduces a trajectory exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import ConfigurationError, DomainError
from .rng import _mask_for, _randbelow, _uniform_open, stream_state


def reshuffle_trade(xi: float, xj: float, eps: float) -> tuple[float, float]:
    """One trade of the basic rule: the pair total is split at random.

    Returns ``(eps * (xi + xj), (1 - eps) * (xi + xj))``.
    """
    if xi < 0.0 or xj < 0.0:
        raise DomainError("wealths must be >= 0")
    if not 0.0 < eps < 1.0:
        raise DomainError("eps must lie strictly inside (0, 1)")
    total = xi + xj
    return eps * total, (1.0 - eps) * total


def saving_trade(xi: float, xj: float, saving: float, eps: float) -> tuple[float, float]:
    """One trade with saving propensity: only (1 - saving) of the pair total moves.

    With ``saving == 0`` this reduces bit for bit to ``reshuffle_trade``.
    Each output is at least ``saving`` times the corresponding input.
    Boundary values of eps are accepted here (they are valid degenerate
    splits); the simulation loop itself always draws eps inside (0, 1).
    """
    if xi < 0.0 or xj < 0.0:
        raise DomainError("wealths must be >= 0")
    if not 0.0 <= saving < 1.0:
        raise DomainError("saving propensity must lie in [0, 1)")
    if not 0.0 <= eps <= 1.0:
        raise DomainError("eps must lie in [0, 1]")
    pool = (1.0 - saving) * (xi + xj)
    return saving * xi + eps * pool, saving * xj + (1.0 - eps) * pool


def effective_dimension(saving: float) -> float:
    """Gamma shape n = (1 + 2 s) / (1 - s); the effective dimension is N = 2 n.

    Diverges as s -> 1 (the distribution narrows toward its mean), so
    s = 1 is outside the domain.
    """
    if not 0.0 <= saving < 1.0:
        raise DomainError("saving propensity must lie in [0, 1)")
    return (1.0 + 2.0 * saving) / (1.0 - saving)


def saving_of_dimension(dimension: float) -> float:
    """Inverse of N(s) = 2 (1 + 2 s) / (1 - s): returns (N - 2) / (N + 4).

    Defined for N >= 2; N = 2 maps to zero saving.
    """
    if dimension < 2.0:
        raise DomainError("effective dimension must be >= 2")
    return (dimension - 2.0) / (dimension + 4.0)


def effective_temperature(mean_wealth: float, dimension: float) -> float:
    """Temperature of the equivalent N-dimensional gas: T = 2 <x> / N."""
    if mean_wealth <= 0.0:
        raise DomainError("mean wealth must be > 0")
    if dimension < 2.0:
        raise DomainError("effective dimension must be >= 2")
    return 2.0 * mean_wealth / dimension


def mean_exchanged_fraction(saving: float) -> float:
    """Average fraction of the pair total that actually moves: (1 - s) / 2.

    In terms of the effective dimension this equals 3 / (N + 4), and the
    unaveraged reshuffled fraction is 1 - s = 6 / (N + 4).
    """
    if not 0.0 <= saving < 1.0:
        raise DomainError("saving propensity must lie in [0, 1)")
    return (1.0 - saving) / 2.0


@dataclass(frozen=True)
class ExchangeParams:
    """Parameters of one exchange run.

    Attributes:
        saving: saving propensity in [0, 1).
        trades: number of pair trades to perform.
        seed: RNG seed; with ``stream`` it selects an independent stream.
        stream: stream index, used to decorrelate replicates.
    """

    saving: float
    trades: int
    seed: int
    stream: int = 0

    def __post_init__(self):
        if not 0.0 <= self.saving < 1.0:
            raise DomainError("saving propensity must lie in [0, 1)")
        if self.trades < 0:
            raise ConfigurationError("trades must be >= 0")
        if self.stream < 0:
            raise ConfigurationError("stream index must be >= 0")


@dataclass
class WealthEnsemble:
    """A population of agent wealths with a cached total.

    Attributes:
        wealths: nonnegative wealth per agent, at least two agents.
        total: cached sum of ``wealths``.
    """

    wealths: np.ndarray
    total: float = field(init=False)

    def __post_init__(self):
        arr = np.array(self.wealths, dtype=np.float64, copy=True)
        if arr.ndim != 1:
            raise DomainError("wealths must be a flat sequence")
        if arr.size < 2:
            raise DomainError("an ensemble needs at least two agents")
        if float(arr.min()) < 0.0:
            raise DomainError("wealths must be >= 0")
        self.wealths = arr
        self.total = float(arr.sum())

    @classmethod
    def equal(cls, agents: int, wealth: float = 1.0) -> "WealthEnsemble":
        """Ensemble with every agent holding the same wealth (default 1)."""
        if agents < 2:
            raise DomainError("an ensemble needs at least two agents")
        if wealth < 0.0:
            raise DomainError("wealth must be >= 0")
        return cls(np.full(agents, wealth, dtype=np.float64))

    @property
    def agents(self) -> int:
        return int(self.wealths.size)

    @property
    def mean(self) -> float:
        return self.total / self.wealths.size


@dataclass(frozen=True)
class ExchangeSamples:
    """Pooled equilibrium snapshots of an exchange run.

    Attributes:
        values: flat array, one entry per agent per snapshot.
        saving, agents, trades, seed, stream: run metadata.
        snapshots: number of ensemble snapshots pooled into ``values``.
        final: wealths after the last trade.
    """

    values: np.ndarray
    saving: float
    agents: int
    trades: int
    seed: int
    stream: int
    snapshots: int
    final: np.ndarray


@njit(cache=True, nogil=True)
def _exchange_kernel(w, trades, saving, state, discard, every, samples):
    m = w.shape[0]
    mask_i = _mask_for(m)
    mask_j = _mask_for(m - 1)
    snap = 0
    for t in range(trades):
        i = _randbelow(state, m, mask_i)
        j = _randbelow(state, m - 1, mask_j)
        if j >= i:
            j += 1
        eps = _uniform_open(state)
        xi = w[i]
        xj = w[j]
        pool = (1.0 - saving) * (xi + xj)
        w[i] = saving * xi + eps * pool
        w[j] = saving * xj + (1.0 - eps) * pool
        if every > 0:
            done = t + 1
            if done > discard and (done - discard) % every == 0 and snap < samples.shape[0]:
                for q in range(m):
                    samples[snap, q] = w[q]
                snap += 1
    return snap


def run_exchange(ensemble: WealthEnsemble, params: ExchangeParams) -> WealthEnsemble:
    """Run ``params.trades`` random pair trades and return the final ensemble.

    Pairs are ordered distinct index pairs drawn uniformly; eps is uniform
    on (0, 1). Deterministic for a given (seed, stream).
    """
    w = ensemble.wealths.copy()
    state = stream_state(params.seed, params.stream)
    empty = np.empty((0, w.size), dtype=np.float64)
    _exchange_kernel(w, params.trades, params.saving, state, 0, 0, empty)
    return WealthEnsemble(w)


def sample_equilibrium(
    ensemble: WealthEnsemble,
    params: ExchangeParams,
    discard: int | None = None,
    every: int | None = None,
) -> ExchangeSamples:
    """Run trades and pool ensemble snapshots from the second half.

    By default the first half of the trades is discarded as burn-in and a
    full snapshot of all wealths is recorded every M trades thereafter
    (M = number of agents).
    """
    m = ensemble.agents
    if discard is None:
        discard = params.trades // 2
    if every is None:
        every = m
    if discard < 0 or discard > params.trades:
        raise ConfigurationError("discard must lie in [0, trades]")
    if every < 1:
        raise ConfigurationError("snapshot interval must be >= 1")
    count = (params.trades - discard) // every
    if count < 1:
        raise ConfigurationError(
            "trades too few for one snapshot: need trades - discard >= snapshot interval"
        )
    w = ensemble.wealths.copy()
    state = stream_state(params.seed, params.stream)
    samples = np.empty((count, m), dtype=np.float64)
    got = _exchange_kernel(w, params.trades, params.saving, state, discard, every, samples)
    return ExchangeSamples(
        values=samples[:got].reshape(-1),
        saving=params.saving,
        agents=m,
        trades=params.trades,
        seed=params.seed,
        stream=params.stream,
        snapshots=int(got),
        final=w,
    )
