"""Elastic pair collisions of unit-mass particles in N dimensions.

Each collision picks a random ordered pair (i, j) and a direction u drawn
uniformly on the unit sphere, then exchanges the velocity component along
u:

    dv = -[(v_i - v_j) . u] u,    v_i' = v_i + dv,    v_j' = v_j - dv

which conserves momentum by construction and kinetic energy through the
identity dv^2 + (v_i - v_j) . dv = 0. In terms of the cosines r_1, r_2
between each incoming velocity and dv, the kinetic energies update as

    x_1' = x_1 + r_2^2 x_2 - r_1^2 x_1    (and symmetrically for x_2)

and the direction average <r_1^2> equals 1/N. The equilibrium kinetic
energy distribution is a gamma law with shape N/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import ConfigurationError, DomainError
from .rng import Xoshiro256PP, _fill_unit_vector, _mask_for, _randbelow, stream_state

_UNIT_NORM_TOL = 1e-9


@dataclass
class GasState:
    """Particle velocities of an N-dimensional gas, with cached invariants.

    Attributes:
        velocities: array of shape (particles, dimension).
        total_energy: cached kinetic energy (unit masses), 0.5 * sum v^2.
        total_momentum: cached vector sum of velocities.
    """

    velocities: np.ndarray
    total_energy: float = field(init=False)
    total_momentum: np.ndarray = field(init=False)

    def __post_init__(self):
        arr = np.array(self.velocities, dtype=np.float64, copy=True)
        if arr.ndim != 2:
            raise DomainError("velocities must have shape (particles, dimension)")
        if arr.shape[0] < 2:
            raise DomainError("a gas needs at least two particles")
        if arr.shape[1] < 1:
            raise DomainError("dimension must be >= 1")
        if not np.all(np.isfinite(arr)):
            raise DomainError("velocities must be finite")
        self.velocities = arr
        self.total_energy = 0.5 * float(np.sum(arr * arr))
        self.total_momentum = arr.sum(axis=0)

    @classmethod
    def isotropic(
        cls,
        particles: int,
        dimension: int,
        speed: float = 1.0,
        seed: int = 0,
        stream: int = 0,
        zero_momentum: bool = False,
    ) -> "GasState":
        """Equal speeds in independent uniformly random directions.

        With ``zero_momentum`` the center-of-mass velocity is subtracted
        afterwards, which makes the total momentum exactly zero at the
        cost of a small O(1/sqrt(particles)) spread in the speeds.
        """
        if particles < 2:
            raise DomainError("a gas needs at least two particles")
        if dimension < 1:
            raise DomainError("dimension must be >= 1")
        if speed <= 0.0:
            raise DomainError("speed must be > 0")
        gen = Xoshiro256PP(seed, stream)
        v = np.empty((particles, dimension), dtype=np.float64)
        for i in range(particles):
            v[i] = speed * gen.unit_vector(dimension)
        if zero_momentum:
            v -= v.mean(axis=0)
        return cls(v)

    @property
    def particles(self) -> int:
        return int(self.velocities.shape[0])

    @property
    def dimension(self) -> int:
        return int(self.velocities.shape[1])

    def kinetic_energies(self) -> np.ndarray:
        """Per-particle kinetic energy, 0.5 * |v|^2."""
        v = self.velocities
        return 0.5 * np.sum(v * v, axis=1)


@dataclass(frozen=True)
class CollisionCosines:
    """Cosines between the incoming velocities and the velocity transfer.

    A cosine is None (never NaN) when it is undefined, i.e. when the
    corresponding speed or the transfer magnitude is zero.
    """

    r1: float | None
    r2: float | None


def sample_unit_direction(dimension: int, rng: np.random.Generator | None = None) -> np.ndarray:
    """Uniform random direction on the unit sphere in the given dimension.

    Normalized standard normal deviates; in one dimension this reduces to
    +1 or -1 with equal probability.
    """
    if dimension < 1:
        raise DomainError("dimension must be >= 1")
    if rng is None:
        rng = np.random.default_rng()
    while True:
        g = rng.standard_normal(dimension)
        norm = float(np.sqrt(np.dot(g, g)))
        if norm > 0.0:
            return g / norm


def collide(v1: np.ndarray, v2: np.ndarray, u_hat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Elastic collision along the direction ``u_hat``.

    ``u_hat`` must be unit length to within 1e-9. Returns the two
    post-collision velocities; momentum and kinetic energy are conserved
    up to rounding.
    """
    a = np.asarray(v1, dtype=np.float64)
    b = np.asarray(v2, dtype=np.float64)
    u = np.asarray(u_hat, dtype=np.float64)
    if a.shape != b.shape or a.shape != u.shape or a.ndim != 1:
        raise DomainError("v1, v2 and u_hat must be vectors of one common dimension")
    norm = float(np.sqrt(np.dot(u, u)))
    if abs(norm - 1.0) > _UNIT_NORM_TOL:
        raise DomainError("u_hat must be a unit vector (|norm - 1| <= 1e-9)")
    proj = float(np.dot(a - b, u))
    dv = -proj * u
    return a + dv, b - dv


def velocity_transfer(v1: np.ndarray, v2: np.ndarray, u_hat: np.ndarray) -> np.ndarray:
    """The velocity transfer dv = -[(v1 - v2) . u] u of a collision."""
    a = np.asarray(v1, dtype=np.float64)
    b = np.asarray(v2, dtype=np.float64)
    u = np.asarray(u_hat, dtype=np.float64)
    norm = float(np.sqrt(np.dot(u, u)))
    if abs(norm - 1.0) > _UNIT_NORM_TOL:
        raise DomainError("u_hat must be a unit vector (|norm - 1| <= 1e-9)")
    return -float(np.dot(a - b, u)) * u


def collision_cosines(v1: np.ndarray, v2: np.ndarray, delta_v: np.ndarray) -> CollisionCosines:
    """Cosines r_i = (v_i . dv) / (|v_i| |dv|), with explicit undefined flags."""
    a = np.asarray(v1, dtype=np.float64)
    b = np.asarray(v2, dtype=np.float64)
    d = np.asarray(delta_v, dtype=np.float64)
    if a.shape != b.shape or a.shape != d.shape or a.ndim != 1:
        raise DomainError("v1, v2 and delta_v must be vectors of one common dimension")
    dnorm = float(np.sqrt(np.dot(d, d)))
    r1 = None
    r2 = None
    if dnorm > 0.0:
        anorm = float(np.sqrt(np.dot(a, a)))
        bnorm = float(np.sqrt(np.dot(b, b)))
        if anorm > 0.0:
            r1 = float(np.dot(a, d) / (anorm * dnorm))
            r1 = min(1.0, max(-1.0, r1))
        if bnorm > 0.0:
            r2 = float(np.dot(b, d) / (bnorm * dnorm))
            r2 = min(1.0, max(-1.0, r2))
    return CollisionCosines(r1, r2)


def energy_update_form(x1: float, x2: float, r1: float, r2: float) -> tuple[float, float]:
    """Kinetic energy update written in collision cosines.

    Returns ``(x1 + r2^2 x2 - r1^2 x1, x2 - r2^2 x2 + r1^2 x1)``; the sum
    is preserved exactly up to rounding. For cosines taken from an actual
    collision this reproduces the true post-collision energies.
    """
    if x1 < 0.0 or x2 < 0.0:
        raise DomainError("kinetic energies must be >= 0")
    if not -1.0 <= r1 <= 1.0 or not -1.0 <= r2 <= 1.0:
        raise DomainError("cosines must lie in [-1, 1]")
    moved = r2 * r2 * x2 - r1 * r1 * x1
    return x1 + moved, x2 - moved


@dataclass(frozen=True)
class MeanSquareCosineEstimate:
    """Monte Carlo estimate of <r_1^2> with its standard error."""

    value: float
    standard_error: float
    samples: int


def mean_square_cosine(
    dimension: int,
    samples: int,
    rng: np.random.Generator | None = None,
) -> MeanSquareCosineEstimate:
    """Estimate <r_1^2> over random collisions; the exact value is 1/N.

    Incoming velocities are standard normal vectors, directions are
    uniform on the sphere. In one dimension every sample equals 1
    exactly. Requires at least 1000 samples.
    """
    if dimension < 1:
        raise DomainError("dimension must be >= 1")
    if samples < 1000:
        raise DomainError("mean_square_cosine needs at least 1000 samples")
    if rng is None:
        rng = np.random.default_rng()
    total = 0.0
    total_sq = 0.0
    used = 0
    remaining = samples
    chunk = 131072
    while remaining > 0:
        c = min(chunk, remaining)
        remaining -= c
        v1 = rng.standard_normal((c, dimension))
        v2 = rng.standard_normal((c, dimension))
        g = rng.standard_normal((c, dimension))
        gnorm = np.sqrt(np.sum(g * g, axis=1))
        ok = gnorm > 0.0
        u = g[ok] / gnorm[ok, None]
        v1 = v1[ok]
        v2 = v2[ok]
        proj = np.sum((v1 - v2) * u, axis=1)
        dv = -proj[:, None] * u
        num = np.sum(v1 * dv, axis=1)
        den = np.sqrt(np.sum(v1 * v1, axis=1)) * np.sqrt(np.sum(dv * dv, axis=1))
        ok = den > 0.0
        r1 = num[ok] / den[ok]
        rsq = r1 * r1
        total += float(rsq.sum())
        total_sq += float(np.dot(rsq, rsq))
        used += int(rsq.size)
    if used < 2:
        raise DomainError("all collision samples were degenerate")
    mean = total / used
    var = max(0.0, (total_sq - used * mean * mean) / (used - 1))
    return MeanSquareCosineEstimate(mean, float(np.sqrt(var / used)), used)


@dataclass(frozen=True)
class GasSamples:
    """Pooled equilibrium kinetic-energy snapshots of a gas run.

    Attributes:
        values: flat array, one energy per particle per snapshot.
        dimension, particles, collisions, seed, stream: run metadata.
        snapshots: number of snapshots pooled into ``values``.
        final: the gas state after the last collision.
    """

    values: np.ndarray
    dimension: int
    particles: int
    collisions: int
    seed: int
    stream: int
    snapshots: int
    final: GasState


@njit(cache=True, nogil=True)
def _gas_kernel(v, collisions, state, discard, every, samples):
    m, n = v.shape
    mask_i = _mask_for(m)
    mask_j = _mask_for(m - 1)
    u = np.empty(n, dtype=np.float64)
    snap = 0
    for t in range(collisions):
        i = _randbelow(state, m, mask_i)
        j = _randbelow(state, m - 1, mask_j)
        if j >= i:
            j += 1
        _fill_unit_vector(state, u)
        proj = 0.0
        for k in range(n):
            proj += (v[i, k] - v[j, k]) * u[k]
        for k in range(n):
            d = proj * u[k]
            v[i, k] -= d
            v[j, k] += d
        if every > 0:
            done = t + 1
            if done > discard and (done - discard) % every == 0 and snap < samples.shape[0]:
                for q in range(m):
                    e = 0.0
                    for k in range(n):
                        e += v[q, k] * v[q, k]
                    samples[snap, q] = 0.5 * e
                snap += 1
    return snap


def run_gas(state: GasState, collisions: int, seed: int, stream: int = 0) -> GasState:
    """Apply random pair collisions and return the final state.

    Zero collisions returns an identical copy. Deterministic for a given
    (seed, stream).
    """
    if collisions < 0:
        raise ConfigurationError("collisions must be >= 0")
    v = state.velocities.copy()
    rng_state = stream_state(seed, stream)
    empty = np.empty((0, v.shape[0]), dtype=np.float64)
    _gas_kernel(v, collisions, rng_state, 0, 0, empty)
    return GasState(v)


def sample_equilibrium_energies(
    state: GasState,
    collisions: int,
    seed: int,
    stream: int = 0,
    discard: int | None = None,
    every: int | None = None,
) -> GasSamples:
    """Run collisions and pool per-particle energy snapshots.

    Same sampling contract as the exchange runs: the first half of the
    collisions is discarded as burn-in, then a full snapshot is taken
    every M collisions (M = number of particles).
    """
    m = state.particles
    if discard is None:
        discard = collisions // 2
    if every is None:
        every = m
    if discard < 0 or discard > collisions:
        raise ConfigurationError("discard must lie in [0, collisions]")
    if every < 1:
        raise ConfigurationError("snapshot interval must be >= 1")
    count = (collisions - discard) // every
    if count < 1:
        raise ConfigurationError(
            "collisions too few for one snapshot: need collisions - discard >= snapshot interval"
        )
    v = state.velocities.copy()
    rng_state = stream_state(seed, stream)
    samples = np.empty((count, m), dtype=np.float64)
    got = _gas_kernel(v, collisions, rng_state, discard, every, samples)
    return GasSamples(
        values=samples[:got].reshape(-1),
        dimension=state.dimension,
        particles=m,
        collisions=collisions,
        seed=seed,
        stream=stream,
        snapshots=int(got),
        final=GasState(v),
    )
