"""Deterministic random streams for the simulation kernels.

The Monte Carlo kernels draw from xoshiro256++ generators seeded through
splitmix64. The algorithm is fixed here, in code, so a (seed, stream)
pair reproduces the same trajectory bit for bit on any platform and any
library version. Replicates of one experiment share a seed and use
consecutive stream indices.

Conventions, identical in the compiled kernels and the pure-Python
mirror class:

* uniform doubles: ``((word >> 11) + 0.5) * 2**-53``, strictly inside
  the open interval (0, 1);
* bounded integers: masked rejection, so every value below the bound is
  exactly equally likely;
* normal deviates: Marsaglia polar method;
* unit vectors: normalized normal deviates, resampled in the (in
  practice unreachable) event of a zero norm.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .errors import DomainError

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_STREAM_SALT = 0xD1B54A32D192ED03
_TWO_NEG53 = 2.0 ** -53

ALGORITHM = "xoshiro256++ / splitmix64 seeding"


def mix64(z: int) -> int:
    """splitmix64 output function on a 64-bit word."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def stream_state(seed: int, stream: int = 0) -> np.ndarray:
    """Initial xoshiro256++ state for a (seed, stream) pair.

    The four state words are consecutive splitmix64 outputs started from
    a point that hashes both the seed and the stream index, so distinct
    streams of the same seed are decorrelated.
    """
    if stream < 0:
        raise DomainError("stream index must be >= 0")
    start = mix64((int(seed) & _MASK64) ^ mix64((stream + 1) * _STREAM_SALT))
    words = []
    z = start
    for _ in range(4):
        z = (z + _GOLDEN) & _MASK64
        words.append(mix64(z))
    if not any(words):
        # an all-zero xoshiro state is a fixed point; unreachable in practice
        words[0] = _GOLDEN
    return np.array(words, dtype=np.uint64)


# ---------------------------------------------------------------------------
# compiled kernel primitives (operate in place on a uint64[4] state array)

@njit(cache=True, nogil=True)
def _next_u64(s):
    x0 = s[0]
    tmp = x0 + s[3]
    result = ((tmp << np.uint64(23)) | (tmp >> np.uint64(41))) + x0
    t = s[1] << np.uint64(17)
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = (s[3] << np.uint64(45)) | (s[3] >> np.uint64(19))
    return result


@njit(cache=True, nogil=True)
def _uniform_open(s):
    r = _next_u64(s)
    return (np.float64(r >> np.uint64(11)) + 0.5) * _TWO_NEG53


@njit(cache=True, nogil=True)
def _mask_for(bound):
    # smallest (2**k - 1) covering bound - 1
    mask = np.uint64(1)
    top = np.uint64(bound - 1)
    while mask < top:
        mask = (mask << np.uint64(1)) | np.uint64(1)
    return mask


@njit(cache=True, nogil=True)
def _randbelow(s, bound, mask):
    b = np.uint64(bound)
    while True:
        r = _next_u64(s) & mask
        if r < b:
            return np.int64(r)


@njit(cache=True, nogil=True)
def _normal_pair(s):
    while True:
        a = 2.0 * _uniform_open(s) - 1.0
        b = 2.0 * _uniform_open(s) - 1.0
        q = a * a + b * b
        if 0.0 < q < 1.0:
            f = math.sqrt(-2.0 * math.log(q) / q)
            return a * f, b * f


@njit(cache=True, nogil=True)
def _fill_unit_vector(s, out):
    n = out.shape[0]
    while True:
        k = 0
        while k < n:
            g1, g2 = _normal_pair(s)
            out[k] = g1
            if k + 1 < n:
                out[k + 1] = g2
            k += 2
        norm2 = 0.0
        for i in range(n):
            norm2 += out[i] * out[i]
        if norm2 > 0.0:
            norm = math.sqrt(norm2)
            for i in range(n):
                out[i] /= norm
            return


# test-support fillers: expose the raw kernel draw sequences

@njit(cache=True, nogil=True)
def _fill_u64(s, out):
    for i in range(out.shape[0]):
        out[i] = _next_u64(s)


@njit(cache=True, nogil=True)
def _fill_uniforms(s, out):
    for i in range(out.shape[0]):
        out[i] = _uniform_open(s)


@njit(cache=True, nogil=True)
def _fill_randbelow(s, bound, out):
    mask = _mask_for(bound)
    for i in range(out.shape[0]):
        out[i] = _randbelow(s, bound, mask)


@njit(cache=True, nogil=True)
def _fill_normals(s, out):
    for i in range(0, out.shape[0], 2):
        g1, g2 = _normal_pair(s)
        out[i] = g1
        if i + 1 < out.shape[0]:
            out[i + 1] = g2


# ---------------------------------------------------------------------------


class Xoshiro256PP:
    """Pure-Python mirror of the kernel generator.

    Produces the same draw sequence as the compiled primitives above,
    which makes kernel behaviour reproducible (and testable) from plain
    Python. Used for cheap setup work such as initial gas velocities.
    """

    def __init__(self, seed: int, stream: int = 0):
        self._s = [int(w) for w in stream_state(seed, stream)]

    def next_u64(self) -> int:
        s = self._s
        tmp = (s[0] + s[3]) & _MASK64
        result = ((((tmp << 23) & _MASK64) | (tmp >> 41)) + s[0]) & _MASK64
        t = (s[1] << 17) & _MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = ((s[3] << 45) & _MASK64) | (s[3] >> 19)
        return result

    def uniform_open(self) -> float:
        return (float(self.next_u64() >> 11) + 0.5) * _TWO_NEG53

    def randbelow(self, bound: int) -> int:
        if bound < 1:
            raise DomainError("bound must be >= 1")
        mask = 1
        top = bound - 1
        while mask < top:
            mask = (mask << 1) | 1
        while True:
            r = self.next_u64() & mask
            if r < bound:
                return r

    def pair_indices(self, count: int) -> tuple[int, int]:
        """Ordered pair of distinct indices, uniform over all such pairs."""
        i = self.randbelow(count)
        j = self.randbelow(count - 1)
        if j >= i:
            j += 1
        return i, j

    def normal_pair(self) -> tuple[float, float]:
        while True:
            a = 2.0 * self.uniform_open() - 1.0
            b = 2.0 * self.uniform_open() - 1.0
            q = a * a + b * b
            if 0.0 < q < 1.0:
                f = math.sqrt(-2.0 * math.log(q) / q)
                return a * f, b * f

    def unit_vector(self, n: int) -> np.ndarray:
        if n < 1:
            raise DomainError("dimension must be >= 1")
        out = np.empty(n, dtype=np.float64)
        while True:
            k = 0
            while k < n:
                g1, g2 = self.normal_pair()
                out[k] = g1
                if k + 1 < n:
                    out[k + 1] = g2
                k += 2
            norm2 = float(np.dot(out, out))
            if norm2 > 0.0:
                out /= math.sqrt(norm2)
                return out
