"""Gamma-family special functions.

Self-contained numerics: log-gamma uses the Lanczos approximation
(g = 7, nine coefficients), accurate to about 1e-14 in units of the
function value on the positive axis. The regularized lower incomplete
gamma function P(a, x) uses the classic split:

* power series for x < a + 1,
* Lentz-style continued fraction for the complement Q(a, x) otherwise,

with a 1e-16 termination ratio, comfortably inside the 1e-10 absolute
target. The scalar cores are njit-compiled so the array variants stay
cheap over multi-million-sample inputs.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .errors import DomainError

_LN_SQRT_TWO_PI = 0.9189385332046727
_LN_PI = 1.1447298858494002

# Lanczos coefficients for g = 7
_L0 = 0.99999999999980993
_L1 = 676.5203681218851
_L2 = -1259.1392167224028
_L3 = 771.32342877765313
_L4 = -176.61502916214059
_L5 = 12.507343278686905
_L6 = -0.13857109526572012
_L7 = 9.9843695780195716e-6
_L8 = 1.5056327351493116e-7


@njit(cache=True, nogil=True)
def _log_gamma_core(x):
    # valid for x >= 0.5
    s = _L0
    s += _L1 / x
    s += _L2 / (x + 1.0)
    s += _L3 / (x + 2.0)
    s += _L4 / (x + 3.0)
    s += _L5 / (x + 4.0)
    s += _L6 / (x + 5.0)
    s += _L7 / (x + 6.0)
    s += _L8 / (x + 7.0)
    t = x + 6.5
    return _LN_SQRT_TWO_PI + (x - 0.5) * math.log(t) - t + math.log(s)


@njit(cache=True, nogil=True)
def _log_gamma(x):
    if x < 0.5:
        # reflection keeps the series argument >= 0.5; x > 0 is assumed
        return _LN_PI - math.log(math.sin(math.pi * x)) - _log_gamma_core(1.0 - x)
    return _log_gamma_core(x)


@njit(cache=True, nogil=True)
def _gammainc_p(a, x):
    # regularized lower incomplete gamma, a > 0 and x >= 0 assumed
    if x <= 0.0:
        return 0.0
    lg = _log_gamma(a)
    if x < a + 1.0:
        ap = a
        term = 1.0 / a
        total = term
        for _ in range(500):
            ap += 1.0
            term *= x / ap
            total += term
            if abs(term) < abs(total) * 1e-16:
                break
        p = total * math.exp(-x + a * math.log(x) - lg)
    else:
        tiny = 1e-300
        b = x + 1.0 - a
        c = 1.0 / tiny
        d = 1.0 / b
        h = d
        for i in range(1, 500):
            an = -i * (i - a)
            b += 2.0
            d = an * d + b
            if abs(d) < tiny:
                d = tiny
            c = b + an / c
            if abs(c) < tiny:
                c = tiny
            d = 1.0 / d
            delta = d * c
            h *= delta
            if abs(delta - 1.0) < 1e-16:
                break
        q = math.exp(-x + a * math.log(x) - lg) * h
        p = 1.0 - q
    if p < 0.0:
        return 0.0
    if p > 1.0:
        return 1.0
    return p


@njit(cache=True, nogil=True)
def _gammainc_p_fill(a, xs, out):
    for i in range(xs.shape[0]):
        out[i] = _gammainc_p(a, xs[i])


@njit(cache=True, nogil=True)
def _digamma(x):
    # recurrence up to the asymptotic regime, then the standard series
    result = 0.0
    while x < 10.0:
        result -= 1.0 / x
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    result += math.log(x) - 0.5 * inv
    result -= inv2 * (
        1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 / 240.0))
    )
    return result


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for x > 0."""
    if not x > 0.0:
        raise DomainError("log_gamma requires x > 0")
    return float(_log_gamma(float(x)))


def gamma_function(x: float) -> float:
    """Gamma function for x > 0."""
    return math.exp(log_gamma(x))


def regularized_gamma_p(a: float, x: float) -> float:
    """Regularized lower incomplete gamma function P(a, x)."""
    if not a > 0.0:
        raise DomainError("regularized_gamma_p requires a > 0")
    if x < 0.0:
        raise DomainError("regularized_gamma_p requires x >= 0")
    return float(_gammainc_p(float(a), float(x)))


def regularized_gamma_p_array(a: float, xs: np.ndarray) -> np.ndarray:
    """P(a, x) evaluated elementwise; the input shape is preserved."""
    if not a > 0.0:
        raise DomainError("regularized_gamma_p requires a > 0")
    arr = np.ascontiguousarray(xs, dtype=np.float64)
    flat = arr.reshape(-1)
    if flat.size and float(flat.min()) < 0.0:
        raise DomainError("regularized_gamma_p requires x >= 0")
    out = np.empty_like(flat)
    _gammainc_p_fill(float(a), flat, out)
    return out.reshape(arr.shape)


def digamma(x: float) -> float:
    """Logarithmic derivative of the gamma function for x > 0."""
    if not x > 0.0:
        raise DomainError("digamma requires x > 0")
    return float(_digamma(float(x)))
