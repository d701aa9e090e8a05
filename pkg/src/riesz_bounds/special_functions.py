"""Gamma, Beta and Bessel J kernels plus the semiclassical constants.

Everything here is self-contained (no scipy.special) so that the
Lieb-Thirring constants are reproducible bit for bit on every platform.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class ConvergenceError(RuntimeError):
    """An iterative numerical routine failed to reach its tolerance."""


# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _lanczos_sum(z):
    # z = x - 1
    acc = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[i] / (z + i)
    return acc


def gamma(x: float) -> float:
    """Gamma function for real x > 0.

    Lanczos approximation for x >= 1/2, reflection formula below that.
    """
    x = float(x)
    if not x > 0.0:
        raise ValueError(f"gamma: argument must be positive, got {x!r}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma(1.0 - x))
    if x == math.floor(x) and x <= 23.0:
        return float(math.factorial(int(x) - 1))
    if x > 171.6:
        raise OverflowError("gamma: result overflows double precision")
    if x > 2.0:
        # Lanczos loses ~x ulps through t**(z+1/2); recur down into [1, 2] instead
        n = int(math.floor(x)) - 1
        base = x - n
        prod = 1.0
        for i in range(n):
            prod *= base + i
        return prod * gamma(base)
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * _lanczos_sum(z)


def lgamma(x: float) -> float:
    """log(Gamma(x)) for x > 0."""
    x = float(x)
    if not x > 0.0:
        raise ValueError(f"lgamma: argument must be positive, got {x!r}")
    if x < 0.5:
        return math.log(math.pi / math.sin(math.pi * x)) - lgamma(1.0 - x)
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(_lanczos_sum(z))


def beta(a: float, b: float) -> float:
    """Euler Beta function B(a, b) for a, b > 0."""
    if a + b < 150.0:
        return gamma(a) * gamma(b) / gamma(a + b)
    return math.exp(lgamma(a) + lgamma(b) - lgamma(a + b))


@dataclass(frozen=True)
class LTConstant:
    """Semiclassical Lieb-Thirring constant L^cl_{sigma, dim}."""

    sigma: float
    dim: int
    value: float

    def __float__(self):
        return self.value


def lt_constant(sigma: float, dim: int) -> LTConstant:
    """Gamma(sigma+1) / ((4 pi)^{d/2} Gamma(sigma+1+d/2))."""
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    if int(dim) != dim or dim < 1:
        raise ValueError(f"dim must be a positive integer, got {dim}")
    dim = int(dim)
    if sigma + 1 + dim / 2 < 150.0:
        ratio = gamma(sigma + 1.0) / gamma(sigma + 1.0 + dim / 2.0)
    else:
        ratio = math.exp(lgamma(sigma + 1.0) - lgamma(sigma + 1.0 + dim / 2.0))
    value = ratio / (4.0 * math.pi) ** (dim / 2.0)
    return LTConstant(float(sigma), dim, value)


def lt(sigma: float, dim: int) -> float:
    """Shorthand for ``lt_constant(sigma, dim).value``."""
    return lt_constant(sigma, dim).value


def unit_ball_volume(dim: int) -> float:
    """omega_d, the volume of the unit ball in R^d."""
    return math.pi ** (dim / 2.0) / gamma(dim / 2.0 + 1.0)


# ---------------------------------------------------------------------------
# Bessel functions of the first kind


_SERIES_CUTOFF = 2.0


def _bessel_series(nu, x):
    # sum_k (-1)^k (x/2)^{2k+nu} / (k! Gamma(k+nu+1)), fine for x <= 2
    q = -0.25 * x * x
    if nu == 0.0:
        lead = np.ones_like(x)
    else:
        with np.errstate(divide="ignore"):
            lead = np.exp(nu * np.log(0.5 * x) - lgamma(nu + 1.0))
        lead = np.where(x == 0.0, 0.0, lead)
    term = np.ones_like(x)
    acc = np.ones_like(x)
    for k in range(1, 40):
        term = term * q / (k * (k + nu))
        acc = acc + term
        if np.all(np.abs(term) <= 1e-17 * np.abs(acc)):
            break
    return lead * acc


def _bessel_miller(nu, x):
    """Backward recurrence normalised by
    (x/2)^mu = sum_k (mu + 2k) Gamma(mu + k) / k! J_{mu+2k}(x), 0 <= mu < 1.
    """
    n0 = int(math.floor(nu))
    mu = nu - n0
    top = max(nu, float(np.max(x)))
    N = int(top + 30 + math.sqrt(60.0 * top))
    N += N % 2
    # r_k = Gamma(mu + k) / k!
    r = np.empty(N // 2 + 1)
    r[0] = 0.0
    r[1] = gamma(mu + 1.0)
    for k in range(2, N // 2 + 1):
        r[k] = r[k - 1] * (mu + k - 1) / k

    y_next = np.zeros_like(x)
    y = np.full_like(x, 1e-30)
    total = np.zeros_like(x)
    result = np.zeros_like(x)
    for n in range(N, 0, -1):
        if n == n0:
            result = y.copy()
        if n % 2 == 0:
            k = n // 2
            total = total + (mu + 2 * k) * r[k] * y
        y_prev = (2.0 * (mu + n) / x) * y - y_next
        y_next, y = y, y_prev
        big = np.abs(y) > 1e200
        if np.any(big):
            scale = np.where(big, 1e-200, 1.0)
            y = y * scale
            y_next = y_next * scale
            total = total * scale
            result = result * scale
    if n0 == 0:
        result = y
    total = total + gamma(mu + 1.0) * y
    return result * (0.5 * x) ** mu / total


def _bessel_scalar(nu, x):
    """Pure-float twin of the array kernels (much faster for single points)."""
    if x <= _SERIES_CUTOFF:
        q = -0.25 * x * x
        lead = 1.0 if nu == 0.0 else (0.0 if x == 0.0 else math.exp(nu * math.log(0.5 * x) - lgamma(nu + 1.0)))
        term = acc = 1.0
        for k in range(1, 40):
            term *= q / (k * (k + nu))
            acc += term
            if abs(term) <= 1e-17 * abs(acc):
                break
        return lead * acc
    n0 = int(math.floor(nu))
    mu = nu - n0
    top = max(nu, x)
    N = int(top + 30 + math.sqrt(60.0 * top))
    N += N % 2
    g1 = gamma(mu + 1.0)
    y_next, y, total, result = 0.0, 1e-30, 0.0, 0.0
    # r_k = Gamma(mu + k) / k!, generated downward from r_{N/2}
    kt = N // 2
    r = g1
    for k in range(2, kt + 1):
        r *= (mu + k - 1) / k
    for n in range(N, 0, -1):
        if n == n0:
            result = y
        if n % 2 == 0:
            k = n // 2
            total += (mu + 2 * k) * r * y
            r = r * k / (mu + k - 1) if k > 1 else 0.0
        y_prev = (2.0 * (mu + n) / x) * y - y_next
        y_next, y = y, y_prev
        if abs(y) > 1e200:
            y *= 1e-200
            y_next *= 1e-200
            total *= 1e-200
            result *= 1e-200
    if n0 == 0:
        result = y
    total += g1 * y
    return result * (0.5 * x) ** mu / total


def bessel_j(nu: float, x):
    """Bessel function J_nu(x) for real nu >= 0 and x >= 0.

    Accepts a scalar or an array for ``x``.  Power series for x <= 2,
    normalised Miller backward recurrence above.
    """
    if nu < 0:
        raise ValueError(f"bessel_j: order must be >= 0, got {nu}")
    scalar = np.isscalar(x)
    if scalar:
        xf = float(x)
        if not (math.isfinite(xf) and xf >= 0):
            raise ValueError("bessel_j: x must be finite and >= 0")
        return _bessel_scalar(float(nu), xf)
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xa < 0) or np.any(~np.isfinite(xa)):
        raise ValueError("bessel_j: x must be finite and >= 0")
    out = np.empty_like(xa)
    small = xa <= _SERIES_CUTOFF
    if np.any(small):
        out[small] = _bessel_series(float(nu), xa[small])
    if np.any(~small):
        out[~small] = _bessel_miller(float(nu), xa[~small])
    return float(out[0]) if scalar else out


def _bessel_j_prime(nu, x):
    # J'_nu = (nu/x) J_nu - J_{nu+1}
    return nu / x * bessel_j(nu, x) - bessel_j(nu + 1.0, x)


def _mcmahon(nu, k):
    mu = 4.0 * nu * nu
    b = (k + 0.5 * nu - 0.25) * math.pi
    return b - (mu - 1.0) / (8.0 * b) - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * (8.0 * b) ** 3)


def _refine_zero(nu, a, fa, b, guess):
    """Safeguarded Newton inside the sign-change bracket [a, b]."""
    x = guess if a < guess < b else 0.5 * (a + b)
    for _ in range(200):
        fx = bessel_j(nu, x)
        if fx == 0.0:
            return x
        if (fx > 0) == (fa > 0):
            a, fa = x, fx
        else:
            b = x
        dfx = _bessel_j_prime(nu, x)
        step_ok = False
        if dfx != 0.0:
            x_new = x - fx / dfx
            if a < x_new < b:
                step_ok = True
        if not step_ok:
            x_new = 0.5 * (a + b)
        if abs(x_new - x) <= 4e-16 * x or b - a <= 4e-16 * b:
            return x_new
        x = x_new
    raise ConvergenceError(f"bessel zero refinement for nu={nu} did not converge in [{a}, {b}]")


def bessel_zeros(nu: float, count: int | None = None, below: float | None = None) -> np.ndarray:
    """Positive zeros of J_nu in increasing order.

    Returns the first ``count`` zeros, or every zero strictly below
    ``below``.  Brackets come from a sign scan with step 0.25 (consecutive
    zeros are more than 2 apart for nu >= 0); each bracket is polished by
    Newton with bisection fallback, started at McMahon's expansion.
    """
    if nu < 0:
        raise ValueError("order must be >= 0")
    if (count is None) == (below is None):
        raise ValueError("give exactly one of count / below")
    step = 0.25
    # J_nu > 0 on (0, j_{nu,1}) and j_{nu,1} > nu
    start = max(nu, 0.25)
    zeros: list[float] = []
    chunk = 256
    lo = start
    f_lo = bessel_j(nu, lo)
    if f_lo <= 0:
        raise ConvergenceError(f"unexpected sign of J_{nu} at {lo}")
    while True:
        if below is not None:
            chunk = max(1, min(256, int(math.ceil((below - lo) / step)) + 1))
        grid = lo + step * np.arange(1, chunk + 1)
        vals = bessel_j(nu, grid)
        xs = np.concatenate(([lo], grid))
        fs = np.concatenate(([f_lo], vals))
        for i in range(chunk):
            a, b, fa, fb = xs[i], xs[i + 1], fs[i], fs[i + 1]
            if below is not None and a >= below:
                return np.array(zeros)
            if fa == 0.0:
                continue
            if fb == 0.0 or (fa > 0) != (fb > 0):
                k = len(zeros) + 1
                z = b if fb == 0.0 else _refine_zero(nu, a, fa, b, _mcmahon(nu, k))
                if below is not None and z >= below:
                    return np.array(zeros)
                zeros.append(z)
                if count is not None and len(zeros) == count:
                    return np.array(zeros)
        lo, f_lo = xs[-1], fs[-1]


def bessel_zero(nu: float, k: int) -> float:
    """k-th positive zero j_{nu,k} of J_nu, for nu in [0, 50]."""
    if not 0.0 <= nu <= 50.0:
        raise ValueError(f"bessel_zero: order must lie in [0, 50], got {nu}")
    if int(k) != k or k < 1:
        raise ValueError(f"bessel_zero: k must be a positive integer, got {k}")
    return float(bessel_zeros(nu, count=int(k))[-1])
