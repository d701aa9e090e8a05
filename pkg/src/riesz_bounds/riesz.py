"""Riesz means, counting functions and the Aizenman-Lieb lifting identity."""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy.integrate import quad

from .special_functions import ConvergenceError, beta
from .spectra import Spectrum


class CutoffError(ValueError):
    """Lambda lies above the cutoff where the spectrum is known to be complete."""


def _check_cutoff(spectrum: Spectrum, lam):
    lam_max = float(np.max(lam))
    if lam_max > spectrum.lambda_max:
        raise CutoffError(f"lambda = {lam_max} exceeds the spectrum cutoff {spectrum.lambda_max}")


def riesz_mean(spectrum: Spectrum, sigma: float, lam):
    """sum_k (Lambda - lambda_k)_+^sigma; sigma = 0 counts lambda_k < Lambda.

    ``lam`` may be a scalar or an array.  (x)_+ is 0 at x = 0 for every
    sigma, including sigma = 0.
    """
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    scalar = np.isscalar(lam)
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    _check_cutoff(spectrum, lam_arr)
    ev = spectrum.eigenvalues
    out = np.empty(len(lam_arr))
    for i, L in enumerate(lam_arr):
        n = int(np.searchsorted(ev, L, side="left"))
        if sigma == 0:
            out[i] = n
        else:
            out[i] = float(np.sum((L - ev[:n]) ** sigma))
    return float(out[0]) if scalar else out


def counting(spectrum: Spectrum, lam: float) -> int:
    """N(Lambda) = #{k : lambda_k < Lambda}."""
    return int(riesz_mean(spectrum, 0.0, float(lam)))


class LiftingCheck(NamedTuple):
    direct: float
    lifted: float


def aizenman_lieb_check(spectrum: Spectrum, sigma: float, lam: float, quad_tol: float = 1e-10) -> LiftingCheck:
    """Compare the Riesz mean of order sigma with its lifted first-order form

        (1 / B(2, sigma-1)) int_0^inf tau^{sigma-2} sum_k (Lambda - tau - lambda_k)_+ dtau.

    The integral is split at the kinks tau = Lambda - lambda_k and each piece
    is integrated adaptively.
    """
    if not sigma > 1:
        raise ValueError("the lifting identity needs sigma > 1")
    direct = riesz_mean(spectrum, sigma, lam)
    ev = spectrum.eigenvalues
    active = ev[ev < lam]
    if len(active) == 0:
        return LiftingCheck(direct, 0.0)
    kinks = np.unique(np.concatenate([[0.0], lam - active]))
    csum = np.cumsum(active)

    total = 0.0
    err = 0.0
    pieces = len(kinks) - 1
    for a, b in zip(kinks[:-1], kinks[1:]):
        mid = 0.5 * (a + b)
        n = int(np.searchsorted(active, lam - mid, side="left"))
        s = csum[n - 1] if n else 0.0
        # on (a, b) the first-order mean is n (Lambda - tau) - s
        tol = dict(epsabs=quad_tol / (4 * pieces), epsrel=1e-13, limit=200)
        if a == 0.0:
            # algebraic weight absorbs the tau^{sigma-2} endpoint singularity
            val, e = quad(lambda t: n * (lam - t) - s, a, b, weight="alg", wvar=(sigma - 2, 0.0), **tol)
        else:
            val, e = quad(lambda t: t ** (sigma - 2) * (n * (lam - t) - s), a, b, **tol)
        total += val
        err += e
    # the budget is absolute for small means and relative for large ones
    if err > max(quad_tol, 1e-10 * abs(total)):
        raise ConvergenceError(f"lifting quadrature error estimate {err} exceeds {quad_tol}")
    lifted = total / beta(2.0, sigma - 1.0)
    return LiftingCheck(direct, lifted)
