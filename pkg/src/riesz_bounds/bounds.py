"""Upper bounds on Riesz means and lower bounds on Dirichlet eigenvalues.

Every function returns the right-hand side only; comparing against a
spectrum is the job of :mod:`riesz_bounds.verify`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import quad

from . import geometry as geo
from .special_functions import ConvergenceError, bessel_zero, gamma, lt, unit_ball_volume
from .spectra import ball_ground_state


class SigmaError(ValueError):
    """sigma lies below the range where a bound is proved."""


# smallest admissible sigma for each bound
SIGMA_MIN = {
    "berezin": 1.0,
    "bound_1d": 1.0,
    "directional": 1.5,
    "melas_type": 1.5,
    "geometric": 1.5,
    "convex_smooth": 1.5,
    "ball": 1.5,
    "convex_2d": 1.5,
    "square": 1.0,
    "melas": 1.0,
}
BOUND_IDS = tuple(SIGMA_MIN)


def _need_sigma(bound_id, sigma):
    smin = SIGMA_MIN[bound_id]
    if not sigma >= smin:
        name = "3/2" if smin == 1.5 else "1"
        raise SigmaError(f"sigma below {name} for this bound ({bound_id}, sigma={sigma})")


@dataclass(frozen=True)
class BoundReport:
    bound_id: str
    sigma: float
    lam: float
    lhs: float
    rhs: float
    rhs_stderr: float = 0.0

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def valid_sigma_min(self) -> float:
        return SIGMA_MIN.get(self.bound_id, 1.0)

    def holds(self, tol: float = 1e-8) -> bool:
        """margin >= -tol for deterministic bounds, >= -3 stderr otherwise."""
        allowed = 3.0 * self.rhs_stderr if self.rhs_stderr > 0 else tol
        return self.margin >= -allowed


class Estimate(NamedTuple):
    value: float
    stderr: float


# ---------------------------------------------------------------------------
# The one-dimensional kernel H_p(Y) = int_1^Y (1 - 1/s^2)^p ds


def h_closed_32(y):
    """H_{3/2}(Y) from the antiderivative
    F(s) = (1 + 1/(2 s^2)) sqrt(s^2 - 1) + (3/2) arctan(1/sqrt(s^2 - 1)),  F(1) = 3 pi / 4.
    """
    y = np.asarray(y, dtype=float)
    yy = np.maximum(y, 1.0)
    r = np.sqrt(yy * yy - 1.0)
    with np.errstate(divide="ignore"):
        F = (1.0 + 0.5 / (yy * yy)) * r + 1.5 * np.arctan2(1.0, r)
    return np.where(y > 1.0, F - 0.75 * math.pi, 0.0)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(96)


def h_integral(p: float, y):
    """H_p(Y) = int_1^Y (1 - 1/s^2)^p ds for Y >= 1 (0 for Y <= 1), vectorised.

    p = 3/2 uses the closed form.  Otherwise s = 1/sin(phi) turns the
    deficit Y - 1 - H_p(Y) into a smooth integral over [arcsin(1/Y), pi/2],
    evaluated by 96-point Gauss-Legendre.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if p == 1.5:
        return h_closed_32(y)
    out = np.zeros_like(y)
    m = y > 1.0
    if np.any(m):
        a = np.arcsin(1.0 / y[m])[:, None]
        b = 0.5 * math.pi
        phi = 0.5 * (b - a) * _GL_X[None, :] + 0.5 * (b + a)
        c = np.cos(phi)
        with np.errstate(divide="ignore"):
            g = c * np.expm1(2.0 * p * np.log(c)) / np.sin(phi) ** 2
        deficit = 0.5 * (b - a[:, 0]) * (g @ _GL_W)
        out[m] = y[m] - 1.0 + deficit
    return out


def h_quad(p: float, y: float, quad_tol: float = 1e-10) -> float:
    """Adaptive-quadrature twin of :func:`h_integral` (scalar)."""
    if y <= 1.0:
        return 0.0
    # (1 - 1/s^2)^p - 1 decays like -p/s^2; integrate the deficit
    val, err = quad(lambda s: -math.expm1(p * math.log1p(-1.0 / (s * s))), 1.0, y,
                    epsabs=quad_tol, epsrel=1e-13, limit=500)
    if err > max(quad_tol, 1e-12 * abs(val)) * 10:
        raise ConvergenceError(f"H_p quadrature error {err} for p={p}, Y={y}")
    return (y - 1.0) - val


# ---------------------------------------------------------------------------
# Upper bounds on Riesz means


def berezin(sigma: float, dim: int, volume: float, lam: float) -> float:
    """L_{sigma,d} |Omega| Lambda^{sigma + d/2}."""
    _need_sigma("berezin", sigma)
    return lt(sigma, dim) * volume * max(lam, 0.0) ** (sigma + dim / 2)


def bound_1d(length: float, sigma: float, lam, quad_tol: float = 1e-10, c: float = 0.25):
    """L_{sigma,1} int_0^l (Lambda - c / delta(t)^2)_+^{sigma+1/2} dt.

    With s = t sqrt(Lambda / c) this is
    2 sqrt(c) L_{sigma,1} Lambda^sigma H_{sigma+1/2}(l sqrt(Lambda) / (2 sqrt c)).
    sigma = 1 uses the closed-form antiderivative; other sigma use adaptive
    quadrature.  ``c`` = 1/4 is the proved constant; other values exist to
    probe sharpness.  Accepts scalar or array ``lam``.
    """
    _need_sigma("bound_1d", sigma)
    scalar = np.isscalar(lam)
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    y = length * np.sqrt(np.maximum(lam, 0.0)) / (2.0 * math.sqrt(c))
    p = sigma + 0.5
    if p == 1.5:
        h = h_closed_32(y)
    else:
        h = np.array([h_quad(p, float(v), quad_tol) for v in y])
    out = 2.0 * math.sqrt(c) * lt(sigma, 1) * np.maximum(lam, 0.0) ** sigma * h
    return float(out[0]) if scalar else out


def _chord_contribution(lengths, p, lam):
    """Integral of (Lambda - 1/(4 d^2))_+^p along a chord of the given length,
    d being the distance to the nearer chord end: Lambda^{p-1/2} H_p(l sqrt Lambda)."""
    return lam ** (p - 0.5) * h_integral(p, np.asarray(lengths) * math.sqrt(lam))


def _midpoint_richardson(f, lo, hi, h):
    n = max(int(math.ceil((hi - lo) / h)), 1)
    if n < 100:
        raise ValueError(f"grid too coarse: {n} transverse cells (need >= 100); decrease grid_h")

    def mid(n):
        step = (hi - lo) / n
        s = lo + step * (np.arange(n) + 0.5)
        return step * float(np.sum(f(s)))

    coarse, fine = mid(n), mid(2 * n)
    return (4.0 * fine - coarse) / 3.0


def bound_directional(domain, u, sigma: float, lam: float, config: geo.EvalConfig | None = None) -> float:
    """L_{sigma,d} int_Omega (Lambda - 1/(4 d(x,u)^2))_+^{sigma+d/2} dx.

    The integral along each chord parallel to u is exact (see
    :func:`h_integral`); the transverse integral uses a midpoint grid with
    spacing ``config.grid_h`` and one Richardson step.  Boxes with an
    axis-parallel u are evaluated in closed form.
    """
    _need_sigma("directional", sigma)
    config = config or geo.EvalConfig()
    d = domain.dim
    p = sigma + d / 2
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if u.shape != (d,) or abs(np.linalg.norm(u) - 1.0) > 1e-12:
        raise geo.DomainError("u must be a unit vector of the domain dimension")
    if lam <= 0:
        return 0.0
    L = lt(sigma, d)
    if isinstance(domain, geo.Interval):
        return L * float(_chord_contribution(domain.length, p, lam)[0])
    if isinstance(domain, geo.Box):
        axis = np.nonzero(np.abs(u) == 1.0)[0]
        if len(axis) == 1:
            a = domain.sides[axis[0]]
            return L * geo.volume(domain) / a * float(_chord_contribution(a, p, lam)[0])
        if d != 2:
            raise geo.DomainError("boxes in d >= 3 need an axis-parallel direction")
        domain = domain.as_polygon()
    if isinstance(domain, geo.Ball):
        r = domain.radius
        if d == 1:
            return L * float(_chord_contribution(2 * r, p, lam)[0])
        sphere = (d - 1) * unit_ball_volume(d - 1)  # |S^{d-2}|
        f = lambda rho: sphere * rho ** (d - 2) * _chord_contribution(2 * np.sqrt(np.maximum(r * r - rho * rho, 0.0)), p, lam)
        return L * _midpoint_richardson(f, 0.0, r, config.grid_h)
    # polygon: transverse coordinate along u_perp
    v = np.array([-u[1], u[0]])
    lo, hi = geo._projection_range(domain, v)

    def f(s):
        out = np.zeros(len(s))
        for i, ch in enumerate(geo._polygon_chords(domain, u, s)):
            if len(ch):
                out[i] = float(np.sum(_chord_contribution(ch[:, 1] - ch[:, 0], p, lam)))
        return out

    return L * _midpoint_richardson(f, lo, hi, config.grid_h)


def bound_melas_type(sigma: float, dim: int, volume: float, l0: float, lam: float) -> float:
    """L_{sigma,d} |Omega| (Lambda - 1/l_0^2)_+^{sigma+d/2}."""
    _need_sigma("melas_type", sigma)
    if not l0 > 0:
        raise ValueError("l0 must be positive")
    return lt(sigma, dim) * volume * max(lam - 1.0 / l0 ** 2, 0.0) ** (sigma + dim / 2)


def bound_geometric(domain, sigma: float, lam: float, config: geo.EvalConfig | None = None,
                    m_estimate: geo.Estimate | None = None) -> Estimate:
    """Berezin term minus L_{sigma,d} 2^{1-d} Lambda^{sigma+d/2} M(Lambda).

    M(Lambda) comes from :func:`geometry.m_lambda` unless a precomputed
    estimate is passed; its standard error propagates linearly.
    """
    _need_sigma("geometric", sigma)
    config = config or geo.EvalConfig()
    d = domain.dim
    m = m_estimate if m_estimate is not None else geo.m_lambda(domain, lam, config)
    factor = lt(sigma, d) * 2.0 ** (1 - d) * lam ** (sigma + d / 2)
    value = lt(sigma, d) * geo.volume(domain) * lam ** (sigma + d / 2) - factor * m.mean
    return Estimate(value, factor * m.stderr)


def convex_smooth_s_integral(beta_: float) -> float:
    """int_0^1 (1 - beta s)_+ ds."""
    return 1.0 - beta_ / 2 if beta_ <= 1.0 else 1.0 / (2.0 * beta_)


def bound_convex_smooth(sigma: float, dim: int, volume: float, perimeter: float,
                        curvature_bound_R: float, lam: float) -> float:
    """Berezin term minus L_{sigma,d} 2^{-d-2} |boundary| Lambda^{sigma+(d-1)/2} int_0^1 (1 - beta s)_+ ds,
    beta = (d-1) / (4 R sqrt Lambda)."""
    _need_sigma("convex_smooth", sigma)
    if not curvature_bound_R > 0:
        raise ValueError("R must be positive")
    if lam <= 0:
        return 0.0
    L = lt(sigma, dim)
    b = (dim - 1) / (4.0 * curvature_bound_R * math.sqrt(lam))
    return (L * volume * lam ** (sigma + dim / 2)
            - L * 2.0 ** (-dim - 2) * perimeter * lam ** (sigma + (dim - 1) / 2) * convex_smooth_s_integral(b))


def c_ba(dim: int) -> float:
    """Boundary constant of the two-term bound on balls."""
    if int(dim) != dim or dim < 2:
        raise ValueError("dim must be an integer >= 2")
    d = int(dim)
    j = math.pi if d == 3 else bessel_zero(d / 2 - 1, 1)
    return (j / (2 ** (d + 1) * d * math.sqrt(math.pi))
            * gamma((d + 4) / 2) / gamma((d + 5) / 2)
            * (1.0 - (1.0 - 1.0 / (4.0 * j)) ** d))


def bound_ball(sigma: float, dim: int, radius: float, lam: float) -> float:
    """L_{sigma,d} |B_r| Lambda^{sigma+d/2} - C_ba L_{sigma,d-1} |dB_r| Lambda^{sigma+(d-1)/2}.

    Returns 0 for Lambda <= lambda_1(B_r), where the trace vanishes (the
    two-term expression turns negative for very small Lambda).
    """
    _need_sigma("ball", sigma)
    d = int(dim)
    if lam <= ball_ground_state(d, radius):
        return 0.0
    vol = unit_ball_volume(d) * radius ** d
    area = d * unit_ball_volume(d) * radius ** (d - 1)
    return (lt(sigma, d) * vol * lam ** (sigma + d / 2)
            - c_ba(d) * lt(sigma, d - 1) * area * lam ** (sigma + (d - 1) / 2))


def c_co() -> float:
    """11/(9 pi^2) - 3/(20 pi^4) - (2/(5 pi^2)) ln(4 pi / 3)."""
    pi2 = math.pi ** 2
    return 11.0 / (9.0 * pi2) - 3.0 / (20.0 * pi2 * pi2) - 2.0 / (5.0 * pi2) * math.log(4.0 * math.pi / 3.0)


def convex_2d_trace_vanishes(width: float, lam: float) -> bool:
    """Lambda <= pi^2 / w^2: every eigenvalue of the convex domain is >= Lambda."""
    return lam <= math.pi ** 2 / width ** 2


def bound_convex_2d(sigma: float, volume: float, perimeter: float, width: float, lam: float) -> float:
    """L_{sigma,2} |Omega| Lambda^{sigma+1} - C_co L_{sigma,1} |dOmega| Lambda^{sigma+1/2},
    or 0 when Lambda <= pi^2 / w^2 (inclusive)."""
    _need_sigma("convex_2d", sigma)
    if convex_2d_trace_vanishes(width, lam):
        return 0.0
    return lt(sigma, 2) * volume * lam ** (sigma + 1) - c_co() * lt(sigma, 1) * perimeter * lam ** (sigma + 0.5)


def bound_square(side: float, sigma: float, lam: float, c_sq: float = 0.1,
                 config: geo.EvalConfig | None = None) -> float:
    """L_{sigma,2} int_Q (Lambda - C (1/delta(x_1) + 1/delta(x_2))^2)_+^{sigma+1} dx on the square of side l,
    delta(t) = min(t, l - t).

    By the 8-fold symmetry the integral is 8 times the integral over
    0 < y < x < l/2; with K = sqrt(Lambda / C) the support is
    x > 2/K, y > 1/(K - 1/x).  Tensor-product Gauss-Legendre is doubled
    until two levels agree to ``config.quad_tol`` (absolute) or 1e-12
    (relative).
    """
    _need_sigma("square", sigma)
    if not 0 < c_sq <= 0.25:
        raise ValueError("c_sq must lie in (0, 1/4]")
    config = config or geo.EvalConfig()
    if lam <= 0:
        return 0.0
    K = math.sqrt(lam / c_sq)
    half = side / 2
    x_lo = 2.0 / K
    if x_lo >= half:
        return 0.0
    q = sigma + 1

    def integral(n):
        gx, gw = np.polynomial.legendre.leggauss(n)
        x = 0.5 * (half - x_lo) * gx + 0.5 * (half + x_lo)
        wx = 0.5 * (half - x_lo) * gw
        y_lo = 1.0 / (K - 1.0 / x)
        y = 0.5 * (x - y_lo)[:, None] * gx[None, :] + 0.5 * (x + y_lo)[:, None]
        wy = 0.5 * (x - y_lo)[:, None] * gw[None, :]
        f = np.maximum(lam - c_sq * (1.0 / x[:, None] + 1.0 / y) ** 2, 0.0) ** q
        return 8.0 * float(np.sum(wx * np.sum(wy * f, axis=1)))

    n = 32
    prev = integral(n)
    while n < 2048:
        n *= 2
        cur = integral(n)
        if abs(cur - prev) <= max(config.quad_tol, 1e-12 * abs(cur)):
            return lt(sigma, 2) * cur
        prev = cur
    raise ConvergenceError("square-bound quadrature did not settle")


def melas(sigma: float, dim: int, volume: float, second_moment: float, m_d: float, lam: float) -> float:
    """L_{sigma,d} |Omega| (Lambda - m_d |Omega| / I(Omega))_+^{sigma+d/2}, m_d supplied by the caller."""
    _need_sigma("melas", sigma)
    if m_d < 0:
        raise ValueError("m_d must be >= 0")
    shift = m_d * volume / second_moment
    return lt(sigma, dim) * volume * max(lam - shift, 0.0) ** (sigma + dim / 2)


# ---------------------------------------------------------------------------
# Lower bounds on eigenvalues


def ground_state_lower(l0: float) -> float:
    """pi^2 / l_0^2."""
    return math.pi ** 2 / l0 ** 2


def counting_prefactor(dim: int) -> float:
    """(d+3)^{(d+3)/2} / (3^{3/2} d^{d/2}) L_{3/2,d}."""
    d = dim
    return lt(1.5, d) * (d + 3) ** ((d + 3) / 2) / (3 ** 1.5 * d ** (d / 2))


def counting_tau_min(dim: int, l0: float, lam: float) -> float:
    """Minimiser in tau of the order-3/2 bound on N(Lambda) at Lambda + tau."""
    return 3.0 * (lam - 1.0 / l0 ** 2) / dim


def counting_upper(dim: int, volume: float, l0: float, lam: float) -> float:
    """Upper bound on N(Lambda): prefactor |Omega| (Lambda - 1/l_0^2)_+^{d/2}."""
    return counting_prefactor(dim) * volume * max(lam - 1.0 / l0 ** 2, 0.0) ** (dim / 2)


def semiclassical_cd(dim: int) -> float:
    """C_d = 4 pi Gamma(d/2 + 1)^{2/d}."""
    return 4.0 * math.pi * gamma(dim / 2 + 1) ** (2.0 / dim)


def lower_li_yau(dim: int, volume: float, k: int) -> float:
    """C_d d/(d+2) (k/|Omega|)^{2/d}."""
    return semiclassical_cd(dim) * dim / (dim + 2) * (k / volume) ** (2.0 / dim)


def nsimple_coefficient(dim: int) -> float:
    d = dim
    return (semiclassical_cd(d) * (12.0 / math.pi) ** (1.0 / d) * d / (d + 3) ** (1.0 + 1.0 / d)
            * (gamma((d + 3) / 2) / gamma(d / 2 + 1)) ** (2.0 / d))


def lower_nsimple(dim: int, volume: float, l0: float, k: int) -> float:
    """Coefficient (k/|Omega|)^{2/d} + 1/l_0^2."""
    return nsimple_coefficient(dim) * (k / volume) ** (2.0 / dim) + 1.0 / l0 ** 2


def lower_nconvex(volume: float, perimeter: float, k: int, alpha: float) -> float:
    """Lower bound on lambda_k for convex planar domains at a fixed alpha in (0, 1)."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    C = c_co()
    q = perimeter / volume
    x = 10.0 * math.pi * alpha ** 1.5 * k / volume
    return (1.0 - alpha) * (x + (15.0 * math.pi * C / 8.0) * q * math.sqrt(x + (225.0 * math.pi ** 2 * C ** 2 / 256.0) * q * q)
                            + (225.0 * math.pi ** 2 * C ** 2 / 128.0) * q * q)


class AlphaOpt(NamedTuple):
    alpha_star: float
    value: float


def _golden_max(f, a, b, tol):
    g = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def lower_nconvex_opt(volume: float, perimeter: float, k: int) -> AlphaOpt:
    """Maximise :func:`lower_nconvex` over alpha.

    A 64-point pre-scan checks unimodality; golden-section search then
    refines the best bracket to 1e-10.  A non-unimodal scan switches to a
    dense 10^4-point grid before refining.
    """
    f = lambda a: lower_nconvex(volume, perimeter, k, a)
    grid = (np.arange(64) + 0.5) / 64
    vals = np.array([f(a) for a in grid])
    diffs = np.sign(np.diff(vals))
    unimodal = np.all(np.diff(diffs[diffs != 0]) <= 0)
    if not unimodal:
        grid = (np.arange(10_000) + 0.5) / 10_000
        vals = np.array([f(a) for a in grid])
    i = int(np.argmax(vals))
    step = grid[1] - grid[0]
    lo = max(grid[i] - step, 1e-15)
    hi = min(grid[i] + step, 1.0 - 1e-15)
    alpha, value = _golden_max(f, lo, hi, 1e-10)
    if value < vals[i]:
        alpha, value = float(grid[i]), float(vals[i])
    return AlphaOpt(float(alpha), float(value))
