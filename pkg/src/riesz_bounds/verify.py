"""Numerical checks of the inequalities and of the auxiliary one-dimensional
estimates, plus the harness that runs bounds against spectra."""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import bounds as bd
from . import geometry as geo
from . import spectra as sp
from .riesz import riesz_mean
from .special_functions import gamma, lt


@dataclass
class VerificationReport:
    check_id: str
    inputs: dict
    observed: list
    expected: list
    passed: bool
    tolerance: float
    notes: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.check_id}"


# ---------------------------------------------------------------------------
# The one-dimensional difference f(Lambda)


FIGURE1_LENGTH = math.pi


def figure1_grid(step: float = 0.01, lo: float = 1.0, hi: float = 112.0) -> np.ndarray:
    """Cell midpoints lo + step/2, lo + 3 step/2, ... strictly inside (lo, hi)."""
    n = int(round((hi - lo) / step))
    return lo + step * (np.arange(n) + 0.5)


@dataclass
class Figure1Series:
    lam: np.ndarray
    f: np.ndarray
    minima: np.ndarray  # Lambda values of the discrete local minima

    @property
    def min_value(self) -> float:
        return float(np.min(self.f))


def local_minima(y: np.ndarray) -> np.ndarray:
    """Indices where the discrete slope changes from negative to positive."""
    s = np.sign(np.diff(y))
    # carry the previous slope sign across exactly flat steps
    for i in range(1, len(s)):
        if s[i] == 0:
            s[i] = s[i - 1]
    return np.nonzero((s[:-1] < 0) & (s[1:] > 0))[0] + 1


def figure1(lambda_grid=None) -> Figure1Series:
    """f(Lambda) = 1D bound minus the Riesz mean of order 1 on (0, pi)."""
    lam = figure1_grid() if lambda_grid is None else np.asarray(lambda_grid, dtype=float)
    if len(lam) < 1000 or lam.min() <= 1.0 or lam.max() >= 112.0:
        raise ValueError("figure1 grid needs >= 1000 points inside (1, 112)")
    spec = sp.interval_spectrum(FIGURE1_LENGTH, 112.0)
    f = bd.bound_1d(FIGURE1_LENGTH, 1.0, lam) - riesz_mean(spec, 1.0, lam)
    return Figure1Series(lam, f, lam[local_minima(f)])


def check_figure1(lambda_grid=None, tol: float = 1e-10) -> VerificationReport:
    s = figure1(lambda_grid)
    ok = s.min_value >= -tol and len(s.minima) == 10
    return VerificationReport(
        "figure1", {"length": FIGURE1_LENGTH, "sigma": 1.0, "points": len(s.lam)},
        [s.min_value, len(s.minima)], [">= 0", 10], bool(ok), tol,
        "minima at " + ", ".join(f"{m:.3f}" for m in s.minima))


# ---------------------------------------------------------------------------
# Elementary sum/integral estimate


def elementary_lhs(A: float) -> float:
    k = np.arange(1, int(math.floor(A)) + 1)
    return float(np.sum(np.maximum(1.0 - k * k / (A * A), 0.0)))


def elementary_lhs_parts(A: float) -> float:
    """The same sum through integer part Abar and fractional part Atilde."""
    ab = math.floor(A)
    at = A - ab
    return (2 * A / 3 - 0.5 - 1 / (6 * A) + at * (1 - at) / A
            + at * (1 - 3 * at + 2 * at * at) / (6 * A * A))


def elementary_rhs(A: float) -> float:
    """(2/(3 pi)) int_1^{pi A} (1 - 1/s^2)^{3/2} ds in closed form."""
    y = math.pi * A
    if y <= 1.0:
        return 0.0
    r = math.sqrt(y * y - 1)
    return (2 * y * y + 1) / (3 * math.pi ** 2 * A) * r / y + math.atan(1 / r) / math.pi - 0.5


def sum_upper(A: float) -> float:
    return 2 * A / 3 - 0.5 + 1 / (12 * A) + math.sqrt(3) / (108 * A * A)


_A_CONST = 16 - 2 / math.pi ** 2 - 8 * math.sqrt(4 * math.pi ** 2 - 1) / math.pi


def integral_lower(A: float) -> float:
    a = _A_CONST
    return (2 * A / 3 - 0.5 + 1 / (math.pi ** 2 * A) - 1 / (6 * math.pi ** 4 * A ** 3)
            - a / 3 * (2 / A ** 3 + 1 / (math.pi ** 2 * A ** 5)))


def closing_polynomial(A: float) -> float:
    a = _A_CONST
    return ((1 / math.pi ** 2 - 1 / 12) * A ** 4 - math.sqrt(3) / 108 * A ** 3
            - (1 / (6 * math.pi ** 4) + 2 * a / 3) * A ** 2 - a / (3 * math.pi ** 2))


def check_lemma_elementary(a_grid=(1 / math.pi, 0.5, 1.0, 1.5, 2.0, 10.0, 100.0),
                           tol: float = 1e-12) -> VerificationReport:
    """Main inequality for every A; the exact split of the sum and the sum
    estimate for every A; the integral estimate, the two elementary
    inequalities behind it and the closing polynomial for A >= 2."""
    observed, expected, failures = [], [], []
    for A in a_grid:
        A = float(A)
        if A < 1 / math.pi - 1e-15:
            raise ValueError("A must be >= 1/pi")
        lhs, rhs = elementary_lhs(A), elementary_rhs(A)
        observed.append({"A": A, "lhs": lhs, "rhs": rhs})
        expected.append("lhs <= rhs")
        conds = {
            "main": lhs <= rhs + tol,
            "split": abs(elementary_lhs_parts(A) - lhs) <= 1e-12 * max(1.0, A),
            "sum": lhs <= sum_upper(A) + tol,
        }
        if A >= 2:
            y = math.pi * A
            conds["integral"] = rhs >= integral_lower(A) - tol
            conds["arctan"] = math.atan(1 / math.sqrt(y * y - 1)) >= 1 / y - tol
            conds["sqrt"] = math.sqrt(y * y - 1) / y >= 1 - 1 / (2 * y * y) - _A_CONST / A ** 4 - tol
            conds["polynomial"] = closing_polynomial(A) >= -tol
        failures += [f"{name}@A={A:g}" for name, ok in conds.items() if not ok]
    return VerificationReport("lemma_elementary", {"A": list(map(float, a_grid))}, observed, expected,
                              not failures, tol, "; ".join(failures))


# ---------------------------------------------------------------------------
# Large-Lambda behaviour of the 1D difference


def beta_signed(a: float, b: float) -> float:
    """B(a, b) for a in (-1, 0) and b > 0 via Gamma(a) = Gamma(a + 1) / a."""
    return gamma(a + 1) / a * gamma(b) / gamma(a + b)


def h_limit_constant(p: float) -> float:
    """lim (H_p(Y) - Y) as Y -> infinity, equal to B(-1/2, p + 1) / 2."""
    return 0.5 * beta_signed(-0.5, p + 1)


def normalized_difference(c: float, sigma: float, lam, length: float = math.pi) -> np.ndarray:
    """D(Lambda) / Lambda^sigma for the interval of the given length."""
    lam = np.asarray(lam, dtype=float)
    y = length * np.sqrt(lam) / (2 * math.sqrt(c))
    integral = 2 * math.sqrt(c) * lt(sigma, 1) * bd.h_integral(sigma + 0.5, y)
    A = length * np.sqrt(lam) / math.pi
    out = np.empty(len(lam))
    for i, a in enumerate(A):
        k = np.arange(1, int(math.floor(a)) + 1)
        out[i] = integral[i] - float(np.sum(np.maximum(1.0 - k * k / (a * a), 0.0) ** sigma))
    return out


def asympt_grid(lam_max: float = 1e6, length: float = math.pi, per_unit: int = 20) -> np.ndarray:
    """Lambda values over the dyadic window [lam_max/2, lam_max], uniform in
    A = l sqrt(Lambda) / pi with ``per_unit`` samples per unit of A (the
    period of the oscillation)."""
    a0 = length * math.sqrt(lam_max / 2) / math.pi
    a1 = length * math.sqrt(lam_max) / math.pi
    A = np.linspace(a0, a1, int((a1 - a0) * per_unit) + 1)
    return (math.pi * A / length) ** 2


def check_lemma_asympt(c: float, sigma: float = 1.0, lambda_sequence=None, length: float = math.pi,
                       tol: float = 0.02) -> VerificationReport:
    """Cesaro mean of D(Lambda)/Lambda^sigma over the last dyadic window of the
    sequence against the limit 1/2 - sqrt(c)."""
    lam = asympt_grid(1e6, length) if lambda_sequence is None else np.asarray(lambda_sequence, dtype=float)
    if np.any(np.diff(lam) <= 0):
        raise ValueError("lambda_sequence must be increasing")
    window = lam >= lam[-1] / 2
    vals = normalized_difference(c, sigma, lam[window], length)
    mean = float(np.mean(vals))
    limit = 0.5 - math.sqrt(c)
    return VerificationReport(
        f"lemma_asympt(c={c:g},sigma={sigma:g})", {"c": c, "sigma": sigma, "lambda_max": float(lam[-1])},
        [mean], [limit], abs(mean - limit) <= tol, tol,
        f"window [{lam[window][0]:.6g}, {lam[-1]:.6g}], {int(window.sum())} points, "
        f"spread {float(vals.max() - vals.min()):.3g}")


def first_violation(length: float, sigma: float, c: float, lam_max: float, per_unit: int = 8):
    """Smallest Lambda on a fine grid where the 1D bound with constant c falls
    below the Riesz mean, or None."""
    A = np.arange(1.0, length * math.sqrt(lam_max) / math.pi, 1.0 / per_unit)
    lam = (math.pi * A / length) ** 2
    gap = normalized_difference(c, sigma, lam, length)
    bad = np.nonzero(gap < 0)[0]
    return float(lam[bad[0]]) if len(bad) else None


# ---------------------------------------------------------------------------
# Inner parallel perimeter hypothesis


def check_innerwidth(domain, t_grid=None, rel_tol: float = 1e-12) -> VerificationReport:
    """|boundary of Omega_t| >= (1 - 3t/w)_+ |boundary of Omega| on a t grid."""
    w = geo.min_width(domain)
    P = geo.perimeter(domain)
    t = np.linspace(w / 100, w, 100) if t_grid is None else np.asarray(t_grid, dtype=float)
    lhs = np.array([geo.inner_parallel_perimeter(domain, float(s)) for s in t])
    rhs = np.maximum(1 - 3 * t / w, 0.0) * P
    slack = lhs - rhs
    worst = float(slack.min())
    return VerificationReport(
        "innerwidth", {"domain": geo.domain_to_json(domain), "points": len(t)},
        [worst], [">= 0"], worst >= -rel_tol * P, rel_tol,
        f"width {w:.12g}, worst slack at t = {float(t[int(np.argmin(slack))]):.6g}")


def m_lambda_trend(domain, lambdas, config: geo.EvalConfig | None = None):
    """sqrt(Lambda) M(Lambda) with its standard error, for reporting only."""
    out = []
    for lam in lambdas:
        est = geo.m_lambda(domain, float(lam), config)
        out.append((float(lam), math.sqrt(lam) * est.mean, math.sqrt(lam) * est.stderr))
    return out


# ---------------------------------------------------------------------------
# Harness


class HarnessError(ValueError):
    pass


@dataclass
class HarnessCase:
    domain: object
    bound_id: str
    sigma: float
    lambdas: tuple
    params: dict = field(default_factory=dict)
    label: str = ""

    @property
    def check_id(self) -> str:
        name = self.label or geo.domain_to_json(self.domain)["kind"]
        return f"{name}:{self.bound_id}:sigma={self.sigma:g}"


def lambda_grid(lo: float, hi: float, count: int, spacing: str = "log") -> np.ndarray:
    if count < 1 or not 0 < lo <= hi:
        raise ValueError("need 0 < min <= max and count >= 1")
    if spacing == "log":
        return np.geomspace(lo, hi, count)
    if spacing == "linear":
        return np.linspace(lo, hi, count)
    raise ValueError(f"spacing must be 'log' or 'linear', got {spacing!r}")


def applicable_bounds(domain) -> list:
    """Bounds whose hypotheses hold for the domain (square and disk get the most)."""
    ids = ["berezin", "directional", "melas_type", "geometric"]
    if isinstance(domain, geo.Interval):
        return ["berezin", "bound_1d", "directional", "melas_type"]
    if isinstance(domain, geo.Ball):
        ids += ["ball"]
        if domain.dim == 2:
            ids += ["convex_smooth", "convex_2d"]
        elif domain.dim >= 2:
            ids += ["convex_smooth"]
    if isinstance(domain, geo.Box) and domain.dim == 2:
        ids += ["convex_2d"]
        if domain.sides[0] == domain.sides[1]:
            ids += ["square"]
    if isinstance(domain, geo.Polygon) and domain.convex:
        ids += ["convex_2d"]
    return ids


class _Context:
    """Per-run caches: spectra, geometric statistics, M(Lambda) estimates."""

    def __init__(self, config):
        self.config = config
        self.spectra = {}
        self.stats = {}
        self.m = {}
        self.innerwidth = {}

    def key(self, domain):
        return json.dumps(geo.domain_to_json(domain), sort_keys=True)

    def spectrum(self, case, lam_max):
        spec = case.params.get("spectrum")
        if spec is not None:
            return spec
        k = (self.key(case.domain), lam_max)
        if k not in self.spectra:
            self.spectra[k] = sp.spectrum_for(case.domain, lam_max)
        return self.spectra[k]

    def geom(self, domain):
        k = self.key(domain)
        if k not in self.stats:
            self.stats[k] = geo.geom_stats(domain, self.config)
        return self.stats[k]

    def m_lambda(self, domain, lam):
        k = (self.key(domain), float(lam))
        if k not in self.m:
            self.m[k] = geo.m_lambda(domain, float(lam), self.config)
        return self.m[k]

    def innerwidth_ok(self, domain):
        k = self.key(domain)
        if k not in self.innerwidth:
            self.innerwidth[k] = check_innerwidth(domain).passed
        return self.innerwidth[k]


def _rhs(case: HarnessCase, lam: float, ctx: _Context):
    d, cfg, P = case.domain, ctx.config, case.params
    sigma = case.sigma
    bid = case.bound_id
    if bid not in bd.SIGMA_MIN:
        raise HarnessError(f"unknown bound_id {bid!r}")
    bd._need_sigma(bid, sigma)
    g = ctx.geom(d)
    if bid == "berezin":
        return bd.berezin(sigma, d.dim, g.volume, lam), 0.0
    if bid == "bound_1d":
        if not isinstance(d, geo.Interval):
            raise HarnessError("bound_1d applies to intervals only")
        return bd.bound_1d(d.length, sigma, lam, cfg.quad_tol), 0.0
    if bid == "directional":
        u = P.get("u", [1.0] + [0.0] * (d.dim - 1))
        return bd.bound_directional(d, u, sigma, lam, cfg), 0.0
    if bid == "melas_type":
        return bd.bound_melas_type(sigma, d.dim, g.volume, g.width, lam), 0.0
    if bid == "geometric":
        est = bd.bound_geometric(d, sigma, lam, cfg, m_estimate=ctx.m_lambda(d, lam))
        return est.value, est.stderr
    if bid == "convex_smooth":
        R = P.get("R", d.radius if isinstance(d, geo.Ball) else None)
        if R is None:
            raise HarnessError("convex_smooth needs a curvature radius R")
        return bd.bound_convex_smooth(sigma, d.dim, g.volume, g.perimeter, R, lam), 0.0
    if bid == "ball":
        if not isinstance(d, geo.Ball):
            raise HarnessError("ball bound applies to balls only")
        return bd.bound_ball(sigma, d.dim, d.radius, lam), 0.0
    if bid == "convex_2d":
        if d.dim != 2 or not d.convex:
            raise HarnessError("convex_2d needs a convex planar domain")
        if not ctx.innerwidth_ok(d):
            raise HarnessError("domain fails the inner-parallel perimeter hypothesis; convex_2d not certified")
        return bd.bound_convex_2d(sigma, g.volume, g.perimeter, g.width, lam), 0.0
    if bid == "square":
        if not (isinstance(d, geo.Box) and d.dim == 2 and d.sides[0] == d.sides[1]):
            raise HarnessError("square bound applies to squares only")
        return bd.bound_square(d.sides[0], sigma, lam, P.get("c_sq", 0.1), cfg), 0.0
    if bid == "melas":
        if "m_d" not in P:
            raise HarnessError("melas needs the constant m_d")
        return bd.melas(sigma, d.dim, g.volume, g.second_moment, P["m_d"], lam), 0.0
    raise HarnessError(f"unhandled bound {bid}")


def _run_case(case: HarnessCase, ctx: _Context):
    lams = [float(x) for x in case.lambdas]
    spec = ctx.spectrum(case, max(lams))
    out = []
    for lam in lams:
        lhs = riesz_mean(spec, case.sigma, lam)
        rhs, err = _rhs(case, lam, ctx)
        out.append(bd.BoundReport(case.bound_id, case.sigma, lam, lhs, rhs, err))
    return out


def run_harness(matrix, config: geo.EvalConfig | None = None, jobs: int = 1):
    """Evaluate each case; returns a list of (case, [BoundReport, ...]).

    Spectra and M(Lambda) estimates are computed once per domain (and per
    Lambda) up front so that cases can run concurrently without sharing
    random streams.
    """
    config = config or geo.EvalConfig()
    ctx = _Context(config)
    matrix = list(matrix)
    # warm caches sequentially: results do not depend on the job count
    for case in matrix:
        ctx.geom(case.domain)
        if case.bound_id == "geometric":
            for lam in case.lambdas:
                ctx.m_lambda(case.domain, lam)
        ctx.spectrum(case, max(float(x) for x in case.lambdas))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(lambda c: _run_case(c, ctx), matrix))
    else:
        results = [_run_case(c, ctx) for c in matrix]
    return list(zip(matrix, results))


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["bound_id", "sigma", "lambda", "lhs", "rhs", "rhs_stderr", "margin"])
    for r in reports:
        w.writerow([r.bound_id] + [f"{v:.17g}" for v in (r.sigma, r.lam, r.lhs, r.rhs, r.rhs_stderr, r.margin)])
    return buf.getvalue()


def harness_summary(results, tol: float = 1e-8) -> dict:
    """{check_id: {"pass": bool, "worst_margin": float}}."""
    out = {}
    for case, reports in results:
        worst = min((r.margin for r in reports), default=0.0)
        out[case.check_id] = {"pass": all(r.holds(tol) for r in reports), "worst_margin": worst}
    return out
