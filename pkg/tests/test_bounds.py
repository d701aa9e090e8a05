import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import dblquad, quad

from riesz_bounds import bounds as b
from riesz_bounds import geometry as geo
from riesz_bounds import spectra as sp
from riesz_bounds.riesz import counting, riesz_mean
from riesz_bounds.special_functions import lt

PI = math.pi
SQ_SPEC = sp.box_spectrum((1, 1), 2000)
DISK_SPEC = sp.disk_spectrum(1, 2000)


# -- kernel H_p: closed form, Gauss-Legendre and adaptive quadrature ----------

@pytest.mark.parametrize("y", [1.0, 1.0001, 1.5, 2 * PI, 37.0, 1e4])
def test_h32_closed_form_vs_quad(y):
    assert b.h_closed_32(y) == pytest.approx(b.h_quad(1.5, y), rel=1e-11, abs=1e-13)


@pytest.mark.parametrize("p", [1.0, 1.25, 2.0, 2.5, 3.0, 4.5])
@pytest.mark.parametrize("y", [1.01, 3.0, 50.0, 5e3])
def test_h_integral_vs_quad(p, y):
    assert b.h_integral(p, y)[0] == pytest.approx(b.h_quad(p, y), rel=1e-11, abs=1e-13)


def test_h_integral_p1_closed_form():
    y = np.array([1.5, 4.0, 100.0])
    assert b.h_integral(1.0, y) == pytest.approx(y + 1 / y - 2, rel=1e-13)


def test_h_vanishes_below_one():
    assert b.h_closed_32(0.3) == 0.0
    assert b.h_integral(2.0, [0.5, 1.0]) == pytest.approx([0.0, 0.0])


# -- Berezin and one-dimensional bound ---------------------------------------

def test_berezin_examples():
    assert b.berezin(1, 2, 1, 1) == pytest.approx(1 / (8 * PI), rel=1e-14)
    assert b.berezin(1.5, 1, PI, 1) == pytest.approx(3 * PI / 16, rel=1e-14)
    assert b.berezin(1, 2, 1, 1e-12) < 1e-20


def _bound_1d_oracle(length, sigma, lam, c=0.25):
    """Direct quadrature of the original integrand over the interval."""
    t0 = math.sqrt(c / lam) if lam > 0 else length
    if t0 >= length / 2:
        return 0.0
    f = lambda t: max(lam - c / t ** 2, 0.0) ** (sigma + 0.5)
    val = quad(f, t0, length / 2, epsabs=1e-13, epsrel=1e-13, limit=500)[0]
    return 2 * lt(sigma, 1) * val


@pytest.mark.parametrize("sigma", [1, 1.5, 2])
@pytest.mark.parametrize("length,lam", [(PI, 5.0), (1.0, 40.0), (7.0, 0.3), (PI, 111.3)])
def test_bound_1d_vs_direct_integral(length, sigma, lam):
    assert b.bound_1d(length, sigma, lam) == pytest.approx(_bound_1d_oracle(length, sigma, lam), rel=1e-9)


def test_bound_1d_examples():
    assert b.bound_1d(PI, 1, 0.05) == 0
    spec = sp.interval_spectrum(PI, 10)
    assert b.bound_1d(PI, 1, 5) >= riesz_mean(spec, 1, 5) == 5
    # frozen from 50-digit arithmetic
    assert b.bound_1d(PI, 1, 5) == pytest.approx(5.17973760908239, rel=1e-12)
    assert b.bound_1d(PI, 1.5, 5) == pytest.approx(9.73086093564521, rel=1e-10)
    assert b.bound_1d(PI, 2, 5) == pytest.approx(18.8170104505049, rel=1e-10)


def test_bound_1d_vectorised():
    lam = np.linspace(0.5, 50, 20)
    v = b.bound_1d(1.0, 1, lam)
    assert v == pytest.approx([b.bound_1d(1.0, 1, float(x)) for x in lam])


def test_bound_1d_sharpness_direction():
    # the normalized gap tends to 0 for c = 1/4: its running max over [L, 2L] drops below 0.1 by 1e4
    lam = np.linspace(5e3, 1e4, 20001)
    spec = sp.interval_spectrum(PI, 1e4)
    gap = (b.bound_1d(PI, 1, lam) - riesz_mean(spec, 1, lam)) / lam
    assert gap.max() < 0.1
    assert gap.min() >= -1e-10


# -- directional bound ---------------------------------------------------------

@pytest.mark.parametrize("sigma", [1.5, 2, 2.5])
def test_directional_interval_equals_bound_1d(sigma):
    for lam in (0.5, 7.0, 300.0):
        assert b.bound_directional(geo.Interval(PI), [1.0], sigma, lam) == pytest.approx(
            b.bound_1d(PI, sigma, lam), rel=1e-9)


def test_directional_square_examples():
    sq = geo.Box((1, 1))
    assert b.bound_directional(sq, [1, 0], 1.5, 0.9) == 0
    v = b.bound_directional(sq, [1, 0], 1.5, 100)
    assert v >= riesz_mean(SQ_SPEC, 1.5, 100)
    assert v == pytest.approx(2324.98, rel=1e-5)


def test_directional_polygon_path_matches_box_closed_form():
    sq = geo.Box((1, 2))
    cfg = geo.EvalConfig(grid_h=1e-3)
    exact = b.bound_directional(sq, [1, 0], 1.5, 80)
    via_poly = b.bound_directional(sq.as_polygon(), [1, 0], 1.5, 80, cfg)
    assert via_poly == pytest.approx(exact, rel=1e-9)


def test_directional_disk_vs_2d_quadrature():
    lam, sigma = 50.0, 1.5
    p = sigma + 1

    def f(x, y):
        a = math.sqrt(max(1 - y * y, 0.0))
        d = a - abs(x)
        return max(lam - 1 / (4 * d * d), 0.0) ** p if d > 0 else 0.0

    ref = lt(sigma, 2) * dblquad(f, -1, 1, lambda y: -math.sqrt(1 - y * y), lambda y: math.sqrt(1 - y * y),
                                 epsabs=1e-7, epsrel=1e-9)[0]
    val = b.bound_directional(geo.Ball(2, 1), [1, 0], sigma, lam)
    assert val == pytest.approx(ref, rel=1e-6)
    assert val >= riesz_mean(DISK_SPEC, sigma, lam)


def test_directional_disk_rotation_invariance():
    poly = geo.regular_polygon(720, 1.0)
    cfg = geo.EvalConfig(grid_h=2e-3)
    a = b.bound_directional(poly, [1, 0], 1.5, 50, cfg)
    c = b.bound_directional(poly, [0, 1], 1.5, 50, cfg)
    assert a == pytest.approx(c, rel=1e-4)
    disk = b.bound_directional(geo.Ball(2, 1), [0, 1], 1.5, 50)
    assert disk == pytest.approx(b.bound_directional(geo.Ball(2, 1), [1, 0], 1.5, 50), rel=1e-14)


def test_directional_rejects_coarse_grid_and_bad_u():
    with pytest.raises(ValueError, match="coarse"):
        b.bound_directional(geo.l_shape(), [1, 0], 1.5, 50, geo.EvalConfig(grid_h=0.5))
    with pytest.raises(geo.DomainError):
        b.bound_directional(geo.Box((1, 1)), [1, 1], 1.5, 50)


# -- sigma preconditions --------------------------------------------------------

@pytest.mark.parametrize("call", [
    lambda: b.bound_directional(geo.Box((1, 1)), [1, 0], 1.2, 10),
    lambda: b.bound_melas_type(1.4, 2, 1, 1, 10),
    lambda: b.bound_ball(1.2, 2, 1, 10),
    lambda: b.bound_convex_2d(1.0, 1, 4, 1, 10),
    lambda: b.bound_convex_smooth(1.49, 2, PI, 2 * PI, 1, 10),
    lambda: b.bound_geometric(geo.Box((1, 1)), 1.2, 10),
], ids=["directional", "melas_type", "ball", "convex_2d", "convex_smooth", "geometric"])
def test_sigma_below_three_halves_rejected(call):
    with pytest.raises(b.SigmaError, match="sigma below 3/2 for this bound"):
        call()


def test_sigma_below_one_rejected():
    for call in (lambda: b.berezin(0.5, 2, 1, 1), lambda: b.bound_1d(1, 0.9, 1),
                 lambda: b.bound_square(1, 0.5, 10), lambda: b.melas(0.5, 2, 1, 1, 0, 1)):
        with pytest.raises(b.SigmaError, match="sigma below 1 for this bound"):
            call()


# -- two-term and shifted bounds -------------------------------------------------

def test_melas_type_examples():
    assert b.bound_melas_type(1.5, 2, 1, 1, 1.0) == 0
    v = b.bound_melas_type(1.5, 2, 1, 1, 100)
    assert v == pytest.approx(lt(1.5, 2) * 99 ** 2.5, rel=1e-14)
    assert v >= riesz_mean(SQ_SPEC, 1.5, 100)


def test_geometric_with_zero_m_is_berezin():
    sq = geo.Box((1, 1))
    est = b.bound_geometric(sq, 1.5, 200, m_estimate=geo.Estimate(0.0, 0.0))
    assert est.value == pytest.approx(b.berezin(1.5, 2, 1, 200), rel=1e-15)
    assert est.stderr == 0


def test_geometric_square():
    sq = geo.Box((1, 1))
    est = b.bound_geometric(sq, 1.5, 200, geo.EvalConfig(mc_samples=20000))
    assert est.value < b.berezin(1.5, 2, 1, 200)
    assert est.value >= riesz_mean(SQ_SPEC, 1.5, 200) - 3 * est.stderr
    assert est.stderr > 0


def test_convex_smooth_s_integral():
    assert b.convex_smooth_s_integral(0.0) == 1.0
    assert b.convex_smooth_s_integral(1.0) == 0.5
    assert b.convex_smooth_s_integral(4.0) == pytest.approx(1 / 8)
    val = quad(lambda s: max(1 - 0.6 * s, 0), 0, 1)[0]
    assert b.convex_smooth_s_integral(0.6) == pytest.approx(val, rel=1e-12)


def test_convex_smooth_disk():
    v = b.bound_convex_smooth(1.5, 2, PI, 2 * PI, 1.0, 50)
    assert v >= riesz_mean(DISK_SPEC, 1.5, 50)
    assert v < b.berezin(1.5, 2, PI, 50)


def test_c_ba_values():
    # frozen from 50-digit arithmetic
    assert b.c_ba(2) == pytest.approx(0.0100588171072219, rel=1e-12)
    assert b.c_ba(3) == pytest.approx(0.0045045575510088, rel=1e-12)
    assert b.c_ba(4) == pytest.approx(0.0020606469193208, rel=1e-12)
    assert b.c_ba(5) == pytest.approx(0.00095569244678320, rel=1e-12)
    with pytest.raises(ValueError):
        b.c_ba(1)


def test_c_ba_d3_uses_pi():
    j = PI
    expected = (j / (16 * 3 * math.sqrt(PI)) * math.gamma(3.5) / math.gamma(4) * (1 - (1 - 1 / (4 * j)) ** 3))
    assert b.c_ba(3) == pytest.approx(expected, rel=1e-13)


def test_bound_ball_examples():
    assert b.bound_ball(1.5, 2, 1, 50) >= riesz_mean(DISK_SPEC, 1.5, 50)
    lam1 = sp.ball_ground_state(2, 1)
    assert b.bound_ball(1.5, 2, 1, lam1) >= 0 == riesz_mean(DISK_SPEC, 1.5, lam1)


def test_c_co():
    assert b.c_co() > 0.0642
    assert b.c_co() == pytest.approx(0.06425, abs=5e-5)
    assert 11 / (9 * PI ** 2) == pytest.approx(0.1238370022295, rel=1e-12)
    assert 2 / (5 * PI ** 2) * math.log(4 * PI / 3) == pytest.approx(0.058053, abs=1e-6)


def test_convex_2d_examples():
    assert b.convex_2d_trace_vanishes(1.0, 9) and b.bound_convex_2d(1.5, 1, 4, 1, 9) == 0
    assert b.convex_2d_trace_vanishes(1.0, PI ** 2)
    assert riesz_mean(SQ_SPEC, 1.5, 9) == 0
    assert b.bound_convex_2d(1.5, 1, 4, 1, 200) >= riesz_mean(SQ_SPEC, 1.5, 200)
    tri = sp.equilateral_triangle_spectrum(1.0, 400)
    v = b.bound_convex_2d(1.5, math.sqrt(3) / 4, 3, math.sqrt(3) / 2, 300)
    assert v >= riesz_mean(tri, 1.5, 300)


def test_bound_square_vs_double_quadrature():
    sigma, lam, c = 1.0, 50.0, 0.1
    f = lambda y, x: max(lam - c * (1 / min(x, PI - x) + 1 / min(y, PI - y)) ** 2, 0.0) ** (sigma + 1)
    h = PI / 2
    ref = 4 * dblquad(f, 0, h, 0, h, epsabs=1e-8, epsrel=1e-10)[0] * lt(sigma, 2)
    val = b.bound_square(PI, sigma, lam, 0.1)
    assert val == pytest.approx(ref, rel=1e-7)
    assert val == pytest.approx(813.331987780377, rel=1e-11)


def test_bound_square_examples():
    direct = sum(max(50 - (m * m + n * n), 0) ** 1 for m in range(1, 9) for n in range(1, 9))
    assert b.bound_square(PI, 1, 50, 0.1) >= direct
    assert b.bound_square(1.0, 1, 16 * 0.1, 0.1) == 0
    vals = [b.bound_square(1.0, 1.5, 300, c) for c in (0.05, 0.1, 0.2, 0.25)]
    assert all(x > y for x, y in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        b.bound_square(1, 1, 10, 0.3)


def test_melas_examples():
    sq = geo.Box((1, 1))
    I = geo.second_moment(sq)
    assert b.melas(1.5, 2, 1, I, 0.0, 100) == b.berezin(1.5, 2, 1, 100)
    assert b.melas(1.5, 2, 1, I, 1.0, 1 / I) == 0
    v = b.melas(1.5, 2, 1, I, 1 / 24, 100)
    assert 0 < v <= b.berezin(1.5, 2, 1, 100)


@settings(max_examples=60, deadline=None)
@given(st.floats(1.5, 4), st.floats(0.0, 1e4), st.floats(0.1, 10), st.floats(0.2, 3))
def test_orderings_below_berezin(sigma, lam, vol, r):
    bz = b.berezin(sigma, 2, vol, lam)
    assert b.bound_melas_type(sigma, 2, vol, r, lam) <= bz
    assert b.bound_ball(sigma, 2, r, lam) <= b.berezin(sigma, 2, PI * r * r, lam)
    assert b.bound_convex_2d(sigma, vol, 4 * math.sqrt(vol), math.sqrt(vol), lam) <= bz


# -- counting and eigenvalue lower bounds -----------------------------------------

def test_ground_state_lower_examples():
    assert b.ground_state_lower(1) == pytest.approx(PI ** 2)
    assert b.ground_state_lower(PI) == pytest.approx(sp.interval_spectrum(PI, 2).eigenvalues[0])
    assert b.ground_state_lower(2) == pytest.approx(2.4674011, rel=1e-7)
    assert b.ground_state_lower(2) < sp.ball_ground_state(2, 1)


def test_counting_upper():
    assert b.counting_upper(2, 1, 1, 1.0) == 0
    for lam in (30, 100, 500, 2000):
        assert b.counting_upper(2, 1, 1, lam) >= counting(SQ_SPEC, lam)
        assert b.counting_upper(2, PI, 2, lam) >= counting(DISK_SPEC, lam)


def test_counting_prefactor_inverts_to_nsimple():
    for d in (1, 2, 3, 4):
        assert b.nsimple_coefficient(d) == pytest.approx(b.counting_prefactor(d) ** (-2 / d), rel=1e-13)
    # lambda at which the counting bound reaches k is the nsimple bound
    lam = b.lower_nsimple(2, 1.0, 1.0, 7)
    assert b.counting_upper(2, 1.0, 1.0, lam) == pytest.approx(7, rel=1e-12)


def test_counting_tau_min_minimises():
    d, l0, lam = 2, 1.0, 40.0
    a = lam - 1 / l0 ** 2
    g = lambda tau: tau ** (-1.5) * (a + tau) ** (1.5 + d / 2)
    tau = b.counting_tau_min(d, l0, lam)
    assert g(tau) <= min(g(tau * 0.99), g(tau * 1.01))


def test_li_yau():
    assert b.lower_li_yau(2, 1, 1) == pytest.approx(2 * PI)
    assert b.lower_li_yau(2, 1, 10) == pytest.approx(20 * PI)
    ev = SQ_SPEC.eigenvalues
    assert all(b.lower_li_yau(2, 1, k) <= ev[k - 1] for k in range(1, 51))


def test_nsimple():
    assert b.nsimple_coefficient(2) == pytest.approx(5.84032129340200, rel=1e-12)
    assert b.lower_nsimple(2, 1, 1, 1) == pytest.approx(6.84032129340200, rel=1e-12)
    assert b.nsimple_coefficient(2) < 2 * PI
    assert b.lower_nsimple(2, 1, 1e-4, 1) > 1e7


def test_nconvex_limits_and_errors():
    C, q = b.c_co(), 2 * math.sqrt(PI)
    limit = q * q * (225 * PI ** 2 * C ** 2 / 128 + (15 * PI * C / 8) * (15 * PI * C / 16))
    assert b.lower_nconvex(1, q, 5, 1e-14) == pytest.approx(limit, rel=1e-10)
    assert b.lower_nconvex(1, q, 5, 1 - 1e-14) < 1e-10
    for a in (0, 1, -0.1):
        with pytest.raises(ValueError):
            b.lower_nconvex(1, q, 5, a)


def test_nconvex_opt_examples():
    q = 2 * math.sqrt(PI)
    r2 = b.lower_nconvex_opt(1, q, 2)
    assert r2.value > 15.03 and r2.value == pytest.approx(15.03887, abs=1e-5)
    assert r2.alpha_star == pytest.approx(0.5666, abs=1e-3)
    assert b.lower_nconvex_opt(1, q, 3).value > 21.52
    assert b.lower_nconvex_opt(1, q, 23).value > 144.58 > 46 * PI
    assert b.lower_nconvex_opt(1, q, 24).value < 48 * PI
    for k in range(1, 24):
        opt = b.lower_nconvex_opt(1, q, k)
        assert opt.value >= b.lower_nconvex(1, q, k, 0.5)
        assert opt.value > b.lower_li_yau(2, 1, k)


def test_nconvex_opt_is_a_maximum():
    q = 5.0
    opt = b.lower_nconvex_opt(1, q, 11)
    grid = np.linspace(1e-4, 1 - 1e-4, 5001)
    assert opt.value >= max(b.lower_nconvex(1, q, 11, a) for a in grid) - 1e-9


@pytest.mark.parametrize("name,spec,vol,per,l0", [
    ("square", SQ_SPEC, 1.0, 4.0, 1.0),
    ("disk", DISK_SPEC, PI, 2 * PI, 2.0),
])
def test_lower_bounds_below_true_eigenvalues(name, spec, vol, per, l0):
    ev = spec.eigenvalues
    for k in range(1, len(ev) + 1, 7):
        lam_k = ev[k - 1]
        assert b.lower_li_yau(2, vol, k) <= lam_k
        assert b.lower_nsimple(2, vol, l0, k) <= lam_k
        assert b.lower_nconvex_opt(vol, per, k).value <= lam_k
    assert b.ground_state_lower(l0) <= ev[0]


def test_lower_bounds_box_3d():
    spec = sp.box_spectrum((1, 1.5, 2), 800)
    ev = spec.eigenvalues
    for k in range(1, len(ev) + 1):
        assert b.lower_li_yau(3, 3.0, k) <= ev[k - 1]
        assert b.lower_nsimple(3, 3.0, 1.0, k) <= ev[k - 1]


def test_bound_report():
    r = b.BoundReport("geometric", 1.5, 10.0, 5.0, 4.9, 0.05)
    assert r.margin == pytest.approx(-0.1)
    assert r.holds() and r.valid_sigma_min == 1.5
    assert not b.BoundReport("berezin", 1, 10.0, 5.0, 4.9).holds()
