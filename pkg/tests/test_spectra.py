import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from riesz_bounds import geometry as geo
from riesz_bounds import spectra as sp
from riesz_bounds.bounds import ground_state_lower

PI2 = math.pi ** 2
J01_SQ = 5.78318596294678452118  # mpmath
J11_SQ = 14.6819706421238932572


def test_interval_examples():
    assert sp.interval_spectrum(math.pi, 30).eigenvalues == pytest.approx([1, 4, 9, 16, 25])
    assert sp.interval_spectrum(1, 50).eigenvalues == pytest.approx([PI2, 4 * PI2])
    assert sp.interval_spectrum(2 * math.pi, 5).eigenvalues == pytest.approx([0.25, 1, 2.25, 4])


def test_interval_cutoff_inclusive():
    s = sp.interval_spectrum(math.pi, 25.0)
    assert s.eigenvalues[-1] == 25.0 and s.lambda_max == 25.0


def test_box_examples():
    assert sp.box_spectrum((1, 1), 100).eigenvalues[:4] == pytest.approx([2 * PI2, 5 * PI2, 5 * PI2, 8 * PI2])
    assert sp.box_spectrum((1, 2), 30).eigenvalues[0] == pytest.approx(5 * PI2 / 4)
    assert sp.box_spectrum((1, 1, 1), 50).eigenvalues[0] == pytest.approx(3 * PI2)
    assert len(sp.box_spectrum((1, 1), 10)) == 0


def test_box_completeness_by_brute_force():
    lam_max = 900.0
    s = sp.box_spectrum((1.0, 1.7), lam_max)
    brute = sorted(PI2 * ((m / 1.0) ** 2 + (n / 1.7) ** 2)
                   for m in range(1, 40) for n in range(1, 40)
                   if PI2 * ((m / 1.0) ** 2 + (n / 1.7) ** 2) <= lam_max)
    assert s.eigenvalues == pytest.approx(brute)


def test_box_rejects_high_dimension():
    with pytest.raises(ValueError):
        sp.box_spectrum((1, 1, 1, 1, 1), 100)


def test_disk_examples():
    assert sp.disk_spectrum(1, 6).eigenvalues == pytest.approx([J01_SQ])
    s = sp.disk_spectrum(1, 16)
    assert s.eigenvalues == pytest.approx([J01_SQ, J11_SQ, J11_SQ])
    assert list(s.multiplicity) == [1, 2, 2]
    assert sp.disk_spectrum(2, 2).eigenvalues == pytest.approx([J01_SQ / 4])


def test_disk_against_scipy_zeros():
    from scipy.special import jn_zeros
    lam_max = 800.0
    ref = []
    for m in range(0, 40):
        z = jn_zeros(m, 40) ** 2
        z = z[z <= lam_max]
        ref += list(z) * (1 if m == 0 else 2)
    assert sp.disk_spectrum(1.0, lam_max).eigenvalues == pytest.approx(sorted(ref), rel=1e-12)


def test_ball_ground_state_examples():
    assert sp.ball_ground_state(3, 1) == pytest.approx(PI2, rel=1e-12)
    assert sp.ball_ground_state(2, 1) == pytest.approx(J01_SQ, rel=1e-12)
    assert sp.ball_ground_state(2, 2) == pytest.approx(1.4457964907366, rel=1e-12)
    assert sp.ball_ground_state(1, 1) == pytest.approx(PI2 / 4, rel=1e-12)


def test_triangle_exact_spectrum():
    s = sp.equilateral_triangle_spectrum(1.0, 300)
    assert s.eigenvalues[0] == pytest.approx(16 * PI2 / 3)


def test_fd_square():
    sq = geo.Box((1, 1)).as_polygon()
    s = sp.fd_spectrum(sq, 1 / 64, 3)
    assert not s.exact and s.h == 1 / 64
    assert s.eigenvalues[0] == pytest.approx(2 * PI2, rel=1e-3)
    assert s.eigenvalues == pytest.approx([2 * PI2, 5 * PI2, 5 * PI2], rel=2e-3)
    extrap = sp.fd_extrapolated(sq, 1 / 64, 1)[0]
    assert abs(extrap - 2 * PI2) / (2 * PI2) <= 1e-5


def test_fd_convergence_rate():
    sq = geo.Box((1, 1))
    err = [sp.fd_spectrum(sq, h, 1).eigenvalues[0] - 2 * PI2 for h in (1 / 16, 1 / 32)]
    assert 3.5 <= err[0] / err[1] <= 4.5


def test_fd_scaling():
    a = sp.fd_spectrum(geo.Box((1, 1)), 1 / 32, 2).eigenvalues
    b = sp.fd_spectrum(geo.Box((2, 2)), 1 / 16, 2).eigenvalues
    assert a == pytest.approx(4 * b, rel=1e-12)


def test_fd_l_shape():
    # reference value 9.6397238 (the L-shaped membrane)
    val = sp.fd_extrapolated(geo.l_shape(), 1 / 64, 1)[0]
    assert val == pytest.approx(9.6397, abs=0.01)


def test_fd_sparse_path_matches_dense():
    L = geo.l_shape()
    h = 1 / 40  # 4641 interior points: sparse path
    A = sp.fd_laplacian(L, h)
    assert A.shape[0] > sp.DENSE_LIMIT
    sparse = sp.fd_spectrum(L, h, 3).eigenvalues
    import scipy.linalg
    dense = scipy.linalg.eigh(A.toarray(), eigvals_only=True, subset_by_index=[0, 2])
    assert sparse == pytest.approx(dense, rel=1e-10)


def test_fd_errors():
    with pytest.raises(ValueError):
        sp.fd_spectrum(geo.Box((1, 1)), 0.4, 1)
    with pytest.raises(ValueError):
        sp.fd_spectrum(geo.Box((1, 1)), 0.1, 1000)


def test_exact_scaling_law():
    for s in (0.5, 3.0):
        a = sp.disk_spectrum(1.0, 200).eigenvalues
        b = sp.disk_spectrum(s, 200 / s ** 2).eigenvalues
        assert b == pytest.approx(a / s ** 2, rel=1e-12)
    assert sp.box_spectrum((1, 1), 100).eigenvalues[0] == pytest.approx(4 * sp.box_spectrum((2, 2), 100).eigenvalues[0])


def test_spectrum_csv():
    text = sp.disk_spectrum(1, 16).to_csv().splitlines()
    assert text[0] == "index,eigenvalue,multiplicity_hint,exact,h"
    assert text[2].startswith("2,14.68197064212389") and text[2].endswith(",2,1,")
    assert len(text) == 4


@pytest.mark.parametrize("domain,lam1", [
    (geo.Interval(2.0), PI2 / 4),
    (geo.Box((1, 1)), 2 * PI2),
    (geo.Ball(2, 1), J01_SQ),
    (geo.equilateral_triangle(), 16 * PI2 / 3),
], ids=["interval", "square", "disk", "triangle"])
def test_ground_state_lower_bound(domain, lam1):
    assert ground_state_lower(geo.min_width(domain)) <= lam1 * (1 + 1e-12)


def test_ground_state_lower_fd_l_shape():
    lam1 = sp.fd_extrapolated(geo.l_shape(), 1 / 32, 1)[0]
    assert ground_state_lower(geo.min_width(geo.l_shape())) <= lam1


@settings(max_examples=20, deadline=None)
@given(st.floats(min_value=0.2, max_value=5), st.floats(min_value=0.2, max_value=5))
def test_box_spectrum_sorted_positive(a, b):
    s = sp.box_spectrum((a, b), 400)
    assert np.all(np.diff(s.eigenvalues) >= 0)
    assert np.all(s.eigenvalues > 0)
    assert np.all(s.eigenvalues <= 400)
