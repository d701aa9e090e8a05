"""Geometric inputs: widths, inner parallel sets, the boundary functional M,
and a finite-difference spectrum where no closed form exists.

Run:  python3 demos/04_geometry.py
"""
import math

from riesz_bounds import geometry as geo
from riesz_bounds import spectra as sp
from riesz_bounds import verify as vf

shapes = {
    "square": geo.Box((1, 1)).as_polygon(),
    "triangle": geo.equilateral_triangle(),
    "hexagon": geo.regular_polygon(6, 1.0),
    "3-4-5": geo.Polygon([(0, 0), (4, 0), (0, 3)]),
    "L-shape": geo.l_shape(),
}
for name, d in shapes.items():
    g = geo.geom_stats(d)
    print(f"{name:9s} area {g.volume:7.4f} perimeter {g.perimeter:7.4f} width {g.width:7.4f} "
          f"inradius {g.inradius:6.4f} exact width: {g.width_exact}")

# The two-term convex bound needs the inner perimeter to shrink no faster
# than linearly at rate 3/w.  Equilateral triangles hit it with equality.
for name, d in shapes.items():
    if d.convex:
        r = vf.check_innerwidth(d)
        print(f"{name:9s} inner-perimeter check: {r.line()} ({r.notes})")

# sqrt(Lambda) M(Lambda) settles to a constant proportional to the perimeter.
cfg = geo.EvalConfig(mc_samples=20000)
for lam, val, err in vf.m_lambda_trend(geo.Box((1, 1)), [100, 400, 1600], cfg):
    print(f"square: sqrt(Lambda) M = {val:.4f} +- {err:.4f} at Lambda = {lam:g}")

# L-shape: h and h/2, then one Richardson step.
for h in (1 / 16, 1 / 32, 1 / 64):
    print(f"L-shape h = {h:.4f}: lambda_1 = {sp.fd_spectrum(shapes['L-shape'], h, 1).eigenvalues[0]:.5f}")
lam1 = sp.fd_extrapolated(shapes["L-shape"], 1 / 64, 1)[0]
print(f"extrapolated: {lam1:.5f}")
# the disk minimises lambda_1 at fixed area
print(f"lambda_1 * area = {lam1 * 3:.3f} >= disk value {sp.ball_ground_state(2, 1 / math.sqrt(math.pi)):.3f}")
