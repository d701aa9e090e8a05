"""Every upper bound against the exact Riesz means of the unit square and disk.

Run:  python3 demos/02_square_and_disk.py
"""
import math

from riesz_bounds import bounds as bd
from riesz_bounds import geometry as geo
from riesz_bounds import spectra as sp
from riesz_bounds.riesz import riesz_mean

sigma = 1.5
cfg = geo.EvalConfig(mc_samples=20000)
sq, disk = geo.Box((1.0, 1.0)), geo.Ball(2, 1.0)
sq_spec, disk_spec = sp.box_spectrum((1, 1), 2000), sp.disk_spectrum(1, 2000)

print(f"unit square, sigma = {sigma}; each column is RHS / Riesz mean")
print(f"{'Lambda':>8} {'berezin':>9} {'melas':>9} {'direct':>9} {'convex':>9} {'square':>9} {'geom':>9}")
for lam in (50, 200, 800, 2000):
    lhs = riesz_mean(sq_spec, sigma, lam)
    cols = [
        bd.berezin(sigma, 2, 1, lam),
        bd.bound_melas_type(sigma, 2, 1, 1, lam),
        bd.bound_directional(sq, [1, 0], sigma, lam, cfg),
        bd.bound_convex_2d(sigma, 1, 4, 1, lam),
        bd.bound_square(1, sigma, lam, 0.1, cfg),
        bd.bound_geometric(sq, sigma, lam, cfg).value,
    ]
    print(f"{lam:8.0f} " + " ".join(f"{c / lhs:9.4f}" for c in cols))

print(f"\nunit disk, sigma = {sigma}")
print(f"{'Lambda':>8} {'berezin':>9} {'direct':>9} {'smooth':>9} {'ball':>9} {'convex':>9}")
for lam in (50, 200, 800, 2000):
    lhs = riesz_mean(disk_spec, sigma, lam)
    cols = [
        bd.berezin(sigma, 2, math.pi, lam),
        bd.bound_directional(disk, [1, 0], sigma, lam, cfg),
        bd.bound_convex_smooth(sigma, 2, math.pi, 2 * math.pi, 1.0, lam),
        bd.bound_ball(sigma, 2, 1.0, lam),
        bd.bound_convex_2d(sigma, math.pi, 2 * math.pi, 2.0, lam),
    ]
    print(f"{lam:8.0f} " + " ".join(f"{c / lhs:9.4f}" for c in cols))

# The boundary-corrected bounds all sit between the Riesz mean and Berezin;
# the ratios creep toward 1 as Lambda grows since the correction is one
# power of sqrt(Lambda) below the leading term.
