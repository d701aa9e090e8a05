"""Lower bounds on lambda_k for convex planar domains of unit area.

Run:  python3 demos/03_lower_bounds.py
"""
import math

from riesz_bounds import bounds as bd
from riesz_bounds import spectra as sp

# The disk has the smallest perimeter for its area; larger perimeters only
# strengthen the convex bound.
q = 2 * math.sqrt(math.pi)
print(f"{'k':>3} {'Li-Yau':>9} {'convex':>9} {'alpha*':>7}")
for k in (1, 2, 3, 5, 10, 20, 23, 24, 30):
    opt = bd.lower_nconvex_opt(1.0, q, k)
    mark = "  <- improves" if opt.value > bd.lower_li_yau(2, 1.0, k) else ""
    print(f"{k:3d} {bd.lower_li_yau(2, 1.0, k):9.3f} {opt.value:9.3f} {opt.alpha_star:7.4f}{mark}")

# Sanity check against a domain whose spectrum is known: the disk of area 1.
r = 1 / math.sqrt(math.pi)
ev = sp.disk_spectrum(r, 800).eigenvalues
print("\ndisk of area 1, lambda_k vs convex bound:")
for k in (1, 2, 3, 10, 23):
    print(f"  k = {k:2d}: {ev[k - 1]:9.3f} >= {bd.lower_nconvex_opt(1.0, q, k).value:9.3f}")
