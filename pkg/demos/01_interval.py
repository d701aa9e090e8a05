"""The one-dimensional bound on (0, pi), where every ingredient is explicit.

Run:  python3 demos/01_interval.py [output.svg]
"""
import math
import sys

import numpy as np

from riesz_bounds import bounds as bd
from riesz_bounds import spectra as sp
from riesz_bounds import verify as vf
from riesz_bounds.cli import emit_svg
from riesz_bounds.riesz import riesz_mean

# On (0, pi) the eigenvalues are k^2, so the Riesz mean of order 1 is a
# piecewise linear function with kinks at the squares.
spec = sp.interval_spectrum(math.pi, 120)
print("first eigenvalues:", spec.eigenvalues[:6])

# f = bound - Riesz mean stays positive but comes close to zero.  The dips
# sit a little after n(n+1), halfway between consecutive squares in sqrt-scale.
s = vf.figure1()
print(f"min f on (1, 112): {s.min_value:.5f}")
print("local minima:", np.round(s.minima, 3))
if len(sys.argv) > 1:
    emit_svg(zip(s.lam, s.f), sys.argv[1], title="bound minus Riesz mean, interval (0, pi)")
    print("wrote", sys.argv[1])

# The gap relative to Lambda^sigma oscillates, but its envelope shrinks:
# the constant 1/4 is the right one.
for lam in (1e2, 1e3, 1e4, 1e5):
    big = sp.interval_spectrum(math.pi, lam)
    gap = (bd.bound_1d(math.pi, 1, lam) - riesz_mean(big, 1, lam)) / lam
    print(f"Lambda = {lam:8.0f}: normalized gap {gap:.5f}")

# Replacing 1/4 by anything larger breaks the inequality eventually.
for c in (0.26, 0.3, 0.35):
    print(f"c = {c}: first violation at Lambda = {vf.first_violation(1.0, 1.0, c, 1e5)}")

# The large-Lambda limit of the normalized gap is 1/2 - sqrt(c).
for c in (1 / 16, 1 / 4, 1):
    r = vf.check_lemma_asympt(c)
    print(f"c = {c:<6g} Cesaro mean {r.observed[0]:+.4f}, predicted {r.expected[0]:+.4f}")
