"""Dirichlet spectra: closed forms for intervals, boxes and disks, finite
differences for polygons."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from . import geometry as geo
from .special_functions import ConvergenceError, bessel_zero, bessel_zeros, gamma, unit_ball_volume

MAX_EIGENVALUES = 5_000_000
DENSE_LIMIT = 4000


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Sorted Dirichlet eigenvalues, complete up to ``lambda_max``.

    ``multiplicity`` is an optional hint aligned with ``eigenvalues``
    (1 for simple entries, 2 for the paired disk modes, ...); entries are
    always repeated according to multiplicity.
    """

    eigenvalues: np.ndarray
    lambda_max: float
    exact: bool = True
    h: float | None = None
    multiplicity: np.ndarray | None = None

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        order = np.argsort(ev, kind="stable")
        ev = ev[order]
        if len(ev) and not ev[0] > 0:
            raise ValueError("eigenvalues must be positive")
        object.__setattr__(self, "eigenvalues", ev)
        if self.multiplicity is not None:
            object.__setattr__(self, "multiplicity", np.asarray(self.multiplicity, dtype=int)[order])
        ev.setflags(write=False)

    def __len__(self):
        return len(self.eigenvalues)

    def scaled(self, s: float) -> "Spectrum":
        """Spectrum of the domain dilated by the factor s."""
        return Spectrum(self.eigenvalues / s ** 2, self.lambda_max / s ** 2, self.exact,
                        None if self.h is None else self.h * s, self.multiplicity)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "eigenvalue", "multiplicity_hint", "exact", "h"])
        mult = self.multiplicity if self.multiplicity is not None else np.ones(len(self), int)
        for i, (lam, m) in enumerate(zip(self.eigenvalues, mult), start=1):
            w.writerow([i, f"{lam:.17g}", int(m), int(self.exact), "" if self.h is None else f"{self.h:.17g}"])
        return buf.getvalue()


def interval_spectrum(length: float, lambda_max: float) -> Spectrum:
    """k^2 pi^2 / l^2 for every k with value <= lambda_max."""
    if not length > 0:
        raise ValueError("length must be positive")
    kmax = int(math.floor(length * math.sqrt(max(lambda_max, 0.0)) / math.pi)) + 1
    k = np.arange(1, kmax + 1, dtype=float)
    ev = (k * math.pi / length) ** 2
    # guard the floor against rounding at the cutoff
    ev = ev[ev <= lambda_max]
    return Spectrum(ev, float(lambda_max), True, None, np.ones(len(ev), int))


def box_spectrum(sides, lambda_max: float) -> Spectrum:
    """pi^2 sum (k_i / a_i)^2 over positive integer tuples, up to lambda_max."""
    sides = [float(a) for a in sides]
    if not sides or any(not a > 0 for a in sides):
        raise ValueError("box sides must be positive")
    if len(sides) > 4:
        raise ValueError("box_spectrum supports dimension <= 4")
    vals = np.zeros(1)
    for a in sides:
        kmax = int(math.floor(a * math.sqrt(max(lambda_max, 0.0)) / math.pi))
        if kmax < 1:
            return Spectrum(np.empty(0), float(lambda_max), True, None, np.empty(0, int))
        term = (np.arange(1, kmax + 1) * math.pi / a) ** 2
        vals = (vals[:, None] + term[None, :]).ravel()
        vals = vals[vals <= lambda_max]
        if len(vals) > MAX_EIGENVALUES:
            raise ValueError(f"more than {MAX_EIGENVALUES} eigenvalues below {lambda_max}; lower the cutoff")
    return Spectrum(vals, float(lambda_max), True, None, np.ones(len(vals), int))


def disk_spectrum(radius: float, lambda_max: float) -> Spectrum:
    """j_{m,k}^2 / r^2 (m >= 1 counted twice), complete up to lambda_max.

    The angular sweep stops at the first m without a zero below
    r sqrt(lambda_max); j_{m,1} increases with m, so no eigenvalue is missed.
    """
    if not radius > 0:
        raise ValueError("radius must be positive")
    top = radius * math.sqrt(max(lambda_max, 0.0))
    vals, mult = [], []
    m = 0
    while True:
        zs = bessel_zeros(float(m), below=top) if top > m else np.empty(0)
        zs = zs[(zs / radius) ** 2 <= lambda_max]
        if len(zs) == 0:
            break
        vals.append((zs / radius) ** 2)
        mult.append(np.full(len(zs), 1 if m == 0 else 2))
        m += 1
    if not vals:
        return Spectrum(np.empty(0), float(lambda_max), True, None, np.empty(0, int))
    vals = np.concatenate(vals)
    mult = np.concatenate(mult)
    return Spectrum(np.repeat(vals, mult), float(lambda_max), True, None, np.repeat(mult, mult))


def ball_ground_state(dim: int, radius: float) -> float:
    """pi j_{d/2-1,1}^2 / (Gamma(d/2+1)^{2/d} |B_r|^{2/d})  (= j^2 / r^2)."""
    if int(dim) != dim or dim < 1:
        raise ValueError("dim must be a positive integer")
    if not radius > 0:
        raise ValueError("radius must be positive")
    d = int(dim)
    if d == 1:
        # J_{-1/2} has its first zero at pi/2
        j = math.pi / 2
    else:
        j = bessel_zero(d / 2 - 1, 1)
    vol = unit_ball_volume(d) * radius ** d
    return math.pi * j * j / (gamma(d / 2 + 1) ** (2 / d) * vol ** (2 / d))


def equilateral_triangle_spectrum(side: float, lambda_max: float) -> Spectrum:
    """(16 pi^2 / (9 a^2)) (m^2 + m n + n^2), m, n >= 1, with multiplicity."""
    c = 16 * math.pi ** 2 / (9 * side ** 2)
    nmax = int(math.sqrt(lambda_max / c)) + 1
    m, n = np.meshgrid(np.arange(1, nmax + 1), np.arange(1, nmax + 1))
    vals = c * (m * m + m * n + n * n).ravel()
    vals = vals[vals <= lambda_max]
    return Spectrum(vals, float(lambda_max), True, None, np.ones(len(vals), int))


# ---------------------------------------------------------------------------
# Finite differences


def _interior_grid(polygon: geo.Polygon, h: float):
    lo = polygon.points.min(axis=0)
    hi = polygon.points.max(axis=0)
    nx = int(math.floor((hi[0] - lo[0]) / h + 1e-9))
    ny = int(math.floor((hi[1] - lo[1]) / h + 1e-9))
    ii, jj = np.meshgrid(np.arange(nx + 1), np.arange(ny + 1), indexing="ij")
    pts = np.stack([lo[0] + ii * h, lo[1] + jj * h], axis=-1).reshape(-1, 2)
    tol = 1e-9 * h
    inside = geo._polygon_inside(polygon, pts)
    # block-wise edge distances keep memory bounded on fine grids
    dist = np.empty(len(pts))
    for s in range(0, len(pts), 20000):
        dist[s:s + 20000] = np.min(geo._edge_distances(polygon, pts[s:s + 20000]), axis=1)
    keep = inside & (dist > tol)
    return ii.ravel()[keep], jj.ravel()[keep], nx, ny


def fd_laplacian(polygon: geo.Polygon, h: float) -> scipy.sparse.csr_matrix:
    """5-point Dirichlet Laplacian on the h-grid anchored at the bounding-box corner."""
    i, j, nx, ny = _interior_grid(polygon, h)
    n = len(i)
    if n == 0:
        raise ValueError("no interior grid points; decrease h")
    index = -np.ones((nx + 1, ny + 1), dtype=np.int64)
    index[i, j] = np.arange(n)
    rows, cols = [np.arange(n)], [np.arange(n)]
    data = [np.full(n, 4.0 / h ** 2)]
    for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        ni, nj = i + di, j + dj
        ok = (ni >= 0) & (ni <= nx) & (nj >= 0) & (nj <= ny)
        nb = np.full(n, -1, dtype=np.int64)
        nb[ok] = index[ni[ok], nj[ok]]
        has = nb >= 0
        rows.append(np.nonzero(has)[0])
        cols.append(nb[has])
        data.append(np.full(int(has.sum()), -1.0 / h ** 2))
    return scipy.sparse.csr_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))


def fd_spectrum(polygon, h: float, count: int) -> Spectrum:
    """Lowest ``count`` eigenvalues of the 5-point Dirichlet Laplacian.

    The error is O(h^2) on grid-aligned domains with smooth eigenfunctions;
    slanted edges (staircase boundary) and reentrant corners converge more
    slowly.  ``lambda_max`` is the largest computed value.
    """
    if isinstance(polygon, geo.Box):
        polygon = polygon.as_polygon()
    if not isinstance(polygon, geo.Polygon):
        raise TypeError("fd_spectrum needs a 2D polygon")
    if not h > 0:
        raise ValueError("h must be positive")
    A = fd_laplacian(polygon, h)
    n = A.shape[0]
    if n < 10:
        raise ValueError(f"only {n} interior grid points (need >= 10); decrease h")
    if not 1 <= count <= n:
        raise ValueError(f"count must lie in [1, {n}]")
    if n <= DENSE_LIMIT:
        vals = scipy.linalg.eigh(A.toarray(), eigvals_only=True, subset_by_index=[0, count - 1])
    else:
        try:
            vals = scipy.sparse.linalg.eigsh(A.tocsc(), k=count, sigma=0.0, which="LM",
                                             return_eigenvectors=False, maxiter=10 * n, tol=1e-12)
        except scipy.sparse.linalg.ArpackNoConvergence as exc:
            raise ConvergenceError(f"sparse eigensolver did not converge: {exc}") from exc
    vals = np.sort(vals)
    return Spectrum(vals, float(vals[-1]), False, float(h), np.ones(len(vals), int))


def richardson(coarse, fine, order: float = 2.0, ratio: float = 2.0):
    """Eliminate the leading h^order error term from values at h and h/ratio."""
    f = ratio ** order
    return (f * np.asarray(fine) - np.asarray(coarse)) / (f - 1)


def fd_extrapolated(polygon, h: float, count: int = 1, order: float = 2.0) -> np.ndarray:
    """Richardson-extrapolated FD eigenvalues from spacings h and h/2."""
    coarse = fd_spectrum(polygon, h, count).eigenvalues
    fine = fd_spectrum(polygon, h / 2, count).eigenvalues
    return richardson(coarse, fine, order)


def spectrum_for(domain, lambda_max: float) -> Spectrum:
    """Exact spectrum of a domain with a closed-form family."""
    if isinstance(domain, geo.Interval):
        return interval_spectrum(domain.length, lambda_max)
    if isinstance(domain, geo.Box):
        return box_spectrum(domain.sides, lambda_max)
    if isinstance(domain, geo.Ball) and domain.dim == 2:
        return disk_spectrum(domain.radius, lambda_max)
    if isinstance(domain, geo.Ball) and domain.dim == 1:
        return interval_spectrum(2 * domain.radius, lambda_max)
    raise ValueError(f"no exact spectrum available for {type(domain).__name__}"
                     + (f" in dimension {domain.dim}" if isinstance(domain, geo.Ball) else ""))
