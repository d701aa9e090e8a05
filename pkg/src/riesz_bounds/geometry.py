"""Domains and the geometric functionals consumed by the bounds.

Conventions
-----------
* ``Interval(length)`` is (0, length).
* ``Box(sides)`` is the product of (0, a_i).
* ``Ball(dim, radius)`` is centred at the origin.
* ``Polygon(vertices)`` is a simple polygon; vertices are stored
  counterclockwise (clockwise input is reversed).
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Sequence, Union

import numpy as np
from scipy.optimize import linprog, minimize

from .special_functions import unit_ball_volume


class DomainError(ValueError):
    """Invalid domain, or a point that does not lie in the open domain."""


# ---------------------------------------------------------------------------
# Domain types


@dataclass(frozen=True)
class Interval:
    length: float

    def __post_init__(self):
        if not self.length > 0:
            raise DomainError(f"interval length must be positive, got {self.length}")

    @property
    def dim(self):
        return 1

    convex = True


@dataclass(frozen=True)
class Box:
    sides: tuple

    def __post_init__(self):
        sides = tuple(float(a) for a in self.sides)
        if not sides or any(not a > 0 for a in sides):
            raise DomainError(f"box sides must be positive, got {self.sides}")
        object.__setattr__(self, "sides", sides)

    @property
    def dim(self):
        return len(self.sides)

    convex = True

    def as_polygon(self) -> "Polygon":
        if self.dim != 2:
            raise DomainError("only 2D boxes convert to polygons")
        a, b = self.sides
        return Polygon(((0.0, 0.0), (a, 0.0), (a, b), (0.0, b)))


@dataclass(frozen=True)
class Ball:
    dim: int
    radius: float

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise DomainError(f"ball dimension must be a positive integer, got {self.dim}")
        if not self.radius > 0:
            raise DomainError(f"ball radius must be positive, got {self.radius}")
        object.__setattr__(self, "dim", int(self.dim))

    convex = True


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _segments_cross(p1, p2, q1, q2):
    """Closed-segment intersection test (collinear overlaps included)."""
    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return 0 if abs(v) < 1e-14 else (1 if v > 0 else -1)

    def on_seg(a, b, c):
        return min(a[0], b[0]) - 1e-14 <= c[0] <= max(a[0], b[0]) + 1e-14 and \
            min(a[1], b[1]) - 1e-14 <= c[1] <= max(a[1], b[1]) + 1e-14

    o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
    o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
    if o1 != o2 and o3 != o4:
        return True
    return (o1 == 0 and on_seg(p1, p2, q1)) or (o2 == 0 and on_seg(p1, p2, q2)) or \
        (o3 == 0 and on_seg(q1, q2, p1)) or (o4 == 0 and on_seg(q1, q2, p2))


@dataclass(frozen=True)
class Polygon:
    vertices: tuple

    def __post_init__(self):
        pts = np.asarray(self.vertices, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
            raise DomainError("polygon needs at least three 2D vertices")
        if np.allclose(pts[0], pts[-1]):
            pts = pts[:-1]
        area = 0.5 * float(np.sum(_cross(pts, np.roll(pts, -1, axis=0))))
        if not abs(area) > 1e-14:
            raise DomainError("degenerate polygon (zero area)")
        if area < 0:
            pts = pts[::-1]
        n = len(pts)
        for i in range(n):
            for j in range(i + 1, n):
                if j == i + 1 or (i == 0 and j == n - 1):
                    continue
                if _segments_cross(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]):
                    raise DomainError("polygon is not simple (edges intersect)")
        object.__setattr__(self, "vertices", tuple((float(x), float(y)) for x, y in pts))

    @property
    def dim(self):
        return 2

    @cached_property
    def points(self) -> np.ndarray:
        return np.array(self.vertices)

    @cached_property
    def edges(self) -> np.ndarray:
        """Edge vectors q_i - p_i."""
        return np.roll(self.points, -1, axis=0) - self.points

    @cached_property
    def outward_normals(self) -> np.ndarray:
        e = self.edges
        return np.stack([e[:, 1], -e[:, 0]], axis=1) / np.hypot(e[:, 0], e[:, 1])[:, None]

    @cached_property
    def halfplanes(self):
        """(outward normals, offsets): the convex hull of the edges is n . x <= offset."""
        nrm = self.outward_normals
        return nrm, np.sum(nrm * self.points, axis=1)

    @cached_property
    def turns(self) -> np.ndarray:
        """Cross product of consecutive edges at each vertex (>0: convex turn)."""
        e = self.edges
        return _cross(np.roll(e, 1, axis=0), e)

    @cached_property
    def convex(self) -> bool:
        scale = float(np.max(np.hypot(self.edges[:, 0], self.edges[:, 1]))) ** 2
        return bool(np.all(self.turns >= -1e-12 * scale))

    @cached_property
    def reflex_vertices(self) -> np.ndarray:
        scale = float(np.max(np.hypot(self.edges[:, 0], self.edges[:, 1]))) ** 2
        return self.points[self.turns < -1e-12 * scale]


Domain = Union[Interval, Box, Ball, Polygon]


def regular_polygon(n: int, circumradius: float = 1.0) -> Polygon:
    ang = 2 * np.pi * np.arange(n) / n
    return Polygon(tuple(zip(circumradius * np.cos(ang), circumradius * np.sin(ang))))


def equilateral_triangle(side: float = 1.0) -> Polygon:
    return Polygon(((0.0, 0.0), (side, 0.0), (0.5 * side, 0.5 * math.sqrt(3.0) * side)))


def l_shape() -> Polygon:
    """Three unit squares forming an L (the classical test domain)."""
    return Polygon(((0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)))


# ---------------------------------------------------------------------------
# Serialization


def domain_to_json(domain: Domain) -> dict:
    if isinstance(domain, Interval):
        return {"kind": "interval", "length": domain.length}
    if isinstance(domain, Box):
        return {"kind": "box", "sides": list(domain.sides)}
    if isinstance(domain, Ball):
        return {"kind": "ball", "dim": domain.dim, "radius": domain.radius}
    if isinstance(domain, Polygon):
        return {"kind": "polygon", "vertices": [list(v) for v in domain.vertices]}
    raise TypeError(f"not a domain: {domain!r}")


_DOMAIN_FIELDS = {
    "interval": {"length"},
    "box": {"sides"},
    "ball": {"dim", "radius"},
    "polygon": {"vertices"},
}


def domain_from_json(obj: dict) -> Domain:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise DomainError("domain must be an object with a 'kind' field")
    kind = obj["kind"]
    if kind not in _DOMAIN_FIELDS:
        raise DomainError(f"unknown domain kind {kind!r}")
    extra = set(obj) - _DOMAIN_FIELDS[kind] - {"kind"}
    missing = _DOMAIN_FIELDS[kind] - set(obj)
    if extra:
        raise DomainError(f"unknown field(s) for {kind}: {sorted(extra)}")
    if missing:
        raise DomainError(f"missing field(s) for {kind}: {sorted(missing)}")
    if kind == "interval":
        return Interval(float(obj["length"]))
    if kind == "box":
        return Box(tuple(obj["sides"]))
    if kind == "ball":
        return Ball(int(obj["dim"]), float(obj["radius"]))
    return Polygon(tuple(tuple(v) for v in obj["vertices"]))


# ---------------------------------------------------------------------------
# Evaluation configuration and deterministic random streams


@dataclass(frozen=True)
class EvalConfig:
    quad_tol: float = 1e-10
    grid_h: float = 2e-3
    dir_samples: int = 720
    mc_samples: int = 20000
    seed: int = 0
    eps: float | None = None  # None: 1e-6 * diameter
    tube_points: int = 256

    def __post_init__(self):
        for name in ("dir_samples", "mc_samples", "tube_points"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1")
        for name in ("quad_tol", "grid_h"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if self.eps is not None and not self.eps > 0:
            raise ValueError("eps must be > 0")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


def rng_stream(seed: int, *labels) -> np.random.Generator:
    """Counter-based (Philox) generator keyed by the seed and a label tuple.

    The same (seed, labels) always yields the same stream, independently of
    call order or thread layout.
    """
    digest = hashlib.sha256(repr(labels).encode()).digest()
    key = np.array([int(seed) & (2**64 - 1), int.from_bytes(digest[:8], "little")], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


class Estimate(NamedTuple):
    mean: float
    stderr: float


# ---------------------------------------------------------------------------
# Basic metric quantities


def diameter(domain: Domain) -> float:
    if isinstance(domain, Interval):
        return domain.length
    if isinstance(domain, Box):
        return math.sqrt(sum(a * a for a in domain.sides))
    if isinstance(domain, Ball):
        return 2.0 * domain.radius
    pts = domain.points
    return float(np.max(np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)))


def _as_point(domain, x):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (domain.dim,):
        raise DomainError(f"point must have {domain.dim} coordinates, got shape {x.shape}")
    return x


def _edge_distances(poly: Polygon, x):
    """Distances from x (shape (..., 2)) to every edge, shape (..., n_edges)."""
    p = poly.points
    e = poly.edges
    rel = x[..., None, :] - p
    s = np.clip(np.sum(rel * e, axis=-1) / np.sum(e * e, axis=-1), 0.0, 1.0)
    diff = rel - s[..., None] * e
    return np.hypot(diff[..., 0], diff[..., 1])


def _polygon_inside(poly: Polygon, x):
    """Crossing-number point-in-polygon test, vectorised over x (..., 2)."""
    p = poly.points
    q = np.roll(p, -1, axis=0)
    xs, ys = x[..., 0][..., None], x[..., 1][..., None]
    straddle = (p[:, 1] > ys) != (q[:, 1] > ys)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = p[:, 0] + (ys - p[:, 1]) * (q[:, 0] - p[:, 0]) / (q[:, 1] - p[:, 1])
    hits = straddle & (xs < xint)
    return (np.sum(hits, axis=-1) % 2) == 1


def contains(domain: Domain, x) -> bool:
    """True iff x lies in the open domain."""
    x = _as_point(domain, x)
    if isinstance(domain, Interval):
        return 0.0 < x[0] < domain.length
    if isinstance(domain, Box):
        return bool(np.all(x > 0) and np.all(x < np.array(domain.sides)))
    if isinstance(domain, Ball):
        return float(np.dot(x, x)) < domain.radius ** 2
    tol = 1e-12 * diameter(domain)
    return bool(_polygon_inside(domain, x)) and float(np.min(_edge_distances(domain, x))) > tol


def contains_many(domain: Domain, pts) -> np.ndarray:
    """Vectorised open-domain membership for an (N, d) array."""
    pts = np.asarray(pts, dtype=float)
    if isinstance(domain, Interval):
        return (pts[:, 0] > 0) & (pts[:, 0] < domain.length)
    if isinstance(domain, Box):
        return np.all((pts > 0) & (pts < np.array(domain.sides)), axis=1)
    if isinstance(domain, Ball):
        return np.sum(pts * pts, axis=1) < domain.radius ** 2
    if domain.convex:
        nrm, offs = domain.halfplanes
        return np.max(pts @ nrm.T - offs, axis=1) < 0
    return _polygon_inside(domain, pts)


def _require_interior(domain, x):
    if not contains(domain, x):
        raise DomainError(f"point {np.asarray(x).tolist()} is not in the open domain")


def _unit(domain, u):
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if u.shape != (domain.dim,):
        raise DomainError(f"direction must have {domain.dim} coordinates")
    if abs(np.linalg.norm(u) - 1.0) > 1e-12:
        raise DomainError("direction must be a unit vector")
    return u


def ray_exit(domain: Domain, x, u) -> float:
    """theta(x, u) = inf{t > 0 : x + t u not in the domain}."""
    x = _as_point(domain, x)
    u = _unit(domain, u)
    _require_interior(domain, x)
    return _ray_exit(domain, x, u)


def _ray_exit(domain, x, u):
    if isinstance(domain, Interval):
        return (domain.length - x[0]) if u[0] > 0 else x[0]
    if isinstance(domain, Box):
        a = np.array(domain.sides)
        t = np.inf
        for i in range(domain.dim):
            if u[i] > 0:
                t = min(t, (a[i] - x[i]) / u[i])
            elif u[i] < 0:
                t = min(t, -x[i] / u[i])
        return float(t)
    if isinstance(domain, Ball):
        b = float(np.dot(x, u))
        c = float(np.dot(x, x)) - domain.radius ** 2
        return -b + math.sqrt(b * b - c)
    p = domain.points
    e = domain.edges
    denom = _cross(np.broadcast_to(u, e.shape), e)
    rel = p - x
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        t = _cross(rel, e) / denom
        s = _cross(rel, np.broadcast_to(u, e.shape)) / denom
    ok = (denom != 0) & (s >= -1e-12) & (s <= 1 + 1e-12) & (t > 0)
    if not np.any(ok):
        raise DomainError("ray does not leave the polygon (point outside?)")
    return float(np.min(t[ok]))


def dir_dist(domain: Domain, x, u) -> tuple[float, float]:
    """(d(x,u), l(x,u)): the nearer exit distance along +-u and the chord length."""
    x = _as_point(domain, x)
    u = _unit(domain, u)
    _require_interior(domain, x)
    tp = _ray_exit(domain, x, u)
    tm = _ray_exit(domain, x, -u)
    return min(tp, tm), tp + tm


def boundary_dist(domain: Domain, x) -> float:
    """delta(x): distance to the exterior of the part of the domain visible from x.

    For polygons the nearest boundary point is always visible, so this is
    the Euclidean distance to the boundary for convex and nonconvex input.
    """
    x = _as_point(domain, x)
    _require_interior(domain, x)
    return float(_boundary_dist_many(domain, x[None, :])[0])


def _boundary_dist_many(domain, pts):
    if isinstance(domain, Interval):
        return np.minimum(pts[:, 0], domain.length - pts[:, 0])
    if isinstance(domain, Box):
        a = np.array(domain.sides)
        return np.min(np.minimum(pts, a - pts), axis=1)
    if isinstance(domain, Ball):
        return domain.radius - np.linalg.norm(pts, axis=1)
    return np.min(_edge_distances(domain, pts), axis=1)


def boundary_dist_sampled(domain: Domain, x, n_dirs: int) -> float:
    """inf over n_dirs equally spaced directions of theta(x, u) (2D only).

    An upper bound on delta(x).  When the nearest boundary point lies on
    a straight edge the overshoot is at most delta(x) (1/cos(pi/n_dirs) - 1);
    when it is a reflex vertex, rays can slip past the vertex and the
    overshoot depends on the edge angles there.
    """
    x = _as_point(domain, x)
    _require_interior(domain, x)
    ang = 2 * np.pi * np.arange(n_dirs) / n_dirs
    return min(_ray_exit(domain, x, np.array([math.cos(a), math.sin(a)])) for a in ang)


# ---------------------------------------------------------------------------
# Chords of polygons along a direction


def _polygon_chords(poly: Polygon, u, offsets):
    """Chord intervals of the lines {s u_perp + t u} for each offset s.

    Returns a list (one entry per offset) of arrays of (t_in, t_out) pairs.
    Uses the half-open crossing rule, so lines through vertices are counted
    consistently.
    """
    u = np.asarray(u, dtype=float)
    v = np.array([-u[1], u[0]])
    p = poly.points
    q = np.roll(p, -1, axis=0)
    sp, sq = p @ v, q @ v
    tp, tq = p @ u, q @ u
    s = np.asarray(offsets, dtype=float)[:, None]
    hit = ((sp <= s) & (s < sq)) | ((sq <= s) & (s < sp))
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = (s - sp) / (sq - sp)
    t = np.where(hit, tp + lam * (tq - tp), np.nan)
    out = []
    for row in t:
        vals = np.sort(row[~np.isnan(row)])
        out.append(vals.reshape(-1, 2) if len(vals) % 2 == 0 else np.empty((0, 2)))
    return out


def _projection_range(poly: Polygon, v):
    proj = poly.points @ v
    return float(proj.min()), float(proj.max())


# ---------------------------------------------------------------------------
# Width


def _calipers_width(pts: np.ndarray) -> float:
    """Minimal width of a convex polygon (CCW vertices) by rotating calipers."""
    n = len(pts)
    e = np.roll(pts, -1, axis=0) - pts

    def height(i, j):
        return abs(_cross(e[i], pts[j] - pts[i])) / math.hypot(e[i, 0], e[i, 1])

    j = 1
    best = math.inf
    for i in range(n):
        if j == i:
            j = (j + 1) % n
        # advance the antipodal pointer while the height grows; on parallel
        # edges (ties) both antipodal candidates are visited
        steps = 0
        while height(i, (j + 1) % n) >= height(i, j) and steps < n:
            j = (j + 1) % n
            steps += 1
        best = min(best, height(i, j))
    return best


def _max_chord(poly: Polygon, u) -> float:
    """sup over x of l(x, u): the longest chord segment parallel to u.

    Chord lengths are piecewise linear in the offset, so the supremum is
    attained (as a limit) on lines through vertices.
    """
    v = np.array([-u[1], u[0]])
    lo, hi = _projection_range(poly, v)
    tiny = 1e-9 * (hi - lo)
    s_v = poly.points @ v
    offs = np.concatenate([s_v - tiny, s_v + tiny])
    offs = offs[(offs > lo) & (offs < hi)]
    best = 0.0
    for ch in _polygon_chords(poly, u, offs):
        if len(ch):
            best = max(best, float(np.max(ch[:, 1] - ch[:, 0])))
    return best


def min_width(domain: Domain, config: EvalConfig | None = None) -> float:
    """l_0 = inf_u sup_x l(x, u); the minimal width for convex domains.

    Exact for intervals, boxes, balls and convex polygons (rotating
    calipers).  For nonconvex polygons this is an estimate: the infimum is
    taken over ``config.dir_samples`` directions and refined locally, which
    can only overestimate l_0.
    """
    config = config or EvalConfig()
    if isinstance(domain, Interval):
        return domain.length
    if isinstance(domain, Box):
        return min(domain.sides)
    if isinstance(domain, Ball):
        return 2.0 * domain.radius
    if domain.convex:
        return float(_calipers_width(domain.points))
    n = config.dir_samples
    angles = np.pi * np.arange(n) / n
    vals = [_max_chord(domain, np.array([math.cos(a), math.sin(a)])) for a in angles]
    i = int(np.argmin(vals))
    best = vals[i]
    # golden-section refinement inside the neighbouring bracket
    a, b = angles[i] - np.pi / n, angles[i] + np.pi / n
    f = lambda t: _max_chord(domain, np.array([math.cos(t), math.sin(t)]))
    g = (math.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(60):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
    return float(min(best, fc, fd))


def min_width_is_exact(domain: Domain) -> bool:
    return not (isinstance(domain, Polygon) and not domain.convex)


# ---------------------------------------------------------------------------
# Inner parallel sets


def _clip_halfplane(poly_pts, normal, offset):
    """Keep the part of a convex polygon with normal . x <= offset."""
    if len(poly_pts) == 0:
        return poly_pts
    out = []
    n = len(poly_pts)
    for i in range(n):
        a, b = poly_pts[i], poly_pts[(i + 1) % n]
        fa, fb = normal @ a - offset, normal @ b - offset
        if fa <= 0:
            out.append(a)
        if (fa < 0 < fb) or (fb < 0 < fa):
            out.append(a + (fa / (fa - fb)) * (b - a))
    return np.array(out)


def _inner_parallel_polygon(poly: Polygon, t: float) -> np.ndarray:
    pts = poly.points
    normals = poly.outward_normals
    cur = pts.copy()
    for i in range(len(pts)):
        cur = _clip_halfplane(cur, normals[i], normals[i] @ pts[i] - t)
        if len(cur) < 3:
            return np.empty((0, 2))
    return cur


def _require_convex(domain):
    if isinstance(domain, Polygon) and not domain.convex:
        raise DomainError("inner parallel sets are only implemented for convex domains")


def inner_parallel_perimeter(domain: Domain, t: float) -> float:
    """|boundary of {x : delta(x) > t}| for convex domains (0 once empty)."""
    if t < 0:
        raise ValueError("t must be >= 0")
    _require_convex(domain)
    if isinstance(domain, Interval):
        return 2.0 if t < domain.length / 2 else 0.0
    if isinstance(domain, Box):
        inner = [a - 2 * t for a in domain.sides]
        if min(inner) <= 0:
            return 0.0
        return _box_surface(inner)
    if isinstance(domain, Ball):
        r = domain.radius - t
        return domain.dim * unit_ball_volume(domain.dim) * r ** (domain.dim - 1) if r > 0 else 0.0
    cur = _inner_parallel_polygon(domain, t)
    if len(cur) < 3:
        return 0.0
    return float(np.sum(np.hypot(*(np.roll(cur, -1, axis=0) - cur).T)))


def inner_parallel_volume(domain: Domain, t: float) -> float:
    """|{x : delta(x) > t}| for convex domains."""
    _require_convex(domain)
    if isinstance(domain, Interval):
        return max(domain.length - 2 * t, 0.0)
    if isinstance(domain, Box):
        return float(np.prod([max(a - 2 * t, 0.0) for a in domain.sides]))
    if isinstance(domain, Ball):
        r = domain.radius - t
        return unit_ball_volume(domain.dim) * r ** domain.dim if r > 0 else 0.0
    cur = _inner_parallel_polygon(domain, t)
    if len(cur) < 3:
        return 0.0
    return 0.5 * float(np.sum(_cross(cur, np.roll(cur, -1, axis=0))))


def tube_volume(domain: Domain, width: float) -> float:
    """|{x in domain : delta(x) < width}| for convex domains."""
    return volume(domain) - inner_parallel_volume(domain, width)


def _box_surface(sides):
    v = float(np.prod(sides))
    return sum(2 * v / a for a in sides)


# ---------------------------------------------------------------------------
# Bulk statistics


@dataclass(frozen=True)
class GeomStats:
    volume: float
    perimeter: float
    width: float
    second_moment: float
    inradius: float
    width_exact: bool = True


def volume(domain: Domain) -> float:
    if isinstance(domain, Interval):
        return domain.length
    if isinstance(domain, Box):
        return float(np.prod(domain.sides))
    if isinstance(domain, Ball):
        return unit_ball_volume(domain.dim) * domain.radius ** domain.dim
    pts = domain.points
    return 0.5 * float(np.sum(_cross(pts, np.roll(pts, -1, axis=0))))


def perimeter(domain: Domain) -> float:
    """|boundary| (the number of endpoints, 2, for an interval)."""
    if isinstance(domain, Interval):
        return 2.0
    if isinstance(domain, Box):
        return _box_surface(domain.sides)
    if isinstance(domain, Ball):
        return domain.dim * unit_ball_volume(domain.dim) * domain.radius ** (domain.dim - 1)
    return float(np.sum(np.hypot(domain.edges[:, 0], domain.edges[:, 1])))


def centroid(domain: Domain) -> np.ndarray:
    if isinstance(domain, Interval):
        return np.array([domain.length / 2])
    if isinstance(domain, Box):
        return np.array(domain.sides) / 2
    if isinstance(domain, Ball):
        return np.zeros(domain.dim)
    p = domain.points
    q = np.roll(p, -1, axis=0)
    c = _cross(p, q)
    area = 0.5 * np.sum(c)
    return np.array([np.sum((p[:, 0] + q[:, 0]) * c), np.sum((p[:, 1] + q[:, 1]) * c)]) / (6 * area)


def second_moment(domain: Domain) -> float:
    """I = integral of |x - centroid|^2 over the domain."""
    if isinstance(domain, Interval):
        return domain.length ** 3 / 12
    if isinstance(domain, Box):
        v = volume(domain)
        return v * sum(a * a for a in domain.sides) / 12
    if isinstance(domain, Ball):
        d = domain.dim
        return volume(domain) * d * domain.radius ** 2 / (d + 2)
    p = domain.points
    q = np.roll(p, -1, axis=0)
    c = _cross(p, q)
    # polar moment about the origin, triangle fan
    i_origin = np.sum(c * (p[:, 0] ** 2 + p[:, 0] * q[:, 0] + q[:, 0] ** 2
                           + p[:, 1] ** 2 + p[:, 1] * q[:, 1] + q[:, 1] ** 2)) / 12
    g = centroid(domain)
    return float(i_origin - volume(domain) * g @ g)


def inradius(domain: Domain) -> float:
    """Radius of the largest inscribed ball."""
    if isinstance(domain, Interval):
        return domain.length / 2
    if isinstance(domain, Box):
        return min(domain.sides) / 2
    if isinstance(domain, Ball):
        return domain.radius
    normals = domain.outward_normals
    b = np.sum(normals * domain.points, axis=1)
    if domain.convex:
        # maximise r subject to n_i . c + r <= b_i
        A = np.hstack([normals, np.ones((len(b), 1))])
        res = linprog([0, 0, -1], A_ub=A, b_ub=b, bounds=[(None, None)] * 2 + [(0, None)])
        if not res.success:
            raise DomainError(f"inradius LP failed: {res.message}")
        return float(res.x[2])
    # nonconvex: grid search + local polish of the distance function
    lo = domain.points.min(axis=0)
    hi = domain.points.max(axis=0)
    g = np.stack(np.meshgrid(np.linspace(lo[0], hi[0], 80), np.linspace(lo[1], hi[1], 80)), -1).reshape(-1, 2)
    inside = _polygon_inside(domain, g)
    g = g[inside]
    dist = np.min(_edge_distances(domain, g), axis=1)
    best = 0.0
    for start in g[np.argsort(dist)[-5:]]:
        res = minimize(lambda z: -float(np.min(_edge_distances(domain, z[None]))) if _polygon_inside(domain, z[None])[0] else 0.0,
                       start, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-14})
        best = max(best, float(-res.fun))
    return best


def geom_stats(domain: Domain, config: EvalConfig | None = None) -> GeomStats:
    return GeomStats(
        volume=volume(domain),
        perimeter=perimeter(domain),
        width=min_width(domain, config),
        second_moment=second_moment(domain),
        inradius=inradius(domain),
        width_exact=min_width_is_exact(domain),
    )


# ---------------------------------------------------------------------------
# Exterior density rho(x) and the boundary-tube integral M(Lambda)


def _eps(domain, config):
    return config.eps if config.eps is not None else 1e-6 * diameter(domain)


def _strictly_outside(domain, a):
    if isinstance(domain, Polygon):
        inside = bool(_polygon_inside(domain, a[None])[0])
        return not inside and float(np.min(_edge_distances(domain, a[None]))) > 0
    return not contains(domain, a) and float(_boundary_dist_signed(domain, a)) > 0


def _boundary_dist_signed(domain, a):
    # distance from an exterior point to the closed domain (only > 0 matters)
    if isinstance(domain, Interval):
        return max(-a[0], a[0] - domain.length)
    if isinstance(domain, Box):
        s = np.array(domain.sides)
        return float(np.linalg.norm(np.maximum(np.maximum(-a, a - s), 0.0)))
    return float(np.linalg.norm(a)) - domain.radius


def _exterior_candidates(domain, x, delta, eps):
    """Points a outside the closure of the domain with |x - a| < delta + eps.

    Candidates sit just outside boundary points that are within reach:
    nearest points of faces/edges and vertices.  Each is pushed outward by
    half of the remaining slack.
    """
    reach = delta + eps
    base = []  # (boundary point, outward direction)
    if isinstance(domain, Interval):
        base = [(np.array([0.0]), np.array([-1.0])), (np.array([domain.length]), np.array([1.0]))]
    elif isinstance(domain, Ball):
        r = np.linalg.norm(x)
        n = x / r if r > 0 else np.eye(domain.dim)[0]
        base = [(domain.radius * n, n)]
    elif isinstance(domain, Box) and domain.dim != 2:
        a = np.array(domain.sides)
        for i in range(domain.dim):
            for side, sgn in ((0.0, -1.0), (a[i], 1.0)):
                p = x.copy()
                p[i] = side
                base.append((p, sgn * np.eye(domain.dim)[i]))
        # corners
        for bits in range(2 ** domain.dim):
            c = np.array([a[i] if (bits >> i) & 1 else 0.0 for i in range(domain.dim)])
            d = np.array([1.0 if (bits >> i) & 1 else -1.0 for i in range(domain.dim)])
            base.append((c, d / np.linalg.norm(d)))
    else:
        poly = domain.as_polygon() if isinstance(domain, Box) else domain
        p, e, nrm = poly.points, poly.edges, poly.outward_normals
        rel = x - p
        s = np.clip(np.sum(rel * e, axis=1) / np.sum(e * e, axis=1), 0.0, 1.0)
        for i in range(len(p)):
            if 0.0 < s[i] < 1.0:
                base.append((p[i] + s[i] * e[i], nrm[i]))
        prev = np.roll(nrm, 1, axis=0)
        for i in range(len(p)):
            d = prev[i] + nrm[i]
            base.append((p[i], d / np.linalg.norm(d)))
    out = []
    for bp, n in base:
        slack = reach - float(np.linalg.norm(x - bp))
        if slack <= 0:
            continue
        eta = 0.5 * slack
        for _ in range(30):
            a = bp + eta * n
            if np.linalg.norm(x - a) < reach and _strictly_outside(domain, a):
                out.append(a)
                break
            eta *= 0.5
    return out


def _visible_mask(domain, x, ys):
    """ys in the part of the domain visible from x (ys: (N, d))."""
    inside = contains_many(domain, ys)
    if not isinstance(domain, Polygon) or domain.convex:
        return inside
    # a segment x -> y leaves the polygon iff it properly crosses an edge
    p = domain.points
    e = domain.edges
    d = ys - x  # (N, 2)
    denom = _cross(d[:, None, :], e[None, :, :])  # (N, E)
    rel = p[None, :, :] - x  # (1, E, 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = _cross(rel, np.broadcast_to(e, rel.shape)) / denom
        s = _cross(rel, d[:, None, :]) / denom
    crosses = (denom != 0) & (t > 0) & (t < 1) & (s >= 0) & (s <= 1)
    return inside & ~np.any(crosses, axis=1)


def _sample_ball(rng, n, dim, center, radius):
    if dim == 2:
        # rejection from the bounding square (acceptance pi/4), no trig needed
        out = np.empty((0, 2))
        while len(out) < n:
            m = int(1.3 * (n - len(out))) + 16
            u = 2.0 * rng.random((m, 2)) - 1.0
            out = np.concatenate([out, u[np.einsum("ij,ij->i", u, u) < 1.0]])
        return center + radius * out[:n]
    if dim == 1:
        return center + radius * (2.0 * rng.random((n, 1)) - 1.0)
    g = rng.standard_normal((n, dim))
    g /= np.linalg.norm(g, axis=1)[:, None]
    r = radius * rng.random(n) ** (1.0 / dim)
    return center + g * r[:, None]


def _rho_estimate(domain, x, config, rng):
    delta = float(_boundary_dist_many(domain, x[None])[0])
    cands = _exterior_candidates(domain, x, delta, _eps(domain, config))
    if not cands:
        raise RuntimeError("no exterior point within delta(x) + eps; invalid domain?")
    n = int(config.mc_samples)
    best = Estimate(-1.0, 0.0)
    for a in cands:
        radius = float(np.linalg.norm(x - a))
        ys = _sample_ball(rng, n, domain.dim, a, radius)
        frac = 1.0 - float(np.mean(_visible_mask(domain, x, ys)))
        if frac > best.mean:
            best = Estimate(frac, math.sqrt(max(frac * (1 - frac), 0.0) / n))
    return best


def rho(domain: Domain, x, config: EvalConfig | None = None) -> Estimate:
    """Monte Carlo estimate of the exterior density rho(x).

    The infimum over eps is replaced by the fixed ``config.eps`` and the
    supremum over exterior points by a maximum over a finite candidate
    set; the result is therefore biased low relative to the supremum.
    """
    config = config or EvalConfig()
    x = _as_point(domain, x)
    _require_interior(domain, x)
    rng = rng_stream(config.seed, "rho", tuple(np.round(x, 15)))
    return _rho_estimate(domain, x, config, rng)


class _TubeCover:
    """Components covering the boundary tube, for importance sampling."""

    def __init__(self, domain, width):
        self.domain = domain
        self.width = width
        self.parts = []  # (measure, sampler, indicator)
        w = width
        if isinstance(domain, Interval):
            l = domain.length
            for lo in (0.0, max(l - w, 0.0)):
                hi = min(lo + w, l)
                self.parts.append((hi - lo,
                                   lambda rng, n, lo=lo, hi=hi: lo + (hi - lo) * rng.random((n, 1)),
                                   lambda y, lo=lo, hi=hi: (y[:, 0] >= lo) & (y[:, 0] <= hi)))
        elif isinstance(domain, Ball):
            r, d = domain.radius, domain.dim
            r0 = max(r - w, 0.0)
            meas = unit_ball_volume(d) * (r ** d - r0 ** d)

            def samp(rng, n, r=r, r0=r0, d=d):
                g = rng.standard_normal((n, d))
                g /= np.linalg.norm(g, axis=1)[:, None]
                rad = (r0 ** d + (r ** d - r0 ** d) * rng.random(n)) ** (1.0 / d)
                return g * rad[:, None]

            self.parts.append((meas, samp, lambda y: np.ones(len(y), bool)))
        elif isinstance(domain, Box) and domain.dim != 2:
            a = np.array(domain.sides)
            d = domain.dim
            for i in range(d):
                for lo_i in (0.0, max(a[i] - w, 0.0)):
                    lo = np.zeros(d)
                    hi = a.copy()
                    lo[i] = lo_i
                    hi[i] = min(lo_i + w, a[i])
                    self.parts.append((float(np.prod(hi - lo)),
                                       lambda rng, n, lo=lo, hi=hi: lo + (hi - lo) * rng.random((n, len(lo))),
                                       lambda y, lo=lo, hi=hi: np.all((y >= lo) & (y <= hi), axis=1)))
        else:
            poly = domain.as_polygon() if isinstance(domain, Box) else domain
            p, e = poly.points, poly.edges
            inward = -poly.outward_normals
            for i in range(len(p)):
                L = float(np.hypot(*e[i]))

                def samp(rng, n, p=p[i], e=e[i], m=inward[i]):
                    u = rng.random((n, 2))
                    return p + u[:, :1] * e + (w * u[:, 1:]) * m

                def ind(y, p=p[i], e=e[i], m=inward[i]):
                    rel = y - p
                    s = rel @ e / (e @ e)
                    t = rel @ m
                    return (s >= 0) & (s <= 1) & (t >= 0) & (t <= w)

                self.parts.append((L * w, samp, ind))
            for c in poly.reflex_vertices:
                self.parts.append((math.pi * w * w,
                                   lambda rng, n, c=c: _sample_ball(rng, n, 2, c, w),
                                   lambda y, c=c: np.sum((y - c) ** 2, axis=1) <= w * w))
        self.total = sum(m for m, _, _ in self.parts)

    def sample(self, rng, n):
        probs = np.array([m for m, _, _ in self.parts]) / self.total
        which = rng.choice(len(self.parts), size=n, p=probs)
        pts = np.empty((n, self.domain.dim))
        for k, (_, samp, _) in enumerate(self.parts):
            idx = np.nonzero(which == k)[0]
            if len(idx):
                pts[idx] = samp(rng, len(idx))
        count = np.zeros(n)
        for _, _, ind in self.parts:
            count += ind(pts)
        return pts, count


def m_lambda(domain: Domain, lam: float, config: EvalConfig | None = None) -> Estimate:
    """Monte Carlo estimate of M(Lambda) = integral of rho over {delta < 1/(4 sqrt Lambda)}.

    Tube points are drawn by importance sampling from a cover of the tube
    (face slabs, edge strips, discs at reflex vertices); rho is estimated at
    each point with its own random substream.  The standard error is the
    sample standard deviation of the weighted contributions.
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    config = config or EvalConfig()
    width = 1.0 / (4.0 * math.sqrt(lam))
    cover = _TubeCover(domain, width)
    n = int(config.tube_points)
    rng = rng_stream(config.seed, "m_lambda", "tube", float(lam))
    pts, count = cover.sample(rng, n)
    inside = contains_many(domain, pts)
    delta = np.where(inside, _boundary_dist_many(domain, np.where(inside[:, None], pts, centroid(domain))), np.inf)
    in_tube = inside & (delta < width) & (count > 0)
    contrib = np.zeros(n)
    for i in np.nonzero(in_tube)[0]:
        sub = rng_stream(config.seed, "m_lambda", "rho", float(lam), int(i))
        contrib[i] = _rho_estimate(domain, pts[i], config, sub).mean / count[i]
    contrib *= cover.total
    mean = float(np.mean(contrib))
    stderr = float(np.std(contrib, ddof=1) / math.sqrt(n)) if n > 1 else math.inf
    return Estimate(mean, stderr)
