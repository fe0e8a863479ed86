"""
Brouwer degree of planar vector fields by winding numbers.

A closed, positively oriented contour is stored as a list of oriented
pieces (straight segments and circular arcs).  The degree of a field on the
enclosed region is the winding number of the field along the contour; it is
accumulated from wrapped angle increments, refining the sampling until every
increment is below ``pi/2`` so that the integer is certified given a lower
bound on ``|f|`` along the contour.

Regions bounded by lines and circles (as in the restricted triangular
four-body problem) are described by :class:`Region`; their inward
``eps``-offsets give the contours used for "generalized" degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

__all__ = [
    "ZeroOnContourError",
    "WindingError",
    "Segment",
    "Arc",
    "BoundaryCurve",
    "PlanarField",
    "LineEdge",
    "CircleEdge",
    "Region",
    "winding_degree",
    "brouwer_index",
    "circle_curve",
    "shrunk_boundary",
]

CLOSURE_TOL = 1e-12
MAX_SAMPLES = 2**20
MAX_STEP = 0.5 * math.pi


class ZeroOnContourError(ValueError):
    """The field comes closer to zero on the contour than its declared margin."""


class WindingError(RuntimeError):
    """Refinement budget exhausted before the winding number could be certified."""


@dataclass(frozen=True)
class Segment:
    start: tuple[float, float]
    end: tuple[float, float]

    def points(self, t: np.ndarray) -> np.ndarray:
        a, b = np.asarray(self.start), np.asarray(self.end)
        return a + np.multiply.outer(t, b - a)

    def reversed(self) -> "Segment":
        return Segment(self.end, self.start)

    @property
    def length(self) -> float:
        return float(np.hypot(*np.subtract(self.end, self.start)))

    @property
    def turning(self) -> float:
        return 0.0

    def tangent(self, t: float) -> np.ndarray:
        d = np.subtract(self.end, self.start)
        return d / np.linalg.norm(d)


@dataclass(frozen=True)
class Arc:
    """Circular arc from angle ``theta0`` sweeping ``sweep`` radians (sign = direction)."""

    center: tuple[float, float]
    radius: float
    theta0: float
    sweep: float

    def points(self, t: np.ndarray) -> np.ndarray:
        th = self.theta0 + np.asarray(t) * self.sweep
        c = np.asarray(self.center)
        return c + self.radius * np.stack([np.cos(th), np.sin(th)], axis=-1)

    @property
    def start(self) -> tuple[float, float]:
        return tuple(self.points(np.array(0.0)).tolist())

    @property
    def end(self) -> tuple[float, float]:
        return tuple(self.points(np.array(1.0)).tolist())

    def reversed(self) -> "Arc":
        return Arc(self.center, self.radius, self.theta0 + self.sweep, -self.sweep)

    @property
    def length(self) -> float:
        return abs(self.sweep) * self.radius

    @property
    def turning(self) -> float:
        return self.sweep

    def tangent(self, t: float) -> np.ndarray:
        th = self.theta0 + t * self.sweep
        return math.copysign(1.0, self.sweep) * np.array([-math.sin(th), math.cos(th)])


Piece = Union[Segment, Arc]


def _turn_angle(u: np.ndarray, v: np.ndarray) -> float:
    return math.atan2(u[0] * v[1] - u[1] * v[0], float(u @ v))


@dataclass(frozen=True)
class BoundaryCurve:
    """Closed piecewise contour made of segments and arcs.

    Construction checks that consecutive pieces join (and the last returns to
    the first) within ``1e-12`` and that non-adjacent pieces do not cross.
    """

    pieces: tuple[Piece, ...]

    def __post_init__(self):
        pieces = tuple(self.pieces)
        if not pieces:
            raise ValueError("a boundary curve needs at least one piece")
        object.__setattr__(self, "pieces", pieces)
        n = len(pieces)
        for i, p in enumerate(pieces):
            q = pieces[(i + 1) % n]
            gap = math.dist(p.end, q.start)
            if gap > CLOSURE_TOL * max(1.0, math.hypot(*p.end)):
                raise ValueError(f"curve is not closed between pieces {i} and {(i + 1) % n} (gap {gap:.3g})")
        self._check_simple()

    def _check_simple(self, n_per_piece: int = 200) -> None:
        polys = [p.points(np.linspace(0.0, 1.0, n_per_piece)) for p in self.pieces]
        n = len(polys)
        for i in range(n):
            for j in range(i + 1, n):
                adjacent = j == i + 1 or (i == 0 and j == n - 1)
                a, b = polys[i], polys[j]
                if adjacent:
                    # drop the shared endpoint neighbourhood
                    if j == i + 1:
                        a, b = a[:-2], b[2:]
                    else:
                        a, b = a[2:], b[:-2]
                if n == 1 or len(a) < 2 or len(b) < 2:
                    continue
                if _polylines_intersect(a, b):
                    raise ValueError(f"boundary pieces {i} and {j} intersect")

    def reversed(self) -> "BoundaryCurve":
        return BoundaryCurve(tuple(p.reversed() for p in reversed(self.pieces)))

    @property
    def length(self) -> float:
        return sum(p.length for p in self.pieces)

    def total_turning(self) -> float:
        """Sum of arc sweeps plus exterior angles at the joints."""
        total = sum(p.turning for p in self.pieces)
        n = len(self.pieces)
        for i, p in enumerate(self.pieces):
            q = self.pieces[(i + 1) % n]
            total += _turn_angle(p.tangent(1.0), q.tangent(0.0))
        return total

    def signed_area(self, n_per_piece: int = 400) -> float:
        pts = np.concatenate([p.points(np.linspace(0.0, 1.0, n_per_piece))[:-1] for p in self.pieces])
        x, y = pts[:, 0], pts[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    def sample(self, n_per_piece: int = 100) -> np.ndarray:
        return np.concatenate([p.points(np.linspace(0.0, 1.0, n_per_piece)) for p in self.pieces])

    def encloses(self, points, n_per_piece: int = 400) -> np.ndarray:
        """Whether each point lies inside the curve (winding number of a fine polygon)."""
        pts = np.atleast_2d(np.asarray(points, float))
        poly = np.concatenate([p.points(np.linspace(0.0, 1.0, n_per_piece))[:-1] for p in self.pieces])
        rel = poly[None, :, :] - pts[:, None, :]
        ang = np.arctan2(rel[..., 1], rel[..., 0])
        d = np.diff(np.concatenate([ang, ang[:, :1]], axis=1), axis=1)
        d = (d + math.pi) % (2 * math.pi) - math.pi
        return np.abs(d.sum(axis=1)) > math.pi


def _polylines_intersect(a: np.ndarray, b: np.ndarray) -> bool:
    # bounding-box prefilter, then vectorized proper-intersection test
    if (a[:, 0].max() < b[:, 0].min() or b[:, 0].max() < a[:, 0].min()
            or a[:, 1].max() < b[:, 1].min() or b[:, 1].max() < a[:, 1].min()):
        return False
    p, r = a[:-1, None, :], (a[1:] - a[:-1])[:, None, :]
    q, s = b[None, :-1, :], (b[1:] - b[:-1])[None, :, :]
    cross = lambda u, v: u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]
    denom = cross(r, s)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = cross(q - p, s) / denom
        u = cross(q - p, r) / denom
    hit = (denom != 0) & (t >= 0) & (t <= 1) & (u >= 0) & (u <= 1)
    return bool(hit.any())


@dataclass(frozen=True)
class PlanarField:
    """Vector field on the plane.

    ``func`` maps an ``(..., 2)`` array of points to ``(..., 2)`` vectors.
    ``zero_free_margin`` is the smallest ``|f|`` tolerated on a contour.
    """

    func: Callable[[np.ndarray], np.ndarray]
    zero_free_margin: float = 1e-9

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        return self.func(pts)


def _as_field(f) -> PlanarField:
    return f if isinstance(f, PlanarField) else PlanarField(f)


def _piece_winding(f: PlanarField, piece: Piece, n0: int, budget: list) -> tuple[float, np.ndarray, np.ndarray, float]:
    t = np.linspace(0.0, 1.0, n0 + 1)
    vals = np.asarray(f(piece.points(t)), dtype=float)
    budget[0] += t.size
    while True:
        norms = np.hypot(vals[:, 0], vals[:, 1])
        if norms.min() < max(f.zero_free_margin, np.finfo(float).tiny):
            raise ZeroOnContourError(
                f"zero on contour: |f| = {norms.min():.3g} below margin {f.zero_free_margin:.3g}")
        ang = np.arctan2(vals[:, 1], vals[:, 0])
        inc = np.angle(np.exp(1j * np.diff(ang)))
        bad = np.flatnonzero(np.abs(inc) >= MAX_STEP)
        if bad.size == 0:
            break
        budget[0] += bad.size
        if budget[0] > MAX_SAMPLES or np.min(t[bad + 1] - t[bad]) < 1e-14:
            raise WindingError("cannot certify winding: the field turns too fast along the contour "
                               "(a zero on or extremely close to it)")
        tm = 0.5 * (t[bad] + t[bad + 1])
        vm = np.asarray(f(piece.points(tm)), dtype=float)
        t = np.insert(t, bad + 1, tm)
        vals = np.insert(vals, bad + 1, vm, axis=0)
    return float(inc.sum()), vals[0], vals[-1], float(norms.min())


def winding_degree(f, curve: BoundaryCurve, min_samples: int = 64, return_details: bool = False):
    """Winding number of ``t -> f(curve(t))`` around the origin.

    Parameters
    ----------
    f : PlanarField or callable
        Vectorized field.
    curve : BoundaryCurve
        Closed contour; positive orientation gives the Brouwer degree of
        ``f`` on the enclosed region.
    min_samples : int
        Initial number of intervals per piece before adaptive refinement.

    Raises
    ------
    ZeroOnContourError
        If some sampled ``|f|`` falls below ``f.zero_free_margin``.
    WindingError
        If more than ``2**20`` samples would be needed.
    """
    f = _as_field(f)
    budget = [0]
    total, min_norm = 0.0, math.inf
    ends = []
    for piece in curve.pieces:
        w, v0, v1, mn = _piece_winding(f, piece, min_samples, budget)
        total += w
        min_norm = min(min_norm, mn)
        ends.append((v0, v1))
        if min_norm < f.zero_free_margin:
            raise ZeroOnContourError(f"zero on contour: |f| = {min_norm:.3g} below margin {f.zero_free_margin:.3g}")
    n = len(ends)
    for i in range(n):
        a, b = ends[i][1], ends[(i + 1) % n][0]
        total += math.atan2(a[0] * b[1] - a[1] * b[0], float(a @ b))
    deg = int(round(total / (2.0 * math.pi)))
    if abs(total - 2.0 * math.pi * deg) > 1e-6:
        raise WindingError(f"accumulated angle {total} is not a multiple of 2 pi")
    if return_details:
        return deg, {"samples": budget[0], "min_norm": min_norm}
    return deg


def circle_curve(center: Sequence[float], radius: float) -> BoundaryCurve:
    return BoundaryCurve((Arc(tuple(map(float, center)), float(radius), 0.0, 2.0 * math.pi),))


def brouwer_index(f, q0: Sequence[float], r: float) -> int:
    """Brouwer index of an isolated zero ``q0`` as the degree on a small circle.

    The degree is also computed on circles of radius ``r/2`` and ``r/4``; a
    disagreement means ``q0`` is not the only zero in the disk.
    """
    if not r > 0:
        raise ValueError("radius must be positive")
    degs = [winding_degree(f, circle_curve(q0, r * s)) for s in (1.0, 0.5, 0.25)]
    if len(set(degs)) != 1:
        raise ValueError(f"zero at {tuple(q0)} is not isolated within radius {r}: degrees {degs}")
    return degs[0]


# --- regions bounded by lines and circles --------------------------------


@dataclass(frozen=True)
class LineEdge:
    """Boundary line through ``point`` traversed along ``direction``; the region lies to its left."""

    point: tuple[float, float]
    direction: tuple[float, float]

    def offset(self, eps: float) -> "LineEdge":
        d = np.asarray(self.direction, float)
        d = d / np.linalg.norm(d)
        nrm = np.array([-d[1], d[0]])
        return LineEdge(tuple(np.asarray(self.point) + eps * nrm), tuple(d))


@dataclass(frozen=True)
class CircleEdge:
    """Boundary circle; ``inside`` says whether the region lies inside it."""

    center: tuple[float, float]
    radius: float
    inside: bool

    def offset(self, eps: float) -> "CircleEdge":
        r = self.radius - eps if self.inside else self.radius + eps
        if r <= 0:
            raise ValueError("offset degenerates: circle radius becomes nonpositive")
        return CircleEdge(self.center, r, self.inside)


Edge = Union[LineEdge, CircleEdge]


@dataclass(frozen=True)
class Region:
    """Planar region bounded by consecutive line and circle edges.

    ``edges[i]`` runs from ``corners[i]`` to ``corners[i+1]`` (cyclically),
    counterclockwise around the region.  ``contains`` is a vectorized
    membership predicate for the open region.
    """

    name: str
    edges: tuple[Edge, ...]
    corners: tuple[tuple[float, float], ...]
    contains: Callable[[np.ndarray], np.ndarray] = field(compare=False, repr=False)


def _intersect(e1: Edge, e2: Edge) -> list[np.ndarray]:
    if isinstance(e1, LineEdge) and isinstance(e2, LineEdge):
        p, r = np.asarray(e1.point), np.asarray(e1.direction)
        q, s = np.asarray(e2.point), np.asarray(e2.direction)
        den = r[0] * s[1] - r[1] * s[0]
        if abs(den) < 1e-14:
            return []
        t = ((q - p)[0] * s[1] - (q - p)[1] * s[0]) / den
        return [p + t * r]
    if isinstance(e1, CircleEdge) and isinstance(e2, LineEdge):
        e1, e2 = e2, e1
    if isinstance(e1, LineEdge):
        p, d = np.asarray(e1.point), np.asarray(e1.direction, float)
        d = d / np.linalg.norm(d)
        c, r = np.asarray(e2.center), e2.radius
        w = p - c
        b, cc = w @ d, w @ w - r * r
        disc = b * b - cc
        if disc < 0:
            return []
        sq = math.sqrt(disc)
        return [p + (-b - sq) * d, p + (-b + sq) * d]
    c1, r1 = np.asarray(e1.center), e1.radius
    c2, r2 = np.asarray(e2.center), e2.radius
    dvec = c2 - c1
    dist = float(np.linalg.norm(dvec))
    if dist == 0 or dist > r1 + r2 or dist < abs(r1 - r2):
        return []
    a = (r1 * r1 - r2 * r2 + dist * dist) / (2 * dist)
    hgt = math.sqrt(max(r1 * r1 - a * a, 0.0))
    base = c1 + a * dvec / dist
    perp = np.array([-dvec[1], dvec[0]]) / dist
    return [base + hgt * perp, base - hgt * perp]


def _edge_piece(edge: Edge, a: np.ndarray, b: np.ndarray, ref: Edge, ref_a, ref_b) -> Piece:
    if isinstance(edge, LineEdge):
        if (b - a) @ np.asarray(edge.direction) <= 0:
            raise ValueError("offset degenerates: an edge collapsed")
        return Segment(tuple(a), tuple(b))
    c = np.asarray(edge.center)
    th0 = math.atan2(*(a - c)[::-1])
    th1 = math.atan2(*(b - c)[::-1])
    if edge.inside:
        sweep = (th1 - th0) % (2 * math.pi)
    else:
        sweep = -((th0 - th1) % (2 * math.pi))
    # the offset arc must not sweep further than the original one
    rc = np.asarray(ref.center)
    ref0 = math.atan2(*(np.asarray(ref_a) - rc)[::-1])
    ref1 = math.atan2(*(np.asarray(ref_b) - rc)[::-1])
    ref_sweep = (ref1 - ref0) % (2 * math.pi) if ref.inside else -((ref0 - ref1) % (2 * math.pi))
    if abs(sweep) > abs(ref_sweep) + 1e-9 or sweep == 0:
        raise ValueError("offset degenerates: an arc collapsed")
    return Arc(tuple(c), edge.radius, th0, sweep)


def _foot(edge: Edge, p: np.ndarray) -> np.ndarray:
    """Closest point of an edge's supporting line or circle to ``p``."""
    if isinstance(edge, LineEdge):
        a, d = np.asarray(edge.point), np.asarray(edge.direction, float)
        d = d / np.linalg.norm(d)
        return a + ((p - a) @ d) * d
    c = np.asarray(edge.center)
    v = p - c
    return c + edge.radius * v / np.linalg.norm(v)


def shrunk_boundary(region: Region, eps: float) -> BoundaryCurve:
    """Positively oriented contour of the inward ``eps``-offset of a region.

    Edges are moved inward by ``eps`` (lines shifted, circle radii adjusted).
    At each corner the two offset edges are joined by a circular arc of
    radius ``eps`` tangent to both, whose center is where the ``2 eps``
    offsets meet.  The resulting curve is C1, simple, and lies inside
    ``{q : dist(q, boundary) > eps}`` up to the rounded corners.

    Raises
    ------
    ValueError
        If ``eps`` is not positive or is large enough that the offset
        degenerates.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    edges = region.edges
    n = len(edges)
    off = [e.offset(eps) for e in edges]
    off2 = [e.offset(2 * eps) for e in edges]
    fillets = []
    for i in range(n):
        cands = _intersect(off2[i - 1], off2[i])
        orig = np.asarray(region.corners[i])
        if not cands:
            raise ValueError(f"offset degenerates at corner {i} of region {region.name}")
        f = min(cands, key=lambda p: float(np.linalg.norm(p - orig)))
        if np.linalg.norm(f - orig) > 20 * eps + 1e-9:
            raise ValueError(f"offset degenerates at corner {i} of region {region.name}")
        t_in, t_out = _foot(off[i - 1], f), _foot(off[i], f)
        th0 = math.atan2(*(t_in - f)[::-1])
        th1 = math.atan2(*(t_out - f)[::-1])
        sweep = (th1 - th0) % (2 * math.pi)
        if not 0 < sweep < math.pi:
            raise ValueError(f"corner {i} of region {region.name} is not convex")
        fillets.append((t_in, t_out, Arc(tuple(f), eps, th0, sweep)))
    pieces = []
    for i in range(n):
        a, b = fillets[i][1], fillets[(i + 1) % n][0]
        pieces.append(_edge_piece(off[i], a, b, edges[i], region.corners[i], region.corners[(i + 1) % n]))
        pieces.append(fillets[(i + 1) % n][2])
    pieces = _snap(pieces)
    curve = BoundaryCurve(tuple(pieces))
    if curve.signed_area() <= 0:
        raise ValueError(f"offset of region {region.name} degenerates")
    probe = curve.sample(50)
    inside = np.asarray(region.contains(probe))
    if not inside.all():
        raise ValueError(f"offset of region {region.name} leaves the region")
    return curve


def _snap(pieces: list) -> list:
    """Replace segment endpoints by the neighbouring arc endpoints so joints match to rounding."""
    n = len(pieces)
    out = list(pieces)
    for i in range(n):
        p = out[i]
        if isinstance(p, Segment):
            prev, nxt = out[i - 1], out[(i + 1) % n]
            start = prev.end if isinstance(prev, Arc) else p.start
            end = nxt.start if isinstance(nxt, Arc) else p.end
            out[i] = Segment(tuple(start), tuple(end))
    for i in range(n):
        p, nxt = out[i], out[(i + 1) % n]
        if isinstance(p, Arc) and isinstance(nxt, Arc):
            # shift the next arc's start angle to this arc's computed end
            c = np.asarray(nxt.center)
            e = np.asarray(p.end)
            th = math.atan2(*(e - c)[::-1])
            end_th = nxt.theta0 + nxt.sweep
            out[(i + 1) % n] = Arc(nxt.center, nxt.radius, th, end_th - th)
    return out
