"""
Restricted triangular four-body problem.

Three primaries of masses ``m1, m2, m3`` (summing to ``3 sqrt 3``) sit at the
cube roots of unity of a frame rotating with unit angular speed; a massless
particle moves under their attraction.  The effective potential is

    V(q) = -|q~ - c|^2 / 2 - sum_i m_i / |q - q_i|

with ``q~`` the projection of ``q`` on the rotation plane and ``c`` the
center of masses.  This module evaluates ``V`` and its derivatives, builds
the seven tracked regions cut out by the classical configuration of circles
and extended sides, finds and classifies every libration point, and runs the
degree and bifurcation-number pipeline.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .classify import EquilibriumReport, SpectralData, emanation_report, gamma3, vertical_period
from .degree import CircleEdge, LineEdge, PlanarField, Region, brouwer_index, shrunk_boundary, winding_degree

__all__ = [
    "SQRT3",
    "TOTAL_MASS",
    "PRIMARIES",
    "RegionLostZeroError",
    "MassTriple",
    "Geometry",
    "LibrationPoint",
    "RT4BPAnalysis",
    "center_of_mass",
    "potential",
    "gradient",
    "hessian",
    "grad_hess",
    "geometry",
    "find_librations",
    "region_degrees",
    "adaptive_region_degrees",
    "analyze",
    "REGION_NAMES",
]

log = logging.getLogger(__name__)

SQRT3 = math.sqrt(3.0)
TOTAL_MASS = 3.0 * SQRT3
PRIMARIES = np.array([[1.0, 0.0], [-0.5, SQRT3 / 2], [-0.5, -SQRT3 / 2]])
REGION_NAMES = ("T", "O1", "O2", "O3", "D1", "D2", "D3")
SINGULAR_DIST = 1e-9


class RegionLostZeroError(RuntimeError):
    """A tracked region ended up without a libration point."""


@dataclass(frozen=True)
class MassTriple:
    m1: float
    m2: float
    m3: float

    def __post_init__(self):
        m = self.as_array()
        if not np.all(m > 0):
            raise ValueError(f"masses must be positive, got {tuple(m)}")
        if abs(m.sum() - TOTAL_MASS) > 1e-12:
            raise ValueError(f"masses must sum to 3*sqrt(3) = {TOTAL_MASS!r}, got {float(m.sum())!r}")

    @classmethod
    def equal(cls) -> "MassTriple":
        return cls(SQRT3, SQRT3, SQRT3)

    @classmethod
    def normalized(cls, m1: float, m2: float, m3: float) -> "MassTriple":
        """Rescale positive masses so that they sum to ``3 sqrt 3``."""
        m = np.array([m1, m2, m3], dtype=float)
        if not np.all(m > 0):
            raise ValueError("masses must be positive")
        m = m * (TOTAL_MASS / m.sum())
        m[2] = TOTAL_MASS - m[0] - m[1]
        return cls(*map(float, m))

    def as_array(self) -> np.ndarray:
        return np.array([self.m1, self.m2, self.m3], dtype=float)


def _masses(m) -> np.ndarray:
    return m.as_array() if isinstance(m, MassTriple) else np.asarray(m, dtype=float)


def center_of_mass(m) -> np.ndarray:
    mm = _masses(m)
    return (mm[:, None] * PRIMARIES).sum(axis=0) / TOTAL_MASS


def _prepare(q) -> tuple[np.ndarray, int]:
    q = np.asarray(q, dtype=float)
    dim = q.shape[-1]
    if dim not in (2, 3):
        raise ValueError(f"points must have 2 or 3 coordinates, got {dim}")
    return q, dim


def _offsets(q: np.ndarray, dim: int) -> tuple[np.ndarray, np.ndarray]:
    prim = np.zeros((3, dim))
    prim[:, :2] = PRIMARIES
    d = q[..., None, :] - prim  # (..., 3, dim)
    r = np.linalg.norm(d, axis=-1)
    if np.any(r < SINGULAR_DIST):
        raise ValueError("point too close to a primary: potential is singular there")
    return d, r


def potential(q, m) -> np.ndarray:
    """Effective potential at planar or spatial points (broadcast over leading axes)."""
    q, dim = _prepare(q)
    mm = _masses(m)
    _, r = _offsets(q, dim)
    c = center_of_mass(mm)
    rel = q[..., :2] - c
    return -0.5 * np.sum(rel**2, axis=-1) - np.sum(mm / r, axis=-1)


def gradient(q, m) -> np.ndarray:
    q, dim = _prepare(q)
    mm = _masses(m)
    d, r = _offsets(q, dim)
    g = np.sum((mm / r**3)[..., None] * d, axis=-2)
    g[..., :2] -= q[..., :2] - center_of_mass(mm)
    return g


def hessian(q, m) -> np.ndarray:
    q, dim = _prepare(q)
    mm = _masses(m)
    d, r = _offsets(q, dim)
    eye = np.eye(dim)
    w3 = (mm / r**3)[..., None, None]
    w5 = (3.0 * mm / r**5)[..., None, None]
    outer = d[..., :, None] * d[..., None, :]
    h = np.sum(w3 * eye - w5 * outer, axis=-3)
    h[..., 0, 0] -= 1.0
    h[..., 1, 1] -= 1.0
    return h


def grad_hess(q, m) -> tuple[np.ndarray, np.ndarray]:
    return gradient(q, m), hessian(q, m)


# --- geometry ---------------------------------------------------------------


def _angle_of(v: np.ndarray) -> np.ndarray:
    return np.arctan2(v[..., 1], v[..., 0])


def _in_triangle(pts: np.ndarray) -> np.ndarray:
    pts = np.asarray(pts, float)
    ok = np.ones(pts.shape[:-1], bool)
    for i in range(3):
        a, b = PRIMARIES[i], PRIMARIES[(i + 1) % 3]
        e, w = b - a, pts - a
        ok &= e[0] * w[..., 1] - e[1] * w[..., 0] > 0
    return ok


def _in_sector(i: int):
    qi = PRIMARIES[i]
    phi = math.atan2(qi[1], qi[0])

    def contains(pts):
        d = np.asarray(pts, float) - qi
        r = np.linalg.norm(d, axis=-1)
        dphi = np.angle(np.exp(1j * (_angle_of(d) - phi)))
        return (r < SQRT3) & (r > 0) & (np.abs(dphi) < math.pi / 6)

    return contains


def _in_circular_triangle(i: int):
    qi, qj, qk = PRIMARIES[i], PRIMARIES[(i + 1) % 3], PRIMARIES[(i + 2) % 3]

    def contains(pts):
        p = np.asarray(pts, float)
        return ((np.linalg.norm(p - qj, axis=-1) < SQRT3) & (np.linalg.norm(p - qk, axis=-1) < SQRT3)
                & (np.linalg.norm(p - qi, axis=-1) > SQRT3))

    return contains


def _build_regions() -> dict[str, Region]:
    q = [tuple(p) for p in PRIMARIES]
    regions = {
        "T": Region(
            "T",
            tuple(LineEdge(q[i], tuple(PRIMARIES[(i + 1) % 3] - PRIMARIES[i])) for i in range(3)),
            tuple(q),
            _in_triangle,
        )
    }
    for i in range(3):
        qi, qj, qk = PRIMARIES[i], PRIMARIES[(i + 1) % 3], PRIMARIES[(i + 2) % 3]
        far = qj + qk - qi
        regions[f"O{i + 1}"] = Region(
            f"O{i + 1}",
            (CircleEdge(tuple(qk), SQRT3, True), CircleEdge(tuple(qj), SQRT3, True), CircleEdge(tuple(qi), SQRT3, False)),
            (tuple(qj), tuple(far), tuple(qk)),
            _in_circular_triangle(i),
        )
    for i in range(3):
        qi = PRIMARIES[i]
        phi = math.atan2(qi[1], qi[0])
        u_lo = np.array([math.cos(phi - math.pi / 6), math.sin(phi - math.pi / 6)])
        u_hi = np.array([math.cos(phi + math.pi / 6), math.sin(phi + math.pi / 6)])
        a, b = qi + SQRT3 * u_lo, qi + SQRT3 * u_hi
        regions[f"D{i + 1}"] = Region(
            f"D{i + 1}",
            (LineEdge(tuple(qi), tuple(u_lo)), CircleEdge(tuple(qi), SQRT3, True), LineEdge(tuple(b), tuple(-u_hi))),
            (tuple(qi), tuple(a), tuple(b)),
            _in_sector(i),
        )
    return {name: regions[name] for name in REGION_NAMES}


_REGIONS = _build_regions()


@dataclass(frozen=True)
class Geometry:
    """Primaries, center of masses and the seven tracked regions for one mass triple."""

    masses: MassTriple
    primaries: np.ndarray = field(repr=False)
    center: np.ndarray
    regions: dict = field(repr=False)

    def locate(self, pts: np.ndarray) -> np.ndarray:
        """Name of the tracked region containing each point (``""`` for none)."""
        pts = np.asarray(pts, float)
        out = np.full(pts.shape[:-1], "", dtype=object)
        for name, reg in self.regions.items():
            out[np.asarray(reg.contains(pts), bool)] = name
        return out

    def separator_samples(self, n: int = 2000) -> np.ndarray:
        """Points on the separating set: three extended sides and three circles."""
        pts = []
        t = np.linspace(0.0, 1.0, n)
        for i in range(3):
            a, b = PRIMARIES[i], PRIMARIES[(i + 1) % 3]
            u = (b - a) / SQRT3
            pts.append(a - SQRT3 * u + np.outer(t, 3 * SQRT3 * u))
            th = 2 * math.pi * t
            pts.append(PRIMARIES[i] + SQRT3 * np.stack([np.cos(th), np.sin(th)], axis=-1))
        return np.concatenate(pts)


def geometry(m: MassTriple) -> Geometry:
    return Geometry(m, PRIMARIES.copy(), center_of_mass(m), dict(_REGIONS))


# --- libration points ---------------------------------------------------------


@dataclass(frozen=True)
class LibrationPoint:
    position: np.ndarray
    masses: MassTriple
    betas: SpectralData
    region_tag: str
    brouwer_index: int
    report: EquilibriumReport

    @property
    def vertical_gamma(self) -> int:
        b = self.betas
        return gamma3(b.beta1, b.beta2, b.beta3, self.brouwer_index, vertical_period(b.beta3))

    def to_dict(self) -> dict:
        b = self.betas
        return {
            "position": [float(x) for x in self.position],
            "region": self.region_tag,
            "betas": [b.beta1, b.beta2, b.beta3],
            "brouwer_index": self.brouwer_index,
            "vertical_period": vertical_period(b.beta3),
            "gamma3_vertical": self.vertical_gamma,
            "report": self.report.to_dict(),
        }


def _newton_batch(seeds: np.ndarray, mm: np.ndarray, max_iter: int = 50) -> tuple[np.ndarray, np.ndarray]:
    x = seeds.copy()
    alive = np.ones(len(x), bool)

    def safe_grad_hess(p):
        d = p[:, None, :] - PRIMARIES
        r = np.linalg.norm(d, axis=-1)
        bad = np.any(r < 1e-6, axis=1) | ~np.all(np.isfinite(p), axis=1)
        r = np.where(r < 1e-6, 1.0, r)
        g = np.sum((mm / r**3)[..., None] * d, axis=1) - (p - center_of_mass(mm))
        w3 = (mm / r**3)[..., None, None]
        w5 = (3.0 * mm / r**5)[..., None, None]
        h = np.sum(w3 * np.eye(2) - w5 * d[..., :, None] * d[..., None, :], axis=1) - np.eye(2)
        return g, h, bad

    g, h, bad = safe_grad_hess(x)
    alive &= ~bad
    for _ in range(max_iter):
        det = h[:, 0, 0] * h[:, 1, 1] - h[:, 0, 1] * h[:, 1, 0]
        ok = np.abs(det) > 1e-14
        alive &= ok
        det = np.where(ok, det, 1.0)
        step = np.stack([h[:, 1, 1] * g[:, 0] - h[:, 0, 1] * g[:, 1],
                         -h[:, 1, 0] * g[:, 0] + h[:, 0, 0] * g[:, 1]], axis=-1) / det[:, None]
        gn0 = np.linalg.norm(g, axis=1)
        trial = x - step
        gt, ht, bt = safe_grad_hess(trial)
        worse = np.linalg.norm(gt, axis=1) > gn0
        if worse.any():
            half = x - 0.5 * step
            gh_, hh_, bh_ = safe_grad_hess(half)
            trial[worse], gt[worse], ht[worse], bt[worse] = half[worse], gh_[worse], hh_[worse], bh_[worse]
        x = np.where(alive[:, None], trial, x)
        g = np.where(alive[:, None], gt, g)
        h = np.where(alive[:, None, None], ht, h)
        alive &= ~bt
        alive &= np.linalg.norm(x, axis=1) < 10.0
        if np.all(np.linalg.norm(g[alive], axis=1) < 1e-13):
            break
    gnorm = np.where(alive, np.linalg.norm(g, axis=1), np.inf)
    return x, gnorm


def _polish(p: np.ndarray, m: MassTriple, iters: int = 5) -> np.ndarray:
    for _ in range(iters):
        g, h = grad_hess(p, m)
        if np.linalg.norm(g) < 1e-14:
            break
        p = p - np.linalg.solve(h, g)
    return p


def _dedupe(points: np.ndarray, radius: float) -> list[np.ndarray]:
    kept: list[np.ndarray] = []
    points = np.asarray(points, float).reshape(-1, 2)
    if len(points) == 0:
        return kept
    for p in points[np.lexsort(points.T[::-1])]:
        if all(np.linalg.norm(p - k) > radius for k in kept):
            kept.append(p)
    return kept


def _point_index(p: np.ndarray, h: np.ndarray, m: MassTriple, others: list[np.ndarray], det_tol: float = 1e-8) -> int:
    det = float(np.linalg.det(h))
    if abs(det) >= det_tol:
        return 1 if det > 0 else -1
    dists = [np.linalg.norm(p - o) for o in others if o is not p] + list(np.linalg.norm(PRIMARIES - p, axis=1))
    r = 0.1 * min(dists)
    return brouwer_index(PlanarField(lambda pts: gradient(pts, m), 0.0), p, r)


def find_librations(m: MassTriple, spacing: float = 0.02, dedupe_radius: float = 1e-7,
                    grad_tol: float = 1e-11) -> list[LibrationPoint]:
    """Locate and classify every critical point of ``V`` in the tracked regions.

    Newton iterations are started from a grid of seeds (``spacing`` apart)
    covering the seven regions; converged points are polished, deduplicated
    and assigned to the region containing them.

    Raises
    ------
    RegionLostZeroError
        If some tracked region contains no critical point.
    """
    geo = geometry(m)
    mm = m.as_array()
    xs = np.arange(-2.1, 2.8 + spacing, spacing)
    ys = np.arange(-2.6, 2.6 + spacing, spacing)
    grid = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1).reshape(-1, 2)
    seeds = grid[geo.locate(grid) != ""]
    x, gnorm = _newton_batch(seeds, mm)
    conv = x[gnorm < 1e-9]
    pts = [_polish(p, m) for p in _dedupe(conv, dedupe_radius)]
    pts = [p for p in _dedupe(np.array(pts), dedupe_radius) if np.linalg.norm(gradient(p, m)) < grad_tol]

    tags = geo.locate(np.array(pts)) if pts else np.array([])
    out = []
    for p, tag in zip(pts, tags):
        if tag == "":
            log.warning("critical point %s lies outside the tracked regions", p)
            continue
        h2 = hessian(p, m)
        b1, b2 = np.linalg.eigvalsh(h2)
        b3 = float(hessian(np.array([p[0], p[1], 0.0]), m)[2, 2])
        betas = SpectralData(float(b1), float(b2), b3)
        ib = _point_index(p, h2, m, pts)
        report = emanation_report(betas, ib, location=p)
        out.append(LibrationPoint(p, m, betas, str(tag), ib, report))

    found = {lp.region_tag for lp in out}
    missing = [name for name in REGION_NAMES if name not in found]
    if missing:
        raise RegionLostZeroError(f"region lost a zero: no critical point found in {missing}")
    out.sort(key=lambda lp: (REGION_NAMES.index(lp.region_tag), lp.position[0], lp.position[1]))
    return out


def region_degrees(m: MassTriple, eps: float = 0.05) -> dict[str, int]:
    """Brouwer degree of ``V'`` on each shrunk region, all with the same ``eps``."""
    field_ = PlanarField(lambda pts: gradient(pts, m), 1e-9)
    return {name: winding_degree(field_, shrunk_boundary(reg, eps)) for name, reg in _REGIONS.items()}


def adaptive_region_degrees(m: MassTriple, points, eps: float = 0.05,
                            min_eps: float = 1e-5) -> tuple[dict[str, int], dict[str, float]]:
    """Region degrees with ``eps`` halved per region until the contour encloses every given zero.

    ``points`` are critical points located independently (for instance by
    :func:`find_librations`); a zero lying in the strip between a region's
    boundary and its offset would otherwise be silently dropped.

    Returns
    -------
    degrees, eps_used : dict
        Integer degree and the offset actually used, keyed by region name.
    """
    field_ = PlanarField(lambda pts: gradient(pts, m), 1e-9)
    pts = np.asarray([np.asarray(p, float) for p in points]).reshape(-1, 2)
    degrees, used = {}, {}
    for name, reg in _REGIONS.items():
        mine = pts[np.asarray(reg.contains(pts), bool)] if len(pts) else pts
        e = eps
        while True:
            curve = shrunk_boundary(reg, e)
            if len(mine) == 0 or curve.encloses(mine).all():
                break
            e *= 0.5
            if e < min_eps:
                raise ValueError(f"a zero of V' lies within {min_eps} of the boundary of {name}")
        degrees[name] = winding_degree(field_, curve)
        used[name] = e
    return degrees, used


@dataclass(frozen=True)
class RT4BPAnalysis:
    masses: MassTriple
    points: tuple[LibrationPoint, ...]
    degrees: dict
    eps: float
    eps_used: dict

    def index_sums(self) -> dict[str, int]:
        sums = {name: 0 for name in REGION_NAMES}
        for lp in self.points:
            sums[lp.region_tag] += lp.brouwer_index
        return sums

    def branch_points(self) -> dict[str, list[LibrationPoint]]:
        """Per region, the points with a nonzero vertical bifurcation number."""
        out = {name: [] for name in REGION_NAMES}
        for lp in self.points:
            if lp.vertical_gamma != 0:
                out[lp.region_tag].append(lp)
        return out

    @property
    def seven_branches(self) -> bool:
        return all(self.branch_points().values())

    @property
    def degrees_consistent(self) -> bool:
        return self.index_sums() == self.degrees

    def to_dict(self) -> dict:
        bp = self.branch_points()
        return {
            "masses": [self.masses.m1, self.masses.m2, self.masses.m3],
            "center": [float(x) for x in center_of_mass(self.masses)],
            "eps": self.eps,
            "eps_used": dict(self.eps_used),
            "n_points": len(self.points),
            "degrees": dict(self.degrees),
            "index_sums": self.index_sums(),
            "degrees_consistent": self.degrees_consistent,
            "points": [lp.to_dict() for lp in self.points],
            "points_with_vertical_branch": sum(len(v) for v in bp.values()),
            "regions_with_branch": [name for name in REGION_NAMES if bp[name]],
            "at_least_seven_branches": self.seven_branches,
        }


def analyze(m: MassTriple, eps: float = 0.05, spacing: float = 0.02) -> RT4BPAnalysis:
    """Libration points, region degrees and vertical bifurcation numbers for one mass triple."""
    points = find_librations(m, spacing=spacing)
    degrees, used = adaptive_region_degrees(m, [lp.position for lp in points], eps)
    return RT4BPAnalysis(m, tuple(points), degrees, eps, used)
