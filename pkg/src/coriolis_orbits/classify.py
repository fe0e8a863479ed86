"""
Region classification in the plane of Hessian eigenvalues and the
bifurcation-number tables.

The plane of eigenvalue pairs ``(b1, b2)`` is split into the hyperbolic
region ``R0``, the four open regions ``R1..R4`` and the degenerate pieces
living on the coordinate axes ``C`` or on the boundary of ``R0``.  From that
label, the two characteristic periods ``T-`` and ``T+`` and (in the spatial
case) the vertical period ``2 pi / sqrt(b3)`` determine which trivial orbits
carry a nonzero bifurcation number and hence an emanating branch.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

__all__ = [
    "Region",
    "MissingBrouwerIndexError",
    "SpectralData",
    "EquilibriumReport",
    "region",
    "T_periods",
    "vertical_period",
    "crossing_periods",
    "imaginary_spectrum",
    "brouwer_index_from_betas",
    "gamma2",
    "gamma3",
    "emanation_report",
]

BOUNDARY_TOL = 1e-12
PERIOD_RTOL = 1e-9


class Region(str, enum.Enum):
    R0 = "R0"
    R1 = "R1"
    R2 = "R2"
    R3 = "R3"
    R4 = "R4"
    C_OFF_BOUNDARY = "C_off_boundary"
    BOUNDARY_OFF_C = "boundary_off_C"
    C_ON_BOUNDARY = "C_on_boundary"

    def on_axes(self) -> bool:
        return self in (Region.C_OFF_BOUNDARY, Region.C_ON_BOUNDARY)

    def in_closure_R0(self) -> bool:
        return self in (Region.R0, Region.BOUNDARY_OFF_C, Region.C_ON_BOUNDARY)


class MissingBrouwerIndexError(ValueError):
    """The eigenvalue pair lies on the axes and no Brouwer index was supplied."""


@dataclass(frozen=True)
class SpectralData:
    """Eigenvalues of the (restricted) Hessian at an equilibrium.

    ``beta3`` is the vertical second derivative in the spatial case and
    ``None`` for planar problems.
    """

    beta1: float
    beta2: float
    beta3: Optional[float] = None

    def __post_init__(self):
        if self.beta3 is not None and not self.beta3 > 0:
            raise ValueError(f"beta3 must be positive, got {self.beta3}")

    @property
    def spatial(self) -> bool:
        return self.beta3 is not None


def _r0_bound(b1: float, b2: float) -> float:
    return max(-4.0, -2.0 - (b1 - b2) ** 2 / 8.0)


def region(b1: float, b2: float, tol: float = BOUNDARY_TOL) -> Region:
    """Label of ``(b1, b2)``; symmetric in its arguments."""
    b1, b2 = float(b1), float(b2)
    s, bound = b1 + b2, _r0_bound(b1, b2)
    on_c = abs(b1) <= tol or abs(b2) <= tol
    in_closure = b1 <= tol and b2 <= tol and s <= bound + tol
    if on_c:
        return Region.C_ON_BOUNDARY if in_closure else Region.C_OFF_BOUNDARY
    if in_closure:
        if b1 < -tol and b2 < -tol and s < bound - tol:
            return Region.R0
        return Region.BOUNDARY_OFF_C
    if b1 > 0 and b2 > 0:
        return Region.R1
    if b1 < 0 and b2 > 0:
        return Region.R2
    if b1 > 0 and b2 < 0:
        return Region.R4
    return Region.R3


def T_periods(b1: float, b2: float, tol: float = BOUNDARY_TOL) -> tuple[Optional[float], Optional[float]]:
    """The short and long Lyapunov periods ``(T-, T+)`` where they exist.

    ``T-`` lives on the complement of the closure of ``R0`` plus the part of
    its boundary off the axes; ``T+`` on ``R1``, ``R3`` and that same
    boundary piece.  Missing values are ``None``.
    """
    lab = region(b1, b2, tol)
    s = b1 + b2
    disc = s + 2.0 + (b1 - b2) ** 2 / 8.0
    if lab is Region.BOUNDARY_OFF_C:
        disc = 0.0
    root = 2.0 * math.sqrt(2.0) * math.sqrt(max(disc, 0.0))
    t_minus = t_plus = None
    if lab not in (Region.R0, Region.C_ON_BOUNDARY):
        t_minus = 2.0 * math.pi * math.sqrt(2.0) / math.sqrt(s + 4.0 + root)
    if lab in (Region.R1, Region.R3, Region.BOUNDARY_OFF_C):
        # s + 4 - root rewritten as 4 b1 b2 / (s + 4 + root) to avoid cancellation
        den = 4.0 * b1 * b2 / (s + 4.0 + root) if root > 0 else s + 4.0
        t_plus = 2.0 * math.pi * math.sqrt(2.0) / math.sqrt(den)
    return t_minus, t_plus


def vertical_period(b3: float) -> float:
    if not b3 > 0:
        raise ValueError(f"beta3 must be positive, got {b3}")
    return 2.0 * math.pi / math.sqrt(b3)


def crossing_periods(b1: float, b2: float, b3: Optional[float] = None) -> list[float]:
    """Sorted distinct periods at which the Morse index of ``S_T`` may jump."""
    out = [t for t in T_periods(b1, b2) if t is not None]
    if b3 is not None:
        out.append(vertical_period(b3))
    out.sort()
    dedup: list[float] = []
    for t in out:
        if not dedup or not _same_period(t, dedup[-1]):
            dedup.append(t)
    return dedup


def _same_period(a: Optional[float], b: Optional[float], rtol: float = PERIOD_RTOL) -> bool:
    if a is None or b is None:
        return False
    return abs(a - b) <= rtol * max(abs(a), abs(b))


def imaginary_spectrum(b1: float, b2: float, b3: Optional[float] = None) -> list[tuple[complex, int]]:
    """Purely imaginary characteristic exponents with algebraic multiplicities.

    Returned as ``(value, multiplicity)`` pairs sorted by imaginary part.
    """
    lab = region(b1, b2)
    t_minus, t_plus = T_periods(b1, b2)
    mult: dict[float, int] = {}

    def add(omega: float, k: int):
        for key in mult:
            if abs(key - omega) <= PERIOD_RTOL * max(1.0, abs(omega)):
                mult[key] += k
                return
        mult[omega] = k

    if lab is Region.BOUNDARY_OFF_C:
        w = 2.0 * math.pi / t_minus
        add(w, 2), add(-w, 2)
    else:
        for t in (t_minus, t_plus):
            if t is not None:
                w = 2.0 * math.pi / t
                add(w, 1), add(-w, 1)
    if lab.on_axes():
        # p2 = x^2 (x^2 + b1 + b2 + 4); zero is a quadruple root when the bracket vanishes too
        k0 = 4 if abs(b1 + b2 + 4.0) <= BOUNDARY_TOL else 2
        add(0.0, k0)
    if b3 is not None:
        w = 2.0 * math.pi / vertical_period(b3)
        add(w, 1), add(-w, 1)
    return sorted(((complex(0.0, w), k) for w, k in mult.items()), key=lambda e: e[0].imag)


def brouwer_index_from_betas(b1: float, b2: float) -> int:
    """``sign(b1 b2)``, valid only off the axes."""
    if region(b1, b2).on_axes():
        raise MissingBrouwerIndexError("Brouwer index is not determined by the eigenvalues on C")
    return 1 if b1 * b2 > 0 else -1


def _resolve_index(b1: float, b2: float, ib: Optional[int]) -> int:
    lab = region(b1, b2)
    if lab.on_axes():
        if ib is None:
            raise MissingBrouwerIndexError(
                f"(beta1, beta2) = ({b1}, {b2}) lies on C; a Brouwer index must be supplied"
            )
        return int(ib)
    expected = brouwer_index_from_betas(b1, b2)
    if ib is not None and int(ib) != expected:
        raise ValueError(f"index contradicts the nondegenerate value sign(beta1*beta2) = {expected}, got {ib}")
    return expected


def gamma2(b1: float, b2: float, ib: Optional[int], T: float, rtol: float = PERIOD_RTOL) -> int:
    """Planar bifurcation number of the trivial orbit ``(T, q0)``."""
    if not T > 0:
        raise ValueError("period must be positive")
    lab = region(b1, b2)
    ib = _resolve_index(b1, b2, ib)
    t_minus, t_plus = T_periods(b1, b2)
    at_minus = _same_period(T, t_minus, rtol)
    at_plus = _same_period(T, t_plus, rtol)
    if at_minus:
        if lab in (Region.R2, Region.R4):
            return -1
        if lab in (Region.R1, Region.R3):
            return 1
        if lab is Region.C_OFF_BOUNDARY:
            return ib
    if at_plus:
        if lab is Region.R1:
            return 1
        if lab is Region.R3:
            return -1
    return 0


def gamma3(b1: float, b2: float, b3: float, ib: Optional[int], T: float, rtol: float = PERIOD_RTOL) -> int:
    """Spatial bifurcation number; ``b3`` is the vertical second derivative."""
    lab = region(b1, b2)
    ib = _resolve_index(b1, b2, ib)
    g = gamma2(b1, b2, ib, T, rtol)
    if not _same_period(T, vertical_period(b3), rtol):
        return g
    if lab in (Region.R2, Region.R4):
        return g - 1
    if lab.on_axes():
        return g + ib
    return g + 1


@dataclass(frozen=True)
class EquilibriumReport:
    """Everything the tables predict for one equilibrium.

    ``gammas`` lists ``(period, gamma)`` for every period with a nonzero
    bifurcation number, sorted by period; each such period carries an
    emanating branch.  ``flags`` collects qualitative remarks:
    ``"no_planar_orbits"`` (hyperbolic planar part), ``"nonplanar"`` (the
    vertical branch cannot be planar), ``"inconclusive"`` (a candidate period
    with zero bifurcation number) and ``"conjectural"`` (degenerate boundary
    case where only a conjecture is available).
    """

    betas: SpectralData
    region: Region
    brouwer_index: Optional[int]
    T_minus: Optional[float]
    T_plus: Optional[float]
    vertical_period: Optional[float]
    gammas: tuple[tuple[float, int], ...]
    flags: tuple[str, ...] = ()
    location: Optional[tuple[float, ...]] = None

    @property
    def predicted_branches(self) -> int:
        return len(self.gammas)

    def gamma_at(self, T: float) -> int:
        for t, g in self.gammas:
            if _same_period(t, T):
                return g
        return 0

    def to_dict(self) -> dict:
        return {
            "location": None if self.location is None else list(self.location),
            "betas": [self.betas.beta1, self.betas.beta2] + ([self.betas.beta3] if self.betas.spatial else []),
            "region": self.region.value,
            "brouwer_index": self.brouwer_index,
            "T_minus": self.T_minus,
            "T_plus": self.T_plus,
            "vertical_period": self.vertical_period,
            "imaginary_spectrum": [
                {"imag": v.imag, "multiplicity": k}
                for v, k in imaginary_spectrum(self.betas.beta1, self.betas.beta2, self.betas.beta3)
            ],
            "gammas": [{"period": t, "gamma": g} for t, g in self.gammas],
            "predicted_branches": self.predicted_branches,
            "flags": list(self.flags),
        }


def emanation_report(betas: SpectralData, ib: Optional[int] = None,
                     location: Optional[Sequence[float]] = None) -> EquilibriumReport:
    """Collect all periods with a nonzero bifurcation number at one equilibrium.

    Off the axes ``ib`` may be omitted (it equals ``sign(b1 b2)``); on the
    axes it is mandatory and :class:`MissingBrouwerIndexError` is raised
    without it.
    """
    b1, b2, b3 = betas.beta1, betas.beta2, betas.beta3
    lab = region(b1, b2)
    ib = _resolve_index(b1, b2, ib)
    t_minus, t_plus = T_periods(b1, b2)
    tv = vertical_period(b3) if b3 is not None else None

    gammas = []
    for t in crossing_periods(b1, b2, b3):
        g = gamma3(b1, b2, b3, ib, t) if b3 is not None else gamma2(b1, b2, ib, t)
        if g != 0:
            gammas.append((t, g))

    flags = []
    if lab is Region.R0:
        flags.append("no_planar_orbits")
        if b3 is not None:
            flags.append("nonplanar")
    if lab is Region.BOUNDARY_OFF_C:
        flags.append("inconclusive")
    if lab is Region.C_ON_BOUNDARY and not _is_corner(b1, b2):
        flags.append("conjectural")
    if lab.on_axes() and ib == 0:
        flags.append("inconclusive")

    return EquilibriumReport(
        betas=betas,
        region=lab,
        brouwer_index=ib,
        T_minus=t_minus,
        T_plus=t_plus,
        vertical_period=tv,
        gammas=tuple(gammas),
        flags=tuple(dict.fromkeys(flags)),
        location=None if location is None else tuple(float(x) for x in location),
    )


def _is_corner(b1: float, b2: float) -> bool:
    return any(abs(b1 - a) <= BOUNDARY_TOL and abs(b2 - b) <= BOUNDARY_TOL for a, b in ((0.0, -4.0), (-4.0, 0.0)))
