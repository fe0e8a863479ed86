"""
Structured matrices of the linearized rotating-frame system.

For an equilibrium ``q0`` with Hessian ``V''(q0)`` the Hamiltonian Hessian is

    A = [[I, alpha], [-alpha, W''(q0)]],   W'' = V'' - alpha^2,

and for each period ``T > 0`` the symmetric matrix

    S_T = [[-(T/2pi) A, -J], [J, -(T/2pi) A]]

controls the bifurcation numbers through its Morse index.  This module
builds these matrices, their characteristic polynomials in closed form, and
the closed-form Morse-index tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .classify import PERIOD_RTOL, Region, T_periods, region, vertical_period
from .linalg import Polynomial, as_symmetric, char_poly

__all__ = [
    "IndexJumpError",
    "HessianData",
    "STMatrix",
    "alpha",
    "symplectic",
    "build_A",
    "build_ST",
    "pT_coeffs",
    "p2_coeffs",
    "p3_coeffs",
    "quartic_d_coeffs",
    "vertical_quadratic",
    "morse_ST_planar",
    "morse_ST_spatial",
]

TWO_PI = 2.0 * math.pi


class IndexJumpError(ValueError):
    """The requested period is one where the Morse index of ``S_T`` jumps."""


def alpha(N: int) -> np.ndarray:
    """Generator of the rotation in the xy-plane, bordered by zeros when ``N == 3``."""
    if N not in (2, 3):
        raise ValueError(f"N must be 2 or 3, got {N}")
    a = np.zeros((N, N))
    a[0, 1], a[1, 0] = -1.0, 1.0
    return a


def symplectic(N: int) -> np.ndarray:
    """``J_N = [[0, -I], [I, 0]]``."""
    z, i = np.zeros((N, N)), np.eye(N)
    return np.block([[z, -i], [i, z]])


@dataclass(frozen=True)
class HessianData:
    """Hessian ``V''(q0)`` of the potential at an equilibrium (N = 2 or 3).

    In the spatial case the mixed ``xz`` and ``yz`` entries must vanish and
    the vertical entry must be positive.
    """

    vpp: np.ndarray

    def __post_init__(self):
        v = as_symmetric(self.vpp)
        if v.shape not in ((2, 2), (3, 3)):
            raise ValueError(f"Hessian must be 2x2 or 3x3, got {v.shape}")
        if v.shape == (3, 3):
            scale = max(np.linalg.norm(v), 1.0)
            if max(abs(v[0, 2]), abs(v[1, 2])) >= 1e-10 * scale:
                raise ValueError("mixed z-derivatives must vanish on the plane")
            if not v[2, 2] > 0:
                raise ValueError("vertical second derivative must be positive")
        v.setflags(write=False)
        object.__setattr__(self, "vpp", v)

    @classmethod
    def from_betas(cls, b1: float, b2: float, b3: Optional[float] = None) -> "HessianData":
        return cls(np.diag([b1, b2] if b3 is None else [b1, b2, b3]).astype(float))

    @property
    def dim(self) -> int:
        return self.vpp.shape[0]

    @property
    def planar_betas(self) -> tuple[float, float]:
        b1, b2 = np.linalg.eigvalsh(self.vpp[:2, :2])
        return float(b1), float(b2)

    @property
    def beta3(self) -> Optional[float]:
        return float(self.vpp[2, 2]) if self.dim == 3 else None

    @property
    def wpp(self) -> np.ndarray:
        a = alpha(self.dim)
        return self.vpp - a @ a


@dataclass(frozen=True)
class STMatrix:
    T: float
    S: np.ndarray


def build_A(h: HessianData) -> np.ndarray:
    """Hessian of the Hamiltonian at the equilibrium, order ``2N``."""
    N = h.dim
    a = alpha(N)
    return np.block([[np.eye(N), a], [-a, h.wpp]])


def build_ST(h: HessianData, T: float) -> STMatrix:
    if not T > 0:
        raise ValueError(f"period must be positive, got {T}")
    A = build_A(h)
    J = symplectic(h.dim)
    k = T / TWO_PI
    S = np.block([[-k * A, -J], [J, -k * A]])
    return STMatrix(float(T), S)


def pT_coeffs(h: HessianData, T: float) -> Polynomial:
    """``p_T(lambda) = det(-(T/2pi) A + i J - lambda I)``, whose square is ``det(S_T - lambda I)``."""
    A = build_A(h)
    M = -(T / TWO_PI) * A + 1j * symplectic(h.dim)
    return char_poly(M).real()


def p2_coeffs(b1: float, b2: float) -> Polynomial:
    """Characteristic polynomial of ``J_2 A`` in terms of the planar eigenvalues."""
    return Polynomial([1.0, 0.0, b1 + b2 + 4.0, 0.0, b1 * b2])


def p3_coeffs(b1: float, b2: float, b3: float) -> Polynomial:
    if not b3 > 0:
        raise ValueError(f"beta3 must be positive, got {b3}")
    return Polynomial([1.0, 0.0, b3]) * p2_coeffs(b1, b2)


def quartic_d_coeffs(b1: float, b2: float, T: float) -> Polynomial:
    """The quartic whose square is ``det(S_T - lambda I_8)`` in the planar case."""
    if not T > 0:
        raise ValueError(f"period must be positive, got {T}")
    c0, c1 = b1 * b2, b1 + b2 + 4.0
    k = T / TWO_PI
    d4 = 1.0
    d3 = c1 * k
    d2 = (c0 + 3.0 * c1 - 8.0) * k**2 - 2.0
    d1 = 2.0 * (c0 + c1 - 4.0) * k**3 - c1 * k
    d0 = c0 * k**4 - c1 * k**2 + 1.0
    return Polynomial([d4, d3, d2, d1, d0])


def vertical_quadratic(b3: float, T: float) -> Polynomial:
    """Extra factor of the spatial ``p_T``: ``lambda^2 + (b3+1) k lambda + b3 k^2 - 1``, ``k = T/2pi``."""
    k = T / TWO_PI
    return Polynomial([1.0, (b3 + 1.0) * k, b3 * k**2 - 1.0])


def _check_crossing(T: float, crossings) -> None:
    for tc in crossings:
        if tc is not None and abs(T - tc) <= PERIOD_RTOL * tc:
            raise IndexJumpError(f"index jump point: T = {T} coincides with crossing period {tc}")


def morse_ST_planar(b1: float, b2: float, T: float) -> int:
    """Morse index of the 8x8 ``S_T`` from the closed-form table."""
    if not T > 0:
        raise ValueError(f"period must be positive, got {T}")
    lab = region(b1, b2)
    t_minus, t_plus = T_periods(b1, b2)
    if lab in (Region.R0, Region.C_ON_BOUNDARY):
        return 4
    _check_crossing(T, (t_minus, t_plus))
    if lab is Region.BOUNDARY_OFF_C:
        return 4
    if T < t_minus:
        return 4
    if lab in (Region.R2, Region.R4, Region.C_OFF_BOUNDARY):
        return 6
    if T < t_plus:
        return 6
    return 8 if lab is Region.R1 else 4


def morse_ST_spatial(b1: float, b2: float, b3: float, T: float) -> int:
    """Morse index of the 12x12 ``S_T``; ``(b1, b2)`` are the planar eigenvalues."""
    tv = vertical_period(b3)
    _check_crossing(T, (tv,))
    planar = morse_ST_planar(b1, b2, T)
    return planar + (2 if T < tv else 4)
