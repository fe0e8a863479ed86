"""
Small dense linear-algebra primitives.

Characteristic polynomials, root counting by sign changes (De Gua's
corollary of Descartes' rule), Morse indices of symmetric matrices and the
commuting-block determinant reduction.  Everything here works on matrices
of order at most a dozen, so clarity wins over speed.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

__all__ = [
    "Polynomial",
    "SingularMatrixError",
    "as_symmetric",
    "char_poly",
    "de_gua_positive_count",
    "morse_index",
    "block_det_reduce",
]

SINGULAR_RTOL = 1e-12
ZERO_COEFF_RTOL = 1e-12
COMMUTE_TOL = 1e-10


class SingularMatrixError(ValueError):
    """Raised when a Morse index is requested at a (numerically) singular matrix."""


class Polynomial:
    """Real or complex polynomial with coefficients in descending degree.

    Parameters
    ----------
    coeffs : array_like
        ``[d_k, d_{k-1}, ..., d_0]``.  Leading exact zeros are stripped so the
        leading coefficient is nonzero unless the polynomial is identically
        zero, in which case ``coeffs == [0]``.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs):
        c = np.atleast_1d(np.asarray(coeffs))
        if c.ndim != 1:
            raise ValueError("coefficients must be one-dimensional")
        if not np.issubdtype(c.dtype, np.complexfloating):
            c = c.astype(float)
        nz = np.flatnonzero(c)
        c = c[nz[0]:] if nz.size else c[-1:] * 0
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c.setflags(write=False)
        self._c = c

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int:
        return -1 if self.is_zero() else self._c.size - 1

    def is_zero(self) -> bool:
        return self._c.size == 1 and self._c[0] == 0

    def __call__(self, x):
        return np.polyval(self._c, x)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(np.polymul(self._c, _coeffs_of(other)))

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(np.polyadd(self._c, _coeffs_of(other)))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(np.polysub(self._c, _coeffs_of(other)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._c.shape == other._c.shape and bool(np.all(self._c == other._c))

    def __hash__(self):
        return hash(tuple(self._c.tolist()))

    def __repr__(self) -> str:
        return f"Polynomial({self._c.tolist()!r})"

    def real(self) -> "Polynomial":
        """Drop imaginary parts (for polynomials known to be real)."""
        return Polynomial(np.real(self._c))

    def reflect(self) -> "Polynomial":
        """Return ``p(-x)``; positive roots of the result are negative roots of ``p``."""
        n = self._c.size - 1
        signs = (-1.0) ** (n - np.arange(n + 1))
        return Polynomial(self._c * signs)

    def allclose(self, other: "Polynomial", rtol: float = 1e-8) -> bool:
        return relative_coeff_error(self, other) <= rtol


def _coeffs_of(p) -> np.ndarray:
    return p.coeffs if isinstance(p, Polynomial) else np.asarray(p)


def relative_coeff_error(p, q) -> float:
    """Max-norm coefficient difference relative to the larger coefficient vector."""
    a, b = _coeffs_of(p), _coeffs_of(q)
    n = max(a.size, b.size)
    a = np.concatenate([np.zeros(n - a.size, a.dtype), a])
    b = np.concatenate([np.zeros(n - b.size, b.dtype), b])
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)))
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(a - b)) / scale)


def as_symmetric(m, rtol: float = 1e-12) -> np.ndarray:
    """Validate and return an exactly symmetric float copy of ``m``."""
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    scale = max(np.max(np.abs(a)), 1.0) if a.size else 1.0
    if np.max(np.abs(a - a.T), initial=0.0) > rtol * scale:
        raise ValueError("matrix is not symmetric")
    return 0.5 * (a + a.T)


def char_poly(m) -> Polynomial:
    """Characteristic polynomial ``det(M - lambda I)``.

    The matrix is reduced to upper Hessenberg form by Householder
    reflections; the determinant of ``H - lambda I`` is then expanded with
    the division-free recurrence over leading principal minors.  Works for
    any real or complex square matrix; the result has leading coefficient
    ``(-1)^n``.
    """
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n == 0:
        return Polynomial([1.0])
    cplx = np.iscomplexobj(a)
    h = scipy.linalg.hessenberg(a.astype(complex if cplx else float))
    dtype = h.dtype

    # p[k] holds det(x I - H[:k,:k]) in ascending powers of x
    p = [np.array([1.0], dtype=dtype)]
    for k in range(1, n + 1):
        acc = np.zeros(k + 1, dtype=dtype)
        acc[1:] += p[k - 1]
        acc[:k] -= h[k - 1, k - 1] * p[k - 1]
        prod = 1.0
        for i in range(k - 1, 0, -1):
            prod = prod * h[i, i - 1]
            acc[:i] -= h[i - 1, k - 1] * prod * p[i - 1]
        p.append(acc)
    coeffs = p[n][::-1] * (-1) ** n
    if not cplx:
        coeffs = coeffs.real
    return Polynomial(coeffs)


def de_gua_positive_count(p, rtol: float = ZERO_COEFF_RTOL) -> int:
    """Total multiplicity of the positive roots of a real-rooted polynomial.

    Counts sign changes in the coefficient list after deleting the
    coefficients whose magnitude is at most ``rtol`` times the largest one.
    Only meaningful when every root is real; that is the caller's
    responsibility.
    """
    c = np.real(_coeffs_of(p)).astype(float)
    scale = np.max(np.abs(c), initial=0.0)
    if scale == 0:
        raise ValueError("undefined root count for the zero polynomial")
    kept = c[np.abs(c) > rtol * scale]
    signs = np.sign(kept)
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def morse_index(m) -> int:
    """Number of negative eigenvalues of a nonsingular symmetric matrix.

    Computed as the positive-root count of ``det(M + lambda I)`` (the
    characteristic polynomial reflected about zero).  The matrix is first
    scaled by its Frobenius norm, which leaves the index unchanged and keeps
    the coefficients balanced.

    Raises
    ------
    SingularMatrixError
        If ``|det M| <= 1e-12 * max|M_ij|**n`` or if the constant coefficient
        would be discarded as zero by the sign-change count.
    """
    a = as_symmetric(m)
    n = a.shape[0]
    if n == 0:
        return 0
    norm = np.linalg.norm(a)
    if norm == 0:
        raise SingularMatrixError("singular matrix: Morse index undefined at crossing")
    a = a / norm
    p = char_poly(a)
    c = p.coeffs
    det = c[-1]
    if abs(det) <= SINGULAR_RTOL * np.max(np.abs(a)) ** n or abs(det) <= ZERO_COEFF_RTOL * np.max(np.abs(c)):
        raise SingularMatrixError("singular matrix: Morse index undefined at crossing")
    return de_gua_positive_count(p.reflect())


def block_det_reduce(b1, b2, b3, b4, tol: float = COMMUTE_TOL) -> complex:
    """``det([[B1, B2], [B3, B4]])`` as ``det(B4 B1 - B3 B2)`` for commuting ``B1, B2``.

    Raises
    ------
    ValueError
        If the blocks differ in shape or ``||B1 B2 - B2 B1||`` exceeds
        ``tol * max(1, ||B1|| ||B2||)``.
    """
    b1, b2, b3, b4 = (np.atleast_2d(np.asarray(b)) for b in (b1, b2, b3, b4))
    shape = b1.shape
    if shape[0] != shape[1] or any(b.shape != shape for b in (b2, b3, b4)):
        raise ValueError("blocks must be square and of equal order")
    comm = np.linalg.norm(b1 @ b2 - b2 @ b1)
    if comm > tol * max(1.0, np.linalg.norm(b1) * np.linalg.norm(b2)):
        raise ValueError(f"blocks do not commute (commutator norm {comm:.3g})")
    return complex(np.linalg.det(b4 @ b1 - b3 @ b2))
