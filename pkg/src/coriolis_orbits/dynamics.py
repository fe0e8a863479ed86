"""
Hamiltonian flow, periodic-orbit shooting and branch continuation.

With ``p = qdot - alpha q`` the Newtonian system ``qddot - 2 alpha qdot + V'(q) = 0``
becomes ``udot = J H'(u)`` for ``u = (p, q)`` and

    H(p, q) = |p|^2 / 2 + <p, alpha q> + W(q),   W(q) = V(q) + (x^2 + y^2) / 2.

Orbits are integrated with an adaptive eighth-order Runge-Kutta scheme
(scipy's DOP853) together with the variational equations when a monodromy
matrix is needed.  Periodic orbits are found by Gauss-Newton shooting with a
Poincare phase condition, and families are followed by pseudo-arclength
continuation in ``(u, T)``.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .spectrum import alpha

__all__ = [
    "DomainExitError",
    "BlowupError",
    "IntegrationError",
    "NoOrbitFound",
    "HamiltonianSystem",
    "FlowResult",
    "ClosedOrbit",
    "Bounds",
    "Branch",
    "BranchStatus",
    "to_hamiltonian",
    "from_hamiltonian",
    "phi_map",
    "phi_inverse",
    "flow",
    "shoot_periodic",
    "shoot_many",
    "linear_mode",
    "continue_branch",
    "branch_status",
    "radial_second_derivative",
    "default_workers",
]

log = logging.getLogger(__name__)

RTOL = 1e-11
ATOL = 1e-13
VERIFY_RTOL = 1e-13
BLOWUP_NORM = 1e6
THREADS_ENV = "CORIOLIS_ORBITS_THREADS"


class DomainExitError(RuntimeError):
    """The trajectory left the configuration domain (came too close to a singularity)."""

    def __init__(self, message: str, time: float, state: np.ndarray):
        super().__init__(message)
        self.time = float(time)
        self.state = np.asarray(state)


class BlowupError(RuntimeError):
    """The state norm exceeded the blow-up threshold (finite-time escape)."""

    def __init__(self, message: str, time: float):
        super().__init__(message)
        self.time = float(time)


class IntegrationError(RuntimeError):
    """The integrator failed, typically through step-size underflow."""


class NoOrbitFound(RuntimeError):
    """Shooting did not converge to a nontrivial closed orbit."""


def default_workers() -> int:
    try:
        n = int(os.environ.get(THREADS_ENV, "1"))
    except ValueError:
        n = 1
    return max(1, n)


# --- systems -------------------------------------------------------------------


@dataclass(frozen=True)
class HamiltonianSystem:
    """A rotating-frame Newtonian system ``qddot - 2 alpha qdot + V'(q) = 0`` in Hamiltonian form.

    Parameters
    ----------
    dim : int
        Configuration dimension ``N`` (2 or 3).
    V, grad, hess : callable
        Potential and its derivatives, vectorized over leading axes.
    singularities : ndarray, shape (k, N)
        Points excluded from the domain ``Omega`` (empty for ``Omega = R^N``).
    min_distance : float
        Trajectories closer than this to a singularity are treated as leaving ``Omega``.
    equilibria : tuple of ndarray
        Known critical points of ``V``, used to classify compact branches.
    """

    dim: int
    V: Callable = field(repr=False)
    grad: Callable = field(repr=False)
    hess: Callable = field(repr=False)
    singularities: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)), repr=False)
    min_distance: float = 1e-3
    equilibria: tuple = field(default=(), repr=False)
    name: str = "system"

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        sing = np.asarray(self.singularities, float).reshape(-1, self.dim)
        object.__setattr__(self, "singularities", sing)
        object.__setattr__(self, "equilibria", tuple(np.asarray(e, float) for e in self.equilibria))
        a = alpha(self.dim)
        object.__setattr__(self, "_alpha", a)

    # factories -------------------------------------------------------------

    @classmethod
    def quadratic(cls, vpp) -> "HamiltonianSystem":
        """``V(q) = <q, V'' q> / 2`` for a symmetric matrix (or a vector of diagonal entries)."""
        m = np.asarray(vpp, float)
        if m.ndim == 1:
            m = np.diag(m)
        m = 0.5 * (m + m.T)
        n = m.shape[0]
        return cls(
            n,
            lambda q: 0.5 * np.einsum("...i,ij,...j->...", q, m, q),
            lambda q: np.asarray(q) @ m,
            lambda q: np.broadcast_to(m, np.shape(q)[:-1] + (n, n)).copy(),
            equilibria=(np.zeros(n),),
            name="quadratic",
        )

    @classmethod
    def pathological(cls) -> "HamiltonianSystem":
        """``V = -r^2/2 - r^4/4`` in the plane: the origin is the only closed orbit."""

        def V(q):
            r2 = np.sum(np.asarray(q) ** 2, axis=-1)
            return -0.5 * r2 - 0.25 * r2**2

        def grad(q):
            q = np.asarray(q)
            r2 = np.sum(q**2, axis=-1)[..., None]
            return -q - r2 * q

        def hess(q):
            q = np.asarray(q)
            r2 = np.sum(q**2, axis=-1)[..., None, None]
            eye = np.eye(2)
            return -eye - r2 * eye - 2.0 * q[..., :, None] * q[..., None, :]

        return cls(2, V, grad, hess, equilibria=(np.zeros(2),), name="pathological")

    @classmethod
    def rt4bp(cls, masses, dim: int = 3, equilibria: Optional[Sequence] = None,
              min_distance: float = 1e-3) -> "HamiltonianSystem":
        """The restricted triangular four-body problem in the plane or in space."""
        from . import rt4bp as _rt

        if equilibria is None:
            equilibria = [lp.position for lp in _rt.find_librations(masses)]
        eq = [np.concatenate([np.asarray(e, float)[:2], np.zeros(dim - 2)]) for e in equilibria]
        sing = np.zeros((3, dim))
        sing[:, :2] = _rt.PRIMARIES
        return cls(
            dim,
            lambda q: _rt.potential(q, masses),
            lambda q: _rt.gradient(q, masses),
            lambda q: _rt.hessian(q, masses),
            singularities=sing,
            min_distance=min_distance,
            equilibria=tuple(eq),
            name="rt4bp",
        )

    # Hamiltonian structure ---------------------------------------------------

    @property
    def alpha(self) -> np.ndarray:
        return self._alpha

    def split(self, u):
        u = np.asarray(u, float)
        return u[..., : self.dim], u[..., self.dim:]

    def W_grad(self, q):
        q = np.asarray(q, float)
        g = np.array(self.grad(q), dtype=float)
        g[..., :2] += q[..., :2]
        return g

    def W_hess(self, q):
        h = np.array(self.hess(q), dtype=float)
        h[..., 0, 0] += 1.0
        h[..., 1, 1] += 1.0
        return h

    def energy(self, u) -> np.ndarray:
        p, q = self.split(u)
        q = np.asarray(q)
        ap = np.einsum("ij,...j->...i", self._alpha, q)
        return (0.5 * np.sum(p * p, axis=-1) + np.sum(p * ap, axis=-1)
                + self.V(q) + 0.5 * np.sum(q[..., :2] ** 2, axis=-1))

    def energy_grad(self, u) -> np.ndarray:
        p, q = self.split(u)
        a = self._alpha
        return np.concatenate([p + q @ a.T, -(p @ a.T) + self.W_grad(q)], axis=-1)

    def vector_field(self, u) -> np.ndarray:
        """``J H'(u)`` with ``J = [[0, -I], [I, 0]]``."""
        p, q = self.split(u)
        a = self._alpha
        pdot = p @ a.T - self.W_grad(q)
        qdot = p + q @ a.T
        return np.concatenate([pdot, qdot], axis=-1)

    def jacobian(self, u) -> np.ndarray:
        _, q = self.split(u)
        n = self.dim
        a = self._alpha
        return np.block([[a, -self.W_hess(q)], [np.eye(n), a]])

    def equilibrium_state(self, q0) -> np.ndarray:
        q0 = np.asarray(q0, float)
        return np.concatenate([-(self._alpha @ q0), q0])

    def distance_to_singularities(self, q) -> np.ndarray:
        q = np.asarray(q, float)
        if len(self.singularities) == 0:
            return np.full(q.shape[:-1], np.inf)
        return np.min(np.linalg.norm(q[..., None, :] - self.singularities, axis=-1), axis=-1)


def to_hamiltonian(q, qdot, N: Optional[int] = None) -> np.ndarray:
    """``(q, qdot) -> u = (p, q)`` with ``p = qdot - alpha q``."""
    q, qdot = np.asarray(q, float), np.asarray(qdot, float)
    a = alpha(N or q.shape[-1])
    return np.concatenate([qdot - q @ a.T, q], axis=-1)


def from_hamiltonian(u, N: Optional[int] = None) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`to_hamiltonian`: ``u -> (q, qdot)``."""
    u = np.asarray(u, float)
    n = N or u.shape[-1] // 2
    p, q = u[..., :n], u[..., n:]
    return q, p + q @ alpha(n).T


def phi_map(T: float, loop: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    """Lift a closed orbit ``(T, qbar)`` to ``(T; qbar, pbar)``.

    ``loop`` holds ``M`` samples of ``qbar`` on the uniform grid
    ``theta_j = 2 pi j / M``; the derivative is spectral.
    """
    loop = np.asarray(loop, float)
    M, n = loop.shape
    k = np.fft.fftfreq(M, d=1.0 / M)
    if M % 2 == 0:
        k[M // 2] = 0.0
    dq = np.real(np.fft.ifft(1j * k[:, None] * np.fft.fft(loop, axis=0), axis=0))
    pbar = (2 * math.pi / T) * dq - loop @ alpha(n).T
    return T, loop.copy(), pbar


def phi_inverse(T: float, qbar: np.ndarray, pbar: np.ndarray) -> tuple[float, np.ndarray]:
    return T, np.asarray(qbar, float).copy()


def radial_second_derivative(sys: HamiltonianSystem, u) -> np.ndarray:
    """``d^2/dt^2 (|q|^2 / 2) = |qdot|^2 + <q, qddot>`` along the flow."""
    u = np.asarray(u, float)
    f = sys.vector_field(u)
    _, q = sys.split(u)
    _, qdot = sys.split(f)
    qddot = 2.0 * qdot @ sys.alpha.T - sys.grad(q)
    return np.sum(qdot * qdot, axis=-1) + np.sum(q * qddot, axis=-1)


# --- flow ------------------------------------------------------------------


@dataclass(frozen=True)
class FlowResult:
    t: np.ndarray
    y: np.ndarray  # shape (len(t), 2N)
    u_final: np.ndarray
    energy_drift: float
    monodromy: Optional[np.ndarray] = None


def _events(sys: HamiltonianSystem):
    n = sys.dim
    evs = []
    if len(sys.singularities):
        def near(t, y):
            return float(sys.distance_to_singularities(y[n:2 * n])) - sys.min_distance

        near.terminal = True
        near.direction = -1
        evs.append(near)

    def blowup(t, y):
        return BLOWUP_NORM - float(np.linalg.norm(y[: 2 * n]))

    blowup.terminal = True
    blowup.direction = -1
    evs.append(blowup)
    return evs


def flow(sys: HamiltonianSystem, u0, T: float, *, n_samples: Optional[int] = None,
         with_stm: bool = False, rtol: float = RTOL, atol: float = ATOL) -> FlowResult:
    """Integrate ``udot = J H'(u)`` from ``u0`` over ``[0, T]``.

    Parameters
    ----------
    n_samples : int, optional
        Return the trajectory on ``n_samples`` uniformly spaced times
        including both endpoints; otherwise at the integrator's own steps.
    with_stm : bool
        Also integrate the variational equations and return the state
        transition matrix at ``T``.

    Raises
    ------
    DomainExitError
        If the trajectory comes within ``sys.min_distance`` of a singularity.
    BlowupError
        If the state norm exceeds ``1e6``.
    IntegrationError
        If the integrator fails (step underflow).
    """
    u0 = np.asarray(u0, float)
    n2 = 2 * sys.dim
    if u0.shape != (n2,):
        raise ValueError(f"state must have length {n2}")
    if T < 0:
        raise ValueError("duration must be nonnegative")
    if T == 0:
        return FlowResult(np.zeros(1), u0[None, :].copy(), u0.copy(), 0.0, np.eye(n2) if with_stm else None)
    if len(sys.singularities) and sys.distance_to_singularities(u0[sys.dim:]) <= sys.min_distance:
        raise DomainExitError("initial state outside the domain", 0.0, u0)

    if with_stm:
        def rhs(t, y):
            u = y[:n2]
            phi = y[n2:].reshape(n2, n2)
            return np.concatenate([sys.vector_field(u), (sys.jacobian(u) @ phi).ravel()])

        y0 = np.concatenate([u0, np.eye(n2).ravel()])
    else:
        def rhs(t, y):
            return sys.vector_field(y)

        y0 = u0
    t_eval = np.linspace(0.0, T, n_samples) if n_samples else None
    sol = solve_ivp(rhs, (0.0, T), y0, method="DOP853", rtol=rtol, atol=atol,
                    t_eval=t_eval, events=_events(sys))
    if sol.status == 1:
        idx = [i for i, te in enumerate(sol.t_events) if len(te)]
        i = idx[0]
        te, ye = sol.t_events[i][0], sol.y_events[i][0][:n2]
        if len(sys.singularities) and i == 0:
            raise DomainExitError(f"trajectory left the domain at t = {te:.6g}", te, ye)
        raise BlowupError(f"state norm exceeded {BLOWUP_NORM:g} at t = {te:.6g}", te)
    if sol.status != 0:
        raise IntegrationError(sol.message)
    y = sol.y.T
    us = y[:, :n2]
    final = us[-1]
    stm = y[-1, n2:].reshape(n2, n2) if with_stm else None
    H = sys.energy(us)
    drift = float(np.max(np.abs(H - H[0])))
    return FlowResult(sol.t, us, final.copy(), drift, stm)


# --- closed orbits -------------------------------------------------------------


@dataclass(frozen=True)
class ClosedOrbit:
    """A closed orbit ``(T, qbar)`` with its Hamiltonian initial state.

    ``loop`` holds ``M + 1`` samples of ``q`` at ``t = T j / M``; the last
    one repeats the first up to the closure residual.
    """

    T: float
    loop: np.ndarray
    u0: np.ndarray
    residual: float
    energy: float
    energy_drift: float

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError("period must be positive")

    def amplitude(self, about=None) -> float:
        ref = np.mean(self.loop[:-1], axis=0) if about is None else np.asarray(about, float)
        return float(np.max(np.linalg.norm(self.loop - ref, axis=1)))

    def max_abs_z(self) -> float:
        return float(np.max(np.abs(self.loop[:, 2]))) if self.loop.shape[1] == 3 else 0.0

    @property
    def closure(self) -> float:
        return float(np.linalg.norm(self.loop[-1] - self.loop[0]))

    def state(self) -> np.ndarray:
        return np.concatenate([[self.T], self.u0])


def _sample_orbit(sys: HamiltonianSystem, u: np.ndarray, T: float, M: int) -> FlowResult:
    return flow(sys, u, T, n_samples=M + 1)


def _residual(sys, u, T, u_ref, f_ref, H_target, anchor=None, tangent=None):
    fr = flow(sys, u, T, with_stm=True)
    F = [fr.u_final - u, [np.dot(u - u_ref, f_ref)]]
    n2 = 2 * sys.dim
    rows = [np.hstack([fr.monodromy - np.eye(n2), sys.vector_field(fr.u_final)[:, None]]),
            np.hstack([f_ref, [0.0]])[None, :]]
    if H_target is not None:
        F.append([sys.energy(u) - H_target])
        rows.append(np.hstack([sys.energy_grad(u), [0.0]])[None, :])
    if tangent is not None:
        x = np.concatenate([u, [T]])
        F.append([np.dot(x - anchor, tangent)])
        rows.append(tangent[None, :])
    return np.concatenate(F), np.vstack(rows), fr


def _newton(sys, u, T, *, u_ref, H_target=None, anchor=None, tangent=None, tol=1e-9, max_iter=30,
            T_max=1e3):
    f_ref = sys.vector_field(u_ref)
    if np.linalg.norm(f_ref) == 0:
        raise NoOrbitFound("no orbit found: phase anchor is an equilibrium")
    for it in range(max_iter):
        F, Jm, fr = _residual(sys, u, T, u_ref, f_ref, H_target, anchor, tangent)
        if np.linalg.norm(F) < tol:
            return u, T, it, fr
        dx = np.linalg.lstsq(Jm, -F, rcond=None)[0]
        u = u + dx[:-1]
        T = T + dx[-1]
        if not (0 < T < T_max) or not np.all(np.isfinite(u)):
            raise NoOrbitFound(f"no orbit found: iterate left the admissible set (T = {T:.4g})")
    raise NoOrbitFound(f"no orbit found: Newton did not converge in {max_iter} iterations")


def _finish(sys, u, T, M, verify: bool, closure_tol: float, energy_tol: float, trivial_tol: float):
    if np.linalg.norm(sys.vector_field(u)) < trivial_tol:
        raise NoOrbitFound("no orbit found: converged to a trivial orbit")
    res = _sample_orbit(sys, u, T, M)
    _, qs = sys.split(res.y)
    if np.max(np.linalg.norm(qs - qs.mean(axis=0), axis=1)) < trivial_tol:
        raise NoOrbitFound("no orbit found: converged to a trivial orbit")
    H0 = float(sys.energy(u))
    if res.energy_drift > energy_tol * (1 + abs(H0)):
        raise NoOrbitFound(f"no orbit found: energy drift {res.energy_drift:.2e} too large")
    residual = float(np.linalg.norm(res.u_final - u))
    if verify:
        ver = flow(sys, u, T, rtol=VERIFY_RTOL, atol=1e-15)
        residual = float(np.linalg.norm(ver.u_final - u))
        if residual > closure_tol:
            raise NoOrbitFound(f"no orbit found: closure residual {residual:.2e} on re-integration")
    return ClosedOrbit(float(T), qs.copy(), u.copy(), residual, H0, res.energy_drift)


def shoot_periodic(sys: HamiltonianSystem, seed, T_guess: float, *, H_target: Optional[float] = None,
                   tol: float = 1e-9, max_iter: int = 30, n_samples: int = 128, verify: bool = True,
                   closure_tol: float = 1e-8, energy_tol: float = 1e-9,
                   trivial_tol: float = 1e-7) -> ClosedOrbit:
    """Find a closed orbit near ``(seed, T_guess)`` by Gauss-Newton shooting.

    The unknowns are the initial state ``u`` and the period ``T``.  The
    residual stacks the closure defect ``flow_T(u) - u``, the Poincare phase
    condition ``<u - seed, f(seed)> = 0`` and the energy level
    ``H(u) = H_target`` (by default the seed's energy), which keeps the
    iteration off the trivial orbit.

    Raises
    ------
    NoOrbitFound
        If Newton fails within ``max_iter`` iterations, leaves the admissible
        set, or lands on a trivial orbit.
    """
    seed = np.asarray(seed, float)
    if H_target is None:
        H_target = float(sys.energy(seed))
    try:
        u, T, _, _ = _newton(sys, seed.copy(), float(T_guess), u_ref=seed, H_target=H_target,
                             tol=tol, max_iter=max_iter)
    except (BlowupError, DomainExitError, IntegrationError, np.linalg.LinAlgError) as exc:
        raise NoOrbitFound(f"no orbit found: {exc}") from exc
    return _finish(sys, u, T, n_samples, verify, closure_tol, energy_tol, trivial_tol)


def shoot_many(sys: HamiltonianSystem, seeds, T_guesses, workers: Optional[int] = None, **kw):
    """Shoot from several seeds in parallel; failures are returned as ``NoOrbitFound`` instances."""
    seeds = list(seeds)
    T_guesses = list(np.broadcast_to(np.asarray(T_guesses, float), (len(seeds),)))

    def job(args):
        s, t = args
        try:
            return shoot_periodic(sys, s, t, **kw)
        except NoOrbitFound as exc:
            return exc

    with ThreadPoolExecutor(max_workers=workers or default_workers()) as ex:
        return list(ex.map(job, zip(seeds, T_guesses)))


def linear_mode(sys: HamiltonianSystem, q0, T0: float, amplitude: float) -> np.ndarray:
    """Initial state on the linearized orbit of period ``T0`` at equilibrium ``q0``.

    The seed is ``u0 + amplitude * Re(v) / |Re(v)_q|`` with ``v`` the
    eigenvector of the linearization for the eigenvalue closest to
    ``2 pi i / T0``.
    """
    u0 = sys.equilibrium_state(q0)
    w, vecs = np.linalg.eig(sys.jacobian(u0))
    target = 2j * math.pi / T0
    k = int(np.argmin(np.abs(w - target)))
    if abs(w[k] - target) > 1e-6 * abs(target):
        raise ValueError(f"2 pi / T0 is not a characteristic frequency at q0 (closest {w[k]})")
    v = vecs[:, k]
    n = sys.dim
    # rotate the phase so that the q-part of Re(v) is as large as possible
    qv = v[n:]
    phase = np.angle(np.vdot(qv.conj(), qv)) / 2 if np.linalg.norm(qv) else 0.0
    v = np.real(v * np.exp(-1j * phase))
    scale = np.linalg.norm(v[n:])
    if scale == 0:
        raise ValueError("mode has no configuration component")
    return u0 + amplitude * v / scale


# --- continuation -------------------------------------------------------------


@dataclass(frozen=True)
class Bounds:
    amplitude: float = 5.0
    period: float = 100.0
    min_distance: float = 1e-3
    trivial_radius: float = 1e-6
    ds_min: float = 1e-5
    ds_max: float = 0.1


@dataclass(frozen=True)
class BranchStatus:
    status: str
    evidence: dict
    flags: tuple = ()


@dataclass
class Branch:
    orbits: list
    origin: tuple  # (T0, q0)
    status: str
    evidence: dict = field(default_factory=dict)
    gamma: Optional[int] = None  # bifurcation number at the starting trivial orbit, when known

    def amplitudes(self) -> np.ndarray:
        q0 = self.origin[1]
        return np.array([o.amplitude(q0) for o in self.orbits])

    def periods(self) -> np.ndarray:
        return np.array([o.T for o in self.orbits])

    def extrapolated_period(self, k: int = 5) -> float:
        """Period at zero amplitude from a fit of ``T`` against ``amplitude^2`` over the ``k`` smallest orbits."""
        a, T = self.amplitudes(), self.periods()
        idx = np.argsort(a)[:k]
        if len(idx) < 2:
            return float(T[idx[0]])
        coef = np.polyfit(a[idx] ** 2, T[idx], 1)
        return float(coef[-1])

    def to_rows(self) -> list[dict]:
        q0 = self.origin[1]
        return [
            {
                "step": i,
                "T": o.T,
                "amplitude": o.amplitude(q0),
                "max_abs_z": o.max_abs_z(),
                "samples": o.loop,
            }
            for i, o in enumerate(self.orbits)
        ]


def _x(orbit: ClosedOrbit) -> np.ndarray:
    return np.concatenate([orbit.u0, [orbit.T]])


def _check_stop(sys: HamiltonianSystem, orbit: ClosedOrbit, q0, bounds: Bounds) -> Optional[tuple[str, dict]]:
    d = float(np.min(sys.distance_to_singularities(orbit.loop))) if len(sys.singularities) else math.inf
    if d < bounds.min_distance:
        return "reaches_boundary", {"min_primary_distance": d}
    norm = float(np.max(np.linalg.norm(orbit.loop, axis=1)))
    if norm > bounds.amplitude or orbit.T > bounds.period:
        return "unbounded", {"sup_norm": norm, "T": orbit.T}
    for e in sys.equilibria:
        if np.linalg.norm(e - q0) > bounds.trivial_radius:
            dev = float(np.max(np.linalg.norm(orbit.loop - e, axis=1)))
            if dev < bounds.trivial_radius:
                return "compact_two_trivial", {"second_equilibrium": e.tolist(), "deviation": dev}
    return None


def continue_branch(sys: HamiltonianSystem, q0, T0: float, *, max_steps: int = 30,
                    bounds: Bounds = Bounds(), amplitude0: float = 1e-3, ds0: float = 0.01,
                    n_samples: int = 128, verify: bool = True, gamma: Optional[int] = None) -> Branch:
    """Follow the family of closed orbits emanating from the trivial orbit ``(T0, q0)``.

    The first two orbits are shot from the linear mode at amplitudes
    ``amplitude0`` and ``2 * amplitude0``; afterwards a secant predictor and
    a pseudo-arclength corrector in ``(u, T)`` are used with adaptive step
    ``ds`` in ``[bounds.ds_min, bounds.ds_max]``.  A failed corrector halves
    the step; after five halvings the branch is truncated with status
    ``"budget_exhausted"``.

    Parameters
    ----------
    gamma : int, optional
        Bifurcation number of ``(T0, q0)``; when given it must be nonzero.
    """
    if gamma is not None and gamma == 0:
        raise ValueError("bifurcation number of the origin is zero; no branch is forced")
    q0 = np.asarray(q0, float)
    orbits: list[ClosedOrbit] = []
    Hq0 = float(sys.energy(sys.equilibrium_state(q0)))
    for amp in (amplitude0, 2 * amplitude0):
        seed = linear_mode(sys, q0, T0, amp)
        # energy target from the linear mode, measured relative to the equilibrium
        orbits.append(shoot_periodic(sys, seed, T0, n_samples=n_samples, verify=verify))
        if abs(orbits[-1].energy - Hq0) == 0:
            raise NoOrbitFound("no orbit found: seed energy equals the equilibrium energy")

    branch = Branch(orbits, (float(T0), q0), "budget_exhausted", gamma=gamma)
    ds = ds0
    for _ in range(max_steps - 2):
        stop = _check_stop(sys, orbits[-1], q0, bounds)
        if stop:
            branch.status, branch.evidence = stop
            return branch
        x1, x0 = _x(orbits[-1]), _x(orbits[-2])
        tau = x1 - x0
        tau /= np.linalg.norm(tau)
        halvings = 0
        while True:
            pred = x1 + ds * tau
            try:
                u, T, its, _ = _newton(sys, pred[:-1], pred[-1], u_ref=orbits[-1].u0, anchor=pred,
                                       tangent=tau, tol=1e-9, max_iter=12, T_max=bounds.period * 1.5)
                orbit = _finish(sys, u, T, n_samples, verify, 1e-8, 1e-9, 1e-9)
                break
            except DomainExitError as exc:
                branch.status = "reaches_boundary"
                branch.evidence = {"exit_time": exc.time, "state": exc.state.tolist()}
                return branch
            except (NoOrbitFound, BlowupError, IntegrationError, np.linalg.LinAlgError):
                halvings += 1
                ds *= 0.5
                if halvings > 5 or ds < bounds.ds_min:
                    branch.evidence = {"reason": "corrector failed after step halvings", "ds": ds}
                    return branch
        orbits.append(orbit)
        if its <= 3:
            ds = min(ds * 1.5, bounds.ds_max)
    stop = _check_stop(sys, orbits[-1], q0, bounds)
    if stop:
        branch.status, branch.evidence = stop
    else:
        branch.evidence = {"reason": "step budget", "steps": len(orbits)}
    return branch


def branch_status(b: Branch, sys: HamiltonianSystem, bounds: Bounds = Bounds()) -> BranchStatus:
    """Re-derive a branch's status from its stored orbits.

    Evidence includes the supremum of ``max(T, |qbar|)``, the minimum distance of loop
    samples to the singular set and the list of equilibria that some orbit
    approaches within ``bounds.trivial_radius``.
    """
    if not b.orbits:
        raise ValueError("branch is empty")
    q0 = np.asarray(b.origin[1], float)
    sup_norm = max(float(np.max(np.linalg.norm(o.loop, axis=1))) for o in b.orbits)
    sup_T = max(o.T for o in b.orbits)
    if len(sys.singularities):
        min_dist = min(float(np.min(sys.distance_to_singularities(o.loop))) for o in b.orbits)
    else:
        min_dist = math.inf
    near = []
    for e in sys.equilibria:
        dev = min(float(np.max(np.linalg.norm(o.loop - e, axis=1))) for o in b.orbits)
        if dev < bounds.trivial_radius:
            near.append(e.tolist())
    others = [e for e in near if np.linalg.norm(np.asarray(e) - q0) > bounds.trivial_radius]
    evidence = {"sup_norm": sup_norm, "sup_T": sup_T, "min_singular_distance": min_dist,
                "trivial_orbits_nearby": near}
    flags = []
    if sup_T > bounds.period and sup_norm <= bounds.amplitude:
        flags.append("period unbounded (blue-sky candidate)")
    if min_dist < bounds.min_distance or b.status == "reaches_boundary":
        status = "reaches_boundary"
    elif sup_norm > bounds.amplitude or sup_T > bounds.period:
        status = "unbounded"
    elif others:
        status = "compact_two_trivial"
        # kept for inspection only; the zero-sum property is not checked
        evidence["origin_gamma"] = b.gamma
    else:
        status = "budget_exhausted"
    return BranchStatus(status, evidence, tuple(flags))
