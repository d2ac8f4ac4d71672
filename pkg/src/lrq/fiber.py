"""Photon polarization transport along a curved fiber, in the spin-1 sector.

The single-photon states ``a_R^dag|0>`` and ``a_L^dag|0>`` are identified with
the ``J3 = +1`` and ``J3 = -1`` vectors of the j=1 representation (circular
basis ``e_+- = -+(x +- i y)/sqrt(2)``). The unit momentum direction
``khat = (sin lam cos gam, sin lam sin gam, cos lam)`` plays the role of the
invariant axis, and the effective Hamiltonian is ``(khat x dkhat/dt) . J``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import expm

from .algebra import SpinRep, build_spin_rep
from .drives import Profile, SpinDrive
from .errors import DomainError, InputError
from .invariant import InvariantTrajectory, commutator_residual, spin_V, uniform_grid
from .oracle import evolve_timestepped
from .phase import cumulative_simpson


@dataclass(frozen=True)
class HelixSpec:
    radius: float
    pitch: float
    n_turns: float = 1.0

    def __post_init__(self):
        if not (self.radius > 0 and self.pitch > 0):
            raise DomainError("helix radius and pitch must be positive")
        if not self.n_turns > 0:
            raise DomainError("n_turns must be positive")

    @property
    def pitch_angle(self) -> float:
        """Angle between the tangent and the helix axis."""
        return math.atan(2 * math.pi * self.radius / self.pitch)


def _smoothstep(x):
    x = np.clip(x, 0.0, 1.0)
    return x**3 * (10 - 15 * x + 6 * x**2)


def _smoothstep_dot(x):
    inside = (x > 0) & (x < 1)
    x = np.clip(x, 0.0, 1.0)
    return np.where(inside, 30 * x**2 * (1 - x) ** 2, 0.0)


@dataclass(frozen=True)
class FiberPath:
    """Polar angles of the unit tangent as functions of time, with derivatives."""

    lam: Callable
    gam: Callable
    lam_dot: Callable
    gam_dot: Callable
    T: float
    k_mag: float = 1.0

    def __post_init__(self):
        if not self.T > 0:
            raise DomainError("path duration T must be positive")
        if not self.k_mag > 0:
            raise DomainError("k_mag must be positive")

    @classmethod
    def cone(cls, pitch_angle: float, n_turns: float, T: float, ramp: float = 0.0, gamma0: float = 0.0):
        """Uniform traversal of a cone of half-angle ``pitch_angle``.

        With ``ramp > 0`` the polar angle rises smoothly from 0 over the
        first ``ramp`` time units, so the path starts along the z axis.
        """
        if not 0 < pitch_angle < math.pi:
            raise DomainError(f"pitch angle must lie in (0, pi), got {pitch_angle}")
        if not 0 <= ramp < T:
            raise DomainError(f"ramp must lie in [0, T), got {ramp}")
        rate = 2 * math.pi * n_turns / T
        gam = Profile.linear(gamma0, rate)
        if ramp == 0:
            lam = Profile.constant(pitch_angle)
            return cls(lam, gam, lam.derivative, gam.derivative, T)
        return cls(
            lambda t: pitch_angle * _smoothstep(np.asarray(t, dtype=float) / ramp),
            gam,
            lambda t: pitch_angle / ramp * _smoothstep_dot(np.asarray(t, dtype=float) / ramp),
            gam.derivative,
            T,
        )

    @classmethod
    def from_table(cls, t, lam, gam, k_mag: float = 1.0):
        """Cubic-spline path through tabulated ``(t, lambda, gamma)`` samples."""
        t = np.asarray(t, dtype=float)
        lam = np.asarray(lam, dtype=float)
        gam = np.unwrap(np.asarray(gam, dtype=float))
        if t.ndim != 1 or t.size < 4 or lam.shape != t.shape or gam.shape != t.shape:
            raise InputError("path table needs >= 4 rows of t, lambda, gamma")
        if t[0] != 0 or np.any(np.diff(t) <= 0):
            raise InputError("path table t must start at 0 and increase strictly")
        if not (np.all(np.isfinite(lam)) and np.all(np.isfinite(gam))):
            raise InputError("non-finite path sample")
        sl, sg = CubicSpline(t, lam), CubicSpline(t, gam)
        return cls(sl, sg, sl.derivative(), sg.derivative(), float(t[-1]), k_mag)

    def check_grid(self, t):
        lam = np.asarray(self.lam(t), dtype=float)
        if not (np.all(np.isfinite(lam)) and np.all(np.isfinite(self.gam(t)))):
            raise InputError("path produced non-finite angles")
        inner = np.asarray(t) > 0
        bad = (lam <= 0) & inner | (lam >= math.pi) | (lam < 0)
        if np.any(bad):
            i = int(np.argmax(bad))
            raise DomainError(f"path touches a chart pole at t={np.asarray(t)[i]:.6g} (lambda={lam[i]:.6g})")
        return lam

    def trajectory(self, n_steps: int) -> InvariantTrajectory:
        t = uniform_grid(self.T, n_steps)
        lam = self.check_grid(t)
        return InvariantTrajectory(
            t, lam, np.asarray(self.gam(t), dtype=float), np.asarray(self.gam_dot(t), dtype=float)
        )


def helix_to_path(spec: HelixSpec, T: float, ramp: float = 0.0) -> FiberPath:
    return FiberPath.cone(spec.pitch_angle, spec.n_turns, T, ramp)


def khat(path: FiberPath, t) -> np.ndarray:
    lam = np.asarray(path.lam(t), dtype=float)
    gam = np.asarray(path.gam(t), dtype=float)
    return np.stack([np.sin(lam) * np.cos(gam), np.sin(lam) * np.sin(gam), np.cos(lam)], axis=-1)


def rotation_vector(path: FiberPath, t) -> np.ndarray:
    """``khat x dkhat/dt = lam' e_gam - gam' sin(lam) e_lam``."""
    lam = np.asarray(path.lam(t), dtype=float)
    gam = np.asarray(path.gam(t), dtype=float)
    ld = np.asarray(path.lam_dot(t), dtype=float)
    gd = np.asarray(path.gam_dot(t), dtype=float)
    if not (np.all(np.isfinite(ld)) and np.all(np.isfinite(gd))):
        raise InputError("path derivatives are not finite")
    e_lam = np.stack([np.cos(lam) * np.cos(gam), np.cos(lam) * np.sin(gam), -np.sin(lam)], axis=-1)
    e_gam = np.stack([-np.sin(gam), np.cos(gam), np.zeros_like(gam)], axis=-1)
    return ld[..., None] * e_gam - (gd * np.sin(lam))[..., None] * e_lam


def _dotJ(v, srep: SpinRep) -> np.ndarray:
    v = np.asarray(v)
    return v[..., 0, None, None] * srep.J1 + v[..., 1, None, None] * srep.J2 + v[..., 2, None, None] * srep.J3


def effective_hamiltonian(path: FiberPath, srep: SpinRep, t) -> np.ndarray:
    return _dotJ(rotation_vector(path, t), srep)


def helicity_operator(path: FiberPath, srep: SpinRep, t) -> np.ndarray:
    return _dotJ(khat(path, t), srep)


def drive_orthogonality(path: FiberPath, t) -> np.ndarray:
    """``cos lam cos th + sin lam sin th cos(gam - phi)``, i.e. ``khat`` dotted
    with the unit rotation axis (zero where the path does not turn)."""
    w = rotation_vector(path, t)
    nrm = np.linalg.norm(w, axis=-1)
    k = khat(path, t)
    return np.where(nrm > 0, np.einsum("...i,...i->...", k, w) / np.where(nrm > 0, nrm, 1), 0.0)


def geometric_integral(path: FiberPath, t: float, n_steps: int = 2000) -> float:
    """``int_0^t gam' (1 - cos lam) dt'`` by Simpson on a uniform grid."""
    if t == 0:
        return 0.0
    if not 0 < t <= path.T * (1 + 1e-12):
        raise DomainError(f"t={t} lies outside the path window [0, {path.T}]")
    grid = np.linspace(0.0, t, n_steps + 1)
    lam = path.check_grid(grid)
    rate = np.asarray(path.gam_dot(grid), dtype=float) * (1 - np.cos(lam))
    return float(cumulative_simpson(rate, t / n_steps)[-1])


def _check_rep(srep: SpinRep):
    if srep.two_j != 2:
        raise DomainError("fiber operations use the j=1 representation")


def initial_state(path: FiberPath, srep: SpinRep, sigma: int) -> np.ndarray:
    """``V(0)|sigma>``; equals ``|sigma>`` when the path starts along z."""
    e = np.zeros(srep.dim, dtype=complex)
    e[srep.basis_index(sigma)] = 1.0
    return spin_V(srep, float(path.lam(0.0)), float(path.gam(0.0))) @ e


def explicit_U(path: FiberPath, srep: SpinRep, t: float, n_steps: int = 2000) -> np.ndarray:
    """``U(t) = V(t) exp(f J3) V(0)^dag`` with ``f = -i int_0^t gam'(1 - cos lam)``.

    ``V(0) = 1`` when the path starts at the pole, which recovers the
    two-factor form.
    """
    _check_rep(srep)
    f = -1j * geometric_integral(path, t, n_steps)
    V0 = spin_V(srep, float(path.lam(0.0)), float(path.gam(0.0)))
    Vt = spin_V(srep, float(path.lam(t)), float(path.gam(t)))
    return Vt @ expm(f * srep.J3) @ np.conj(V0.T)


def explicit_U_series(path: FiberPath, srep: SpinRep, n_steps: int) -> tuple[np.ndarray, np.ndarray]:
    """``U`` on every sample of a uniform grid; returns ``(t, U)``."""
    _check_rep(srep)
    traj = path.trajectory(n_steps)
    phi = cumulative_simpson(traj.gamma_dot * (1 - np.cos(traj.lam)), traj.dt)
    V = spin_V(srep, traj.lam, traj.gamma)
    phase = np.exp(-1j * phi[:, None] * srep.m_values[None, :])
    U = (V * phase[:, None, :]) @ np.conj(V[0].T)
    return traj.t_grid, U


def _check_sigma(sigma):
    if sigma == 0:
        raise DomainError("sigma=0 is the longitudinal mode of the j=1 rep, not a photon helicity")
    if sigma not in (1, -1):
        raise DomainError(f"sigma must be +1 or -1, got {sigma}")


def helicity_residual(path: FiberPath, srep: SpinRep, sigma: int, t: float, n_steps: int = 2000) -> float:
    """``|| (khat(t) . J) psi - sigma psi ||`` with ``psi = U(t) V(0)|sigma>``."""
    _check_sigma(sigma)
    psi = explicit_U(path, srep, t, n_steps) @ initial_state(path, srep, sigma)
    return float(np.linalg.norm(helicity_operator(path, srep, t) @ psi - sigma * psi))


def expectation_J(srep: SpinRep, psi) -> np.ndarray:
    psi = np.asarray(psi)
    nrm = np.vdot(psi, psi).real
    return np.array([np.vdot(psi, J @ psi).real for J in srep.vector]) / nrm


def momentum_transport_check(path: FiberPath, srep: SpinRep, sigma: int, t: float, n_steps: int = 2000) -> float:
    """``max_mu |<psi|J_mu|psi> - sigma khat_mu(t)|`` in the evolved state."""
    _check_sigma(sigma)
    psi = explicit_U(path, srep, t, n_steps) @ initial_state(path, srep, sigma)
    return float(np.max(np.abs(expectation_J(srep, psi) - sigma * khat(path, t))))


def fiber_geometric_phase(path: FiberPath, sigma: float, t: float | None = None, n_steps: int = 2000) -> float:
    """``sigma * int_0^t gam'(1 - cos lam) dt'``; ``sigma`` is the J3 eigenvalue."""
    if sigma not in (1, 0, -1):
        raise DomainError(f"sigma must be a j=1 J3 eigenvalue, got {sigma}")
    return sigma * geometric_integral(path, path.T if t is None else t, n_steps)


def dynamical_phase(path: FiberPath, srep: SpinRep, sigma: int, n_steps: int = 2000) -> float:
    """``int_0^T <psi|H_eff|psi> dt`` along the explicit solution."""
    t, U = explicit_U_series(path, srep, n_steps)
    psi = U @ initial_state(path, srep, sigma)
    H = effective_hamiltonian(path, srep, t)
    e = np.einsum("ti,tij,tj->t", np.conj(psi), H, psi).real
    return float(cumulative_simpson(e, t[1] - t[0])[-1])


@dataclass(frozen=True)
class InvarianceReport:
    max_residual: float
    max_orthogonality: float


def verify_chiao_wu_invariance(path: FiberPath, srep: SpinRep, t_grid, hamiltonian: Callable | None = None) -> InvarianceReport:
    """Residual of ``dI/dt - i[I, H_eff]`` for ``I = khat . J`` on ``t_grid``.

    ``hamiltonian(t)`` may replace the effective Hamiltonian, for
    sensitivity checks.
    """
    t = np.asarray(t_grid, dtype=float)
    dt = float(t[1] - t[0])
    I = helicity_operator(path, srep, t)
    H = effective_hamiltonian(path, srep, t) if hamiltonian is None else np.asarray(hamiltonian(t))
    return InvarianceReport(
        max_residual=commutator_residual(I, H, dt),
        max_orthogonality=float(np.max(np.abs(drive_orthogonality(path, t)))),
    )


@dataclass(frozen=True)
class FiberComparison:
    """Fidelities at checkpoints; one column per initial state."""

    t: np.ndarray
    fidelity: np.ndarray

    @property
    def min_fidelity(self) -> float:
        return float(self.fidelity.min())


def compare_with_oracle(
    path: FiberPath,
    srep: SpinRep,
    psi0,
    n_steps: int,
    oracle_steps: int,
    n_records: int = 101,
) -> FiberComparison:
    """Fidelity of ``U(t) psi0`` against time-ordered propagation under ``H_eff``.

    ``psi0`` may be a single state or a ``(dim, n)`` array whose columns are
    propagated together; the fidelity array then has one column per state.
    """
    if oracle_steps % n_steps:
        raise InputError("oracle_steps must be a multiple of n_steps")
    psi0 = np.asarray(psi0, dtype=complex)
    single = psi0.ndim == 1
    cols = psi0[:, None] if single else psi0
    if cols.shape[0] != srep.dim:
        raise InputError(f"initial states must have dimension {srep.dim}")
    t, U = explicit_U_series(path, srep, n_steps)
    stride = max(1, n_steps // max(1, n_records - 1))
    while n_steps % stride:
        stride -= 1
    sub = oracle_steps // n_steps
    _, psi = evolve_timestepped(
        lambda s: effective_hamiltonian(path, srep, s), cols, path.T, oracle_steps, record_every=sub * stride
    )
    exact = U[::stride] @ cols
    overlap = np.abs(np.einsum("tij,tij->tj", np.conj(exact), psi)) ** 2
    norms = np.einsum("tij,tij->tj", np.conj(exact), exact).real * np.einsum("tij,tij->tj", np.conj(psi), psi).real
    fid = overlap / norms
    return FiberComparison(t[::stride], fid[:, 0] if single else fid)


def helix_spin_drive(pitch_angle: float, n_turns: float, T: float) -> SpinDrive:
    """The spin-model drive equivalent to a constant-angle helix traversal:
    ``c0 = gam' sin(lam)``, axis at polar angle ``pi/2 - lam`` trailing
    ``khat`` by half a turn in azimuth."""
    rate = 2 * math.pi * n_turns / T
    return SpinDrive(
        Profile.constant(rate * math.sin(pitch_angle)),
        Profile.constant(math.pi / 2 - pitch_angle),
        Profile.linear(math.pi, rate),
    )


def photon_rep() -> SpinRep:
    return build_spin_rep(2)
