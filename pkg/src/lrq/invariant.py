"""Lewis-Riesenfeld invariants, the invariant-related unitary ``V(t)`` and
the transformed Hamiltonian ``H_V``.

Both models share one geometric picture: the invariant is ``n(t) . S`` with
``n = (sin lam cos gam, sin lam sin gam, cos lam)``, and ``V(t)`` is the
rotation by ``lam`` about ``e_gam = (-sin gam, cos gam, 0)`` that carries
the z axis onto ``n``. The auxiliary equations below are the spherical
components of the precession ``dn/dt = B x n`` implied by ``dI/dt = i[I, H]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .algebra import SpinRep, SubspaceRep, comm
from .drives import DriveParams, SpinDrive
from .errors import DomainError, InputError, SingularityError

LAMBDA_FLOOR = 1e-3


@dataclass(frozen=True)
class InvariantTrajectory:
    t_grid: np.ndarray
    lam: np.ndarray
    gamma: np.ndarray
    gamma_dot: np.ndarray

    def __post_init__(self):
        n = len(self.t_grid)
        if any(len(a) != n for a in (self.lam, self.gamma, self.gamma_dot)):
            raise InputError("trajectory arrays have inconsistent lengths")
        if n < 3:
            raise InputError("trajectory needs at least 3 samples")
        for a in (self.t_grid, self.lam, self.gamma, self.gamma_dot):
            a.setflags(write=False)

    @property
    def n_steps(self) -> int:
        return len(self.t_grid) - 1

    @property
    def dt(self) -> float:
        return float(self.t_grid[1] - self.t_grid[0])

    @property
    def T(self) -> float:
        return float(self.t_grid[-1])

    def index_of(self, t: float) -> int:
        i = int(round((t - self.t_grid[0]) / self.dt))
        if not 0 <= i <= self.n_steps or abs(self.t_grid[i] - t) > 1e-9 * max(1.0, abs(t)):
            raise InputError(f"t={t} is not a sample of the trajectory grid")
        return i

    def rows(self):
        return zip(self.t_grid, self.lam, self.gamma, self.gamma_dot)


def uniform_grid(T: float, n_steps: int) -> np.ndarray:
    if not T > 0:
        raise DomainError(f"T must be positive, got {T}")
    return np.linspace(0.0, T, n_steps + 1)


def check_uniform(t: np.ndarray) -> float:
    t = np.asarray(t, dtype=float)
    if t.ndim != 1 or t.size < 3:
        raise InputError("time grid must be 1-D with at least 3 samples")
    d = np.diff(t)
    dt = float(d.mean())
    if not dt > 0 or np.max(np.abs(d - dt)) > 1e-9 * max(1.0, abs(t[-1])):
        raise InputError("time grid is not uniform")
    return dt


def _check_pole(t, lam, floor):
    if not floor < lam < math.pi - floor:
        raise SingularityError(t, lam)


def _rk4_halfgrid(rhs, y0, n_steps, dt, t_grid, floor):
    """Fixed-step classical RK4 with the right-hand side indexed on the
    half-step grid (index ``2i`` is ``t_i``, ``2i+1`` is ``t_i + dt/2``)."""
    lam, gam = y0
    _check_pole(t_grid[0], lam, floor)
    out = np.empty((n_steps + 1, 2))
    out[0] = y0
    h2 = dt / 2
    for i in range(n_steps):
        a1, b1 = rhs(2 * i, lam, gam)
        a2, b2 = rhs(2 * i + 1, lam + h2 * a1, gam + h2 * b1)
        a3, b3 = rhs(2 * i + 1, lam + h2 * a2, gam + h2 * b2)
        a4, b4 = rhs(2 * i + 2, lam + dt * a3, gam + dt * b3)
        lam += dt / 6 * (a1 + 2 * a2 + 2 * a3 + a4)
        gam += dt / 6 * (b1 + 2 * b2 + 2 * b3 + b4)
        if not (math.isfinite(lam) and math.isfinite(gam)):
            raise SingularityError(t_grid[i + 1], lam)
        _check_pole(t_grid[i + 1], lam, floor)
        out[i + 1] = lam, gam
    return out


def _check_start(lambda0, n_steps):
    if n_steps < 100:
        raise DomainError(f"n_steps must be >= 100, got {n_steps}")
    if not 0 < lambda0 < math.pi:
        raise DomainError(f"lambda0 must lie in (0, pi), got {lambda0}")


def _angles_of(v) -> tuple[float, float]:
    x, y, z = (float(c) for c in v)
    r = math.sqrt(x * x + y * y + z * z)
    if r == 0.0:
        raise DomainError("zero field: no preferred invariant axis, pass lambda0 explicitly")
    lam = math.acos(max(-1.0, min(1.0, z / r)))
    gam = math.atan2(y, x)
    return lam, gam


# --- two-level multiphoton Jaynes-Cummings ---------------------------------


def jc_field(params: DriveParams, rep: SubspaceRep, t):
    """Bloch field ``B`` with ``H = (m + k/2) omega + B . sigma``."""
    _, d, g = params.sample(t, rep.k)
    s = rep.sqrt_lambda
    return np.stack([s * g.real, s * g.imag, -d / 2 + 0 * g.real], axis=-1)


def default_initial_angles_jc(params: DriveParams, rep: SubspaceRep) -> tuple[float, float]:
    """Angles aligning ``I(0)`` with ``H(0)`` so that the two branches start
    in instantaneous energy eigenstates."""
    return _angles_of(jc_field(params, rep, 0.0))


def solve_auxiliary_jc(
    params: DriveParams,
    rep: SubspaceRep,
    lambda0: float | None = None,
    gamma0: float | None = None,
    T: float = 10.0,
    n_steps: int = 10_000,
    lambda_floor: float = LAMBDA_FLOOR,
) -> InvariantTrajectory:
    """Integrate the invariant angles for the Jaynes-Cummings doublet.

    With ``s = sqrt(lambda_m)``::

        dlam/dt = 2 s Im(g exp(-i gam))
        dgam/dt = -delta - 2 s cot(lam) Re(g exp(-i gam))
    """
    if lambda0 is None or gamma0 is None:
        l0, g0 = default_initial_angles_jc(params, rep)
        lambda0 = l0 if lambda0 is None else lambda0
        gamma0 = g0 if gamma0 is None else gamma0
    _check_start(lambda0, n_steps)
    t = uniform_grid(T, n_steps)
    dt = T / n_steps
    half = np.linspace(0.0, T, 2 * n_steps + 1)
    _, d, g = params.sample(half, rep.k)
    s = rep.sqrt_lambda
    gr = (2 * s * np.real(g)).tolist()
    gi = (2 * s * np.imag(g)).tolist()
    dl = np.asarray(d, dtype=float).tolist()
    sin, cos, tan = math.sin, math.cos, math.tan

    def rhs(h, lam, gam):
        c, sn = cos(gam), sin(gam)
        # 2s g e^{-i gam}
        re = gr[h] * c + gi[h] * sn
        im = gi[h] * c - gr[h] * sn
        return im, -dl[h] - re / tan(lam)

    y = _rk4_halfgrid(rhs, (float(lambda0), float(gamma0)), n_steps, dt, t, lambda_floor)
    lam, gam = y[:, 0], y[:, 1]
    ge = 2 * s * g[::2] * np.exp(-1j * gam)
    gamma_dot = -np.asarray(d, dtype=float)[::2] - ge.real / np.tan(lam)
    return InvariantTrajectory(t, lam, gam, gamma_dot)


def build_invariant(rep: SubspaceRep, lam, gamma) -> np.ndarray:
    """``I = sin(lam)/sqrt(lambda_m) [e^{i gam} Q + e^{-i gam} Q^dag] + cos(lam) sigma_z``.

    Broadcasts over array-valued angles, returning shape ``(..., 2, 2)``.
    """
    lam = np.asarray(lam, dtype=float)[..., None, None]
    gamma = np.asarray(gamma, dtype=float)[..., None, None]
    return (
        np.sin(lam) / rep.sqrt_lambda * (np.exp(1j * gamma) * rep.Q + np.exp(-1j * gamma) * rep.Q_dag)
        + np.cos(lam) * rep.sigma_z
    )


def jc_alpha(rep: SubspaceRep, lam, gamma):
    return np.asarray(lam) / 2 * np.exp(1j * np.asarray(gamma)) / rep.sqrt_lambda


def build_V(rep: SubspaceRep, lam, gamma) -> np.ndarray:
    """``V = exp(alpha Q - alpha^* Q^dag)`` with ``alpha = (lam/2) e^{i gam} / sqrt(lambda_m)``."""
    a = jc_alpha(rep, lam, gamma)[..., None, None]
    return expm(a * rep.Q - np.conj(a) * rep.Q_dag)


def angle_relation_residuals(rep: SubspaceRep, lam: float, gamma: float) -> tuple[float, float]:
    """Residuals of the finite relations tying ``alpha`` to ``(c, b)``:
    ``sin(sqrt(4|alpha|^2 lambda_m)) = lambda_m (c alpha^* + c^* alpha) / sqrt(4|alpha|^2 lambda_m)``
    and ``cos(sqrt(4|alpha|^2 lambda_m)) = b``.
    """
    a = complex(jc_alpha(rep, lam, gamma))
    c = math.sin(lam) * np.exp(1j * gamma) / rep.sqrt_lambda
    b = math.cos(lam)
    root = math.sqrt(4 * abs(a) ** 2 * rep.lambda_m)
    r_sin = abs(math.sin(root) - (rep.lambda_m * (c * np.conj(a) + np.conj(c) * a)).real / root)
    r_cos = abs(math.cos(root) - b)
    return r_sin, r_cos


def jc_hamiltonian(params: DriveParams, rep: SubspaceRep, t) -> np.ndarray:
    """``H = omega N + (omega - delta)/2 sigma_z + g Q + g^* Q^dag - omega/2`` on the doublet."""
    w, d, g = params.sample(t, rep.k)
    w = np.asarray(w, dtype=float)[..., None, None]
    d = np.asarray(d, dtype=float)[..., None, None]
    g = np.asarray(g, dtype=complex)[..., None, None]
    return (
        w * rep.N
        + (w - d) / 2 * rep.sigma_z
        + g * rep.Q
        + np.conj(g) * rep.Q_dag
        - w / 2 * np.eye(2)
    )


def time_derivative(samples: np.ndarray, dt: float) -> np.ndarray:
    """Second-order finite differences along axis 0 (one-sided at the ends)."""
    samples = np.asarray(samples)
    if samples.shape[0] < 3:
        raise InputError("need at least 3 samples to differentiate")
    out = np.empty_like(samples)
    out[1:-1] = (samples[2:] - samples[:-2]) / (2 * dt)
    out[0] = (-3 * samples[0] + 4 * samples[1] - samples[2]) / (2 * dt)
    out[-1] = (3 * samples[-1] - 4 * samples[-2] + samples[-3]) / (2 * dt)
    return out


def transform_hamiltonian(H_samples, V_samples, dt: float) -> np.ndarray:
    """``H_V = V^dag H V - i V^dag dV/dt`` on every grid point."""
    H = np.asarray(H_samples)
    V = np.asarray(V_samples)
    if H.shape != V.shape:
        raise InputError(f"H and V series differ in shape: {H.shape} vs {V.shape}")
    if not dt > 0:
        raise InputError("dt must be positive")
    Vd = np.conj(np.swapaxes(V, -1, -2))
    return Vd @ H @ V - 1j * (Vd @ time_derivative(V, dt))


def commutator_residual(I_samples, H_samples, dt: float) -> float:
    """Max Frobenius norm of ``dI/dt - i [I, H]`` over interior samples."""
    I = np.asarray(I_samples)
    H = np.asarray(H_samples)
    if I.shape != H.shape:
        raise InputError(f"I and H series differ in shape: {I.shape} vs {H.shape}")
    if I.shape[0] < 3:
        raise InputError("need at least 3 samples")
    dI = (I[2:] - I[:-2]) / (2 * dt)
    Ii, Hi = I[1:-1], H[1:-1]
    r = dI - 1j * (Ii @ Hi - Hi @ Ii)
    return float(np.max(np.linalg.norm(r, axis=(-2, -1))))


def invariant_residual(traj: InvariantTrajectory, params: DriveParams, rep: SubspaceRep) -> float:
    dt = check_uniform(traj.t_grid)
    I = build_invariant(rep, traj.lam, traj.gamma)
    H = jc_hamiltonian(params, rep, traj.t_grid)
    return commutator_residual(I, H, dt)


def bch_derivative(L: np.ndarray, L_dot: np.ndarray, n_terms: int = 12) -> np.ndarray:
    """``V^dag dV/dt`` for ``V = exp(L)`` summed as
    ``L' + [L', L]/2! + [[L', L], L]/3! + ...`` (``n_terms`` terms)."""
    term = np.array(L_dot, dtype=complex)
    total = term.copy()
    fact = 1.0
    for n in range(1, n_terms):
        term = comm(term, L)
        fact *= n + 1
        total = total + term / fact
    return total


# --- spin-j model -----------------------------------------------------------


def spin_hamiltonian(drive: SpinDrive, srep: SpinRep, t) -> np.ndarray:
    B = drive.field(t)
    return (
        B[..., 0, None, None] * srep.J1
        + B[..., 1, None, None] * srep.J2
        + B[..., 2, None, None] * srep.J3
    )


def spin_invariant(srep: SpinRep, lam, gamma) -> np.ndarray:
    """``I = (1/2) sin(lam) [e^{-i gam} J+ + e^{i gam} J-] + cos(lam) J3``."""
    lam = np.asarray(lam, dtype=float)[..., None, None]
    gamma = np.asarray(gamma, dtype=float)[..., None, None]
    return (
        0.5 * np.sin(lam) * (np.exp(-1j * gamma) * srep.J_plus + np.exp(1j * gamma) * srep.J_minus)
        + np.cos(lam) * srep.J3
    )


def spin_beta(lam, gamma):
    return -np.asarray(lam) / 2 * np.exp(-1j * np.asarray(gamma))


def spin_V(srep: SpinRep, lam, gamma) -> np.ndarray:
    """``V = exp(beta J+ - beta^* J-)`` with ``beta = -(lam/2) e^{-i gam}``."""
    b = spin_beta(lam, gamma)[..., None, None]
    return expm(b * srep.J_plus - np.conj(b) * srep.J_minus)


def default_initial_angles_spin(drive: SpinDrive) -> tuple[float, float]:
    return _angles_of(drive.field(0.0))


def solve_auxiliary_spin(
    drive: SpinDrive,
    lambda0: float | None = None,
    gamma0: float | None = None,
    T: float = 10.0,
    n_steps: int = 10_000,
    lambda_floor: float = LAMBDA_FLOOR,
) -> InvariantTrajectory:
    """Integrate the invariant angles for ``H = c0 n(theta, phi) . J``::

        dlam/dt = c0 sin(theta) sin(phi - gam)
        dgam/dt = c0 cos(theta) - c0 sin(theta) cos(phi - gam) cot(lam)
    """
    if lambda0 is None or gamma0 is None:
        l0, g0 = default_initial_angles_spin(drive)
        lambda0 = l0 if lambda0 is None else lambda0
        gamma0 = g0 if gamma0 is None else gamma0
    _check_start(lambda0, n_steps)
    t = uniform_grid(T, n_steps)
    dt = T / n_steps
    half = np.linspace(0.0, T, 2 * n_steps + 1)
    c0, th, ph = drive.sample(half)
    c0 = np.broadcast_to(c0, half.shape)
    bperp = (c0 * np.sin(th)).tolist()
    bz = (c0 * np.cos(th)).tolist()
    phl = np.broadcast_to(ph, half.shape).tolist()
    sin, cos, tan = math.sin, math.cos, math.tan

    def rhs(h, lam, gam):
        x = phl[h] - gam
        return bperp[h] * sin(x), bz[h] - bperp[h] * cos(x) / tan(lam)

    y = _rk4_halfgrid(rhs, (float(lambda0), float(gamma0)), n_steps, dt, t, lambda_floor)
    lam, gam = y[:, 0], y[:, 1]
    bp = np.asarray(bperp)[::2]
    gamma_dot = np.asarray(bz)[::2] - bp * np.cos(np.asarray(phl)[::2] - gam) / np.tan(lam)
    return InvariantTrajectory(t, lam, gam, gamma_dot)


def spin_invariant_residual(traj: InvariantTrajectory, drive: SpinDrive, srep: SpinRep) -> float:
    dt = check_uniform(traj.t_grid)
    I = spin_invariant(srep, traj.lam, traj.gamma)
    H = spin_hamiltonian(drive, srep, traj.t_grid)
    return commutator_residual(I, H, dt)


def spin_hv_diagonal(traj: InvariantTrajectory, drive: SpinDrive) -> np.ndarray:
    """Closed-form coefficient of ``J3`` in ``H_V``:
    ``c0 [cos lam cos theta + sin lam sin theta cos(gam - phi)] + gam' (1 - cos lam)``."""
    c0, th, ph = drive.sample(traj.t_grid)
    lam, gam = traj.lam, traj.gamma
    return c0 * (
        np.cos(lam) * np.cos(th) + np.sin(lam) * np.sin(th) * np.cos(gam - ph)
    ) + traj.gamma_dot * (1 - np.cos(lam))
