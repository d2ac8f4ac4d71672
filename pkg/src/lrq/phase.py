"""Dynamical and geometric phases accumulated along invariant trajectories.

Phases are stored as the positive accumulated integrals ``phi``; a
particular solution carries the factor ``exp(-i phi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import falling_factorial_ratio
from .drives import DriveParams, SpinDrive
from .errors import DomainError, InputError
from .invariant import InvariantTrajectory, check_uniform


def cumulative_simpson(y, dx: float) -> np.ndarray:
    """Running integral of uniformly sampled ``y`` starting at 0.

    Even indices get the composite Simpson rule. An odd index closes its
    last panel with the three-point half-panel rule, which keeps the
    series fourth-order everywhere.
    """
    y = np.asarray(y)
    n = y.shape[0]
    if n < 3:
        raise InputError("need at least 3 samples for Simpson quadrature")
    out = np.zeros_like(y, dtype=np.result_type(y, float))
    pairs = dx / 3 * (y[:-2:2] + 4 * y[1:-1:2] + y[2::2])
    out[2::2] = np.cumsum(pairs, axis=0)
    # forward half panel [i-1, i] for odd i < n-1
    odd = np.arange(1, n - 1, 2)
    out[odd] = out[odd - 1] + dx / 12 * (5 * y[odd - 1] + 8 * y[odd] - y[odd + 1])
    if n % 2 == 0:
        i = n - 1
        out[i] = out[i - 1] + dx / 12 * (-y[i - 2] + 8 * y[i - 1] + 5 * y[i])
    return out


def simpson(y, dx: float) -> float:
    return float(cumulative_simpson(y, dx)[-1])


@dataclass(frozen=True)
class PhaseRecord:
    sigma: float
    phi_d: float
    phi_g: float

    @property
    def phi_total(self) -> float:
        return self.phi_d + self.phi_g


@dataclass(frozen=True)
class PhaseSeries:
    """Cumulative phases on the trajectory grid."""

    sigma: float
    t: np.ndarray
    phi_d: np.ndarray
    phi_g: np.ndarray

    @property
    def phi_total(self) -> np.ndarray:
        return self.phi_d + self.phi_g

    def final(self) -> PhaseRecord:
        return PhaseRecord(self.sigma, float(self.phi_d[-1]), float(self.phi_g[-1]))

    def rows(self):
        return zip(self.t, self.phi_d, self.phi_g, self.phi_total)


def _check_sigma(sigma):
    if sigma not in (1, -1):
        raise DomainError(f"sigma must be +1 or -1, got {sigma}")


def jc_phase_rates(
    traj: InvariantTrajectory,
    params: DriveParams,
    m: int,
    k: int,
    sigma: int,
    printed: bool = False,
):
    """Rates ``(dphi_d/dt, dphi_g/dt)`` of the two doublet branches.

    The dynamical rate is ``(m + k/2) omega + sigma [s sin(lam) Re(g e^{-i gam})
    - (delta/2) cos(lam)]`` and the geometric rate ``sigma (gam'/2)(1 - cos lam)``.
    With ``printed=True`` the lower branch keeps the coupling term with a
    ``+`` sign, as it is commonly quoted; that variant does not solve the
    Schroedinger equation unless the coupling term vanishes and is kept only
    to measure the discrepancy.
    """
    _check_sigma(sigma)
    s = math.sqrt(falling_factorial_ratio(m, k))
    w, d, g = params.sample(traj.t_grid, k)
    lam, gam = traj.lam, traj.gamma
    coupling = s * np.real(g * np.exp(-1j * gam)) * np.sin(lam)
    detuning = -d / 2 * np.cos(lam)
    if printed and sigma == -1:
        rate_d = (m + k / 2) * w + coupling - detuning
    else:
        rate_d = (m + k / 2) * w + sigma * (coupling + detuning)
    rate_g = sigma * traj.gamma_dot / 2 * (1 - np.cos(lam))
    return np.broadcast_to(rate_d, lam.shape), rate_g


def jc_phase_series(traj, params, m, k, sigma, printed=False) -> PhaseSeries:
    dx = check_uniform(traj.t_grid)
    rd, rg = jc_phase_rates(traj, params, m, k, sigma, printed)
    return PhaseSeries(sigma, traj.t_grid, cumulative_simpson(rd, dx), cumulative_simpson(rg, dx))


def jc_phase(traj, params, m, k, sigma, printed=False) -> PhaseRecord:
    return jc_phase_series(traj, params, m, k, sigma, printed).final()


def spin_phase_series(traj: InvariantTrajectory, drive: SpinDrive, m: float) -> PhaseSeries:
    """Phases of the ``J3 = m`` branch of the spin model:
    ``phi_d = m int c0 [cos lam cos th + sin lam sin th cos(gam - phi)]`` and
    ``phi_g = m int gam' (1 - cos lam)``."""
    dx = check_uniform(traj.t_grid)
    c0, th, ph = drive.sample(traj.t_grid)
    lam, gam = traj.lam, traj.gamma
    proj = c0 * (np.cos(lam) * np.cos(th) + np.sin(lam) * np.sin(th) * np.cos(gam - ph))
    rd = m * np.broadcast_to(proj, lam.shape)
    rg = m * traj.gamma_dot * (1 - np.cos(lam))
    return PhaseSeries(m, traj.t_grid, cumulative_simpson(rd, dx), cumulative_simpson(rg, dx))


def spin_phase(traj, drive, m) -> PhaseRecord:
    return spin_phase_series(traj, drive, m).final()


def cyclic_solid_angle(lam: float) -> float:
    """Solid angle ``2 pi (1 - cos lam)`` of a cone with half-angle ``lam``."""
    if not 0 <= lam <= math.pi:
        raise DomainError(f"lambda must lie in [0, pi], got {lam}")
    return 2 * math.pi * (1 - math.cos(lam))
