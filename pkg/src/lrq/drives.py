"""Parametric time profiles for Hamiltonian coefficients."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, InputError

FAMILIES = {
    "constant": ("c",),
    "linear": ("c0", "c1"),
    "sinusoid": ("amp", "freq", "phase", "offset"),
    "tabulated": ("t", "v"),
    "rotating": ("amp", "freq", "phase"),
}


@dataclass(frozen=True)
class Profile:
    """A named coefficient family evaluated on scalars or arrays.

    ``sinusoid`` is ``offset + amp * sin(freq * t + phase)`` with ``freq``
    an angular frequency. ``tabulated`` interpolates linearly and holds the
    end values outside the table. ``rotating`` is
    ``amp * exp(i (freq * t + phase))``, always complex. Coefficients may be
    complex.
    """

    family: str
    coeffs: tuple

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown function family {self.family!r}")
        if len(self.coeffs) != len(FAMILIES[self.family]):
            raise DomainError(f"{self.family} takes {FAMILIES[self.family]}")
        if self.family == "tabulated":
            t, v = (np.asarray(c) for c in self.coeffs)
            if t.ndim != 1 or t.shape != v.shape or t.size < 2:
                raise InputError("tabulated profile needs equal-length t[] and v[] with >= 2 points")
            if np.any(np.diff(t) <= 0):
                raise InputError("tabulated t[] must be strictly increasing")
        values = np.concatenate([np.ravel(np.asarray(c, dtype=complex)) for c in self.coeffs])
        if not np.all(np.isfinite(values)):
            raise InputError(f"non-finite coefficient in {self.family} profile")

    @classmethod
    def constant(cls, c):
        return cls("constant", (c,))

    @classmethod
    def linear(cls, c0, c1):
        return cls("linear", (c0, c1))

    @classmethod
    def sinusoid(cls, amp, freq, phase=0.0, offset=0.0):
        return cls("sinusoid", (amp, freq, phase, offset))

    @classmethod
    def rotating(cls, amp, freq, phase=0.0):
        return cls("rotating", (amp, freq, phase))

    @classmethod
    def tabulated(cls, t: Sequence[float], v: Sequence[complex]):
        return cls("tabulated", (tuple(t), tuple(v)))

    @property
    def is_complex(self) -> bool:
        if self.family == "rotating":
            return True
        if self.family == "tabulated":
            return any(isinstance(x, complex) and x.imag != 0 for x in self.coeffs[1])
        return any(isinstance(c, complex) and c.imag != 0 for c in self.coeffs)

    def __call__(self, t):
        # overflow shows up as inf and is rejected by check_finite downstream
        with np.errstate(over="ignore", invalid="ignore"):
            return self._eval(np.asarray(t, dtype=float))

    def _eval(self, t):
        f = self.family
        if f == "constant":
            out = np.full_like(t, self.coeffs[0], dtype=complex)
        elif f == "linear":
            c0, c1 = self.coeffs
            out = c0 + c1 * t
        elif f == "sinusoid":
            amp, freq, phase, offset = self.coeffs
            out = offset + amp * np.sin(np.real(freq) * t + np.real(phase))
        elif f == "rotating":
            amp, freq, phase = self.coeffs
            out = amp * np.exp(1j * (np.real(freq) * t + np.real(phase)))
        else:
            tt = np.asarray(self.coeffs[0], dtype=float)
            vv = np.asarray(self.coeffs[1], dtype=complex)
            out = np.interp(t, tt, vv.real) + 1j * np.interp(t, tt, vv.imag)
        out = np.asarray(out, dtype=complex)
        return out if self.is_complex else out.real

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        f = self.family
        if f == "constant":
            out = np.zeros_like(t, dtype=complex)
        elif f == "linear":
            out = np.full_like(t, self.coeffs[1], dtype=complex)
        elif f == "sinusoid":
            amp, freq, phase, _ = self.coeffs
            out = amp * np.real(freq) * np.cos(np.real(freq) * t + np.real(phase))
        elif f == "rotating":
            amp, freq, phase = self.coeffs
            out = 1j * np.real(freq) * amp * np.exp(1j * (np.real(freq) * t + np.real(phase)))
        else:
            tt = np.asarray(self.coeffs[0], dtype=float)
            vv = np.asarray(self.coeffs[1], dtype=complex)
            slopes = np.diff(vv) / np.diff(tt)
            i = np.clip(np.searchsorted(tt, t, side="right") - 1, 0, len(slopes) - 1)
            out = slopes[i]
        out = np.asarray(out, dtype=complex)
        return out if self.is_complex else out.real


def as_profile(x) -> Profile:
    if isinstance(x, Profile):
        return x
    if isinstance(x, (int, float, complex, np.number)) and not isinstance(x, bool):
        return Profile.constant(x)
    raise InputError(f"cannot interpret {x!r} as a time profile")


def check_finite(name: str, values) -> None:
    if not np.all(np.isfinite(values)):
        raise InputError(f"drive {name!r} produced non-finite samples")


@dataclass(frozen=True)
class DriveParams:
    """Coefficients of the multiphoton Jaynes-Cummings Hamiltonian.

    ``omega`` is the mode frequency, ``omega0`` the atomic transition
    frequency and ``g`` the (complex) coupling.
    """

    omega: Profile
    omega0: Profile
    g: Profile

    def __init__(self, omega, omega0, g):
        object.__setattr__(self, "omega", as_profile(omega))
        object.__setattr__(self, "omega0", as_profile(omega0))
        object.__setattr__(self, "g", as_profile(g))

    def delta(self, t, k: int):
        return k * np.real(self.omega(t)) - np.real(self.omega0(t))

    def sample(self, t, k: int):
        """Return ``(omega, delta, g)`` sampled at ``t``, validated finite."""
        w = np.real(self.omega(t))
        d = self.delta(t, k)
        g = np.asarray(self.g(t), dtype=complex)
        for name, v in (("omega", w), ("delta", d), ("g", g)):
            check_finite(name, v)
        return w, d, g


@dataclass(frozen=True)
class SpinDrive:
    """``H(t) = c0(t) n(theta, phi) . J``."""

    c0: Profile
    theta: Profile
    phi: Profile

    def __init__(self, c0, theta, phi):
        object.__setattr__(self, "c0", as_profile(c0))
        object.__setattr__(self, "theta", as_profile(theta))
        object.__setattr__(self, "phi", as_profile(phi))

    def sample(self, t):
        c0 = np.real(self.c0(t))
        th = np.real(self.theta(t))
        ph = np.real(self.phi(t))
        for name, v in (("c0", c0), ("theta", th), ("phi", ph)):
            check_finite(name, v)
        return c0, th, ph

    def field(self, t):
        """Cartesian field vector ``c0 * n``; shape ``(..., 3)``."""
        c0, th, ph = self.sample(t)
        return np.stack(
            [c0 * np.sin(th) * np.cos(ph), c0 * np.sin(th) * np.sin(ph), c0 * np.cos(th)],
            axis=-1,
        )
