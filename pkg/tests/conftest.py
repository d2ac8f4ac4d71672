import math

import numpy as np
import pytest

from lrq import DriveParams, Profile, build_subspace_rep
from lrq.config import load_config


def _detuned_params():
    cfg = load_config("jc_detuned_sinusoid")
    return DriveParams(cfg.drives["omega"], cfg.drives["omega0"], cfg.drives["g"])


@pytest.fixture(scope="session")
def detuned_params():
    return _detuned_params()


@pytest.fixture(scope="session")
def rep11():
    return build_subspace_rep(1, 1)


@pytest.fixture(scope="session")
def strong_params():
    """A drive with larger modulation, used against the brute-force propagator."""
    e = complex(math.cos(0.3), math.sin(0.3))
    return DriveParams(
        Profile.sinusoid(0.2, 0.3, offset=1.0),
        Profile.sinusoid(0.2, 0.5, phase=0.3, offset=0.9),
        Profile.sinusoid(0.1 * e, 0.4, offset=0.2 * e),
    )


def rotation_about(u, lam, J):
    """Independent reference: exp(-i lam u.J) by eigendecomposition."""
    G = sum(ui * Ji for ui, Ji in zip(u, J))
    E, W = np.linalg.eigh(G)
    return (W * np.exp(-1j * lam * E)) @ W.conj().T


# --- acceptance verdicts --------------------------------------------------------

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def verdict():
    """Record and print one pass/fail line for an acceptance criterion."""

    def record(number, title, passed, detail):
        line = f"criterion {number} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
        ACCEPTANCE_LINES.append((number, line))
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
