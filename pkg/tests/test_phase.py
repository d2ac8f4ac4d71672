import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lrq import (
    DomainError,
    DriveParams,
    InputError,
    Profile,
    SpinDrive,
    build_subspace_rep,
    cyclic_solid_angle,
    jc_phase,
    solve_auxiliary_jc,
    solve_auxiliary_spin,
    spin_phase,
)
from lrq.phase import cumulative_simpson, jc_phase_series, simpson


@pytest.mark.parametrize("n", [3, 4, 11, 12, 101])
def test_cumulative_simpson_exact_for_quadratics(n):
    x = np.linspace(0.0, 2.0, n)
    y = 1.0 - 2.0 * x + 0.5 * x**2
    exact = x - x**2 + x**3 / 6
    np.testing.assert_allclose(cumulative_simpson(y, x[1] - x[0]), exact, atol=1e-14)


def test_cumulative_simpson_exact_for_cubics_at_even_nodes():
    x = np.linspace(0.0, 2.0, 21)
    y = 0.3 * x**3 - x
    exact = 0.075 * x**4 - x**2 / 2
    np.testing.assert_allclose(cumulative_simpson(y, x[1] - x[0])[::2], exact[::2], atol=1e-14)


def test_cumulative_simpson_smooth_function():
    x = np.linspace(0.0, 3.0, 301)
    np.testing.assert_allclose(cumulative_simpson(np.cos(x), x[1] - x[0]), np.sin(x), atol=1e-9)


def test_simpson_needs_three_points():
    with pytest.raises(InputError):
        simpson([1.0, 2.0], 0.1)


@given(st.floats(0.0, math.pi))
def test_solid_angle_range(lam):
    a = cyclic_solid_angle(lam)
    assert 0.0 <= a <= 4 * math.pi + 1e-12


def test_solid_angle_values():
    assert cyclic_solid_angle(math.pi / 3) == pytest.approx(math.pi)
    assert cyclic_solid_angle(math.pi / 2) == pytest.approx(2 * math.pi)
    assert cyclic_solid_angle(0.0) == 0.0
    with pytest.raises(DomainError):
        cyclic_solid_angle(4.0)


# --- closed forms of the doublet ---------------------------------------------------


def test_resonance_phases_closed_form():
    rep = build_subspace_rep(1, 1)
    params = DriveParams(1.0, 1.0, 0.25)
    traj = solve_auxiliary_jc(params, rep, T=10.0, n_steps=1000)
    for sigma in (1, -1):
        rec = jc_phase(traj, params, 1, 1, sigma)
        assert rec.phi_d == pytest.approx(15.0 + sigma * math.sqrt(2) * 0.25 * 10.0, abs=1e-12)
        assert abs(rec.phi_g) < 1e-14


def test_decoupled_total_phase_is_independent_of_lambda():
    # phi_total = (m + k/2) w T - sigma delta T / 2 for any starting lambda
    rep = build_subspace_rep(2, 2)
    params = DriveParams(1.0, 1.7, 0.0)
    for lam0 in (0.4, 1.0, 2.5):
        traj = solve_auxiliary_jc(params, rep, lambda0=lam0, gamma0=0.0, T=10.0, n_steps=1000)
        for sigma in (1, -1):
            assert jc_phase(traj, params, 2, 2, sigma).phi_total == pytest.approx(30.0 - sigma * 1.5, abs=1e-11)


@pytest.mark.parametrize("lam", [math.pi / 6, math.pi / 4, math.pi / 3, math.pi / 2])
def test_cyclic_geometric_phase(lam):
    m, k = 1, 2
    rep = build_subspace_rep(m, k)
    a, nu = 0.1, 0.5
    delta = -nu - 2 * rep.sqrt_lambda * a / math.tan(lam)
    params = DriveParams(1.0, k - delta, Profile.rotating(a, nu))
    traj = solve_auxiliary_jc(params, rep, lambda0=lam, gamma0=0.0, T=2 * math.pi / nu, n_steps=2000)
    for sigma in (1, -1):
        rec = jc_phase(traj, params, m, k, sigma)
        assert rec.phi_g == pytest.approx(sigma / 2 * cyclic_solid_angle(lam), abs=1e-9)


def test_detuned_phases_frozen(detuned_params, rep11):
    traj = solve_auxiliary_jc(detuned_params, rep11, T=10.0, n_steps=10_000)
    plus = jc_phase(traj, detuned_params, 1, 1, 1)
    minus = jc_phase(traj, detuned_params, 1, 1, -1)
    assert plus.phi_d == pytest.approx(17.98499334209472, abs=1e-9)
    assert plus.phi_g == pytest.approx(-0.16146065088965514, abs=1e-9)
    assert minus.phi_d == pytest.approx(13.010002906205477, abs=1e-9)
    assert minus.phi_g == pytest.approx(-plus.phi_g, abs=1e-15)
    # the two branches share the (m + k/2) omega part
    assert plus.phi_d + minus.phi_d == pytest.approx(2 * 1.5 * simpson(detuned_params.omega(traj.t_grid), traj.dt), abs=1e-12)


def test_printed_variant_only_changes_lower_branch(detuned_params, rep11):
    traj = solve_auxiliary_jc(detuned_params, rep11, T=10.0, n_steps=2000)
    a = jc_phase_series(traj, detuned_params, 1, 1, 1)
    b = jc_phase_series(traj, detuned_params, 1, 1, 1, printed=True)
    np.testing.assert_array_equal(a.phi_d, b.phi_d)
    c = jc_phase_series(traj, detuned_params, 1, 1, -1)
    d = jc_phase_series(traj, detuned_params, 1, 1, -1, printed=True)
    assert abs(c.phi_d[-1] - d.phi_d[-1]) > 1.0


def test_bad_sigma(detuned_params, rep11):
    traj = solve_auxiliary_jc(detuned_params, rep11, T=1.0, n_steps=100)
    with pytest.raises(DomainError):
        jc_phase(traj, detuned_params, 1, 1, 0)


def test_phase_series_rows(detuned_params, rep11):
    traj = solve_auxiliary_jc(detuned_params, rep11, T=1.0, n_steps=100)
    s = jc_phase_series(traj, detuned_params, 1, 1, 1)
    rows = list(s.rows())
    assert len(rows) == 101
    assert rows[0] == (0.0, 0.0, 0.0, 0.0)
    assert rows[-1][3] == pytest.approx(s.final().phi_total)


# --- spin model -----------------------------------------------------------------


def test_spin_phases_frozen_and_zero_branch():
    drive = SpinDrive(1.0, math.pi / 4, Profile.linear(0.0, 0.3))
    traj = solve_auxiliary_spin(drive, T=10.0, n_steps=20_000)
    up = spin_phase(traj, drive, 1)
    assert up.phi_d == pytest.approx(9.403069495294003, abs=1e-9)
    assert up.phi_g == pytest.approx(1.6071666528784585, abs=1e-9)
    zero = spin_phase(traj, drive, 0)
    assert zero.phi_d == 0.0 and zero.phi_g == 0.0
    down = spin_phase(traj, drive, -1)
    assert down.phi_total == -up.phi_total


def test_spin_static_field_has_no_geometric_phase():
    drive = SpinDrive(0.8, 0.6, 1.1)
    traj = solve_auxiliary_spin(drive, T=5.0, n_steps=500)
    rec = spin_phase(traj, drive, 0.5)
    assert rec.phi_d == pytest.approx(0.5 * 0.8 * 5.0, abs=1e-12)
    assert abs(rec.phi_g) < 1e-12


def test_geometric_phase_is_schedule_independent():
    # same cone traversed once at uniform and at non-uniform speed
    lam0 = 0.8
    uniform = SpinDrive(1.0, 0.0, 0.0)
    uneven = SpinDrive(Profile.sinusoid(0.5, 1.0, offset=1.0), 0.0, 0.0)
    phases = []
    for drive in (uniform, uneven):
        traj = solve_auxiliary_spin(drive, lambda0=lam0, gamma0=0.0, T=2 * math.pi, n_steps=4000)
        assert np.ptp(traj.lam) < 1e-12
        phases.append(spin_phase(traj, drive, 1).phi_g)
    assert phases[0] == pytest.approx(cyclic_solid_angle(lam0), abs=1e-10)
    assert phases[1] == pytest.approx(phases[0], abs=1e-10)
