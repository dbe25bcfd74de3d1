import numpy as np
import pytest

from phasefront.analytic import (
    curvature_normal_velocity,
    drift_velocity,
    eikonal_rhs,
    integrate_analytic_front,
    inverse_tilde,
    kpz_lab_rhs,
    kpz_rhs,
    tilde_transform,
)
from phasefront.errors import InvalidInput
from phasefront.phasefield import FrontProfile

A, D = -0.1, 0.1
DRIFT_SPEED = 0.0447213595  # |a| sqrt(2 D)


def test_geometry_flat_front():
    geo = curvature_normal_velocity(0.0, 0.0, 0.5)
    assert geo.kappa == 0.0
    assert geo.v_n == 0.5


def test_geometry_tilted_front():
    geo = curvature_normal_velocity(1.0, 1.0, 0.0)
    assert abs(geo.kappa - 0.3535534) <= 1e-7
    assert geo.v_n == 0.0


def test_geometry_unit_denominator():
    geo = curvature_normal_velocity(0.0, 2.0, 1.0)
    assert geo.kappa == 2.0
    assert geo.v_n == 1.0


def test_eikonal_flat():
    assert abs(eikonal_rhs(15.0, 0.0, 0.0, A, D) - DRIFT_SPEED) <= 1e-9


def test_eikonal_curved():
    assert abs(eikonal_rhs(0.0, 0.0, 1.0, A, D) - 0.1447214) <= 1e-7


def test_eikonal_tilted():
    assert abs(eikonal_rhs(0.0, 1.0, 0.0, A, D) - 0.0547723) <= 1e-7


def test_kpz_flat_is_stationary():
    assert kpz_rhs(15.0, 0.0, 0.0, A, D) == 0.0


def test_kpz_tilted():
    assert abs(kpz_rhs(0.0, 1.0, 0.0, A, D) - 0.0223607) <= 1e-7


def test_kpz_curved():
    assert abs(kpz_rhs(0.0, 0.0, 2.0, A, D) - 0.2) <= 1e-12


def test_tilde_identity_at_zero():
    assert tilde_transform(10.0, 0.0, A, D) == 10.0


def test_tilde_hand_value():
    assert abs(tilde_transform(10.0, 25.0, A, D) - 8.8819660) <= 1e-7


def test_tilde_round_trip_exact():
    h = np.linspace(8, 22, 33)
    assert np.array_equal(inverse_tilde(tilde_transform(h, 17.3, A, D), 17.3, A, D), h)


def test_models_ignore_height_translation():
    rhs_values = []
    for h in (0.0, 12.0, -40.0):
        rhs_values.append((eikonal_rhs(h, 0.3, -0.2, A, D), kpz_rhs(h, 0.3, -0.2, A, D)))
    assert rhs_values[0] == rhs_values[1] == rhs_values[2]


def test_models_even_in_slope():
    for rhs in (eikonal_rhs, kpz_rhs, kpz_lab_rhs):
        assert rhs(0.0, 0.7, 0.1, A, D) == rhs(0.0, -0.7, 0.1, A, D)


def test_small_slope_discrepancy_scales_quadratically():
    # eikonal and drift-restored KPZ agree to O(h_x^2); the residual at
    # h_x = 0.1 must dominate the one at h_x = 0.01 by the Taylor factor
    def disc(h_x):
        return abs(eikonal_rhs(0.0, h_x, 0.0, A, D) - kpz_lab_rhs(0.0, h_x, 0.0, A, D))

    assert disc(0.1) >= 100.0 * disc(0.01)


def test_integrate_unknown_kind_rejected():
    h0 = FrontProfile(np.full(64, 15.0), dx=90.0 / 64)
    with pytest.raises(InvalidInput):
        integrate_analytic_front("spectral", h0, 1.0, 5)


def test_integrate_eikonal_flat_constant_speed():
    h0 = FrontProfile(np.full(64, 15.0), dx=90.0 / 64)
    traj = integrate_analytic_front("eikonal", h0, 25.0, 11, a=A, D=D)
    # drift_velocity is sqrt(2D) a < 0 here; the front moves up at its negative
    exact = 15.0 - drift_velocity(A, D) * traj.times
    assert np.abs(traj.profiles - exact[:, None]).max() <= 1e-6


def test_integrate_kpz_flat_matches_constant_speed_after_untilde():
    h0 = FrontProfile(np.full(64, 15.0), dx=90.0 / 64)
    traj = integrate_analytic_front("kpz", h0, 25.0, 11, a=A, D=D)
    exact = 15.0 - drift_velocity(A, D) * traj.times
    assert np.abs(traj.profiles - exact[:, None]).max() <= 1e-6


def test_integrate_eikonal_damps_single_mode():
    n, L = 128, 90.0
    x = np.arange(n) * (L / n)
    h0 = FrontProfile(15.0 + 0.5 * np.sin(2 * np.pi * x / L), dx=L / n)
    traj = integrate_analytic_front("eikonal", h0, 25.0, 26, a=A, D=D)
    amplitudes = traj.profiles.max(axis=1) - traj.profiles.min(axis=1)
    assert np.all(np.diff(amplitudes) < 0)
    assert amplitudes[-1] < amplitudes[0]
