"""Closed-form interface models.

Two analytic reductions of the 2D field dynamics to a 1D front equation: a
curvature-corrected eikonal law in the lab frame, and its small-slope
expansion (deterministic KPZ) which governs the drift-removed height
h_tilde = h + sqrt(2 D) a t.
"""

from dataclasses import dataclass

import numpy as np

from .numerics import OdeSolverConfig, StencilConfig, fd_first_derivative, fd_second_derivative, rk45_integrate
from .phasefield import FrontProfile, FrontTrajectory
from .errors import InvalidInput


@dataclass(frozen=True)
class InterfaceGeometry:
    """Curvature and normal velocity of a graph-parametrized interface."""

    kappa: float
    v_n: float


def curvature_normal_velocity(h_x, h_xx, h_t) -> InterfaceGeometry:
    """Geometry of an interface given as y = h(x).

    kappa = h_xx / (1 + h_x^2)^(3/2),  v_n = h_t / sqrt(1 + h_x^2).
    """
    slope2 = h_x * h_x
    kappa = h_xx / (1.0 + slope2) ** 1.5
    v_n = h_t / np.sqrt(1.0 + slope2)
    return InterfaceGeometry(kappa=kappa, v_n=v_n)


def drift_velocity(a, D):
    """Constant flat-front drift sqrt(2 D) * a (negative a moves fronts up)."""
    return np.sqrt(2.0 * D) * a


def eikonal_rhs(h, h_x, h_xx, a, D):
    """Lab-frame front velocity from the curvature-corrected eikonal law.

        dh/dt = D h_xx / (1 + h_x^2) - sqrt(2 D) a sqrt(1 + h_x^2 / 2)

    Pointwise in x; independent of h itself. ``h`` is accepted to mirror the
    learned models' signature.
    """
    slope2 = h_x * h_x
    return D * h_xx / (1.0 + slope2) - drift_velocity(a, D) * np.sqrt(1.0 + 0.5 * slope2)


def kpz_rhs(h, h_x, h_xx, a, D):
    """Drift-frame front velocity (deterministic KPZ),

        dh_tilde/dt = D h_xx - a sqrt(D / 2) h_x^2.
    """
    return D * h_xx - a * np.sqrt(0.5 * D) * h_x * h_x


def kpz_lab_rhs(h, h_x, h_xx, a, D):
    """KPZ closure mapped to the lab frame: kpz_rhs minus the drift term.

    This is the white-box closure embedded in the gray-box surrogates; with a
    flat profile it reproduces the eikonal flat-front speed -sqrt(2 D) a.
    """
    return kpz_rhs(h, h_x, h_xx, a, D) - drift_velocity(a, D)


def tilde_transform(h, t, a, D):
    """Map lab-frame height to the drift-removed frame, h + sqrt(2 D) a t."""
    return h + drift_velocity(a, D) * t


def inverse_tilde(h_tilde, t, a, D):
    """Inverse of :func:`tilde_transform`."""
    return h_tilde - drift_velocity(a, D) * t


def integrate_analytic_front(kind, h0: FrontProfile, T, n_save,
                             solver_cfg: OdeSolverConfig | None = None,
                             a=-0.1, D=0.1) -> FrontTrajectory:
    """Method-of-lines integration of an analytic front model.

    Spatial derivatives use the length-5 periodic stencils, the same
    discretization as the learned models, so error comparisons isolate the
    model. ``kind`` is 'eikonal' (integrated in the lab frame) or 'kpz'
    (integrated in the drift-removed frame, mapped back afterwards).
    """
    solver_cfg = solver_cfg or OdeSolverConfig()
    stencil = StencilConfig(spacing=h0.dx)
    times = np.linspace(0.0, T, n_save)

    if kind == "eikonal":
        model = eikonal_rhs
    elif kind == "kpz":
        model = kpz_rhs
    else:
        raise InvalidInput(f"unknown analytic model kind {kind!r}")

    def rhs(t, h):
        h_x = fd_first_derivative(h, stencil)
        h_xx = fd_second_derivative(h, stencil)
        return model(h, h_x, h_xx, a, D)

    states = rk45_integrate(rhs, h0.h, (0.0, T), times, solver_cfg)
    if kind == "kpz":
        states = inverse_tilde(states, times[:, None], a, D)
    return FrontTrajectory(times, states, h0.dx * h0.h.size)
