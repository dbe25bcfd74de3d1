"""Shared numerical kernels.

Finite-difference stencils on periodic grids, adaptive Runge-Kutta time
integration, a two-parameter damped Gauss-Newton tanh fit, and a small
deterministic pseudorandom generator. Everything here is a pure function of
its inputs; Rng instances are the only stateful objects and are single-owner.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import RK45

from . import backend
from .errors import FitDiverged, IntegrationFailure, InvalidInput, NoFrontCrossing

# ---------------------------------------------------------------------------
# configuration types


@dataclass(frozen=True)
class StencilConfig:
    """Finite-difference stencil: number of points and grid spacing."""

    spacing: float
    length: int = 5

    def __post_init__(self):
        if self.length < 3 or self.length % 2 == 0:
            raise InvalidInput(f"stencil length must be odd and >= 3, got {self.length}")
        if not self.spacing > 0:
            raise InvalidInput(f"stencil spacing must be > 0, got {self.spacing}")


@dataclass(frozen=True)
class OdeSolverConfig:
    """Tolerances and step limits for the embedded Runge-Kutta 4(5) stepper."""

    rel_tol: float = 1e-6
    abs_tol: float = 1e-9
    max_step: float = np.inf
    initial_step: float | None = None

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0 and self.max_step > 0):
            raise InvalidInput("ODE solver tolerances and max_step must be > 0")


# ---------------------------------------------------------------------------
# deterministic pseudorandom generation

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_U64_GOLDEN = np.uint64(_GOLDEN)


def _mix64(z):
    """SplitMix64 finalizer on uint64 arrays (Steele, Lea & Flood 2014)."""
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


class Rng:
    """Counter-based SplitMix64 generator.

    The i-th output of the stream for a given seed is
    ``mix64((seed + (i + 1) * 0x9E3779B97F4A7C15) mod 2^64)`` where mix64 is
    the SplitMix64 finalizer. Being counter-based, the stream depends only on
    (seed, draw index), so identical seeds give bitwise-identical streams on
    every platform, and bulk generation vectorizes.
    """

    def __init__(self, seed):
        self.seed = int(seed) & _MASK64
        self._count = 0

    def u64(self, n):
        """Next ``n`` raw 64-bit outputs as a uint64 array."""
        base = (self.seed + (self._count + 1) * _GOLDEN) & _MASK64
        self._count += n
        idx = np.uint64(base) + np.arange(n, dtype=np.uint64) * _U64_GOLDEN
        return _mix64(idx)

    def uniform(self, n, low=0.0, high=1.0):
        """``n`` doubles uniform in [low, high); 53-bit resolution."""
        u01 = (self.u64(n) >> np.uint64(11)) * 2.0**-53
        return low + u01 * (high - low)

    def integers(self, n, bound):
        """``n`` integers uniform on {0, ..., bound-1}.

        Computed as floor(u01 * bound); the bias is below bound * 2^-53.
        """
        return np.minimum((self.uniform(n) * bound).astype(np.int64), bound - 1)

    def permutation(self, n):
        """Random permutation of range(n) via stable argsort of raw draws."""
        return np.argsort(self.u64(n), kind="stable")

    def spawn(self, index):
        """Independent generator for worker ``index`` (seed + index)."""
        return Rng((self.seed + int(index)) & _MASK64)


# ---------------------------------------------------------------------------
# finite differences

_ONE_SIDED_FIRST = np.array(
    [
        [-25.0, 48.0, -36.0, 16.0, -3.0],  # at the first sample
        [-3.0, -10.0, 18.0, -6.0, 1.0],  # at the second sample
    ]
) / 12.0


def _check_fd_args(field, cfg, boundary):
    if boundary != "periodic":
        raise InvalidInput(f"only periodic boundaries are supported, got {boundary!r}")
    n = np.asarray(field).shape[-1]
    if n < cfg.length:
        raise InvalidInput(f"need at least {cfg.length} samples, got {n}")


def fd_first_derivative(field, cfg: StencilConfig, boundary="periodic"):
    """First derivative along the last axis on a periodic grid.

    Uses the central stencil of the highest order that fits ``cfg.length``:
    4th order for length 5, 2nd order for length 3.
    """
    _check_fd_args(field, cfg, boundary)
    if cfg.length == 5:
        return backend.fd1_periodic(field, cfg.spacing)
    if cfg.length == 3:
        f = np.asarray(field, dtype=np.float64)
        return (np.roll(f, -1, axis=-1) - np.roll(f, 1, axis=-1)) / (2.0 * cfg.spacing)
    raise InvalidInput(f"no stencil of length {cfg.length} implemented")


def fd_second_derivative(field, cfg: StencilConfig, boundary="periodic"):
    """Second derivative along the last axis on a periodic grid (see above)."""
    _check_fd_args(field, cfg, boundary)
    if cfg.length == 5:
        return backend.fd2_periodic(field, cfg.spacing)
    if cfg.length == 3:
        f = np.asarray(field, dtype=np.float64)
        return (np.roll(f, -1, axis=-1) - 2.0 * f + np.roll(f, 1, axis=-1)) / cfg.spacing**2
    raise InvalidInput(f"no stencil of length {cfg.length} implemented")


def fd_time_derivative(snapshots, dt):
    """4th-order time derivative of equidistant snapshots (rows = times).

    Interior rows use the central 5-point stencil; the first two and last two
    rows use one-sided 5-point stencils of the same order, so every snapshot
    gets a derivative estimate.
    """
    h = np.asarray(snapshots, dtype=np.float64)
    if h.ndim != 2:
        raise InvalidInput(f"snapshots must be 2D (n_t, n_x), got shape {h.shape}")
    n_t = h.shape[0]
    if n_t < 5:
        raise InvalidInput(f"need at least 5 snapshots, got {n_t}")
    if not dt > 0:
        raise InvalidInput(f"dt must be > 0, got {dt}")

    out = np.empty_like(h)
    out[2:-2] = (h[:-4] - 8.0 * h[1:-3] + 8.0 * h[3:-1] - h[4:]) / 12.0
    for row, w in ((0, _ONE_SIDED_FIRST[0]), (1, _ONE_SIDED_FIRST[1])):
        out[row] = w @ h[:5]
    for row, w in ((-1, -_ONE_SIDED_FIRST[0][::-1]), (-2, -_ONE_SIDED_FIRST[1][::-1])):
        out[row] = w @ h[-5:]
    return out / dt


# ---------------------------------------------------------------------------
# adaptive Runge-Kutta integration

def rk45_integrate(rhs, y0, t_span, t_eval, cfg: OdeSolverConfig, on_state=None):
    """Integrate y' = rhs(t, y) with the Dormand-Prince embedded 4(5) pair.

    States at the requested ``t_eval`` points are interpolated from the
    accepted steps (dense output), so output times do not constrain the
    adaptive step size.

    Parameters
    ----------
    rhs : callable(t, y) -> dy/dt, deterministic and side-effect free.
    y0 : initial state vector.
    t_span : (t0, t1) with t1 > t0.
    t_eval : sorted times within [t0, t1].
    cfg : tolerances and step limits.
    on_state : optional callable(t, y) invoked per t_eval point in order;
        when given, states are streamed instead of stored and None is
        returned (keeps memory flat for large systems).

    Returns
    -------
    (len(t_eval), len(y0)) array, or None when ``on_state`` is given.

    Raises
    ------
    IntegrationFailure
        On step-size underflow or a non-finite state; carries the last time
        for which a valid state exists.
    """
    y0 = np.asarray(y0, dtype=np.float64)
    t0, t1 = t_span
    t_eval = np.asarray(t_eval, dtype=np.float64)
    if t_eval.size and (t_eval[0] < t0 or t_eval[-1] > t1 or np.any(np.diff(t_eval) < 0)):
        raise InvalidInput("t_eval must be sorted and lie within t_span")

    solver = RK45(
        rhs, t0, y0, t_bound=t1,
        rtol=cfg.rel_tol, atol=cfg.abs_tol,
        max_step=cfg.max_step, first_step=cfg.initial_step,
    )

    out = None if on_state is not None else np.empty((t_eval.size, y0.size))

    def emit(k, t, y):
        if not np.all(np.isfinite(y)):
            raise IntegrationFailure(f"non-finite state at t={t}", last_valid_time=t)
        if on_state is not None:
            on_state(t, y)
        else:
            out[k] = y

    k = 0
    while k < t_eval.size and t_eval[k] <= t0:
        emit(k, t_eval[k], y0)
        k += 1

    while solver.status == "running":
        solver.step()
        if solver.status == "failed":
            raise IntegrationFailure(
                f"step size underflow at t={solver.t}", last_valid_time=solver.t
            )
        if k < t_eval.size and t_eval[k] <= solver.t:
            dense = solver.dense_output()
            while k < t_eval.size and t_eval[k] <= solver.t:
                emit(k, t_eval[k], dense(t_eval[k]))
                k += 1

    if k < t_eval.size:
        raise IntegrationFailure(
            f"integration stopped at t={solver.t} before reaching t={t_eval[k]}",
            last_valid_time=solver.t,
        )
    return out


# ---------------------------------------------------------------------------
# tanh front fitting

#: Damped Gauss-Newton settings shared by both kernel backends.
TANH_FIT_MAX_ITER = 100
TANH_FIT_STEP_TOL = 1e-10


def has_sign_change(values):
    """True if ``values`` crosses zero (strictly, or touches it exactly)."""
    v = np.asarray(values)
    return bool((np.any(v > 0) and np.any(v < 0)) or np.any(v == 0))


def fit_tanh(y_grid, phi_column, init):
    """Least-squares fit of tanh(c*y - d) to one profile.

    Damped Gauss-Newton with Levenberg-style damping; converged when an
    accepted parameter update has norm < 1e-10, with a budget of 100 trial
    steps. The front position is d/c.

    Returns (c, d). Raises NoFrontCrossing for a profile without a zero
    crossing and FitDiverged (carrying the best parameters and residual) on
    non-convergence.
    """
    y = np.asarray(y_grid, dtype=np.float64)
    phi = np.asarray(phi_column, dtype=np.float64)
    if y.shape != phi.shape or y.ndim != 1:
        raise InvalidInput("y_grid and phi_column must be 1D with equal length")
    if not has_sign_change(phi):
        raise NoFrontCrossing("profile does not cross zero")

    c0, d0 = init
    c, d, converged, cost = backend.tanh_fit_batch(
        y, phi[:, None], np.array([float(c0)]), np.array([float(d0)]),
        TANH_FIT_MAX_ITER, TANH_FIT_STEP_TOL,
    )
    if not converged[0]:
        raise FitDiverged(
            "tanh fit did not converge", params=(c[0], d[0]), residual=cost[0]
        )
    return float(c[0]), float(d[0])
