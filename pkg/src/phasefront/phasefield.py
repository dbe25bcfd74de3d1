"""2D reaction-diffusion ground truth and front handling.

The simulated system is a scalar field on a rectangular grid, periodic in x
and zero-flux in y, evolving under

    d(phi)/dt = D * lap(phi) - (phi - a) * (phi^2 - 1)

Front profiles h(x) are the zero crossings of phi along y, obtained per
column by fitting tanh(c*y - d) and taking h = d/c. Profiles are lifted back
to 2D fields as phi = tanh((h - y) / sqrt(2 D)).
"""

import struct
from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import (
    ExtractionFailure,
    FormatError,
    FrontTooCloseToBoundary,
    InvalidInput,
)
from .numerics import (
    TANH_FIT_MAX_ITER,
    TANH_FIT_STEP_TOL,
    OdeSolverConfig,
    Rng,
    rk45_integrate,
)

#: Number of sine modes superposed in a random initial front.
N_RANDOM_MODES = 4
#: Largest wavenumber index: k is drawn from 2*pi/L * {0, ..., 32}.
MAX_MODE_INDEX = 32
#: Vertical offset of random fronts is uniform on this interval.
OFFSET_RANGE = (10.0, 20.0)

_PF2D_MAGIC = b"PF2D"


@dataclass(frozen=True)
class PhaseFieldParams:
    """Physical and discretization parameters of the 2D simulation."""

    a: float = -0.1
    D: float = 0.1
    L: float = 90.0
    n_x: int = 400
    n_y: int = 400
    T: float = 25.0
    n_save: int = 500

    def __post_init__(self):
        if not abs(self.a) < 1:
            raise InvalidInput(f"|a| must be < 1, got {self.a}")
        if not (self.D > 0 and self.L > 0 and self.T > 0):
            raise InvalidInput("D, L and T must be > 0")
        if self.n_x < 16 or self.n_y < 16:
            raise InvalidInput("n_x and n_y must be >= 16")
        if self.n_save < 5:
            raise InvalidInput("n_save must be >= 5")

    @property
    def dx(self):
        return self.L / self.n_x

    @property
    def dy(self):
        # y nodes include both zero-flux walls
        return self.L / (self.n_y - 1)

    @property
    def interface_width(self):
        return np.sqrt(2.0 * self.D)

    def x_grid(self):
        return np.arange(self.n_x) * self.dx

    def y_grid(self):
        return np.linspace(0.0, self.L, self.n_y)

    def save_times(self):
        return np.linspace(0.0, self.T, self.n_save)


@dataclass
class PhaseField2D:
    """Scalar field sampled at grid nodes, row index = y, column index = x."""

    values: np.ndarray
    params: PhaseFieldParams | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise InvalidInput(f"field must be 2D, got shape {self.values.shape}")
        if self.params is not None and self.values.shape != (self.params.n_y, self.params.n_x):
            raise InvalidInput(
                f"field shape {self.values.shape} does not match params "
                f"({self.params.n_y}, {self.params.n_x})"
            )


@dataclass
class FrontProfile:
    """Front height at n_x equispaced x positions on a periodic domain."""

    h: np.ndarray
    dx: float

    def __post_init__(self):
        self.h = np.asarray(self.h, dtype=np.float64)
        if self.h.ndim != 1:
            raise InvalidInput("front profile must be 1D")
        if not np.all(np.isfinite(self.h)):
            raise InvalidInput("front profile contains non-finite values")
        if not self.dx > 0:
            raise InvalidInput("dx must be > 0")


@dataclass
class FrontTrajectory:
    """Front profiles at equidistant times; rows of ``profiles`` are times."""

    times: np.ndarray
    profiles: np.ndarray
    L: float

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        self.profiles = np.asarray(self.profiles, dtype=np.float64)
        if self.times.ndim != 1 or self.profiles.ndim != 2:
            raise InvalidInput("times must be 1D and profiles 2D")
        if self.times.size != self.profiles.shape[0]:
            raise InvalidInput("times and profiles row count differ")
        if self.times.size < 2:
            raise InvalidInput("a trajectory needs at least 2 snapshots")
        steps = np.diff(self.times)
        if np.any(steps <= 0):
            raise InvalidInput("times must be strictly increasing")
        dt = steps[0]
        if np.any(np.abs(steps - dt) > 1e-12 * max(abs(self.times[-1]), 1.0)):
            raise InvalidInput("times must be equidistant")

    @property
    def dt(self):
        return float(self.times[1] - self.times[0])

    @property
    def n_x(self):
        return self.profiles.shape[1]

    @property
    def dx(self):
        return self.L / self.n_x

    def profile(self, i):
        return FrontProfile(self.profiles[i].copy(), self.dx)


# ---------------------------------------------------------------------------
# dynamics

def allen_cahn_rhs(phi: PhaseField2D) -> np.ndarray:
    """Time derivative of the field under the reaction-diffusion law.

    The Laplacian is the 5-point second-order stencil, periodic in x and
    zero-flux in y (mirror ghost rows), which defines the ground-truth
    discretization.
    """
    if phi.params is None:
        raise InvalidInput("allen_cahn_rhs needs a field with params attached")
    p = phi.params
    return backend.allen_cahn_rhs_core(phi.values, p.a, p.D, p.dx, p.dy)


def _require_valid_initial(values):
    if not np.all(np.isfinite(values)):
        raise InvalidInput("initial field contains non-finite values")
    if values.min() < -1.1 or values.max() > 1.1:
        raise InvalidInput("initial field must lie within [-1.1, 1.1]")


def simulate_phase_field(phi0: PhaseField2D, params: PhaseFieldParams,
                         solver_cfg: OdeSolverConfig | None = None):
    """Integrate the field forward and return ``n_save`` snapshots.

    Snapshots are taken at equidistant times in [0, T], including both ends.
    """
    _require_valid_initial(phi0.values)
    solver_cfg = solver_cfg or OdeSolverConfig()
    shape = (params.n_y, params.n_x)
    if phi0.values.shape != shape:
        raise InvalidInput(f"initial field shape {phi0.values.shape} != {shape}")

    def rhs(t, y):
        return backend.allen_cahn_rhs_core(
            y.reshape(shape), params.a, params.D, params.dx, params.dy
        ).ravel()

    snapshots = []

    def keep(t, y):
        snapshots.append(PhaseField2D(y.reshape(shape).copy(), params))

    rk45_integrate(rhs, phi0.values.ravel(), (0.0, params.T), params.save_times(),
                   solver_cfg, on_state=keep)
    return snapshots


def simulate_front_trajectory(phi0: PhaseField2D, params: PhaseFieldParams,
                              solver_cfg: OdeSolverConfig | None = None) -> FrontTrajectory:
    """Integrate the field and extract the front at every save time.

    Streams snapshot by snapshot so memory stays flat regardless of n_save;
    the 2D fields are discarded once their front is extracted.
    """
    _require_valid_initial(phi0.values)
    solver_cfg = solver_cfg or OdeSolverConfig()
    shape = (params.n_y, params.n_x)
    y_grid = params.y_grid()

    def rhs(t, y):
        return backend.allen_cahn_rhs_core(
            y.reshape(shape), params.a, params.D, params.dx, params.dy
        ).ravel()

    rows = []

    def keep(t, y):
        front = _extract_front_values(y.reshape(shape), y_grid, params.D)
        rows.append(front)

    rk45_integrate(rhs, phi0.values.ravel(), (0.0, params.T), params.save_times(),
                   solver_cfg, on_state=keep)
    return FrontTrajectory(params.save_times(), np.vstack(rows), params.L)


# ---------------------------------------------------------------------------
# lifting and extraction

def lift_front(h, y_grid, D, params: PhaseFieldParams | None = None) -> PhaseField2D:
    """Lift a front profile to a 2D field, phi = tanh((h - y) / sqrt(2 D)).

    The profile must stay at least 5 interface widths away from both y
    boundaries so the tanh tails are negligible at the zero-flux walls.
    """
    h = h.h if isinstance(h, FrontProfile) else np.asarray(h, dtype=np.float64)
    y = np.asarray(y_grid, dtype=np.float64)
    width = np.sqrt(2.0 * D)
    margin = 5.0 * width
    if h.min() < y[0] + margin or h.max() > y[-1] - margin:
        raise FrontTooCloseToBoundary(
            f"front must stay within [{y[0] + margin:.3g}, {y[-1] - margin:.3g}]"
        )
    values = np.tanh((h[None, :] - y[:, None]) / width)
    return PhaseField2D(values, params)


def _tanh_fit_init(values, y_grid, D):
    """Per-column start values for the tanh fit.

    c0 has magnitude 1/sqrt(2 D) (the analytic interface width) and the sign
    of the crossing direction; d0 = c0 * y* with y* the first grid point at
    or past the sign change. Starts within the basin of attraction for all
    simulated fronts.
    """
    sign = np.sign(values)
    flip = sign[:-1] * sign[1:] < 0
    hit_zero = sign == 0
    crossing = flip.any(axis=0) | hit_zero.any(axis=0)
    if not crossing.all():
        bad = int(np.flatnonzero(~crossing)[0])
        raise ExtractionFailure(f"column {bad} has no zero crossing", column=bad)

    idx = np.where(flip.any(axis=0), flip.argmax(axis=0) + 1, hit_zero.argmax(axis=0))
    decreasing = values[0] > values[-1]
    c0 = np.where(decreasing, -1.0, 1.0) / np.sqrt(2.0 * D)
    d0 = c0 * y_grid[idx]
    return c0, d0


def _extract_front_values(values, y_grid, D):
    c0, d0 = _tanh_fit_init(values, y_grid, D)
    c, d, converged, _ = backend.tanh_fit_batch(
        y_grid, values, c0, d0, TANH_FIT_MAX_ITER, TANH_FIT_STEP_TOL
    )
    if not converged.all():
        bad = int(np.flatnonzero(~converged)[0])
        raise ExtractionFailure(f"tanh fit did not converge in column {bad}", column=bad)
    return d / c


def extract_front(phi: PhaseField2D, y_grid=None, D=None, dx=None) -> FrontProfile:
    """Front position per column from tanh fits; h(x) = d/c.

    Grid and parameters default to ``phi.params``. Raises ExtractionFailure
    (with column index) if any column lacks a zero crossing or its fit does
    not converge.
    """
    if phi.params is not None:
        y_grid = phi.params.y_grid() if y_grid is None else np.asarray(y_grid)
        D = phi.params.D if D is None else D
        dx = phi.params.dx if dx is None else dx
    if y_grid is None or D is None or dx is None:
        raise InvalidInput("extract_front needs params or explicit y_grid, D and dx")
    h = _extract_front_values(phi.values, np.asarray(y_grid, dtype=np.float64), D)
    return FrontProfile(h, dx)


def random_front(rng: Rng, L, n_x) -> FrontProfile:
    """Random periodic initial front.

    Superposition of four sine modes: amplitudes uniform on [0, 1],
    wavenumbers 2*pi/L * m with m uniform on {0, ..., 32} (drawn with
    replacement), phases uniform on [0, 2*pi), plus an offset uniform on
    [10, 20]. Draw order: amplitudes, mode indices, phases, offset.
    """
    amps = rng.uniform(N_RANDOM_MODES)
    modes = rng.integers(N_RANDOM_MODES, MAX_MODE_INDEX + 1)
    phases = rng.uniform(N_RANDOM_MODES, 0.0, 2.0 * np.pi)
    offset = rng.uniform(1, *OFFSET_RANGE)[0]

    x = np.arange(n_x) * (L / n_x)
    h = np.full(n_x, offset)
    for amp, m, theta in zip(amps, modes, phases):
        h += amp * np.sin(2.0 * np.pi * m / L * x + theta)
    return FrontProfile(h, L / n_x)


# ---------------------------------------------------------------------------
# snapshot dump format (debug aid)

def write_phase_field(path, phi: PhaseField2D, time=0.0):
    """Dump one snapshot: magic 'PF2D', u32 n_y, u32 n_x, f64 time, then
    n_y*n_x little-endian f64 values row-major."""
    n_y, n_x = phi.values.shape
    with open(path, "wb") as fh:
        fh.write(_PF2D_MAGIC)
        fh.write(struct.pack("<IId", n_y, n_x, float(time)))
        fh.write(phi.values.astype("<f8").tobytes())


def read_phase_field(path):
    """Read a snapshot dump; returns (PhaseField2D without params, time)."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _PF2D_MAGIC:
            raise FormatError(f"bad magic {magic!r}, expected {_PF2D_MAGIC!r}")
        header = fh.read(16)
        if len(header) != 16:
            raise FormatError("truncated snapshot header")
        n_y, n_x, time = struct.unpack("<IId", header)
        payload = fh.read(8 * n_y * n_x)
        if len(payload) != 8 * n_y * n_x:
            raise FormatError("truncated snapshot payload")
        values = np.frombuffer(payload, dtype="<f8").reshape(n_y, n_x)
    return PhaseField2D(values.copy()), time
