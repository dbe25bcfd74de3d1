"""Supervised datasets from front trajectories and learned front PDEs.

Three surrogate kinds share one network architecture and differ in what the
network sees and what it must predict (everything in the lab frame):

  blackbox    dh/dt = NN(h, h_x, h_xx)
  additive    dh/dt = f_closure(h_x, h_xx) + NN(h, h_x, h_xx)
  functional  dh/dt = NN(g, g_x, g_xx),  g = f_closure(h_x, h_xx)

where f_closure is the lab-frame KPZ closure (kpz_lab_rhs). Targets are
finite-difference time derivatives of the extracted fronts; for the additive
kind the closure's prediction is subtracted so the network learns only the
correction.
"""

import struct
from dataclasses import dataclass

import numpy as np

from .analytic import kpz_lab_rhs
from .errors import EvaluationError, FormatError, InvalidInput
from .neuralnet import MlpModel, mlp_forward
from .numerics import (
    OdeSolverConfig,
    Rng,
    StencilConfig,
    fd_first_derivative,
    fd_second_derivative,
    fd_time_derivative,
    rk45_integrate,
)
from .phasefield import FrontProfile, FrontTrajectory

SURROGATE_KINDS = ("blackbox", "additive_graybox", "functional_graybox")

_FTAB_MAGIC = b"FTAB"
_CSV_HEADER = "h,h_x,h_xx,target,traj,ti,xi"


@dataclass
class FeatureTable:
    """Training rows: three input columns, a target, and provenance tags."""

    features: np.ndarray  # (n, 3)
    target: np.ndarray  # (n,)
    traj: np.ndarray  # (n,) u32 trajectory id
    ti: np.ndarray  # (n,) u32 time index
    xi: np.ndarray  # (n,) u32 x index
    kind: str

    def __post_init__(self):
        n = self.features.shape[0]
        if self.features.ndim != 2 or self.features.shape[1] != 3:
            raise InvalidInput("features must be (n, 3)")
        for col in (self.target, self.traj, self.ti, self.xi):
            if col.shape != (n,):
                raise InvalidInput("column lengths differ")
        if not (np.all(np.isfinite(self.features)) and np.all(np.isfinite(self.target))):
            raise InvalidInput("feature table contains non-finite values")
        if self.kind not in SURROGATE_KINDS:
            raise InvalidInput(f"unknown surrogate kind {self.kind!r}")

    def __len__(self):
        return self.features.shape[0]


@dataclass
class SurrogateSpec:
    """A trained (or constructed) learned front PDE."""

    kind: str
    model: MlpModel
    a: float
    D: float

    def __post_init__(self):
        if self.kind not in SURROGATE_KINDS:
            raise InvalidInput(f"unknown surrogate kind {self.kind!r}")


def _spatial_derivatives(profiles, dx):
    stencil = StencilConfig(spacing=dx)
    return fd_first_derivative(profiles, stencil), fd_second_derivative(profiles, stencil)


def assemble_features(trajectories, kind, a=None, D=None) -> FeatureTable:
    """Build the supervised dataset for one surrogate kind.

    Spatial derivatives use the length-5 periodic stencils, time derivatives
    the 4th-order snapshot stencils; one row per (trajectory, time, x). The
    gray-box kinds need the physical parameters (a, D) of the embedded
    closure.
    """
    trajectories = list(trajectories)
    if not trajectories:
        raise InvalidInput("need at least one trajectory")
    if kind not in SURROGATE_KINDS:
        raise InvalidInput(f"unknown surrogate kind {kind!r}")
    if kind != "blackbox" and (a is None or D is None):
        raise InvalidInput(f"kind {kind!r} needs the closure parameters a and D")

    n_x = trajectories[0].n_x
    dx = trajectories[0].dx
    feats, targets, tags = [], [], []
    for tid, traj in enumerate(trajectories):
        if traj.n_x != n_x or abs(traj.dx - dx) > 1e-12 * dx:
            raise InvalidInput(f"trajectory {tid} grid differs from the first one")
        h = traj.profiles
        h_x, h_xx = _spatial_derivatives(h, dx)
        h_t = fd_time_derivative(h, traj.dt)

        if kind == "blackbox":
            x_cols, y_col = (h, h_x, h_xx), h_t
        elif kind == "additive_graybox":
            x_cols = (h, h_x, h_xx)
            y_col = h_t - kpz_lab_rhs(h, h_x, h_xx, a, D)
        else:
            g = kpz_lab_rhs(h, h_x, h_xx, a, D)
            g_x, g_xx = _spatial_derivatives(g, dx)
            x_cols, y_col = (g, g_x, g_xx), h_t

        n_t = h.shape[0]
        feats.append(np.stack([c.ravel() for c in x_cols], axis=1))
        targets.append(y_col.ravel())
        ti, xi = np.divmod(np.arange(n_t * n_x, dtype=np.uint32), np.uint32(n_x))
        tags.append((np.full(n_t * n_x, tid, dtype=np.uint32), ti, xi))

    return FeatureTable(
        features=np.concatenate(feats),
        target=np.concatenate(targets),
        traj=np.concatenate([t[0] for t in tags]),
        ti=np.concatenate([t[1] for t in tags]),
        xi=np.concatenate([t[2] for t in tags]),
        kind=kind,
    )


def subsample_table(table: FeatureTable, n_rows, rng: Rng) -> FeatureTable:
    """Uniform random subset of rows (without replacement), for quick runs."""
    if n_rows >= len(table):
        return table
    keep = rng.permutation(len(table))[:n_rows]
    keep.sort()
    return FeatureTable(table.features[keep], table.target[keep],
                        table.traj[keep], table.ti[keep], table.xi[keep], table.kind)


# ---------------------------------------------------------------------------
# learned right-hand sides

def _rhs_values(spec: SurrogateSpec, h, dx):
    h_x, h_xx = _spatial_derivatives(h, dx)
    if spec.kind == "blackbox":
        feats = np.stack([h, h_x, h_xx], axis=1)
        return mlp_forward(spec.model, feats)[:, 0]
    if spec.kind == "additive_graybox":
        closure = kpz_lab_rhs(h, h_x, h_xx, spec.a, spec.D)
        feats = np.stack([h, h_x, h_xx], axis=1)
        return closure + mlp_forward(spec.model, feats)[:, 0]
    g = kpz_lab_rhs(h, h_x, h_xx, spec.a, spec.D)
    g_x, g_xx = _spatial_derivatives(g, dx)
    feats = np.stack([g, g_x, g_xx], axis=1)
    return mlp_forward(spec.model, feats)[:, 0]


def surrogate_rhs(spec: SurrogateSpec, h) -> np.ndarray:
    """Lab-frame dh/dt predicted by a surrogate for one front profile."""
    if not isinstance(h, FrontProfile):
        raise InvalidInput("surrogate_rhs expects a FrontProfile")
    out = _rhs_values(spec, h.h, h.dx)
    bad = ~np.isfinite(out)
    if bad.any():
        idx = int(np.flatnonzero(bad)[0])
        raise EvaluationError(f"non-finite surrogate output at x index {idx}", index=idx)
    return out


def integrate_surrogate(spec: SurrogateSpec, h0: FrontProfile, T, n_save,
                        solver_cfg: OdeSolverConfig | None = None) -> FrontTrajectory:
    """Method-of-lines integration of a learned front PDE, periodic in x.

    Learned dynamics carry no stability guarantee away from the training
    distribution; blow-ups surface as IntegrationFailure with the last valid
    time rather than as a crash.
    """
    solver_cfg = solver_cfg or OdeSolverConfig()
    times = np.linspace(0.0, T, n_save)

    def rhs(t, h):
        return _rhs_values(spec, h, h0.dx)

    states = rk45_integrate(rhs, h0.h, (0.0, T), times, solver_cfg)
    return FrontTrajectory(times, states, h0.dx * h0.h.size)


# ---------------------------------------------------------------------------
# feature table export

def write_feature_table(path, table: FeatureTable):
    """Columnar binary dump.

    Layout (little-endian): magic 'FTAB', u64 row count, then four f64
    columns (h, h_x, h_xx, target) and three u32 provenance columns
    (traj, ti, xi), each written contiguously.
    """
    with open(path, "wb") as fh:
        fh.write(_FTAB_MAGIC)
        fh.write(struct.pack("<Q", len(table)))
        for col in range(3):
            fh.write(np.ascontiguousarray(table.features[:, col]).astype("<f8").tobytes())
        fh.write(table.target.astype("<f8").tobytes())
        for col in (table.traj, table.ti, table.xi):
            fh.write(col.astype("<u4").tobytes())


def read_feature_table(path, kind="blackbox") -> FeatureTable:
    """Read a columnar dump written by :func:`write_feature_table`."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != _FTAB_MAGIC:
        raise FormatError(f"bad magic {data[:4]!r}, expected {_FTAB_MAGIC!r}")
    if len(data) < 12:
        raise FormatError("truncated feature table header")
    (n,) = struct.unpack_from("<Q", data, 4)
    expect = 12 + n * (4 * 8 + 3 * 4)
    if len(data) != expect:
        raise FormatError(f"feature table should be {expect} bytes, got {len(data)}")
    off = 12
    cols = []
    for _ in range(4):
        cols.append(np.frombuffer(data, dtype="<f8", count=n, offset=off).copy())
        off += 8 * n
    tags = []
    for _ in range(3):
        tags.append(np.frombuffer(data, dtype="<u4", count=n, offset=off).copy())
        off += 4 * n
    return FeatureTable(np.stack(cols[:3], axis=1), cols[3], *tags, kind=kind)


def write_feature_csv(path, table: FeatureTable):
    """Text export, header ``h,h_x,h_xx,target,traj,ti,xi``, '.' decimals."""
    with open(path, "w", newline="\n") as fh:
        fh.write(_CSV_HEADER + "\n")
        for k in range(len(table)):
            f0, f1, f2 = table.features[k]
            fh.write(f"{f0:.17g},{f1:.17g},{f2:.17g},{table.target[k]:.17g},"
                     f"{table.traj[k]},{table.ti[k]},{table.xi[k]}\n")
