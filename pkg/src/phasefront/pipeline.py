"""Dataset generation, training and evaluation runs, and their file formats.

A dataset directory holds ``dataset.cfg`` (key = value metadata), numbered
``train_*.ftrj`` trajectories and one held-out ``test.ftrj``. Evaluation
writes, per model, a full-precision absolute-error matrix (.ftrj container),
an 8-bit heatmap (.pgm) and a mean-error CSV, plus a combined ``summary.csv``
with one row per saved time per model.
"""

import logging
import struct
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .analytic import integrate_analytic_front
from .config import TEST_SEED_OFFSET, ExperimentConfig, build_config, dump_config, parse_config_file
from .errors import ExtractionFailure, FormatError, IntegrationFailure, InvalidInput, PhasefrontError
from .evaluation import compute_error, export_pgm
from .neuralnet import load_model, save_model, train
from .numerics import OdeSolverConfig, Rng
from .phasefield import (
    FrontProfile,
    FrontTrajectory,
    lift_front,
    random_front,
    simulate_front_trajectory,
)
from .surrogate import SurrogateSpec, assemble_features, integrate_surrogate, subsample_table

log = logging.getLogger("phasefront")

_FTRJ_MAGIC = b"FTRJ"

#: CLI model names -> internal surrogate kinds.
KIND_ALIASES = {
    "blackbox": "blackbox",
    "additive": "additive_graybox",
    "functional": "functional_graybox",
}
#: Canonical ordering of models in evaluation outputs.
MODEL_ORDER = ("eikonal", "kpz", "blackbox", "additive", "functional")


def resolve_kind(name):
    if name not in KIND_ALIASES:
        raise InvalidInput(f"unknown model kind {name!r}; expected one of {tuple(KIND_ALIASES)}")
    return KIND_ALIASES[name]


# ---------------------------------------------------------------------------
# trajectory files

def write_front_trajectory(path, traj: FrontTrajectory):
    """Layout (little-endian): magic 'FTRJ', u32 n_t, u32 n_x, f64 L,
    f64 t0, f64 dt, then n_t*n_x f64 heights row-major."""
    n_t, n_x = traj.profiles.shape
    with open(path, "wb") as fh:
        fh.write(_FTRJ_MAGIC)
        fh.write(struct.pack("<IIddd", n_t, n_x, traj.L, traj.times[0], traj.dt))
        fh.write(traj.profiles.astype("<f8").tobytes())


def read_front_trajectory(path) -> FrontTrajectory:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != _FTRJ_MAGIC:
        raise FormatError(f"bad magic {data[:4]!r}, expected {_FTRJ_MAGIC!r}")
    if len(data) < 4 + 32:
        raise FormatError("truncated trajectory header")
    n_t, n_x, L, t0, dt = struct.unpack_from("<IIddd", data, 4)
    expect = 36 + 8 * n_t * n_x
    if len(data) != expect:
        raise FormatError(f"trajectory should be {expect} bytes, got {len(data)}")
    profiles = np.frombuffer(data, dtype="<f8", count=n_t * n_x, offset=36)
    times = t0 + dt * np.arange(n_t)
    return FrontTrajectory(times, profiles.reshape(n_t, n_x).copy(), L)


# ---------------------------------------------------------------------------
# generate

def _generate_one(cfg: ExperimentConfig, seed_index, path):
    rng = Rng(cfg.master_seed).spawn(seed_index)
    params = cfg.phase
    h0 = random_front(rng, params.L, params.n_x)
    phi0 = lift_front(h0, params.y_grid(), params.D, params)
    traj = simulate_front_trajectory(phi0, params)
    write_front_trajectory(path, traj)
    return path


def run_generate(cfg: ExperimentConfig, dataset_dir) -> Path:
    """Simulate n_train + 1 random fronts and write their trajectories.

    Training trajectories use worker seeds 0..n_train-1; the held-out test
    trajectory uses a fixed large seed offset so it never collides with the
    training range. An ExtractionFailure aborts only the affected trajectory
    (its seed is logged); a failed test trajectory is fatal.
    """
    dataset_dir = Path(dataset_dir)
    dataset_dir.mkdir(parents=True, exist_ok=True)
    (dataset_dir / "dataset.cfg").write_text(dump_config(cfg))

    tasks = [(i, dataset_dir / f"train_{i:03d}.ftrj") for i in range(cfg.n_train)]
    tasks.append((TEST_SEED_OFFSET, dataset_dir / "test.ftrj"))

    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futures = {pool.submit(_generate_one, cfg, idx, path): (idx, path)
                       for idx, path in tasks}
            for future, (idx, path) in futures.items():
                _finish_generate(future.result, idx, path)
    else:
        for idx, path in tasks:
            _finish_generate(lambda idx=idx, path=path: _generate_one(cfg, idx, path), idx, path)

    if not (dataset_dir / "test.ftrj").exists():
        raise IntegrationFailure("test trajectory generation failed")
    log.info("dataset written to %s", dataset_dir)
    return dataset_dir


def _finish_generate(produce, seed_index, path):
    try:
        produce()
    except ExtractionFailure as exc:
        if path.name == "test.ftrj":
            raise
        log.error("trajectory with seed index %d aborted: %s", seed_index, exc)


def load_dataset(dataset_dir):
    """Returns (config, list of training trajectories, test trajectory)."""
    dataset_dir = Path(dataset_dir)
    cfg_path = dataset_dir / "dataset.cfg"
    if not cfg_path.exists():
        raise InvalidInput(f"{dataset_dir} has no dataset.cfg")
    cfg = build_config(parse_config_file(cfg_path))
    trains = [read_front_trajectory(p) for p in sorted(dataset_dir.glob("train_*.ftrj"))]
    test = read_front_trajectory(dataset_dir / "test.ftrj")
    return cfg, trains, test


# ---------------------------------------------------------------------------
# train

def run_train(dataset_dir, kind_name, cfg: ExperimentConfig | None, models_dir) -> Path:
    """Assemble features of the requested kind and train one surrogate.

    Training uses only the train_* trajectories. Writes ``<kind>.mlp1`` and
    ``<kind>_history.csv`` (epoch, train MSE, validation MSE) and returns the
    model path.
    """
    kind = resolve_kind(kind_name)
    data_cfg, trains, _ = load_dataset(dataset_dir)
    cfg = cfg or data_cfg
    if not trains:
        raise InvalidInput(f"{dataset_dir} has no training trajectories")

    params = data_cfg.phase
    table = assemble_features(trains, kind, a=params.a, D=params.D)
    if cfg.subsample is not None:
        table = subsample_table(table, cfg.subsample, Rng(cfg.master_seed).spawn(2 * TEST_SEED_OFFSET))
        log.info("subsampled feature table to %d rows", len(table))

    log.info("training %s on %d rows", kind_name, len(table))
    model, history = train(table.features, table.target, cfg.train)

    models_dir = Path(models_dir)
    models_dir.mkdir(parents=True, exist_ok=True)
    model_path = models_dir / f"{kind_name}.mlp1"
    save_model(model_path, model)
    with open(models_dir / f"{kind_name}_history.csv", "w", newline="\n") as fh:
        fh.write("epoch,train_mse,val_mse\n")
        for epoch, (tr, va) in enumerate(zip(history["train_mse"], history["val_mse"])):
            fh.write(f"{epoch},{tr:.17g},{va:.17g}\n")
    log.info("model written to %s (final val MSE %.3e)", model_path, history["val_mse"][-1])
    return model_path


# ---------------------------------------------------------------------------
# evaluate

def _predict(label, model_paths, truth, params, solver_cfg):
    h0 = FrontProfile(truth.profiles[0].copy(), truth.dx)
    T, n_save = float(truth.times[-1]), truth.times.size
    if label in ("eikonal", "kpz"):
        return integrate_analytic_front(label, h0, T, n_save, solver_cfg,
                                        a=params.a, D=params.D)
    spec = SurrogateSpec(resolve_kind(label), load_model(model_paths[label]),
                         a=params.a, D=params.D)
    return integrate_surrogate(spec, h0, T, n_save, solver_cfg)


def run_evaluate(dataset_dir, model_paths, out_dir,
                 solver_cfg: OdeSolverConfig | None = None):
    """Integrate every model from the test front and report errors.

    ``model_paths`` maps CLI kind names to .mlp1 files; the analytic models
    are always evaluated. A model whose integration fails is logged and
    skipped without aborting the others. Returns (reports, failures).
    """
    data_cfg, _, truth = load_dataset(dataset_dir)
    params = data_cfg.phase
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    labels = [m for m in MODEL_ORDER if m in ("eikonal", "kpz") or m in model_paths]
    reports, failures = {}, {}
    for label in labels:
        try:
            pred = _predict(label, model_paths, truth, params, solver_cfg)
        except (IntegrationFailure, PhasefrontError) as exc:
            log.error("model %s failed: %s", label, exc)
            failures[label] = str(exc)
            continue
        reports[label] = compute_error(pred, truth, label)
        log.info("model %-10s time-mean abs error %.4e", label, reports[label].time_mean)

    scale = max((r.abs_error.max() for r in reports.values()), default=0.0)
    scale = scale if scale > 0 else 1.0
    for label, report in reports.items():
        err_traj = FrontTrajectory(truth.times, report.abs_error, truth.L)
        write_front_trajectory(out_dir / f"{label}_abs_error.ftrj", err_traj)
        export_pgm(report.abs_error, out_dir / f"{label}_error.pgm", scale)
        with open(out_dir / f"{label}_mean_error.csv", "w", newline="\n") as fh:
            fh.write("time,mean_abs_error\n")
            for t, e in zip(truth.times, report.mean_over_x):
                fh.write(f"{t:.17g},{e:.17g}\n")

    with open(out_dir / "summary.csv", "w", newline="\n") as fh:
        fh.write("time,model,mean_abs_error\n")
        for label in labels:
            if label not in reports:
                continue
            for t, e in zip(truth.times, reports[label].mean_over_x):
                fh.write(f"{t:.17g},{label},{e:.17g}\n")

    if failures:
        with open(out_dir / "failures.csv", "w", newline="\n") as fh:
            fh.write("model,error\n")
            for label in labels:
                if label in failures:
                    fh.write(f"{label},{failures[label]}\n")

    return reports, failures


# ---------------------------------------------------------------------------
# full pipeline

def run_pipeline(cfg: ExperimentConfig, kinds=("blackbox", "additive", "functional")):
    """generate -> train all requested kinds -> evaluate; returns reports."""
    out = Path(cfg.out_dir)
    dataset_dir = run_generate(cfg, out / "dataset")
    model_paths = {}
    for kind_name in kinds:
        model_paths[kind_name] = run_train(dataset_dir, kind_name, cfg, out / "models")
    return run_evaluate(dataset_dir, model_paths, out / "eval")
