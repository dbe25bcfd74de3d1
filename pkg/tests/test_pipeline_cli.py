import numpy as np
import pytest

from phasefront.cli import main
from phasefront.config import build_config
from phasefront.errors import FormatError
from phasefront.neuralnet import save_model, zero_model
from phasefront.phasefield import FrontTrajectory
from phasefront.pipeline import (
    read_front_trajectory,
    run_evaluate,
    run_generate,
    run_train,
    write_front_trajectory,
)

TINY = {
    "scale": "ci",
    "n_x": "16",
    "n_y": "48",
    "T": "2.0",
    "n_save": "6",
    "n_train": "1",
    "epochs": "2",
    "batch_size": "64",
    "seed": "7",
}


def tiny_cfg(**extra):
    values = dict(TINY)
    values.update({k: str(v) for k, v in extra.items()})
    return build_config(values)


def write_tiny_cfg(path, **extra):
    values = dict(TINY)
    values.update({k: str(v) for k, v in extra.items()})
    path.write_text("".join(f"{k} = {v}\n" for k, v in values.items()))
    return path


@pytest.fixture(scope="module")
def tiny_dataset(tmp_path_factory):
    dataset = tmp_path_factory.mktemp("data") / "dataset"
    run_generate(tiny_cfg(), dataset)
    return dataset


# ---------------------------------------------------------------------------
# trajectory file format


def test_trajectory_round_trip(tmp_path):
    traj = FrontTrajectory(0.5 + 0.25 * np.arange(6), np.random.default_rng(1).normal(15, 1, (6, 16)), 90.0)
    path = tmp_path / "t.ftrj"
    write_front_trajectory(path, traj)
    loaded = read_front_trajectory(path)
    assert np.array_equal(loaded.profiles, traj.profiles)
    assert np.allclose(loaded.times, traj.times, rtol=0, atol=1e-15)
    assert loaded.L == traj.L


def test_trajectory_bad_magic(tmp_path):
    path = tmp_path / "bad.ftrj"
    path.write_bytes(b"JRTF" + b"\x00" * 64)
    with pytest.raises(FormatError):
        read_front_trajectory(path)


def test_trajectory_truncation(tmp_path):
    traj = FrontTrajectory(0.25 * np.arange(6), np.zeros((6, 16)), 90.0)
    path = tmp_path / "t.ftrj"
    write_front_trajectory(path, traj)
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(FormatError):
        read_front_trajectory(path)


# ---------------------------------------------------------------------------
# pipeline stages


def test_generate_writes_expected_files(tiny_dataset):
    names = sorted(p.name for p in tiny_dataset.iterdir())
    assert names == ["dataset.cfg", "test.ftrj", "train_000.ftrj"]
    traj = read_front_trajectory(tiny_dataset / "test.ftrj")
    assert traj.profiles.shape == (6, 16)
    assert 6.0 <= traj.profiles[0].min() and traj.profiles[0].max() <= 24.0


def test_generate_is_deterministic(tiny_dataset, tmp_path):
    again = tmp_path / "again"
    run_generate(tiny_cfg(), again)
    for name in ("train_000.ftrj", "test.ftrj", "dataset.cfg"):
        assert (again / name).read_bytes() == (tiny_dataset / name).read_bytes()


def test_generate_parallel_matches_serial(tiny_dataset, tmp_path):
    parallel = tmp_path / "parallel"
    run_generate(tiny_cfg(workers=2), parallel)
    for name in ("train_000.ftrj", "test.ftrj"):
        assert (parallel / name).read_bytes() == (tiny_dataset / name).read_bytes()


def test_train_writes_model_and_history(tiny_dataset, tmp_path):
    models = tmp_path / "models"
    path = run_train(tiny_dataset, "blackbox", tiny_cfg(), models)
    assert path.exists()
    lines = (models / "blackbox_history.csv").read_text().splitlines()
    assert lines[0] == "epoch,train_mse,val_mse"
    assert len(lines) == 3  # header + 2 epochs


def test_evaluate_outputs_and_mean_recomputability(tiny_dataset, tmp_path):
    models = tmp_path / "models"
    models.mkdir()
    paths = {}
    for kind in ("blackbox", "additive", "functional"):
        p = models / f"{kind}.mlp1"
        save_model(p, zero_model())
        paths[kind] = p

    out = tmp_path / "eval"
    reports, failures = run_evaluate(tiny_dataset, paths, out)
    assert failures == {}
    assert sorted(reports) == ["additive", "blackbox", "eikonal", "functional", "kpz"]

    lines = (out / "summary.csv").read_text().splitlines()
    assert lines[0] == "time,model,mean_abs_error"
    assert len(lines) == 1 + 5 * 6  # five models, six saved times

    for label, report in reports.items():
        stored = read_front_trajectory(out / f"{label}_abs_error.ftrj")
        assert np.array_equal(stored.profiles, report.abs_error)
        means = np.array([float(l.split(",")[1])
                          for l in (out / f"{label}_mean_error.csv").read_text().splitlines()[1:]])
        assert np.abs(stored.profiles.mean(axis=1) - means).max() <= 1e-12
        assert (out / f"{label}_error.pgm").exists()

    # zero-network blackbox is stationary, so its error matches persistence
    truth = read_front_trajectory(tiny_dataset / "test.ftrj")
    persistence = np.abs(truth.profiles - truth.profiles[0])
    assert np.allclose(reports["blackbox"].abs_error, persistence, atol=1e-12)


# ---------------------------------------------------------------------------
# command-line interface


def test_cli_generate_and_determinism(tmp_path):
    cfg_path = write_tiny_cfg(tmp_path / "run.cfg")
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["generate", "--config", str(cfg_path), "--out", str(out_a)]) == 0
    assert main(["generate", "--config", str(cfg_path), "--out", str(out_b)]) == 0
    assert (out_a / "test.ftrj").read_bytes() == (out_b / "test.ftrj").read_bytes()


def test_cli_full_flow(tmp_path, tiny_dataset):
    cfg_path = write_tiny_cfg(tmp_path / "run.cfg")
    models = tmp_path / "models"
    code = main(["train", "--config", str(cfg_path), "--data", str(tiny_dataset),
                 "--kind", "blackbox", "--out", str(models)])
    assert code == 0

    out = tmp_path / "eval"
    code = main(["evaluate", "--config", str(cfg_path), "--data", str(tiny_dataset),
                 "--model", f"blackbox={models / 'blackbox.mlp1'}", "--out", str(out)])
    assert code == 0
    summary = (out / "summary.csv").read_text().splitlines()
    models_seen = {line.split(",")[1] for line in summary[1:]}
    assert {"eikonal", "kpz"} <= models_seen


def test_cli_rejects_unknown_config_key(tmp_path):
    cfg_path = tmp_path / "bad.cfg"
    cfg_path.write_text("resolution = 400\n")
    assert main(["generate", "--config", str(cfg_path), "--out", str(tmp_path / "x")]) == 2


def test_cli_rejects_bad_model_argument(tmp_path, tiny_dataset):
    assert main(["evaluate", "--data", str(tiny_dataset),
                 "--model", "blackbox", "--out", str(tmp_path / "x")]) == 2


def test_cli_missing_dataset_is_config_error(tmp_path):
    assert main(["train", "--data", str(tmp_path / "nowhere"), "--kind", "blackbox",
                 "--out", str(tmp_path / "m")]) == 2


def test_cli_training_divergence_exit_code(tmp_path, tiny_dataset):
    cfg_path = write_tiny_cfg(tmp_path / "diverge.cfg", learning_rate="1e200", epochs="3")
    with np.errstate(over="ignore", invalid="ignore"):
        code = main(["train", "--config", str(cfg_path), "--data", str(tiny_dataset),
                     "--kind", "blackbox", "--out", str(tmp_path / "m")])
    assert code == 3


def test_cli_scale_flag_overrides_file(tmp_path):
    cfg_path = write_tiny_cfg(tmp_path / "run.cfg")
    # paper preset via flag, but n_x etc. from file still win over the preset
    from phasefront.cli import _config_from_args, build_parser

    args = build_parser().parse_args(["generate", "--config", str(cfg_path), "--scale", "paper"])
    cfg = _config_from_args(args)
    assert cfg.scale == "paper"
    assert cfg.phase.n_x == 16  # explicit file key beats preset
    assert cfg.n_train == 1
