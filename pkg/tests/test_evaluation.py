import numpy as np
import pytest

from phasefront.errors import InvalidInput
from phasefront.evaluation import compute_error, export_pgm
from phasefront.phasefield import FrontTrajectory

L = 90.0


def traj_from(profiles, dt=0.5):
    profiles = np.asarray(profiles, dtype=np.float64)
    times = dt * np.arange(profiles.shape[0])
    return FrontTrajectory(times, profiles, L)


def test_identical_trajectories_give_zero_report():
    truth = traj_from(np.random.default_rng(0).normal(15, 1, (6, 16)))
    report = compute_error(truth, truth, "self")
    assert report.abs_error.max() == 0.0
    assert report.mean_over_x.max() == 0.0
    assert report.time_mean == 0.0
    assert report.label == "self"


def test_constant_offset_error():
    truth = traj_from(np.full((5, 8), 12.0))
    pred = traj_from(np.full((5, 8), 12.5))
    report = compute_error(pred, truth)
    assert np.all(report.abs_error == 0.5)
    assert report.time_mean == 0.5


def test_hand_built_two_by_two_means():
    truth = traj_from(np.zeros((2, 2)))
    pred = traj_from(np.array([[0.0, -1.0], [2.0, -3.0]]))
    report = compute_error(pred, truth)
    assert np.array_equal(report.abs_error, [[0.0, 1.0], [2.0, 3.0]])
    assert np.array_equal(report.mean_over_x, [0.5, 2.5])
    assert report.time_mean == 1.5


def test_mismatched_shapes_rejected():
    with pytest.raises(InvalidInput):
        compute_error(traj_from(np.zeros((5, 8))), traj_from(np.zeros((5, 16))))


def test_mismatched_times_rejected():
    a = traj_from(np.zeros((5, 8)), dt=0.5)
    b = traj_from(np.zeros((5, 8)), dt=0.25)
    with pytest.raises(InvalidInput):
        compute_error(a, b)


# ---------------------------------------------------------------------------
# PGM export


def read_pgm(path):
    data = path.read_bytes()
    header, rest = data.split(b"\n255\n", 1)
    magic, dims = header.split(b"\n")
    n_x, n_y = (int(v) for v in dims.split())
    assert magic == b"P5"
    return np.frombuffer(rest, dtype=np.uint8).reshape(n_y, n_x)


def test_pgm_zero_matrix(tmp_path):
    path = tmp_path / "zero.pgm"
    export_pgm(np.zeros((3, 4)), path, scale=1.0)
    pixels = read_pgm(path)
    assert pixels.shape == (3, 4)
    assert pixels.max() == 0


def test_pgm_scale_extremes_and_rounding(tmp_path):
    path = tmp_path / "vals.pgm"
    export_pgm(np.array([[0.0, 1.0, 0.5, 2.0]]), path, scale=1.0)
    assert read_pgm(path).tolist() == [[0, 255, 128, 255]]  # half rounds up, over-scale clamps


def test_pgm_rejects_bad_scale():
    with pytest.raises(InvalidInput):
        export_pgm(np.zeros((2, 2)), "/dev/null", scale=0.0)
