"""Prediction-error metrics and the heatmap export."""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput
from .phasefield import FrontTrajectory


@dataclass
class ErrorReport:
    """Absolute prediction error over space and time for one model."""

    abs_error: np.ndarray  # (n_t, n_x)
    mean_over_x: np.ndarray  # (n_t,)
    time_mean: float
    label: str


def compute_error(pred: FrontTrajectory, truth: FrontTrajectory, label="model") -> ErrorReport:
    """Elementwise |h_pred - h_true| with row means and the overall mean."""
    if pred.profiles.shape != truth.profiles.shape:
        raise InvalidInput(
            f"shape mismatch: {pred.profiles.shape} vs {truth.profiles.shape}"
        )
    scale = max(abs(float(truth.times[-1])), 1.0)
    if np.max(np.abs(pred.times - truth.times)) > 1e-9 * scale:
        raise InvalidInput("prediction and truth time axes differ")
    abs_error = np.abs(pred.profiles - truth.profiles)
    mean_over_x = abs_error.mean(axis=1)
    return ErrorReport(abs_error, mean_over_x, float(mean_over_x.mean()), label)


def export_pgm(matrix, path, scale):
    """8-bit binary PGM; values map linearly from [0, scale] to [0, 255].

    Out-of-range values clamp; rounding is round-half-up (scale/2 -> 128).
    """
    if not scale > 0:
        raise InvalidInput(f"scale must be > 0, got {scale}")
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2:
        raise InvalidInput("matrix must be 2D")
    pixels = np.clip(np.floor(m / scale * 255.0 + 0.5), 0, 255).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{m.shape[1]} {m.shape[0]}\n255\n".encode("ascii"))
        fh.write(pixels.tobytes())
