"""Experiment configuration: scale presets, config files, CLI overrides.

Config files are plain text ``key = value`` lines ('#' starts a comment).
Precedence: built-in preset < config file < command-line flags.
"""

from dataclasses import dataclass, field, replace

from .errors import InvalidInput
from .neuralnet import TrainConfig
from .phasefield import PhaseFieldParams

#: The test trajectory is seeded far outside the training index range.
TEST_SEED_OFFSET = 1_000_000

SCALES = ("paper", "ci")


def preset_phase_params(scale) -> PhaseFieldParams:
    if scale == "paper":
        return PhaseFieldParams(n_x=400, n_y=400, n_save=500)
    if scale == "ci":
        return PhaseFieldParams(n_x=128, n_y=128, n_save=200)
    raise InvalidInput(f"unknown scale {scale!r}; expected one of {SCALES}")


def preset_n_train(scale) -> int:
    return 20 if scale == "paper" else 5


@dataclass(frozen=True)
class ExperimentConfig:
    scale: str = "ci"
    phase: PhaseFieldParams = field(default_factory=lambda: preset_phase_params("ci"))
    n_train: int = 5
    master_seed: int = 0
    train: TrainConfig = field(default_factory=TrainConfig)
    subsample: int | None = None
    workers: int = 1
    out_dir: str = "runs/out"

    def __post_init__(self):
        if self.scale not in SCALES:
            raise InvalidInput(f"unknown scale {self.scale!r}")
        if self.n_train < 1:
            raise InvalidInput("n_train must be >= 1")
        if self.workers < 1:
            raise InvalidInput("workers must be >= 1")
        if self.subsample is not None and self.subsample < 1:
            raise InvalidInput("subsample must be >= 1")


_PHASE_KEYS = {"a": float, "D": float, "L": float, "n_x": int, "n_y": int,
               "T": float, "n_save": int}
_TRAIN_KEYS = {"learning_rate": float, "batch_size": int, "epochs": int,
               "shuffle_seed": int, "validation_fraction": float}
_TOP_KEYS = {"scale": str, "seed": int, "n_train": int, "subsample": int,
             "workers": int, "out": str}


def parse_config_file(path) -> dict:
    """Read ``key = value`` lines into a raw string dict."""
    raw = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidInput(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            if not key or not value:
                raise InvalidInput(f"{path}:{lineno}: empty key or value")
            raw[key] = value
    return raw


def build_config(file_values: dict | None = None, overrides: dict | None = None) -> ExperimentConfig:
    """Assemble an ExperimentConfig from preset, file values and overrides.

    ``overrides`` uses the same keys as the config file (already typed or as
    strings). Unknown keys raise InvalidInput.
    """
    merged = dict(file_values or {})
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value

    known = {**_TOP_KEYS, **_PHASE_KEYS, **_TRAIN_KEYS}
    typed = {}
    for key, value in merged.items():
        if key not in known:
            raise InvalidInput(f"unknown config key {key!r}")
        try:
            typed[key] = known[key](value)
        except ValueError as exc:
            raise InvalidInput(f"config key {key!r}: {exc}") from exc

    scale = typed.get("scale", "ci")
    phase = preset_phase_params(scale)
    phase_over = {k: typed[k] for k in _PHASE_KEYS if k in typed}
    if phase_over:
        phase = replace(phase, **phase_over)
    train_over = {k: typed[k] for k in _TRAIN_KEYS if k in typed}
    train = TrainConfig(**train_over) if train_over else TrainConfig()

    return ExperimentConfig(
        scale=scale,
        phase=phase,
        n_train=typed.get("n_train", preset_n_train(scale)),
        master_seed=typed.get("seed", 0),
        train=train,
        subsample=typed.get("subsample"),
        workers=typed.get("workers", 1),
        out_dir=typed.get("out", "runs/out"),
    )


def dump_config(cfg: ExperimentConfig) -> str:
    """Serialize the settings a dataset consumer needs, config-file syntax."""
    p, t = cfg.phase, cfg.train
    lines = [
        f"scale = {cfg.scale}",
        f"seed = {cfg.master_seed}",
        f"n_train = {cfg.n_train}",
        f"a = {p.a!r}",
        f"D = {p.D!r}",
        f"L = {p.L!r}",
        f"n_x = {p.n_x}",
        f"n_y = {p.n_y}",
        f"T = {p.T!r}",
        f"n_save = {p.n_save}",
        f"learning_rate = {t.learning_rate!r}",
        f"batch_size = {t.batch_size}",
        f"epochs = {t.epochs}",
        f"shuffle_seed = {t.shuffle_seed}",
        f"validation_fraction = {t.validation_fraction!r}",
    ]
    return "\n".join(lines) + "\n"
