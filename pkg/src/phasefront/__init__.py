"""Learning effective 1D front equations from 2D phase-field simulations."""

from .backend import backend_name
from .analytic import (
    curvature_normal_velocity,
    drift_velocity,
    eikonal_rhs,
    integrate_analytic_front,
    inverse_tilde,
    kpz_lab_rhs,
    kpz_rhs,
    tilde_transform,
)
from .config import ExperimentConfig, build_config
from .evaluation import ErrorReport, compute_error, export_pgm
from .neuralnet import (
    MlpModel,
    TrainConfig,
    adam_step,
    load_model,
    mlp_forward,
    mlp_gradient,
    save_model,
    swish,
    train,
)
from .numerics import (
    OdeSolverConfig,
    Rng,
    StencilConfig,
    fd_first_derivative,
    fd_second_derivative,
    fd_time_derivative,
    fit_tanh,
    rk45_integrate,
)
from .phasefield import (
    FrontProfile,
    FrontTrajectory,
    PhaseField2D,
    PhaseFieldParams,
    allen_cahn_rhs,
    extract_front,
    lift_front,
    random_front,
    simulate_front_trajectory,
    simulate_phase_field,
)
from .pipeline import run_evaluate, run_generate, run_pipeline, run_train
from .surrogate import (
    FeatureTable,
    SurrogateSpec,
    assemble_features,
    integrate_surrogate,
    surrogate_rhs,
)

__version__ = "0.1.0"
