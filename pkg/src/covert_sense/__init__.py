"""Covert optical phase sensing: Gaussian-state numerics, information
bounds, detectability analysis, and Monte Carlo verification of the
square-root law."""

__version__ = "0.1.0"

from .covertness import (
    AdversaryModel,
    CovertBudget,
    DetectionBounds,
    VarianceConvention,
    adversary_noise_moments,
    chebyshev_detector,
    covert_budget,
    detection_error_lower_bound,
    qre_quadratic_bound,
    qre_thermal,
)
from .errors import (
    CovertSenseError,
    DomainError,
    InvalidArgumentError,
    NumericalFailureError,
    PhysicalityViolationError,
    StepUnderflowError,
    UndefinedAngleError,
)
from .gaussian import (
    ChannelParams,
    GaussianState,
    apply_loss_thermal,
    apply_phase,
    fidelity,
    make_coherent,
    make_thermal,
    make_tmsv,
    mean_photon_number,
    symplectic_eigenvalues,
    symplectic_form,
)
from .metrology import (
    CovertConstants,
    MomentSpec,
    OpOrder,
    ProbeFamily,
    ProbeKind,
    QfiReport,
    build_qfi_report,
    constant_coherent_exact,
    constant_tmsv_exact,
    constant_ultimate_exact,
    covert_constants,
    probe_moment_spec,
    qcrlb_mse,
    qfi_coherent,
    qfi_numeric,
    qfi_tmsv,
    qfi_tmsv_xi,
    qfi_upper_bound,
    qfi_upper_bound_limit,
)
from .simulation import (
    DetectionSimResult,
    EstimationConfig,
    EstimationResult,
    Hypothesis,
    Modulation,
    SweepRow,
    exact_discrimination_error,
    heterodyne_estimate,
    simulate_adversary,
    simulate_detection,
    simulate_estimation,
    sweep_scaling,
    wilson_halfwidth,
)

__all__ = [name for name in dir() if not name.startswith("_")]
