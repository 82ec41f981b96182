"""Low-rank matrix completion via factorized gradient descent."""

from lrmc._core import (
    FactorPair,
    GradientFdReport,
    GroundTruth,
    HessianBoundsResult,
    LooDiagnostics,
    LooRun,
    PartialSVD,
    RunResult,
    SamplingMask,
    SolverConfig,
    TrajectoryRecord,
    Variant,
    condition_number,
    default_step_size,
    generate_ground_truth,
    gd_step,
    gradient,
    gradient_fd_check,
    hessian_bounds_check,
    hessian_quadratic_form,
    incoherence,
    loo_matrix,
    objective,
    procrustes,
    project_omega,
    projected_gd_step,
    run,
    run_with_loo,
    sample_mask,
    sampling_deviation,
    sign_matrix,
    spectral_gap,
    spectral_init,
    spectral_norm,
    top_r_svd,
)

__all__ = [
    "FactorPair",
    "GradientFdReport",
    "GroundTruth",
    "HessianBoundsResult",
    "LooDiagnostics",
    "LooRun",
    "PartialSVD",
    "RunResult",
    "SamplingMask",
    "SolverConfig",
    "TrajectoryRecord",
    "Variant",
    "condition_number",
    "default_step_size",
    "generate_ground_truth",
    "gd_step",
    "gradient",
    "gradient_fd_check",
    "hessian_bounds_check",
    "hessian_quadratic_form",
    "incoherence",
    "loo_matrix",
    "objective",
    "procrustes",
    "project_omega",
    "projected_gd_step",
    "run",
    "run_with_loo",
    "sample_mask",
    "sampling_deviation",
    "sign_matrix",
    "spectral_gap",
    "spectral_init",
    "spectral_norm",
    "top_r_svd",
]
