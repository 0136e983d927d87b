from .linear_vae import (
    LOG_2PI,
    DatasetMoments,
    LinearVAEParams,
    analytic_rd_point,
    beta_objective,
    distortion_closed_form,
    grad_C,
    grad_E,
    kl_closed_form,
    objective_gradients,
    optimal_C,
    optimal_D,
    optimal_E,
    optimal_params,
)

__all__ = [
    "LOG_2PI",
    "DatasetMoments",
    "LinearVAEParams",
    "analytic_rd_point",
    "beta_objective",
    "distortion_closed_form",
    "grad_C",
    "grad_E",
    "kl_closed_form",
    "objective_gradients",
    "optimal_C",
    "optimal_D",
    "optimal_E",
    "optimal_params",
]
