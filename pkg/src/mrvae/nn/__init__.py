from .layers import ConvLayer, DenseLayer, Nonlinearity
from .model import (
    ElboTerms,
    ForwardResult,
    Likelihood,
    MRVAEModel,
    ParamCounts,
    StepTerms,
    Tape,
    backward,
    build_model,
    distortion_per_example,
    elbo_terms,
    forward,
    param_counts,
    rate_per_example,
)
from .linear_model import GatedDiagonal, GatedMatrix, LinearMRVAE
from .optim import AdamState, adam_step, cosine_lr

__all__ = [
    "ConvLayer",
    "DenseLayer",
    "Nonlinearity",
    "ElboTerms",
    "ForwardResult",
    "Likelihood",
    "MRVAEModel",
    "ParamCounts",
    "StepTerms",
    "Tape",
    "backward",
    "build_model",
    "distortion_per_example",
    "elbo_terms",
    "forward",
    "param_counts",
    "rate_per_example",
    "GatedDiagonal",
    "GatedMatrix",
    "LinearMRVAE",
    "AdamState",
    "adam_step",
    "cosine_lr",
]
