from .activations import (
    GateActivation,
    activation_decoder,
    activation_encoder,
)
from .conditioner import BetaConditioner, normalize_eta
from .gates import (
    GateGrads,
    GateParams,
    GateTerms,
    apply_gate_preactivation,
    conv_gate,
    conv_gate_backward,
    effective_weight,
    gate_backward,
    gate_scale_backward,
    gate_terms,
    gate_vector,
)

__all__ = [
    "GateActivation",
    "activation_decoder",
    "activation_encoder",
    "BetaConditioner",
    "normalize_eta",
    "GateGrads",
    "GateParams",
    "GateTerms",
    "apply_gate_preactivation",
    "conv_gate",
    "conv_gate_backward",
    "effective_weight",
    "gate_backward",
    "gate_scale_backward",
    "gate_terms",
    "gate_vector",
]
