"""
Deep VAE whose layers are optionally gated on log beta.

The encoder maps x to a Gaussian posterior (mean and log-variance heads), one
reparameterized sample is decoded, and the loss per example is
``distortion + beta * rate`` with the closed-form Gaussian KL as the rate.
Gradients are computed by a hand-written reverse pass over a tape recorded
during the forward pass.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, NamedTuple, Optional, Tuple, Union

import numpy as np
from scipy.special import expit

from mrvae.core.exceptions import DimensionError, DomainError, NumericalError, StateError
from mrvae.core.logging import get_logger
from mrvae.hypergate.activations import GateActivation
from mrvae.hypergate.conditioner import BetaConditioner
from mrvae.hypergate.gates import GateParams
from mrvae.linalg.random import RngStream
from mrvae.nn.layers import ConvLayer, DenseLayer, Nonlinearity

logger = get_logger(__name__)

LOGVAR_MIN = -10.0
LOGVAR_MAX = 10.0
LOG_2PI = float(np.log(2.0 * np.pi))

Layer = Union[DenseLayer, ConvLayer]


class Likelihood(str, Enum):
    BERNOULLI_LOGITS = "bernoulli"
    GAUSSIAN_UNIT_VAR = "gaussian"


def default_gate_bias(kind: GateActivation) -> float:
    """Initial b_hyper: every gate starts at a beta-independent value."""
    if kind is GateActivation.SQRT_EXP_DECODER:
        # sqrt(1 - 0.75) = 0.5, mirroring sigmoid(0) on the encoder side
        return float(np.log(0.75))
    if kind is GateActivation.FILM:
        return 1.0
    return 0.0


def make_gate(size: int, kind: Optional[GateActivation]) -> Optional[GateParams]:
    if kind is None:
        return None
    kind = GateActivation(kind)
    return GateParams.zeros(size, kind, bias=default_gate_bias(kind))


def distortion_per_example(likelihood: Likelihood, recon: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Negative log-likelihood of each row of ``x``."""
    if likelihood is Likelihood.BERNOULLI_LOGITS:
        return np.sum(np.logaddexp(0.0, recon) - x * recon, axis=-1)
    diff = x - recon
    return 0.5 * np.sum(diff * diff, axis=-1) + 0.5 * x.shape[-1] * LOG_2PI


def rate_per_example(z_mean: np.ndarray, z_logvar: np.ndarray) -> np.ndarray:
    """KL(N(mean, exp(logvar)) || N(0, I)) per row."""
    return 0.5 * np.sum(z_mean * z_mean + np.exp(z_logvar) - z_logvar - 1.0, axis=-1)


@dataclass
class Tape:
    signature: tuple
    x: np.ndarray
    eta: object
    encoder_caches: List[object] = field(default_factory=list)
    flatten_shapes: List[Optional[tuple]] = field(default_factory=list)
    mean_cache: object = None
    logvar_cache: object = None
    logvar_raw: Optional[np.ndarray] = None
    z_mean: Optional[np.ndarray] = None
    z_logvar: Optional[np.ndarray] = None
    eps: Optional[np.ndarray] = None
    decoder_caches: List[object] = field(default_factory=list)
    head_cache: object = None
    recon: Optional[np.ndarray] = None


class ForwardResult(NamedTuple):
    recon_params: np.ndarray
    z_mean: np.ndarray
    z_logvar: np.ndarray
    z_sample: np.ndarray
    tape: Tape


class ElboTerms(NamedTuple):
    distortion: float
    rate: float
    loss: float
    distortion_per_example: np.ndarray
    rate_per_example: np.ndarray


class StepTerms(NamedTuple):
    loss: float
    rate: float
    distortion: float


class ParamCounts(NamedTuple):
    base: int
    gate: int
    overhead_ratio: float


class MRVAEModel:
    """Encoder stack, Gaussian posterior heads, decoder stack and output head."""

    def __init__(
        self,
        encoder_layers: List[Layer],
        mean_head: DenseLayer,
        logvar_head: DenseLayer,
        decoder_layers: List[DenseLayer],
        decoder_head: DenseLayer,
        likelihood: Likelihood,
        conditioner: Optional[BetaConditioner] = None,
        input_shape: Optional[Tuple[int, int, int]] = None,
        topology=None,
    ):
        self.encoder_layers = list(encoder_layers)
        self.mean_head = mean_head
        self.logvar_head = logvar_head
        self.decoder_layers = list(decoder_layers)
        self.decoder_head = decoder_head
        self.likelihood = Likelihood(likelihood)
        self.conditioner = conditioner or BetaConditioner()
        self.input_shape = tuple(input_shape) if input_shape else None
        self.topology = topology
        if mean_head.out_size != logvar_head.out_size:
            raise DimensionError("mean and log-variance heads must have equal width")
        if self.decoder_head.out_size != self.data_dim:
            raise DimensionError("decoder head width must equal the data dimension")
        if any(layer.kind == "conv" for layer in self.encoder_layers) and not self.input_shape:
            raise DimensionError("convolutional encoders need an input_shape")

    @property
    def latent_dim(self) -> int:
        return self.mean_head.out_size

    @property
    def data_dim(self) -> int:
        if self.input_shape:
            return int(np.prod(self.input_shape))
        first = self.encoder_layers[0] if self.encoder_layers else self.mean_head
        return first.in_size

    def named_layers(self) -> List[Tuple[str, Layer]]:
        named = [(f"encoder.{i}", layer) for i, layer in enumerate(self.encoder_layers)]
        named += [("mean_head", self.mean_head), ("logvar_head", self.logvar_head)]
        named += [(f"decoder.{i}", layer) for i, layer in enumerate(self.decoder_layers)]
        named.append(("decoder_head", self.decoder_head))
        return named

    def parameters(self) -> Dict[str, np.ndarray]:
        """Flat name -> array mapping; arrays are the live parameters."""
        params = {}
        for prefix, layer in self.named_layers():
            for key, value in layer.parameters().items():
                params[f"{prefix}.{key}"] = value
        return params

    def signature(self) -> tuple:
        return (id(self),) + tuple(
            (name, arr.shape) for name, arr in self.parameters().items()
        )

    @property
    def gated(self) -> bool:
        return any(layer.gate is not None for _, layer in self.named_layers())

    def encode(self, x, beta):
        """Posterior mean and (clamped) log-variance without sampling."""
        x, eta = self._prepare(x, beta)
        tape = Tape(signature=(), x=x, eta=eta)
        self._encode(x, eta, tape)
        return tape.z_mean, tape.z_logvar

    def decode(self, z, beta):
        z = np.asarray(z, dtype=np.float64)
        eta = self._eta(beta, z.shape[0])
        tape = Tape(signature=(), x=z, eta=eta)
        return self._decode(z, eta, tape)

    def loss_and_grads(self, x, beta, rng: RngStream):
        result = forward(self, x, beta, rng)
        terms = elbo_terms(self, result, x, beta)
        grads = backward(self, result.tape, beta)
        return StepTerms(terms.loss, terms.rate, terms.distortion), grads

    def _prepare(self, x, beta):
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.data_dim:
            raise DimensionError(f"expected inputs of shape (n, {self.data_dim}), got {x.shape}")
        return x, self._eta(beta, x.shape[0])

    def _eta(self, beta, n: int):
        beta = np.asarray(beta, dtype=np.float64)
        if np.any(beta <= 0):
            raise DomainError("beta must be positive")
        if beta.ndim not in (0, 1) or (beta.ndim == 1 and beta.shape[0] != n):
            raise DimensionError("beta must be a scalar or one value per example")
        if self.gated and not self.conditioner.covers(beta):
            logger.warning(
                f"beta outside conditioner range [{self.conditioner.a}, {self.conditioner.b}]; "
                "gates are extrapolating"
            )
        return self.conditioner.normalize(np.log(beta))

    def _encode(self, x, eta, tape: Tape):
        n = x.shape[0]
        a = x.reshape((n,) + self.input_shape) if self.input_shape else x
        for i, layer in enumerate(self.encoder_layers):
            flat = None
            if layer.kind == "dense" and a.ndim > 2:
                flat = a.shape
                a = a.reshape(n, -1)
            a, cache = layer.forward(a, eta)
            _check_finite(a, i)
            tape.encoder_caches.append(cache)
            tape.flatten_shapes.append(flat)

        head_index = len(self.encoder_layers)
        if a.ndim > 2:
            tape.flatten_shapes.append(a.shape)
            a = a.reshape(n, -1)
        else:
            tape.flatten_shapes.append(None)
        z_mean, tape.mean_cache = self.mean_head.forward(a, eta)
        _check_finite(z_mean, head_index)
        logvar_raw, tape.logvar_cache = self.logvar_head.forward(a, eta)
        _check_finite(logvar_raw, head_index + 1)
        tape.z_mean = z_mean
        tape.logvar_raw = logvar_raw
        tape.z_logvar = np.clip(logvar_raw, LOGVAR_MIN, LOGVAR_MAX)
        return a

    def _decode(self, z, eta, tape: Tape):
        offset = len(self.encoder_layers) + 2
        a = z
        for i, layer in enumerate(self.decoder_layers):
            a, cache = layer.forward(a, eta)
            _check_finite(a, offset + i)
            tape.decoder_caches.append(cache)
        recon, tape.head_cache = self.decoder_head.forward(a, eta)
        _check_finite(recon, offset + len(self.decoder_layers))
        tape.recon = recon
        return recon


def _check_finite(arr: np.ndarray, layer_index: int) -> None:
    if not np.all(np.isfinite(arr)):
        raise NumericalError("non-finite activations", layer_index=layer_index)


def _beta_column(beta) -> np.ndarray:
    beta = np.asarray(beta, dtype=np.float64)
    return beta if beta.ndim == 0 else beta[:, None]


def forward(model: MRVAEModel, x, beta, rng: RngStream) -> ForwardResult:
    """Encode, draw one reparameterized sample per row, decode."""
    x, eta = model._prepare(x, beta)
    tape = Tape(signature=model.signature(), x=x, eta=eta)
    model._encode(x, eta, tape)
    tape.eps = rng.standard_normal(tape.z_mean.shape)
    z = tape.z_mean + np.exp(0.5 * tape.z_logvar) * tape.eps
    recon = model._decode(z, eta, tape)
    return ForwardResult(recon, tape.z_mean, tape.z_logvar, z, tape)


def elbo_terms(model: MRVAEModel, result: ForwardResult, x, beta) -> ElboTerms:
    """Batch-average distortion and rate, and the loss ``mean(D_i + beta_i R_i)``."""
    x = np.asarray(x, dtype=np.float64)
    dist = distortion_per_example(model.likelihood, result.recon_params, x)
    rate = rate_per_example(result.z_mean, result.z_logvar)
    beta = np.asarray(beta, dtype=np.float64)
    loss = float(np.mean(dist + beta * rate))
    return ElboTerms(float(np.mean(dist)), float(np.mean(rate)), loss, dist, rate)


def backward(model: MRVAEModel, tape: Tape, beta, scale: float = 1.0) -> Dict[str, np.ndarray]:
    """Gradients of ``scale * mean(D_i + beta_i R_i)`` for every parameter."""
    if tape.signature != model.signature():
        raise StateError("tape was recorded by a different model or topology")
    n = tape.x.shape[0]
    beta_col = _beta_column(beta)
    grads: Dict[str, np.ndarray] = {}

    if model.likelihood is Likelihood.BERNOULLI_LOGITS:
        d_recon = (expit(tape.recon) - tape.x) * (scale / n)
    else:
        d_recon = (tape.recon - tape.x) * (scale / n)

    d_a, g = model.decoder_head.backward(tape.head_cache, d_recon)
    _merge(grads, "decoder_head", g)
    for i in reversed(range(len(model.decoder_layers))):
        d_a, g = model.decoder_layers[i].backward(tape.decoder_caches[i], d_a)
        _merge(grads, f"decoder.{i}", g)
    d_z = d_a

    std = np.exp(0.5 * tape.z_logvar)
    d_mean = d_z + beta_col * tape.z_mean * (scale / n)
    d_logvar = d_z * tape.eps * 0.5 * std + beta_col * 0.5 * (np.exp(tape.z_logvar) - 1.0) * (
        scale / n
    )
    inside = (tape.logvar_raw >= LOGVAR_MIN) & (tape.logvar_raw <= LOGVAR_MAX)
    d_logvar = d_logvar * inside

    d_h_mean, g = model.mean_head.backward(tape.mean_cache, d_mean)
    _merge(grads, "mean_head", g)
    d_h_logvar, g = model.logvar_head.backward(tape.logvar_cache, d_logvar)
    _merge(grads, "logvar_head", g)
    d_a = d_h_mean + d_h_logvar

    if tape.flatten_shapes[-1] is not None:
        d_a = d_a.reshape(tape.flatten_shapes[-1])
    for i in reversed(range(len(model.encoder_layers))):
        d_a, g = model.encoder_layers[i].backward(tape.encoder_caches[i], d_a)
        _merge(grads, f"encoder.{i}", g)
        if tape.flatten_shapes[i] is not None:
            d_a = d_a.reshape(tape.flatten_shapes[i])
    return grads


def _merge(grads: dict, prefix: str, layer_grads: dict) -> None:
    for key, value in layer_grads.items():
        grads[f"{prefix}.{key}"] = value


def param_counts(model: MRVAEModel) -> ParamCounts:
    base = 0
    gate = 0
    for _, layer in model.named_layers():
        base += layer.base_count()
        if layer.gate is not None:
            gate += layer.gate.num_params
    return ParamCounts(base, gate, gate / base if base else 0.0)


def build_model(
    topology,
    rng: RngStream,
    beta_range: Tuple[float, float] = (0.01, 10.0),
    normalize: bool = True,
) -> MRVAEModel:
    """Instantiate a model from a :class:`mrvae.config.schema.ModelTopology`."""
    nonlin = Nonlinearity(topology.nonlinearity)
    enc_kind = GateActivation(topology.encoder_gate) if topology.gated else None
    dec_kind = GateActivation(topology.decoder_gate) if topology.gated else None
    head_enc = enc_kind if topology.gate_heads else None
    head_dec = dec_kind if topology.gate_heads else None

    encoder: List[Layer] = []
    input_shape = tuple(topology.input_shape) if topology.input_shape else None
    if topology.conv_layers:
        if input_shape is None:
            raise DimensionError("conv_layers require input_shape")
        shape = input_shape
        for spec in topology.conv_layers:
            layer = ConvLayer.init(
                rng,
                shape[0],
                spec.filters,
                spec.kernel,
                spec.stride,
                spec.padding,
                nonlin,
                make_gate(spec.filters, enc_kind),
            )
            shape = layer.output_shape(shape)
            encoder.append(layer)
        width = int(np.prod(shape))
    else:
        width = topology.data_dim

    for hidden in topology.encoder_hidden:
        encoder.append(DenseLayer.init(rng, width, hidden, nonlin, make_gate(hidden, enc_kind)))
        width = hidden

    k = topology.latent_dim
    mean_head = DenseLayer.init(rng, width, k, Nonlinearity.IDENTITY, make_gate(k, head_enc))
    logvar_head = DenseLayer.init(rng, width, k, Nonlinearity.IDENTITY, make_gate(k, head_enc))

    decoder: List[DenseLayer] = []
    width = k
    for hidden in topology.decoder_hidden:
        decoder.append(DenseLayer.init(rng, width, hidden, nonlin, make_gate(hidden, dec_kind)))
        width = hidden
    head = DenseLayer.init(
        rng, width, topology.data_dim, Nonlinearity.IDENTITY, make_gate(topology.data_dim, head_dec)
    )

    conditioner = BetaConditioner(beta_range[0], beta_range[1], normalize)
    return MRVAEModel(
        encoder,
        mean_head,
        logvar_head,
        decoder,
        head,
        Likelihood(topology.likelihood),
        conditioner,
        input_shape,
        topology,
    )
