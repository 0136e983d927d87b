"""
Model checkpoints.

A checkpoint is a JSON document holding the topology, the beta conditioner,
every parameter as little-endian float64 bytes in hex (bit-exact), the
optimizer moments, the training step and a hash of the run config.
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional

import numpy as np

from mrvae.config.schema import ModelTopology
from mrvae.core.exceptions import FormatError, StateError
from mrvae.core.logging import get_logger
from mrvae.hypergate.activations import GateActivation
from mrvae.hypergate.conditioner import BetaConditioner
from mrvae.io.results import write_atomic
from mrvae.linalg.random import RngStream
from mrvae.nn.linear_model import LinearMRVAE
from mrvae.nn.model import build_model
from mrvae.nn.optim import AdamState

logger = get_logger(__name__)

FORMAT_VERSION = 1


def encode_array(arr) -> dict:
    arr = np.asarray(arr, dtype=np.float64)
    return {"shape": list(arr.shape), "data": arr.astype("<f8").tobytes().hex()}


def decode_array(blob: dict) -> np.ndarray:
    try:
        raw = bytes.fromhex(blob["data"])
        return np.frombuffer(raw, dtype="<f8").astype(np.float64).reshape(blob["shape"])
    except (KeyError, ValueError, TypeError) as e:
        raise FormatError(f"malformed array in checkpoint: {e}") from e


def _encode_arrays(arrays: Dict[str, np.ndarray]) -> dict:
    return {name: encode_array(value) for name, value in arrays.items()}


def _decode_arrays(blobs: dict) -> Dict[str, np.ndarray]:
    return {name: decode_array(blob) for name, blob in blobs.items()}


@dataclass
class Checkpoint:
    model: object
    optimizer: Optional[AdamState]
    step: int
    config_hash: Optional[str]
    topology: ModelTopology


def topology_of(model) -> ModelTopology:
    if isinstance(model, LinearMRVAE):
        return ModelTopology(
            kind="linear",
            data_dim=model.data_dim,
            latent_dim=model.latent_dim,
            encoder_hidden=[],
            decoder_hidden=[],
            likelihood="gaussian",
        )
    if model.topology is None:
        raise StateError("model has no topology descriptor to save")
    return model.topology


def _gate_kinds(model) -> Dict[str, str]:
    if isinstance(model, LinearMRVAE):
        return {name: part.gate.activation.value for name, part in model.named_parts()}
    return {}


def build_from_topology(topology: ModelTopology, conditioner: BetaConditioner, rng: RngStream):
    """Empty model skeleton with the right shapes; parameters are overwritten on load."""
    if topology.kind == "linear":
        return LinearMRVAE.init(rng, topology.data_dim, topology.latent_dim, np.zeros(topology.data_dim), conditioner)
    return build_model(topology, rng, (conditioner.a, conditioner.b), conditioner.enabled)


def save_checkpoint(
    path,
    model,
    optimizer: Optional[AdamState] = None,
    step: int = 0,
    config_hash: Optional[str] = None,
) -> None:
    cond = model.conditioner
    doc = {
        "format_version": FORMAT_VERSION,
        "topology": topology_of(model).model_dump(mode="json"),
        "conditioner": {"a": cond.a, "b": cond.b, "enabled": cond.enabled},
        "gate_kinds": _gate_kinds(model),
        "parameters": _encode_arrays(model.parameters()),
        "buffers": _encode_arrays({"mean": model.mean}) if isinstance(model, LinearMRVAE) else {},
        "optimizer": None,
        "step": int(step),
        "config_hash": config_hash,
    }
    if optimizer is not None:
        state = optimizer.state_dict()
        doc["optimizer"] = {
            "hyper": state["hyper"],
            "m": _encode_arrays(state["m"]),
            "v": _encode_arrays(state["v"]),
        }
    write_atomic(path, json.dumps(doc, indent=1) + "\n")
    logger.info(f"saved checkpoint to {path} at step {step}")


def load_checkpoint(path) -> Checkpoint:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise FormatError(f"cannot read checkpoint {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise FormatError(f"checkpoint {path} is not valid JSON", offset=e.pos) from e

    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported checkpoint version {version!r}, expected {FORMAT_VERSION}")
    try:
        topology = ModelTopology.model_validate(doc["topology"])
        cond = BetaConditioner(**doc["conditioner"])
        params = _decode_arrays(doc["parameters"])
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"checkpoint {path} is missing or has malformed fields: {e}") from e

    model = build_from_topology(topology, cond, RngStream(0))
    if isinstance(model, LinearMRVAE):
        parts = dict(model.named_parts())
        for name, kind in doc.get("gate_kinds", {}).items():
            parts[name].gate.activation = GateActivation(kind)
        if "mean" in doc.get("buffers", {}):
            model.mean = decode_array(doc["buffers"]["mean"])

    target = model.parameters()
    if set(target) != set(params):
        raise StateError(
            f"checkpoint parameters do not match topology: "
            f"missing {sorted(set(target) - set(params))}, unexpected {sorted(set(params) - set(target))}"
        )
    for name, value in params.items():
        if target[name].shape != value.shape:
            raise StateError(f"{name}: checkpoint shape {value.shape}, model shape {target[name].shape}")
        np.copyto(target[name], value)

    optimizer = None
    if doc.get("optimizer"):
        opt = doc["optimizer"]
        optimizer = AdamState.from_state_dict(
            {"hyper": opt["hyper"], "m": _decode_arrays(opt["m"]), "v": _decode_arrays(opt["v"])}
        )
    logger.info(f"loaded checkpoint {path} ({topology.kind} model, step {doc.get('step', 0)})")
    return Checkpoint(model, optimizer, int(doc.get("step", 0)), doc.get("config_hash"), topology)
