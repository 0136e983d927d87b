from .checkpoint import (
    FORMAT_VERSION,
    Checkpoint,
    build_from_topology,
    load_checkpoint,
    save_checkpoint,
    topology_of,
)
from .datasets import load_dataset
from .idx import IDX_IMAGE_MAGIC, load_idx, parse_idx
from .results import emit_history_csv, emit_rd_csv, read_rd_csv, write_atomic
from .synthetic import make_synthetic, random_orthogonal

__all__ = [
    "FORMAT_VERSION",
    "Checkpoint",
    "build_from_topology",
    "load_checkpoint",
    "save_checkpoint",
    "topology_of",
    "load_dataset",
    "IDX_IMAGE_MAGIC",
    "load_idx",
    "parse_idx",
    "emit_history_csv",
    "emit_rd_csv",
    "read_rd_csv",
    "write_atomic",
    "make_synthetic",
    "random_orthogonal",
]
