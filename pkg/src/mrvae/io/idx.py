"""
Reader for IDX image files (the MNIST container format).

Layout: a 4-byte big-endian magic 0x00000803, three big-endian uint32
dimensions (items, rows, cols), then items * rows * cols unsigned bytes.
"""

from pathlib import Path
from typing import Optional

import numpy as np

from mrvae.core.exceptions import FormatError
from mrvae.core.logging import get_logger

logger = get_logger(__name__)

IDX_IMAGE_MAGIC = 0x00000803
HEADER_SIZE = 16


def parse_idx(raw: bytes, binarize_threshold: Optional[float] = 0.5, max_items: Optional[int] = None) -> np.ndarray:
    if len(raw) < 4:
        raise FormatError("truncated IDX magic", offset=len(raw))
    magic = int.from_bytes(raw[:4], "big")
    if magic != IDX_IMAGE_MAGIC:
        raise FormatError(f"bad IDX magic 0x{magic:08x}, expected 0x{IDX_IMAGE_MAGIC:08x}", offset=0)
    if len(raw) < HEADER_SIZE:
        raise FormatError("truncated IDX header", offset=len(raw))
    items, rows, cols = (int(v) for v in np.frombuffer(raw, dtype=">u4", count=3, offset=4))

    if max_items is not None:
        items = min(items, max_items)
    size = rows * cols
    end = HEADER_SIZE + items * size
    if len(raw) < end:
        raise FormatError(f"truncated IDX payload: expected {end} bytes", offset=len(raw))

    pixels = np.frombuffer(raw, dtype=np.uint8, count=items * size, offset=HEADER_SIZE)
    data = pixels.reshape(items, size).astype(np.float64) / 255.0
    if binarize_threshold is not None:
        data = (data > binarize_threshold).astype(np.float64)
    return data


def load_idx(path, binarize_threshold: Optional[float] = 0.5, max_items: Optional[int] = None) -> np.ndarray:
    """Flattened images scaled to [0, 1], binarized when a threshold is given."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise FormatError(f"cannot read IDX file {path}: {e}") from e
    data = parse_idx(raw, binarize_threshold, max_items)
    logger.info(f"loaded {data.shape[0]} images of {data.shape[1]} pixels from {path}")
    return data
