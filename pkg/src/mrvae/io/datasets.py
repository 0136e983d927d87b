from typing import Optional, Tuple

import numpy as np

from mrvae.config.schema import IdxImagesSpec, SyntheticGaussianSpec
from mrvae.core.exceptions import ConfigError
from mrvae.io.idx import load_idx
from mrvae.io.synthetic import make_synthetic
from mrvae.linalg.types import SpectrumDecomp


def load_dataset(spec) -> Tuple[np.ndarray, Optional[SpectrumDecomp]]:
    """Data matrix and, for synthetic data, the generating spectrum."""
    if isinstance(spec, SyntheticGaussianSpec):
        return make_synthetic(spec)
    if isinstance(spec, IdxImagesSpec):
        return load_idx(spec.path, spec.binarize_threshold, spec.max_items), None
    raise ConfigError(f"unsupported dataset spec {spec!r}")
