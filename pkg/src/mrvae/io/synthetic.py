from typing import Tuple

import numpy as np

from mrvae.config.schema import SyntheticGaussianSpec
from mrvae.linalg.random import RngStream
from mrvae.linalg.types import SpectrumDecomp


def random_orthogonal(rng: RngStream, dim: int) -> np.ndarray:
    """Haar-distributed orthogonal matrix (QR of a Gaussian matrix with the sign of R fixed)."""
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def make_synthetic(spec: SyntheticGaussianSpec) -> Tuple[np.ndarray, SpectrumDecomp]:
    """``n_samples`` draws from N(0, U diag(spectrum) U^T) and the generating spectrum."""
    rng = RngStream(spec.seed).split("synthetic")
    lam = np.asarray(spec.spectrum, dtype=np.float64)
    u = random_orthogonal(rng.split("basis"), spec.dim)
    eps = rng.split("samples").standard_normal((spec.n_samples, spec.dim))
    data = (eps * np.sqrt(lam)) @ u.T
    return data, SpectrumDecomp(eigvecs=u, eigvals=lam, source_dim=spec.dim)
