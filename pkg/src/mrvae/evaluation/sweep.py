"""
Rate-distortion sweeps over a trained model.

The rate at each beta is the closed-form Gaussian KL averaged over the
data; the distortion is a Monte-Carlo average over posterior draws. Each
beta gets its own child random stream, so results do not depend on the
number of workers.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, Optional

import numpy as np

from mrvae.analytic.linear_vae import analytic_rd_point
from mrvae.core.exceptions import DomainError
from mrvae.core.logging import get_logger
from mrvae.evaluation.curves import Provenance, RDCurve, RDPoint
from mrvae.linalg.random import RngStream
from mrvae.linalg.types import SpectrumDecomp
from mrvae.nn.model import distortion_per_example, rate_per_example

logger = get_logger(__name__)


def log_spaced_betas(beta_min: float, beta_max: float, num: int) -> np.ndarray:
    """``num`` log-spaced values with the endpoints exactly ``beta_min`` and ``beta_max``."""
    betas = np.exp(np.linspace(np.log(beta_min), np.log(beta_max), num))
    if num > 0:
        betas[0] = beta_min
    if num > 1:
        betas[-1] = beta_max
    return betas


def _check_data(data) -> np.ndarray:
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] == 0:
        raise DomainError("evaluation needs a non-empty (n, d) dataset")
    return data


def active_units(model, data, beta: float, threshold: float = 0.01) -> int:
    """Latent dimensions whose posterior mean varies over the data by more than ``threshold``."""
    data = _check_data(data)
    z_mean, _ = model.encode(data, beta)
    return int(np.sum(np.var(z_mean, axis=0) > threshold))


def rd_point(model, beta: float, data, rng: RngStream, mc_samples: int = 16, au_threshold: Optional[float] = None) -> RDPoint:
    data = _check_data(data)
    z_mean, z_logvar = model.encode(data, beta)
    rate = float(np.mean(rate_per_example(z_mean, z_logvar)))
    std = np.exp(0.5 * z_logvar)
    total = 0.0
    for _ in range(mc_samples):
        z = z_mean + std * rng.standard_normal(z_mean.shape)
        recon = model.decode(z, beta)
        total += float(np.mean(distortion_per_example(model.likelihood, recon, data)))
    distortion = total / mc_samples
    au = None
    if au_threshold is not None:
        au = int(np.sum(np.var(z_mean, axis=0) > au_threshold))
    return RDPoint(float(beta), max(rate, 0.0), distortion, distortion + rate, au)


def rd_sweep(
    model,
    betas: Iterable[float],
    data,
    rng: RngStream,
    mc_samples: int = 16,
    au_threshold: Optional[float] = 0.01,
    workers: int = 1,
    provenance: Provenance = Provenance.MRVAE,
) -> RDCurve:
    """One RD point per beta, in ascending beta order."""
    data = _check_data(data)
    betas = sorted(float(b) for b in betas)
    streams = [rng.split(f"beta:{i}") for i in range(len(betas))]

    def run(i: int) -> RDPoint:
        point = rd_point(model, betas[i], data, streams[i], mc_samples, au_threshold)
        logger.debug(f"beta={point.beta:.4g} rate={point.rate:.4f} distortion={point.distortion:.4f}")
        return point

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(run, range(len(betas))))
    else:
        points = [run(i) for i in range(len(betas))]
    return RDCurve(points, provenance)


def analytic_curve(spectrum: SpectrumDecomp, betas: Iterable[float], k: int) -> RDCurve:
    points = []
    for beta in sorted(float(b) for b in betas):
        rate, distortion = analytic_rd_point(spectrum, beta, k)
        points.append(RDPoint(beta, max(rate, 0.0), distortion, distortion + rate))
    return RDCurve(points, Provenance.ANALYTIC)
