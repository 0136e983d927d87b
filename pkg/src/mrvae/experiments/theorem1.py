import numpy as np

from mrvae.config.schema import RunConfig
from mrvae.core.decorators import log_experiment_execution
from mrvae.core.logging import get_logger
from mrvae.core.session import log_metrics
from mrvae.evaluation.sweep import log_spaced_betas
from mrvae.evaluation.theorem1 import theorem1_construct, theorem1_verify
from mrvae.experiments.common import out_path
from mrvae.io.results import write_atomic
from mrvae.io.synthetic import random_orthogonal
from mrvae.linalg.random import RngStream
from mrvae.linalg.types import SpectrumDecomp

logger = get_logger(__name__)


def random_instance(rng: RngStream, d: int, k: int):
    """Random covariance spectrum spanning the beta grid, plus a random full-rank decoder."""
    lam = np.sort(np.exp(rng.uniform(np.log(0.05), np.log(30.0), d)))[::-1]
    spectrum = SpectrumDecomp(eigvecs=random_orthogonal(rng.split("basis"), d), eigvals=lam.copy(), source_dim=d)
    dec_weight = rng.split("decoder").standard_normal((d, k))
    return spectrum, dec_weight


@log_experiment_execution
def verify_theorem1(config: RunConfig, out_dir) -> int:
    cfg = config.theorem1
    rng = RngStream(config.train.seed).split("theorem1")
    spectrum, dec_weight = random_instance(rng, cfg.data_dim, cfg.latent_dim)
    betas = log_spaced_betas(cfg.beta_min, cfg.beta_max, cfg.num_betas)

    rows = ["mode,encoder,covariance,decoder"]
    failed = False
    for mode, tol in (("identity", cfg.tolerance), ("limiting", cfg.limiting_tolerance)):
        errors = theorem1_verify(theorem1_construct(spectrum, dec_weight, cfg.latent_dim, mode, cfg.limiting_bias), betas)
        ok = errors.max() <= tol
        failed = failed or not ok
        print(
            f"{mode:>8}: encoder={errors.encoder:.3e} covariance={errors.covariance:.3e} "
            f"decoder={errors.decoder:.3e} [{'ok' if ok else 'FAIL'} at {tol:g}]"
        )
        rows.append(f"{mode},{errors.encoder:.9g},{errors.covariance:.9g},{errors.decoder:.9g}")
        log_metrics({"mode": mode, **errors._asdict(), "ok": ok})
    write_atomic(out_path(out_dir, "theorem1_errors.csv"), "\n".join(rows) + "\n")

    if failed:
        logger.error("constructed responses exceed tolerance")
        return 1
    return 0


def register_experiments(registry):
    registry.add_experiment(verify_theorem1, name="verify-theorem1")
