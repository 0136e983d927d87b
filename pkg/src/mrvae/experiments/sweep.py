from mrvae.config.schema import RunConfig
from mrvae.core.decorators import log_experiment_execution
from mrvae.core.exceptions import ConfigError
from mrvae.core.logging import get_logger
from mrvae.core.session import log_metrics
from mrvae.evaluation.curves import curve_check
from mrvae.evaluation.sweep import log_spaced_betas, rd_sweep
from mrvae.experiments.common import out_path
from mrvae.io.checkpoint import load_checkpoint
from mrvae.io.datasets import load_dataset
from mrvae.io.results import emit_rd_csv
from mrvae.linalg.random import RngStream

logger = get_logger(__name__)


@log_experiment_execution
def sweep_rd(config: RunConfig, out_dir) -> int:
    sweep = config.sweep
    ckpt = load_checkpoint(sweep.checkpoint)
    data, _ = load_dataset(config.dataset)
    if data.shape[1] != ckpt.model.data_dim:
        raise ConfigError(f"dataset has {data.shape[1]} features, checkpoint model expects {ckpt.model.data_dim}")

    betas = log_spaced_betas(sweep.beta_min, sweep.beta_max, sweep.num_betas)
    curve = rd_sweep(
        ckpt.model,
        betas,
        data,
        RngStream(config.train.seed).split("sweep"),
        mc_samples=sweep.mc_samples,
        au_threshold=sweep.au_threshold,
        workers=sweep.workers,
    )
    emit_rd_csv(curve, out_path(out_dir, "rd_curve.csv"))

    report = curve_check(curve, sweep.noise_tol)
    for point in curve.points:
        print(f"beta={point.beta:.4g} rate={point.rate:.4f} distortion={point.distortion:.4f} au={point.au}")
        log_metrics({"beta": point.beta, "rate": point.rate, "distortion": point.distortion, "au": point.au})
    print(f"curve check: {report.summary()}")
    if not report.ok:
        logger.warning(f"curve check: {report.summary()}")
    return 0


def register_experiments(registry):
    registry.add_experiment(sweep_rd, name="sweep-rd")
