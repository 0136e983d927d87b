from mrvae.config.schema import ModelTopology, RunConfig, config_hash
from mrvae.core.decorators import log_experiment_execution
from mrvae.core.exceptions import ConfigError
from mrvae.core.logging import get_logger
from mrvae.core.session import log_metrics
from mrvae.evaluation.curves import curve_check
from mrvae.evaluation.sweep import analytic_curve, log_spaced_betas, rd_sweep
from mrvae.experiments.common import dataset_for, linear_model_for, out_path, sample_spectrum
from mrvae.io.checkpoint import save_checkpoint
from mrvae.io.results import emit_history_csv, emit_rd_csv, write_atomic
from mrvae.linalg.decomp import MAX_DIM
from mrvae.linalg.random import RngStream
from mrvae.training.loop import mrvae_train

logger = get_logger(__name__)

GAP_HEADER = "beta,rate,analytic_rate,rate_gap,distortion,analytic_distortion,rel_distortion_gap"


def _linear_config(config: RunConfig, data_dim: int) -> RunConfig:
    if config.model is None:
        topology = ModelTopology(
            kind="linear",
            data_dim=data_dim,
            latent_dim=max(1, data_dim // 2),
            encoder_hidden=[],
            decoder_hidden=[],
            likelihood="gaussian",
        )
        return config.model_copy(update={"model": topology})
    if config.model.kind != "linear":
        raise ConfigError("linear-rd needs model.kind: linear")
    return config


@log_experiment_execution
def linear_rd(config: RunConfig, out_dir) -> int:
    data, _ = dataset_for(config)
    d = data.shape[1]
    config = _linear_config(config, d)
    k = config.model.latent_dim
    train = config.train
    rng = RngStream(train.seed)

    model = linear_model_for(config, data, rng.split("init"))
    logger.info(f"linear-rd: log beta normalization {'on' if model.conditioner.enabled else 'off'}")
    result = mrvae_train(model, data, train, rng)
    save_checkpoint(out_path(out_dir, "model.ckpt"), model, result.optimizer, result.step, config_hash(config))
    emit_history_csv(result.history, out_path(out_dir, "history.csv"))

    sweep = config.sweep
    betas = log_spaced_betas(sweep.beta_min, sweep.beta_max, sweep.num_betas)
    curve = rd_sweep(
        model, betas, data, rng.split("sweep"), sweep.mc_samples, sweep.au_threshold, sweep.workers
    )
    emit_rd_csv(curve, out_path(out_dir, "rd_curve.csv"))
    print(f"trained curve: {curve_check(curve, sweep.noise_tol).summary()}")

    if d > MAX_DIM:
        logger.warning(f"data dim {d} exceeds {MAX_DIM}; skipping the analytic curve")
        return 0

    # the model fits the sample moments, so compare against their spectrum
    analytic = analytic_curve(sample_spectrum(data), betas, k)
    emit_rd_csv(analytic, out_path(out_dir, "rd_analytic.csv"))

    rows = [GAP_HEADER]
    worst_rel, worst_rate = 0.0, 0.0
    for got, want in zip(curve.points, analytic.points):
        rel_gap = abs(got.distortion - want.distortion) / abs(want.distortion)
        rate_gap = abs(got.rate - want.rate)
        worst_rel, worst_rate = max(worst_rel, rel_gap), max(worst_rate, rate_gap)
        rows.append(
            ",".join(
                f"{v:.9g}"
                for v in (got.beta, got.rate, want.rate, rate_gap, got.distortion, want.distortion, rel_gap)
            )
        )
        print(
            f"beta={got.beta:.4g} rate={got.rate:.4f} (analytic {want.rate:.4f}) "
            f"distortion={got.distortion:.4f} (analytic {want.distortion:.4f})"
        )
        log_metrics({"beta": got.beta, "rel_distortion_gap": rel_gap, "rate_gap": rate_gap})
    write_atomic(out_path(out_dir, "rd_gaps.csv"), "\n".join(rows) + "\n")
    logger.info(f"largest relative distortion gap {worst_rel:.4g}, largest rate gap {worst_rate:.4g} nats")
    return 0


def register_experiments(registry):
    registry.add_experiment(linear_rd, name="linear-rd")
