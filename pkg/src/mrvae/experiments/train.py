from mrvae.config.schema import RunConfig, config_hash
from mrvae.core.decorators import log_experiment_execution
from mrvae.core.logging import get_logger
from mrvae.experiments.common import dataset_for, model_for, out_path
from mrvae.io.checkpoint import save_checkpoint
from mrvae.io.results import emit_history_csv
from mrvae.linalg.random import RngStream
from mrvae.training.loop import betavae_train, mrvae_train

logger = get_logger(__name__)


def _finish(config: RunConfig, out_dir, result) -> int:
    save_checkpoint(
        out_path(out_dir, "model.ckpt"),
        result.model,
        result.optimizer,
        result.step,
        config_hash(config),
    )
    emit_history_csv(result.history, out_path(out_dir, "history.csv"))
    last = result.history[-1]
    print(f"trained {result.step} steps: loss={last.loss:.4f} rate={last.rate:.4f} distortion={last.distortion:.4f}")
    return 0


@log_experiment_execution
def train_mrvae(config: RunConfig, out_dir) -> int:
    data, _ = dataset_for(config)
    rng = RngStream(config.train.seed)
    model = model_for(config, data, rng.split("init"))
    result = mrvae_train(model, data, config.train, rng)
    return _finish(config, out_dir, result)


@log_experiment_execution
def train_betavae(config: RunConfig, out_dir) -> int:
    data, _ = dataset_for(config)
    rng = RngStream(config.train.seed)
    model = model_for(config, data, rng.split("init"))
    result = betavae_train(model, data, config.train.schedule, config.train, rng)
    return _finish(config, out_dir, result)


def register_experiments(registry):
    logger.debug("Registering training experiments...")
    registry.add_experiment(train_mrvae, name="train-mrvae")
    registry.add_experiment(train_betavae, name="train-betavae")
