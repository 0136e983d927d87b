from typing import Iterator, Tuple

from mrvae.config.schema import ConvSpec, GradcheckConfig, ModelTopology, RunConfig
from mrvae.core.decorators import log_experiment_execution
from mrvae.core.logging import get_logger
from mrvae.core.session import log_metrics
from mrvae.evaluation.gradcheck import GradcheckReport, finite_difference_check, perturb_gates
from mrvae.experiments.common import out_path
from mrvae.io.results import write_atomic
from mrvae.linalg.random import RngStream
from mrvae.nn.model import build_model

logger = get_logger(__name__)

GATES = ("sigmoid", "sqrt_exp", "film")
LIKELIHOODS = ("bernoulli", "gaussian")


def gradcheck_topologies(cfg: GradcheckConfig) -> Iterator[Tuple[str, ModelTopology]]:
    for likelihood in LIKELIHOODS:
        for gate in GATES:
            yield f"dense/{likelihood}/{gate}", ModelTopology(
                data_dim=cfg.data_dim,
                latent_dim=cfg.latent_dim,
                encoder_hidden=[cfg.hidden],
                decoder_hidden=[cfg.hidden],
                nonlinearity="tanh",
                likelihood=likelihood,
                encoder_gate=gate,
                decoder_gate=gate,
                gate_heads=True,
            )
    if cfg.include_conv and cfg.data_dim % 4 == 0:
        for gate in GATES:
            yield f"conv/bernoulli/{gate}", ModelTopology(
                data_dim=cfg.data_dim,
                latent_dim=cfg.latent_dim,
                input_shape=(1, 4, cfg.data_dim // 4),
                conv_layers=[ConvSpec(filters=2, kernel=3, stride=1, padding=1), ConvSpec(filters=3, kernel=3, stride=2, padding=1)],
                encoder_hidden=[cfg.hidden],
                decoder_hidden=[cfg.hidden],
                nonlinearity="tanh",
                likelihood="bernoulli",
                encoder_gate=gate,
                decoder_gate=gate,
            )


def check_topology(topology: ModelTopology, cfg: GradcheckConfig, rng: RngStream) -> GradcheckReport:
    model = build_model(topology, rng.split("init"))
    perturb_gates(model, rng.split("gates"))
    n = cfg.batch_size
    x = rng.split("data").standard_normal((n, cfg.data_dim))
    if topology.likelihood == "bernoulli":
        x = (x > 0).astype(float)
    beta = rng.split("beta").uniform(0.05, 5.0, n)
    return finite_difference_check(model, x, beta, seed=rng.seed & 0xFFFF, step=cfg.step, tolerance=cfg.tolerance)


@log_experiment_execution
def gradcheck(config: RunConfig, out_dir) -> int:
    cfg = config.gradcheck
    rng = RngStream(config.train.seed).split("gradcheck")
    rows = ["case,parameter,max_rel_error"]
    failed = []
    for case, topology in gradcheck_topologies(cfg):
        report = check_topology(topology, cfg, rng.split(case))
        for name, err in report.max_rel_error.items():
            rows.append(f"{case},{name},{err:.6e}")
        status = "ok" if report.ok else "FAIL"
        print(f"{case:<24} worst={report.worst:.3e} [{status}]")
        log_metrics({"case": case, "worst": report.worst, "ok": report.ok})
        if not report.ok:
            failed.append(case)
            logger.error(f"{case}: gradient mismatch in {sorted(report.failures())}")
    write_atomic(out_path(out_dir, "gradcheck.csv"), "\n".join(rows) + "\n")
    return 2 if failed else 0


def register_experiments(registry):
    registry.add_experiment(gradcheck, name="gradcheck")
