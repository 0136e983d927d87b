import importlib
import pkgutil
from typing import Callable, Dict

from mrvae.core.logging import get_logger

logger = get_logger(__name__)

Experiment = Callable[..., int]


class ExperimentRegistry:
    """Named experiments callable as ``fn(run_config, out_dir) -> exit code``."""

    def __init__(self):
        self._experiments: Dict[str, Experiment] = {}

    def add_experiment(self, fn: Experiment, name: str) -> None:
        if name in self._experiments:
            logger.warning(f"Experiment '{name}' registered twice; keeping the latest.")
        self._experiments[name] = fn

    def get(self, name: str) -> Experiment:
        return self._experiments[name]

    def names(self):
        return sorted(self._experiments)

    def __contains__(self, name: str) -> bool:
        return name in self._experiments


def register_all_experiments(registry: ExperimentRegistry) -> None:
    """
    Dynamically discovers and registers all experiment modules inside this package.

    Any module inside the current package that defines a function:
        register_experiments(registry)

    will be automatically imported and executed.
    """
    logger.debug("Starting dynamic experiment registration...")

    for module_finder, module_name, ispkg in pkgutil.iter_modules(__path__):
        if ispkg:
            continue

        full_module_path = f"{__name__}.{module_name}"
        try:
            module = importlib.import_module(full_module_path)
            register_func = getattr(module, "register_experiments", None)

            if callable(register_func):
                logger.debug(f"Registering experiments from '{module_name}'...")
                register_func(registry)
            else:
                logger.debug(
                    f"Module '{module_name}' skipped (no 'register_experiments' function found)."
                )
        except Exception as e:
            logger.exception(
                f"Failed to import or register experiments from '{module_name}': {e}"
            )

    logger.debug(f"Experiment registration completed: {registry.names()}")


def default_registry() -> ExperimentRegistry:
    registry = ExperimentRegistry()
    register_all_experiments(registry)
    return registry
