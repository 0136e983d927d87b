"""
mrvae

Multi-rate variational autoencoders: one beta-conditioned network that
covers a whole rate-distortion curve, with the closed-form linear model,
its exact constructive hypernetwork and the experiments that check them.
"""

__version__ = "0.1.0"
__description__ = "Multi-rate VAEs with beta-conditioned gates"


def get_main():
    """Lazy import of main function to avoid loading every experiment on import"""
    from .main import main

    return main


__all__ = ["get_main"]
