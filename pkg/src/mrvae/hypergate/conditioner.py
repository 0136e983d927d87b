from dataclasses import dataclass

import numpy as np

from mrvae.core.exceptions import DomainError

SQRT12 = float(np.sqrt(12.0))


@dataclass(frozen=True)
class BetaConditioner:
    """Standardizes eta = log(beta) for beta ~ logU[a, b].

    With ``enabled`` false the raw eta is passed through, which is what the
    constructive linear hypernetwork expects.
    """

    a: float = 0.01
    b: float = 10.0
    enabled: bool = True

    def __post_init__(self):
        if not (0 < self.a < self.b):
            raise DomainError(f"conditioner range needs 0 < a < b, got ({self.a}, {self.b})")

    @property
    def mu_eta(self) -> float:
        return 0.5 * (np.log(self.a) + np.log(self.b))

    @property
    def sigma_eta(self) -> float:
        return (np.log(self.b) - np.log(self.a)) / SQRT12

    def normalize(self, eta):
        if not self.enabled:
            return eta
        return (np.asarray(eta, dtype=np.float64) - self.mu_eta) / self.sigma_eta

    def normalize_beta(self, beta):
        beta = np.asarray(beta, dtype=np.float64)
        if np.any(beta <= 0):
            raise DomainError("beta must be positive")
        return self.normalize(np.log(beta))

    def covers(self, beta) -> bool:
        beta = np.asarray(beta, dtype=np.float64)
        return bool(np.all((beta >= self.a) & (beta <= self.b)))


def normalize_eta(cond: BetaConditioner, eta):
    """(eta - mu_eta) / sigma_eta for the exact moments of U[ln a, ln b]."""
    return cond.normalize(eta)
