from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from mrvae.core.exceptions import DimensionError, DomainError


class Provenance(str, Enum):
    ANALYTIC = "analytic"
    MRVAE = "mrvae"
    BETAVAE_SWEEP = "betavae_sweep"


@dataclass(frozen=True)
class RDPoint:
    beta: float
    rate: float
    distortion: float
    elbo_beta1: Optional[float] = None
    au: Optional[int] = None

    def __post_init__(self):
        if not self.beta > 0:
            raise DomainError(f"beta must be positive, got {self.beta}")
        if not np.isfinite(self.distortion):
            raise DomainError("distortion must be finite")
        if self.rate < 0:
            raise DomainError(f"rate must be non-negative, got {self.rate}")


@dataclass
class RDCurve:
    points: List[RDPoint] = field(default_factory=list)
    provenance: Provenance = Provenance.MRVAE

    def __post_init__(self):
        self.provenance = Provenance(self.provenance)
        betas = [p.beta for p in self.points]
        if any(b1 >= b2 for b1, b2 in zip(betas, betas[1:])):
            raise DimensionError("curve betas must be strictly increasing")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def betas(self) -> np.ndarray:
        return np.array([p.beta for p in self.points])

    @property
    def rates(self) -> np.ndarray:
        return np.array([p.rate for p in self.points])

    @property
    def distortions(self) -> np.ndarray:
        return np.array([p.distortion for p in self.points])


@dataclass
class CurveReport:
    noise_tol: float
    violations: List[Tuple[int, int, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        if self.ok:
            return f"no violations (noise_tol={self.noise_tol})"
        pairs = ", ".join(f"({i},{j}) {what}" for i, j, what in self.violations)
        return f"{len(self.violations)} violation(s) (noise_tol={self.noise_tol}): {pairs}"


def curve_check(curve: RDCurve, noise_tol: float = 0.5) -> CurveReport:
    """Flag adjacent pairs where rate rises or distortion falls as beta grows.

    Analytic curves are checked with zero tolerance.
    """
    if len(curve) < 2:
        raise DomainError("curve_check needs at least two points")
    tol = 0.0 if curve.provenance is Provenance.ANALYTIC else float(noise_tol)
    report = CurveReport(noise_tol=tol)
    for i, (lo, hi) in enumerate(zip(curve.points, curve.points[1:])):
        problems = []
        if hi.rate > lo.rate + tol:
            problems.append("rate increased")
        if hi.distortion < lo.distortion - tol:
            problems.append("distortion decreased")
        if problems:
            report.violations.append((i, i + 1, " and ".join(problems)))
    return report
