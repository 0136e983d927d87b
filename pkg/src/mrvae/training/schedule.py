"""
Beta schedules for the single-beta baseline.
"""

from mrvae.config.schema import ConstantSchedule, LinearAnnealSchedule
from mrvae.core.exceptions import DomainError


def warmup_steps(schedule: LinearAnnealSchedule, total_steps: int) -> int:
    return max(1, int(round(schedule.warmup_fraction * total_steps)))


def beta_at(schedule, step: int, total_steps: int) -> float:
    """Beta used at optimizer step ``step`` (counted from 1).

    The linear anneal rises as target * step / warmup and holds the target
    from the end of warmup on.
    """
    if step < 1:
        raise DomainError(f"steps are counted from 1, got {step}")
    if isinstance(schedule, ConstantSchedule):
        return float(schedule.beta)
    if isinstance(schedule, LinearAnnealSchedule):
        warmup = warmup_steps(schedule, total_steps)
        return float(schedule.beta_target) * min(1.0, step / warmup)
    raise DomainError(f"unknown schedule {schedule!r}")
