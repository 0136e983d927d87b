import numpy as np
import pytest
from scipy import stats

from mrvae.config.schema import BetaRange, ConstantSchedule, LinearAnnealSchedule
from mrvae.core.exceptions import DomainError
from mrvae.linalg.random import RngStream
from mrvae.training.sampling import conditioner_for, sample_beta, sample_eta
from mrvae.training.schedule import beta_at, warmup_steps


class TestSampling:
    def test_eta_support_and_mean(self):
        br = BetaRange(a=0.01, b=10.0)
        eta = sample_eta(br, RngStream(0), 100_000)
        assert eta.min() >= np.log(0.01) and eta.max() <= np.log(10.0)
        half_width = 0.5 * (np.log(10.0) - np.log(0.01))
        se = half_width / np.sqrt(3.0) / np.sqrt(eta.size)
        assert abs(eta.mean() - 0.5 * np.log(0.1)) < 4 * se

    def test_eta_histogram_is_flat(self):
        br = BetaRange(a=0.01, b=10.0)
        eta = sample_eta(br, RngStream(1), 20_000)
        counts, _ = np.histogram(eta, bins=20, range=(np.log(0.01), np.log(10.0)))
        stat = stats.chisquare(counts).statistic
        assert stat < stats.chi2.ppf(0.999, df=19)

    def test_beta_stays_in_range(self):
        br = BetaRange(a=0.5, b=2.0)
        beta = sample_beta(br, RngStream(2), 10_000)
        assert beta.min() >= 0.5 and beta.max() <= 2.0

    def test_scalar_draw(self):
        assert np.ndim(sample_beta(BetaRange(), RngStream(3))) == 0

    def test_conditioner_for(self):
        cond = conditioner_for(BetaRange(a=0.1, b=1.0), normalize=False)
        assert (cond.a, cond.b, cond.enabled) == (0.1, 1.0, False)


class TestSchedules:
    def test_constant(self):
        assert beta_at(ConstantSchedule(beta=0.3), 1, 10) == 0.3
        assert beta_at(ConstantSchedule(beta=0.3), 10, 10) == 0.3

    def test_linear_anneal_knee(self):
        sched = LinearAnnealSchedule(beta_target=2.0, warmup_fraction=0.3)
        assert warmup_steps(sched, 100) == 30
        assert beta_at(sched, 1, 100) == pytest.approx(2.0 / 30)
        assert beta_at(sched, 15, 100) == pytest.approx(1.0)
        assert beta_at(sched, 30, 100) == 2.0
        assert beta_at(sched, 31, 100) == 2.0
        assert beta_at(sched, 100, 100) == 2.0

    def test_anneal_is_positive_from_first_step(self):
        sched = LinearAnnealSchedule(beta_target=1.0, warmup_fraction=0.5)
        assert all(beta_at(sched, s, 7) > 0 for s in range(1, 8))

    def test_step_zero_rejected(self):
        with pytest.raises(DomainError):
            beta_at(ConstantSchedule(), 0, 10)
