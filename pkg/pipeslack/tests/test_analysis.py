"""
Tests of the delay regime model.
"""
import numpy as np
import pytest

from pipeslack.analysis import (ABSORBED, CASCADING, absorption_holds, classify_delay,
                                delay_table, total_estimate)
from pipeslack.core import PipelineSpec, StageProfile, WarmupPlan
from pipeslack.pipemsgs import InvalidPlanError, PipeSlackError


def test_absorption_boundary():
    assert absorption_holds(PipelineSpec.uniform(2, 8, 10, c_ms=10), 2, 0)
    assert not absorption_holds(PipelineSpec.uniform(2, 8, 10, c_ms=11), 2, 0)


def test_absorption_heterogeneous():
    spec = PipelineSpec(2, 8, [StageProfile(0, 10000, 10000, 10000),
                               StageProfile(1, 20000, 20000, 20000)], [10000])
    assert absorption_holds(spec, 1, 0)


def test_absorption_bad_link():
    with pytest.raises(PipeSlackError):
        absorption_holds(PipelineSpec.uniform(2, 8, 10), 2, 1)


def test_classify_examples():
    plan = WarmupPlan([7, 5, 3, 1])
    regime = classify_delay(PipelineSpec.uniform(4, 12, 10, c_ms=[10, 0, 0]), plan, 0)
    assert regime.variant == ABSORBED
    assert regime.threshold_ms == pytest.approx(10.)
    assert regime.estimate_ms == pytest.approx(10.)

    regime = classify_delay(PipelineSpec.uniform(4, 12, 10, c_ms=[20, 0, 0]), plan, 0)
    assert regime.variant == CASCADING
    assert regime.estimate_ms == pytest.approx(80.)

    with pytest.raises(InvalidPlanError):
        classify_delay(PipelineSpec.uniform(3, 12, 10), WarmupPlan([2, 4, 1]), 0)


def test_zero_latency():
    for delta in range(1, 6):
        plan = WarmupPlan([1 + delta, 1])
        regime = classify_delay(PipelineSpec.uniform(2, 12, 10), plan, 0)
        assert regime.variant == ABSORBED
        assert regime.estimate == 0
    # No slackness at all: nothing to absorb with, but nothing to absorb either
    regime = classify_delay(PipelineSpec.uniform(2, 5, 10), WarmupPlan([1, 1]), 0)
    assert regime.variant == CASCADING
    assert regime.estimate == 0


def test_total_estimate():
    plan = WarmupPlan([7, 5, 3, 1])
    assert total_estimate(PipelineSpec.uniform(4, 12, 10), plan) == 0
    assert total_estimate(PipelineSpec.uniform(4, 12, 10, c_ms=[10, 10, 0]), plan) \
                == pytest.approx(20000.)
    assert total_estimate(PipelineSpec.uniform(4, 12, 10, c_ms=[5, 0, 5]), plan) \
                == pytest.approx(10000.)


def test_uniform_threshold():
    for delta in range(1, 6):
        for t in (1, 10, 25):
            spec = PipelineSpec.uniform(2, 12, t)
            regime = classify_delay(spec, WarmupPlan([1 + delta, 1]), 0)
            assert regime.threshold == pytest.approx((delta - 1) * t * 1000)


def test_consistency_and_monotonicity():
    rng = np.random.default_rng(7)
    for _ in range(200):
        t = rng.integers(1, 30, size=4) * 1000
        delta = int(rng.integers(0, 6))
        spec = PipelineSpec(2, 16, [StageProfile(0, int(t[0]), int(t[1]), 0),
                                    StageProfile(1, int(t[2]), int(t[3]), 0)],
                            [int(rng.integers(0, 60)) * 1000])
        plan = WarmupPlan([1 + delta, 1])
        regime = classify_delay(spec, plan, 0)
        assert (regime.variant == ABSORBED) == absorption_holds(spec, delta, 0)
        assert regime.estimate >= 0

    plan = WarmupPlan([7, 5, 3, 1])
    estimates = [classify_delay(PipelineSpec.uniform(4, 12, 10, c_ms=[c, 0, 0]), plan, 0).estimate
                 for c in range(0, 60, 5)]
    assert all(np.diff(estimates) >= 0)


def test_delay_table():
    tbl = delay_table(PipelineSpec.uniform(4, 12, 10, c_ms=[10, 20, 0]), WarmupPlan([7, 5, 3, 1]))
    assert tbl.colnames == ['link', 'delta', 'c_ms', 'regime', 'threshold_ms', 'estimate_ms']
    assert list(tbl['regime']) == [ABSORBED, CASCADING, ABSORBED]
    assert tbl.meta['total_estimate_ms'] == pytest.approx(90.)
