"""
Tests of the domain types, plan validation and metrics.
"""
import pytest

from pipeslack.core import (Operator, PipelineSpec, ScheduledOp, StageProfile, Timeline,
                            WarmupPlan, check_plan, compute_metrics, measure_warmup, ms_to_us,
                            peak_activations, slackness_of, us_to_ms, validate_plan)
from pipeslack.pipemsgs import InvalidPlanError, PipeSlackError


def test_time_conversion():
    assert ms_to_us(10) == 10000
    assert ms_to_us(1.5) == 1500
    assert us_to_ms(10000) == 10
    assert isinstance(us_to_ms(10000), int)
    assert us_to_ms(1500) == 1.5
    for value in (float('inf'), float('-inf'), float('nan'), 'ten', None):
        with pytest.raises(PipeSlackError):
            ms_to_us(value)


def test_profile_validation():
    with pytest.raises(PipeSlackError):
        StageProfile(0, 0, 10, 10)
    with pytest.raises(PipeSlackError):
        StageProfile(0, 10, 10, -1)
    with pytest.raises(PipeSlackError):
        StageProfile(0, 10.5, 10, 10)
    # 1F1B stage
    assert StageProfile(0, 10, 10, 0).duration('W') == 0


def test_spec_validation():
    p = [StageProfile(0, 10, 10, 10), StageProfile(1, 10, 10, 10)]
    with pytest.raises(PipeSlackError):
        PipelineSpec(2, 4, p, [0, 0])
    with pytest.raises(PipeSlackError):
        PipelineSpec(2, 4, p, [-1])
    with pytest.raises(PipeSlackError):
        PipelineSpec(2, 0, p, [0])
    with pytest.raises(PipeSlackError):
        PipelineSpec(2, 4, p[::-1], [0])


def test_spec_uniform_and_dict():
    spec = PipelineSpec.uniform(4, 12, 10, c_ms=[10, 0, 2.5])
    assert spec.comm_latency == (10000, 0, 2500)
    assert spec.t_o == 10000
    assert spec.num_links == 3
    assert list(spec.stage_work) == [360000]*4

    d = spec.to_dict()
    assert d['profiles'][0]['t_f'] == 10
    assert isinstance(d['profiles'][0]['t_f'], int)
    assert d['comm_latency'] == [10, 0, 2.5]
    assert PipelineSpec.from_dict(d) == spec


@pytest.mark.parametrize('S, N, x', [(4, 12, [7, 5, 3, 1]), (2, 5, [1, 1]),
                                     (4, 12, [12, 5, 3, 1])])
def test_validate_plan_ok(S, N, x):
    assert validate_plan(PipelineSpec.uniform(S, N, 10), WarmupPlan(x)) == []


def test_validate_plan_violations():
    spec = PipelineSpec.uniform(3, 10, 10)
    violations = validate_plan(spec, WarmupPlan([2, 4, 1]))
    assert len(violations) == 1
    assert violations[0].constraint == 'monotone'
    assert violations[0].stages == (0, 1)

    violations = validate_plan(spec, WarmupPlan([12, 4, 0]))
    assert sorted(v.constraint for v in violations) == ['first_stage_bound', 'last_stage']

    violations = validate_plan(spec, WarmupPlan([3, 1]))
    assert violations[0].constraint == 'length'

    with pytest.raises(InvalidPlanError):
        check_plan(spec, WarmupPlan([2, 4, 1]))


@pytest.mark.parametrize('x, delta', [([7, 5, 3, 1], (2, 2, 2)), ([8, 5, 3, 1], (3, 2, 2)),
                                      ([1, 1], (0,))])
def test_slackness(x, delta):
    assert slackness_of(WarmupPlan(x)).delta == delta


def test_slackness_rejects_non_monotone():
    with pytest.raises(InvalidPlanError):
        slackness_of(WarmupPlan([2, 4, 1]))


def _single_stage_timeline():
    return Timeline([[ScheduledOp(Operator('F', 0, 1), 0, 10000),
                      ScheduledOp(Operator('B', 0, 1), 20000, 30000),
                      ScheduledOp(Operator('W', 0, 1), 30000, 40000)]])


def test_metrics_by_hand():
    metrics = compute_metrics(_single_stage_timeline(), accumulated_delay=0)
    assert metrics.makespan == 40000
    assert metrics.interior_bubble_rate == pytest.approx(0.25)
    assert metrics.utilization_bubble_rate == pytest.approx(0.25)
    assert metrics.peak_activations == (1,)
    assert metrics.to_dict()['makespan_ms'] == 40


def test_timeline_helpers():
    timeline = _single_stage_timeline()
    assert timeline.makespan == 40000
    assert timeline.idle_intervals(0) == [(10000, 20000)]
    assert measure_warmup(timeline) == [1]
    assert peak_activations(timeline) == [1]
    assert [op.label for op in timeline.orders()[0]] == ['F1', 'B1', 'W1']

    d = timeline.to_dict()
    assert d['makespan_ms'] == 40
    assert d['stages'][0][1] == {'kind': 'B', 'mb': 1, 'start_ms': 20, 'end_ms': 30}
    assert Timeline.from_dict(d) == timeline

    d['makespan_ms'] = 50
    with pytest.raises(PipeSlackError):
        Timeline.from_dict(d)
