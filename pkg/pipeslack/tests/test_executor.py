"""
Tests of the replay executor and latency sweeps.
"""
import functools

import numpy as np
import pytest

from pipeslack.core import Operator, PipelineSpec, StageProfile, WarmupPlan, check_timeline
from pipeslack.executor import (CommModel, accumulated_delay, normalize_orders, peak_activations,
                                replay, replay_makespan, spec_from_timeline, sweep_latency)
from pipeslack.pipemsgs import DeadlockDetected, PipeSlackError
from pipeslack.scheduler import GenConfig, generate_schedule

MS = GenConfig(1000)


def ideal_orders():
    spec = PipelineSpec.uniform(4, 12, 10)
    return spec, generate_schedule(spec, WarmupPlan([7, 5, 3, 1]), MS)


def labels_to_orders(labels):
    return [[Operator(l[0], i, int(l[1:])) for l in stage.split()]
            for i, stage in enumerate(labels)]


def test_zero_latency_replay_is_identity():
    spec, timeline = ideal_orders()
    replayed, metrics = replay(spec, timeline.orders())
    assert replayed == timeline
    assert metrics.accumulated_delay == 0
    assert metrics.peak_activations == (7, 5, 3, 1)
    assert 0 <= metrics.interior_bubble_rate <= 1
    assert 0 <= metrics.utilization_bubble_rate <= 1


@pytest.mark.parametrize('c_ms, makespan, delay', [(10, 400000, 10000), (20, 440000, 50000)])
def test_ideal_pipeline_under_latency(c_ms, makespan, delay):
    spec, timeline = ideal_orders()
    slow = spec.with_latency([c_ms*1000, 0, 0])
    replayed, metrics = replay(slow, timeline.orders())
    assert metrics.makespan == makespan
    assert metrics.accumulated_delay == delay
    assert accumulated_delay(slow, timeline.orders()) == delay
    assert replay_makespan(slow, timeline.orders()) == makespan
    assert check_timeline(slow, replayed) == []


def test_accumulated_delay_monotone():
    spec, timeline = ideal_orders()
    delays = [accumulated_delay(spec.with_latency([c*1000, 0, 0]), timeline.orders())
              for c in range(0, 50, 5)]
    assert all(np.diff(delays) >= 0)


def test_peak_activations_follow_plan():
    spec = PipelineSpec.uniform(4, 12, 10)
    timeline = generate_schedule(spec, WarmupPlan([9, 5, 3, 1]), MS)
    assert peak_activations(timeline) == [9, 5, 3, 1]

    spec = PipelineSpec.uniform(1, 3, 10)
    assert peak_activations(generate_schedule(spec, WarmupPlan([1]), MS)) == [1]


def test_head_of_line_blocking():
    spec = PipelineSpec.uniform(2, 3, 10, c_ms=[30])
    orders = labels_to_orders(['F1 F2 F3 B1 W1 B2 W2 B3 W3', 'F1 B1 F2 B2 F3 B3 W1 W2 W3'])
    decoupled = replay_makespan(spec, orders, CommModel.decoupled())
    seq1 = replay_makespan(spec, orders, CommModel.sequential(1))
    seq2 = replay_makespan(spec, orders, CommModel.sequential(2))
    assert decoupled == 150000
    assert seq1 == 170000
    assert seq1 >= seq2 >= decoupled
    assert replay_makespan(spec, orders, CommModel.sequential(1, decoupled_links=[0])) \
                == decoupled
    timeline, _ = replay(spec, orders, CommModel.sequential(1))
    assert check_timeline(spec, timeline) == []


def test_comm_dominance():
    rng = np.random.default_rng(31)
    for _ in range(50):
        S = int(rng.integers(2, 5))
        N = int(rng.integers(1, 9))
        t = rng.integers(1, 21, size=(S, 3)) * 1000
        spec = PipelineSpec(S, N, [StageProfile(i, *(int(v) for v in t[i])) for i in range(S)],
                            [int(v) for v in rng.integers(0, 31, size=S - 1) * 1000])
        extra = int(rng.integers(0, 3))
        plan = WarmupPlan([min(N, S - i + extra) for i in range(S)])
        orders = generate_schedule(spec.with_latency([0]*(S - 1)), plan, MS).orders()
        seq1 = replay_makespan(spec, orders, CommModel.sequential(1))
        seq4 = replay_makespan(spec, orders, CommModel.sequential(4))
        decoupled = replay_makespan(spec, orders, CommModel.decoupled())
        assert seq1 >= seq4 >= decoupled


def test_sequential_without_latency_matches_decoupled():
    spec, timeline = ideal_orders()
    assert replay_makespan(spec, timeline.orders(), CommModel.sequential(1)) == 390000


def test_comm_model_parse():
    assert CommModel.parse('decoupled') == CommModel.decoupled()
    assert CommModel.parse('seq') == CommModel.sequential(1)
    assert CommModel.parse('SEQ:3') == CommModel.sequential(3)
    assert str(CommModel.parse('seq:2')) == 'seq:2'
    assert str(CommModel.decoupled()) == 'decoupled'
    assert not CommModel.sequential(1, [1]).is_sequential(1)
    assert CommModel.sequential(1, [1]).is_sequential(0)
    for text in ('seq:x', 'seq:0', 'fifo'):
        with pytest.raises(PipeSlackError):
            CommModel.parse(text)


def test_deadlock():
    spec = PipelineSpec.uniform(2, 1, 10)
    orders = labels_to_orders(['B1 F1 W1', 'F1 B1 W1'])
    with pytest.raises(DeadlockDetected) as excinfo:
        replay(spec, orders)
    assert excinfo.value.frontier == [(0, Operator('B', 0, 1)), (1, Operator('F', 1, 1))]


def test_malformed_orders():
    spec = PipelineSpec.uniform(2, 1, 10)
    with pytest.raises(PipeSlackError):
        normalize_orders(spec, labels_to_orders(['F1 B1', 'F1 B1 W1']))
    with pytest.raises(PipeSlackError):
        normalize_orders(spec, labels_to_orders(['F1 B1 W1 W1', 'F1 B1 W1']))
    with pytest.raises(PipeSlackError):
        normalize_orders(spec, labels_to_orders(['F1 B1 W1']))
    orders = normalize_orders(spec, [[('F', 0, 1), ('B', 0, 1), ('W', 0, 1)],
                                     [('F', 1, 1), ('B', 1, 1), ('W', 1, 1)]])
    assert orders[1][0] == Operator('F', 1, 1)


def uniform_slack(N, delta):
    return PipelineSpec.uniform(4, N, 10), WarmupPlan([1 + 3*delta, 1 + 2*delta, 1 + delta, 1])


@functools.lru_cache(maxsize=None)
def _slack_orders(N, delta):
    spec, plan = uniform_slack(N, delta)
    return spec, generate_schedule(spec, plan, MS).orders()


def _delay(N, delta, c_ms):
    # Order built without latency, latency injected on the first link
    spec, orders = _slack_orders(N, delta)
    return accumulated_delay(spec.with_latency([c_ms*1000, 0, 0]), orders)


ABSORBED = [(delta, c_ms) for delta in range(1, 5) for c_ms in range(0, 10*(delta - 1) + 1, 5)]


@pytest.mark.parametrize('delta, c_ms', ABSORBED)
def test_absorbed_delay_does_not_grow(delta, c_ms):
    assert _delay(30, delta, c_ms) == _delay(60, delta, c_ms)
    assert _delay(30, delta, c_ms) <= 2*c_ms*1000


@pytest.mark.parametrize('delta', [1, 2, 3, 4])
def test_cascading_delay_grows(delta):
    c_ms = 10*delta
    growth = _delay(60, delta, c_ms) - _delay(30, delta, c_ms)
    assert growth >= 30 * c_ms*1000 / (2*(delta + 1))


def test_steady_phase_alternates():
    _, plan = uniform_slack(30, 3)
    _, orders = _slack_orders(30, 3)
    for x, stage in zip(plan.x, orders):
        kinds = ''.join(op.kind for op in stage)
        assert kinds.startswith('F'*x + 'BF'*(30 - x))
        assert kinds.count('W') == 30


def test_absorbed_links_add_up():
    spec, timeline = ideal_orders()
    assert accumulated_delay(spec.with_latency([10000, 0, 10000]), timeline.orders()) <= 40000


def test_spec_from_timeline():
    spec, timeline = ideal_orders()
    assert spec_from_timeline(timeline) == spec


@pytest.mark.parametrize('n_process', [1, 2])
def test_sweep_latency(n_process):
    spec, timeline = ideal_orders()
    tbl = sweep_latency(spec, timeline.orders(), 0, [0, 10000, 20000], n_process=n_process)
    assert tbl.colnames == ['c_ms', 'makespan_ms', 'accumulated_delay_ms',
                            'interior_bubble_rate', 'utilization_bubble_rate']
    assert list(tbl['c_ms']) == [0., 10., 20.]
    assert list(tbl['makespan_ms']) == [390., 400., 440.]
    assert list(tbl['accumulated_delay_ms']) == [0., 10., 50.]
    assert tbl.meta['link'] == 0
    assert tbl.meta['comm'] == 'decoupled'


def test_sweep_bad_link():
    spec, timeline = ideal_orders()
    with pytest.raises(PipeSlackError):
        sweep_latency(spec, timeline.orders(), 3, [0])
