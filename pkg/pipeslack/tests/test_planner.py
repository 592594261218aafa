"""
Tests of the warm-up planners.
"""
import numpy as np
import pytest

from pipeslack.core import MemoryModel, PipelineSpec, StageProfile, slackness_of, validate_plan
from pipeslack.pipemsgs import PipeSlackError, PlannerError
from pipeslack.planner import (adapt_warmup, adapt_warmup_for, init_warmup, max_min_slackness,
                               required_slackness)


@pytest.mark.parametrize('S, capacity, x', [(4, 7, [7, 5, 3, 1]), (4, 8, [8, 5, 3, 1]),
                                            (2, 1, [1, 1]), (8, 15, [15, 13, 11, 9, 7, 5, 3, 1]),
                                            (3, 6, [6, 3, 1])])
def test_init_warmup_examples(S, capacity, x):
    assert list(init_warmup(S, MemoryModel(capacity, 1)).x) == x


def test_init_warmup_memory_units():
    assert list(init_warmup(4, MemoryModel(15., 2.)).x) == [7, 5, 3, 1]


def test_init_warmup_errors():
    with pytest.raises(PlannerError):
        init_warmup(1, MemoryModel(4, 1))
    with pytest.raises(PipeSlackError):
        MemoryModel(1, 2)


@pytest.mark.parametrize('S', [2, 3, 4, 5])
def test_init_warmup_balanced_and_optimal(S):
    for x_max in range(1, 13):
        plan = init_warmup(S, MemoryModel(x_max, 1))
        delta = slackness_of(plan).delta
        assert plan.x[0] == x_max
        assert plan.x[-1] == 1
        assert max(delta) - min(delta) <= 1
        assert min(delta) == (x_max - 1) // (S - 1)
        assert min(delta) == max_min_slackness(S, x_max)


@pytest.mark.parametrize('c_ms, x', [([0, 0, 0], [7, 5, 3, 1]), ([20, 0, 0], [8, 5, 3, 1]),
                                     ([100, 0, 0], [9, 5, 3, 1])])
def test_adapt_warmup_examples(c_ms, x):
    spec = PipelineSpec.uniform(4, 12, 10, c_ms=c_ms)
    assert list(adapt_warmup_for(spec).x) == x


def test_adapt_warmup_errors():
    spec = PipelineSpec.uniform(4, 7, 10)
    with pytest.raises(PlannerError, match='N >= 2S'):
        adapt_warmup_for(spec)
    with pytest.raises(PlannerError):
        adapt_warmup(1, 4, [StageProfile(0, 10, 10, 10)], [])


def test_adapt_warmup_budget_cap():
    spec = PipelineSpec.uniform(4, 12, 10, c_ms=[30, 30, 0])
    plan = adapt_warmup_for(spec)
    assert validate_plan(spec, plan) == []
    assert list(plan.x) == [9, 7, 3, 1]


def test_adapt_warmup_properties():
    rng = np.random.default_rng(42)
    for _ in range(200):
        S = int(rng.integers(2, 6))
        N = int(rng.integers(2*S, 3*S + 1))
        t = rng.integers(1, 21, size=(S, 3)) * 1000
        profiles = [StageProfile(i, int(t[i, 0]), int(t[i, 1]), int(t[i, 2])) for i in range(S)]
        c = [int(v) for v in rng.integers(0, 51, size=S-1) * 1000]
        spec = PipelineSpec(S, N, profiles, c)

        plan = adapt_warmup_for(spec)
        x = plan.x
        budget = N - (S - 1)
        assert validate_plan(spec, plan) == []
        assert x[-1] == 1
        assert x[0] <= budget
        delta = slackness_of(plan).delta
        for i in range(S - 1):
            assert delta[i] >= required_slackness(profiles, c, i) or delta[i] == N - 2*S \
                        or x[i] == budget
