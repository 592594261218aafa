"""
Multi-iteration replay of a straggler and failure trace.

Two policies are compared:

``static``
    One schedule, generated from the memory-bounded plan under the base
    latencies, replayed every iteration with sequential launch on every
    link.  A link failure costs one checkpoint-and-restart.
``adaptive``
    A failed link falls back to a slower path.  Every change of the
    latency vector triggers a new plan and schedule after
    ``replan_lag_iters`` iterations, and links away from their base
    latency send without blocking their stage.

With ``comm='decoupled'`` no link blocks its stage under either policy,
which isolates the effect of re-planning.
"""
import dataclasses
from dataclasses import dataclass, field
from typing import FrozenSet, List, Optional, Tuple, Union

import numpy as np
from astropy.table import Table

from pipeslack import msgs
from pipeslack.core import MemoryModel, ms_to_us, us_to_ms
from pipeslack.executor import CommModel, replay_makespan
from pipeslack.pipemsgs import CampaignError, PipeSlackError
from pipeslack.planner import adapt_warmup_for, init_warmup
from pipeslack.scheduler import GenConfig, generate_schedule

FAILURE = 'failure'

STATIC = 'static'
ADAPTIVE = 'adaptive'

SEQUENTIAL = 'sequential'
DECOUPLED = 'decoupled'


@dataclass(frozen=True)
class StragglerEvent:
    """
    Latency injected on some links over an inclusive iteration range.

    ``latency`` is in microseconds, or :data:`FAILURE` for a link that
    is down.
    """
    iter_from: int
    iter_to: int
    links: FrozenSet[int]
    latency: Union[int, str]

    def __post_init__(self):
        object.__setattr__(self, 'links', frozenset(int(l) for l in self.links))
        if self.iter_from < 0 or self.iter_to < self.iter_from:
            msgs.error('Invalid event range {0}-{1}'.format(self.iter_from, self.iter_to))
        if len(self.links) == 0:
            msgs.error('Event {0}-{1} names no link'.format(self.iter_from, self.iter_to))
        if self.latency != FAILURE and (not isinstance(self.latency, int) or self.latency < 0):
            msgs.error('Event latency must be a non-negative integer (us) or "{0}", '
                       'got {1}'.format(FAILURE, self.latency))

    @property
    def is_failure(self):
        return self.latency == FAILURE

    def covers(self, iteration):
        return self.iter_from <= iteration <= self.iter_to

    def to_dict(self):
        return {'from': self.iter_from, 'to': self.iter_to, 'links': sorted(self.links),
                'latency_ms': FAILURE if self.is_failure else us_to_ms(self.latency)}

    @classmethod
    def from_dict(cls, d):
        latency = d['latency_ms']
        if isinstance(latency, str):
            if latency.lower() not in (FAILURE, 'inf'):
                msgs.error('Unknown latency "{0}" in trace event'.format(latency))
            latency = FAILURE
        else:
            latency = ms_to_us(latency)
        return cls(int(d['from']), int(d.get('to', d['from'])), d['links'], latency)


@dataclass(frozen=True)
class CampaignConfig:
    """
    Settings of one campaign; durations in microseconds.

    ``mem`` sizes the initial plan; None means room for ``2S - 1``
    activations.  ``delta`` is the generator step, None for the default
    step of the pipeline.  ``comm`` is ``sequential`` or ``decoupled``.
    """
    total_iters: int
    base_spec: object
    policy: str
    restart_penalty: int
    failure_fallback: int = 0
    replan_lag_iters: int = 0
    queue_capacity: int = 1
    mem: Optional[MemoryModel] = None
    delta: Optional[int] = None
    comm: str = SEQUENTIAL

    def __post_init__(self):
        if self.total_iters < 1:
            msgs.error('total_iters must be positive, got {0}'.format(self.total_iters))
        if self.policy not in (STATIC, ADAPTIVE):
            msgs.error('Unknown policy "{0}"'.format(self.policy))
        if self.restart_penalty < 0 or self.failure_fallback < 0:
            msgs.error('Restart penalty and failure fallback must be non-negative')
        if self.replan_lag_iters < 0:
            msgs.error('replan_lag_iters must be non-negative')
        if self.queue_capacity < 1:
            msgs.error('queue_capacity must be at least 1')
        if self.comm not in (SEQUENTIAL, DECOUPLED):
            msgs.error('Unknown campaign communication model "{0}"'.format(self.comm))

    @classmethod
    def from_par(cls, spec, par):
        """Build from a :class:`pipeslack.par.pipeslackpar.CampaignPar`."""
        mem = None
        if par['mem_capacity'] is not None:
            mem = MemoryModel(par['mem_capacity'], par['mem_per_activation'])
        return cls(par['total_iters'], spec, par['policy'], ms_to_us(par['restart_penalty_ms']),
                   failure_fallback=ms_to_us(par['failure_fallback_ms']),
                   replan_lag_iters=par['replan_lag_iters'],
                   queue_capacity=par['queue_capacity'], mem=mem, delta=par['delta_us'],
                   comm=par['comm'])

    def with_policy(self, policy):
        return dataclasses.replace(self, policy=policy)

    @property
    def memory(self):
        if self.mem is not None:
            return self.mem
        return MemoryModel(2*self.base_spec.num_stages - 1, 1)

    def comm_model(self, decoupled_links=()):
        """Replay model; ``decoupled_links`` only matter for sequential launch."""
        if self.comm == DECOUPLED:
            return CommModel.decoupled()
        return CommModel.sequential(self.queue_capacity, decoupled_links)

    @property
    def gen(self):
        if self.delta is None:
            return GenConfig.default_for(self.base_spec)
        return GenConfig(self.delta)


@dataclass(frozen=True)
class IterationRecord:
    """One replayed iteration; times in microseconds."""
    iteration: int
    c_vector: Tuple[int, ...]
    plan: Tuple[int, ...]
    iter_time: int
    penalty: int = 0
    comm: str = ''


@dataclass
class CampaignResult:
    """Per-iteration records and aggregates of one policy."""
    policy: str
    num_microbatches: int
    records: List[IterationRecord] = field(default_factory=list)

    @property
    def iter_times(self):
        return np.array([r.iter_time for r in self.records], dtype=np.int64)

    @property
    def total_penalty(self):
        return int(sum(r.penalty for r in self.records))

    @property
    def total_time(self):
        """Sum of iteration times and restart penalties, in microseconds."""
        return int(self.iter_times.sum()) + self.total_penalty

    @property
    def restarts(self):
        return sum(1 for r in self.records if r.penalty > 0)

    @property
    def throughput(self):
        """Mean microbatches per second of simulated time."""
        if self.total_time == 0:
            return 0.
        return self.num_microbatches * len(self.records) / (self.total_time / 1e6)

    def to_table(self):
        """
        Returns:
            `astropy.table.Table`_: Columns ``iter, c_vector, policy,
            iter_time_ms, cumulative_ms``.  The cumulative time includes
            the restart penalties charged so far.
        """
        tbl = Table()
        tbl['iter'] = [r.iteration for r in self.records]
        tbl['c_vector'] = [' '.join(str(us_to_ms(c)) for c in r.c_vector)
                           for r in self.records]
        tbl['policy'] = [self.policy]*len(self.records)
        tbl['iter_time_ms'] = self.iter_times / 1000.
        tbl['cumulative_ms'] = np.cumsum(self.iter_times + np.array(
                                [r.penalty for r in self.records], dtype=np.int64)) / 1000.
        return tbl

    def to_dict(self):
        return {'policy': self.policy,
                'total_iters': len(self.records),
                'total_time_ms': us_to_ms(self.total_time),
                'restart_penalty_ms': us_to_ms(self.total_penalty),
                'restarts': self.restarts,
                'mean_throughput': self.throughput,
                'iterations': [{'iter': r.iteration,
                                'c_ms': [us_to_ms(c) for c in r.c_vector],
                                'plan': list(r.plan),
                                'comm': r.comm,
                                'iter_time_ms': us_to_ms(r.iter_time),
                                'penalty_ms': us_to_ms(r.penalty)} for r in self.records]}


def check_trace(spec, trace):
    """Raise :class:`CampaignError` if an event names a link ``spec`` lacks."""
    for idx, event in enumerate(trace):
        bad = sorted(l for l in event.links if l < 0 or l >= spec.num_links)
        if len(bad) > 0:
            msgs.error('Trace event {0} names link(s) {1}; the pipeline has {2}'.format(
                        idx, bad, spec.num_links), exc=CampaignError)


def effective_latency(base, trace, iteration, fallback=None):
    """
    Latency vector at ``iteration``: per link the largest latency of the
    events covering it, else the base latency.

    A failed link takes ``fallback``, or its base latency when
    ``fallback`` is None.
    """
    c = list(base)
    failed = set()
    for event in trace:
        if not event.covers(iteration):
            continue
        for link in event.links:
            if event.is_failure:
                failed.add(link)
            else:
                c[link] = max(c[link], event.latency)
    for link in failed:
        c[link] = base[link] if fallback is None else fallback
    return tuple(c)


class _Replayer:
    """Schedule and replay caches shared by the iterations of one run."""

    def __init__(self, spec, gen):
        self.spec = spec
        self.gen = gen
        self.schedules = {}
        self.makespans = {}

    def orders(self, plan, built_for):
        key = (plan.x, built_for)
        if key not in self.schedules:
            msgs.work('Generating schedule for plan {0} at c={1}'.format(list(plan.x),
                                                                        list(built_for)))
            timeline = generate_schedule(self.spec.with_latency(built_for), plan, self.gen)
            self.schedules[key] = timeline.orders()
        return self.schedules[key]

    def makespan(self, plan, built_for, c, comm):
        key = (plan.x, built_for, c, comm)
        if key not in self.makespans:
            self.makespans[key] = replay_makespan(self.spec.with_latency(c),
                                                  self.orders(plan, built_for), comm,
                                                  check=False)
        return self.makespans[key]


def _run_static(cfg, trace, replayer, plan):
    base = cfg.base_spec.comm_latency
    comm = cfg.comm_model()
    result = CampaignResult(STATIC, cfg.base_spec.num_microbatches)
    charged = set()
    for k in range(cfg.total_iters):
        c = effective_latency(base, trace, k)
        penalty = 0
        for idx, event in enumerate(trace):
            if event.is_failure and event.covers(k) and idx not in charged:
                charged.add(idx)
                penalty += cfg.restart_penalty
                msgs.info('Iteration {0}: link failure, checkpoint and restart'.format(k))
        try:
            t_iter = replayer.makespan(plan, base, c, comm)
        except PipeSlackError as err:
            msgs.error('Static replay failed at iteration {0}: {1}'.format(k, err),
                       exc=CampaignError, iteration=k)
        result.records.append(IterationRecord(k, c, plan.x, t_iter, penalty, str(comm)))
    return result


def _run_adaptive(cfg, trace, replayer, init_plan):
    spec = cfg.base_spec
    base = spec.comm_latency
    result = CampaignResult(ADAPTIVE, spec.num_microbatches)

    plan, built_for = init_plan, base
    observed = base
    pending = None
    for k in range(cfg.total_iters):
        c = effective_latency(base, trace, k, fallback=cfg.failure_fallback)
        if c != observed:
            observed = c
            pending = (k + cfg.replan_lag_iters, c)
        if pending is not None and k >= pending[0]:
            target = pending[1]
            pending = None
            try:
                if target == base:
                    plan = init_plan
                else:
                    plan = adapt_warmup_for(spec.with_latency(target))
                replayer.orders(plan, target)
            except PipeSlackError as err:
                msgs.error('Re-planning failed at iteration {0}: {1}'.format(k, err),
                           exc=CampaignError, iteration=k)
            built_for = target
            msgs.info('Iteration {0}: installed plan {1} for c={2} ms'.format(
                        k, list(plan.x), [us_to_ms(ci) for ci in target]))

        comm = cfg.comm_model([i for i in range(spec.num_links) if c[i] != base[i]])
        try:
            t_iter = replayer.makespan(plan, built_for, c, comm)
        except PipeSlackError as err:
            msgs.error('Adaptive replay failed at iteration {0}: {1}'.format(k, err),
                       exc=CampaignError, iteration=k)
        result.records.append(IterationRecord(k, c, plan.x, t_iter, 0, str(comm)))
    return result


def run_campaign(cfg, trace):
    """
    Replay ``cfg.total_iters`` iterations under ``trace``.

    Args:
        cfg (:class:`CampaignConfig`):
            Campaign settings, including the policy.
        trace (sequence):
            :class:`StragglerEvent` objects.

    Returns:
        :class:`CampaignResult`

    Raises:
        CampaignError: The trace names an invalid link, or planning,
        generation or replay failed; ``iteration`` tells where.
    """
    spec = cfg.base_spec
    trace = list(trace)
    check_trace(spec, trace)
    try:
        init_plan = init_warmup(spec.num_stages, cfg.memory)
        replayer = _Replayer(spec, cfg.gen)
        replayer.orders(init_plan, spec.comm_latency)
    except PipeSlackError as err:
        msgs.error('Initial plan failed: {0}'.format(err), exc=CampaignError, iteration=0)

    msgs.info('Running {0} iterations with the {1} policy, initial plan {2}'.format(
                cfg.total_iters, cfg.policy, list(init_plan.x)))
    if cfg.policy == STATIC:
        result = _run_static(cfg, trace, replayer, init_plan)
    else:
        result = _run_adaptive(cfg, trace, replayer, init_plan)
    msgs.info('{0}: total {1} ms, {2:.1f} microbatches/s'.format(
                cfg.policy, us_to_ms(result.total_time), result.throughput))
    return result


def compare_policies(spec, par, trace):
    """
    Run the static and the adaptive policy on the same trace.

    Args:
        spec (:class:`pipeslack.core.PipelineSpec`):
            Base pipeline.
        par (:class:`pipeslack.par.pipeslackpar.CampaignPar`):
            Campaign parameters; ``policy`` is ignored.
        trace (sequence):
            :class:`StragglerEvent` objects.

    Returns:
        tuple: Static and adaptive :class:`CampaignResult`.
    """
    cfg = CampaignConfig.from_par(spec, par)
    return run_campaign(cfg.with_policy(STATIC), trace), \
                run_campaign(cfg.with_policy(ADAPTIVE), trace)
