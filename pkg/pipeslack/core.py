"""
Domain types shared by every module: the pipeline description, warm-up
plans, operators and timelines.

All times are integer microseconds.  Files and reports use
milliseconds; :func:`ms_to_us` and :func:`us_to_ms` convert at that
boundary.
"""
import dataclasses
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

import numpy as np

from pipeslack import msgs
from pipeslack.pipemsgs import InvalidPlanError


US_PER_MS = 1000

KINDS = ('F', 'B', 'W')

# Execution priority once warm-up is over
PRIORITY = {'B': 3, 'F': 2, 'W': 1}


def ms_to_us(value):
    """Convert a duration in milliseconds to integer microseconds."""
    try:
        value = float(value)
    except (TypeError, ValueError):
        msgs.error(f'Duration must be a number of milliseconds, got {value!r}.')
    if not np.isfinite(value):
        msgs.error(f'Duration must be finite, got {value} ms.')
    return int(round(value * US_PER_MS))


def us_to_ms(value):
    """
    Convert integer microseconds to milliseconds.

    Whole milliseconds come back as :obj:`int` so that JSON output reads
    ``10`` rather than ``10.0``.
    """
    value = int(value)
    if value % US_PER_MS == 0:
        return value // US_PER_MS
    return value / US_PER_MS


def _is_int(value):
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


@dataclass(frozen=True)
class StageProfile:
    """
    Operator durations of one pipeline stage.

    ``t_w == 0`` describes a 1F1B stage whose weight gradient is merged
    into B; its W operators are still scheduled, with zero duration.
    """
    stage_index: int
    t_f: int
    t_b: int
    t_w: int

    def __post_init__(self):
        if not all(_is_int(v) for v in (self.stage_index, self.t_f, self.t_b, self.t_w)):
            msgs.error('Stage profile fields must be integers (microseconds): {0}'.format(self))
        if self.stage_index < 0:
            msgs.error('Negative stage index {0}'.format(self.stage_index))
        if self.t_f <= 0 or self.t_b <= 0:
            msgs.error('Stage {0}: t_f and t_b must be positive'.format(self.stage_index))
        if self.t_w < 0:
            msgs.error('Stage {0}: t_w must be non-negative'.format(self.stage_index))

    def duration(self, kind):
        if kind == 'F':
            return self.t_f
        if kind == 'B':
            return self.t_b
        return self.t_w

    @property
    def t_fb(self):
        return self.t_f + self.t_b

    def to_dict(self):
        return {'stage_index': self.stage_index, 't_f': us_to_ms(self.t_f),
                't_b': us_to_ms(self.t_b), 't_w': us_to_ms(self.t_w)}

    @classmethod
    def from_dict(cls, d):
        return cls(int(d['stage_index']), ms_to_us(d['t_f']), ms_to_us(d['t_b']),
                   ms_to_us(d['t_w']))


@dataclass(frozen=True)
class PipelineSpec:
    """
    A pipeline of ``num_stages`` stages processing ``num_microbatches``
    microbatches per iteration.

    ``comm_latency[i]`` is the one-way latency of the link between
    stages i and i+1; it applies to forward and backward transfers.
    """
    num_stages: int
    num_microbatches: int
    profiles: Tuple[StageProfile, ...]
    comm_latency: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'profiles', tuple(self.profiles))
        object.__setattr__(self, 'comm_latency', tuple(int(c) for c in self.comm_latency))
        if not _is_int(self.num_stages) or self.num_stages < 1:
            msgs.error('num_stages must be a positive integer, got {0}'.format(self.num_stages))
        if not _is_int(self.num_microbatches) or self.num_microbatches < 1:
            msgs.error('num_microbatches must be a positive integer, got {0}'.format(
                        self.num_microbatches))
        if len(self.profiles) != self.num_stages:
            msgs.error('Expected {0} stage profiles, got {1}'.format(self.num_stages,
                                                                      len(self.profiles)))
        for i, p in enumerate(self.profiles):
            if p.stage_index != i:
                msgs.error('Profile {0} carries stage_index {1}'.format(i, p.stage_index))
        if len(self.comm_latency) != self.num_stages - 1:
            msgs.error('Expected {0} link latencies, got {1}'.format(self.num_stages - 1,
                                                                      len(self.comm_latency)))
        if any(c < 0 for c in self.comm_latency):
            msgs.error('Link latencies must be non-negative: {0}'.format(self.comm_latency))

    @classmethod
    def uniform(cls, num_stages, num_microbatches, t_ms, c_ms=None, t_w_ms=None):
        """
        Build a spec with identical F/B(/W) durations on every stage.

        Args:
            t_ms (float): Duration of F and B (and W unless ``t_w_ms``).
            c_ms (float or sequence, optional): One latency for every
                link, or one per link.  Zero by default.
            t_w_ms (float, optional): Duration of W.
        """
        t = ms_to_us(t_ms)
        t_w = t if t_w_ms is None else ms_to_us(t_w_ms)
        if c_ms is None:
            c_ms = 0
        c = [ms_to_us(c_ms)]*(num_stages - 1) if np.isscalar(c_ms) \
                else [ms_to_us(ci) for ci in c_ms]
        profiles = [StageProfile(i, t, t, t_w) for i in range(num_stages)]
        return cls(num_stages, num_microbatches, profiles, c)

    def with_latency(self, comm_latency):
        """Copy with a new latency vector (microseconds)."""
        return dataclasses.replace(self, comm_latency=tuple(comm_latency))

    def duration(self, kind, stage):
        return self.profiles[stage].duration(kind)

    @property
    def t_o(self):
        """Largest operator duration over all stages."""
        return max(max(p.t_f, p.t_b, p.t_w) for p in self.profiles)

    @property
    def num_links(self):
        return self.num_stages - 1

    @property
    def stage_work(self):
        """Total compute time of each stage in one iteration."""
        return np.array([self.num_microbatches * (p.t_f + p.t_b + p.t_w)
                         for p in self.profiles], dtype=np.int64)

    def to_dict(self):
        return {'num_stages': self.num_stages,
                'num_microbatches': self.num_microbatches,
                'profiles': [p.to_dict() for p in self.profiles],
                'comm_latency': [us_to_ms(c) for c in self.comm_latency]}

    @classmethod
    def from_dict(cls, d):
        return cls(int(d['num_stages']), int(d['num_microbatches']),
                   [StageProfile.from_dict(p) for p in d['profiles']],
                   [ms_to_us(c) for c in d['comm_latency']])


@dataclass(frozen=True)
class MemoryModel:
    """Device memory and the footprint of one forward activation."""
    capacity: float
    per_activation: float

    def __post_init__(self):
        if self.capacity <= 0 or self.per_activation <= 0:
            msgs.error('Memory capacity and per-activation memory must be positive')
        if self.capacity < self.per_activation:
            msgs.error('Memory capacity {0} cannot hold one activation of {1}'.format(
                        self.capacity, self.per_activation))

    @property
    def x_max(self):
        """Number of activations that fit on one device."""
        return int(self.capacity // self.per_activation)


@dataclass(frozen=True)
class WarmupPlan:
    """
    Warm-up forward count of every stage.

    No invariant is enforced on construction; :func:`validate_plan`
    reports what is wrong with a plan.
    """
    x: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'x', tuple(int(v) for v in self.x))

    def __len__(self):
        return len(self.x)

    def __getitem__(self, i):
        return self.x[i]

    def __iter__(self):
        return iter(self.x)

    @property
    def num_stages(self):
        return len(self.x)

    def to_dict(self):
        return {'x': list(self.x)}

    @classmethod
    def from_dict(cls, d):
        return cls(d['x'])


@dataclass(frozen=True)
class Slackness:
    """``delta[i] = x[i] - x[i+1]`` for every link of a plan."""
    delta: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'delta', tuple(int(v) for v in self.delta))

    def __getitem__(self, i):
        return self.delta[i]

    def __len__(self):
        return len(self.delta)


class Operator(NamedTuple):
    """One of F, B or W for a microbatch (1-based) on a stage."""
    kind: str
    stage: int
    microbatch: int

    @property
    def label(self):
        return '{0}{1}'.format(self.kind, self.microbatch)

    def __str__(self):
        return '{0}(stage={1}, mb={2})'.format(self.kind, self.stage, self.microbatch)


class ScheduledOp(NamedTuple):
    op: Operator
    start: int
    end: int

    @property
    def duration(self):
        return self.end - self.start


@dataclass(frozen=True)
class Timeline:
    """
    Time-ordered operator executions of every stage.
    """
    per_stage: Tuple[Tuple[ScheduledOp, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, 'per_stage', tuple(tuple(s) for s in self.per_stage))

    @property
    def num_stages(self):
        return len(self.per_stage)

    @property
    def makespan(self):
        return max((sop.end for stage in self.per_stage for sop in stage), default=0)

    def orders(self):
        """Per-stage operator sequences, the input of a replay."""
        return tuple(tuple(sop.op for sop in stage) for stage in self.per_stage)

    def ops(self):
        for stage in self.per_stage:
            for sop in stage:
                yield sop

    def idle_intervals(self, stage):
        """Gaps ``(start, end)`` between consecutive operators of a stage."""
        ops = self.per_stage[stage]
        return [(a.end, b.start) for a, b in zip(ops[:-1], ops[1:]) if b.start > a.end]

    def to_dict(self):
        return {'makespan_ms': us_to_ms(self.makespan),
                'stages': [[{'kind': sop.op.kind, 'mb': sop.op.microbatch,
                             'start_ms': us_to_ms(sop.start), 'end_ms': us_to_ms(sop.end)}
                            for sop in stage] for stage in self.per_stage]}

    @classmethod
    def from_dict(cls, d):
        per_stage = [[ScheduledOp(Operator(e['kind'], i, int(e['mb'])),
                                  ms_to_us(e['start_ms']), ms_to_us(e['end_ms']))
                      for e in stage] for i, stage in enumerate(d['stages'])]
        timeline = cls(per_stage)
        if 'makespan_ms' in d and ms_to_us(d['makespan_ms']) != timeline.makespan:
            msgs.error('Timeline makespan {0} ms does not match its operators ({1} ms)'.format(
                        d['makespan_ms'], us_to_ms(timeline.makespan)))
        return timeline


@dataclass(frozen=True)
class Metrics:
    """
    Summary of one timeline.

    ``accumulated_delay`` is None when no zero-latency reference replay
    was made.
    """
    makespan: int
    interior_bubble_rate: float
    utilization_bubble_rate: float
    peak_activations: Tuple[int, ...]
    accumulated_delay: Optional[int] = None

    def to_dict(self):
        return {'makespan_ms': us_to_ms(self.makespan),
                'interior_bubble_rate': self.interior_bubble_rate,
                'utilization_bubble_rate': self.utilization_bubble_rate,
                'peak_activations': list(self.peak_activations),
                'accumulated_delay_ms': None if self.accumulated_delay is None
                                            else us_to_ms(self.accumulated_delay)}


class PlanViolation(NamedTuple):
    """A broken plan constraint and the stages involved."""
    constraint: str
    stages: Tuple[int, ...]
    detail: str


def validate_plan(spec, plan):
    """
    List every constraint a warm-up plan violates for ``spec``.

    Args:
        spec (:class:`PipelineSpec`):
            Pipeline the plan is meant for.
        plan (:class:`WarmupPlan`):
            Plan to check.

    Returns:
        list: :class:`PlanViolation` entries; empty when the plan is
        valid.
    """
    x = plan.x
    S, N = spec.num_stages, spec.num_microbatches
    if len(x) != S:
        return [PlanViolation('length', (), 'plan has {0} entries for {1} stages'.format(
                                len(x), S))]

    violations = []
    if x[S-1] < 1:
        violations.append(PlanViolation('last_stage', (S-1,),
                                        'x[{0}] = {1} < 1'.format(S-1, x[S-1])))
    for i in range(S-1):
        if x[i] < x[i+1]:
            violations.append(PlanViolation('monotone', (i, i+1),
                                            'x[{0}] = {1} < x[{2}] = {3}'.format(
                                                i, x[i], i+1, x[i+1])))
    if x[0] > N:
        violations.append(PlanViolation('first_stage_bound', (0,),
                                        'x[0] = {0} > N = {1}'.format(x[0], N)))
    return violations


def check_plan(spec, plan):
    """Raise :class:`InvalidPlanError` if ``plan`` is not valid for ``spec``."""
    violations = validate_plan(spec, plan)
    if len(violations) > 0:
        msgs.error('Invalid warm-up plan {0}: '.format(list(plan.x))
                   + '; '.join(v.detail for v in violations), exc=InvalidPlanError)


def slackness_of(plan):
    """
    Slackness of every link of a plan.

    Raises:
        InvalidPlanError: The plan is not non-increasing.
    """
    x = plan.x
    delta = [x[i] - x[i+1] for i in range(len(x) - 1)]
    bad = [i for i, d in enumerate(delta) if d < 0]
    if len(bad) > 0:
        msgs.error('Warm-up counts must be non-increasing over stages; violated at '
                   'link(s) {0} of {1}'.format(bad, list(x)), exc=InvalidPlanError)
    return Slackness(delta)


def measure_warmup(timeline):
    """Number of forwards each stage runs before its first B."""
    counts = []
    for stage in timeline.per_stage:
        n = 0
        for sop in stage:
            if sop.op.kind == 'B':
                break
            if sop.op.kind == 'F':
                n += 1
        counts.append(n)
    return counts


def check_timeline(spec, timeline):
    """
    Validate a timeline against a pipeline description.

    Readiness is re-derived from scratch with transfers that never
    occupy a stage, so timelines replayed under sequential launch also
    pass (their operators only start later).

    Returns:
        list: Violation messages; empty for a valid timeline.
    """
    S, N = spec.num_stages, spec.num_microbatches
    if timeline.num_stages != S:
        return ['timeline has {0} stages, spec has {1}'.format(timeline.num_stages, S)]

    problems = []
    end = {}
    start = {}
    for i, stage in enumerate(timeline.per_stage):
        seen = set()
        prev_end = 0
        for sop in stage:
            op = sop.op
            if op.stage != i:
                problems.append('{0} listed on stage {1}'.format(op, i))
            if op in seen:
                problems.append('{0} appears more than once'.format(op))
            seen.add(op)
            if sop.duration != spec.duration(op.kind, i):
                problems.append('{0} lasts {1} us, expected {2} us'.format(
                                op, sop.duration, spec.duration(op.kind, i)))
            if sop.start < prev_end:
                problems.append('{0} starts at {1} us before the previous op ends at '
                                '{2} us'.format(op, sop.start, prev_end))
            prev_end = max(prev_end, sop.end)
            start[op] = sop.start
            end[op] = sop.end
        expected_i = {Operator(k, i, j) for k in KINDS for j in range(1, N+1)}
        missing = expected_i - seen
        if len(missing) > 0:
            problems.append('stage {0} misses {1} operator(s), e.g. {2}'.format(
                            i, len(missing), sorted(missing)[0]))

    for op, t0 in start.items():
        i, j = op.stage, op.microbatch
        deps = []
        if op.kind == 'F' and i > 0:
            deps.append((Operator('F', i-1, j), spec.comm_latency[i-1]))
        elif op.kind == 'B':
            deps.append((Operator('F', i, j), 0))
            if i < S-1:
                deps.append((Operator('B', i+1, j), spec.comm_latency[i]))
        elif op.kind == 'W':
            deps.append((Operator('B', i, j), 0))
        for dep, lag in deps:
            if dep in end and t0 < end[dep] + lag:
                problems.append('{0} starts at {1} us before {2} is available at {3} us'.format(
                                op, t0, dep, end[dep] + lag))
    return problems


def peak_activations(timeline):
    """
    Largest number of activations each stage holds.

    An F adds an activation at its completion and the matching B
    releases it at its completion; W does not hold one.
    """
    step = {'F': 1, 'B': -1, 'W': 0}
    peaks = []
    for stage in timeline.per_stage:
        held = np.cumsum([step[sop.op.kind] for sop in stage], dtype=int)
        peaks.append(int(max(0, held.max())) if held.size > 0 else 0)
    return peaks


def compute_metrics(timeline, accumulated_delay=None):
    """
    Makespan, bubble rates and peak activations of a timeline.

    The interior rate only counts idle time between the first and last
    operator of each stage; the utilization rate also counts the
    pipeline fill and drain.
    """
    makespan = timeline.makespan
    busy = np.array([sum(sop.duration for sop in stage) for stage in timeline.per_stage],
                    dtype=float)
    span = np.array([stage[-1].end - stage[0].start if len(stage) > 0 else 0
                     for stage in timeline.per_stage], dtype=float)

    interior = float((span - busy).sum() / span.sum()) if span.sum() > 0 else 0.0
    utilization = float(1 - busy.sum() / (timeline.num_stages * makespan)) \
                        if makespan > 0 else 0.0
    return Metrics(makespan, interior, utilization, tuple(peak_activations(timeline)),
                   accumulated_delay)
