"""
Full-pipeline schedule generation.

The generator advances a clock in steps of ``delta``.  At every step it
releases the operators whose inputs have arrived, then lets each idle
stage, in ascending order, start the operator chosen by
:func:`select_op`:

    - during warm-up a stage runs only forwards, ``x[i]`` of them;
    - afterwards it prefers B over F over W, lowest microbatch first.

What a stage may offer after warm-up depends on the steady policy.
Under ``window`` (the default) the stage holds exactly ``x[i]``
activations: a forward is offered only while fewer than ``x[i]``
forwards await their backward, and a backward only once ``x[i]`` do or
every forward of the stage has started.  The forwards and backwards of
a stage then alternate until its last forward, whatever the timing, and
the weight gradients fill the gaps.  Under ``greedy`` the window is only
an upper bound, and a backward is taken as soon as it arrives.  With
``defer_w`` a stage runs its W operators only once its forwards and
backwards are done.

When no stage can start anything, the clock jumps to the first step
boundary at or after the next completion or arrival.  Boundaries are
still multiples of ``delta``, so the result is the one plain stepping
gives, in fewer iterations.

Start times are decisions on the stepped clock.  A runtime executes the
per-stage order; :func:`search_schedule` measures every candidate by the
exact replay of its order.
"""
import dataclasses
import heapq
import itertools
from collections import deque
from dataclasses import dataclass

from pipeslack import msgs
from pipeslack import utils
from pipeslack.core import KINDS, PRIORITY, Operator, ScheduledOp, Timeline, WarmupPlan
from pipeslack.core import check_plan, us_to_ms
from pipeslack.executor import replay_makespan

WINDOW = 'window'
GREEDY = 'greedy'


@dataclass(frozen=True)
class GenConfig:
    """
    Generator settings.

    Attributes:
        delta (int):
            Step in microseconds.
        steady (str):
            Steady-phase policy, ``'window'`` or ``'greedy'``.
        defer_w (bool):
            Hold every W until the stage has no F or B left.
    """
    delta: int
    steady: str = WINDOW
    defer_w: bool = False

    def __post_init__(self):
        if int(self.delta) < 1:
            msgs.error('Generator step must be at least 1 us, got {0}'.format(self.delta))
        if self.steady not in self.valid_steady():
            msgs.error('Unknown steady policy "{0}"; options are {1}'.format(
                        self.steady, ', '.join(self.valid_steady())))
        object.__setattr__(self, 'delta', int(self.delta))
        object.__setattr__(self, 'defer_w', bool(self.defer_w))

    @staticmethod
    def valid_steady():
        return [WINDOW, GREEDY]

    @classmethod
    def default_for(cls, spec, granularity=30, **kwargs):
        """Step of ``t_o / granularity``, at least 1 us."""
        return cls(max(1, spec.t_o // granularity), **kwargs)

    @classmethod
    def from_par(cls, spec, par):
        """
        Build from a :class:`pipeslack.par.pipeslackpar.GenerationPar`.
        """
        kwargs = dict(steady=par['steady'], defer_w=par['defer_w'])
        if par['delta_us'] is not None:
            return cls(par['delta_us'], **kwargs)
        return cls.default_for(spec, granularity=par['granularity'], **kwargs)

    def variants(self):
        """Every steady policy and W placement at this step."""
        return [dataclasses.replace(self, steady=steady, defer_w=defer_w)
                for steady in self.valid_steady() for defer_w in (False, True)]


def select_op(stage, available, remaining_warmups):
    """
    Two-phase operator selection.

    Args:
        stage (int):
            Stage making the choice.
        available (iterable):
            :class:`pipeslack.core.Operator` objects of ``stage`` that
            may start now.
        remaining_warmups (int):
            Warm-up forwards the stage still has to run.  The caller
            decrements it when an F is returned during warm-up.

    Returns:
        :class:`pipeslack.core.Operator` or None
    """
    available = [op for op in available if op.stage == stage]
    if remaining_warmups > 0:
        forwards = [op for op in available if op.kind == 'F']
        return min(forwards, key=lambda op: op.microbatch) if len(forwards) > 0 else None
    if len(available) == 0:
        return None
    return min(available, key=lambda op: (-PRIORITY[op.kind], op.microbatch))


class _Generator:
    """State of one generation run."""

    def __init__(self, spec, plan, gen):
        self.spec = spec
        self.x = plan.x
        self.delta = gen.delta
        self.window = gen.steady == WINDOW
        self.defer_w = gen.defer_w
        S, N = spec.num_stages, spec.num_microbatches

        # Per stage and kind, (ready time, microbatch) in microbatch order
        self.pending = [{k: deque() for k in KINDS} for _ in range(S)]
        for j in range(1, N+1):
            self.pending[0]['F'].append((0, j))

        self.warmup = list(plan.x)
        self.inflight = [0]*S
        self.started = [{k: 0 for k in KINDS} for _ in range(S)]
        self.free_at = [0]*S
        self.records = [[] for _ in range(S)]
        self.events = []
        self._seq = 0
        self.remaining = 3*N*S
        self.steps = 0

    def _release(self, stage, kind, mb, end):
        S, c = self.spec.num_stages, self.spec.comm_latency
        if kind == 'F':
            if stage < S-1:
                self.pending[stage+1]['F'].append((end + c[stage], mb))
            else:
                self.pending[stage]['B'].append((end, mb))
        elif kind == 'B':
            self.pending[stage]['W'].append((end, mb))
            if stage > 0:
                self.pending[stage-1]['B'].append((end + c[stage-1], mb))

    def _offered(self, stage, kind):
        N = self.spec.num_microbatches
        if self.warmup[stage] > 0:
            return kind == 'F'
        forwards_left = self.started[stage]['F'] < N
        if kind == 'F':
            return self.inflight[stage] < self.x[stage]
        if kind == 'B':
            return not self.window or not forwards_left \
                        or self.inflight[stage] >= self.x[stage]
        return not self.defer_w or self.started[stage]['B'] == N

    def _available(self, stage, t):
        avail = []
        for kind in KINDS:
            queue = self.pending[stage][kind]
            if len(queue) == 0 or queue[0][0] > t or not self._offered(stage, kind):
                continue
            avail.append(Operator(kind, stage, queue[0][1]))
        return avail

    def _start(self, op, t):
        i = op.stage
        self.pending[i][op.kind].popleft()
        self.started[i][op.kind] += 1
        if op.kind == 'F':
            self.inflight[i] += 1
            if self.warmup[i] > 0:
                self.warmup[i] -= 1
        elif op.kind == 'B':
            self.inflight[i] -= 1
        end = t + self.spec.duration(op.kind, i)
        self.records[i].append(ScheduledOp(op, t, end))
        self.free_at[i] = end
        heapq.heappush(self.events, (end, self._seq, i, op.kind, op.microbatch))
        self._seq += 1
        self.remaining -= 1

    def _next_time(self, t):
        candidates = [self.events[0][0]] if len(self.events) > 0 else []
        for i in range(self.spec.num_stages):
            if self.free_at[i] > t:
                continue
            for kind in KINDS:
                queue = self.pending[i][kind]
                if len(queue) > 0 and queue[0][0] > t:
                    candidates.append(queue[0][0])
        if len(candidates) == 0:
            blocked = [i for i in range(self.spec.num_stages) if len(self.records[i]) <
                       3*self.spec.num_microbatches]
            msgs.error('Schedule generation stalled at {0} us; stage(s) {1} cannot '
                       'progress'.format(t, blocked))
        nxt = utils.ceil_div(min(candidates), self.delta) * self.delta
        return nxt if nxt > t else t + self.delta

    def run(self):
        t = 0
        while self.remaining > 0:
            self.steps += 1
            while len(self.events) > 0 and self.events[0][0] <= t:
                end, _, i, kind, mb = heapq.heappop(self.events)
                self._release(i, kind, mb, end)
            for i in range(self.spec.num_stages):
                # Zero-duration W operators leave the stage idle at t
                while self.free_at[i] <= t:
                    op = select_op(i, self._available(i, t), self.warmup[i])
                    if op is None:
                        break
                    self._start(op, t)
            if self.remaining == 0:
                break
            t = self._next_time(t)
        return Timeline(self.records)


def _run(spec, plan, gen):
    check_plan(spec, plan)
    positive = [d for p in spec.profiles for d in (p.t_f, p.t_b, p.t_w) if d > 0]
    if gen.delta > min(positive):
        msgs.warn('Generator step {0} us exceeds the shortest operator ({1} us)'.format(
                    gen.delta, min(positive)))
    generator = _Generator(spec, plan, gen)
    timeline = generator.run()
    return timeline, generator.steps


def generate_schedule(spec, plan, gen=None):
    """
    Generate the timeline of one iteration.

    Args:
        spec (:class:`pipeslack.core.PipelineSpec`):
            Pipeline, including the latencies the schedule is built for.
        plan (:class:`pipeslack.core.WarmupPlan`):
            Warm-up forward counts.
        gen (:class:`GenConfig`, optional):
            Step size and steady policy; ``GenConfig.default_for(spec)``
            if None.

    Returns:
        :class:`pipeslack.core.Timeline`

    Raises:
        InvalidPlanError: The plan is not monotone, its last entry is
        below 1, or ``x[0] > N``.
    """
    gen = GenConfig.default_for(spec) if gen is None else gen
    return _run(spec, plan, gen)[0]


def step_count(spec, plan, gen=None):
    """Number of loop iterations :func:`generate_schedule` executes."""
    gen = GenConfig.default_for(spec) if gen is None else gen
    return _run(spec, plan, gen)[1]


def step_bound(spec, gen):
    """``3 N S ceil(t_o / delta) + S``, the allowed number of steps."""
    S, N = spec.num_stages, spec.num_microbatches
    return 3*N*S*utils.ceil_div(spec.t_o, gen.delta) + S


def candidate_plans(spec):
    """
    Every monotone plan of ``spec``: ``N >= x[0] >= ... >= x[S-1] >= 1``.

    Plans come in descending lexicographic order, ``[N, ..., N]`` first.
    """
    S, N = spec.num_stages, spec.num_microbatches
    return [WarmupPlan(x) for x in itertools.combinations_with_replacement(range(N, 0, -1), S)]


@dataclass(frozen=True)
class SearchResult:
    """Best schedule of :func:`search_schedule`; the makespan is in microseconds."""
    plan: WarmupPlan
    gen: GenConfig
    timeline: Timeline
    makespan: int
    candidates: int

    @property
    def makespan_ms(self):
        return us_to_ms(self.makespan)


def search_schedule(spec, gen=None, plans=None, max_candidates=5000):
    """
    Generate a schedule for every candidate plan and steady policy and
    keep the one whose order replays fastest.

    Args:
        spec (:class:`pipeslack.core.PipelineSpec`):
            Pipeline, including the latencies the schedules are built
            for.
        gen (:class:`GenConfig`, optional):
            Step; every policy of :meth:`GenConfig.variants` is tried.
        plans (sequence, optional):
            :class:`pipeslack.core.WarmupPlan` objects; all monotone
            plans if None.
        max_candidates (int, optional):
            Largest number of generations allowed.

    Returns:
        :class:`SearchResult`: Ties go to the first plan, then the first
        policy, in enumeration order.
    """
    gen = GenConfig.default_for(spec) if gen is None else gen
    S, N = spec.num_stages, spec.num_microbatches
    variants = gen.variants()
    if plans is None:
        n_plans = 1
        for k in range(1, S+1):
            n_plans = n_plans * (N - 1 + k) // k
        if n_plans * len(variants) > max_candidates:
            msgs.error('{0} monotone plans for S={1}, N={2} exceed the search limit; '
                       'pass the plans to try'.format(n_plans, S, N))
        plans = candidate_plans(spec)
    plans = list(plans)
    if len(plans) == 0:
        msgs.error('No plan to search')

    best = None
    for plan in plans:
        for variant in variants:
            timeline = generate_schedule(spec, plan, variant)
            makespan = replay_makespan(spec, timeline.orders(), check=False)
            if best is None or makespan < best[3]:
                best = (plan, variant, timeline, makespan)
    msgs.work('Best of {0} schedules: plan {1}, {2} policy{3}, {4} ms'.format(
                len(plans)*len(variants), list(best[0].x), best[1].steady,
                ', deferred W' if best[1].defer_w else '', us_to_ms(best[3])))
    return SearchResult(*best, len(plans)*len(variants))
