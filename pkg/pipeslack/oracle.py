"""
Exact minimum makespan of tiny pipelines by branch and bound.

The search builds schedules one operator at a time.  On every stage the
F, B and W operators run in microbatch order, so a node only has to
choose which kind a stage runs next.  Branching follows the
active-schedule rule: among all operators that could start, take the
one that would finish first, and branch over the operators of its stage
that could start before that time.

Nodes are pruned by a per-stage bound (time the stage is free plus the
work left on it) and by remembering states already explored.  The
generator's schedule is the first incumbent.
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from astropy.table import Table

from pipeslack import msgs
from pipeslack.core import KINDS, PRIORITY, Operator, WarmupPlan, check_plan, us_to_ms
from pipeslack.pipemsgs import InstanceTooLarge
from pipeslack.scheduler import GenConfig, generate_schedule, search_schedule
from pipeslack.scheduler import step_bound, step_count

MAX_STAGES = 3
MAX_MICROBATCHES = 5


@dataclass(frozen=True)
class OracleResult:
    """
    Optimum of one instance.

    Attributes:
        makespan (int):
            Minimum makespan in microseconds.
        orders (tuple):
            Per-stage operator sequences achieving it.
        nodes (int):
            Search nodes expanded.
    """
    makespan: int
    orders: Tuple[Tuple[Operator, ...], ...]
    nodes: int

    def to_dict(self):
        return {'makespan_ms': us_to_ms(self.makespan),
                'orders': [[op.label for op in stage] for stage in self.orders],
                'nodes': self.nodes}


def default_plan(spec):
    """Plan ``x[i] = min(N, S - i)`` of the classic one-forward-one-backward schedule."""
    S, N = spec.num_stages, spec.num_microbatches
    return WarmupPlan([min(N, S - i) for i in range(S)])


class _Search:
    """Depth-first branch and bound over partial schedules."""

    def __init__(self, spec, plan):
        S, N = spec.num_stages, spec.num_microbatches
        self.spec = spec
        self.S, self.N = S, N
        self.x = None if plan is None else plan.x
        self.c = spec.comm_latency
        self.dur = [{k: spec.duration(k, i) for k in KINDS} for i in range(S)]

        self.count = [{k: 0 for k in KINDS} for _ in range(S)]
        self.free = [0]*S
        self.end = [{k: [None]*N for k in KINDS} for _ in range(S)]
        self.order = [[] for _ in range(S)]

        self.best = None
        self.best_orders = None
        self.nodes = 0
        self.visited = {}

    def seed(self, makespan, orders):
        self.best = makespan
        self.best_orders = tuple(tuple(stage) for stage in orders)

    def _ready(self, i, kind):
        """Ready time of the next ``kind`` operator of stage i, or None."""
        n = self.count[i]
        if kind == 'F':
            j = n['F']
            if j >= self.N:
                return None
            if self.x is not None and j >= self.x[i] and n['F'] - n['B'] >= self.x[i]:
                return None
            if i == 0:
                return 0
            up = self.end[i-1]['F'][j]
            return None if up is None else up + self.c[i-1]
        if self.x is not None and n['F'] < self.x[i]:
            return None
        if kind == 'B':
            j = n['B']
            if j >= n['F']:
                return None
            local = self.end[i]['F'][j]
            if i == self.S-1:
                return local
            down = self.end[i+1]['B'][j]
            return None if down is None else max(local, down + self.c[i])
        j = n['W']
        if j >= n['B']:
            return None
        return self.end[i]['B'][j]

    def _candidates(self):
        cands = []
        for i in range(self.S):
            for kind in KINDS:
                ready = self._ready(i, kind)
                if ready is None:
                    continue
                es = max(self.free[i], ready)
                cands.append((es + self.dur[i][kind], i, kind, es))
        return cands

    def _key(self):
        needed = []
        for i in range(self.S):
            n = self.count[i]
            f_from = n['B'] if i == self.S-1 else min(n['B'], self.count[i+1]['F'])
            b_from = n['W'] if i == 0 else min(n['W'], self.count[i-1]['B'])
            needed.append(tuple(self.end[i]['F'][f_from:n['F']]))
            needed.append(tuple(self.end[i]['B'][b_from:n['B']]))
        counts = tuple(n[k] for n in self.count for k in KINDS)
        return counts, tuple(self.free), tuple(needed)

    def _bound(self, current):
        rest = [self.free[i] + sum((self.N - self.count[i][k]) * self.dur[i][k] for k in KINDS)
                for i in range(self.S)]
        return max([current] + rest)

    def dfs(self, current):
        self.nodes += 1
        if all(n['W'] == self.N for n in self.count):
            if self.best is None or current < self.best:
                self.best = current
                self.best_orders = tuple(tuple(stage) for stage in self.order)
            return
        if self.best is not None and self._bound(current) >= self.best:
            return
        key = self._key()
        if key in self.visited and self.visited[key] <= current:
            return
        self.visited[key] = current

        cands = self._candidates()
        if len(cands) == 0:
            return
        c_star, i_star, _, _ = min(cands)
        branch = [(kind, es, ec) for ec, i, kind, es in cands
                  if i == i_star and (es < c_star or ec == c_star)]
        branch.sort(key=lambda b: -PRIORITY[b[0]])

        for kind, es, ec in branch:
            j = self.count[i_star][kind]
            saved_free = self.free[i_star]
            self.end[i_star][kind][j] = ec
            self.count[i_star][kind] += 1
            self.free[i_star] = ec
            self.order[i_star].append(Operator(kind, i_star, j+1))

            self.dfs(max(current, ec))

            self.order[i_star].pop()
            self.free[i_star] = saved_free
            self.count[i_star][kind] -= 1
            self.end[i_star][kind][j] = None


def optimal_makespan(spec, plan_constraint=None):
    """
    Minimum makespan over all operator orders of ``spec``.

    Args:
        spec (:class:`pipeslack.core.PipelineSpec`):
            Pipeline with at most 3 stages and 5 microbatches.
        plan_constraint (:class:`pipeslack.core.WarmupPlan`, optional):
            Force the warm-up of every stage to ``x[i]`` forwards and
            cap in-flight activations at ``x[i]`` afterwards.

    Returns:
        :class:`OracleResult`

    Raises:
        InstanceTooLarge: The instance exceeds the size guard.
        InvalidPlanError: ``plan_constraint`` is not a valid plan for
        ``spec``.
    """
    S, N = spec.num_stages, spec.num_microbatches
    if S > MAX_STAGES or N > MAX_MICROBATCHES:
        msgs.error('Oracle is limited to S <= {0} and N <= {1}; got S={2}, N={3}'.format(
                    MAX_STAGES, MAX_MICROBATCHES, S, N), exc=InstanceTooLarge)
    if plan_constraint is not None:
        check_plan(spec, plan_constraint)

    incumbent = generate_schedule(spec, default_plan(spec) if plan_constraint is None
                                  else plan_constraint, GenConfig(1))
    search = _Search(spec, plan_constraint)
    search.seed(incumbent.makespan, incumbent.orders())
    search.dfs(0)
    msgs.work('Oracle expanded {0} nodes for S={1}, N={2}'.format(search.nodes, S, N))
    return OracleResult(search.best, search.best_orders, search.nodes)


def lower_bound(spec):
    """
    Makespan lower bound: the larger of every stage's earliest start
    plus its work, and the longest single-microbatch dependency chain.
    """
    t_f = np.array([p.t_f for p in spec.profiles])
    t_b = np.array([p.t_b for p in spec.profiles])
    c = np.array(spec.comm_latency, dtype=int)
    head = np.concatenate(([0], np.cumsum(t_f[:-1] + c)))
    work = spec.stage_work
    chain = t_f.sum() + t_b.sum() + 2*c.sum() + spec.profiles[0].t_w
    return int(max((head + work).max(), chain))


def gap_study(specs, plans=None, gen=None):
    """
    Generator makespan against the optimum on a set of tiny instances.

    The generator side is :func:`pipeslack.scheduler.search_schedule`,
    measured by the exact replay of the schedule it keeps.

    Args:
        specs (sequence):
            :class:`pipeslack.core.PipelineSpec` instances.
        plans (sequence, optional):
            One plan per instance, constraining both sides.  The
            generator searches every monotone plan and the oracle runs
            unconstrained when None.
        gen (:class:`pipeslack.scheduler.GenConfig`, optional):
            Generator step; the default step of each instance if None.

    Returns:
        `astropy.table.Table`_: Columns ``num_stages, num_microbatches,
        c_ms, plan, generator_ms, optimal_ms, gap, steps, step_bound``.
        The table meta holds the share of instances within 1% and 5% of
        the optimum.
    """
    rows = []
    for idx, spec in enumerate(specs):
        plan = None if plans is None else plans[idx]
        g = GenConfig.default_for(spec) if gen is None else gen
        best = search_schedule(spec, g, plans=None if plan is None else [plan])
        optimum = optimal_makespan(spec, plan).makespan
        rows.append((spec.num_stages, spec.num_microbatches,
                     ','.join(str(us_to_ms(ci)) for ci in spec.comm_latency),
                     ','.join(str(x) for x in best.plan.x),
                     best.makespan / 1000., optimum / 1000.,
                     (best.makespan - optimum) / optimum,
                     step_count(spec, best.plan, best.gen), step_bound(spec, best.gen)))

    tbl = Table(rows=rows if len(rows) > 0 else None,
                names=('num_stages', 'num_microbatches', 'c_ms', 'plan', 'generator_ms',
                       'optimal_ms', 'gap', 'steps', 'step_bound'),
                dtype=(int, int, str, str, float, float, float, int, int))
    gaps = np.asarray(tbl['gap'], dtype=float)
    tbl.meta['within_1pct'] = float(np.mean(gaps <= 0.01)) if gaps.size > 0 else 0.
    tbl.meta['within_5pct'] = float(np.mean(gaps <= 0.05)) if gaps.size > 0 else 0.
    return tbl
