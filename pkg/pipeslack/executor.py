"""
Replay of fixed per-stage operator orders under injected link latencies.

A replay is exact: every operator starts as soon as its stage is free
and its inputs have arrived, with no time stepping.  Two communication
models are available:

``decoupled``
    Transfers never occupy the sending stage.
``sequential``
    Every directed link holds at most ``queue_capacity`` sends in flight
    and a send stays in flight for ``c``.  The m-th send on a link
    launches at ``max(end, launch[m-k] + c)`` and the sending stage
    cannot start its next operator before that launch.
"""
import multiprocessing
from multiprocessing import Process, Queue
from dataclasses import dataclass
from typing import FrozenSet

import numpy as np
from astropy.table import Table

from pipeslack import msgs
from pipeslack.core import KINDS, Operator, ScheduledOp, Timeline, StageProfile, PipelineSpec
from pipeslack.core import compute_metrics, peak_activations, us_to_ms
from pipeslack.pipemsgs import DeadlockDetected

__all__ = ['CommModel', 'replay', 'replay_makespan', 'accumulated_delay', 'peak_activations',
           'sweep_latency', 'spec_from_timeline', 'normalize_orders']


@dataclass(frozen=True)
class CommModel:
    """
    Communication model of a replay.

    Attributes:
        variant (str):
            ``decoupled`` or ``sequential``.
        queue_capacity (int):
            Sends a link holds in flight under ``sequential``.
        decoupled_links (frozenset):
            Links exempt from sequential launch.
    """
    variant: str = 'decoupled'
    queue_capacity: int = 1
    decoupled_links: FrozenSet[int] = frozenset()

    def __post_init__(self):
        if self.variant not in ('decoupled', 'sequential'):
            msgs.error('Unknown communication model "{0}"'.format(self.variant))
        if int(self.queue_capacity) < 1:
            msgs.error('queue_capacity must be at least 1, got {0}'.format(self.queue_capacity))
        object.__setattr__(self, 'decoupled_links', frozenset(self.decoupled_links))

    @classmethod
    def decoupled(cls):
        return cls('decoupled')

    @classmethod
    def sequential(cls, queue_capacity=1, decoupled_links=()):
        return cls('sequential', queue_capacity, frozenset(decoupled_links))

    @classmethod
    def parse(cls, text):
        """Parse ``decoupled``, ``sequential`` or ``seq:K``."""
        text = text.strip().lower()
        if text == 'decoupled':
            return cls.decoupled()
        if text in ('seq', 'sequential'):
            return cls.sequential()
        if text.startswith('seq:'):
            try:
                k = int(text[4:])
            except ValueError:
                msgs.error('Cannot parse queue capacity in "{0}"'.format(text))
            return cls.sequential(k)
        msgs.error('Unknown communication model "{0}"; use decoupled or seq:K'.format(text))

    @classmethod
    def from_par(cls, par):
        """Build from a :class:`pipeslack.par.pipeslackpar.CommPar`."""
        if par['model'] == 'decoupled':
            return cls.decoupled()
        return cls.sequential(par['queue_capacity'])

    def is_sequential(self, link):
        return self.variant == 'sequential' and link not in self.decoupled_links

    def __str__(self):
        if self.variant == 'decoupled':
            return 'decoupled'
        name = 'seq:{0}'.format(self.queue_capacity)
        if len(self.decoupled_links) > 0:
            name += ' (decoupled links {0})'.format(sorted(self.decoupled_links))
        return name


def normalize_orders(spec, orders):
    """
    Check that ``orders`` holds every operator identity of each stage
    exactly once and return it as tuples of :class:`Operator`.
    """
    S, N = spec.num_stages, spec.num_microbatches
    if len(orders) != S:
        msgs.error('Order has {0} stage(s), the pipeline has {1}'.format(len(orders), S))
    normalized = []
    for i, stage in enumerate(orders):
        ops = tuple(Operator(*op) for op in stage)
        expected = {Operator(k, i, j) for k in KINDS for j in range(1, N+1)}
        if len(ops) != len(expected) or set(ops) != expected:
            extra = sorted(set(ops) - expected)
            missing = sorted(expected - set(ops))
            msgs.error('Stage {0} order must hold each of its {1} operators once '
                       '(unexpected: {2}, missing: {3}, length {4})'.format(
                        i, len(expected), [str(o) for o in extra[:3]],
                        [str(o) for o in missing[:3]], len(ops)))
        normalized.append(ops)
    return tuple(normalized)


def _execute(spec, orders, comm):
    """Per-stage :class:`ScheduledOp` lists of one replay."""
    S = spec.num_stages
    c = spec.comm_latency
    ptr = [0]*S
    free = [0]*S
    end = {}
    # Arrival of each operator's remote input, keyed by the consuming operator
    arrival = {}
    # Launch times per directed link, keyed by ('F', link) or ('B', link)
    launches = {}
    records = [[] for _ in range(S)]
    remaining = sum(len(o) for o in orders)

    def ready_time(op):
        i, j = op.stage, op.microbatch
        if op.kind == 'F':
            if i == 0:
                return 0
            return arrival.get(op)
        if op.kind == 'B':
            local = end.get(Operator('F', i, j))
            if local is None:
                return None
            if i == S-1:
                return local
            remote = arrival.get(op)
            return None if remote is None else max(local, remote)
        return end.get(Operator('B', i, j))

    def send(op, t_end):
        i, j = op.stage, op.microbatch
        if op.kind == 'F' and i < S-1:
            link, target = i, Operator('F', i+1, j)
        elif op.kind == 'B' and i > 0:
            link, target = i-1, Operator('B', i-1, j)
        else:
            return t_end
        launch = t_end
        if comm.is_sequential(link):
            history = launches.setdefault((op.kind, link), [])
            k = comm.queue_capacity
            if len(history) >= k:
                launch = max(t_end, history[-k] + c[link])
            history.append(launch)
        arrival[target] = launch + c[link]
        return launch

    while remaining > 0:
        progressed = False
        for i in range(S):
            while ptr[i] < len(orders[i]):
                op = orders[i][ptr[i]]
                ready = ready_time(op)
                if ready is None:
                    break
                start = max(free[i], ready)
                t_end = start + spec.duration(op.kind, i)
                end[op] = t_end
                records[i].append(ScheduledOp(op, start, t_end))
                free[i] = max(t_end, send(op, t_end))
                ptr[i] += 1
                remaining -= 1
                progressed = True
        if not progressed:
            frontier = [(i, orders[i][ptr[i]]) for i in range(S) if ptr[i] < len(orders[i])]
            msgs.error('Replay deadlocked with {0} operator(s) left; blocked heads: {1}'.format(
                        remaining, ', '.join('stage {0}: {1}'.format(i, op.label)
                                             for i, op in frontier)),
                       exc=DeadlockDetected, frontier=frontier)
    return records


def replay_makespan(spec, orders, comm=None, check=True):
    """
    Makespan of a replay, without building metrics.

    ``check=False`` skips the order validation for callers that already
    normalized ``orders``.
    """
    comm = CommModel.decoupled() if comm is None else comm
    if check:
        orders = normalize_orders(spec, orders)
    records = _execute(spec, orders, comm)
    return max((r[-1].end for r in records if len(r) > 0), default=0)


def replay(spec, orders, comm=None):
    """
    Replay ``orders`` on ``spec``.

    Args:
        spec (:class:`pipeslack.core.PipelineSpec`):
            Pipeline with the injected latencies.
        orders (sequence):
            Per-stage operator sequences, e.g. ``Timeline.orders()``.
        comm (:class:`CommModel`, optional):
            Communication model; decoupled if None.

    Returns:
        tuple: :class:`pipeslack.core.Timeline` and
        :class:`pipeslack.core.Metrics`.  The metrics carry the
        accumulated delay against a zero-latency replay of the same
        order.

    Raises:
        DeadlockDetected: The order contradicts the dependencies.
    """
    comm = CommModel.decoupled() if comm is None else comm
    orders = normalize_orders(spec, orders)
    timeline = Timeline(_execute(spec, orders, comm))
    reference = replay_makespan(spec.with_latency([0]*spec.num_links), orders, comm,
                                check=False)
    return timeline, compute_metrics(timeline, timeline.makespan - reference)


def accumulated_delay(spec, orders, comm=None):
    """
    Makespan under ``spec.comm_latency`` minus the makespan of the same
    order with every latency set to zero, in microseconds.
    """
    comm = CommModel.decoupled() if comm is None else comm
    orders = normalize_orders(spec, orders)
    zero = spec.with_latency([0]*spec.num_links)
    return replay_makespan(spec, orders, comm, check=False) \
                - replay_makespan(zero, orders, comm, check=False)


def _sweep_worker(work_queue, done_queue, spec, orders, link, comm):
    """Multiprocessing worker for :func:`sweep_latency`"""
    for idx, c_us in iter(work_queue.get, None):
        latency = list(spec.comm_latency)
        latency[link] = c_us
        timeline, metrics = replay(spec.with_latency(latency), orders, comm)
        done_queue.put((idx, c_us, metrics))


def sweep_latency(spec, orders, link, c_values, comm=None, n_process=1):
    """
    Replay one order over a grid of latencies on one link.

    Args:
        spec (:class:`pipeslack.core.PipelineSpec`):
            Pipeline; latencies of the other links are kept.
        orders (sequence):
            Per-stage operator sequences.
        link (int):
            Link whose latency is swept.
        c_values (sequence):
            Latencies in microseconds.
        comm (:class:`CommModel`, optional):
            Communication model.
        n_process (int, optional):
            Worker processes; capped at the CPU count and the grid size.

    Returns:
        `astropy.table.Table`_: Columns ``c_ms, makespan_ms,
        accumulated_delay_ms, interior_bubble_rate,
        utilization_bubble_rate``, sorted by ``c_ms``.
    """
    if link < 0 or link >= spec.num_links:
        msgs.error('Link {0} out of range; the pipeline has {1} link(s)'.format(
                    link, spec.num_links))
    comm = CommModel.decoupled() if comm is None else comm
    orders = normalize_orders(spec, orders)
    c_values = [int(c) for c in c_values]
    n_point = len(c_values)

    n_process = min(n_process, multiprocessing.cpu_count(), max(n_point, 1))
    results = []
    if n_process <= 1:
        for idx, c_us in enumerate(c_values):
            latency = list(spec.comm_latency)
            latency[link] = c_us
            results.append((idx, c_us, replay(spec.with_latency(latency), orders, comm)[1]))
    else:
        msgs.info('Sweeping {0} latencies on link {1} with n_process={2}'.format(
                    n_point, link, n_process))
        work_queue = Queue()
        done_queue = Queue()
        for idx, c_us in enumerate(c_values):
            work_queue.put((idx, c_us))
        for w in range(n_process):
            work_queue.put(None)
        processes = []
        for w in range(n_process):
            p = Process(target=_sweep_worker,
                        args=(work_queue, done_queue, spec, orders, link, comm))
            processes.append(p)
            p.start()
        for ii in range(n_point):
            results.append(done_queue.get())
        for p in processes:
            p.join()

    results.sort(key=lambda r: r[0])
    tbl = Table()
    tbl['c_ms'] = np.array([r[1] for r in results], dtype=float) / 1000.
    tbl['makespan_ms'] = np.array([r[2].makespan for r in results], dtype=float) / 1000.
    tbl['accumulated_delay_ms'] = np.array([r[2].accumulated_delay for r in results],
                                           dtype=float) / 1000.
    tbl['interior_bubble_rate'] = np.array([r[2].interior_bubble_rate for r in results])
    tbl['utilization_bubble_rate'] = np.array([r[2].utilization_bubble_rate for r in results])
    tbl.meta['link'] = link
    tbl.meta['comm'] = str(comm)
    return tbl


def spec_from_timeline(timeline):
    """
    Zero-latency :class:`pipeslack.core.PipelineSpec` whose durations
    are the ones measured in ``timeline``.

    Every operator of a kind must last the same on a stage.
    """
    profiles = []
    n_mb = None
    for i, stage in enumerate(timeline.per_stage):
        durations = {}
        for sop in stage:
            durations.setdefault(sop.op.kind, set()).add(sop.duration)
        if set(durations.keys()) != set(KINDS):
            msgs.error('Stage {0} of the timeline lacks some operator kinds'.format(i))
        for kind, values in durations.items():
            if len(values) != 1:
                msgs.error('Stage {0}: {1} operators have different durations {2}'.format(
                            i, kind, sorted(us_to_ms(v) for v in values)))
        n_stage = len(stage) // 3
        if n_mb is not None and n_stage != n_mb:
            msgs.error('Stages of the timeline hold different numbers of microbatches')
        n_mb = n_stage
        profiles.append(StageProfile(i, durations['F'].pop(), durations['B'].pop(),
                                     durations['W'].pop()))
    return PipelineSpec(len(profiles), n_mb, profiles, [0]*(len(profiles) - 1))
