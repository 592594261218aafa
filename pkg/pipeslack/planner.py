"""
Warm-up forward-count planning.

:func:`init_warmup` sizes the plan from device memory alone and spreads
the slackness as evenly as possible over the links.
:func:`adapt_warmup` sizes each link's slackness so that its current
latency is absorbed.
"""
import itertools

from pipeslack import msgs
from pipeslack import utils
from pipeslack.core import WarmupPlan
from pipeslack.pipemsgs import PlannerError


def init_warmup(num_stages, mem):
    """
    Memory-bounded initial plan.

    The first stage keeps as many activations as fit in memory and the
    last stage keeps one; the ``x_max - 1`` difference is split over the
    ``S - 1`` links, the first ``(x_max - 1) mod (S - 1)`` links taking
    one extra.  This maximises the smallest slackness.

    Args:
        num_stages (int):
            Number of pipeline stages, at least 2.
        mem (:class:`pipeslack.core.MemoryModel`):
            Device memory model.

    Returns:
        :class:`pipeslack.core.WarmupPlan`: The plan, with ``x[-1] == 1``.

    Raises:
        PlannerError: Fewer than two stages or no room for an
        activation.
    """
    S = num_stages
    if S < 2:
        msgs.error('init_warmup needs at least 2 stages, got {0}'.format(S), exc=PlannerError)
    x_max = mem.x_max
    if x_max < 1:
        msgs.error('Memory holds no activation (x_max = {0})'.format(x_max), exc=PlannerError)

    delta_avg, r = divmod(x_max - 1, S - 1)
    x = [x_max]
    for i in range(1, S):
        x.append(x[-1] - (delta_avg + 1 if i <= r else delta_avg))
    return WarmupPlan(x)


def required_slackness(profiles, comm_latency, link):
    """
    Smallest slackness for which ``link`` absorbs its latency:
    ``ceil((t_fb[i] + 2 c[i]) / t_fb[i+1])``.
    """
    return utils.ceil_div(profiles[link].t_fb + 2*comm_latency[link], profiles[link+1].t_fb)


def adapt_warmup(num_stages, num_microbatches, profiles, comm_latency):
    """
    Delay-aware plan.

    Walking from the last stage up, each link gets the slackness it
    needs to absorb its latency, at least 2 and at most ``N - 2S``.
    When several slow links together would push a stage beyond
    ``N - (S - 1)`` warm-up forwards, the count is capped there so that
    every stage below still has forwards to run.

    Args:
        num_stages (int):
            Number of stages, at least 2.
        num_microbatches (int):
            Microbatches per iteration, at least ``2*num_stages``.
        profiles (sequence):
            :class:`pipeslack.core.StageProfile` of every stage.
        comm_latency (sequence):
            Latency of every link, in microseconds.

    Returns:
        :class:`pipeslack.core.WarmupPlan`: The plan.

    Raises:
        PlannerError: A precondition is violated.
    """
    S, N = num_stages, num_microbatches
    if S < 2:
        msgs.error('adapt_warmup needs at least 2 stages, got {0}'.format(S), exc=PlannerError)
    if N < 2*S:
        msgs.error('adapt_warmup needs N >= 2S; got N={0}, S={1}'.format(N, S),
                   exc=PlannerError)
    if len(profiles) != S or len(comm_latency) != S-1:
        msgs.error('adapt_warmup needs {0} profiles and {1} latencies'.format(S, S-1),
                   exc=PlannerError)
    if any(p.t_f <= 0 or p.t_b <= 0 for p in profiles):
        msgs.error('Stage durations must be positive', exc=PlannerError)

    clip = N - 2*S
    budget = N - (S - 1)
    x = [0]*S
    x[S-1] = 1
    for i in range(S-2, -1, -1):
        delta = min(clip, max(required_slackness(profiles, comm_latency, i), 2))
        x[i] = x[i+1] + delta
        if x[i] > budget:
            msgs.warn('Warm-up of stage {0} capped at {1} forwards'.format(i, budget))
            x[i] = budget
    return WarmupPlan(x)


def adapt_warmup_for(spec):
    """:func:`adapt_warmup` for the stages and latencies of ``spec``."""
    return adapt_warmup(spec.num_stages, spec.num_microbatches, spec.profiles,
                        spec.comm_latency)


def max_min_slackness(num_stages, x_max):
    """
    Largest achievable minimum slackness over all monotone plans with
    ``x[0] <= x_max`` and ``x[-1] >= 1``, found by enumeration.

    Only meant for small inputs.
    """
    best = 0
    for delta in itertools.product(range(x_max), repeat=num_stages-1):
        if sum(delta) <= x_max - 1:
            best = max(best, min(delta))
    return best
