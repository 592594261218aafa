"""
Analytical delay model.

A link's latency ``c`` is absorbed by the slackness ``Delta`` of a plan
when ``t_f[i] + t_b[i] + 2c <= Delta * (t_f[i+1] + t_b[i+1])``.  An
absorbed delay costs about ``c``; otherwise it cascades and grows to
about ``N c / (Delta + 1)``.  The estimates are orders of magnitude, not
predictions of a replay.
"""
from dataclasses import dataclass

from astropy.table import Table

from pipeslack import msgs
from pipeslack.core import US_PER_MS, check_plan, slackness_of, us_to_ms

ABSORBED = 'Absorbed'
CASCADING = 'Cascading'


@dataclass(frozen=True)
class DelayRegime:
    """
    Regime of one link; threshold and estimate are in microseconds.
    """
    variant: str
    threshold: float
    estimate: float
    link: int
    delta: int

    @property
    def threshold_ms(self):
        return self.threshold / US_PER_MS

    @property
    def estimate_ms(self):
        return self.estimate / US_PER_MS

    def to_dict(self):
        return {'link': self.link, 'delta': self.delta, 'regime': self.variant,
                'threshold_ms': self.threshold_ms, 'estimate_ms': self.estimate_ms}


def _check_link(spec, link):
    if link < 0 or link >= spec.num_stages - 1:
        msgs.error('Link {0} out of range; the pipeline has {1} link(s)'.format(
                    link, spec.num_stages - 1))


def absorption_holds(spec, delta_i, link):
    """
    Whether ``link`` absorbs its current latency with slackness
    ``delta_i``.

    Args:
        spec (:class:`pipeslack.core.PipelineSpec`):
            Pipeline; the latency is ``spec.comm_latency[link]``.
        delta_i (int):
            Slackness of the link.
        link (int):
            Link index, ``0 <= link < S-1``.

    Returns:
        bool
    """
    _check_link(spec, link)
    if delta_i < 0:
        msgs.error('Slackness must be non-negative, got {0}'.format(delta_i))
    p, q = spec.profiles[link], spec.profiles[link+1]
    return p.t_fb + 2*spec.comm_latency[link] <= delta_i * q.t_fb


def classify_delay(spec, plan, link):
    """
    Regime, threshold and accumulated-delay estimate of one link.

    The threshold is the largest latency the link absorbs,
    ``(Delta t_fb[i+1] - t_fb[i]) / 2`` clamped at zero, which is
    ``(Delta - 1) t`` for uniform durations.

    Returns:
        :class:`DelayRegime`
    """
    _check_link(spec, link)
    check_plan(spec, plan)
    delta = slackness_of(plan)[link]
    c = spec.comm_latency[link]
    p, q = spec.profiles[link], spec.profiles[link+1]

    threshold = max(0.0, (delta * q.t_fb - p.t_fb) / 2)
    if absorption_holds(spec, delta, link):
        return DelayRegime(ABSORBED, threshold, float(c), link, delta)
    return DelayRegime(CASCADING, threshold, spec.num_microbatches * c / (delta + 1), link,
                       delta)


def total_estimate(spec, plan):
    """Sum of the per-link estimates, in microseconds."""
    check_plan(spec, plan)
    return float(sum(classify_delay(spec, plan, i).estimate
                     for i in range(spec.num_stages - 1)))


def delay_table(spec, plan):
    """
    Per-link regimes as a table.

    Returns:
        `astropy.table.Table`_: Columns ``link, delta, c_ms, regime,
        threshold_ms, estimate_ms``.
    """
    regimes = [classify_delay(spec, plan, i) for i in range(spec.num_stages - 1)]
    tbl = Table()
    tbl['link'] = [r.link for r in regimes]
    tbl['delta'] = [r.delta for r in regimes]
    tbl['c_ms'] = [float(us_to_ms(c)) for c in spec.comm_latency]
    tbl['regime'] = [r.variant for r in regimes]
    tbl['threshold_ms'] = [r.threshold_ms for r in regimes]
    tbl['estimate_ms'] = [r.estimate_ms for r in regimes]
    tbl.meta['total_estimate_ms'] = total_estimate(spec, plan) / US_PER_MS
    return tbl
