"""
SVG Gantt charts of timelines.

One lane per stage, one rectangle per operator.  The output depends only
on the timeline and the :class:`pipeslack.par.pipeslackpar.GanttPar`, so
identical inputs render byte-identical files.
"""
from xml.sax.saxutils import escape

from pipeslack.core import US_PER_MS
from pipeslack.par.pipeslackpar import GanttPar


def _fmt(value):
    """Compact, deterministic number formatting."""
    return '{0:g}'.format(round(float(value), 3))


def _css(par):
    return ('<style>'
            '.op-F {{ fill: {0}; }} .op-B {{ fill: {1}; }} .op-W {{ fill: {2}; }} '
            '.op {{ stroke: white; stroke-width: 0.5; }} '
            '.lane-label, .tick-label, .op-label {{ font-family: sans-serif; font-size: 10px; }} '
            '.op-label {{ fill: white; text-anchor: middle; }} '
            '.tick {{ stroke: lightgray; stroke-width: 1; }}'
            '</style>').format(par['color_f'], par['color_b'], par['color_w'])


def render_gantt(timeline, par=None, title=None):
    """
    Render ``timeline`` as an SVG document.

    Args:
        timeline (:class:`pipeslack.core.Timeline`):
            Timeline to draw.
        par (:class:`pipeslack.par.pipeslackpar.GanttPar`, optional):
            Geometry and colours; defaults if None.
        title (:obj:`str`, optional):
            Caption above the lanes.

    Returns:
        str: The SVG text.  Zero-duration operators are drawn 1 px wide.
    """
    par = GanttPar() if par is None else par
    px = par['px_per_ms']
    margin = par['margin']
    lane = par['lane_height']
    gap = par['lane_gap']

    makespan_ms = timeline.makespan / US_PER_MS
    width = 2*margin + makespan_ms*px
    height = 2*margin + timeline.num_stages*(lane + gap)

    def x_of(t_us):
        return margin + t_us / US_PER_MS * px

    def y_of(stage):
        return margin + stage*(lane + gap)

    lines = ['<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{1}" '
             'viewBox="0 0 {0} {1}">'.format(_fmt(width), _fmt(height)),
             _css(par)]
    if title is not None:
        lines.append('<text class="title" x="{0}" y="{1}">{2}</text>'.format(
                        _fmt(margin), _fmt(margin/2), escape(title)))

    tick = par['tick_ms']
    t = 0
    bottom = y_of(timeline.num_stages)
    while t <= makespan_ms:
        x = margin + t*px
        lines.append('<line class="tick" x1="{0}" y1="{1}" x2="{0}" y2="{2}"/>'.format(
                        _fmt(x), _fmt(margin), _fmt(bottom)))
        lines.append('<text class="tick-label" x="{0}" y="{1}">{2}</text>'.format(
                        _fmt(x), _fmt(bottom + 12), t))
        t += tick

    for i, stage in enumerate(timeline.per_stage):
        y = y_of(i)
        lines.append('<text class="lane-label" x="{0}" y="{1}">S{2}</text>'.format(
                        _fmt(margin/4), _fmt(y + lane/2 + 4), i))
        for sop in stage:
            x = x_of(sop.start)
            w = max(sop.duration / US_PER_MS * px, 1)
            lines.append('<rect class="op op-{0}" x="{1}" y="{2}" width="{3}" height="{4}">'
                         '<title>{5} {6}-{7} ms</title></rect>'.format(
                            sop.op.kind, _fmt(x), _fmt(y), _fmt(w), _fmt(lane), sop.op.label,
                            _fmt(sop.start / US_PER_MS), _fmt(sop.end / US_PER_MS)))
            if par['show_labels'] and w >= 14:
                lines.append('<text class="op-label" x="{0}" y="{1}">{2}</text>'.format(
                                _fmt(x + w/2), _fmt(y + lane/2 + 4), sop.op.label))
    lines.append('</svg>')
    return '\n'.join(lines) + '\n'
