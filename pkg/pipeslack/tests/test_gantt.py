"""
Tests of the SVG Gantt renderer.
"""
from xml.etree import ElementTree

from pipeslack.core import PipelineSpec, WarmupPlan
from pipeslack.gantt import render_gantt
from pipeslack.par.pipeslackpar import GanttPar
from pipeslack.scheduler import GenConfig, generate_schedule

SVG = '{http://www.w3.org/2000/svg}'


def _elements(svg, tag):
    return ElementTree.fromstring(svg).iter(SVG + tag)


def ideal_timeline():
    return generate_schedule(PipelineSpec.uniform(4, 12, 10), WarmupPlan([7, 5, 3, 1]),
                             GenConfig(1000))


def test_ideal_chart():
    svg = render_gantt(ideal_timeline(), title='ideal')
    root = ElementTree.fromstring(svg)
    assert root.get('width') == '900'

    rects = list(_elements(svg, 'rect'))
    assert len(rects) == 4*36
    right = max(float(r.get('x')) + float(r.get('width')) for r in rects)
    assert right == 840
    assert sum(1 for r in rects if 'op-W' in r.get('class')) == 48

    texts = list(_elements(svg, 'text'))
    assert [t.text for t in texts if t.get('class') == 'lane-label'] == ['S0', 'S1', 'S2', 'S3']
    assert sum(1 for t in texts if t.get('class') == 'op-label') == 144


def test_deterministic():
    timeline = ideal_timeline()
    assert render_gantt(timeline) == render_gantt(timeline)


def test_scale_and_labels():
    svg = render_gantt(ideal_timeline(), GanttPar(px_per_ms=1.))
    assert ElementTree.fromstring(svg).get('width') == '510'
    assert not any(t.get('class') == 'op-label' for t in _elements(svg, 'text'))


def test_zero_duration_ops():
    timeline = generate_schedule(PipelineSpec.uniform(1, 1, 10, t_w_ms=0), WarmupPlan([1]),
                                 GenConfig(1000))
    rects = list(_elements(render_gantt(timeline), 'rect'))
    assert len(rects) == 3
    assert rects[-1].get('width') == '1'
