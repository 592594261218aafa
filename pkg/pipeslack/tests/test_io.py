"""
Tests of the JSON and CSV readers and writers.
"""
import json
import os

import pytest

from pipeslack import io
from pipeslack.analysis import delay_table
from pipeslack.core import PipelineSpec, WarmupPlan
from pipeslack.pipemsgs import PipeSlackError
from pipeslack.scheduler import GenConfig, generate_schedule


def test_data_path():
    for parts in (('specs', 'ideal_s4n12.json'), ('traces', 'straggler_trace.json'),
                  ('cfg', 'default.cfg')):
        assert os.path.isfile(io.data_path(*parts))


def test_spec_plan_timeline_files(tmp_path):
    spec = PipelineSpec.uniform(3, 6, 10, c_ms=[2.5, 0])
    plan = WarmupPlan([5, 3, 1])
    timeline = generate_schedule(spec, plan, GenConfig(500))

    io.write_json(spec.to_dict(), str(tmp_path / 'spec.json'))
    io.write_json(plan.to_dict(), str(tmp_path / 'plan.json'))
    io.write_json(timeline.to_dict(), str(tmp_path / 'timeline.json'))
    assert io.load_spec(str(tmp_path / 'spec.json')) == spec
    assert io.load_plan(str(tmp_path / 'plan.json')) == plan
    assert io.load_timeline(str(tmp_path / 'timeline.json')) == timeline

    (tmp_path / 'bare.json').write_text('[5, 3, 1]')
    assert io.load_plan(str(tmp_path / 'bare.json')) == plan


def test_ideal_spec_file():
    assert io.load_spec(io.data_path('specs', 'ideal_s4n12.json')) \
                == PipelineSpec.uniform(4, 12, 10)


def test_malformed_files(tmp_path):
    (tmp_path / 'spec.json').write_text(json.dumps({'num_stages': 2}))
    with pytest.raises(PipeSlackError):
        io.load_spec(str(tmp_path / 'spec.json'))
    (tmp_path / 'campaign.json').write_text(json.dumps({'campaign': {}}))
    with pytest.raises(PipeSlackError):
        io.load_campaign(str(tmp_path / 'campaign.json'))


def test_trace_file(tmp_path):
    trace = io.load_trace(io.data_path('traces', 'straggler_trace.json'))
    io.write_json({'events': io.trace_to_list(trace)}, str(tmp_path / 'trace.json'))
    assert io.load_trace(str(tmp_path / 'trace.json')) == trace


def test_campaign_file():
    spec, par = io.load_campaign(io.data_path('specs', 'campaign_s8n32.json'))
    assert spec.num_stages == 8
    assert spec.num_microbatches == 32
    assert par['restart_penalty_ms'] == 500
    assert par['delta_us'] == 1000
    assert par['policy'] == 'adaptive'


def test_stdout(capsys):
    io.write_json({'x': [2, 1]})
    assert json.loads(capsys.readouterr().out) == {'x': [2, 1]}


def test_table_file(tmp_path):
    tbl = delay_table(PipelineSpec.uniform(4, 12, 10, c_ms=[10, 20, 0]), WarmupPlan([7, 5, 3, 1]))
    path = str(tmp_path / 'regimes.csv')
    io.write_table(tbl, path)
    back = io.read_table(path)
    assert list(back['regime']) == list(tbl['regime'])
    assert list(back['link']) == [0, 1, 2]
