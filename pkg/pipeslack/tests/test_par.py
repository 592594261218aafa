"""
Tests of the parameter sets.
"""
import pytest
from configobj import ConfigObj

from pipeslack.core import PipelineSpec
from pipeslack.executor import CommModel
from pipeslack.io import data_path
from pipeslack.par import PipeSlackPar
from pipeslack.par.pipeslackpar import CampaignPar, CommPar, GanttPar, GenerationPar
from pipeslack.scheduler import GenConfig


def _same(a, b):
    return all(a[k].data == b[k].data for k in a.keys())


def test_defaults():
    par = PipeSlackPar()
    assert par['generation']['granularity'] == 30
    assert par['generation']['delta_us'] is None
    assert par['generation']['steady'] == 'window'
    assert par['generation']['defer_w'] is False
    assert par['comm']['model'] == 'decoupled'
    assert par['gantt']['px_per_ms'] == 2.0
    assert _same(par, PipeSlackPar.from_cfg_file())


def test_shipped_config():
    cfg = ConfigObj(data_path('cfg', 'default.cfg'))
    par = PipeSlackPar()
    for section in par.keys():
        assert sorted(cfg[section].keys()) == sorted(par[section].keys())
    assert _same(PipeSlackPar.from_cfg_file(merge_with=data_path('cfg', 'default.cfg')),
                 PipeSlackPar())


def test_merge_and_write(tmp_path):
    cfg = tmp_path / 'user.cfg'
    cfg.write_text('[comm]\n    model = sequential\n    queue_capacity = 2\n'
                   '[generation]\n    delta_us = 250\n')
    par = PipeSlackPar.from_cfg_file(merge_with=str(cfg))
    assert par['comm']['model'] == 'sequential'
    assert par['comm']['queue_capacity'] == 2
    assert par['sweep']['n_process'] == 1

    full = str(tmp_path / 'full.cfg')
    par.to_config(full)
    assert _same(PipeSlackPar.from_cfg_file(cfg_file=full), par)

    assert CommModel.from_par(par['comm']) == CommModel.sequential(2)
    assert GenConfig.from_par(PipelineSpec.uniform(2, 4, 10), par['generation']).delta == 250


def test_bad_values(tmp_path):
    cfg = tmp_path / 'bad.cfg'
    cfg.write_text('[comm]\n    bogus = 1\n')
    with pytest.raises(ValueError):
        PipeSlackPar.from_cfg_file(merge_with=str(cfg))
    cfg.write_text('[sweep]\n    n_process = two\n')
    with pytest.raises(TypeError):
        PipeSlackPar.from_cfg_file(merge_with=str(cfg))

    with pytest.raises(TypeError):
        GenerationPar(delta_us='a')
    with pytest.raises(ValueError):
        GenerationPar(delta_us=0)
    with pytest.raises(ValueError):
        GenerationPar(steady='lazy')
    with pytest.raises(ValueError):
        CommPar(model='fifo')
    with pytest.raises(ValueError):
        GanttPar(px_per_ms=0)


def test_campaign_par():
    par = CampaignPar.from_dict({'restart_penalty_ms': 500})
    assert par['total_iters'] == 1200
    assert par['policy'] == 'adaptive'
    assert par['mem_capacity'] is None
    assert par['comm'] == 'sequential'
    with pytest.raises(ValueError):
        CampaignPar.from_dict({'restart_penalty_ms': 500, 'comm': 'fifo'})
    with pytest.raises(ValueError):
        CampaignPar.from_dict({})
    with pytest.raises(ValueError):
        CampaignPar.from_dict({'restart_penalty_ms': 500, 'policy': 'hope'})
    with pytest.raises(ValueError):
        CampaignPar.from_dict({'restart_penalty_ms': 500, 'unknown': 1})
