"""
Reading and writing of pipeslack documents.

Everything on disk is JSON with durations in milliseconds, except the
tabular outputs, which are written by astropy as CSV.
"""
import os
import sys
import json

from astropy.table import Table

from pipeslack import msgs
from pipeslack.core import PipelineSpec, WarmupPlan, Timeline
from pipeslack.par.pipeslackpar import CampaignPar


def data_path(*parts):
    """Path of a file shipped in ``pipeslack/data``."""
    return os.path.join(os.path.dirname(os.path.abspath(__file__)), 'data', *parts)


def load_json(path):
    with open(path, 'r') as f:
        return json.load(f)


def dump_json(doc):
    return json.dumps(doc, indent=2) + '\n'


def write_json(doc, outfile=None):
    """
    Write ``doc`` to ``outfile``, or to stdout if None.
    """
    text = dump_json(doc)
    if outfile is None:
        print(text, end='')
        return
    with open(outfile, 'w') as f:
        f.write(text)
    msgs.info('Wrote {0}'.format(outfile))


def _parse(path, what, builder):
    doc = load_json(path)
    try:
        return builder(doc)
    except (KeyError, TypeError, IndexError, AttributeError) as err:
        msgs.error('Malformed {0} file {1}: {2!r}'.format(what, path, err))


def load_spec(path):
    """Read a :class:`pipeslack.core.PipelineSpec`."""
    return _parse(path, 'pipeline', PipelineSpec.from_dict)


def load_plan(path):
    """Read a :class:`pipeslack.core.WarmupPlan`; a bare list is accepted."""
    return _parse(path, 'plan', lambda d: WarmupPlan(d) if isinstance(d, list)
                                            else WarmupPlan.from_dict(d))


def load_timeline(path):
    """Read a :class:`pipeslack.core.Timeline`."""
    return _parse(path, 'timeline', Timeline.from_dict)


def load_trace(path):
    """
    Read a straggler trace: a JSON array of events, or an object whose
    ``events`` key holds one.
    """
    from pipeslack.campaign import StragglerEvent

    def build(doc):
        events = doc['events'] if isinstance(doc, dict) else doc
        return [StragglerEvent.from_dict(e) for e in events]

    return _parse(path, 'trace', build)


def trace_to_list(trace):
    return [event.to_dict() for event in trace]


def load_campaign(path):
    """
    Read a campaign configuration.

    Returns:
        tuple: The base :class:`pipeslack.core.PipelineSpec` and the
        :class:`pipeslack.par.pipeslackpar.CampaignPar`.
    """
    doc = load_json(path)
    if not isinstance(doc, dict) or 'spec' not in doc:
        msgs.error('Campaign file {0} must hold "spec" and "campaign" blocks'.format(path))
    spec = _parse(path, 'campaign', lambda d: PipelineSpec.from_dict(d['spec']))
    return spec, CampaignPar.from_dict(doc.get('campaign', {}))


def write_table(tbl, outfile=None):
    """
    Write an astropy table as CSV to ``outfile``, or to stdout if None.
    """
    if outfile is None:
        tbl.write(sys.stdout, format='ascii.csv')
        return
    tbl.write(outfile, format='ascii.csv', overwrite=True)
    msgs.info('Wrote {0}'.format(outfile))


def read_table(path):
    return Table.read(path, format='ascii.csv')
