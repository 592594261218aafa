#!/usr/bin/env python
#
# -*- coding: utf-8 -*-
"""
Entry point of the ``pipeslack`` command.

The first argument names the subcommand; the rest is parsed by the
subcommand module.  Exit codes: 0 on success, 1 when the run fails, 2
for usage errors.
"""
import sys
from collections import OrderedDict

from pipeslack import msgs
from pipeslack.pipemsgs import PipeSlackError
from pipeslack.scripts import analyze, gantt, oracle, plan, replay_trace, schedule, simulate, sweep

SUBCOMMANDS = OrderedDict([('plan', plan),
                           ('schedule', schedule),
                           ('simulate', simulate),
                           ('sweep', sweep),
                           ('analyze', analyze),
                           ('oracle', oracle),
                           ('replay-trace', replay_trace),
                           ('gantt', gantt)])


def run_pipeslack_usage():
    """
    Print pipeslack usage description.
    """
    import pipeslack

    descs = 'pipeslack v{0}: pipeline-parallel schedules under slow links\n\n'.format(
                pipeslack.__version__)
    descs += 'usage: pipeslack <subcommand> [options]\n\nsubcommands:\n'
    for name, module in SUBCOMMANDS.items():
        descs += '  {0:<13s} {1}\n'.format(name, module.__doc__.strip().splitlines()[0])
    descs += '\nRun "pipeslack <subcommand> -h" for the options of a subcommand.'
    return descs


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    if len(argv) == 0 or argv[0] in ('-h', '--help'):
        print(run_pipeslack_usage())
        return 0 if len(argv) > 0 else 2
    if argv[0] not in SUBCOMMANDS:
        print('Unknown subcommand "{0}"\n\n{1}'.format(argv[0], run_pipeslack_usage()),
              file=sys.stderr)
        return 2

    module = SUBCOMMANDS[argv[0]]
    try:
        args = module.parse_args(argv[1:])
    except SystemExit as err:
        return 0 if err.code is None else err.code

    try:
        return module.main(args)
    except PipeSlackError:
        # Already reported by msgs.error
        return 1
    except (ValueError, TypeError, OSError) as err:
        msgs.report('{0}: {1}'.format(type(err).__name__, err))
        return 1
    finally:
        msgs.close()


if __name__ == '__main__':
    sys.exit(main())
