"""
Command-line subcommands of pipeslack.

Every module exposes ``parse_args(options=None, return_parser=False)`` and
``main(args)``; :mod:`pipeslack.scripts.run_pipeslack` dispatches to them.
"""
from pipeslack import msgs
from pipeslack.par import PipeSlackPar


def add_common_args(parser):
    """Options shared by every subcommand."""
    parser.add_argument('-v', '--verbosity', type=int, default=1,
                        help='Verbosity level between 0 [none] and 2 [all]')
    parser.add_argument('--cfg', type=str, default=None,
                        help='Configuration file merged over the default parameters')
    parser.add_argument('--log', type=str, default=None, help='Also write messages to this file')
    return parser


def init_run(args):
    """
    Reset the logger for this run and build the parameter set.

    Returns:
        :class:`pipeslack.par.PipeSlackPar`
    """
    msgs.reset(log=args.log, verbosity=args.verbosity)
    return PipeSlackPar.from_cfg_file(merge_with=args.cfg)
