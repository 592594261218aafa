"""
Build a warm-up plan from device memory or from the link latencies.
"""
from pipeslack import msgs
from pipeslack.scripts import add_common_args, init_run


def parse_args(options=None, return_parser=False):
    import argparse

    parser = argparse.ArgumentParser(description='Build a warm-up plan',
                                     formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    sub = parser.add_subparsers(dest='mode')
    sub.required = True

    init = sub.add_parser('init', help='Memory-bounded plan')
    init.add_argument('--stages', type=int, required=True, help='Number of stages')
    init.add_argument('--mem-capacity', type=float, required=True, help='Device memory')
    init.add_argument('--mem-per-activation', type=float, default=1.,
                      help='Memory held by one forward activation')
    init.add_argument('--out', type=str, default=None, help='Plan JSON; stdout if omitted')
    add_common_args(init)

    adapt = sub.add_parser('adapt', help='Plan that absorbs the latencies of a pipeline')
    adapt.add_argument('--spec', type=str, required=True, help='Pipeline JSON')
    adapt.add_argument('--out', type=str, default=None, help='Plan JSON; stdout if omitted')
    add_common_args(adapt)

    if return_parser:
        return parser

    return parser.parse_args() if options is None else parser.parse_args(options)


def main(args):
    from pipeslack import io
    from pipeslack.core import MemoryModel, slackness_of
    from pipeslack.planner import adapt_warmup_for, init_warmup

    init_run(args)
    if args.mode == 'init':
        plan = init_warmup(args.stages, MemoryModel(args.mem_capacity, args.mem_per_activation))
    else:
        plan = adapt_warmup_for(io.load_spec(args.spec))
    msgs.info('Plan {0}, slackness {1}'.format(list(plan.x), list(slackness_of(plan).delta)))
    io.write_json(plan.to_dict(), args.out)
    return 0
