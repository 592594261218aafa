"""
Optimal makespan of a tiny pipeline by exhaustive search.
"""
from pipeslack import msgs
from pipeslack.scripts import add_common_args, init_run


def parse_args(options=None, return_parser=False):
    import argparse

    parser = argparse.ArgumentParser(description='Optimal makespan of a tiny pipeline',
                                     formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    parser.add_argument('--spec', type=str, required=True, help='Pipeline JSON (S<=3, N<=5)')
    parser.add_argument('--plan', type=str, default=None,
                        help='Warm-up plan JSON constraining the search')
    parser.add_argument('--out', type=str, default=None, help='Result JSON; stdout if omitted')
    add_common_args(parser)

    if return_parser:
        return parser

    return parser.parse_args() if options is None else parser.parse_args(options)


def main(args):
    from pipeslack import io
    from pipeslack.core import us_to_ms
    from pipeslack.oracle import lower_bound, optimal_makespan

    init_run(args)
    spec = io.load_spec(args.spec)
    plan = io.load_plan(args.plan) if args.plan is not None else None

    result = optimal_makespan(spec, plan)
    msgs.info('Optimal makespan {0} ms ({1} nodes)'.format(us_to_ms(result.makespan),
                                                           result.nodes))
    doc = result.to_dict()
    doc['lower_bound_ms'] = us_to_ms(lower_bound(spec))
    io.write_json(doc, args.out)
    return 0
