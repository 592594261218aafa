"""
Classify the delay regime of every link of a pipeline under a plan.
"""
from pipeslack.scripts import add_common_args, init_run


def parse_args(options=None, return_parser=False):
    import argparse

    parser = argparse.ArgumentParser(description='Delay regime of every link',
                                     formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    parser.add_argument('--spec', type=str, required=True, help='Pipeline JSON')
    parser.add_argument('--plan', type=str, required=True, help='Warm-up plan JSON')
    parser.add_argument('--json', default=False, action='store_true',
                        help='Write JSON instead of CSV')
    parser.add_argument('--out', type=str, default=None, help='Output file; stdout if omitted')
    add_common_args(parser)

    if return_parser:
        return parser

    return parser.parse_args() if options is None else parser.parse_args(options)


def main(args):
    from pipeslack import io
    from pipeslack.analysis import classify_delay, delay_table, total_estimate
    from pipeslack.core import US_PER_MS

    init_run(args)
    spec = io.load_spec(args.spec)
    plan = io.load_plan(args.plan)

    if args.json:
        doc = {'links': [classify_delay(spec, plan, i).to_dict()
                         for i in range(spec.num_links)],
               'total_estimate_ms': total_estimate(spec, plan) / US_PER_MS}
        io.write_json(doc, args.out)
    else:
        io.write_table(delay_table(spec, plan), args.out)
    return 0
