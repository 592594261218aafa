"""
Generate the timeline of one iteration for a pipeline and a plan.
"""
from pipeslack import msgs
from pipeslack.scripts import add_common_args, init_run


def parse_args(options=None, return_parser=False):
    import argparse

    parser = argparse.ArgumentParser(description='Generate a pipeline schedule',
                                     formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    parser.add_argument('--spec', type=str, required=True, help='Pipeline JSON')
    parser.add_argument('--plan', type=str, required=True, help='Warm-up plan JSON')
    parser.add_argument('--delta-us', type=int, default=None,
                        help='Generator step in microseconds; overrides the configuration')
    parser.add_argument('--out', type=str, default=None, help='Timeline JSON; stdout if omitted')
    add_common_args(parser)

    if return_parser:
        return parser

    return parser.parse_args() if options is None else parser.parse_args(options)


def main(args):
    from pipeslack import io
    from pipeslack.core import us_to_ms
    from pipeslack.scheduler import GenConfig, generate_schedule

    par = init_run(args)
    spec = io.load_spec(args.spec)
    plan = io.load_plan(args.plan)
    if args.delta_us is not None:
        par['generation']['delta_us'] = args.delta_us
    gen = GenConfig.from_par(spec, par['generation'])

    timeline = generate_schedule(spec, plan, gen)
    msgs.info('Generated schedule with makespan {0} ms (step {1} us)'.format(
                us_to_ms(timeline.makespan), gen.delta))
    io.write_json(timeline.to_dict(), args.out)
    return 0
