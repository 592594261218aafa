"""
Sweep the latency of one link and tabulate delay and bubble rates.
"""
from pipeslack import msgs
from pipeslack.scripts import add_common_args, init_run


def parse_args(options=None, return_parser=False):
    import argparse

    parser = argparse.ArgumentParser(description='Sweep the latency of one link',
                                     formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    parser.add_argument('--spec', type=str, required=True, help='Pipeline JSON')
    parser.add_argument('--plan', type=str, required=True, help='Warm-up plan JSON')
    parser.add_argument('--link', type=int, required=True, help='Link to sweep')
    parser.add_argument('--c-from', type=float, required=True, help='First latency (ms)')
    parser.add_argument('--c-to', type=float, required=True, help='Last latency (ms)')
    parser.add_argument('--c-step', type=float, required=True, help='Latency step (ms)')
    parser.add_argument('--delta-us', type=int, default=None,
                        help='Generator step in microseconds; overrides the configuration')
    parser.add_argument('--comm', type=str, default=None,
                        help='decoupled or seq:K; overrides the configuration')
    parser.add_argument('--n-process', type=int, default=None,
                        help='Worker processes; overrides the configuration')
    parser.add_argument('--plot', type=str, default=None, help='QA plot file')
    parser.add_argument('--out', type=str, default=None, help='CSV table; stdout if omitted')
    add_common_args(parser)

    if return_parser:
        return parser

    return parser.parse_args() if options is None else parser.parse_args(options)


def main(args):
    import os

    from pipeslack import io
    from pipeslack import utils
    from pipeslack.core import ms_to_us
    from pipeslack.executor import CommModel, sweep_latency
    from pipeslack.scheduler import GenConfig, generate_schedule

    par = init_run(args)
    spec = io.load_spec(args.spec)
    plan = io.load_plan(args.plan)
    comm = CommModel.parse(args.comm) if args.comm is not None \
                else CommModel.from_par(par['comm'])
    n_process = args.n_process if args.n_process is not None else par['sweep']['n_process']

    step = ms_to_us(args.c_step)
    if step <= 0:
        msgs.error('--c-step must be positive')
    c_values = list(range(ms_to_us(args.c_from), ms_to_us(args.c_to) + 1, step))
    if len(c_values) == 0:
        msgs.error('Empty latency range {0}..{1} ms'.format(args.c_from, args.c_to))

    if args.delta_us is not None:
        par['generation']['delta_us'] = args.delta_us
    timeline = generate_schedule(spec, plan, GenConfig.from_par(spec, par['generation']))
    tbl = sweep_latency(spec, timeline.orders(), args.link, c_values, comm, n_process=n_process)
    io.write_table(tbl, args.out)

    plotfile = args.plot
    if plotfile is None and par['sweep']['plot'] and args.out is not None:
        plotfile = os.path.splitext(args.out)[0] + '.png'
    if plotfile is not None:
        utils.plot_sweep(tbl, plotfile, title='link {0}, {1}'.format(args.link, comm))
    return 0
