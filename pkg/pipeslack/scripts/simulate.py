"""
Replay the operator order of a timeline under injected link latencies.
"""
from pipeslack import msgs
from pipeslack.scripts import add_common_args, init_run


def parse_args(options=None, return_parser=False):
    import argparse

    parser = argparse.ArgumentParser(description='Replay a timeline under injected latencies',
                                     formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    parser.add_argument('--timeline', type=str, required=True, help='Timeline JSON')
    parser.add_argument('--spec', type=str, default=None,
                        help='Pipeline JSON; measured from the timeline if omitted')
    parser.add_argument('--delays', type=str, default=None,
                        help='Latency overrides as "link:ms,link:ms"')
    parser.add_argument('--comm', type=str, default=None,
                        help='decoupled or seq:K; overrides the configuration')
    parser.add_argument('--metrics-out', type=str, default=None, help='Metrics JSON')
    parser.add_argument('--out', type=str, default=None, help='Replayed timeline JSON')
    add_common_args(parser)

    if return_parser:
        return parser

    return parser.parse_args() if options is None else parser.parse_args(options)


def main(args):
    from pipeslack import io
    from pipeslack import utils
    from pipeslack.core import ms_to_us, us_to_ms
    from pipeslack.executor import CommModel, replay, spec_from_timeline

    par = init_run(args)
    timeline = io.load_timeline(args.timeline)
    spec = io.load_spec(args.spec) if args.spec is not None else spec_from_timeline(timeline)
    comm = CommModel.parse(args.comm) if args.comm is not None \
                else CommModel.from_par(par['comm'])

    latency = list(spec.comm_latency)
    for link, c_ms in utils.parse_delays(args.delays, spec.num_links).items():
        latency[link] = ms_to_us(c_ms)
    spec = spec.with_latency(latency)

    replayed, metrics = replay(spec, timeline.orders(), comm)
    msgs.info('Makespan {0} ms under c={1} ms ({2}), accumulated delay {3} ms'.format(
                us_to_ms(metrics.makespan), [us_to_ms(c) for c in latency], comm,
                us_to_ms(metrics.accumulated_delay)))

    if args.out is not None:
        io.write_json(replayed.to_dict(), args.out)
    if args.metrics_out is not None or args.out is None:
        io.write_json(metrics.to_dict(), args.metrics_out)
    return 0
