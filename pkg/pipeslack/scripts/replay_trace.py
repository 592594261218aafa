"""
Replay a straggler and failure trace over a training campaign.
"""
from pipeslack.scripts import add_common_args, init_run


def parse_args(options=None, return_parser=False):
    import argparse

    parser = argparse.ArgumentParser(description='Replay a straggler trace',
                                     formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    parser.add_argument('--config', type=str, required=True,
                        help='Campaign JSON with "spec" and "campaign" blocks')
    parser.add_argument('--trace', type=str, required=True, help='Trace JSON')
    parser.add_argument('--policy', type=str, default=None, choices=['static', 'adaptive'],
                        help='Overrides the policy of the configuration')
    parser.add_argument('--comm', type=str, default=None, choices=['sequential', 'decoupled'],
                        help='Overrides the replay model of the configuration')
    parser.add_argument('--out', type=str, default=None, help='Result JSON; stdout if omitted')
    parser.add_argument('--csv', type=str, default=None, help='Per-iteration CSV table')
    add_common_args(parser)

    if return_parser:
        return parser

    return parser.parse_args() if options is None else parser.parse_args(options)


def main(args):
    import dataclasses

    from pipeslack import io
    from pipeslack.campaign import CampaignConfig, run_campaign

    init_run(args)
    spec, cpar = io.load_campaign(args.config)
    trace = io.load_trace(args.trace)
    cfg = CampaignConfig.from_par(spec, cpar)
    if args.policy is not None:
        cfg = cfg.with_policy(args.policy)
    if args.comm is not None:
        cfg = dataclasses.replace(cfg, comm=args.comm)

    result = run_campaign(cfg, trace)
    doc = result.to_dict()
    doc['trace'] = io.trace_to_list(trace)
    io.write_json(doc, args.out)
    if args.csv is not None:
        io.write_table(result.to_table(), args.csv)
    return 0
