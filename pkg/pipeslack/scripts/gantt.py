"""
Draw a timeline as an SVG Gantt chart.
"""
from pipeslack import msgs
from pipeslack.scripts import add_common_args, init_run


def parse_args(options=None, return_parser=False):
    import argparse

    parser = argparse.ArgumentParser(description='Draw a timeline as SVG',
                                     formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    parser.add_argument('--timeline', type=str, required=True, help='Timeline JSON')
    parser.add_argument('--out', type=str, default=None, help='SVG file; stdout if omitted')
    parser.add_argument('--px-per-ms', type=float, default=None,
                        help='Horizontal scale; overrides the configuration')
    parser.add_argument('--title', type=str, default=None, help='Chart caption')
    add_common_args(parser)

    if return_parser:
        return parser

    return parser.parse_args() if options is None else parser.parse_args(options)


def main(args):
    from pipeslack import io
    from pipeslack.gantt import render_gantt

    par = init_run(args)
    gpar = par['gantt']
    if args.px_per_ms is not None:
        gpar['px_per_ms'] = args.px_per_ms
        gpar.validate()

    svg = render_gantt(io.load_timeline(args.timeline), gpar, title=args.title)
    if args.out is None:
        print(svg, end='')
    else:
        with open(args.out, 'w') as f:
            f.write(svg)
        msgs.info('Wrote {0}'.format(args.out))
    return 0
