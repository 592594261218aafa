"""
General utility functions.

Plotting helpers import matplotlib when called.
"""
import numpy as np

from pipeslack import msgs


def ceil_div(a, b):
    """Exact ceiling of ``a / b`` for integers, ``b > 0``."""
    return -(-a // b)


def parse_delays(text, num_links):
    """
    Parse a latency override string like ``"0:10,2:5"``.

    Args:
        text (str):
            Comma separated ``link:milliseconds`` pairs.  Empty or None
            means no override.
        num_links (int):
            Number of links of the pipeline.

    Returns:
        dict: Link index to latency in milliseconds.
    """
    delays = {}
    if text is None or text.strip() == '':
        return delays
    for item in text.split(','):
        try:
            link, value = item.split(':')
            link, value = int(link), float(value)
        except ValueError:
            msgs.error('Cannot parse delay "{0}"; expected link:ms'.format(item))
        if link < 0 or link >= num_links:
            msgs.error('Link {0} out of range; the pipeline has {1} link(s)'.format(
                        link, num_links))
        if value < 0:
            msgs.error('Negative latency for link {0}'.format(link))
        delays[link] = int(value) if value.is_integer() else value
    return delays


def pyplot_rcparams():
    """
    params for pretty matplotlib plots
    """
    from matplotlib import pyplot as plt

    plt.rcParams["xtick.top"] = True
    plt.rcParams["ytick.right"] = True
    plt.rcParams["xtick.minor.visible"] = True
    plt.rcParams["ytick.minor.visible"] = True
    plt.rcParams["ytick.direction"] = 'in'
    plt.rcParams["xtick.direction"] = 'in'
    plt.rcParams["legend.frameon"] = False
    plt.rcParams["legend.handletextpad"] = 1
    plt.rcParams["legend.handlelength"] = 1.1
    plt.rcParams["axes.labelsize"] = 14
    plt.rcParams["xtick.labelsize"] = 12
    plt.rcParams["ytick.labelsize"] = 12
    plt.rcParams["legend.fontsize"] = 11
    plt.rcParams["mathtext.default"] = "regular"


def pyplot_rcparams_default():
    """
    restore default rcparams
    """
    import matplotlib

    matplotlib.rcParams.update(matplotlib.rcParamsDefault)


def plot_sweep(table, outfile, title=None):
    """
    QA plot of a latency sweep: accumulated delay on the left axis and
    both bubble rates on the right axis, against the injected latency.

    Args:
        table (`astropy.table.Table`_):
            Output of :func:`pipeslack.executor.sweep_latency`.
        outfile (str):
            Image file to write.
        title (:obj:`str`, optional):
            Figure title.
    """
    import matplotlib
    matplotlib.use('Agg')
    from matplotlib import pyplot as plt

    pyplot_rcparams()
    c = np.asarray(table['c_ms'], dtype=float)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(c, np.asarray(table['accumulated_delay_ms'], dtype=float), 'o-', color='k',
            label='accumulated delay')
    ax.set_xlabel('injected latency (ms)')
    ax.set_ylabel('accumulated delay (ms)')

    ax2 = ax.twinx()
    ax2.plot(c, np.asarray(table['interior_bubble_rate'], dtype=float), 's--',
             color='tab:blue', label='interior bubble rate')
    ax2.plot(c, np.asarray(table['utilization_bubble_rate'], dtype=float), '^:',
             color='tab:orange', label='utilization bubble rate')
    ax2.set_ylabel('bubble rate')
    ax2.set_ylim(0, 1)

    lines = ax.get_lines() + ax2.get_lines()
    ax.legend(lines, [l.get_label() for l in lines], loc='upper left')
    if title is not None:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(outfile, dpi=120)
    plt.close(fig)
    pyplot_rcparams_default()
    msgs.info('Sweep QA plot written to {0}'.format(outfile))
