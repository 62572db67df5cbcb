# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
Plot-ready output of aggregated sweeps.
"""
import csv
import logging
import os

from empsim.simulation.metrics import format_value

logger = logging.getLogger(__name__)

SUMMARY_FILE = 'summary.txt'

#: Plotted metrics and the :class:`AggregateRow
#: <empsim.experiments.sweeps.AggregateRow>` field holding each.
METRICS = (
    ('pdr', 'mean_pdr'),
    ('nrl', 'mean_nrl'),
)


def series_name(variant, hia):
    return '{variant}/hia-{hia}'.format(variant=variant,
                                        hia=format_value(hia))


def _series_key(row):
    return (str(row.variant), row.hia)


def plot_file_name(metric, sweep):
    return '{metric}_vs_{sweep}.csv'.format(metric=metric, sweep=sweep)


def write_plot_file(path, rows, sweep, field):
    """
    Writes one metric of ``rows``: a line per sweep value and a column per
    (variant, HIA mode) series, sorted by variant name then HIA mode.
    """
    series = sorted({_series_key(row) for row in rows})
    values = sorted({row.sweep_value for row in rows})
    cells = {
        (row.sweep_value,) + _series_key(row): getattr(row, field)
        for row in rows
    }
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow([sweep] + [series_name(*key) for key in series])
        for value in values:
            writer.writerow([format_value(value)] + [
                format_value(cells[(value,) + key]) if (value,) + key in cells
                else ''
                for key in series
            ])


def format_summary(rows, sweep):
    """
    A plain text table of ``rows`` sorted the same way as the plot files.
    """
    header = (sweep, 'variant', 'hia', 'pdr', '+/-', 'nrl', '+/-', 'seeds')
    lines = [header]
    for row in sorted(rows, key=lambda r: (r.sweep_value,) + _series_key(r)):
        lines.append((
            format_value(row.sweep_value),
            str(row.variant),
            format_value(row.hia),
            '{:.4f}'.format(row.mean_pdr),
            '{:.4f}'.format(row.stderr_pdr),
            '{:.4f}'.format(row.mean_nrl),
            '{:.4f}'.format(row.stderr_nrl),
            str(row.n_seeds),
        ))
    widths = [max(len(line[i]) for line in lines) for i in range(len(header))]
    return ''.join(
        '  '.join(cell.rjust(width) for cell, width in zip(line, widths))
        .rstrip() + '\n'
        for line in lines)


def emit_plot_data(rows, sweep, out_dir):
    """
    Writes ``pdr_vs_<sweep>.csv``, ``nrl_vs_<sweep>.csv`` and a
    ``summary.txt`` table of the aggregated ``rows`` into ``out_dir``.

    :returns: The paths of the written files.
    :raises ValueError: If there are no rows.
    :raises OSError: If a file cannot be written.
    """
    if not rows:
        raise ValueError("There are no aggregated rows to plot")
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for metric, field in METRICS:
        path = os.path.join(out_dir, plot_file_name(metric, sweep))
        write_plot_file(path, rows, sweep, field)
        paths.append(path)

    path = os.path.join(out_dir, SUMMARY_FILE)
    with open(path, 'w') as f:
        f.write(format_summary(rows, sweep))
    paths.append(path)
    for path in paths:
        logger.info("Wrote %s", path)
    return paths
