# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
Implements a command which runs the sweep described by an experiment file
and writes its raw, aggregate and plot-ready results.
"""
import os

from django.conf import settings
from django.core.management.base import CommandError

from empsim.experiments.management.base import EXIT_CONFIG_ERROR
from empsim.experiments.management.base import EXIT_RUN_FAILURE
from empsim.experiments.management.base import ExperimentCommand
from empsim.experiments.plots import emit_plot_data
from empsim.experiments.plots import format_summary
from empsim.experiments.sweeps import SweepError
from empsim.experiments.sweeps import run_sweep
from empsim.simulation.metrics import format_value


class Command(ExperimentCommand):
    """
    A management command which runs every run of an experiment.
    """
    help = "Run the sweep described by an experiment file."

    def add_arguments(self, parser):
        super(Command, self).add_arguments(parser)
        parser.add_argument('--jobs',
                            type=int,
                            default=1,
                            help='The number of runs executed at once')
        parser.add_argument('--out',
                            default=None,
                            help=(
                                'The output directory. Defaults to a '
                                'directory named after the experiment in '
                                'EMPSIM_OUTPUT_DIRECTORY'
                            ))
        parser.add_argument('--trace',
                            action='store_true',
                            default=False,
                            help='Write the event and filter traces of '
                                 'every run')

    def handle(self, *args, **kwargs):
        experiment = self.load_experiment(kwargs)
        jobs = kwargs['jobs']
        if not 1 <= jobs <= settings.EMPSIM_MAX_JOBS:
            raise CommandError(
                "--jobs must lie between 1 and {}".format(
                    settings.EMPSIM_MAX_JOBS),
                returncode=EXIT_CONFIG_ERROR)
        out_dir = kwargs['out'] or os.path.join(
            settings.EMPSIM_OUTPUT_DIRECTORY, experiment.name)

        progress = None
        if kwargs['verbosity'] >= 2:
            progress = self.print_progress
            self.total = experiment.run_count

        try:
            result = run_sweep(experiment, out_dir, jobs=jobs,
                               trace=kwargs['trace'], progress=progress)
            files = emit_plot_data(result.rows, experiment.sweep, out_dir)
        except SweepError as e:
            raise CommandError(str(e), returncode=EXIT_RUN_FAILURE)
        except OSError as e:
            raise CommandError(
                "Cannot write the results to {dir}: {error}".format(
                    dir=out_dir, error=e),
                returncode=EXIT_RUN_FAILURE)

        if kwargs['verbosity'] >= 1:
            self.stdout.write(format_summary(result.rows, experiment.sweep))
            for path in result.files + tuple(files):
                self.stdout.write("Wrote {}".format(path))

    def print_progress(self, spec, report):
        self.stdout.write(
            "[{done}/{total}] {sweep}={value} {variant} hia={hia} "
            "seed={seed}: pdr={pdr} nrl={nrl}".format(
                done=spec.index + 1, total=self.total, sweep=spec.sweep,
                value=format_value(spec.sweep_value), variant=spec.variant,
                hia=format_value(spec.hia), seed=spec.seed,
                pdr=format_value(report.pdr), nrl=format_value(report.nrl)))
