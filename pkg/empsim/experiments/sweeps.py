# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
Execution of an experiment: the enumeration of its runs, their (possibly
parallel) execution and the aggregation of their metrics across seeds.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
import csv
import hashlib
import itertools
import logging
import math
import os
from typing import List, Tuple

import numpy as np
import yaml

from empsim.experiments.config import resolved_parameters
from empsim.routing.config import Variant
from empsim.simulation import engine
from empsim.simulation.config import SimulationConfig
from empsim.simulation.metrics import MetricsReport
from empsim.simulation.metrics import format_value

logger = logging.getLogger(__name__)

RAW_RUNS_FILE = 'raw_runs.csv'
AGGREGATE_FILE = 'aggregate.csv'
METADATA_FILE = 'metadata.yaml'
TRACE_DIRECTORY = 'traces'

#: Columns of the raw per-run file following the metrics of the run.
RUN_COLUMNS = ('run', 'sweep_value', 'run_seed')


class SweepError(Exception):
    """
    Raised when a run of a sweep aborts.

    :ivar spec: The :class:`RunSpec` of the run which failed.
    """
    def __init__(self, spec, cause):
        self.spec = spec
        self.cause = cause
        super(SweepError, self).__init__(
            "Run {run} ({sweep}={value}, variant={variant}, hia={hia}, "
            "seed={seed}, run seed={run_seed}) failed: {cause}".format(
                run=spec.index, sweep=spec.sweep, value=spec.sweep_value,
                variant=spec.variant, hia=format_value(spec.hia),
                seed=spec.seed, run_seed=spec.config.seed,
                cause=cause))


@dataclass(frozen=True)
class RunSpec(object):
    """
    One run of an experiment.

    :ivar index: Position of the run in the enumeration of the experiment.
    :ivar seed: The seed named in the experiment; the run itself is seeded
        with ``config.seed`` derived from it.
    """
    index: int
    sweep: str
    sweep_value: float
    variant: Variant
    hia: bool
    seed: int
    config: SimulationConfig

    @property
    def label(self):
        return 'run{:04d}'.format(self.index)


@dataclass(frozen=True)
class AggregateRow(object):
    """
    The seed means of the metrics of one (sweep value, variant, HIA mode)
    cell of an experiment.
    """
    sweep_value: float
    variant: str
    hia: bool
    mean_pdr: float
    mean_nrl: float
    stderr_pdr: float
    stderr_nrl: float
    n_seeds: int

    @classmethod
    def csv_fields(cls):
        return list(cls.__dataclass_fields__)

    def as_row(self):
        return {
            name: format_value(getattr(self, name))
            for name in self.csv_fields()
        }


def shared_parameters(experiment):
    """
    The parameters all runs of ``experiment`` share, as plain values.
    """
    parameters = resolved_parameters(experiment.base)
    for name in ('variant', 'hia', 'seed'):
        del parameters[name]
    return parameters


def config_digest(experiment):
    """
    A digest of the parameters an experiment's runs share, independent of
    the variants, HIA modes and seeds it lists.
    """
    canonical = yaml.safe_dump(shared_parameters(experiment), sort_keys=True)
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def derive_seed(digest, sweep, value, seed):
    """
    The seed of the runs at sweep point ``value`` for the experiment seed
    ``seed``. Every variant and HIA mode of the point gets the same one, so
    they all see the same mobility, noise and traffic.
    """
    key = '{digest}:{sweep}:{value!r}:{seed}'.format(
        digest=digest, sweep=sweep, value=value, seed=seed)
    return int.from_bytes(
        hashlib.sha256(key.encode('utf-8')).digest()[:8], 'big') >> 1


def enumerate_runs(experiment):
    """
    Lists the runs of ``experiment`` ordered by sweep value, variant, HIA
    mode and seed, in the order they are given.

    :rtype: list of :class:`RunSpec`
    """
    digest = config_digest(experiment)
    cells = itertools.product(
        experiment.sweep_values, experiment.variants, experiment.hia_modes,
        experiment.seeds)
    return [
        RunSpec(
            index=index,
            sweep=experiment.sweep,
            sweep_value=value,
            variant=variant,
            hia=hia,
            seed=seed,
            config=experiment.run_config(
                value, variant, hia,
                derive_seed(digest, experiment.sweep, value, seed)))
        for index, (value, variant, hia, seed) in enumerate(cells)
    ]


def execute_run(spec, trace_dir=None):
    """
    Runs one simulation. Module level so that worker processes can
    unpickle it.

    :rtype: :class:`MetricsReport
        <empsim.simulation.metrics.MetricsReport>`
    """
    return engine.run(spec.config, trace_dir=trace_dir, label=spec.label,
                      digest=trace_dir is not None)


def _execute_run_logged(spec, trace_dir):
    try:
        return execute_run(spec, trace_dir)
    except Exception as e:
        logger.exception("Run %s aborted", spec.label)
        raise SweepError(spec, e) from e


def _mean_and_stderr(values):
    n = len(values)
    if any(math.isinf(value) for value in values):
        return math.inf, math.inf
    mean = math.fsum(values) / n
    if n < 2:
        return mean, 0.0
    std = float(np.std(values, ddof=1))
    return mean, std / math.sqrt(n)


def aggregate(runs, reports):
    """
    Folds the reports of ``runs``, in enumeration order, into one
    :class:`AggregateRow` per (sweep value, variant, HIA mode) cell.

    A cell in which a seed delivered nothing has an infinite mean (and
    standard error) of the normalized routing load.
    """
    cells = {}
    for spec, report in zip(runs, reports):
        key = (spec.sweep_value, spec.variant, spec.hia)
        cells.setdefault(key, []).append(report)

    rows = []
    for (value, variant, hia), cell in cells.items():
        mean_pdr, stderr_pdr = _mean_and_stderr([r.pdr for r in cell])
        mean_nrl, stderr_nrl = _mean_and_stderr([r.nrl for r in cell])
        rows.append(AggregateRow(
            sweep_value=value,
            variant=str(variant),
            hia=hia,
            mean_pdr=mean_pdr,
            mean_nrl=mean_nrl,
            stderr_pdr=stderr_pdr,
            stderr_nrl=stderr_nrl,
            n_seeds=len(cell)))
    return rows


@dataclass
class SweepResult(object):
    experiment: object
    runs: List[RunSpec]
    reports: List[MetricsReport]
    rows: List[AggregateRow]
    files: Tuple[str, ...] = ()


class SweepRunner(object):
    """
    Runs all the runs of an experiment and writes the raw and aggregate
    results.

    :param jobs: The number of runs executed at once. With a single job the
        runs execute in this process.
    :param trace: Whether every run writes its CSV traces.
    """
    def __init__(self, experiment, out_dir, jobs=1, trace=False,
                 progress=None):
        self.experiment = experiment
        self.out_dir = out_dir
        self.jobs = jobs
        self.trace = trace
        self.progress = progress

    @property
    def trace_dir(self):
        if self.trace:
            return os.path.join(self.out_dir, TRACE_DIRECTORY)
        return None

    def run(self):
        """
        :raises SweepError: As soon as a run aborts.
        :rtype: :class:`SweepResult`
        """
        runs = enumerate_runs(self.experiment)
        logger.info("Starting experiment %s: %d runs on %d job(s)",
                    self.experiment.name, len(runs), self.jobs)
        os.makedirs(self.out_dir, exist_ok=True)
        if self.trace_dir is not None:
            os.makedirs(self.trace_dir, exist_ok=True)

        reports = self._execute(runs)
        rows = aggregate(runs, reports)
        files = (
            self.write_raw_runs(runs, reports),
            self.write_aggregate(rows),
            self.write_metadata(runs),
        )
        logger.info("Finished experiment %s", self.experiment.name)
        return SweepResult(self.experiment, runs, reports, rows, files)

    def _execute(self, runs):
        if self.jobs <= 1:
            return [self._finished(spec, _execute_run_logged(
                spec, self.trace_dir)) for spec in runs]

        with ProcessPoolExecutor(max_workers=self.jobs) as executor:
            futures = [
                executor.submit(execute_run, spec, self.trace_dir)
                for spec in runs
            ]
            reports = []
            # Collected in enumeration order, whatever order they finish in
            for spec, future in zip(runs, futures):
                try:
                    report = future.result()
                except Exception as e:
                    logger.exception("Run %s aborted", spec.label)
                    for pending in futures:
                        pending.cancel()
                    raise SweepError(spec, e) from e
                reports.append(self._finished(spec, report))
            return reports

    def _finished(self, spec, report):
        logger.debug("Run %s done: pdr=%s nrl=%s", spec.label,
                     format_value(report.pdr), format_value(report.nrl))
        if self.progress is not None:
            self.progress(spec, report)
        return report

    def _path(self, name):
        return os.path.join(self.out_dir, name)

    def write_raw_runs(self, runs, reports):
        path = self._path(RAW_RUNS_FILE)
        columns = MetricsReport.csv_fields() + list(RUN_COLUMNS)
        with open(path, 'w', newline='') as f:
            writer = csv.DictWriter(f, fieldnames=columns,
                                    lineterminator='\n')
            writer.writeheader()
            for spec, report in zip(runs, reports):
                row = report.as_row()
                row.update(
                    seed=str(spec.seed),
                    run=str(spec.index),
                    sweep_value=format_value(spec.sweep_value),
                    run_seed=str(spec.config.seed))
                writer.writerow(row)
        logger.info("Wrote %s", path)
        return path

    def write_aggregate(self, rows):
        path = self._path(AGGREGATE_FILE)
        with open(path, 'w', newline='') as f:
            writer = csv.DictWriter(f, fieldnames=AggregateRow.csv_fields(),
                                    lineterminator='\n')
            writer.writeheader()
            for row in rows:
                writer.writerow(row.as_row())
        logger.info("Wrote %s", path)
        return path

    def write_metadata(self, runs):
        metadata = experiment_metadata(self.experiment, runs)
        path = self._path(METADATA_FILE)
        with open(path, 'w') as f:
            yaml.safe_dump(metadata, f, sort_keys=False,
                           default_flow_style=False)
        logger.info("Wrote %s", path)
        return path


def experiment_metadata(experiment, runs=None):
    """
    Describes ``experiment`` with plain values: its resolved parameters,
    what it sweeps over and, when given, the enumeration of its ``runs``.
    """
    metadata = {
        'name': experiment.name,
        'preset': experiment.preset,
        'sweep': {
            'kind': experiment.sweep,
            'values': list(experiment.sweep_values),
            'implementer_choice': experiment.implementer_choice,
        },
        'variants': [str(variant) for variant in experiment.variants],
        'hia': experiment.hia,
        'seeds': list(experiment.seeds),
        'run_count': experiment.run_count,
        'config_digest': config_digest(experiment),
        'base': shared_parameters(experiment),
    }
    if runs is not None:
        metadata['runs'] = [
            {
                'run': spec.index,
                'sweep_value': spec.sweep_value,
                'variant': str(spec.variant),
                'hia': spec.hia,
                'seed': spec.seed,
                'run_seed': spec.config.seed,
            }
            for spec in runs
        ]
    return metadata


def run_sweep(experiment, out_dir, jobs=1, trace=False, progress=None):
    """
    Executes every run of ``experiment`` and writes ``raw_runs.csv``,
    ``aggregate.csv`` and ``metadata.yaml`` into ``out_dir``.

    :param progress: Called with the :class:`RunSpec` and the report of
        each run as it is collected.
    :raises SweepError: If a run aborts.
    :rtype: :class:`SweepResult`
    """
    return SweepRunner(experiment, out_dir, jobs=jobs, trace=trace,
                       progress=progress).run()
