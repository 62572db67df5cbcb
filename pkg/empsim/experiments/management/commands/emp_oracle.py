# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
Implements a command which checks the closed-form computations against the
brute-force oracles of :mod:`empsim.core.oracles`.
"""
import time

from django.core.management.base import BaseCommand
from django.core.management.base import CommandError
import numpy as np

from empsim.core import kalman
from empsim.core.geometry import Vec2
from empsim.core.oracles import DEFAULT_ORACLE_HORIZON
from empsim.core.oracles import durations_agree
from empsim.core.oracles import kalman_static_oracle
from empsim.core.oracles import ldt_grid_oracle
from empsim.core.oracles import random_estimate_pairs
from empsim.core.prediction import NodeKinematicEstimate
from empsim.core.prediction import link_duration
from empsim.experiments.management.base import EXIT_CONFIG_ERROR
from empsim.experiments.management.base import EXIT_RUN_FAILURE

ORACLE_LDT = 'ldt'
ORACLE_KALMAN = 'kalman'

#: The filtered RMS error must stay below this fraction of the raw one.
MAX_CONTRACTION = 0.6
#: Largest relative gap between the empirical and the reported variance.
MAX_INCONSISTENCY = 0.15


class Command(BaseCommand):
    """
    A management command which runs one of the oracles and fails when the
    closed forms disagree with it.
    """
    help = "Compare link durations or Kalman estimates with their oracles."

    def add_arguments(self, parser):
        parser.add_argument('oracle', choices=(ORACLE_LDT, ORACLE_KALMAN))
        parser.add_argument('--samples',
                            type=int,
                            default=10 ** 4,
                            help='Node pairs drawn for the ldt oracle')
        parser.add_argument('--trials',
                            type=int,
                            default=200,
                            help='Monte-Carlo trials of the kalman oracle')
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--range',
                            type=float,
                            default=250.0,
                            dest='r',
                            help='Transmission range of the ldt oracle')
        parser.add_argument('--sigma',
                            type=float,
                            default=20.0,
                            help='Location error of the kalman oracle')
        parser.add_argument('--fixes', type=int, default=50)

    def handle(self, *args, **kwargs):
        for name in ('samples', 'trials', 'fixes'):
            if kwargs[name] < 1:
                raise CommandError("--{} must be positive".format(name),
                                   returncode=EXIT_CONFIG_ERROR)
        started = time.monotonic()
        if kwargs['oracle'] == ORACLE_LDT:
            failures = self.check_link_durations(kwargs)
        else:
            failures = self.check_kalman(kwargs)
        self.stdout.write("Elapsed: {:.2f} s".format(
            time.monotonic() - started))
        if failures:
            raise CommandError(
                "{} check(s) failed".format(failures),
                returncode=EXIT_RUN_FAILURE)

    def check_link_durations(self, kwargs):
        horizon = DEFAULT_ORACLE_HORIZON
        r = kwargs['r']
        dx, dv = random_estimate_pairs(
            np.random.default_rng(kwargs['seed']), kwargs['samples'])
        oracle = ldt_grid_oracle(dx, dv, r, horizon=horizon)
        origin = NodeKinematicEstimate(Vec2(0.0, 0.0), Vec2(0.0, 0.0))

        disagreements = 0
        deviation = 0.0
        for (px, py), (vx, vy), expected in zip(dx, dv, oracle):
            closed_form = link_duration(
                NodeKinematicEstimate(Vec2(px, py), Vec2(vx, vy)), origin, r)
            if not durations_agree(closed_form, expected, horizon):
                disagreements += 1
                self.stderr.write(
                    "Disagreement at dx=({:.3f}, {:.3f}) dv=({:.3f}, {:.3f}):"
                    " closed form {} vs grid {}".format(
                        px, py, vx, vy, closed_form, expected))
            elif closed_form < horizon and expected < horizon:
                deviation = max(deviation, abs(closed_form - expected))

        self.stdout.write(
            "Link durations: {agreeing}/{total} pairs agree, largest "
            "deviation {deviation:.6f} s".format(
                agreeing=len(oracle) - disagreements, total=len(oracle),
                deviation=deviation))
        return disagreements

    def check_kalman(self, kwargs):
        failures = 0
        for velocity_source in kalman.VELOCITY_SOURCES:
            report = kalman_static_oracle(
                sigma=kwargs['sigma'], fixes=kwargs['fixes'],
                trials=kwargs['trials'], seed=kwargs['seed'],
                velocity_source=velocity_source)
            self.stdout.write(
                "Kalman ({source}): filtered RMS {filtered:.3f} m, raw RMS "
                "{raw:.3f} m, contraction {contraction:.3f}, variance "
                "empirical {empirical:.3f} reported {reported:.3f} "
                "(gap {consistency:.3f})".format(
                    source=velocity_source, filtered=report.filtered_rms,
                    raw=report.raw_rms, contraction=report.contraction,
                    empirical=report.empirical_variance,
                    reported=report.reported_variance,
                    consistency=report.consistency))
            if not report.contraction < MAX_CONTRACTION:
                failures += 1
                self.stderr.write("Contraction above {} with {}".format(
                    MAX_CONTRACTION, velocity_source))
            # Only the position-only observation reports a matching covariance
            if (velocity_source == kalman.VELOCITY_POSITION_ONLY and
                    not report.consistency < MAX_INCONSISTENCY):
                failures += 1
                self.stderr.write(
                    "Reported covariance off by more than {:.0%}".format(
                        MAX_INCONSISTENCY))
        return failures
