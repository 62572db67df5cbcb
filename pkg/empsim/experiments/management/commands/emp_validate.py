# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
Implements a command which checks an experiment file and prints the
experiment it resolves to.
"""
import yaml

from empsim.experiments.management.base import ExperimentCommand
from empsim.experiments.sweeps import experiment_metadata


class Command(ExperimentCommand):
    help = "Validate an experiment file and print the resolved experiment."

    def handle(self, *args, **kwargs):
        experiment = self.load_experiment(kwargs)
        self.stdout.write(yaml.safe_dump(
            experiment_metadata(experiment), sort_keys=False,
            default_flow_style=False))
