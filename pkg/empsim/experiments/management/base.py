# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
What the commands reading an experiment file have in common.
"""
from django.core.management.base import BaseCommand
from django.core.management.base import CommandError

from empsim.experiments.config import ConfigError
from empsim.experiments.config import load_config

#: Exit status of a command given an invalid experiment or option.
EXIT_CONFIG_ERROR = 2
#: Exit status of a command whose runs or checks failed.
EXIT_RUN_FAILURE = 3


class ExperimentCommand(BaseCommand):
    def add_arguments(self, parser):
        parser.add_argument('--config',
                            required=True,
                            help='The YAML experiment file')
        parser.add_argument('--preset',
                            default=None,
                            help=(
                                'A named parameter set applied under the '
                                'parameters of the experiment file'
                            ))

    def load_experiment(self, kwargs):
        try:
            return load_config(kwargs['config'], kwargs['preset'])
        except ConfigError as e:
            raise CommandError(str(e), returncode=EXIT_CONFIG_ERROR)
