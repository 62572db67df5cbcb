# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.

"""Default Django settings for the EMP Simulator project.

Most settings are documented in this file and they are initialized to some
reasonable default values when possible.  They will be extended (and
possibly overriden) by settings from the other modules in this package
depending on the setup selected by the administrator. You likely won't
have to modify that file.

You should instead modify local.py to put your site-specific settings.
"""
from os.path import dirname
import os.path

DEBUG = False

EMPSIM_BASE_PATH = dirname(dirname(dirname(dirname(__file__))))

# No model is stored; the apps only need settings, logging and commands.
DATABASES = {}

TIME_ZONE = 'UTC'

USE_TZ = True

SECRET_KEY = 'empsim-has-no-web-surface-and-signs-nothing'

INSTALLED_APPS = (
    'empsim.core',
    'empsim.routing',
    'empsim.simulation',
    'empsim.experiments',
)

# See http://docs.djangoproject.com/en/dev/topics/logging for
# more details on how to customize your logging configuration.
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '%(levelname)s %(asctime)s %(module)s '
                      '%(process)d %(thread)d %(message)s'
        },
        'simple': {
            'format': '%(levelname)s %(message)s'
        },
        'simple-timestamp': {
            'format': '%(levelname)s %(asctime)s %(message)s'
        },
    },
    'handlers': {
        'console': {
            'level': 'INFO',
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
        'console-timestamp': {
            'level': 'INFO',
            'class': 'logging.StreamHandler',
            'formatter': 'simple-timestamp',
        },
    },
    'loggers': {
        'empsim.core': {
            'handlers': ['console'],
            'level': 'INFO',
            'propagate': True,
        },
        'empsim.routing': {
            'handlers': ['console'],
            'level': 'INFO',
            'propagate': True,
        },
        'empsim.simulation': {
            'handlers': ['console-timestamp'],
            'level': 'INFO',
            'propagate': True,
        },
        'empsim.experiments': {
            'handlers': ['console-timestamp'],
            'level': 'INFO',
            'propagate': True,
        },
    }
}

## EMP Simulator specific settings

#: The directory ``emp_run`` writes into when no ``--out`` is given. Each
#: experiment gets a subdirectory named after it.
EMPSIM_OUTPUT_DIRECTORY = os.path.join(EMPSIM_BASE_PATH, 'data', 'runs')

#: The largest value accepted for ``emp_run --jobs``.
EMPSIM_MAX_JOBS = os.cpu_count() or 1

#: The seeds of an experiment file which does not list any.
EMPSIM_DEFAULT_SEEDS = tuple(range(1, 11))

#: Named overlays applied between the built-in parameter defaults and an
#: experiment file. Besides simulation parameters a preset may give
#: ``seeds``.
EMPSIM_PRESETS = {
    # Small enough to run the acceptance sweeps on a desktop in minutes.
    'desk': {
        'nodes': 50,
        'area_width': 1000.0,
        'area_height': 750.0,
        'duration': 300.0,
        'pairs': 5,
        'seeds': [1, 2, 3, 4, 5],
    },
}
