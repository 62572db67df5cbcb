"""
This file has appropriate settings for running long sweeps.

When running in production, local.py should import this file.
"""

import os.path

from .defaults import EMPSIM_BASE_PATH, LOGGING

DEBUG = False

EMPSIM_OUTPUT_DIRECTORY = os.path.join(EMPSIM_BASE_PATH, 'data', 'sweeps')

# The run-level logs carry the worker process
LOGGING['handlers']['console-timestamp']['formatter'] = 'verbose'
