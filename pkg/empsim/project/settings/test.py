"""Appropriate settings to run the test suite."""

from .development import *

from .defaults import LOGGING
# Protocol decisions are far too chatty for the test output
for logger in LOGGING['loggers'].values():
    logger['level'] = 'WARNING'
