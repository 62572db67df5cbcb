"""Site-specific settings

This is the file that you should edit to customize the setting of your
simulator installation. By default it imports settings from
``development.py``; import ``production.py`` instead on a machine dedicated
to long sweeps, and add overrides on top of those.
"""
# Load the selected configuration

from .development import *

## Add your custom settings here

# Show the per-event protocol decisions (every RREQ, RREP and RERR)
# from .defaults import LOGGING
# LOGGING['loggers']['empsim.routing']['level'] = 'DEBUG'
# LOGGING['handlers']['console']['level'] = 'DEBUG'

# EMPSIM_OUTPUT_DIRECTORY = '/srv/empsim/runs'

# Never let a sweep start more worker processes than this
# EMPSIM_MAX_JOBS = 4

# EMPSIM_PRESETS = dict(EMPSIM_PRESETS, tiny={
#     'nodes': 20,
#     'duration': 60.0,
#     'pairs': 2,
#     'seeds': [1, 2],
# })
