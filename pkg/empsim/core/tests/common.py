# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
Helpers shared by the test suites of all apps.
"""
import contextlib
import shutil
import tempfile

import numpy as np

from empsim.core.geometry import Vec2
from empsim.core.prediction import NodeKinematicEstimate


@contextlib.contextmanager
def make_temp_directory(suffix=''):
    """
    Helper context manager which creates a temporary directory on enter and
    cleans it up on exit.
    """
    temp_dir_name = tempfile.mkdtemp(suffix=suffix)
    try:
        yield temp_dir_name
    finally:
        shutil.rmtree(temp_dir_name)


def temporary_output_dir(meth):
    """
    Method decorator which points ``EMPSIM_OUTPUT_DIRECTORY`` to a temporary
    directory that is removed once the method exits. The directory name is
    passed to the method as ``output_dir``.
    """
    def wrap(self, *args, **kwargs):
        with make_temp_directory('-empsim-out') as output_dir:
            with self.settings(EMPSIM_OUTPUT_DIRECTORY=output_dir):
                meth(self, *args, output_dir=output_dir, **kwargs)

    return wrap


def estimate(x, y, vx=0.0, vy=0.0, rms=0.0, t=0.0):
    """
    Shorthand for a :class:`NodeKinematicEstimate
    <empsim.core.prediction.NodeKinematicEstimate>`.
    """
    return NodeKinematicEstimate(Vec2(x, y), Vec2(vx, vy), rms, t)


def rng(seed=0):
    return np.random.default_rng(seed)
