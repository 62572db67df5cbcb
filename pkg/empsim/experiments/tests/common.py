# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
Experiment files for the experiment tests.
"""
import os

import yaml


def tiny_experiment(**changes):
    """
    The description of an experiment of 8 short runs over a small network:
    two sigma values, AODV and EMP, two seeds.
    """
    data = {
        'name': 'tiny',
        'base': {
            'nodes': 8,
            'area_width': 500,
            'area_height': 400,
            'duration': 10,
            'pairs': 2,
            'rate': 1,
        },
        'sweep': {
            'kind': 'sigma',
            'values': [3, 30],
        },
        'variants': ['AODV', 'EMP'],
        'seeds': [1, 2],
    }
    data.update(changes)
    return data


def write_experiment(directory, data, name='experiment.yaml'):
    """
    Writes ``data`` as a YAML experiment file in ``directory`` and returns
    its path. A string is written as is.
    """
    path = os.path.join(directory, name)
    with open(path, 'w') as f:
        if isinstance(data, str):
            f.write(data)
        else:
            yaml.safe_dump(data, f)
    return path
