# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
Small scenarios for the simulation tests.
"""
from empsim.simulation.config import MOBILITY_STATIC
from empsim.simulation.config import SimulationConfig


def static_config(positions, flows, **changes):
    """
    A run over nodes fixed at ``positions`` exchanging 1 packet/s along
    ``flows`` for 10 s, without location errors.
    """
    parameters = dict(
        nodes=len(positions),
        mobility=MOBILITY_STATIC,
        positions=positions,
        flows=flows,
        duration=10.0,
        rate=1.0,
        sigma=0.0,
        area_width=1000.0,
        area_height=1000.0,
    )
    parameters.update(changes)
    return SimulationConfig(**parameters)


def small_rwp_config(**changes):
    """
    A short random waypoint run, small enough for the unit test suite.
    """
    parameters = dict(
        nodes=15,
        area_width=800.0,
        area_height=600.0,
        duration=30.0,
        pairs=3,
        rate=2.0,
        v_min=1.0,
        v_max=10.0,
        seed=7,
    )
    parameters.update(changes)
    return SimulationConfig(**parameters)
