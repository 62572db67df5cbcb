# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
Per-node self-location estimators.

An estimator consumes the node's location fixes through :meth:`observe` and
answers :meth:`estimate` with a
:class:`NodeKinematicEstimate <empsim.core.prediction.NodeKinematicEstimate>`
for any later time. Which one a protocol agent owns decides what it puts in
the location fields of its control messages:

- :class:`MeasurementEstimator`: the raw last fix and the velocity differenced
  from the last two fixes.
- :class:`KalmanEstimator`: the Kalman filter estimate and its RMS error.
- :class:`GroundTruthEstimator`: the true kinematic state, error free.
"""
from __future__ import annotations

import numpy as np

from empsim.core import kalman
from empsim.core.geometry import ORIGIN, Vec2
from empsim.core.prediction import NodeKinematicEstimate
from empsim.core.prediction import estimate_velocity


class MeasurementEstimator(object):
    """
    Uses the location fixes as they are.
    """
    def __init__(self):
        self.last = None
        self.previous = None

    def observe(self, measurement):
        self.previous, self.last = self.last, measurement

    def _velocity(self):
        if self.previous is None:
            return ORIGIN
        return estimate_velocity(self.last, self.previous)

    def estimate(self, now):
        if self.last is None:
            return None
        current = NodeKinematicEstimate(
            position=self.last.measured_position,
            velocity=self._velocity(),
            rms_error=0.0,
            timestamp=self.last.timestamp)
        return current.advanced_to(now)


class KalmanEstimator(MeasurementEstimator):
    """
    Runs the node's fixes through a Kalman filter.

    The measurement state is the fix and, for the differenced observation,
    the velocity differenced from the previous fix. The first fix only
    initializes the filter.
    """
    def __init__(self, model):
        super(KalmanEstimator, self).__init__()
        self.model = model
        self.state = None

    def observe(self, measurement):
        super(KalmanEstimator, self).observe(measurement)
        if self.state is None:
            self.state = kalman.filter_init(measurement, self.model)
            return
        prior = kalman.time_update(
            self.state, measurement.timestamp, q_scale=self.model.q_scale)
        position = measurement.measured_position
        if self.model.velocity_source == kalman.VELOCITY_POSITION_ONLY:
            z = np.array([position.x, position.y])
        else:
            velocity = self._velocity()
            z = np.array([position.x, position.y, velocity.x, velocity.y])
        self.state = kalman.measurement_update(prior, z, self.model)

    @property
    def resets(self):
        return self.state.resets if self.state is not None else 0

    def estimate(self, now):
        if self.state is None:
            return None
        px, py = self.state.position
        vx, vy = self.state.velocity
        current = NodeKinematicEstimate(
            position=Vec2(px, py),
            velocity=Vec2(vx, vy),
            rms_error=kalman.position_rms(self.state).rms_error,
            timestamp=self.state.last_update)
        return current.advanced_to(now)


class GroundTruthEstimator(object):
    """
    Reads the node's true state from its mobility model. Fixes are ignored.
    """
    def __init__(self, mobility):
        self.mobility = mobility

    def observe(self, measurement):
        pass

    def estimate(self, now):
        state = self.mobility.state_at(now)
        return NodeKinematicEstimate(
            position=state.position,
            velocity=state.velocity,
            rms_error=0.0,
            timestamp=now)
