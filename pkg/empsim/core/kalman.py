# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
The discrete Kalman filter each node runs over its own location fixes.

The state is the 4-vector ``(pos_x, pos_y, vel_x, vel_y)`` under a constant
velocity model. The a posteriori error covariance ``P`` is what the routing
layer turns into the confidence level of a link duration.

Random waypoint nodes turn without warning. A model with process noise keeps
``P`` from collapsing between turns, and an innovation gate restarts the
filter from the fix when a measurement lies far outside what ``P`` and ``R``
predict.

All operations are pure transitions between :class:`FilterState` instances.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
import logging
import math
from typing import Optional
import warnings

import numpy as np
import scipy.linalg
import scipy.stats

logger = logging.getLogger(__name__)

#: The measurement state carries the differenced velocity; B is the identity.
VELOCITY_DIFFERENCED = 'differenced'
#: Only the position is observed; B = [I 0].
VELOCITY_POSITION_ONLY = 'position'

VELOCITY_SOURCES = (VELOCITY_DIFFERENCED, VELOCITY_POSITION_ONLY)

IDENTITY = np.eye(4)


class TimeTravelError(ValueError):
    """
    Raised when a filter is asked to predict to a time before its last
    update.
    """
    pass


def transition_matrix(dt):
    """
    Returns the constant-velocity state transition ``A`` for a step of ``dt``
    seconds: ``[[I, dt*I], [0, I]]`` in 2x2 blocks.
    """
    A = np.eye(4)
    A[0, 2] = dt
    A[1, 3] = dt
    return A


def process_noise(dt, q_scale):
    """
    The white-noise-acceleration process covariance for a step of ``dt``
    seconds with spectral density ``q_scale``. Zero when ``q_scale`` is zero.
    """
    Q = np.zeros((4, 4))
    if q_scale:
        for pos, vel in ((0, 2), (1, 3)):
            Q[pos, pos] = q_scale * dt ** 3 / 3
            Q[pos, vel] = Q[vel, pos] = q_scale * dt ** 2 / 2
            Q[vel, vel] = q_scale * dt
    return Q


def build_measurement_covariance(sigma, measurement_period,
                                 diagonal_only=False):
    """
    Builds the 4x4 covariance of the measurement state noise for a per-axis
    location error ``sigma`` and a nominal fix period.

    The velocity component of a measurement is the difference of two
    consecutive fixes divided by the period, so its variance is
    ``2 sigma^2 / dT^2`` and it is correlated with the position component
    by ``sigma^2 / dT``. ``diagonal_only`` drops that correlation.
    """
    if not measurement_period > 0:
        raise ValueError("The measurement period must be positive")
    variance = float(sigma) ** 2
    R = np.zeros((4, 4))
    R[0, 0] = R[1, 1] = variance
    R[2, 2] = R[3, 3] = 2 * variance / measurement_period ** 2
    if not diagonal_only:
        R[0, 2] = R[2, 0] = variance / measurement_period
        R[1, 3] = R[3, 1] = variance / measurement_period
    return R


@dataclass(frozen=True, eq=False)
class FilterModel(object):
    """
    The fixed parameters of a node's filter.

    :ivar R: The measurement error covariance. 4x4 for the differenced
        observation, 2x2 for the position-only observation.
    :ivar measurement_period: The nominal time between fixes.
    :ivar initial_covariance: ``P`` right after :func:`filter_init`.
    :ivar gate_probability: The probability mass of the chi-square
        innovation gate, or ``None`` for no gating.
    """
    R: np.ndarray
    measurement_period: float = 1.0
    initial_covariance: np.ndarray = None
    q_scale: float = 0.0
    velocity_source: str = VELOCITY_DIFFERENCED
    joseph_form: bool = False
    gate_probability: Optional[float] = None

    def __post_init__(self):
        if self.velocity_source not in VELOCITY_SOURCES:
            raise ValueError(
                "Unknown velocity source {source!r}".format(
                    source=self.velocity_source))
        if self.gate_probability is not None and not (
                0 < self.gate_probability < 1):
            raise ValueError("The gate probability must lie in (0, 1)")
        if self.initial_covariance is None:
            if self.R.shape != (4, 4):
                raise ValueError(
                    "A 4x4 initial covariance is required with a "
                    "position-only measurement covariance")
            object.__setattr__(self, 'initial_covariance', self.R.copy())

    @classmethod
    def from_noise(cls, sigma, measurement_period=1.0, diagonal_only=False,
                   q_scale=0.0, velocity_source=VELOCITY_DIFFERENCED,
                   joseph_form=False, gate_probability=None):
        """
        Builds the model from a known location error standard deviation.

        With the position-only observation ``R`` is ``sigma^2 I`` and the
        initial covariance gets the differenced velocity variance as the
        prior on the (unknown) velocity, uncorrelated with the position.
        """
        full = build_measurement_covariance(
            sigma, measurement_period,
            diagonal_only=(
                diagonal_only or velocity_source == VELOCITY_POSITION_ONLY))
        if velocity_source == VELOCITY_POSITION_ONLY:
            R = full[:2, :2].copy()
        else:
            R = full
        return cls(
            R=R,
            measurement_period=measurement_period,
            initial_covariance=full.copy(),
            q_scale=q_scale,
            velocity_source=velocity_source,
            joseph_form=joseph_form,
            gate_probability=gate_probability)

    @property
    def observation_matrix(self):
        if self.velocity_source == VELOCITY_POSITION_ONLY:
            return IDENTITY[:2, :]
        return IDENTITY

    @property
    def noise_free(self):
        return not np.any(self.R)

    @cached_property
    def gate_threshold(self):
        """
        The largest accepted squared Mahalanobis distance of an innovation,
        ``inf`` without gating.
        """
        if self.gate_probability is None:
            return math.inf
        return float(scipy.stats.chi2.ppf(
            self.gate_probability, df=self.observation_matrix.shape[0]))


@dataclass(frozen=True, eq=False)
class FilterState(object):
    """
    :ivar x_hat: The a posteriori state estimate.
    :ivar P: The a posteriori estimate error covariance.
    :ivar last_update: The time the estimate refers to.
    :ivar resets: How many times the filter restarted from a fix, see
        :func:`measurement_update`.
    """
    x_hat: np.ndarray
    P: np.ndarray
    last_update: float
    resets: int = field(default=0)

    @property
    def position(self):
        return float(self.x_hat[0]), float(self.x_hat[1])

    @property
    def velocity(self):
        return float(self.x_hat[2]), float(self.x_hat[3])


@dataclass(frozen=True)
class PositionErrorStats(object):
    """
    The root-mean-square position error implied by a covariance.
    """
    rms_error: float


def _symmetrize(P):
    return (P + P.T) / 2


def filter_init(first_meas, model):
    """
    Starts a filter from its first fix: the position is the measured one,
    the velocity zero and ``P`` the model's initial covariance.

    :type first_meas: :class:`Measurement <empsim.core.geometry.Measurement>`
    :type model: :class:`FilterModel`
    :rtype: :class:`FilterState`
    """
    position = first_meas.measured_position
    return FilterState(
        x_hat=np.array([position.x, position.y, 0.0, 0.0]),
        P=model.initial_covariance.copy(),
        last_update=first_meas.timestamp)


def time_update(s, now, q_scale=0.0):
    """
    Predicts the state forward to ``now``.

    ``x^- = A x`` and ``P^- = A P A^T (+ Q)``. Process noise is only added
    when ``q_scale`` is non-zero.

    :raises TimeTravelError: If ``now`` is before ``s.last_update``.
    """
    dt = now - s.last_update
    if dt < 0:
        raise TimeTravelError(
            "Cannot predict a filter updated at {last} back to {now}".format(
                last=s.last_update, now=now))
    if dt == 0 and not q_scale:
        return FilterState(s.x_hat.copy(), s.P.copy(), now, s.resets)
    A = transition_matrix(dt)
    x_prior = A @ s.x_hat
    P_prior = A @ s.P @ A.T + process_noise(dt, q_scale)
    return FilterState(x_prior, _symmetrize(P_prior), now, s.resets)


def joseph_covariance(P_prior, K, B, R):
    """
    The Joseph stabilized form of the a posteriori covariance:
    ``(I - K B) P^- (I - K B)^T + K R K^T``.
    """
    I_KB = IDENTITY - K @ B
    return I_KB @ P_prior @ I_KB.T + K @ R @ K.T


def _solve_innovation(S, rhs):
    with warnings.catch_warnings():
        warnings.simplefilter('error', scipy.linalg.LinAlgWarning)
        try:
            return scipy.linalg.solve(S, rhs, assume_a='sym')
        except scipy.linalg.LinAlgWarning as warning:
            raise np.linalg.LinAlgError(str(warning))


def kalman_gain(P_prior, B, R):
    """
    ``K = P^- B^T (B P^- B^T + R)^-1``, solved with a symmetric-pivoting
    factorization of the innovation covariance.

    :raises numpy.linalg.LinAlgError: If the innovation covariance is
        singular or numerically so.
    """
    S = B @ P_prior @ B.T + R
    return _solve_innovation(S, B @ P_prior).T


def innovation_distance(P_prior, B, R, innovation):
    """
    The squared Mahalanobis distance ``y^T S^-1 y`` of an innovation ``y``
    under the innovation covariance ``S = B P^- B^T + R``.

    :raises numpy.linalg.LinAlgError: If ``S`` is singular.
    """
    S = B @ P_prior @ B.T + R
    return float(innovation @ _solve_innovation(S, innovation))


def _restart(s, z, model):
    x_reset = s.x_hat.copy()
    x_reset[:len(z)] = z
    return FilterState(
        x_reset, model.initial_covariance.copy(), s.last_update,
        s.resets + 1)


def measurement_update(s, z, model):
    """
    Corrects the a priori state ``s`` with the measurement state ``z``.

    The filter restarts from the measurement (the estimate becomes ``z`` and
    ``P`` the model's initial covariance) when:

    - the measurements are noise free and observe the whole state, which
      makes them exact;
    - the innovation covariance cannot be inverted;
    - the innovation falls outside the model's chi-square gate, as it does
      once a node has turned away from the predicted course.

    :param s: The a priori state, as returned by :func:`time_update`.
    :param z: The measurement state. A 4-vector (position and differenced
        velocity) or a 2-vector for the position-only observation.
    :type model: :class:`FilterModel`
    :rtype: :class:`FilterState`
    """
    z = np.asarray(z, dtype=float)
    B = model.observation_matrix
    if model.noise_free and B.shape[0] == len(s.x_hat):
        logger.debug("Noise-free measurements, taking the fix as is")
        return _restart(s, z, model)
    innovation = z - B @ s.x_hat
    gated = not math.isinf(model.gate_threshold)
    try:
        K = kalman_gain(s.P, B, model.R)
        distance = (
            innovation_distance(s.P, B, model.R, innovation) if gated
            else 0.0)
    except np.linalg.LinAlgError:
        if model.noise_free:
            logger.debug("Singular innovation covariance with noise-free "
                         "measurements, taking the fix as is")
        else:
            logger.warning("Singular innovation covariance at t=%s, "
                           "resetting the filter", s.last_update)
        return _restart(s, z, model)
    if gated and distance > model.gate_threshold:
        logger.debug("Innovation at t=%s outside the gate (%.1f > %.1f), "
                     "restarting from the fix", s.last_update, distance,
                     model.gate_threshold)
        return _restart(s, z, model)

    x_post = s.x_hat + K @ innovation
    if model.joseph_form:
        P_post = joseph_covariance(s.P, K, B, model.R)
    else:
        P_post = (IDENTITY - K @ B) @ s.P
    return FilterState(x_post, _symmetrize(P_post), s.last_update, s.resets)


def position_rms(s):
    """
    The RMS position error ``sqrt(P[0][0] + P[1][1])``.

    Negative diagonal entries can only come from round-off; they are
    clamped to zero.

    :rtype: :class:`PositionErrorStats`
    """
    variances = [float(s.P[0, 0]), float(s.P[1, 1])]
    if min(variances) < 0:
        logger.warning("Negative position variance %s clamped to zero",
                       min(variances))
        variances = [max(v, 0.0) for v in variances]
    return PositionErrorStats(rms_error=math.sqrt(sum(variances)))
