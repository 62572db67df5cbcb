# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
Brute-force reference computations the closed forms are checked against.

- :func:`ldt_grid_oracle` finds link durations by evaluating the distance of
  two linearly moving nodes on a time grid.
- :func:`kalman_static_oracle` runs Monte-Carlo trials of the Kalman filter
  on a static target and compares its errors with the raw fixes and with
  the filter's own covariance.
"""
from __future__ import annotations

from dataclasses import dataclass
import logging
import math

import numpy as np

from empsim.core import kalman
from empsim.core.geometry import Measurement, Vec2
from empsim.core.prediction import UNBOUNDED, estimate_velocity

logger = logging.getLogger(__name__)

DEFAULT_ORACLE_HORIZON = 200.0
COARSE_STEP = 0.1
FINE_STEP = 0.001


def _squared_distances(dx, dv, times):
    px = dx[:, 0, None] + dv[:, 0, None] * times
    py = dx[:, 1, None] + dv[:, 1, None] * times
    return px * px + py * py


def ldt_grid_oracle(dx, dv, r, horizon=DEFAULT_ORACLE_HORIZON,
                    coarse_step=COARSE_STEP, fine_step=FINE_STEP,
                    chunk_size=512):
    """
    Link durations of many node pairs found by grid search.

    For each pair the relative position ``dx`` and relative velocity ``dv``
    define the distance at time ``t`` as ``|dx + dv t|``. The last in-range
    instant is located on a ``coarse_step`` grid over ``[0, horizon]``,
    augmented by the instant of closest approach so that a brief crossing
    of the range is not stepped over, and then refined on a ``fine_step``
    grid.

    :param dx: An ``(n, 2)`` array of relative positions.
    :param dv: An ``(n, 2)`` array of relative velocities.
    :returns: An array of ``n`` durations. Pairs still in range at the
        horizon get :data:`UNBOUNDED <empsim.core.prediction.UNBOUNDED>`,
        pairs never in range get 0.
    """
    dx = np.atleast_2d(np.asarray(dx, dtype=float))
    dv = np.atleast_2d(np.asarray(dv, dtype=float))
    r2 = float(r) * float(r)
    coarse = np.arange(int(round(horizon / coarse_step)) + 1) * coarse_step
    fine = np.arange(int(round(coarse_step / fine_step)) + 1) * fine_step
    results = np.empty(len(dx))

    for start in range(0, len(dx), chunk_size):
        cx = dx[start:start + chunk_size]
        cv = dv[start:start + chunk_size]
        rows = np.arange(len(cx))

        inside = _squared_distances(cx, cv, coarse) <= r2
        any_coarse = inside.any(axis=1)
        last_index = inside.shape[1] - 1 - np.argmax(inside[:, ::-1], axis=1)
        last_t = np.where(any_coarse, coarse[last_index], -np.inf)

        speed2 = (cv * cv).sum(axis=1)
        safe_speed2 = np.where(speed2 > 0, speed2, 1.0)
        closest = np.where(
            speed2 > 0,
            np.clip(-(cx * cv).sum(axis=1) / safe_speed2, 0.0, horizon),
            0.0)
        closest_inside = (
            _squared_distances(cx, cv, closest[:, None])[:, 0] <= r2)
        last_t = np.where(
            closest_inside, np.maximum(last_t, closest), last_t)
        found = any_coarse | closest_inside

        base = np.where(found, last_t, 0.0)
        refined_times = base[:, None] + fine[None, :]
        refined_inside = _squared_distances(cx, cv, refined_times) <= r2
        refined_last = (
            refined_inside.shape[1] - 1 -
            np.argmax(refined_inside[:, ::-1], axis=1))
        refined = np.where(
            refined_inside.any(axis=1),
            refined_times[rows, refined_last],
            base)

        chunk = np.where(found, refined, 0.0)
        chunk = np.where(inside[:, -1], UNBOUNDED, chunk)
        results[start:start + chunk_size] = chunk
    return results


def ldt_oracle(a, b, r, horizon=DEFAULT_ORACLE_HORIZON):
    """
    The grid-search link duration of a single pair of time-aligned
    :class:`NodeKinematicEstimate
    <empsim.core.prediction.NodeKinematicEstimate>` instances.
    """
    dx = a.position - b.position
    dv = a.velocity - b.velocity
    return float(ldt_grid_oracle(
        [[dx.x, dx.y]], [[dv.x, dv.y]], r, horizon=horizon)[0])


def random_estimate_pairs(rng, count, width=2000.0, height=1500.0,
                          max_speed=20.0):
    """
    Draws ``count`` relative positions and velocities of node pairs placed
    uniformly in a ``width`` x ``height`` area and moving in uniform random
    directions at speeds up to ``max_speed``.
    """
    def positions():
        return np.column_stack((
            rng.uniform(0.0, width, count), rng.uniform(0.0, height, count)))

    def velocities():
        speed = rng.uniform(0.0, max_speed, count)
        heading = rng.uniform(0.0, 2 * math.pi, count)
        return np.column_stack(
            (speed * np.cos(heading), speed * np.sin(heading)))

    return positions() - positions(), velocities() - velocities()


def durations_agree(closed_form, oracle, horizon, tolerance=0.002):
    """
    Whether a closed-form duration matches the grid-search one.

    They agree when within ``tolerance`` seconds of each other. A closed
    form reaching past the horizon agrees with a grid search that saw the
    pair still in range at the horizon (unbounded) or never in range
    before it (the pair only meets after the horizon).
    """
    if abs(closed_form - oracle) <= tolerance:
        return True
    if closed_form >= horizon - tolerance:
        return oracle == UNBOUNDED or oracle == 0.0
    return False


@dataclass(frozen=True)
class KalmanOracleReport(object):
    """
    :ivar filtered_rms: RMS 2-D position error of the final filter estimate.
    :ivar raw_rms: RMS 2-D position error of the final raw fix.
    :ivar empirical_variance: Per-axis variance of the final estimate error
        pooled over trials and axes.
    :ivar reported_variance: Mean per-axis position variance the filter
        reports in ``P``.
    :ivar innovation_mean: Mean position innovation pooled over all updates.
    :ivar innovation_stderr: Standard error of that mean.
    """
    trials: int
    fixes: int
    sigma: float
    velocity_source: str
    filtered_rms: float
    raw_rms: float
    empirical_variance: float
    reported_variance: float
    innovation_mean: float
    innovation_stderr: float

    @property
    def contraction(self):
        return self.filtered_rms / self.raw_rms

    @property
    def consistency(self):
        """
        The relative difference between the empirical and the reported
        position error variances.
        """
        return (abs(self.empirical_variance - self.reported_variance) /
                self.reported_variance)


def kalman_static_oracle(sigma=20.0, fixes=50, period=1.0, trials=200,
                         seed=0,
                         velocity_source=kalman.VELOCITY_DIFFERENCED,
                         diagonal_only=False, joseph_form=False,
                         position=Vec2(1000.0, 750.0)):
    """
    Filters ``fixes`` noisy fixes of a target standing still at
    ``position``, ``trials`` times, and summarizes the errors.

    :rtype: :class:`KalmanOracleReport`
    """
    rng = np.random.default_rng(seed)
    model = kalman.FilterModel.from_noise(
        sigma, period, diagonal_only=diagonal_only,
        velocity_source=velocity_source, joseph_form=joseph_form)
    truth = np.array([position.x, position.y])
    filtered_errors = []
    raw_errors = []
    reported = []
    innovations = []

    for _ in range(trials):
        noise = rng.standard_normal((fixes, 2)) * sigma
        state = None
        previous = None
        for k in range(fixes):
            fix = truth + noise[k]
            measurement = Measurement(Vec2(fix[0], fix[1]), k * period)
            if state is None:
                state = kalman.filter_init(measurement, model)
            else:
                prior = kalman.time_update(
                    state, measurement.timestamp, model.q_scale)
                innovations.extend(fix - prior.x_hat[:2])
                if velocity_source == kalman.VELOCITY_POSITION_ONLY:
                    z = fix
                else:
                    velocity = estimate_velocity(measurement, previous)
                    z = np.array([fix[0], fix[1], velocity.x, velocity.y])
                state = kalman.measurement_update(prior, z, model)
            previous = measurement
        filtered_errors.append(state.x_hat[:2] - truth)
        raw_errors.append(noise[-1])
        reported.append((state.P[0, 0] + state.P[1, 1]) / 2)

    filtered_errors = np.array(filtered_errors)
    raw_errors = np.array(raw_errors)
    innovations = np.array(innovations)
    report = KalmanOracleReport(
        trials=trials,
        fixes=fixes,
        sigma=sigma,
        velocity_source=velocity_source,
        filtered_rms=math.sqrt(
            float(np.mean((filtered_errors ** 2).sum(axis=1)))),
        raw_rms=math.sqrt(float(np.mean((raw_errors ** 2).sum(axis=1)))),
        empirical_variance=float(np.mean(filtered_errors ** 2)),
        reported_variance=float(np.mean(reported)),
        innovation_mean=float(np.mean(innovations)),
        innovation_stderr=float(
            np.std(innovations, ddof=1) / math.sqrt(len(innovations))))
    logger.debug("Kalman oracle: %s", report)
    return report
