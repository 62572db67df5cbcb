# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
Mobility prediction: linear location extrapolation, velocity estimation from
two fixes, link duration (LDT), route expiration time (RET) and the
confidence level of a predicted link duration.

All functions are pure.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

from empsim.core.geometry import Vec2

#: The value of an LDT or RET that never expires.
UNBOUNDED = math.inf


@dataclass(frozen=True)
class NodeKinematicEstimate(object):
    """
    What a node believes about a node's (its own or a neighbor's) motion at
    ``timestamp``.
    """
    position: Vec2
    velocity: Vec2
    rms_error: float = 0.0
    timestamp: float = 0.0

    def __post_init__(self):
        if not self.rms_error >= 0:
            raise ValueError(
                "The RMS error of an estimate must be non-negative")

    def advanced_to(self, now):
        """
        Returns the estimate extrapolated to ``now`` with the same velocity
        and RMS error.
        """
        dt = now - self.timestamp
        if dt <= 0:
            return self
        return NodeKinematicEstimate(
            predict_position(self, dt), self.velocity, self.rms_error, now)


@dataclass(frozen=True)
class LinkForecast(object):
    """
    The predicted duration of a link together with its confidence level.
    """
    ldt: float
    epsilon: float

    @property
    def risky(self):
        return self.ldt < self.epsilon


@dataclass(frozen=True)
class RouteMetric(object):
    """
    What a destination ranks the collected copies of a RREQ by.
    """
    ret: float
    hop_count: int

    def __post_init__(self):
        if self.ret < 0 or self.hop_count < 1:
            raise ValueError(
                "Invalid route metric: ret={ret}, hop_count={hops}".format(
                    ret=self.ret, hops=self.hop_count))

    def better_than(self, other):
        """
        A longer RET wins, then fewer hops.
        """
        return self.ret > other.ret or (
            self.ret == other.ret and self.hop_count < other.hop_count)


def predict_position(est, dt):
    """
    ``position + velocity * dt``.
    """
    if dt < 0:
        raise ValueError("Cannot predict a position into the past")
    if dt == 0:
        return est.position
    return est.position + est.velocity * dt


def estimate_velocity(curr, prev):
    """
    The velocity implied by two location fixes:
    ``(curr - prev) / (t_curr - t_prev)`` per axis.

    :type curr: :class:`Measurement <empsim.core.geometry.Measurement>`
    :type prev: :class:`Measurement <empsim.core.geometry.Measurement>`
    :raises ZeroDivisionError: If both fixes have the same timestamp.
    :raises ValueError: If ``prev`` is more recent than ``curr``.
    """
    dt = curr.timestamp - prev.timestamp
    if dt == 0:
        raise ZeroDivisionError(
            "Cannot estimate a velocity from two fixes taken at "
            "t={t}".format(t=curr.timestamp))
    if dt < 0:
        raise ValueError("The previous fix is more recent than the current")
    return (curr.measured_position - prev.measured_position) / dt


def link_duration(a, b, r):
    """
    The longest time ``t >= 0`` for which two nodes moving linearly from the
    given estimates stay within ``r`` meters of each other.

    Solves ``|dV|^2 t^2 + 2 (dX . dV) t + |dX|^2 - r^2 = 0`` and returns the
    larger root clamped at zero. With no relative motion the link lasts
    forever if the nodes are in range and not at all otherwise.

    Both estimates must refer to the same time; see
    :meth:`NodeKinematicEstimate.advanced_to`.

    :returns: Seconds, or :data:`UNBOUNDED`.
    """
    if not r > 0:
        raise ValueError("The transmission range must be positive")
    dx = a.position - b.position
    dv = a.velocity - b.velocity
    qa = dv.squared_norm()
    qb = 2 * dx.dot(dv)
    qc = dx.squared_norm() - r * r
    if qa == 0:
        return UNBOUNDED if qc <= 0 else 0.0
    discriminant = qb * qb - 4 * qa * qc
    if discriminant < 0:
        return 0.0
    root = math.sqrt(discriminant)
    # Avoids cancellation between qb and root.
    if qb >= 0:
        q = -(qb + root) / 2
        larger = qc / q if q != 0 else 0.0
    else:
        q = -(qb - root) / 2
        larger = q / qa
    return max(larger, 0.0)


def route_expiration(ldts):
    """
    The expiration time of a route: the shortest link duration along it.

    :raises ValueError: If ``ldts`` is empty.
    """
    ldts = list(ldts)
    if not ldts:
        raise ValueError("A route has at least one link")
    return min(ldts)


def confidence_level(a_rms, b_rms, rel_speed):
    """
    The time it takes the combined position error of a link's endpoints to
    be covered at their relative speed: ``sqrt(a_rms^2 + b_rms^2) /
    rel_speed``.

    Nodes with no relative motion get an infinite confidence level unless
    both positions are exact.
    """
    if rel_speed < 0:
        raise ValueError("The relative speed must be non-negative")
    combined = math.hypot(a_rms, b_rms)
    if rel_speed == 0:
        return UNBOUNDED if combined > 0 else 0.0
    return combined / rel_speed


def forecast_link(a, b, r):
    """
    Computes the :class:`LinkForecast` between two time-aligned estimates.
    """
    ldt = link_duration(a, b, r)
    epsilon = confidence_level(
        a.rms_error, b.rms_error, (a.velocity - b.velocity).norm())
    return LinkForecast(ldt=ldt, epsilon=epsilon)


def cap(value, horizon):
    """
    Encodes a possibly unbounded duration as a finite message field.
    """
    return min(value, horizon)
