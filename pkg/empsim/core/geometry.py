# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
Ground-truth node kinematics, unit-disk link geometry and the location
measurement noise model.

Nodes move according to the random waypoint (RWP) model: they repeatedly pick
a uniformly distributed target inside the simulation area and a uniformly
distributed speed, travel to the target in a straight line, pause and start
over. What the routing protocols get to see of a node's location is a
:class:`Measurement`, the true position perturbed by zero-mean Gaussian noise.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple
import math


class ConfigurationError(ValueError):
    """
    Raised when mobility or noise parameters are out of their valid range.
    """
    pass


@dataclass(frozen=True)
class Vec2(object):
    """
    A 2-D position (meters) or velocity (meters/second).
    """
    x: float = 0.0
    y: float = 0.0

    def __add__(self, other):
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other):
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, factor):
        return Vec2(self.x * factor, self.y * factor)

    __rmul__ = __mul__

    def __truediv__(self, divisor):
        return Vec2(self.x / divisor, self.y / divisor)

    def __neg__(self):
        return Vec2(-self.x, -self.y)

    def dot(self, other):
        return self.x * other.x + self.y * other.y

    def norm(self):
        return math.hypot(self.x, self.y)

    def squared_norm(self):
        return self.x * self.x + self.y * self.y

    def is_finite(self):
        return math.isfinite(self.x) and math.isfinite(self.y)

    def __iter__(self):
        yield self.x
        yield self.y


ORIGIN = Vec2(0.0, 0.0)

#: Seconds by which a leg may overshoot its computed arrival time and still
#: count as arrived.
ARRIVAL_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Rect(object):
    """
    The axis-aligned simulation area, anchored at the origin.
    """
    width: float
    height: float

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ConfigurationError(
                "The simulation area must have a positive width and height, "
                "got {w} x {h}".format(w=self.width, h=self.height))

    @property
    def center(self):
        return Vec2(self.width / 2, self.height / 2)

    def contains(self, point):
        return 0 <= point.x <= self.width and 0 <= point.y <= self.height

    def uniform_point(self, rng):
        """
        Returns a point drawn uniformly from the area.

        :param rng: The random stream the point is drawn from.
        :type rng: :class:`numpy.random.Generator`
        """
        return Vec2(
            float(rng.uniform(0.0, self.width)),
            float(rng.uniform(0.0, self.height)))


@dataclass(frozen=True)
class KinematicState(object):
    """
    The true kinematic state of a node at ``timestamp``.

    While a node pauses at a waypoint its velocity is zero and
    ``resume_at`` gives the time at which it leaves again.
    """
    position: Vec2
    velocity: Vec2 = ORIGIN
    timestamp: float = 0.0
    resume_at: float = 0.0

    @property
    def paused(self):
        return self.resume_at > self.timestamp


@dataclass(frozen=True)
class Waypoint(object):
    """
    The target of the current RWP leg together with the leg's speed and the
    pause observed once the target is reached.
    """
    target: Vec2
    speed: float
    pause_after: float = 0.0


@dataclass(frozen=True)
class NoiseModel(object):
    """
    Per-axis zero-mean Gaussian location error with standard deviation
    ``sigma`` meters. ``stream`` identifies the seeded random stream the
    draws come from.
    """
    sigma: float = 0.0
    stream: int = 0

    def __post_init__(self):
        if not self.sigma >= 0:
            raise ConfigurationError(
                "The location error standard deviation must be non-negative, "
                "got {sigma}".format(sigma=self.sigma))


@dataclass(frozen=True)
class Measurement(object):
    """
    A location fix: the true position plus the noise draw at ``timestamp``.
    """
    measured_position: Vec2
    timestamp: float


class Advance(NamedTuple):
    """
    The outcome of :func:`advance_node`.
    """
    state: KinematicState
    waypoint: Waypoint
    arrived: bool


def validate_speed_range(speed_range):
    """
    Checks that ``speed_range`` is a ``(v_min, v_max)`` pair with
    ``0 < v_min <= v_max``.

    :raises ConfigurationError: If the range is invalid.
    """
    v_min, v_max = speed_range
    if not (v_min > 0 and v_min <= v_max):
        raise ConfigurationError(
            "Invalid speed range [{v_min}, {v_max}]: the minimum speed must "
            "be positive and not larger than the maximum speed".format(
                v_min=v_min, v_max=v_max))
    return v_min, v_max


def rwp_next_waypoint(rect, speed_range, rng, pause=0.0):
    """
    Draws the next random waypoint leg.

    The target is uniform over ``rect`` and the speed uniform over
    ``speed_range``. A degenerate range ``[v, v]`` always gives ``v``.

    :param rect: The simulation area.
    :type rect: :class:`Rect`
    :param speed_range: ``(v_min, v_max)`` in meters/second.
    :param rng: The node's mobility stream.
    :type rng: :class:`numpy.random.Generator`
    :param pause: The pause observed at the target, in seconds.
    :raises ConfigurationError: If the speed range is invalid.
    :rtype: :class:`Waypoint`
    """
    v_min, v_max = validate_speed_range(speed_range)
    target = rect.uniform_point(rng)
    if v_min == v_max:
        speed = float(v_min)
    else:
        speed = float(rng.uniform(v_min, v_max))
    return Waypoint(target=target, speed=speed, pause_after=pause)


def advance_node(state, waypoint, dt, next_waypoint=None):
    """
    Moves a node along its RWP legs for ``dt`` seconds.

    The node travels toward ``waypoint.target`` at ``waypoint.speed``. On
    arrival it observes the waypoint's pause and, if ``next_waypoint`` is
    given, calls it to get the following leg and keeps consuming the
    remaining time. Without ``next_waypoint`` the node stays at the target.

    :param state: The state to advance from.
    :type state: :class:`KinematicState`
    :param waypoint: The current leg.
    :type waypoint: :class:`Waypoint`
    :param dt: The elapsed time in seconds. Zero returns the state unchanged.
    :param next_waypoint: A callable returning the next :class:`Waypoint`.
    :rtype: :class:`Advance`
    """
    if dt < 0:
        raise ValueError("Cannot advance a node by a negative time step")

    now = state.timestamp
    position = state.position
    resume_at = state.resume_at
    end_time = state.timestamp + dt
    remaining = dt
    arrived = False

    while True:
        if resume_at > now:
            wait = min(remaining, resume_at - now)
            now += wait
            remaining -= wait
            if resume_at > now:
                return Advance(
                    KinematicState(position, ORIGIN, now, resume_at),
                    waypoint, arrived)

        offset = waypoint.target - position
        distance = offset.norm()
        heading = offset / distance if distance > 0 else ORIGIN
        travel_time = distance / waypoint.speed
        if travel_time > remaining + ARRIVAL_TOLERANCE:
            velocity = heading * waypoint.speed
            position = position + velocity * remaining
            now += remaining
            return Advance(
                KinematicState(position, velocity, now, now),
                waypoint, arrived)

        position = waypoint.target
        now = min(now + travel_time, end_time)
        remaining = end_time - now
        resume_at = now + waypoint.pause_after
        arrived = True
        if next_waypoint is None:
            return Advance(
                KinematicState(position, ORIGIN, now, resume_at),
                waypoint, arrived)
        waypoint = next_waypoint()
        if remaining <= 0 and resume_at <= now:
            offset = waypoint.target - position
            distance = offset.norm()
            velocity = (
                offset * (waypoint.speed / distance) if distance > 0
                else ORIGIN)
            return Advance(
                KinematicState(position, velocity, now, resume_at),
                waypoint, arrived)


def measure_position(state, noise, rng):
    """
    Returns the noisy location fix of a node.

    Each axis is perturbed by an independent zero-mean Gaussian draw with
    standard deviation ``noise.sigma``. Two draws are consumed per fix
    regardless of ``sigma`` so that the stream stays aligned across
    configurations.

    :type state: :class:`KinematicState`
    :type noise: :class:`NoiseModel`
    :param rng: The node's noise stream.
    :type rng: :class:`numpy.random.Generator`
    :rtype: :class:`Measurement`
    """
    wx, wy = rng.standard_normal(2)
    measured = Vec2(
        state.position.x + noise.sigma * float(wx),
        state.position.y + noise.sigma * float(wy))
    return Measurement(measured_position=measured, timestamp=state.timestamp)


def link_connected(a, b, r):
    """
    Returns ``True`` if the points ``a`` and ``b`` are at most ``r`` meters
    apart, i.e. a link between nodes located there is valid.
    """
    if not r > 0:
        raise ConfigurationError(
            "The transmission range must be positive, got {r}".format(r=r))
    return (a - b).norm() <= r


class RandomWaypointMobility(object):
    """
    The random waypoint trajectory of one node.

    Positions are evaluated lazily from the closed form of the current leg.
    The owner calls :meth:`catch_up` at the times given by
    :attr:`next_change` (waypoint arrivals and pause ends) so that new legs
    are drawn, in order, from the node's own stream.
    """
    def __init__(self, rect, speed_range, pause, rng, start_time=0.0,
                 initial_position=None):
        validate_speed_range(speed_range)
        self.rect = rect
        self.speed_range = speed_range
        self.pause = pause
        self._rng = rng
        if initial_position is None:
            initial_position = rect.uniform_point(rng)
        self.waypoint = self._draw_waypoint()
        heading = self.waypoint.target - initial_position
        distance = heading.norm()
        velocity = (
            heading * (self.waypoint.speed / distance) if distance > 0
            else ORIGIN)
        self.state = KinematicState(
            initial_position, velocity, start_time, start_time)

    def _draw_waypoint(self):
        return rwp_next_waypoint(
            self.rect, self.speed_range, self._rng, pause=self.pause)

    @property
    def next_change(self):
        """
        The time at which the current leg (including its pause) ends.
        """
        state = self.state
        start = max(state.resume_at, state.timestamp)
        distance = (self.waypoint.target - state.position).norm()
        arrival = start + distance / self.waypoint.speed
        if state.paused:
            return start
        return arrival

    def catch_up(self, now):
        """
        Advances the stored leg to ``now``, drawing new waypoints on the way.
        """
        if now <= self.state.timestamp:
            return self.state
        advance = advance_node(
            self.state, self.waypoint, now - self.state.timestamp,
            next_waypoint=self._draw_waypoint)
        self.state = advance.state
        self.waypoint = advance.waypoint
        return self.state

    def state_at(self, now):
        """
        Returns the true :class:`KinematicState` at ``now`` without mutating
        the stored leg.
        """
        dt = now - self.state.timestamp
        if dt <= 0:
            return KinematicState(
                self.state.position, self.state.velocity, now,
                self.state.resume_at)
        return advance_node(self.state, self.waypoint, dt).state


class StaticMobility(object):
    """
    A node that never moves. Used for hand-built topologies.
    """
    next_change = math.inf

    def __init__(self, position):
        self.state = KinematicState(position, ORIGIN, 0.0, 0.0)

    def catch_up(self, now):
        return self.state_at(now)

    def state_at(self, now):
        return KinematicState(self.state.position, ORIGIN, now, 0.0)
