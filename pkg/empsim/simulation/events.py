# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
The global event list of a simulation run.
"""
from __future__ import annotations

import heapq
import itertools
import math


class SimulationError(Exception):
    """
    An internal invariant of the simulation was breached. The run cannot
    continue.
    """
    pass


#: Event kinds, as they appear in event traces.
DELIVER = 'deliver'
TIMER = 'timer'
TRAFFIC = 'traffic'
MOBILITY = 'mobility'
MEASUREMENT = 'measurement'
METRICS = 'metrics'


class Event(object):
    """
    A scheduled call of ``handler(*args)`` at ``time``.

    Events with equal times fire in the order they were scheduled, given by
    their ``sequence``.
    """
    __slots__ = (
        'time', 'sequence', 'kind', 'node', 'handler', 'args', 'cancelled')

    def __init__(self, time, sequence, kind, handler, args=(), node=None):
        self.time = time
        self.sequence = sequence
        self.kind = kind
        self.node = node
        self.handler = handler
        self.args = args
        self.cancelled = False

    def cancel(self):
        self.cancelled = True

    def fire(self):
        return self.handler(*self.args)

    def __lt__(self, other):
        return (self.time, self.sequence) < (other.time, other.sequence)

    def __str__(self):
        return "{kind}({time!r}, #{sequence})".format(
            kind=self.kind, time=self.time, sequence=self.sequence)


class EventQueue(object):
    """
    A priority queue of :class:`Event` objects ordered by
    ``(time, sequence)``.

    The queue holds the simulation clock: popping an event advances
    :attr:`now` to its time. Scheduling an event before :attr:`now` is a
    causality violation.
    """
    def __init__(self, start_time=0.0):
        self.now = start_time
        self._heap = []
        self._sequence = itertools.count()

    def __len__(self):
        return len(self._heap)

    def __iter__(self):
        """
        Iterates over the pending, not cancelled events in no particular
        order.
        """
        return (event for event in self._heap if not event.cancelled)

    def push(self, time, kind, handler, args=(), node=None):
        """
        Schedules ``handler(*args)`` at the absolute ``time``.

        :raises SimulationError: If ``time`` lies before the current clock or
            is not a number.
        """
        if not time >= self.now:
            raise SimulationError(
                "Event {kind} scheduled at {time!r} before the current time "
                "{now!r}".format(kind=kind, time=time, now=self.now))
        event = Event(time, next(self._sequence), kind, handler, args, node)
        heapq.heappush(self._heap, event)
        return event

    def peek_time(self):
        """
        The time of the next pending event or ``inf``.
        """
        while self._heap and self._heap[0].cancelled:
            heapq.heappop(self._heap)
        return self._heap[0].time if self._heap else math.inf

    def pop(self, until=math.inf):
        """
        Removes and returns the next event firing no later than ``until``,
        advancing the clock to its time. Returns ``None`` when there is no
        such event.
        """
        if self.peek_time() > until:
            return None
        event = heapq.heappop(self._heap)
        if event.time < self.now:
            raise SimulationError(
                "Event {event} fires before the current time {now!r}".format(
                    event=event, now=self.now))
        self.now = event.time
        return event
