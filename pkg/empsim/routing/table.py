# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
Routing table, neighbor table and the state a destination keeps while it
collects the copies of a RREQ.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import enum
import math
from typing import Optional, Set

from empsim.core.prediction import RouteMetric


class RouteState(enum.Enum):
    VALID = 'valid'
    INVALID = 'invalid'


@dataclass
class RouteEntry(object):
    """
    A routing table row.

    :ivar ret: The route expiration time the route was installed with.
    :ivar ret_deadline: The absolute time at which the predicted route
        breaks. Unbounded for variants that do not predict.
    :ivar precursors: Neighbors known to route through this node toward
        ``destination``.
    """
    destination: int
    next_hop: int
    seq_no: int
    hop_count: int
    expiry_time: float
    ret: float = math.inf
    ret_deadline: float = math.inf
    state: RouteState = RouteState.VALID
    precursors: Set[int] = field(default_factory=set)

    def is_valid(self, now):
        return self.state == RouteState.VALID and self.expiry_time > now

    def refresh(self, now, active_route_timeout):
        """
        Extends the lifetime of a route in use, never past its predicted
        break.
        """
        self.expiry_time = max(
            self.expiry_time,
            min(now + active_route_timeout, self.ret_deadline))

    def invalidate(self):
        if self.state == RouteState.VALID:
            self.state = RouteState.INVALID
            self.seq_no += 1


class RoutingTable(object):
    """
    The routes of one node, keyed by destination.

    Routes whose expiry time has passed are invalidated lazily, the first
    time they are looked up after expiring.
    """
    def __init__(self):
        self._entries = {}

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries.values())

    def get(self, destination):
        return self._entries.get(destination)

    def valid_route(self, destination, now):
        """
        Returns the valid :class:`RouteEntry` toward ``destination`` or
        ``None``.
        """
        entry = self._entries.get(destination)
        if entry is None:
            return None
        if entry.state == RouteState.VALID and entry.expiry_time <= now:
            entry.invalidate()
        return entry if entry.state == RouteState.VALID else None

    def known_seq_no(self, destination):
        entry = self._entries.get(destination)
        return entry.seq_no if entry is not None else 0

    def is_fresher(self, destination, seq_no, hop_count, now):
        """
        Whether a route with ``seq_no`` and ``hop_count`` should replace the
        current entry: there is no valid entry, or the new route has a
        newer sequence number, or the same one and fewer hops.
        """
        entry = self.valid_route(destination, now)
        if entry is None:
            return True
        return seq_no > entry.seq_no or (
            seq_no == entry.seq_no and hop_count < entry.hop_count)

    def install(self, destination, next_hop, seq_no, hop_count, expiry_time,
                ret=math.inf, ret_deadline=math.inf):
        """
        Creates or overwrites the entry toward ``destination``. Precursors
        of a route through the same next hop are kept.
        """
        entry = self._entries.get(destination)
        precursors = set()
        if entry is not None and entry.next_hop == next_hop:
            precursors = entry.precursors
        entry = RouteEntry(
            destination=destination,
            next_hop=next_hop,
            seq_no=seq_no,
            hop_count=hop_count,
            expiry_time=expiry_time,
            ret=ret,
            ret_deadline=ret_deadline,
            precursors=precursors)
        self._entries[destination] = entry
        return entry

    def routes_through(self, neighbor, now):
        return [
            entry for entry in list(self._entries.values())
            if entry.next_hop == neighbor and entry.is_valid(now)
        ]

    def invalidate_through(self, neighbor, now):
        """
        Invalidates every valid route whose next hop is ``neighbor``.

        :returns: The invalidated entries.
        """
        broken = self.routes_through(neighbor, now)
        for entry in broken:
            entry.invalidate()
        return broken

    def has_active_route(self, now):
        return any(entry.is_valid(now) for entry in self._entries.values())

    def active_neighbors(self, now):
        """
        Next hops and precursors of the valid routes.
        """
        neighbors = set()
        for entry in self._entries.values():
            if entry.is_valid(now):
                neighbors.add(entry.next_hop)
                neighbors.update(entry.precursors)
        return neighbors


@dataclass
class NeighborEntry(object):
    """
    :ivar advertised_interval: The hello interval the neighbor announced
        last.
    :ivar estimate: The neighbor's kinematics as advertised in its last
        message carrying a location.
    """
    node_id: int
    last_heard: float
    advertised_interval: float
    estimate: Optional[object] = None

    def expires_at(self, allowed_hello_loss):
        return self.last_heard + allowed_hello_loss * self.advertised_interval


class NeighborTable(object):
    def __init__(self, default_interval):
        self.default_interval = default_interval
        self._neighbors = {}

    def __contains__(self, node_id):
        return node_id in self._neighbors

    def __iter__(self):
        return iter(self._neighbors.values())

    def get(self, node_id):
        return self._neighbors.get(node_id)

    def heard(self, node_id, now, interval=None, estimate=None):
        """
        Records that a message from ``node_id`` was received at ``now``.
        """
        entry = self._neighbors.get(node_id)
        if entry is None:
            entry = NeighborEntry(
                node_id, now, interval or self.default_interval, estimate)
            self._neighbors[node_id] = entry
        else:
            entry.last_heard = now
            if interval:
                entry.advertised_interval = interval
            if estimate is not None:
                entry.estimate = estimate
        return entry

    def is_alive(self, node_id, now, allowed_hello_loss):
        entry = self._neighbors.get(node_id)
        return (entry is not None and
                entry.expires_at(allowed_hello_loss) > now)

    def expire(self, now, allowed_hello_loss):
        """
        Removes and returns the neighbors not heard from for
        ``allowed_hello_loss`` of their advertised intervals.
        """
        lost = [
            entry for entry in self._neighbors.values()
            if entry.expires_at(allowed_hello_loss) <= now
        ]
        for entry in lost:
            del self._neighbors[entry.node_id]
        return lost

    def remove(self, node_id):
        return self._neighbors.pop(node_id, None)


@dataclass
class PendingRreq(object):
    """
    The best copy of a RREQ a destination received so far.

    The deadline is fixed when the first copy arrives. A later copy replaces
    the best one if it has a longer RET, or the same RET and fewer hops.
    """
    origin: int
    rreq_id: int
    best_ret: float
    best_reverse_hop: int
    deadline: float
    best_hop_count: int
    best_arrival: float
    origin_seq_no: int
    dest_seq_no: int = 0
    candidates: int = 1

    def offer(self, ret, reverse_hop, hop_count, arrival):
        """
        Considers a later copy of the RREQ.

        :returns: ``True`` if it became the best candidate.
        """
        self.candidates += 1
        better = RouteMetric(ret, hop_count).better_than(
            RouteMetric(self.best_ret, self.best_hop_count))
        if better:
            self.best_ret = ret
            self.best_reverse_hop = reverse_hop
            self.best_hop_count = hop_count
            self.best_arrival = arrival
        return better


class RreqBuffer(object):
    """
    The RREQs a node has already processed, each remembered for
    ``lifetime`` seconds after it was last seen.
    """
    def __init__(self, lifetime):
        self.lifetime = lifetime
        self._expiry = {}

    def __len__(self):
        return len(self._expiry)

    def _prune(self, now):
        while self._expiry:
            key, expiry = next(iter(self._expiry.items()))
            if expiry > now:
                break
            del self._expiry[key]

    def add(self, key, now):
        self._prune(now)
        # Re-inserted at the end to keep the expiry times ordered
        self._expiry.pop(key, None)
        self._expiry[key] = now + self.lifetime

    def contains(self, key, now):
        self._prune(now)
        return key in self._expiry
