# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
A global observer of all routing tables of a run, checking the protocol
invariants while the simulation executes.
"""
from __future__ import annotations

from collections import Counter
import logging
import math

logger = logging.getLogger(__name__)


class RouteAuditor(object):
    """
    Audits route discoveries and installed routes.

    - Every link LDT a node computes on a RREQ is logged under its discovery;
      when a copy of the RREQ reaches its destination the RET it carries is
      compared with the minimum of the logged LDTs along its path. The log
      of a discovery is dropped once the destination has replied, or
      ``retention`` seconds after its first link.
    - Every time a node installs a route, the chain of next hops toward the
      destination is followed over all nodes' tables. Revisiting a node is a
      routing loop. A next hop whose entry is neither fresher nor closer to
      the destination is a sequence ordering violation.

    The auditor only reads the tables and never alters them.
    """
    def __init__(self, horizon, retention=math.inf):
        self.horizon = horizon
        self.retention = retention
        self.tables = {}
        self.counters = Counter()
        self._discoveries = {}

    def register(self, node_id, table):
        self.tables[node_id] = table

    @property
    def tracked_discoveries(self):
        return len(self._discoveries)

    def _prune(self, now):
        while self._discoveries:
            key, (first_seen, _) = next(iter(self._discoveries.items()))
            if first_seen + self.retention > now:
                break
            del self._discoveries[key]

    def record_link(self, origin, rreq_id, sender, receiver, ldt, now=0.0):
        self._prune(now)
        _, links = self._discoveries.setdefault((origin, rreq_id), (now, {}))
        links[(sender, receiver)] = ldt

    def forget(self, origin, rreq_id):
        self._discoveries.pop((origin, rreq_id), None)

    def audit_ret(self, origin, rreq_id, path, ret):
        """
        Checks the RET of a RREQ copy that traversed ``path`` (origin first,
        the destination last).

        :returns: ``True`` if the RET matches the logged LDTs.
        """
        _, links = self._discoveries.get((origin, rreq_id), (None, {}))
        ldts = [links.get(link) for link in zip(path, path[1:])]
        if any(ldt is None for ldt in ldts):
            self.counters['ret_audits_incomplete'] += 1
            return False
        self.counters['ret_audits'] += 1
        expected = min([self.horizon] + ldts)
        if expected != ret:
            self.counters['ret_mismatches'] += 1
            logger.warning(
                "RREQ %s/%s over %s carries RET %r instead of %r",
                origin, rreq_id, path, ret, expected)
            return False
        return True

    def check_route(self, node_id, destination, now):
        """
        Follows the valid next hops from ``node_id`` toward ``destination``.

        :returns: ``False`` if a loop was found.
        """
        self.counters['route_checks'] += 1
        visited = {node_id}
        current = node_id
        while current != destination:
            table = self.tables.get(current)
            entry = table.get(destination) if table is not None else None
            if entry is None or not entry.is_valid(now):
                return True
            next_hop = entry.next_hop
            if next_hop in visited:
                self.counters['loop_detections'] += 1
                logger.warning(
                    "Routing loop toward %s through %s at t=%s",
                    destination, sorted(visited), now)
                return False
            next_table = self.tables.get(next_hop)
            next_entry = (
                next_table.get(destination)
                if next_table is not None and next_hop != destination
                else None)
            if next_entry is not None and next_entry.is_valid(now):
                ordered = next_entry.seq_no > entry.seq_no or (
                    next_entry.seq_no == entry.seq_no and
                    next_entry.hop_count < entry.hop_count)
                if not ordered:
                    self.counters['seq_order_violations'] += 1
            visited.add(next_hop)
            current = next_hop
        return True
