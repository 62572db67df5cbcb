# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
Tests for the routing and neighbor tables, the protocol parameters and the
route auditor.
"""
import math

from django.test import SimpleTestCase

from empsim.core.geometry import ConfigurationError
from empsim.routing.auditor import RouteAuditor
from empsim.routing.config import ProtocolConfig
from empsim.routing.config import Variant
from empsim.routing.messages import ControlMessage
from empsim.routing.messages import MessageKind
from empsim.routing.table import NeighborTable
from empsim.routing.table import PendingRreq
from empsim.routing.table import RoutingTable
from empsim.routing.table import RreqBuffer


class RoutingTableTest(SimpleTestCase):
    def setUp(self):
        self.table = RoutingTable()

    def test_install_and_lookup(self):
        self.table.install(5, 2, seq_no=3, hop_count=2, expiry_time=10)

        entry = self.table.valid_route(5, now=1)
        self.assertEqual(entry.next_hop, 2)
        self.assertIsNone(self.table.valid_route(6, now=1))

    def test_expired_route_is_invalidated_lazily(self):
        self.table.install(5, 2, seq_no=3, hop_count=2, expiry_time=10)

        self.assertIsNotNone(self.table.valid_route(5, now=9.99))
        self.assertIsNone(self.table.valid_route(5, now=10))
        # The sequence number is bumped like on any invalidation.
        self.assertEqual(self.table.known_seq_no(5), 4)

    def test_is_fresher(self):
        self.table.install(5, 2, seq_no=3, hop_count=2, expiry_time=10)

        self.assertTrue(self.table.is_fresher(5, 4, 9, now=0))
        self.assertTrue(self.table.is_fresher(5, 3, 1, now=0))
        self.assertFalse(self.table.is_fresher(5, 3, 2, now=0))
        self.assertFalse(self.table.is_fresher(5, 2, 1, now=0))
        self.assertTrue(self.table.is_fresher(7, 0, 30, now=0))

    def test_install_keeps_precursors_of_same_next_hop(self):
        entry = self.table.install(5, 2, 3, 2, 10)
        entry.precursors.add(8)

        self.assertEqual(self.table.install(5, 2, 4, 2, 10).precursors, {8})
        self.assertEqual(self.table.install(5, 3, 5, 2, 10).precursors, set())

    def test_refresh_bounded_by_predicted_break(self):
        entry = self.table.install(
            5, 2, 3, 2, expiry_time=4, ret=6, ret_deadline=6)

        entry.refresh(now=2, active_route_timeout=10)

        self.assertEqual(entry.expiry_time, 6)

    def test_refresh_never_shortens(self):
        entry = self.table.install(5, 2, 3, 2, expiry_time=20)

        entry.refresh(now=1, active_route_timeout=10)

        self.assertEqual(entry.expiry_time, 20)

    def test_invalidate_through(self):
        self.table.install(5, 2, 3, 2, 10)
        self.table.install(6, 2, 1, 4, 10)
        self.table.install(7, 3, 1, 1, 10)

        broken = self.table.invalidate_through(2, now=1)

        self.assertEqual(sorted(e.destination for e in broken), [5, 6])
        self.assertEqual([e.seq_no for e in broken], [4, 2])
        self.assertIsNotNone(self.table.valid_route(7, now=1))
        self.assertTrue(self.table.has_active_route(now=1))

    def test_active_neighbors(self):
        self.table.install(5, 2, 3, 2, 10).precursors.add(9)
        self.table.install(6, 4, 3, 2, 1)

        self.assertEqual(self.table.active_neighbors(now=2), {2, 9})


class NeighborTableTest(SimpleTestCase):
    def test_expiry_uses_advertised_interval(self):
        table = NeighborTable(default_interval=1.0)
        table.heard(3, now=0, interval=20.0)
        table.heard(4, now=0)

        self.assertTrue(table.is_alive(3, now=39, allowed_hello_loss=2))
        self.assertFalse(table.is_alive(4, now=2, allowed_hello_loss=2))

        lost = table.expire(now=2, allowed_hello_loss=2)

        self.assertEqual([n.node_id for n in lost], [4])
        self.assertIn(3, table)
        self.assertNotIn(4, table)

    def test_estimate_kept_when_message_has_none(self):
        table = NeighborTable(1.0)
        table.heard(3, 0, estimate='estimate')
        table.heard(3, 1)

        self.assertEqual(table.get(3).estimate, 'estimate')
        self.assertEqual(table.get(3).last_heard, 1)


class PendingRreqTest(SimpleTestCase):
    def test_longest_ret_then_fewest_hops(self):
        pending = PendingRreq(
            origin=1, rreq_id=1, best_ret=12, best_reverse_hop=3,
            deadline=0.1, best_hop_count=4, best_arrival=0,
            origin_seq_no=1)

        self.assertTrue(pending.offer(30, 4, 5, 0.01))
        self.assertTrue(pending.offer(30, 5, 3, 0.02))
        self.assertFalse(pending.offer(30, 6, 3, 0.03))
        self.assertFalse(pending.offer(29, 7, 1, 0.04))

        self.assertEqual(pending.best_reverse_hop, 5)
        self.assertEqual(pending.candidates, 5)


class ProtocolConfigTest(SimpleTestCase):
    def test_defaults(self):
        config = ProtocolConfig()

        self.assertEqual(config.variant, Variant.EMP)
        self.assertEqual(config.r, 250)
        self.assertEqual(config.t_w, 0.1)
        self.assertAlmostEqual(config.net_traversal_time, 2.8)
        self.assertAlmostEqual(config.discovery_timeout(0), 2.9)
        self.assertAlmostEqual(config.discovery_timeout(2), 11.3)

    def test_variant_from_string(self):
        self.assertEqual(ProtocolConfig(variant='MP').variant, Variant.MP)

    def test_invalid_parameters(self):
        for changes in ({'beta': 0.5}, {'t_min': 0}, {'t_w': -1}, {'r': 0}):
            with self.assertRaises(ConfigurationError):
                ProtocolConfig(**changes)

    def test_unknown_variant(self):
        with self.assertRaises(ValueError):
            ProtocolConfig(variant='OLSR')


class MessageTest(SimpleTestCase):
    def test_well_formed(self):
        self.assertTrue(ControlMessage(
            MessageKind.RREQ, sender=1, origin=1, destination=2,
            hop_count=1).is_well_formed())
        self.assertFalse(ControlMessage(
            MessageKind.RREQ, sender=1, origin=1, destination=-1
        ).is_well_formed())
        self.assertFalse(ControlMessage(
            MessageKind.RERR, sender=1).is_well_formed())
        self.assertFalse(ControlMessage(
            MessageKind.HELLO, sender=1, ret=math.nan).is_well_formed())


class RouteAuditorTest(SimpleTestCase):
    def setUp(self):
        self.auditor = RouteAuditor(horizon=3600)

    def test_ret_matches_minimum_link_duration(self):
        self.auditor.record_link(1, 1, 1, 2, 50)
        self.auditor.record_link(1, 1, 2, 3, 20)
        self.auditor.record_link(1, 1, 3, 4, 70)

        self.assertTrue(self.auditor.audit_ret(1, 1, (1, 2, 3, 4), 20))
        self.assertFalse(self.auditor.audit_ret(1, 1, (1, 2, 3, 4), 50))
        self.assertEqual(self.auditor.counters['ret_mismatches'], 1)

    def test_incomplete_path(self):
        self.auditor.record_link(1, 1, 1, 2, 50)

        self.assertFalse(self.auditor.audit_ret(1, 1, (1, 2, 3), 50))
        self.assertEqual(self.auditor.counters['ret_audits_incomplete'], 1)
        self.assertEqual(self.auditor.counters['ret_mismatches'], 0)

    def test_discovery_log_dropped_after_retention(self):
        auditor = RouteAuditor(horizon=3600, retention=5.0)
        auditor.record_link(1, 1, 1, 2, 50, now=0.0)
        auditor.record_link(1, 1, 2, 3, 20, now=1.0)
        auditor.record_link(2, 1, 2, 3, 20, now=4.0)

        auditor.record_link(3, 1, 3, 4, 20, now=5.5)

        self.assertEqual(auditor.tracked_discoveries, 2)
        self.assertFalse(auditor.audit_ret(1, 1, (1, 2, 3), 20))
        self.assertEqual(auditor.counters['ret_audits_incomplete'], 1)

    def test_forget(self):
        self.auditor.record_link(1, 1, 1, 2, 50)
        self.auditor.record_link(1, 2, 1, 2, 50)

        self.auditor.forget(1, 1)
        self.auditor.forget(7, 7)

        self.assertEqual(self.auditor.tracked_discoveries, 1)
        self.assertTrue(self.auditor.audit_ret(1, 2, (1, 2), 50))

    def test_detects_loop(self):
        tables = {node: RoutingTable() for node in (1, 2, 3)}
        for node, table in tables.items():
            self.auditor.register(node, table)
        tables[1].install(9, 2, 1, 3, 10)
        tables[2].install(9, 3, 1, 2, 10)
        tables[3].install(9, 1, 1, 1, 10)

        self.assertFalse(self.auditor.check_route(1, 9, now=0))
        self.assertEqual(self.auditor.counters['loop_detections'], 1)

    def test_loop_free_chain(self):
        tables = {node: RoutingTable() for node in (1, 2)}
        for node, table in tables.items():
            self.auditor.register(node, table)
        tables[1].install(9, 2, 4, 2, 10)
        tables[2].install(9, 9, 4, 1, 10)

        self.assertTrue(self.auditor.check_route(1, 9, now=0))
        self.assertEqual(self.auditor.counters['seq_order_violations'], 0)


class RreqBufferTest(SimpleTestCase):
    def test_remembered_for_its_lifetime(self):
        seen = RreqBuffer(lifetime=5.0)
        seen.add((1, 1), 0.0)
        seen.add((2, 1), 3.0)

        self.assertTrue(seen.contains((1, 1), 4.9))
        self.assertFalse(seen.contains((1, 1), 5.0))
        self.assertTrue(seen.contains((2, 1), 5.0))
        self.assertEqual(len(seen), 1)

    def test_seen_again_extends_the_lifetime(self):
        seen = RreqBuffer(lifetime=5.0)
        seen.add((1, 1), 0.0)
        seen.add((2, 1), 1.0)
        seen.add((1, 1), 4.0)

        self.assertFalse(seen.contains((2, 1), 6.0))
        self.assertTrue(seen.contains((1, 1), 8.0))
        self.assertEqual(len(seen), 1)

    def test_path_discovery_time(self):
        config = ProtocolConfig(node_traversal_time=0.04, net_diameter=35)

        self.assertAlmostEqual(config.path_discovery_time, 5.6)
