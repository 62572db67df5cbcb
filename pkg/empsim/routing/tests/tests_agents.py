# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
Tests for the routing agents, each driven by hand over a fake network.
"""
from django.test import SimpleTestCase

from empsim.core.geometry import Vec2
from empsim.core.tests.common import estimate
from empsim.routing.agents import BaseAgent
from empsim.routing.agents import DROP_NO_ROUTE
from empsim.routing.agents import DROP_QUEUE
from empsim.routing.agents import EnhancedMobilityPredictionAgent
from empsim.routing.config import Variant
from empsim.routing.messages import ControlMessage
from empsim.routing.messages import DataPacket
from empsim.routing.messages import MessageKind
from empsim.routing.tests.common import RecordingNetwork
from empsim.routing.tests.common import make_agent
from empsim.routing.tests.common import rrep
from empsim.routing.tests.common import rreq


def rerr(sender, *unreachable):
    return ControlMessage(
        kind=MessageKind.RERR, sender=sender, unreachable=tuple(unreachable))


class AgentRegistryTest(SimpleTestCase):
    def test_all_variants_registered(self):
        self.assertEqual(
            BaseAgent.plugin_names(),
            [Variant.AODV, Variant.AODV_I, Variant.MP, Variant.EMP,
             Variant.EMP_WO])

    def test_lookup_by_name(self):
        self.assertIs(
            BaseAgent.for_variant('EMP'), EnhancedMobilityPredictionAgent)

    def test_unknown_variant(self):
        with self.assertRaises(ValueError):
            BaseAgent.for_variant('DSR')

    def test_variant_flags(self):
        self.assertFalse(BaseAgent.for_variant('AODV').USES_LOCATION)
        self.assertTrue(BaseAgent.for_variant('MP').WAITS_AT_DESTINATION)
        self.assertFalse(BaseAgent.for_variant('MP').DISCARDS_RISKY_LINKS)
        self.assertTrue(BaseAgent.for_variant('EMP_WO').DISCARDS_RISKY_LINKS)

    def test_nominal_hello_intervals(self):
        self.assertEqual(make_agent('AODV').hello_interval, 1.0)
        self.assertEqual(make_agent('AODV_I').hello_interval, 20.0)
        self.assertEqual(make_agent('EMP').hello_interval, 1.0)


class RreqHandlingTest(SimpleTestCase):
    def test_duplicate_dropped(self):
        agent = make_agent('AODV', node_id=2)
        message = rreq(sender=1, origin=1, destination=9)

        agent.receive(message, 1)
        agent.receive(message, 1)
        agent.network.run_until(1)

        forwarded = agent.network.sent(MessageKind.RREQ)
        self.assertEqual(len(forwarded), 1)
        self.assertEqual(forwarded[0].sender, 2)
        self.assertEqual(forwarded[0].hop_count, 2)
        self.assertEqual(forwarded[0].path, (1, 2))
        self.assertEqual(agent.counters['duplicate_rreqs'], 1)

    def test_forgotten_after_the_path_discovery_time(self):
        agent = make_agent('AODV', node_id=2)
        message = rreq(sender=1, origin=1, destination=9)

        agent.receive(message, 1)
        agent.network.run_until(agent.config.path_discovery_time + 0.5)
        agent.receive(message, 1)
        agent.network.run_until(agent.config.path_discovery_time + 1.5)

        self.assertEqual(len(agent.network.sent(MessageKind.RREQ)), 2)
        self.assertEqual(agent.counters['duplicate_rreqs'], 0)
        self.assertEqual(len(agent.seen_rreqs), 1)

    def test_reverse_route_installed(self):
        agent = make_agent('AODV', node_id=2)

        agent.receive(rreq(sender=3, origin=1, destination=9, hop_count=2), 3)

        entry = agent.routes.valid_route(1, 0)
        self.assertEqual(entry.next_hop, 3)
        self.assertEqual(entry.hop_count, 2)
        self.assertEqual(entry.expiry_time, 10.0)

    def test_own_rreq_dropped(self):
        agent = make_agent('AODV', node_id=1)

        agent.receive(rreq(sender=3, origin=1, destination=9), 3)
        agent.network.run_until(1)

        self.assertEqual(agent.network.sent(MessageKind.RREQ), [])

    def test_malformed_dropped(self):
        agent = make_agent('AODV', node_id=2)

        agent.receive(rreq(sender=1, origin=1, destination=9, hop_count=-1), 1)
        agent.network.run_until(1)

        self.assertEqual(agent.counters['malformed'], 1)
        self.assertEqual(agent.network.sent(MessageKind.RREQ), [])
        self.assertNotIn(1, agent.neighbors)

    def test_risky_link_discarded(self):
        agent = make_agent('EMP', node_id=2, position=(200, 0), rms=400)
        message = rreq(
            sender=1, origin=1, destination=9,
            location=estimate(0, 0, 10, 0, rms=400))

        agent.receive(message, 1)
        agent.network.run_until(1)

        self.assertEqual(agent.network.sent(MessageKind.RREQ), [])
        self.assertEqual(agent.counters['risky_discards'], 1)
        self.assertIsNone(agent.routes.valid_route(1, 1))
        self.assertFalse(agent.seen_rreqs.contains(message.key, agent.now))

    def test_mp_keeps_risky_link(self):
        agent = make_agent('MP', node_id=2, position=(200, 0), rms=400)

        agent.receive(rreq(
            sender=1, origin=1, destination=9, ret=100,
            location=estimate(0, 0, 10, 0, rms=400)), 1)
        agent.network.run_until(1)

        forwarded, = agent.network.sent(MessageKind.RREQ)
        self.assertAlmostEqual(forwarded.ret, 45.0)

    def test_ret_keeps_smaller_upstream_value(self):
        agent = make_agent('MP', node_id=2)

        agent.receive(rreq(
            sender=1, origin=1, destination=9, ret=30,
            location=estimate(100, 0)), 1)
        agent.network.run_until(1)

        forwarded, = agent.network.sent(MessageKind.RREQ)
        self.assertEqual(forwarded.ret, 30)

    def test_static_link_capped_at_horizon(self):
        agent = make_agent('EMP', node_id=2)

        agent.receive(rreq(
            sender=1, origin=1, destination=9, location=estimate(100, 0)), 1)
        agent.network.run_until(1)

        forwarded, = agent.network.sent(MessageKind.RREQ)
        self.assertEqual(forwarded.ret, 3600.0)

    def test_location_stamped_at_emission(self):
        agent = make_agent('MP', node_id=2, position=(5, 5), velocity=(1, 0))

        agent.receive(rreq(
            sender=1, origin=1, destination=9, location=estimate(100, 0)), 1)
        agent.network.run_until(1)

        forwarded, = agent.network.sent(MessageKind.RREQ)
        self.assertGreater(forwarded.timestamp, 0)
        self.assertAlmostEqual(
            forwarded.sender_location.x, 5 + forwarded.timestamp)
        self.assertEqual(forwarded.sender_velocity, Vec2(1, 0))

    def test_aodv_carries_no_location(self):
        agent = make_agent('AODV', node_id=2)

        agent.receive(rreq(sender=1, origin=1, destination=9), 1)
        agent.network.run_until(1)

        forwarded, = agent.network.sent(MessageKind.RREQ)
        self.assertFalse(forwarded.has_location)


class DestinationTest(SimpleTestCase):
    def test_aodv_replies_immediately(self):
        agent = make_agent('AODV', node_id=9)

        agent.receive(rreq(sender=4, origin=1, destination=9, seq_no=3), 4)

        (sender, receiver, reply), = agent.network.unicasts
        self.assertEqual((sender, receiver), (9, 4))
        self.assertEqual(reply.kind, MessageKind.RREP)
        self.assertEqual(reply.hop_count, 0)
        self.assertEqual(reply.seq_no, 4)
        self.assertEqual(reply.lifetime, 10.0)
        self.assertEqual(agent.routes.valid_route(1, 0).next_hop, 4)

    def test_replies_along_longest_ret(self):
        agent = make_agent('EMP', node_id=9)
        copies = (
            (3, estimate(100, 0), 12, 4),
            (4, estimate(0, 100), 30, 5),
            (5, estimate(-100, 0), 30, 3),
        )
        for sender, location, ret, hop_count in copies:
            agent.network.now += 0.01
            agent.receive(rreq(
                sender=sender, origin=1, destination=9, ret=ret,
                hop_count=hop_count, location=location), sender)

        self.assertEqual(agent.network.unicasts, [])
        agent.network.run_until(0.2)

        (_, receiver, reply), = agent.network.unicasts
        self.assertEqual(receiver, 5)
        self.assertEqual(reply.lifetime, 30)
        self.assertEqual(reply.destination, 9)
        self.assertEqual(agent.routes.valid_route(1, 0.2).next_hop, 5)

    def test_late_copy_ignored(self):
        agent = make_agent('MP', node_id=9)
        agent.receive(rreq(
            sender=3, origin=1, destination=9, ret=12,
            location=estimate(100, 0)), 3)
        agent.network.run_until(0.3)

        agent.receive(rreq(
            sender=4, origin=1, destination=9, ret=100,
            location=estimate(0, 100)), 4)
        agent.network.run_until(1)

        self.assertEqual(len(agent.network.unicasts), 1)
        self.assertEqual(agent.counters['duplicate_rreqs'], 1)

    def test_ret_audited(self):
        network = RecordingNetwork()
        agent = make_agent('MP', node_id=9, network=network)

        agent.receive(rreq(
            sender=1, origin=1, destination=9, location=estimate(100, 0)), 1)

        self.assertEqual(network.auditor.counters['ret_audits'], 1)
        self.assertEqual(network.auditor.counters['ret_mismatches'], 0)

    def test_discovery_log_dropped_once_answered(self):
        network = RecordingNetwork()
        agent = make_agent('EMP', node_id=9, network=network)

        agent.receive(rreq(
            sender=1, origin=1, destination=9, location=estimate(100, 0)), 1)
        self.assertEqual(network.auditor.tracked_discoveries, 1)
        network.run_until(0.2)

        self.assertEqual(network.auditor.tracked_discoveries, 0)


class IntermediateReplyTest(SimpleTestCase):
    def test_aodv_answers_from_its_table(self):
        agent = make_agent('AODV', node_id=2)
        agent.routes.install(9, 7, seq_no=5, hop_count=3, expiry_time=10)

        agent.receive(rreq(sender=1, origin=1, destination=9, seq_no=3), 1)
        agent.network.run_until(1)

        (_, receiver, reply), = agent.network.unicasts
        self.assertEqual(receiver, 1)
        self.assertEqual(reply.hop_count, 3)
        self.assertEqual(reply.seq_no, 5)
        self.assertEqual(reply.lifetime, 10)
        self.assertEqual(agent.network.sent(MessageKind.RREQ), [])

    def test_stale_route_not_used(self):
        agent = make_agent('AODV', node_id=2)
        agent.routes.install(9, 7, seq_no=2, hop_count=3, expiry_time=10)

        agent.receive(rreq(sender=1, origin=1, destination=9, seq_no=3), 1)
        agent.network.run_until(1)

        self.assertEqual(agent.network.unicasts, [])
        self.assertEqual(len(agent.network.sent(MessageKind.RREQ)), 1)

    def test_prediction_variants_always_forward(self):
        agent = make_agent('MP', node_id=2)
        agent.routes.install(9, 7, seq_no=5, hop_count=3, expiry_time=10)

        agent.receive(rreq(
            sender=1, origin=1, destination=9, location=estimate(10, 0)), 1)
        agent.network.run_until(1)

        self.assertEqual(agent.network.unicasts, [])
        self.assertEqual(len(agent.network.sent(MessageKind.RREQ)), 1)


class DiscoveryTest(SimpleTestCase):
    def packet(self, packet_id=1, destination=9):
        return DataPacket(packet_id, source=1, destination=destination,
                          created=0.0)

    def test_rrep_installs_route_and_flushes_queue(self):
        agent = make_agent('AODV', node_id=1)
        agent.send_data(self.packet())

        request, = agent.network.sent(MessageKind.RREQ)
        self.assertEqual(request.hop_count, 1)
        self.assertEqual(request.ret, 3600.0)
        self.assertEqual(request.path, (1,))

        agent.receive(rrep(sender=4, origin=1, destination=9, hop_count=2,
                           lifetime=5), 4)

        (_, receiver, packet), = agent.network.unicasts
        self.assertEqual(receiver, 4)
        self.assertEqual(packet.packet_id, 1)
        entry = agent.routes.valid_route(9, 0)
        self.assertEqual(entry.hop_count, 3)
        # Sending the queued packet refreshed the route.
        self.assertEqual(entry.expiry_time, 10.0)
        agent.network.run_until(30)
        self.assertEqual(len(agent.network.sent(MessageKind.RREQ)), 1)

    def test_rrep_lifetime(self):
        agent = make_agent('AODV', node_id=1)

        agent.receive(rrep(sender=4, origin=1, destination=9,
                           lifetime=5), 4)

        self.assertIsNotNone(agent.routes.valid_route(9, 4.9))
        self.assertIsNone(agent.routes.valid_route(9, 5.0))

    def test_prediction_route_lifetime_floor(self):
        agent = make_agent('EMP', node_id=1)
        agent.send_data(self.packet())

        agent.receive(rrep(sender=4, origin=1, destination=9,
                           lifetime=0.3), 4)

        entry = agent.routes.get(9)
        self.assertEqual(entry.expiry_time, 1.0)
        self.assertEqual(entry.ret_deadline, 1.0)

    def test_discovery_retries_then_fails(self):
        agent = make_agent('AODV', node_id=1)
        agent.send_data(self.packet(1))
        agent.send_data(self.packet(2))

        self.assertEqual(len(agent.network.sent(MessageKind.RREQ)), 1)
        self.assertEqual(agent.counters['suppressed_discoveries'], 0)
        agent.network.run_until(100)

        requests = agent.network.sent(MessageKind.RREQ)
        self.assertEqual([r.rreq_id for r in requests], [1, 2, 3])
        self.assertEqual([r.origin_seq_no for r in requests], [1, 2, 3])
        self.assertEqual(agent.seq_no, 3)
        self.assertEqual(
            [reason for _, reason in agent.network.dropped],
            [DROP_NO_ROUTE, DROP_NO_ROUTE])
        self.assertEqual(agent.counters['failed_discoveries'], 1)
        self.assertEqual(len(agent.queue), 0)

    def test_queue_overflow(self):
        agent = make_agent('AODV', node_id=1, queue_capacity=2)
        for packet_id in range(3):
            agent.send_data(self.packet(packet_id))

        (packet, reason), = agent.network.dropped
        self.assertEqual(packet.packet_id, 2)
        self.assertEqual(reason, DROP_QUEUE)

    def test_stale_rrep_dropped_at_intermediate(self):
        agent = make_agent('AODV', node_id=2)
        agent.routes.install(9, 7, seq_no=5, hop_count=1, expiry_time=10)
        agent.routes.install(1, 1, seq_no=1, hop_count=1, expiry_time=10)

        agent.receive(rrep(sender=4, origin=1, destination=9, seq_no=4), 4)

        self.assertEqual(agent.network.unicasts, [])
        self.assertEqual(agent.counters['stale_rreps'], 1)

    def test_rrep_forwarded_along_reverse_route(self):
        agent = make_agent('AODV', node_id=2)
        agent.routes.install(1, 3, seq_no=1, hop_count=2, expiry_time=10)

        agent.receive(rrep(sender=4, origin=1, destination=9, hop_count=1), 4)

        (_, receiver, reply), = agent.network.unicasts
        self.assertEqual(receiver, 3)
        self.assertEqual(reply.hop_count, 2)
        self.assertEqual(reply.sender, 2)
        self.assertEqual(agent.routes.get(9).precursors, {3})


class DataForwardingTest(SimpleTestCase):
    def test_delivered_at_destination(self):
        agent = make_agent('AODV', node_id=9)
        packet = DataPacket(1, source=1, destination=9, created=0.0)

        agent.receive(packet, 4)

        self.assertEqual(agent.network.delivered, [(9, packet)])
        self.assertEqual(packet.hops, 1)

    def test_forwarded_over_valid_route(self):
        agent = make_agent('AODV', node_id=2)
        agent.neighbors.heard(7, 0)
        agent.routes.install(9, 7, seq_no=1, hop_count=1, expiry_time=3)
        agent.network.now = 1.5

        agent.receive(DataPacket(1, source=1, destination=9, created=0), 1)

        (_, receiver, _), = agent.network.unicasts
        self.assertEqual(receiver, 7)
        entry = agent.routes.get(9)
        self.assertEqual(entry.expiry_time, 11.5)
        self.assertEqual(entry.precursors, {1})

    def test_no_route_at_intermediate(self):
        agent = make_agent('AODV', node_id=2)

        agent.receive(DataPacket(1, source=1, destination=9, created=0), 1)

        (_, reason), = agent.network.dropped
        self.assertEqual(reason, DROP_NO_ROUTE)
        error, = agent.network.sent(MessageKind.RERR)
        self.assertEqual(error.unreachable, ((9, 0),))


class RouteErrorTest(SimpleTestCase):
    def test_link_break_lists_every_lost_route(self):
        agent = make_agent('AODV', node_id=2)
        agent.neighbors.heard(7, 0.0)
        agent.routes.install(10, 7, seq_no=1, hop_count=2, expiry_time=100)
        agent.routes.install(11, 7, seq_no=4, hop_count=3, expiry_time=100)
        agent.routes.get(10).precursors.add(1)
        agent.network.now = 2.5

        agent.hello_tick()

        error, = agent.network.sent(MessageKind.RERR)
        self.assertEqual(error.unreachable, ((10, 2), (11, 5)))
        self.assertIsNone(agent.routes.valid_route(10, 2.5))
        self.assertNotIn(7, agent.neighbors)

    def test_rerr_without_precursors_is_silent(self):
        agent = make_agent('AODV', node_id=3)
        agent.routes.install(10, 2, seq_no=1, hop_count=2, expiry_time=100)

        agent.receive(rerr(2, (10, 2)), 2)

        self.assertIsNone(agent.routes.valid_route(10, 0))
        self.assertEqual(agent.routes.get(10).seq_no, 2)
        self.assertEqual(agent.network.sent(MessageKind.RERR), [])

    def test_rerr_propagated_to_precursors(self):
        agent = make_agent('AODV', node_id=3)
        agent.routes.install(10, 2, seq_no=1, hop_count=2, expiry_time=100)
        agent.routes.get(10).precursors.add(4)

        agent.receive(rerr(2, (10, 7)), 2)

        error, = agent.network.sent(MessageKind.RERR)
        self.assertEqual(error.unreachable, ((10, 7),))
        self.assertEqual(error.sender, 3)

    def test_rerr_from_other_neighbor_ignored(self):
        agent = make_agent('AODV', node_id=3)
        agent.routes.install(10, 2, seq_no=1, hop_count=2, expiry_time=100)

        agent.receive(rerr(5, (10, 2)), 5)

        self.assertIsNotNone(agent.routes.valid_route(10, 0))


class HelloTest(SimpleTestCase):
    def test_hello_only_with_active_route(self):
        agent = make_agent('AODV', node_id=1)
        agent.start()
        agent.network.run_until(5)

        self.assertEqual(agent.network.sent(MessageKind.HELLO), [])

        agent.routes.install(9, 4, seq_no=1, hop_count=1, expiry_time=100)
        agent.network.run_until(10)

        hellos = agent.network.sent(MessageKind.HELLO)
        self.assertEqual(len(hellos), 5)
        self.assertEqual(hellos[0].lifetime, 1.0)

    def test_adaptive_interval(self):
        agent = make_agent('EMP', node_id=1, hia_enabled=True)
        agent.neighbors.heard(5, 0, estimate=estimate(210, 0, 1, 0))

        self.assertAlmostEqual(agent.current_hello_interval(0), 10.0)

    def test_adaptive_interval_floor(self):
        agent = make_agent('EMP', node_id=1, hia_enabled=True)
        agent.neighbors.heard(5, 0, estimate=estimate(248, 0, 1, 0))

        self.assertEqual(agent.current_hello_interval(0), 1.0)

    def test_active_neighbors_preferred(self):
        agent = make_agent('EMP', node_id=1, hia_enabled=True)
        agent.neighbors.heard(5, 0, estimate=estimate(210, 0, 1, 0))
        agent.neighbors.heard(6, 0, estimate=estimate(242, 0, 1, 0))
        agent.routes.install(9, 5, seq_no=1, hop_count=2, expiry_time=100)

        self.assertAlmostEqual(agent.current_hello_interval(0), 10.0)

    def test_static_neighbors_capped_at_horizon(self):
        agent = make_agent('MP', node_id=1, hia_enabled=True)
        agent.neighbors.heard(5, 0, estimate=estimate(100, 0))

        self.assertEqual(agent.current_hello_interval(0), 900.0)

    def test_without_adaptation(self):
        for variant, hia in (('EMP', False), ('AODV', True)):
            agent = make_agent(variant, node_id=1, hia_enabled=hia)
            agent.neighbors.heard(5, 0, estimate=estimate(248, 0, 1, 0))

            self.assertEqual(agent.current_hello_interval(0), 1.0)

    def test_advertised_interval_used_for_next_tick(self):
        agent = make_agent('EMP', node_id=1, hia_enabled=True)
        agent.neighbors.heard(5, 0, estimate=estimate(210, 0, 1, 0))
        agent.routes.install(9, 5, seq_no=1, hop_count=2, expiry_time=100)

        agent.hello_tick()

        hello, = agent.network.sent(MessageKind.HELLO)
        self.assertAlmostEqual(hello.lifetime, 10.0)
        self.assertTrue(hello.has_location)
        agent.network.run_until(9.9)
        self.assertEqual(len(agent.network.sent(MessageKind.HELLO)), 1)

    def test_neighbor_expires_on_advertised_interval(self):
        agent = make_agent('AODV', node_id=1)
        hello = ControlMessage(
            kind=MessageKind.HELLO, sender=5, seq_no=1, lifetime=20.0)

        agent.receive(hello, 5)

        self.assertTrue(agent.neighbors.is_alive(5, 39, 2))
        self.assertFalse(agent.neighbors.is_alive(5, 40, 2))
