# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
The discrete-event simulator running one configuration.

A run is single threaded and depends on nothing but its
:class:`SimulationConfig <empsim.simulation.config.SimulationConfig>`: the
same configuration gives the same event trace and the same
:class:`MetricsReport <empsim.simulation.metrics.MetricsReport>`.
"""
from __future__ import annotations

import itertools
import logging
import math

from empsim.core.geometry import ARRIVAL_TOLERANCE
from empsim.core.geometry import NoiseModel
from empsim.core.geometry import RandomWaypointMobility
from empsim.core.geometry import StaticMobility
from empsim.core.geometry import Vec2
from empsim.core.geometry import measure_position
from empsim.routing.agents import BaseAgent
from empsim.routing.agents import DROP_LOSS
from empsim.routing.agents import DROP_NO_ROUTE
from empsim.routing.agents import DROP_QUEUE
from empsim.routing.auditor import RouteAuditor
from empsim.routing.messages import ControlMessage
from empsim.routing.messages import DataPacket
from empsim.routing.messages import MessageKind
from empsim.simulation import events
from empsim.simulation.channel import Channel
from empsim.simulation.config import MOBILITY_RWP
from empsim.simulation.config import Stream
from empsim.simulation.events import EventQueue
from empsim.simulation.events import SimulationError
from empsim.simulation.metrics import MetricsAccumulator
from empsim.simulation.metrics import MetricsReport
from empsim.simulation.metrics import compute_metrics
from empsim.simulation.traces import RunTrace
from empsim.simulation.traffic import build_flows

__all__ = ['Node', 'SimulationError', 'Simulator', 'run']

logger = logging.getLogger(__name__)

DELIVERED = 'delivered'


class Node(object):
    """
    The pieces of one simulated node: its trajectory, its noisy location
    fixes and its routing agent.
    """
    def __init__(self, node_id, mobility, noise, noise_stream, agent):
        self.node_id = node_id
        self.mobility = mobility
        self.noise = noise
        self.noise_stream = noise_stream
        self.agent = agent

    @property
    def estimator(self):
        return self.agent.estimator

    def position_at(self, now):
        return self.mobility.state_at(now).position


class Simulator(object):
    """
    Owns the event queue, the channel and the nodes, and is the network
    every routing agent is attached to.

    :param trace: A :class:`RunTrace <empsim.simulation.traces.RunTrace>`
        receiving every executed event, or ``None``.
    """
    def __init__(self, config, trace=None):
        self.config = config
        self.trace = trace
        self.queue = EventQueue()
        self.metrics = MetricsAccumulator()
        self.protocol = config.protocol_config()
        self.auditor = RouteAuditor(
            config.horizon, retention=self.protocol.path_discovery_time)
        self.channel = Channel(
            config.channel_model(),
            [config.stream(Stream.CHANNEL, n) for n in range(config.nodes)])
        self._packet_ids = itertools.count(1)
        self._packets = {}
        self._measurements = 0
        self._positions = (None, None)
        self.nodes = self._build_nodes()
        self.flows = build_flows(config, config.stream(Stream.TRAFFIC))

    def _build_nodes(self):
        config = self.config
        agent_class = BaseAgent.for_variant(config.variant)
        filter_model = (
            config.filter_model() if agent_class.USES_LOCATION else None)
        rect = config.rect()
        nodes = []
        for node_id in range(config.nodes):
            if config.mobility == MOBILITY_RWP:
                mobility = RandomWaypointMobility(
                    rect, (config.v_min, config.v_max), config.pause,
                    config.stream(Stream.MOBILITY, node_id))
            else:
                mobility = StaticMobility(Vec2(*config.positions[node_id]))
            agent = agent_class(
                node_id, self.protocol, self,
                config.stream(Stream.PROTOCOL, node_id),
                agent_class.build_estimator(mobility, filter_model))
            nodes.append(Node(
                node_id, mobility, NoiseModel(config.sigma, node_id),
                config.stream(Stream.NOISE, node_id), agent))
        return nodes

    @property
    def now(self):
        return self.queue.now

    # The network interface of the routing agents.

    def schedule(self, delay, handler, *args):
        node = getattr(getattr(handler, '__self__', None), 'node_id', None)
        return self.queue.push(
            self.now + delay, events.TIMER, handler, args, node=node)

    def positions(self):
        """
        The true positions of all nodes at the current time.
        """
        time, positions = self._positions
        if time != self.now:
            positions = [node.position_at(self.now) for node in self.nodes]
            self._positions = (self.now, positions)
        return positions

    def broadcast(self, sender, message):
        self.metrics.record_control(message.kind)
        for receiver, delay in self.channel.broadcast(
                sender, self.positions()):
            self._schedule_delivery(receiver, message, sender, delay)

    def unicast(self, sender, receiver, message):
        if isinstance(message, ControlMessage):
            self.metrics.record_control(message.kind)
        delay = self.channel.unicast(sender, receiver, self.positions())
        if delay is None:
            if isinstance(message, DataPacket):
                self.drop_data(message, DROP_LOSS)
            return
        self._schedule_delivery(receiver, message, sender, delay)

    def _schedule_delivery(self, receiver, message, sender, delay):
        self.queue.push(
            self.now + delay, events.DELIVER,
            self.nodes[receiver].agent.receive, (message, sender),
            node=receiver)

    def deliver_data(self, node_id, packet):
        self._finalize(packet, DELIVERED)
        self.metrics.delivered += 1

    def drop_data(self, packet, reason):
        self._finalize(packet, reason)
        self.metrics.record_drop(reason)

    def _finalize(self, packet, outcome):
        if self._packets.get(packet.packet_id, outcome) is not None:
            raise SimulationError(
                "Packet {packet} reached a second outcome {outcome}".format(
                    packet=packet, outcome=outcome))
        self._packets[packet.packet_id] = outcome

    def log_event(self, node_id, event, message):
        if self.trace is not None:
            self.trace.protocol_event(self.now, node_id, event, message)

    # Periodic and scheduled activities.

    def _generate(self, flow, index):
        packet = DataPacket(
            next(self._packet_ids), flow.source, flow.destination, self.now,
            flow.size)
        self._packets[packet.packet_id] = None
        self.metrics.generated += 1
        self.nodes[flow.source].agent.send_data(packet)
        self._schedule_packet(flow, index + 1)

    def _schedule_packet(self, flow, index):
        time = flow.send_time(index)
        if time < flow.stop:
            self.queue.push(
                time, events.TRAFFIC, self._generate, (flow, index),
                node=flow.source)

    def _measure(self):
        now = self.now
        for node in self.nodes:
            if node.estimator is None:
                continue
            state = node.mobility.state_at(now)
            measurement = measure_position(
                state, node.noise, node.noise_stream)
            node.estimator.observe(measurement)
            if self.trace is not None:
                self.trace.filter_row(
                    now, node.node_id, state.position, measurement,
                    node.estimator.estimate(now))
        self._measurements += 1
        self.queue.push(
            self._measurements * self.config.measurement_period,
            events.MEASUREMENT, self._measure)

    def _move(self, node):
        now = self.now
        node.mobility.catch_up(now)
        next_change = node.mobility.next_change
        if math.isinf(next_change):
            return
        if next_change <= now:
            next_change = now + ARRIVAL_TOLERANCE
        self.queue.push(
            next_change, events.MOBILITY, self._move, (node,),
            node=node.node_id)

    def _sample(self):
        self.metrics.sample(self.now)
        self.queue.push(
            self.now + self.config.metrics_period, events.METRICS,
            self._sample)

    def _start(self):
        # Fixes at t=0 precede everything else scheduled at t=0.
        self.queue.push(0.0, events.MEASUREMENT, self._measure)
        for node in self.nodes:
            next_change = node.mobility.next_change
            if not math.isinf(next_change):
                self.queue.push(
                    next_change, events.MOBILITY, self._move, (node,),
                    node=node.node_id)
        for node in self.nodes:
            node.agent.start()
        for flow in self.flows:
            self._schedule_packet(flow, 0)
        self.queue.push(
            self.config.metrics_period, events.METRICS, self._sample)

    def run(self):
        """
        Executes the events up to the end of the run and returns its
        :class:`MetricsReport <empsim.simulation.metrics.MetricsReport>`.

        :raises SimulationError: If an internal invariant is breached.
        """
        self._start()
        end_time = self.config.end_time
        while True:
            event = self.queue.pop(until=end_time)
            if event is None:
                break
            if event.cancelled:
                continue
            if self.trace is not None:
                self.trace.event(event)
            event.fire()
        self.queue.now = end_time
        self.metrics.sample(end_time)
        in_flight = self._check_conservation()
        return self.report(in_flight)

    def _in_flight(self):
        """
        Packet ids waiting in a queue or travelling over the channel.
        """
        waiting = {
            packet.packet_id
            for node in self.nodes for packet in node.agent.queue
        }
        for event in self.queue:
            if event.kind == events.DELIVER and isinstance(
                    event.args[0], DataPacket):
                waiting.add(event.args[0].packet_id)
        return waiting

    def _check_conservation(self):
        """
        Every generated packet is delivered, dropped, or still in flight,
        exactly once.

        :returns: The number of packets in flight.
        """
        unresolved = {
            packet_id for packet_id, outcome in self._packets.items()
            if outcome is None
        }
        in_flight = self._in_flight()
        if unresolved != in_flight:
            raise SimulationError(
                "Packet conservation violated: {lost} packets vanished, "
                "{extra} are in flight after an outcome".format(
                    lost=len(unresolved - in_flight),
                    extra=len(in_flight - unresolved)))
        accounted = (
            self.metrics.delivered + sum(self.metrics.drops.values()) +
            len(in_flight))
        if accounted != self.metrics.generated:
            raise SimulationError(
                "{accounted} packet outcomes for {generated} generated".format(
                    accounted=accounted, generated=self.metrics.generated))
        return len(in_flight)

    def _agent_total(self, counter):
        return sum(node.agent.counters[counter] for node in self.nodes)

    def report(self, in_flight=0):
        config = self.config
        metrics = self.metrics
        pdr, nrl = compute_metrics(metrics)
        resets = sum(
            getattr(node.estimator, 'resets', 0) for node in self.nodes)
        audit = self.auditor.counters
        return MetricsReport(
            variant=str(config.variant),
            hia=config.hia,
            sigma=config.sigma,
            v_max=config.v_max,
            pairs=len(self.flows),
            nodes=config.nodes,
            seed=config.seed,
            pdr=pdr,
            nrl=nrl,
            generated=metrics.generated,
            delivered=metrics.delivered,
            control_tx=metrics.control_transmissions,
            rreq_tx=metrics.control[MessageKind.RREQ],
            rrep_tx=metrics.control[MessageKind.RREP],
            rerr_tx=metrics.control[MessageKind.RERR],
            hello_tx=metrics.control[MessageKind.HELLO],
            dropped_queue=metrics.drops[DROP_QUEUE],
            dropped_no_route=metrics.drops[DROP_NO_ROUTE],
            dropped_loss=metrics.drops[DROP_LOSS],
            in_flight=in_flight,
            risky_discards=self._agent_total('risky_discards'),
            completed_discoveries=self._agent_total(
                'completed_discoveries'),
            failed_discoveries=self._agent_total('failed_discoveries'),
            kalman_resets=resets,
            loop_detections=audit['loop_detections'],
            seq_order_violations=audit['seq_order_violations'],
            ret_audits=audit['ret_audits'],
            ret_mismatches=audit['ret_mismatches'],
            hello_floor_violations=self._agent_total(
                'hello_floor_violations'),
            trace_digest=self.trace.digest if self.trace is not None else '',
            series=tuple(metrics.series))


def run(config, trace_dir=None, label='run', digest=False):
    """
    Runs the simulation of ``config``.

    :param trace_dir: Writes the event and filter traces there when given.
    :param digest: Computes the event trace digest even without
        ``trace_dir``.
    :rtype: :class:`MetricsReport <empsim.simulation.metrics.MetricsReport>`
    """
    if trace_dir is None and not digest:
        return Simulator(config).run()
    with RunTrace(trace_dir, label) as trace:
        report = Simulator(config, trace).run()
    logger.debug("Run %s finished with trace digest %s",
                 label, report.trace_digest)
    return report
