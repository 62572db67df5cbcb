# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
The per-node routing protocol agents.

Each variant is a subclass of :class:`BaseAgent` registered under its
:class:`Variant <empsim.routing.config.Variant>` name. An agent is a state
machine driven only by the events its network delivers: received messages
and packets, and the timers it scheduled itself.

The network an agent is attached to provides:

- ``now``: the current simulation time.
- ``schedule(delay, handler, *args)``: runs ``handler(*args)`` after
  ``delay`` seconds and returns a handle with a ``cancel()`` method.
- ``broadcast(sender, message)`` and ``unicast(sender, receiver, message)``.
- ``deliver_data(node_id, packet)`` and ``drop_data(packet, reason)``.
- ``log_event(node_id, event, message)``.
- ``auditor``: a :class:`RouteAuditor <empsim.routing.auditor.RouteAuditor>`
  or ``None``.
"""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, replace
import logging
import math

from empsim.core.estimators import GroundTruthEstimator
from empsim.core.estimators import KalmanEstimator
from empsim.core.estimators import MeasurementEstimator
from empsim.core.prediction import cap, forecast_link, link_duration
from empsim.core.utils.plugins import PluginRegistry
from empsim.routing.config import Variant
from empsim.routing.messages import ControlMessage, DataPacket, MessageKind
from empsim.routing.table import NeighborTable, PendingRreq, RoutingTable
from empsim.routing.table import RreqBuffer

logger = logging.getLogger(__name__)

DROP_QUEUE = 'queue'
DROP_NO_ROUTE = 'no_route'
DROP_LOSS = 'loss'


@dataclass
class Discovery(object):
    """
    A route discovery in progress at its originator.
    """
    destination: int
    attempt: int
    timer: object


class BaseAgent(metaclass=PluginRegistry):
    """
    The AODV state machine the variants specialize through class flags.
    """
    PLUGIN_NAME = None
    #: Control messages carry the sender's location and link durations are
    #: predicted.
    USES_LOCATION = False
    #: RREQs received over a link whose LDT is below its confidence level
    #: are discarded.
    DISCARDS_RISKY_LINKS = False
    #: The destination collects RREQ copies for ``t_w`` and replies along
    #: the one with the longest RET.
    WAITS_AT_DESTINATION = False
    #: Intermediate nodes with a fresh enough route answer RREQs.
    INTERMEDIATE_REPLIES = True

    @classmethod
    def for_variant(cls, variant):
        """
        Returns the agent class of ``variant``.

        :raises ValueError: If the variant is unknown.
        """
        agent_class = cls.get_plugin(Variant(variant))
        if agent_class is None:
            raise ValueError("No agent for variant {}".format(variant))
        return agent_class

    @classmethod
    def build_estimator(cls, mobility, filter_model):
        """
        The self-location estimator the variant feeds its location fields
        from, or ``None``.
        """
        return None

    def __init__(self, node_id, config, network, rng, estimator=None):
        self.node_id = node_id
        self.config = config
        self.network = network
        self.rng = rng
        self.estimator = estimator
        self.routes = RoutingTable()
        self.neighbors = NeighborTable(self.nominal_hello_interval)
        self.seq_no = 0
        self.rreq_id = 0
        self.seen_rreqs = RreqBuffer(config.path_discovery_time)
        self.pending_rreqs = {}
        self.discoveries = {}
        self.queue = deque()
        self.hello_interval = self.nominal_hello_interval
        self.counters = Counter()
        if network.auditor is not None:
            network.auditor.register(node_id, self.routes)

    def __repr__(self):
        return '<{cls} {node}>'.format(
            cls=self.__class__.__name__, node=self.node_id)

    @property
    def now(self):
        return self.network.now

    @property
    def nominal_hello_interval(self):
        return self.config.hello_interval

    @property
    def adapts_hello_interval(self):
        return self.USES_LOCATION and self.config.hia_enabled

    def start(self):
        """
        Schedules the first hello tick at a random offset within the first
        interval.
        """
        offset = float(self.rng.uniform(0.0, self.hello_interval))
        self.network.schedule(offset, self.hello_tick)

    # Emission

    def own_estimate(self, now):
        if self.estimator is None:
            return None
        return self.estimator.estimate(now)

    def _stamp(self, message):
        # Forwarded copies still carry the previous sender's location.
        message = replace(
            message, timestamp=self.now, sender_location=None,
            sender_velocity=None, sender_rms=0.0)
        if self.USES_LOCATION:
            return message.with_location(self.own_estimate(self.now))
        return message

    def _broadcast(self, message):
        message = self._stamp(message)
        self.network.broadcast(self.node_id, message)
        return message

    def _unicast(self, next_hop, message):
        message = self._stamp(message)
        self.network.unicast(self.node_id, next_hop, message)
        return message

    def _audit_route(self, destination):
        if self.network.auditor is not None:
            self.network.auditor.check_route(
                self.node_id, destination, self.now)

    # Reception

    def receive(self, message, sender):
        """
        Entry point for everything the channel delivers to this node.
        """
        now = self.now
        if isinstance(message, DataPacket):
            self.neighbors.heard(sender, now)
            self.handle_data(message, sender)
            return
        if not message.is_well_formed() or message.sender != sender:
            self.counters['malformed'] += 1
            logger.debug("%r dropped malformed %s", self, message)
            return
        estimate = message.sender_estimate if self.USES_LOCATION else None
        interval = (
            message.lifetime if message.kind == MessageKind.HELLO else None)
        self.neighbors.heard(message.sender, now, interval, estimate)
        handler = {
            MessageKind.RREQ: self.handle_rreq,
            MessageKind.RREP: self.handle_rrep,
            MessageKind.RERR: self.handle_rerr,
            MessageKind.HELLO: self.handle_hello,
        }[message.kind]
        handler(message)

    def forecast_from(self, message, now):
        """
        The link forecast between the sender of ``message`` and this node,
        both advanced to ``now``.
        """
        other = message.sender_estimate
        own = self.own_estimate(now)
        if other is None or own is None:
            return None
        return forecast_link(own, other.advanced_to(now), self.config.r)

    # Route discovery

    def originate_discovery(self, destination):
        """
        Broadcasts a RREQ for ``destination`` unless a discovery for it is
        already in progress.

        :returns: The emitted RREQ or ``None`` if suppressed.
        """
        if destination in self.discoveries:
            self.counters['suppressed_discoveries'] += 1
            return None
        return self._send_rreq(destination, attempt=0)

    def _send_rreq(self, destination, attempt):
        self.seq_no += 1
        self.rreq_id += 1
        message = ControlMessage(
            kind=MessageKind.RREQ,
            sender=self.node_id,
            origin=self.node_id,
            destination=destination,
            seq_no=self.routes.known_seq_no(destination),
            origin_seq_no=self.seq_no,
            hop_count=1,
            ret=self.config.horizon,
            rreq_id=self.rreq_id,
            path=(self.node_id,))
        self.seen_rreqs.add(message.key, self.now)
        timer = self.network.schedule(
            self.config.discovery_timeout(attempt),
            self._discovery_timeout, destination, attempt)
        self.discoveries[destination] = Discovery(destination, attempt, timer)
        self.counters['rreq_originated'] += 1
        message = self._broadcast(message)
        self.network.log_event(self.node_id, 'rreq_originate', message)
        return message

    def _discovery_timeout(self, destination, attempt):
        discovery = self.discoveries.get(destination)
        if discovery is None or discovery.attempt != attempt:
            return
        if self.routes.valid_route(destination, self.now) is not None:
            self._discovery_complete(destination)
            return
        if attempt < self.config.rreq_retries:
            self._send_rreq(destination, attempt + 1)
            return
        del self.discoveries[destination]
        self.counters['failed_discoveries'] += 1
        logger.debug("%r gave up discovering a route to %s",
                     self, destination)
        self._drop_queued(destination)

    def _discovery_complete(self, destination):
        discovery = self.discoveries.pop(destination, None)
        if discovery is not None:
            discovery.timer.cancel()
            self.counters['completed_discoveries'] += 1
        self._flush_queue(destination)

    def handle_rreq(self, message):
        now = self.now
        if message.origin == self.node_id:
            self.counters['duplicate_rreqs'] += 1
            return
        key = message.key
        pending = self.pending_rreqs.get(key)
        collecting = (
            message.destination == self.node_id and
            pending is not None and now < pending.deadline)
        if self.seen_rreqs.contains(key, now) and not collecting:
            self.counters['duplicate_rreqs'] += 1
            return

        ret = message.ret
        if self.USES_LOCATION:
            forecast = self.forecast_from(message, now)
            if forecast is not None:
                ldt = cap(forecast.ldt, self.config.horizon)
                if self.network.auditor is not None:
                    self.network.auditor.record_link(
                        message.origin, message.rreq_id, message.sender,
                        self.node_id, ldt, now)
                if self.DISCARDS_RISKY_LINKS and forecast.risky:
                    self.counters['risky_discards'] += 1
                    logger.debug(
                        "%r discarded %s: LDT %.3f below confidence %.3f",
                        self, message, forecast.ldt, forecast.epsilon)
                    self.network.log_event(
                        self.node_id, 'rreq_risky', message)
                    return
                ret = min(ret, ldt)

        if message.destination == self.node_id:
            self._rreq_at_destination(message, ret, pending)
            return

        self.seen_rreqs.add(key, now)
        self._install_reverse_route(message, ret)
        if self.INTERMEDIATE_REPLIES and self._reply_on_behalf(message):
            return
        forwarded = message.forwarded_by(
            self.node_id,
            hop_count=message.hop_count + 1,
            ret=ret,
            path=message.path + (self.node_id,))
        delay = float(self.rng.uniform(0.0, self.config.rebroadcast_jitter))
        self.network.schedule(delay, self._rebroadcast, forwarded)

    def _rebroadcast(self, message):
        self.counters['rreq_forwarded'] += 1
        message = self._broadcast(message)
        self.network.log_event(self.node_id, 'rreq_forward', message)

    def _route_lifetimes(self, ret, now):
        """
        The expiry time and predicted break of a route installed with the
        given RET.
        """
        if not self.USES_LOCATION:
            return now + self.config.active_route_timeout, math.inf
        ret_deadline = now + max(ret, self.config.min_route_lifetime)
        return (
            min(now + self.config.active_route_timeout, ret_deadline),
            ret_deadline)

    def _install_reverse_route(self, message, ret):
        now = self.now
        origin = message.origin
        if not self.routes.is_fresher(
                origin, message.origin_seq_no, message.hop_count, now):
            entry = self.routes.valid_route(origin, now)
            if entry.next_hop == message.sender:
                entry.refresh(now, self.config.active_route_timeout)
            return
        expiry, ret_deadline = self._route_lifetimes(ret, now)
        self.routes.install(
            origin, message.sender, message.origin_seq_no, message.hop_count,
            expiry, ret=ret, ret_deadline=ret_deadline)
        self._audit_route(origin)

    def _reply_on_behalf(self, message):
        now = self.now
        entry = self.routes.valid_route(message.destination, now)
        if (entry is None or entry.seq_no < message.seq_no or
                entry.next_hop == message.sender):
            return False
        entry.precursors.add(message.sender)
        reply = ControlMessage(
            kind=MessageKind.RREP,
            sender=self.node_id,
            origin=message.origin,
            destination=message.destination,
            seq_no=entry.seq_no,
            hop_count=entry.hop_count,
            lifetime=entry.expiry_time - now)
        self.counters['intermediate_replies'] += 1
        self._unicast(message.sender, reply)
        return True

    def _rreq_at_destination(self, message, ret, pending):
        now = self.now
        self.seen_rreqs.add(message.key, self.now)
        if self.USES_LOCATION and self.network.auditor is not None:
            self.network.auditor.audit_ret(
                message.origin, message.rreq_id,
                message.path + (self.node_id,), ret)
        if not self.WAITS_AT_DESTINATION:
            self._install_reverse_route(message, ret)
            self._send_rrep(
                message.origin, message.sender, message.seq_no,
                lifetime=self.config.active_route_timeout)
            return
        if pending is None:
            pending = PendingRreq(
                origin=message.origin,
                rreq_id=message.rreq_id,
                best_ret=ret,
                best_reverse_hop=message.sender,
                deadline=now + self.config.t_w,
                best_hop_count=message.hop_count,
                best_arrival=now,
                origin_seq_no=message.origin_seq_no,
                dest_seq_no=message.seq_no)
            self.pending_rreqs[message.key] = pending
            self.network.schedule(
                self.config.t_w, self.conclude_discovery, pending)
        else:
            pending.offer(ret, message.sender, message.hop_count, now)

    def conclude_discovery(self, pending):
        """
        Replies to the best RREQ copy collected during the wait.
        """
        now = self.now
        self.pending_rreqs.pop((pending.origin, pending.rreq_id), None)
        if self.network.auditor is not None:
            self.network.auditor.forget(pending.origin, pending.rreq_id)
        expiry, ret_deadline = self._route_lifetimes(pending.best_ret, now)
        if self.routes.is_fresher(pending.origin, pending.origin_seq_no,
                                  pending.best_hop_count, now) or (
                self.routes.valid_route(pending.origin, now).next_hop !=
                pending.best_reverse_hop):
            self.routes.install(
                pending.origin, pending.best_reverse_hop,
                pending.origin_seq_no, pending.best_hop_count, expiry,
                ret=pending.best_ret, ret_deadline=ret_deadline)
            self._audit_route(pending.origin)
        if not self.neighbors.is_alive(pending.best_reverse_hop, now,
                                       self.config.allowed_hello_loss):
            self.counters['rrep_no_reverse'] += 1
            return
        self._send_rrep(
            pending.origin, pending.best_reverse_hop, pending.dest_seq_no,
            lifetime=cap(pending.best_ret, self.config.horizon),
            ret=pending.best_ret)

    def _send_rrep(self, origin, next_hop, dest_seq_no, lifetime,
                   ret=math.inf):
        self.seq_no = max(self.seq_no, dest_seq_no) + 1
        reply = ControlMessage(
            kind=MessageKind.RREP,
            sender=self.node_id,
            origin=origin,
            destination=self.node_id,
            seq_no=self.seq_no,
            hop_count=0,
            ret=ret,
            lifetime=lifetime)
        self.counters['rrep_originated'] += 1
        reply = self._unicast(next_hop, reply)
        self.network.log_event(self.node_id, 'rrep_originate', reply)
        return reply

    def handle_rrep(self, message):
        now = self.now
        destination = message.destination
        hop_count = message.hop_count + 1
        current = self.routes.valid_route(destination, now)
        if current is None or current.next_hop == message.sender or (
                self.routes.is_fresher(
                    destination, message.seq_no, hop_count, now)):
            if self.USES_LOCATION:
                ret = message.lifetime
                expiry, ret_deadline = self._route_lifetimes(ret, now)
            else:
                ret, ret_deadline = math.inf, math.inf
                expiry = now + message.lifetime
            entry = self.routes.install(
                destination, message.sender, message.seq_no, hop_count,
                expiry, ret=ret, ret_deadline=ret_deadline)
            self._audit_route(destination)
        elif message.origin != self.node_id:
            # A fresher route through another neighbor exists here.
            self.counters['stale_rreps'] += 1
            return
        else:
            entry = current

        if message.origin == self.node_id:
            self.network.log_event(self.node_id, 'route_installed', message)
            self._discovery_complete(destination)
            return

        reverse = self.routes.valid_route(message.origin, now)
        if reverse is None:
            self.counters['rrep_no_reverse'] += 1
            return
        entry.precursors.add(reverse.next_hop)
        reverse.precursors.add(message.sender)
        self.counters['rrep_forwarded'] += 1
        self._unicast(
            reverse.next_hop,
            message.forwarded_by(self.node_id, hop_count=hop_count))

    # Route maintenance

    def _send_rerr(self, unreachable):
        self.counters['rerr_sent'] += 1
        message = self._broadcast(ControlMessage(
            kind=MessageKind.RERR,
            sender=self.node_id,
            unreachable=tuple(unreachable)))
        self.network.log_event(self.node_id, 'rerr', message)

    def handle_rerr(self, message):
        now = self.now
        affected = []
        for destination, seq_no in message.unreachable:
            entry = self.routes.get(destination)
            if (entry is None or not entry.is_valid(now) or
                    entry.next_hop != message.sender):
                continue
            entry.invalidate()
            entry.seq_no = max(entry.seq_no, seq_no)
            if entry.precursors:
                affected.append((destination, entry.seq_no))
        if affected:
            self._send_rerr(affected)

    def _link_broken(self, neighbor):
        """
        Forgets ``neighbor``, invalidates the routes through it and reports
        them in a single RERR.
        """
        now = self.now
        self.neighbors.remove(neighbor)
        broken = self.routes.invalidate_through(neighbor, now)
        self.counters['link_breaks'] += 1
        if broken:
            self._send_rerr(
                [(entry.destination, entry.seq_no) for entry in broken])

    def handle_hello(self, message):
        self.counters['hello_rx'] += 1

    def current_hello_interval(self, now):
        """
        The hello interval for the next period. With HIA it is
        ``max(t_min, min LDT / beta)`` over the active neighbors (or all
        neighbors when none is active).
        """
        if not self.adapts_hello_interval:
            return self.nominal_hello_interval
        own = self.own_estimate(now)
        if own is None:
            return self.nominal_hello_interval
        active = self.routes.active_neighbors(now)
        known = [
            neighbor for neighbor in self.neighbors
            if neighbor.estimate is not None
        ]
        candidates = [
            neighbor for neighbor in known if neighbor.node_id in active
        ] or known
        if not candidates:
            return self.nominal_hello_interval
        shortest = min(
            cap(link_duration(
                own, neighbor.estimate.advanced_to(now), self.config.r),
                self.config.horizon)
            for neighbor in candidates)
        return max(self.config.t_min, shortest / self.config.beta)

    def hello_tick(self):
        now = self.now
        for lost in self.neighbors.expire(
                now, self.config.allowed_hello_loss):
            self._link_broken(lost.node_id)
        interval = self.current_hello_interval(now)
        self.hello_interval = interval
        if self.routes.has_active_route(now):
            if self.adapts_hello_interval and interval < self.config.t_min:
                self.counters['hello_floor_violations'] += 1
            self.counters['hello_tx'] += 1
            self._broadcast(ControlMessage(
                kind=MessageKind.HELLO,
                sender=self.node_id,
                seq_no=self.seq_no,
                lifetime=interval))
        self.network.schedule(interval, self.hello_tick)

    # Data

    def send_data(self, packet):
        """
        Hands a locally generated packet to the routing layer.
        """
        self._route_data(packet, previous_hop=None)

    def handle_data(self, packet, sender):
        now = self.now
        packet.hops += 1
        if packet.destination == self.node_id:
            entry = self.routes.valid_route(packet.source, now)
            if entry is not None:
                entry.refresh(now, self.config.active_route_timeout)
            self.network.deliver_data(self.node_id, packet)
            return
        if packet.hops > self.config.net_diameter:
            self.network.drop_data(packet, DROP_NO_ROUTE)
            return
        self._route_data(packet, previous_hop=sender)

    def _route_data(self, packet, previous_hop):
        now = self.now
        destination = packet.destination
        entry = self.routes.valid_route(destination, now)
        reported = False
        if entry is not None and not self.neighbors.is_alive(
                entry.next_hop, now, self.config.allowed_hello_loss):
            self._link_broken(entry.next_hop)
            entry = None
            reported = True
        if entry is None:
            if previous_hop is None:
                self._enqueue(packet)
                if destination not in self.discoveries:
                    self.originate_discovery(destination)
                return
            self.network.drop_data(packet, DROP_NO_ROUTE)
            if not reported:
                self._send_rerr(
                    [(destination, self.routes.known_seq_no(destination))])
            return
        entry.refresh(now, self.config.active_route_timeout)
        if previous_hop is not None:
            entry.precursors.add(previous_hop)
            reverse = self.routes.valid_route(packet.source, now)
            if reverse is not None:
                reverse.refresh(now, self.config.active_route_timeout)
        self.network.unicast(self.node_id, entry.next_hop, packet)

    def _enqueue(self, packet):
        if len(self.queue) >= self.config.queue_capacity:
            self.network.drop_data(packet, DROP_QUEUE)
            return
        self.queue.append(packet)

    def _take_queued(self, destination):
        waiting = [p for p in self.queue if p.destination == destination]
        self.queue = deque(
            p for p in self.queue if p.destination != destination)
        return waiting

    def _flush_queue(self, destination):
        for packet in self._take_queued(destination):
            self._route_data(packet, previous_hop=None)

    def _drop_queued(self, destination):
        for packet in self._take_queued(destination):
            self.network.drop_data(packet, DROP_NO_ROUTE)


class AodvAgent(BaseAgent):
    PLUGIN_NAME = Variant.AODV


class AodvIAgent(AodvAgent):
    """
    AODV with infrequent hellos.
    """
    PLUGIN_NAME = Variant.AODV_I

    @property
    def nominal_hello_interval(self):
        return self.config.aodv_i_hello_interval


class MobilityPredictionAgent(BaseAgent):
    """
    AODV selecting routes by their predicted expiration time, computed from
    the raw location fixes.
    """
    PLUGIN_NAME = Variant.MP
    USES_LOCATION = True
    WAITS_AT_DESTINATION = True
    INTERMEDIATE_REPLIES = False

    @classmethod
    def build_estimator(cls, mobility, filter_model):
        return MeasurementEstimator()


class EnhancedMobilityPredictionAgent(MobilityPredictionAgent):
    """
    Mobility prediction over Kalman-filtered locations, discarding RREQs
    received over links predicted to break within their confidence level.
    """
    PLUGIN_NAME = Variant.EMP
    DISCARDS_RISKY_LINKS = True

    @classmethod
    def build_estimator(cls, mobility, filter_model):
        return KalmanEstimator(filter_model)


class EmpOracleAgent(EnhancedMobilityPredictionAgent):
    """
    EMP with error-free knowledge of every node's kinematics.
    """
    PLUGIN_NAME = Variant.EMP_WO

    @classmethod
    def build_estimator(cls, mobility, filter_model):
        return GroundTruthEstimator(mobility)
