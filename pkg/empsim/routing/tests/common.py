# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
A fake network recording what agents emit, for driving a single agent by
hand.
"""
import heapq
import itertools

from empsim.core.tests.common import estimate
from empsim.core.tests.common import rng
from empsim.routing.agents import BaseAgent
from empsim.routing.auditor import RouteAuditor
from empsim.routing.config import ProtocolConfig
from empsim.routing.messages import ControlMessage, MessageKind


class FakeTimer(object):
    def __init__(self, time, handler, args):
        self.time = time
        self.handler = handler
        self.args = args
        self.cancelled = False

    def cancel(self):
        self.cancelled = True


class RecordingNetwork(object):
    """
    Runs the timers agents schedule when :meth:`run_until` is called and
    keeps everything they send.
    """
    def __init__(self, audited=True, horizon=3600.0):
        self.now = 0.0
        self.auditor = RouteAuditor(horizon) if audited else None
        self.broadcasts = []
        self.unicasts = []
        self.delivered = []
        self.dropped = []
        self.events = []
        self._timers = []
        self._order = itertools.count()

    def schedule(self, delay, handler, *args):
        timer = FakeTimer(self.now + delay, handler, args)
        heapq.heappush(self._timers, (timer.time, next(self._order), timer))
        return timer

    def run_until(self, until):
        while self._timers and self._timers[0][0] <= until:
            time, _, timer = heapq.heappop(self._timers)
            if timer.cancelled:
                continue
            self.now = time
            timer.handler(*timer.args)
        self.now = until

    def broadcast(self, sender, message):
        self.broadcasts.append((sender, message))

    def unicast(self, sender, receiver, message):
        self.unicasts.append((sender, receiver, message))

    def deliver_data(self, node_id, packet):
        self.delivered.append((node_id, packet))

    def drop_data(self, packet, reason):
        self.dropped.append((packet, reason))

    def log_event(self, node_id, event, message):
        self.events.append((node_id, event))

    def sent(self, kind):
        """
        The control messages of ``kind`` broadcast or unicast so far.
        """
        messages = [message for _, message in self.broadcasts]
        messages.extend(message for _, _, message in self.unicasts)
        return [
            message for message in messages
            if isinstance(message, ControlMessage) and message.kind == kind
        ]


class FixedEstimator(object):
    """
    A self-location estimator reporting a known kinematic estimate.
    """
    def __init__(self, kinematics):
        self.kinematics = kinematics

    def observe(self, measurement):
        pass

    def estimate(self, now):
        return self.kinematics.advanced_to(now)


def make_agent(variant, node_id=0, network=None, position=(0.0, 0.0),
               velocity=(0.0, 0.0), rms=0.0, seed=0, **config):
    """
    Builds an agent of ``variant`` on a :class:`RecordingNetwork`, located at
    ``position`` when the variant uses locations.
    """
    if network is None:
        network = RecordingNetwork()
    agent_class = BaseAgent.for_variant(variant)
    estimator = None
    if agent_class.USES_LOCATION:
        estimator = FixedEstimator(
            estimate(position[0], position[1], velocity[0], velocity[1], rms))
    return agent_class(
        node_id, ProtocolConfig(variant=variant, **config), network,
        rng(seed), estimator)


def rreq(sender, origin, destination, rreq_id=1, ret=3600.0, hop_count=1,
         seq_no=0, origin_seq_no=1, path=None, location=None):
    """
    A RREQ as received from ``sender``. ``location`` is the sender's
    advertised :class:`NodeKinematicEstimate
    <empsim.core.prediction.NodeKinematicEstimate>`.
    """
    if path is None:
        path = (origin,) if sender == origin else (origin, sender)
    message = ControlMessage(
        kind=MessageKind.RREQ,
        sender=sender,
        origin=origin,
        destination=destination,
        seq_no=seq_no,
        origin_seq_no=origin_seq_no,
        hop_count=hop_count,
        ret=ret,
        rreq_id=rreq_id,
        path=path)
    return message.with_location(location)


def rrep(sender, origin, destination, seq_no=1, hop_count=0, lifetime=10.0):
    return ControlMessage(
        kind=MessageKind.RREP,
        sender=sender,
        origin=origin,
        destination=destination,
        seq_no=seq_no,
        hop_count=hop_count,
        lifetime=lifetime)
