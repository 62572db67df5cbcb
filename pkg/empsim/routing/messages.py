# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
The in-simulator representation of control messages and data packets.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
import enum
import math
from typing import Optional, Tuple

from empsim.core.geometry import Vec2
from empsim.core.prediction import NodeKinematicEstimate


class MessageKind(enum.Enum):
    RREQ = 'RREQ'
    RREP = 'RREP'
    RERR = 'RERR'
    HELLO = 'HELLO'

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ControlMessage(object):
    """
    A RREQ, RREP, RERR or HELLO.

    The location fields describe the sender at ``timestamp`` and are only
    filled by variants that predict link durations.

    :ivar origin: For a RREQ the node looking for a route, for a RREP the
        node the reply travels to.
    :ivar destination: For a RREQ the node looked for, for a RREP the node
        the installed routes lead to.
    :ivar seq_no: The destination sequence number. In a HELLO, the sender's
        own sequence number.
    :ivar origin_seq_no: The originator's sequence number carried by a RREQ.
    :ivar ret: The route expiration time accumulated along the RREQ's path.
    :ivar lifetime: In a RREP, the lifetime of the route it installs. In a
        HELLO, the sender's current hello interval.
    :ivar path: The nodes a RREQ traversed, origin first.
    :ivar unreachable: ``(destination, seq_no)`` pairs listed by a RERR.
    """
    kind: MessageKind
    sender: int
    origin: int = -1
    destination: int = -1
    seq_no: int = 0
    origin_seq_no: int = 0
    hop_count: int = 0
    ret: float = math.inf
    rreq_id: int = 0
    lifetime: float = 0.0
    timestamp: float = 0.0
    sender_location: Optional[Vec2] = None
    sender_velocity: Optional[Vec2] = None
    sender_rms: float = 0.0
    path: Tuple[int, ...] = ()
    unreachable: Tuple[Tuple[int, int], ...] = ()

    @property
    def key(self):
        """
        Identifies a route discovery.
        """
        return (self.origin, self.rreq_id)

    @property
    def has_location(self):
        return self.sender_location is not None

    @property
    def sender_estimate(self):
        """
        The sender's advertised kinematics as a
        :class:`NodeKinematicEstimate
        <empsim.core.prediction.NodeKinematicEstimate>`, or ``None``.
        """
        if not self.has_location:
            return None
        return NodeKinematicEstimate(
            position=self.sender_location,
            velocity=self.sender_velocity,
            rms_error=self.sender_rms,
            timestamp=self.timestamp)

    def with_location(self, estimate):
        if estimate is None:
            return self
        return replace(
            self,
            sender_location=estimate.position,
            sender_velocity=estimate.velocity,
            sender_rms=estimate.rms_error,
            timestamp=estimate.timestamp)

    def forwarded_by(self, sender, **changes):
        """
        Returns a copy of the message as re-emitted by ``sender``.
        """
        return replace(self, sender=sender, **changes)

    def is_well_formed(self):
        if self.hop_count < 0 or self.seq_no < 0 or self.sender < 0:
            return False
        if math.isnan(self.ret) or self.ret < 0 or self.lifetime < 0:
            return False
        if self.kind in (MessageKind.RREQ, MessageKind.RREP):
            if self.origin < 0 or self.destination < 0:
                return False
        if self.kind == MessageKind.RERR and not self.unreachable:
            return False
        if self.has_location:
            if self.sender_velocity is None:
                return False
            if not (self.sender_location.is_finite() and
                    self.sender_velocity.is_finite()):
                return False
            if not self.sender_rms >= 0:
                return False
        return True

    def __str__(self):
        return "{kind} from {sender} ({origin}->{dest}, seq {seq})".format(
            kind=self.kind, sender=self.sender, origin=self.origin,
            dest=self.destination, seq=self.seq_no)


@dataclass
class DataPacket(object):
    """
    A CBR data packet. ``hops`` counts the links it crossed so far.
    """
    packet_id: int
    source: int
    destination: int
    created: float
    size: int = 512
    hops: int = field(default=0)

    def __str__(self):
        return "data #{id} ({source}->{dest})".format(
            id=self.packet_id, source=self.source, dest=self.destination)
