# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
The unit-disk wireless channel.

A transmission reaches the nodes within the transmission range of the
sender's true position at emission time. There is no MAC layer: no
collisions, no capacity limit. An optional independent loss probability per
delivery stands in for congestion.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from empsim.core.geometry import ConfigurationError
from empsim.core.geometry import link_connected


@dataclass(frozen=True)
class ChannelModel(object):
    """
    :ivar r: The transmission range in meters.
    :ivar propagation_delay: The fixed delay of every delivery, in seconds.
    :ivar per_hop_jitter: Each delivery is further delayed by a uniform draw
        from ``[0, per_hop_jitter)``.
    :ivar loss_probability: The probability a delivery is lost.
    """
    r: float = 250.0
    propagation_delay: float = 0.0
    per_hop_jitter: float = 0.001
    loss_probability: float = 0.0

    def __post_init__(self):
        if not self.r > 0:
            raise ConfigurationError("range: must be positive")
        if not self.propagation_delay >= 0:
            raise ConfigurationError("propagation_delay: must be non-negative")
        if not self.per_hop_jitter >= 0:
            raise ConfigurationError("per_hop_jitter: must be non-negative")
        if not 0 <= self.loss_probability <= 1:
            raise ConfigurationError("loss_probability: must lie in [0, 1]")


class Channel(object):
    """
    Decides who receives a transmission and when.

    :param model: The :class:`ChannelModel`.
    :param streams: One random generator per node; the draws of a
        transmission come from the sender's generator.
    """
    def __init__(self, model, streams):
        self.model = model
        self.streams = streams
        self.counters = Counter()

    def in_range(self, sender, positions):
        """
        The nodes within range of ``sender``, in node order.

        :param positions: The true positions of all nodes, indexed by node.
        """
        origin = positions[sender]
        return [
            node for node, position in enumerate(positions)
            if node != sender and
            link_connected(origin, position, self.model.r)
        ]

    def _draw(self, sender):
        """
        Returns the delay of one delivery, or ``None`` if it is lost.
        """
        loss, jitter = self.streams[sender].random(2)
        if loss < self.model.loss_probability:
            self.counters['lost'] += 1
            return None
        return (self.model.propagation_delay +
                float(jitter) * self.model.per_hop_jitter)

    def broadcast(self, sender, positions):
        """
        :returns: ``(receiver, delay)`` pairs for the deliveries that are
            not lost.
        """
        deliveries = []
        for receiver in self.in_range(sender, positions):
            delay = self._draw(sender)
            if delay is not None:
                deliveries.append((receiver, delay))
        return deliveries

    def unicast(self, sender, receiver, positions):
        """
        :returns: The delay of the delivery to ``receiver``, or ``None`` if
            it is out of range or lost.
        """
        if not link_connected(
                positions[sender], positions[receiver], self.model.r):
            self.counters['out_of_range'] += 1
            return None
        return self._draw(sender)
