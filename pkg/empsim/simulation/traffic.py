# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
Constant bit rate traffic between source/destination pairs.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

from empsim.core.geometry import ConfigurationError


@dataclass(frozen=True)
class CbrFlow(object):
    """
    A source sending one ``size`` byte packet to ``destination`` every
    ``1 / rate`` seconds, from ``start`` until before ``stop``.
    """
    source: int
    destination: int
    rate: float
    size: int = 512
    start: float = 0.0
    stop: float = math.inf

    def __post_init__(self):
        if not self.rate > 0:
            raise ConfigurationError("rate: must be positive")
        if self.source == self.destination:
            raise ConfigurationError(
                "A flow needs distinct source and destination nodes")

    def send_time(self, index):
        """
        The time the ``index``-th packet (counting from 0) is generated.
        Computed from the index so that rounding errors do not accumulate.
        """
        return self.start + index / self.rate

    def send_times(self):
        index = 0
        while True:
            time = self.send_time(index)
            if time >= self.stop:
                return
            yield time
            index += 1

    def packet_count(self):
        if math.isinf(self.stop):
            return math.inf
        return sum(1 for _ in self.send_times())


def cbr_source(source, destination, rate, size=512, start=0.0,
               stop=math.inf):
    """
    Creates the :class:`CbrFlow` from ``source`` to ``destination``.
    """
    return CbrFlow(source, destination, rate, size, start, stop)


def choose_pairs(nodes, pairs, rng):
    """
    Draws ``pairs`` distinct ordered source/destination pairs among
    ``nodes`` nodes.
    """
    if pairs > nodes * (nodes - 1):
        raise ConfigurationError("pairs: more pairs than distinct node pairs")
    chosen = []
    while len(chosen) < pairs:
        source, destination = (int(n) for n in rng.choice(nodes, 2,
                                                           replace=False))
        if (source, destination) not in chosen:
            chosen.append((source, destination))
    return chosen


def build_flows(config, rng):
    """
    The flows of a run: the configured pairs, or ``config.pairs`` random
    ones. Each flow starts at a random offset within its first packet
    interval after ``traffic_start`` and stops at the end of the simulated
    time.

    :type config: :class:`SimulationConfig
        <empsim.simulation.config.SimulationConfig>`
    :param rng: The run's traffic stream.
    """
    if config.flows is not None:
        pairs = list(config.flows)
    else:
        pairs = choose_pairs(config.nodes, config.pairs, rng)
    flows = []
    for source, destination in pairs:
        offset = float(rng.uniform(0.0, 1.0 / config.rate))
        flows.append(cbr_source(
            source, destination, config.rate, config.packet_size,
            start=config.traffic_start + offset, stop=config.duration))
    return flows
