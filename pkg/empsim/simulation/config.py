# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
The parameters of a single simulation run and the seeded random streams
derived from them.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
import enum
from typing import Optional, Tuple

import numpy as np

from empsim.core import kalman
from empsim.core.geometry import ConfigurationError
from empsim.core.geometry import Rect
from empsim.core.geometry import validate_speed_range
from empsim.routing.config import ProtocolConfig
from empsim.routing.config import Variant
from empsim.simulation.channel import ChannelModel

MOBILITY_RWP = 'rwp'
MOBILITY_STATIC = 'static'
MOBILITY_MODELS = (MOBILITY_RWP, MOBILITY_STATIC)


class Stream(enum.IntEnum):
    """
    The purposes random numbers are drawn for. Each node has its own stream
    per purpose so that changing how often one of them is used does not
    shift the others.
    """
    MOBILITY = 1
    NOISE = 2
    PROTOCOL = 3
    TRAFFIC = 4
    CHANNEL = 5


def random_stream(seed, purpose, node_id=0):
    """
    Returns the generator for ``purpose`` of node ``node_id`` in the run
    seeded with ``seed``.
    """
    sequence = np.random.SeedSequence([int(seed), int(purpose), int(node_id)])
    return np.random.default_rng(sequence)


#: The fields passed on to :class:`ProtocolConfig
#: <empsim.routing.config.ProtocolConfig>` under the same name.
PROTOCOL_FIELDS = (
    'hello_interval', 'aodv_i_hello_interval', 't_min', 'beta', 't_w',
    'allowed_hello_loss', 'active_route_timeout', 'rreq_retries',
    'node_traversal_time', 'net_diameter', 'rebroadcast_jitter',
    'queue_capacity', 'horizon', 'min_route_lifetime',
)


@dataclass(frozen=True)
class SimulationConfig(object):
    """
    Everything that determines the outcome of a run, the seed included.

    The defaults are those of the reference evaluation: 100 nodes moving by
    random waypoint over 2000 x 1500 m for 900 s, ten CBR pairs of 4
    packets/s of 512 bytes, and a 250 m transmission range.
    """
    variant: Variant = Variant.EMP
    hia: bool = False
    seed: int = 1

    area_width: float = 2000.0
    area_height: float = 1500.0
    nodes: int = 100
    duration: float = 900.0
    drain: float = 5.0

    mobility: str = MOBILITY_RWP
    pause: float = 0.0
    v_min: float = 1.0
    v_max: float = 20.0
    positions: Optional[Tuple[Tuple[float, float], ...]] = None

    pairs: int = 10
    flows: Optional[Tuple[Tuple[int, int], ...]] = None
    rate: float = 4.0
    packet_size: int = 512
    traffic_start: float = 0.0

    r: float = 250.0
    loss_probability: float = 0.0
    propagation_delay: float = 0.0
    per_hop_jitter: float = 0.001

    sigma: float = 20.0
    measurement_period: float = 1.0
    r_diagonal_only: bool = False
    q_scale: float = 1.0
    innovation_gate: float = 0.999
    joseph_form: bool = False
    velocity_source: str = kalman.VELOCITY_DIFFERENCED

    hello_interval: float = 1.0
    aodv_i_hello_interval: float = 20.0
    t_min: float = 1.0
    beta: float = 4.0
    t_w: float = 0.1
    allowed_hello_loss: int = 2
    active_route_timeout: float = 10.0
    rreq_retries: int = 2
    node_traversal_time: float = 0.04
    net_diameter: int = 35
    rebroadcast_jitter: float = 0.01
    queue_capacity: int = 64
    horizon: float = 3600.0
    min_route_lifetime: float = 1.0

    metrics_period: float = 10.0

    def __post_init__(self):
        object.__setattr__(self, 'variant', Variant(self.variant))
        if self.positions is not None:
            object.__setattr__(self, 'positions', tuple(
                (float(x), float(y)) for x, y in self.positions))
        if self.flows is not None:
            object.__setattr__(self, 'flows', tuple(
                (int(source), int(destination))
                for source, destination in self.flows))
        self.validate()

    def validate(self):
        """
        :raises ConfigurationError: Naming the first invalid parameter.
        """
        checks = (
            ('nodes', self.nodes >= 2, "at least two nodes are needed"),
            ('duration', self.duration > 0, "must be positive"),
            ('drain', self.drain >= 0, "must be non-negative"),
            ('pause', self.pause >= 0, "must be non-negative"),
            ('sigma', self.sigma >= 0, "must be non-negative"),
            ('pairs', self.pairs >= 0, "must be non-negative"),
            ('rate', self.rate > 0, "must be positive"),
            ('packet_size', self.packet_size > 0, "must be positive"),
            ('traffic_start', 0 <= self.traffic_start < self.duration,
             "must lie within the simulated time"),
            ('measurement_period', self.measurement_period > 0,
             "must be positive"),
            ('metrics_period', self.metrics_period > 0, "must be positive"),
            ('q_scale', self.q_scale >= 0, "must be non-negative"),
            ('innovation_gate', 0 <= self.innovation_gate < 1,
             "must lie in [0, 1)"),
            ('mobility', self.mobility in MOBILITY_MODELS,
             "must be one of {}".format(', '.join(MOBILITY_MODELS))),
            ('velocity_source',
             self.velocity_source in kalman.VELOCITY_SOURCES,
             "must be one of {}".format(', '.join(kalman.VELOCITY_SOURCES))),
        )
        for key, valid, message in checks:
            if not valid:
                raise ConfigurationError("{key}: {message}".format(
                    key=key, message=message))
        self.rect()
        self.channel_model()
        self.protocol_config()
        if self.mobility == MOBILITY_RWP:
            validate_speed_range((self.v_min, self.v_max))
        elif self.positions is None or len(self.positions) != self.nodes:
            raise ConfigurationError(
                "positions: static mobility needs one position per node")
        if self.flows is not None:
            for source, destination in self.flows:
                if source == destination or not (
                        0 <= source < self.nodes and
                        0 <= destination < self.nodes):
                    raise ConfigurationError(
                        "flows: invalid pair ({}, {})".format(
                            source, destination))
        elif self.pairs > self.nodes * (self.nodes - 1):
            raise ConfigurationError(
                "pairs: more pairs than distinct node pairs")

    @property
    def end_time(self):
        """
        The time the run stops: traffic ends at ``duration`` and in-flight
        packets get ``drain`` more seconds.
        """
        return self.duration + self.drain

    def rect(self):
        return Rect(self.area_width, self.area_height)

    def protocol_config(self):
        return ProtocolConfig(
            variant=self.variant,
            hia_enabled=self.hia,
            r=self.r,
            **{name: getattr(self, name) for name in PROTOCOL_FIELDS})

    def channel_model(self):
        return ChannelModel(
            r=self.r,
            propagation_delay=self.propagation_delay,
            per_hop_jitter=self.per_hop_jitter,
            loss_probability=self.loss_probability)

    def filter_model(self):
        return kalman.FilterModel.from_noise(
            self.sigma,
            measurement_period=self.measurement_period,
            diagonal_only=self.r_diagonal_only,
            q_scale=self.q_scale,
            velocity_source=self.velocity_source,
            joseph_form=self.joseph_form,
            gate_probability=self.innovation_gate or None)

    def with_changes(self, **changes):
        return replace(self, **changes)

    def stream(self, purpose, node_id=0):
        return random_stream(self.seed, purpose, node_id)
