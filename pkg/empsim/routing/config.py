# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
Protocol parameters shared by all routing agents of a run.
"""
from __future__ import annotations

from dataclasses import dataclass
import enum

from empsim.core.geometry import ConfigurationError


class Variant(str, enum.Enum):
    """
    The routing protocol variants.
    """
    #: Plain AODV with a 1 s hello interval.
    AODV = 'AODV'
    #: AODV with a 20 s hello interval.
    AODV_I = 'AODV_I'
    #: Link-duration prediction from raw location fixes.
    MP = 'MP'
    #: Kalman-filtered prediction with risky-link discard.
    EMP = 'EMP'
    #: EMP fed with the true node kinematics.
    EMP_WO = 'EMP_WO'

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ProtocolConfig(object):
    variant: Variant = Variant.EMP
    hia_enabled: bool = False
    hello_interval: float = 1.0
    aodv_i_hello_interval: float = 20.0
    t_min: float = 1.0
    beta: float = 4.0
    t_w: float = 0.1
    allowed_hello_loss: int = 2
    r: float = 250.0
    active_route_timeout: float = 10.0
    rreq_retries: int = 2
    node_traversal_time: float = 0.04
    net_diameter: int = 35
    rebroadcast_jitter: float = 0.01
    queue_capacity: int = 64
    horizon: float = 3600.0
    min_route_lifetime: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, 'variant', Variant(self.variant))
        checks = (
            (self.beta >= 1, "beta must be at least 1"),
            (self.t_min > 0, "t_min must be positive"),
            (self.t_w >= 0, "t_w must be non-negative"),
            (self.r > 0, "the transmission range must be positive"),
            (self.hello_interval > 0, "hello_interval must be positive"),
            (self.aodv_i_hello_interval > 0,
             "aodv_i_hello_interval must be positive"),
            (self.allowed_hello_loss >= 1,
             "allowed_hello_loss must be at least 1"),
            (self.active_route_timeout > 0,
             "active_route_timeout must be positive"),
            (self.rreq_retries >= 0, "rreq_retries must be non-negative"),
            (self.node_traversal_time > 0,
             "node_traversal_time must be positive"),
            (self.net_diameter >= 1, "net_diameter must be at least 1"),
            (self.rebroadcast_jitter >= 0,
             "rebroadcast_jitter must be non-negative"),
            (self.queue_capacity >= 0, "queue_capacity must be non-negative"),
            (self.horizon > 0, "horizon must be positive"),
            (self.min_route_lifetime >= 0,
             "min_route_lifetime must be non-negative"),
        )
        for valid, message in checks:
            if not valid:
                raise ConfigurationError(message)

    @property
    def net_traversal_time(self):
        """
        The time a RREQ/RREP round trip may take across the network.
        """
        return 2 * self.node_traversal_time * self.net_diameter

    @property
    def path_discovery_time(self):
        """
        How long a RREQ may still be travelling after it was sent.
        """
        return 2 * self.net_traversal_time

    def discovery_timeout(self, attempt):
        """
        How long the originator waits for a RREP to its ``attempt``-th RREQ
        (counting from 0) before retrying.
        """
        return self.net_traversal_time * 2 ** attempt + self.t_w
