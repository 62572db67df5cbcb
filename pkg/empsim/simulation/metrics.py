# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
Per-run counters and the metrics computed from them: the packet delivery
rate (PDR) and the normalized routing load (NRL).
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, fields
import math
from typing import List, Tuple

from empsim.routing.messages import MessageKind


class MetricsError(Exception):
    """
    The metrics of a run are undefined.
    """
    pass


@dataclass
class MetricsAccumulator(object):
    """
    :ivar control: Control transmissions by message kind. Every per-hop
        emission counts once.
    :ivar drops: Dropped data packets by reason.
    :ivar series: ``(time, generated, delivered, control, hello)`` samples
        taken by the periodic metrics tick.
    """
    generated: int = 0
    delivered: int = 0
    control: Counter = field(default_factory=Counter)
    drops: Counter = field(default_factory=Counter)
    series: List[Tuple[float, int, int, int, int]] = field(
        default_factory=list)

    @property
    def control_transmissions(self):
        return sum(self.control.values())

    def record_control(self, kind):
        self.control[kind] += 1

    def record_drop(self, reason):
        self.drops[reason] += 1

    def sample(self, now):
        self.series.append((
            now, self.generated, self.delivered, self.control_transmissions,
            self.control[MessageKind.HELLO]))


def compute_metrics(acc):
    """
    Returns ``(pdr, nrl)``: delivered over generated data packets, and
    control transmissions per delivered packet. The NRL of a run that
    delivered nothing is ``inf``.

    :raises MetricsError: If no packet was generated, or more packets were
        delivered than generated.
    """
    if acc.generated == 0:
        raise MetricsError(
            "The packet delivery rate is undefined: no packet was generated")
    if not 0 <= acc.delivered <= acc.generated:
        raise MetricsError(
            "{delivered} packets delivered out of {generated} "
            "generated".format(
                delivered=acc.delivered, generated=acc.generated))
    pdr = acc.delivered / acc.generated
    if acc.delivered == 0:
        nrl = math.inf
    else:
        nrl = acc.control_transmissions / acc.delivered
    return pdr, nrl


def format_value(value):
    """
    Formats a CSV cell so that identical runs give identical bytes.
    """
    if isinstance(value, bool):
        return 'on' if value else 'off'
    if isinstance(value, float):
        if math.isinf(value):
            return 'inf'
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class MetricsReport(object):
    """
    The outcome of one run: one row of ``raw_runs.csv``.

    The first fields identify the run; the audit counters after ``control_tx``
    are sanity checks and breakdowns.
    """
    variant: str
    hia: bool
    sigma: float
    v_max: float
    pairs: int
    nodes: int
    seed: int
    pdr: float
    nrl: float
    generated: int
    delivered: int
    control_tx: int
    rreq_tx: int = 0
    rrep_tx: int = 0
    rerr_tx: int = 0
    hello_tx: int = 0
    dropped_queue: int = 0
    dropped_no_route: int = 0
    dropped_loss: int = 0
    in_flight: int = 0
    risky_discards: int = 0
    completed_discoveries: int = 0
    failed_discoveries: int = 0
    kalman_resets: int = 0
    loop_detections: int = 0
    seq_order_violations: int = 0
    ret_audits: int = 0
    ret_mismatches: int = 0
    hello_floor_violations: int = 0
    trace_digest: str = ''
    series: Tuple[Tuple[float, int, int, int, int], ...] = ()

    @classmethod
    def csv_fields(cls):
        return [f.name for f in fields(cls) if f.name != 'series']

    def as_row(self):
        return {
            name: format_value(getattr(self, name))
            for name in self.csv_fields()
        }
