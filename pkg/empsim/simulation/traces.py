# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
Event and filter traces of a run.

The event trace hashes every executed event so two runs can be compared by
digest. When given a directory, both traces are also written as CSV files.
"""
from __future__ import annotations

import csv
import hashlib
import os

EVENT_TRACE_FIELDS = ('time', 'sequence', 'kind', 'node', 'detail')
FILTER_TRACE_FIELDS = (
    'time', 'node', 'true_x', 'true_y', 'measured_x', 'measured_y',
    'estimate_x', 'estimate_y', 'rms_error',
)


class RunTrace(object):
    """
    Collects the traces of one run.

    :param directory: Where ``<label>-events.csv`` and ``<label>-filter.csv``
        are written. Without it only the digest is computed.
    """
    def __init__(self, directory=None, label='run'):
        self._hash = hashlib.sha256()
        self._files = []
        self._events = None
        self._filter = None
        if directory is not None:
            os.makedirs(directory, exist_ok=True)
            self._events = self._open(
                os.path.join(directory, label + '-events.csv'),
                EVENT_TRACE_FIELDS)
            self._filter = self._open(
                os.path.join(directory, label + '-filter.csv'),
                FILTER_TRACE_FIELDS)

    def _open(self, path, header):
        handle = open(path, 'w', newline='')
        self._files.append(handle)
        writer = csv.writer(handle)
        writer.writerow(header)
        return writer

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()

    def close(self):
        for handle in self._files:
            handle.close()
        self._files = []

    @property
    def digest(self):
        return self._hash.hexdigest()

    def _add(self, row):
        self._hash.update(','.join(row).encode('utf-8'))
        self._hash.update(b'\n')
        if self._events is not None:
            self._events.writerow(row)

    def event(self, event):
        node = '' if event.node is None else str(event.node)
        self._add((repr(event.time), str(event.sequence), event.kind, node,
                   getattr(event.handler, '__name__', '')))

    def protocol_event(self, now, node, name, message):
        self._add((repr(now), '', name, str(node), str(message)))

    def filter_row(self, now, node, true_position, measurement, estimate):
        if self._filter is None:
            return
        measured = measurement.measured_position
        self._filter.writerow((
            repr(now), node, repr(true_position.x), repr(true_position.y),
            repr(measured.x), repr(measured.y),
            repr(estimate.position.x), repr(estimate.position.y),
            repr(estimate.rms_error),
        ))
