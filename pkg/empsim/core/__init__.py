# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.

"""Geometry, mobility, the Kalman filter and link duration prediction."""
