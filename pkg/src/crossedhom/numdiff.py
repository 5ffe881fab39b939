"""Finite-difference derivatives used on the group side.

Every group-side derivative goes through these two helpers: a central
difference (step 1e-5) with one Richardson level, and a mixed second
difference (step 1e-3, rounding grows like eps/h^2) with one Richardson level.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

FIRST_STEP = 1e-5
MIXED_STEP = 1e-3


def central_diff(f: Callable[[float], np.ndarray], x0: float = 0.0, h: float = FIRST_STEP) -> np.ndarray:
    def d(step):
        return (np.asarray(f(x0 + step), dtype=float) - np.asarray(f(x0 - step), dtype=float)) / (2 * step)

    coarse, fine = d(h), d(h / 2)
    return (4 * fine - coarse) / 3


def mixed_second(f: Callable[[float, float], np.ndarray], h: float = MIXED_STEP) -> np.ndarray:
    """d^2/dt1 dt2 of f at (0, 0)."""

    def d(step):
        vals = [np.asarray(f(s1 * step, s2 * step), dtype=float) for s1, s2 in ((1, 1), (1, -1), (-1, 1), (-1, -1))]
        return (vals[0] - vals[1] - vals[2] + vals[3]) / (4 * step * step)

    coarse, fine = d(h), d(h / 2)
    return (4 * fine - coarse) / 3
