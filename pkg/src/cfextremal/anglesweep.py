"""Support-function maximization over objective angles in [0, pi)."""

from __future__ import annotations

import math
from dataclasses import dataclass

_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SweepConfig:
    """Grid resolution and golden-section refinement width for angle sweeps."""

    grid: int = 64
    refine_width: float = 1e-8


def maximize_over_angles(fn, config=SweepConfig()):
    """Maximize fn over theta in [0, pi): coarse grid, then golden-section.

    The attainable sets here are conjugation-symmetric, so [0, pi) covers all
    directions.  Returns (best value, best angle) over every evaluation made.
    """
    n = max(2, config.grid)
    step = math.pi / n
    best_val = -math.inf
    best_th = 0.0
    for k in range(n):
        th = k * step
        val = fn(th)
        if val > best_val:
            best_val, best_th = val, th

    lo = best_th - step
    hi = best_th + step
    x1 = hi - _INV_GOLDEN * (hi - lo)
    x2 = lo + _INV_GOLDEN * (hi - lo)
    f1 = fn(x1)
    f2 = fn(x2)
    while hi - lo > config.refine_width:
        if f1 < f2:
            lo = x1
            x1, f1 = x2, f2
            x2 = lo + _INV_GOLDEN * (hi - lo)
            f2 = fn(x2)
        else:
            hi = x2
            x2, f2 = x1, f1
            x1 = hi - _INV_GOLDEN * (hi - lo)
            f1 = fn(x1)
        inner_val, inner_th = (f1, x1) if f1 >= f2 else (f2, x2)
        if inner_val > best_val:
            best_val, best_th = inner_val, inner_th
    return best_val, best_th
