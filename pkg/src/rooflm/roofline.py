"""Roofline placement: ridge point, attainable performance, regime classification."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .config import HardwareSpec
from .errors import NonPositiveIntensity


class Regime(str, Enum):
    MEMORY_BOUND = "MemoryBound"
    COMPUTE_BOUND = "ComputeBound"


@dataclass(frozen=True)
class RooflinePoint:
    arint: float        # FLOPs/byte
    attainable: float   # FLOPs/s
    regime: Regime
    ridge: float        # FLOPs/byte


def ridge_point(hw: HardwareSpec) -> float:
    """Intensity at which the bandwidth slope meets the compute ceiling: p_max / b_mem."""
    return hw.p_max / hw.b_mem


def attainable_performance(hw: HardwareSpec, arint: float) -> RooflinePoint:
    """min(p_max, b_mem * arint), memory-bound strictly below the ridge.

    A workload sitting exactly on the ridge attains the ceiling and is
    classified compute-bound.
    """
    if arint <= 0:
        raise NonPositiveIntensity(f"arithmetic intensity must be > 0, got {arint!r}")
    ridge = ridge_point(hw)
    if arint < ridge:
        return RooflinePoint(arint, hw.b_mem * arint, Regime.MEMORY_BOUND, ridge)
    return RooflinePoint(arint, hw.p_max, Regime.COMPUTE_BOUND, ridge)
