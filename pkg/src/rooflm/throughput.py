"""Throughput prediction: hardware-side FLOPs/s over model-side FLOPs/token.

    throughput = generated tokens / generation time
               = attainable FLOPs/s / FLOPs per token

Two intensity sources are supported. ``schedule`` (the default) derives both
the intensity and FLOPs/token from the same schedule costs, so the identity
above is internally consistent. ``published`` forces the per-architecture
closed-form intensity estimates and their step-FLOPs convention instead, for
reproducing reference figure shapes; the two conventions differ by constant
factors.

Throughput covers the decode phase only unless ``include_prefill`` is set:
prefill is reported separately and folded into memory and total-FLOPs views.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .analytic import published_arint, published_step_flops, total_cost
from .config import (
    AccelerationConfig,
    Architecture,
    HardwareSpec,
    ModelConfig,
    NO_ACCELERATION,
    Workload,
)
from .errors import InsufficientPoints, RegimeViolation
from .roofline import Regime, RooflinePoint, attainable_performance
from .schedule import build_schedule


class IntensitySource(str, Enum):
    SCHEDULE = "schedule"
    PUBLISHED = "published"


@dataclass(frozen=True)
class ThroughputEstimate:
    flops_per_token: float
    attainable: float
    tokens_per_second: float
    generated_tokens: int     # B * L_g
    regime: Regime
    source: IntensitySource
    arint: float
    ridge: float
    decode_steps: int
    flops_total: float        # decode-phase schedule FLOPs
    mops_total: float         # decode-phase schedule bytes
    roofline: RooflinePoint


def flops_per_token(total_flops: float, wl: Workload) -> float:
    """Average decode FLOPs per generated token: total / (B * L_g)."""
    return total_flops / (wl.batch * wl.gen_len)


def estimate_throughput(
    arch: Architecture,
    cfg: ModelConfig,
    hw: HardwareSpec,
    wl: Workload,
    accel: AccelerationConfig = NO_ACCELERATION,
    *,
    source: IntensitySource = IntensitySource.SCHEDULE,
    include_prefill: bool = False,
) -> ThroughputEstimate:
    """Schedule the workload, cost it, place it on the roofline, divide.

    ``include_prefill`` folds the prompt pass into the reported totals and,
    for the schedule source, into the intensity and FLOPs/token as well; the
    published estimates carry no prefill convention and are decode-only.
    """
    schedule = build_schedule(arch, cfg, wl, accel)
    cost = total_cost(schedule, cfg, hw)
    agg = cost.combined if include_prefill else cost.decode
    steps = schedule.decode_step_count

    if source is IntensitySource.PUBLISHED:
        arint = published_arint(arch, cfg, wl)
        fpt = flops_per_token(steps * published_step_flops(arch, cfg, wl), wl)
    else:
        arint = agg.flops / agg.mops
        fpt = flops_per_token(agg.flops, wl)

    point = attainable_performance(hw, arint)
    return ThroughputEstimate(
        flops_per_token=fpt,
        attainable=point.attainable,
        tokens_per_second=point.attainable / fpt,
        generated_tokens=wl.batch * wl.gen_len,
        regime=point.regime,
        source=source,
        arint=arint,
        ridge=point.ridge,
        decode_steps=steps,
        flops_total=agg.flops,
        mops_total=agg.mops,
        roofline=point,
    )


def asymptotic_trend(
    arch: Architecture,
    cfg: ModelConfig,
    hw: HardwareSpec,
    wl: Workload,
    variable: str,
    points: Sequence[int],
    *,
    accel: AccelerationConfig = NO_ACCELERATION,
    expected_regime: Optional[Regime] = None,
    length_regime: Optional[str] = None,
    margin: float = 10.0,
    source: IntensitySource = IntensitySource.SCHEDULE,
) -> float:
    """Least-squares slope of log(throughput) against log(``variable``).

    ``variable`` is one of ``L`` (generation length), ``B`` (batch size), or
    ``G`` (block size); every evaluated point must sit in the requested
    roofline regime and, when ``length_regime`` is given ('L<<d' or 'L>>d'),
    respect it with a ``margin``-fold separation.
    """
    if len(points) < 3 or any(b <= a for a, b in zip(points, points[1:])):
        raise InsufficientPoints(f"need >= 3 strictly increasing points, got {list(points)!r}")
    if variable not in ("L", "B", "G"):
        raise ValueError(f"variable must be 'L', 'B', or 'G', got {variable!r}")

    throughputs = []
    for value in points:
        if variable == "L":
            case_wl, case_cfg = replace(wl, gen_len=int(value)), cfg
        elif variable == "B":
            case_wl, case_cfg = replace(wl, batch=int(value)), cfg
        else:
            case_wl, case_cfg = wl, replace(cfg, block_size=int(value))
        seq = case_wl.total_len
        if length_regime == "L<<d" and seq * margin > cfg.d:
            raise RegimeViolation(f"L={seq} is not <= d/{margin:g} (d={cfg.d})")
        if length_regime == "L>>d" and seq < margin * cfg.d:
            raise RegimeViolation(f"L={seq} is not >= {margin:g}*d (d={cfg.d})")
        est = estimate_throughput(arch, case_cfg, hw, case_wl, accel, source=source)
        if expected_regime is not None and est.regime is not expected_regime:
            raise RegimeViolation(
                f"point {variable}={value} is {est.regime.value}, expected {expected_regime.value}"
            )
        throughputs.append(est.tokens_per_second)

    slope, _ = np.polyfit(np.log(np.asarray(points, dtype=float)), np.log(throughputs), 1)
    return float(slope)


def crossing_batch(
    arch: Architecture,
    cfg: ModelConfig,
    hw: HardwareSpec,
    wl: Workload,
    accel: AccelerationConfig = NO_ACCELERATION,
    *,
    source: IntensitySource = IntensitySource.SCHEDULE,
    b_max: int = 1 << 20,
) -> Optional[int]:
    """Smallest batch size whose roofline placement is compute-bound.

    Intensity is non-decreasing in B for all three architectures, so a binary
    search is valid. Returns None when even ``b_max`` stays memory-bound
    (the intensity saturates below the ridge).
    """

    def regime_at(b: int) -> Regime:
        return estimate_throughput(arch, cfg, hw, replace(wl, batch=b), accel, source=source).regime

    if regime_at(b_max) is Regime.MEMORY_BOUND:
        return None
    lo, hi = 1, b_max
    if regime_at(lo) is Regime.COMPUTE_BOUND:
        return lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if regime_at(mid) is Regime.COMPUTE_BOUND:
            hi = mid
        else:
            lo = mid
    return hi
