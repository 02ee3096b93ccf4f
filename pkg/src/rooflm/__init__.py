"""Analytical decode-throughput model for AR, diffusion, and block-diffusion LMs."""

from .analytic import (
    CostBreakdown,
    ScheduleCost,
    arint_ar,
    arint_block,
    arint_dlm,
    length_regime,
    published_arint,
    step_cost,
    total_cost,
)
from .config import (
    AccelerationConfig,
    Architecture,
    HardwareSpec,
    ModelConfig,
    NO_ACCELERATION,
    Workload,
    derive_param_count,
    validate_model_config,
)
from .memory import MemoryReport, estimate_memory
from .oracle import OperatorCost, count_forward, count_schedule, oracle_check
from .roofline import Regime, RooflinePoint, attainable_performance, ridge_point
from .schedule import DecodeSchedule, StepDescriptor, build_schedule
from .sweep import SweepRow, SweepSpec, compare_acceleration, emit_csv, emit_svg, run_sweep
from .throughput import (
    IntensitySource,
    ThroughputEstimate,
    asymptotic_trend,
    crossing_batch,
    estimate_throughput,
    flops_per_token,
)

__all__ = [
    "AccelerationConfig",
    "Architecture",
    "CostBreakdown",
    "DecodeSchedule",
    "HardwareSpec",
    "IntensitySource",
    "MemoryReport",
    "ModelConfig",
    "NO_ACCELERATION",
    "OperatorCost",
    "Regime",
    "RooflinePoint",
    "ScheduleCost",
    "StepDescriptor",
    "SweepRow",
    "SweepSpec",
    "ThroughputEstimate",
    "Workload",
    "arint_ar",
    "arint_block",
    "arint_dlm",
    "asymptotic_trend",
    "attainable_performance",
    "build_schedule",
    "compare_acceleration",
    "count_forward",
    "count_schedule",
    "crossing_batch",
    "derive_param_count",
    "emit_csv",
    "emit_svg",
    "estimate_memory",
    "estimate_throughput",
    "flops_per_token",
    "length_regime",
    "oracle_check",
    "published_arint",
    "ridge_point",
    "run_sweep",
    "step_cost",
    "total_cost",
    "validate_model_config",
]
