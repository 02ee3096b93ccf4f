"""Operator-by-operator cost enumeration, independent of the closed forms.

Every forward pass is expanded into its individual operators (projections,
attention score/value matmuls, FFN halves, cache traffic, weight and
activation movement) and summed. This module never calls into the closed-form
cost paths; it exists to arbitrate them. ``oracle_check`` sweeps one variable,
fits log-log scaling exponents from both sources, and verifies that the
exponents agree and that the closed-form/oracle ratio stays constant -- a
constant ratio is a convention difference, a drifting one is a structural bug.

Excluded operators: softmax, layernorm, embedding lookup (sub-1% of FLOPs at
the modeled scales, and absent from the scaling claims being checked).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from math import fsum
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from . import analytic
from .analytic import ACTIVATION_TRAFFIC_ELEMS, CostBreakdown, ScheduleCost
from .config import (
    AccelerationConfig,
    Architecture,
    HardwareSpec,
    ModelConfig,
    NO_ACCELERATION,
    Workload,
)
from .errors import ConstantDrift, ExponentMismatch
from .roofline import attainable_performance
from .schedule import DecodeSchedule, StepDescriptor, build_schedule

EXCLUDED_OPERATORS = ("softmax", "layernorm", "embedding_lookup")

OP_NAMES = (
    "qkv_proj",
    "attn_scores",
    "attn_value",
    "out_proj",
    "ffn_up",
    "ffn_down",
    "kv_cache_read",
    "kv_cache_write",
    "weight_read",
    "activation_io",
)


class OperatorCost(NamedTuple):
    op_name: str
    flops: float
    bytes: float


def count_forward(cfg: ModelConfig, step: StepDescriptor, hw: HardwareSpec, batch: int = 1) -> list[OperatorCost]:
    """Enumerate one forward pass, one entry per operator kind.

    Each entry is totaled across layers and the batch. Weights are read once
    per pass regardless of batch; everything else is per sequence per layer.
    """
    s, ctx, cached = step.active_tokens, step.context_len, step.cached_kv_len
    d, n_l, a = cfg.d, cfg.n_l, cfg.alpha
    bpe = hw.bytes_per_element
    bl = batch * n_l
    return [
        OperatorCost("qkv_proj", bl * 6.0 * s * d**2, 0.0),
        OperatorCost("attn_scores", bl * 2.0 * s * ctx * d, 0.0),
        OperatorCost("attn_value", bl * 2.0 * s * ctx * d, 0.0),
        OperatorCost("out_proj", bl * 2.0 * s * d**2, 0.0),
        OperatorCost("ffn_up", bl * 2.0 * s * d * (a * d), 0.0),
        OperatorCost("ffn_down", bl * 2.0 * s * (a * d) * d, 0.0),
        OperatorCost("kv_cache_read", 0.0, bpe * bl * 2.0 * d * cached),
        OperatorCost("kv_cache_write", 0.0, bpe * bl * 2.0 * d * s),
        OperatorCost("weight_read", 0.0, bpe * cfg.n_params),
        OperatorCost("activation_io", 0.0, bpe * ACTIVATION_TRAFFIC_ELEMS * bl * s * d),
    ]


_FLOP_COMPONENT = {
    "qkv_proj": "projection_flops",
    "out_proj": "projection_flops",
    "attn_scores": "attention_flops",
    "attn_value": "attention_flops",
    "ffn_up": "ffn_flops",
    "ffn_down": "ffn_flops",
}
_BYTE_COMPONENT = {
    "kv_cache_read": "kv_read_write",
    "kv_cache_write": "kv_read_write",
    "weight_read": "weights_read",
    "activation_io": "activation_io",
}


def _accumulate(steps, cfg, hw, batch) -> CostBreakdown:
    parts: dict[str, list[float]] = {name: [] for name in CostBreakdown().components}
    for step in steps:
        for op in count_forward(cfg, step, hw, batch):
            if op.flops:
                parts[_FLOP_COMPONENT[op.op_name]].append(op.flops)
            if op.bytes:
                parts[_BYTE_COMPONENT[op.op_name]].append(op.bytes)
    return CostBreakdown(**{name: fsum(vals) for name, vals in parts.items()})


def count_schedule(schedule: DecodeSchedule, cfg: ModelConfig, hw: HardwareSpec) -> ScheduleCost:
    """Sum of count_forward over all steps, decode and prefill separated."""
    batch = schedule.batch
    return ScheduleCost(
        decode=_accumulate((s for s in schedule.steps if not s.is_prefill), cfg, hw, batch),
        prefill=_accumulate((s for s in schedule.steps if s.is_prefill), cfg, hw, batch),
    )


# ---------------------------------------------------------------------------
# Discrepancy checks

METRICS = ("flops_total", "mops_total", "flops_per_token", "arint", "throughput")

EXPONENT_TOLERANCE = 0.05
RATIO_TOLERANCE = 0.10

# toy-scale bounds keep enumeration instant
_MAX_NL, _MAX_D, _MAX_L = 8, 128, 4096


class PointSample(NamedTuple):
    value: int
    analytic: float
    oracle: float

    @property
    def ratio(self) -> float:
        return self.analytic / self.oracle


@dataclass(frozen=True)
class TrendCheck:
    metric: str
    variable: str
    points: tuple[PointSample, ...]
    exponent_analytic: float
    exponent_oracle: float
    ratio_drift: float
    verdict: str  # PASS | ExponentMismatch | ConstantDrift

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"


@dataclass(frozen=True)
class OracleReport:
    arch: Architecture
    checks: tuple[TrendCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def verdict(self) -> str:
        if self.passed:
            return "PASS"
        bad = {c.verdict for c in self.checks if not c.passed}
        return "ExponentMismatch" if "ExponentMismatch" in bad else "ConstantDrift"

    def raise_for_failures(self) -> None:
        for check in self.checks:
            if check.verdict == "ExponentMismatch":
                raise ExponentMismatch(
                    f"{self.arch.value} {check.metric} vs {check.variable}: "
                    f"analytic exponent {check.exponent_analytic:.3f} != oracle {check.exponent_oracle:.3f}"
                )
        for check in self.checks:
            if check.verdict == "ConstantDrift":
                raise ConstantDrift(
                    f"{self.arch.value} {check.metric} vs {check.variable}: "
                    f"analytic/oracle ratio drifts by {check.ratio_drift:.1%}"
                )

    def to_text(self) -> str:
        lines = [
            f"operator-count oracle report: arch={self.arch.value}",
            f"excluded operators (sub-1% at modeled scales): {', '.join(EXCLUDED_OPERATORS)}",
            f"tolerances: exponent agreement +/-{EXPONENT_TOLERANCE}, ratio constancy +/-{RATIO_TOLERANCE:.0%}",
            "",
        ]
        for c in self.checks:
            lines.append(f"check {c.metric} vs {c.variable}  [{c.verdict}]")
            for p in c.points:
                lines.append(
                    f"  {c.variable}={p.value:<8d} analytic={p.analytic:<14.6g} "
                    f"oracle={p.oracle:<14.6g} ratio={p.ratio:.6g}"
                )
            lines.append(
                f"  exponent analytic={c.exponent_analytic:.4f} oracle={c.exponent_oracle:.4f} "
                f"drift={c.ratio_drift:.2%}"
            )
        lines.append("")
        lines.append(f"overall: {self.verdict}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        rows = ["variable,point,analytic,oracle,ratio,exponent_analytic,exponent_oracle,verdict"]
        for c in self.checks:
            tag = f"{c.metric}/{c.variable}"
            for p in c.points:
                rows.append(
                    f"{tag},{p.value},{p.analytic:.6g},{p.oracle:.6g},{p.ratio:.6g},"
                    f"{c.exponent_analytic:.6g},{c.exponent_oracle:.6g},{c.verdict}"
                )
        return "\n".join(rows) + "\n"


def _fit_exponent(xs: Sequence[float], ys: Sequence[float]) -> float:
    slope, _ = np.polyfit(np.log(np.asarray(xs, dtype=float)), np.log(ys), 1)
    return float(slope)


def _metric_pairs(
    arch: Architecture,
    cfg: ModelConfig,
    wl: Workload,
    accel: AccelerationConfig,
    hw: HardwareSpec,
    arint_fn: Callable[[Architecture, ModelConfig, Workload], float],
) -> dict[str, tuple[float, float]]:
    """(closed-form value, enumerated value) per metric for one grid point.

    The analytic side uses the closed-form schedule totals for FLOPs/MOPs and
    the published estimates for intensity / FLOPs-per-token / throughput; the
    oracle side uses only its own enumeration plus the roofline rule.
    """
    schedule = build_schedule(arch, cfg, wl, accel)
    ana = analytic.total_cost(schedule, cfg, hw).decode
    orc = count_schedule(schedule, cfg, hw).decode
    generated = wl.batch * wl.gen_len
    steps = schedule.decode_step_count

    ana_fpt = steps * analytic.published_step_flops(arch, cfg, wl) / generated
    orc_fpt = orc.flops / generated
    ana_arint = arint_fn(arch, cfg, wl)
    orc_arint = orc.flops / orc.mops
    ana_thr = attainable_performance(hw, ana_arint).attainable / ana_fpt
    orc_thr = attainable_performance(hw, orc_arint).attainable / orc_fpt
    return {
        "flops_total": (ana.flops, orc.flops),
        "mops_total": (ana.mops, orc.mops),
        "flops_per_token": (ana_fpt, orc_fpt),
        "arint": (ana_arint, orc_arint),
        "throughput": (ana_thr, orc_thr),
    }


_DEFAULT_VARIABLES = {
    Architecture.AR: ("B", "L"),
    Architecture.DLM: ("L", "B"),
    Architecture.BLOCK_DIFFUSION: ("G", "L", "B"),
}


def _grid(variable: str, cfg: ModelConfig, wl: Workload) -> list[int]:
    if variable == "L":
        return [wl.gen_len, 2 * wl.gen_len, 4 * wl.gen_len]
    if variable == "B":
        return [wl.batch, 2 * wl.batch, 4 * wl.batch, 8 * wl.batch]
    return [cfg.block_size, 2 * cfg.block_size, 4 * cfg.block_size, 8 * cfg.block_size]


def oracle_check(
    arch: Architecture,
    cfg: ModelConfig,
    wl: Workload,
    accel: AccelerationConfig = NO_ACCELERATION,
    hw: HardwareSpec = HardwareSpec(p_max=1e12, b_mem=1e10, capacity=1e18),
    *,
    variables: Optional[Sequence[str]] = None,
    arint_fn: Callable[[Architecture, ModelConfig, Workload], float] = None,
) -> OracleReport:
    """Sweep each variable from the given base point and compare both sources.

    ``arint_fn`` is injectable so a deliberately broken intensity formula can
    be shown to trip ExponentMismatch; it defaults to the published estimates.
    """
    if cfg.n_l > _MAX_NL or cfg.d > _MAX_D:
        raise ValueError(f"oracle_check is toy-scale only (n_l <= {_MAX_NL}, d <= {_MAX_D})")
    if arint_fn is None:
        arint_fn = analytic.published_arint

    checks = []
    for variable in variables or _DEFAULT_VARIABLES[arch]:
        grid = _grid(variable, cfg, wl)
        if variable == "L" and wl.prompt_len + grid[-1] > _MAX_L:
            raise ValueError(f"oracle_check is toy-scale only (L <= {_MAX_L})")
        samples: dict[str, list[PointSample]] = {metric: [] for metric in METRICS}
        for value in grid:
            case_cfg, case_wl = cfg, wl
            if variable == "L":
                case_wl = replace(wl, gen_len=value)
            elif variable == "B":
                case_wl = replace(wl, batch=value)
            else:
                case_cfg = replace(cfg, block_size=value)
            for metric, (ana, orc) in _metric_pairs(arch, case_cfg, case_wl, accel, hw, arint_fn).items():
                samples[metric].append(PointSample(value, ana, orc))

        for metric in METRICS:
            pts = samples[metric]
            exp_a = _fit_exponent([p.value for p in pts], [p.analytic for p in pts])
            exp_o = _fit_exponent([p.value for p in pts], [p.oracle for p in pts])
            ratios = [p.ratio for p in pts]
            mean = fsum(ratios) / len(ratios)
            drift = max(abs(r - mean) for r in ratios) / mean
            if abs(exp_a - exp_o) > EXPONENT_TOLERANCE:
                verdict = "ExponentMismatch"
            elif drift > RATIO_TOLERANCE:
                verdict = "ConstantDrift"
            else:
                verdict = "PASS"
            checks.append(TrendCheck(metric, variable, tuple(pts), exp_a, exp_o, drift, verdict))
    return OracleReport(arch=arch, checks=tuple(checks))


# ---------------------------------------------------------------------------
# Built-in battery over the toy grid

TOY_HARDWARE = HardwareSpec(p_max=1e12, b_mem=1e10, capacity=1e18)


def default_battery() -> list[tuple[str, OracleReport]]:
    """Cross-check battery over n_l in {1,2,4} x d in {8,32,128}, L up to 4096.

    Each claim is probed in the regime where it holds: AR batch scaling with a
    weight-dominated denominator at short L (the length sweep needs L << d and
    so runs at d = 128 only), DLM length scaling at L >> d (reachable within
    the L cap only for d <= 32), block-size scaling at a long fixed sequence.
    alpha = 1 keeps both conventions' crossover points aligned so
    constant-factor differences stay constant factors.
    """
    reports = []
    for n_l in (1, 2, 4):
        for d in (8, 32, 128):
            base = dict(n_l=n_l, n_h=1, n_d=d, d=d, alpha=1.0)
            toy_n = float(n_l * d * d)

            ar_cfg = ModelConfig(**base, n_params=600.0 * toy_n)
            ar_wl = Workload(batch=1, prompt_len=0, gen_len=8)
            ar_vars = ("B", "L") if d == 128 else ("B",)
            reports.append(
                (f"AR n_l={n_l} d={d}", oracle_check(Architecture.AR, ar_cfg, ar_wl, variables=ar_vars))
            )

            if d <= 32:
                dlm_cfg = ModelConfig(**base, n_params=toy_n)
                dlm_wl = Workload(batch=1, prompt_len=0, gen_len=1024)
                reports.append(
                    (f"DLM n_l={n_l} d={d}", oracle_check(Architecture.DLM, dlm_cfg, dlm_wl, variables=("L", "B")))
                )

            bd_cfg = ModelConfig(**base, n_params=toy_n, block_size=4)
            reports.append(
                (f"BlockDiffusion n_l={n_l} d={d} (G)",
                 oracle_check(Architecture.BLOCK_DIFFUSION, bd_cfg,
                              Workload(batch=1, prompt_len=0, gen_len=2048), variables=("G",)))
            )
            bd_vars = ("L", "B") if d <= 32 else ("B",)
            reports.append(
                (f"BlockDiffusion n_l={n_l} d={d} ({','.join(bd_vars)})",
                 oracle_check(Architecture.BLOCK_DIFFUSION, bd_cfg,
                              Workload(batch=1, prompt_len=0, gen_len=1024), variables=bd_vars))
            )
    return reports
