"""Closed-form FLOPs/MOPs accounting and arithmetic-intensity expressions.

Counting conventions (a matmul of shapes (s x k) @ (k x m) costs 2*s*k*m):

* per decode step, per layer, per sequence --
  QKV projections 6*s*d^2, output projection 2*s*d^2,
  attention scores + value gather 2*s*L_ctx*d each,
  two-matrix FFN d -> alpha*d -> d totalling 4*alpha*s*d^2;
* memory traffic in bytes --
  weights read once per pass (N elements), K/V traffic 2*d*L_ctx per layer
  per sequence, activations c_act*s*d per layer per sequence (c_act = 4).

The ``arint_*`` functions are a separate family: they evaluate the published
per-architecture intensity estimates verbatim, including their AR numerator
B*N and alpha^2 FFN term, which differ from the step-cost conventions above
by constant factors. The two families are reconciled at the level of scaling
exponents only (see the counting oracle), never constants.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import fsum

from .config import Architecture, HardwareSpec, ModelConfig, Workload
from .schedule import DecodeSchedule, StepDescriptor

# activation read/write traffic per active token, in units of d elements
ACTIVATION_TRAFFIC_ELEMS = 4


@dataclass(frozen=True)
class CostBreakdown:
    """Labeled FLOP and byte sub-costs of one or more forward passes."""

    projection_flops: float = 0.0
    attention_flops: float = 0.0
    ffn_flops: float = 0.0
    weights_read: float = 0.0     # bytes
    kv_read_write: float = 0.0    # bytes
    activation_io: float = 0.0    # bytes

    @property
    def flops(self) -> float:
        return fsum((self.projection_flops, self.attention_flops, self.ffn_flops))

    @property
    def mops(self) -> float:
        return fsum((self.weights_read, self.kv_read_write, self.activation_io))

    @property
    def components(self) -> dict[str, float]:
        return {
            "projection_flops": self.projection_flops,
            "attention_flops": self.attention_flops,
            "ffn_flops": self.ffn_flops,
            "weights_read": self.weights_read,
            "kv_read_write": self.kv_read_write,
            "activation_io": self.activation_io,
        }

    def __add__(self, other: "CostBreakdown") -> "CostBreakdown":
        return CostBreakdown(
            self.projection_flops + other.projection_flops,
            self.attention_flops + other.attention_flops,
            self.ffn_flops + other.ffn_flops,
            self.weights_read + other.weights_read,
            self.kv_read_write + other.kv_read_write,
            self.activation_io + other.activation_io,
        )


def _sum_costs(costs) -> CostBreakdown:
    costs = list(costs)
    if not costs:
        return CostBreakdown()
    return CostBreakdown(
        fsum(c.projection_flops for c in costs),
        fsum(c.attention_flops for c in costs),
        fsum(c.ffn_flops for c in costs),
        fsum(c.weights_read for c in costs),
        fsum(c.kv_read_write for c in costs),
        fsum(c.activation_io for c in costs),
    )


@dataclass(frozen=True)
class ScheduleCost:
    """Decode and prefill costs of a schedule, kept separate so prefill stays auditable."""

    decode: CostBreakdown
    prefill: CostBreakdown

    @property
    def combined(self) -> CostBreakdown:
        return self.decode + self.prefill


# ---------------------------------------------------------------------------
# Published arithmetic-intensity estimates (evaluated verbatim)

def arint_ar(cfg: ModelConfig, wl: Workload) -> float:
    """AR decode intensity: B*N / (N + B*n_l*n_h*n_d*L).

    Bounded above by B; at L = 0 it equals 1 exactly.
    """
    b, n = wl.batch, cfg.n_params
    return (b * n) / (n + b * cfg.n_l * cfg.n_h * cfg.n_d * wl.total_len)


def arint_dlm(cfg: ModelConfig, wl: Workload) -> float:
    """DLM denoising intensity: 2*B*n_l*(2*L*d^2 + alpha^2*L*d^2 + L^2*d) / (N + B*n_l*d*L)."""
    b, d, seq = wl.batch, cfg.d, wl.total_len
    numerator = 2.0 * b * cfg.n_l * (2.0 * seq * d**2 + cfg.alpha**2 * seq * d**2 + seq**2 * d)
    denominator = cfg.n_params + b * cfg.n_l * d * seq
    return numerator / denominator


def arint_block(cfg: ModelConfig, wl: Workload) -> float:
    """Block-diffusion intensity:
    2*B*n_l*(2*G*d^2 + alpha^2*G*d^2 + L*G*d) / (N + 2*B*n_l*d*L + B*n_l*d*G).
    """
    b, d, seq, g = wl.batch, cfg.d, wl.total_len, cfg.block_size
    numerator = 2.0 * b * cfg.n_l * (2.0 * g * d**2 + cfg.alpha**2 * g * d**2 + seq * g * d)
    denominator = cfg.n_params + 2.0 * b * cfg.n_l * d * seq + b * cfg.n_l * d * g
    return numerator / denominator


def published_arint(arch: Architecture, cfg: ModelConfig, wl: Workload) -> float:
    if arch is Architecture.AR:
        return arint_ar(cfg, wl)
    if arch is Architecture.DLM:
        return arint_dlm(cfg, wl)
    return arint_block(cfg, wl)


def published_step_flops(arch: Architecture, cfg: ModelConfig, wl: Workload) -> float:
    """Per-decode-step FLOPs under the published intensity numerators' conventions.

    Used only when reproducing figures from the published estimates, so the
    model-side and hardware-side terms share one convention.
    """
    b, d, seq = wl.batch, cfg.d, wl.total_len
    if arch is Architecture.AR:
        return float(b * cfg.n_params)
    if arch is Architecture.DLM:
        return 2.0 * b * cfg.n_l * (2.0 * seq * d**2 + cfg.alpha**2 * seq * d**2 + seq**2 * d)
    g = cfg.block_size
    return 2.0 * b * cfg.n_l * (2.0 * g * d**2 + cfg.alpha**2 * g * d**2 + seq * g * d)


def length_regime(cfg: ModelConfig, wl: Workload, margin: float = 10.0) -> str:
    """Dominant-term tag for regime narration: 'L<<d', 'L~d', or 'L>>d'."""
    seq = wl.total_len
    if seq * margin <= cfg.d:
        return "L<<d"
    if seq >= margin * cfg.d:
        return "L>>d"
    return "L~d"


# ---------------------------------------------------------------------------
# Step and schedule costs

def step_cost(cfg: ModelConfig, step: StepDescriptor, hw: HardwareSpec, batch: int = 1) -> CostBreakdown:
    """Closed-form cost of one forward pass described by ``step``.

    FLOPs = B*n_l*(8*s*d^2 + 4*s*L_ctx*d + 4*alpha*s*d^2)
    MOPs  = bytes_per_element*(N + B*n_l*2*d*L_ctx + c_act*B*n_l*s*d)
    """
    s, ctx = step.active_tokens, step.context_len
    d, n_l = cfg.d, cfg.n_l
    bpe = hw.bytes_per_element
    return CostBreakdown(
        projection_flops=batch * n_l * 8.0 * s * d**2,
        attention_flops=batch * n_l * 4.0 * s * ctx * d,
        ffn_flops=batch * n_l * 4.0 * cfg.alpha * s * d**2,
        weights_read=bpe * cfg.n_params,
        kv_read_write=bpe * batch * n_l * 2.0 * d * ctx,
        activation_io=bpe * ACTIVATION_TRAFFIC_ELEMS * batch * n_l * s * d,
    )


def total_cost(schedule: DecodeSchedule, cfg: ModelConfig, hw: HardwareSpec) -> ScheduleCost:
    """Component-wise sum of step costs; prefill accumulated separately."""
    batch = schedule.batch
    decode = _sum_costs(
        step_cost(cfg, s, hw, batch) for s in schedule.steps if not s.is_prefill
    )
    prefill = _sum_costs(
        step_cost(cfg, s, hw, batch) for s in schedule.steps if s.is_prefill
    )
    return ScheduleCost(decode=decode, prefill=prefill)
