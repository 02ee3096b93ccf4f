"""Decode-schedule construction for the three architecture families.

A schedule is an ordered list of forward-pass descriptors that fully
determines cost:

* AR decodes one token per step (``tpf`` of them under parallel decoding),
  attending over a growing KV-cached context.
* DLM re-encodes the whole sequence of length L = prompt + generation on
  every denoising step; the step count equals the generation length by
  default, divided by ``tpf`` under parallel decoding. Dual cache shrinks the
  active window to a fixed block, with periodic full-sequence refresh passes.
* Block diffusion walks blocks of size G left to right, denoising each block
  with G full-block steps while reading the finalized prefix from cache.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .config import (
    AccelerationConfig,
    Architecture,
    ModelConfig,
    NO_ACCELERATION,
    Workload,
    validate_acceleration,
    validate_model_config,
    validate_workload,
)


class StepDescriptor(NamedTuple):
    active_tokens: int      # tokens written/updated this pass, per sequence
    context_len: int        # tokens attended over, per sequence
    cached_kv_len: int      # tokens whose K/V come from cache
    is_prefill: bool
    finalized_tokens: int   # tokens newly finalized this pass, per sequence


@dataclass(frozen=True)
class DecodeSchedule:
    arch: Architecture
    batch: int
    steps: tuple[StepDescriptor, ...]

    @property
    def decode_steps(self) -> tuple[StepDescriptor, ...]:
        return tuple(s for s in self.steps if not s.is_prefill)

    @property
    def prefill_steps(self) -> tuple[StepDescriptor, ...]:
        return tuple(s for s in self.steps if s.is_prefill)

    @property
    def decode_step_count(self) -> int:
        return sum(1 for s in self.steps if not s.is_prefill)

    @property
    def finalized_total(self) -> int:
        return sum(s.finalized_tokens for s in self.steps if not s.is_prefill)

    @property
    def max_decode_active(self) -> int:
        return max(s.active_tokens for s in self.steps if not s.is_prefill)


# Finalization quotas use a small tolerance so rational tpf values such as 3.1
# land on their intended integers (310/3.1 evaluates to 100.00000000000001).
_QUOTA_EPS = 1e-6


def _quota(i: int, tpf: float, total: int) -> int:
    return min(total, int(math.floor(i * tpf + _QUOTA_EPS)))


def _step_count(tokens: int, tpf: float) -> int:
    """Smallest k with quota(k) >= tokens; equals ceil(tokens / tpf)."""
    if tpf == 1.0:
        return tokens
    k = max(1, int(math.ceil(tokens / tpf - 1e-9)))
    while _quota(k, tpf, tokens) < tokens:
        k += 1
    while k > 1 and _quota(k - 1, tpf, tokens) >= tokens:
        k -= 1
    return k


def _finalized_sizes(tokens: int, steps: int, tpf: float) -> list[int]:
    """Per-step finalized-token counts over ``steps`` passes, summing to ``tokens``.

    With tpf = 1 this is [1] * tokens; a partial trailing quota is truncated.
    When ``steps`` exceeds what the quota needs (a partial final block ran its
    nominal step count), trailing steps finalize zero tokens.
    """
    sizes = []
    prev = 0
    for i in range(1, steps + 1):
        cur = _quota(i, tpf, tokens)
        sizes.append(cur - prev)
        prev = cur
    sizes[-1] += tokens - prev  # guard: quotas always reach the total
    return sizes


def _ar_steps(wl: Workload, tpf: float) -> list[StepDescriptor]:
    steps = _step_count(wl.gen_len, tpf)
    out = []
    done = 0
    for size in _finalized_sizes(wl.gen_len, steps, tpf):
        done += size
        ctx = wl.prompt_len + done
        out.append(StepDescriptor(size, ctx, ctx - size, False, size))
    return out


def _dlm_steps(wl: Workload, accel: AccelerationConfig) -> list[StepDescriptor]:
    seq = wl.total_len
    steps = _step_count(wl.gen_len, accel.tpf)
    sizes = _finalized_sizes(wl.gen_len, steps, accel.tpf)
    if not accel.dual_cache:
        return [StepDescriptor(seq, seq, 0, False, size) for size in sizes]
    window = min(accel.dual_cache_block, seq)
    out = []
    for j, size in enumerate(sizes):
        if j % accel.cache_refresh_interval == 0:
            # full re-encode; builds the prefix+suffix cache for the next cycle
            out.append(StepDescriptor(seq, seq, 0, False, 0))
        out.append(StepDescriptor(window, seq, seq - window, False, size))
    return out


def _block_steps(wl: Workload, block_size: int, tpf: float) -> list[StepDescriptor]:
    out = []
    prefix = wl.prompt_len
    remaining = wl.gen_len
    steps_per_block = _step_count(block_size, tpf)
    while remaining > 0:
        tokens = min(block_size, remaining)
        ctx = prefix + tokens
        sizes = _finalized_sizes(tokens, steps_per_block, tpf)
        for size in sizes:
            out.append(StepDescriptor(tokens, ctx, prefix, False, size))
        prefix += tokens
        remaining -= tokens
    return out


def build_schedule(
    arch: Architecture,
    cfg: ModelConfig,
    wl: Workload,
    accel: AccelerationConfig = NO_ACCELERATION,
) -> DecodeSchedule:
    """Deterministic forward-pass schedule for one generation request."""
    validate_model_config(cfg, arch)
    validate_workload(wl)
    validate_acceleration(accel)

    steps: list[StepDescriptor] = []
    if arch is Architecture.AR:
        if wl.prompt_len > 0:
            steps.append(StepDescriptor(wl.prompt_len, wl.prompt_len, 0, True, 0))
        steps.extend(_ar_steps(wl, accel.tpf))
    elif arch is Architecture.DLM:
        # the prompt is re-encoded on every denoising pass; no separate prefill
        steps.extend(_dlm_steps(wl, accel))
    else:
        if wl.prompt_len > 0:
            steps.append(StepDescriptor(wl.prompt_len, wl.prompt_len, 0, True, 0))
        steps.extend(_block_steps(wl, cfg.block_size, accel.tpf))
    return DecodeSchedule(arch=arch, batch=wl.batch, steps=tuple(steps))
