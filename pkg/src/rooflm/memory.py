"""Device-memory footprint estimates and out-of-memory detection.

weights     bytes_per_element * N
kv cache    bytes_per_element * 2 * n_l * d * L * B   (AR and block diffusion;
            DLM holds K/V only when dual cache is on, sized to the full L)
activations bytes_per_element * c_mem * n_l * s_max * d * B, with s_max the
            widest decode forward pass (the whole sequence for a vanilla DLM,
            one block for block diffusion, the tokens-per-step for AR)

Prefill passes are excluded from s_max: prompt encoding is transient and
chunkable, while the decode loop sets the steady-state high-water mark.
``c_mem`` absorbs attention-score materialization and framework buffers; the
fixed ``overhead_bytes`` knob absorbs allocator slack and runtime state.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import (
    AccelerationConfig,
    Architecture,
    HardwareSpec,
    ModelConfig,
    NO_ACCELERATION,
    Workload,
)
from .schedule import build_schedule

ACTIVATION_SCALE_DEFAULT = 16
OVERHEAD_BYTES_DEFAULT = 2e9


@dataclass(frozen=True)
class MemoryReport:
    weights_bytes: float
    kv_cache_bytes: float
    activation_bytes: float
    overhead_bytes: float
    total_bytes: float
    capacity_bytes: float
    oom: bool

    @property
    def headroom_bytes(self) -> float:
        return self.capacity_bytes - self.total_bytes


def estimate_memory(
    arch: Architecture,
    cfg: ModelConfig,
    hw: HardwareSpec,
    wl: Workload,
    accel: AccelerationConfig = NO_ACCELERATION,
    *,
    c_mem: float = ACTIVATION_SCALE_DEFAULT,
    overhead_bytes: float = OVERHEAD_BYTES_DEFAULT,
) -> MemoryReport:
    bpe = hw.bytes_per_element
    weights = bpe * cfg.n_params

    holds_kv = arch is not Architecture.DLM or accel.dual_cache
    kv = bpe * 2.0 * cfg.n_l * cfg.d * wl.total_len * wl.batch if holds_kv else 0.0

    schedule = build_schedule(arch, cfg, wl, accel)
    s_max = schedule.max_decode_active
    activations = bpe * c_mem * cfg.n_l * s_max * cfg.d * wl.batch

    total = weights + kv + activations + overhead_bytes
    return MemoryReport(
        weights_bytes=weights,
        kv_cache_bytes=kv,
        activation_bytes=activations,
        overhead_bytes=overhead_bytes,
        total_bytes=total,
        capacity_bytes=hw.capacity,
        oom=total > hw.capacity,
    )
