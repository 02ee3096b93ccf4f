"""Default model shapes, hardware profile, and sweep grids.

The three model entries share one 8B-class decoder backbone (32 layers,
hidden 4096, 32x128 heads, FFN ratio 3.5, 8e9 parameters) and differ only in
decode semantics, so architecture comparisons isolate the decoding scheme
rather than checkpoint size. The hardware entry is an A800-class vendor
profile (FP16 peak, HBM bandwidth, 80 GB) supplied as configuration data, not
a measured device.
"""

from __future__ import annotations

from .config import Architecture, HardwareSpec, ModelConfig

_BACKBONE = dict(n_l=32, n_h=32, n_d=128, d=4096, alpha=3.5, n_params=8.0e9)

AR_8B = ModelConfig(**_BACKBONE)
DLM_8B = ModelConfig(**_BACKBONE)
BLOCK_DIFFUSION_8B = ModelConfig(**_BACKBONE, block_size=32)

DEFAULT_MODELS = {
    Architecture.AR: AR_8B,
    Architecture.DLM: DLM_8B,
    Architecture.BLOCK_DIFFUSION: BLOCK_DIFFUSION_8B,
}

A800_CLASS = HardwareSpec(p_max=3.12e14, b_mem=2.0e12, capacity=8.0e10, bytes_per_element=2)

# generation-length and batch grids of the reference experiments
DEFAULT_GEN_LENS = (64, 128, 256, 512, 1024, 2048)
EXTENDED_GEN_LENS = (2048, 4096, 8192, 16384)
DEFAULT_BATCHES = (1, 2, 4, 8, 16, 20, 24, 32, 64)
DEFAULT_PROMPT_LENS = (40, 920)  # 0-shot and 5-shot prompt lengths
