#!/usr/bin/env python3
"""Speedup study for parallel decoding and dual cache over the batch grid.

Compares each accelerated variant against its own baseline at generation
length 256 for both prompt lengths, printing per-batch speedups and writing
the underlying rows to CSV. Parallel decoding is modeled as an average
tokens-per-forward of 4; dual cache uses the default 32-token window.
"""

import argparse
from pathlib import Path

from rooflm.config import AccelerationConfig, Architecture
from rooflm.sweep import SweepSpec, compare_acceleration, emit_csv, run_sweep

VARIANTS = {
    "dlm_parallel": (Architecture.DLM, AccelerationConfig(tpf=4.0)),
    "dlm_dual_cache": (Architecture.DLM, AccelerationConfig(dual_cache=True)),
    "block_diffusion_parallel": (Architecture.BLOCK_DIFFUSION, AccelerationConfig(tpf=4.0)),
}


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out-dir", default="results/acceleration")
    args = parser.parse_args()
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    for name, (arch, accel) in VARIANTS.items():
        spec = SweepSpec(architectures=(arch,), gen_lens=(256,))
        baseline = run_sweep(spec)
        accelerated = run_sweep(SweepSpec(architectures=(arch,), gen_lens=(256,), accel={arch: accel}))
        emit_csv(baseline, out_dir / f"{name}_baseline.csv")
        emit_csv(accelerated, out_dir / f"{name}_accel.csv")

        print(f"== {name} (tpf={accel.tpf:g}, dual_cache={accel.dual_cache}) ==")
        for row in compare_acceleration(baseline, accelerated):
            speed = f"{row.speedup:.3f}x" if row.speedup else "OOM"
            print(
                f"  batch={row.batch:<3d} prompt={row.prompt_len:<4d} "
                f"gen={row.gen_len}: {speed}"
            )


if __name__ == "__main__":
    main()
