#!/usr/bin/env python3
"""Run the default architecture-comparison grid and write CSV + SVG reports.

Covers generation lengths 64..2048 and batch sizes 1..64 at the two reference
prompt lengths (40 and 920 tokens) for AR, DLM, and block diffusion on the
A800-class profile. Pass --extended to sweep the long-generation grid instead.
"""

import argparse
from collections import defaultdict

from rooflm.config import Architecture
from rooflm.presets import EXTENDED_GEN_LENS
from rooflm.sweep import SweepSpec, emit_report_set, run_sweep


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out-dir", default="results/default_sweep")
    parser.add_argument("--extended", action="store_true", help="long-generation length grid")
    args = parser.parse_args()

    spec = SweepSpec(gen_lens=EXTENDED_GEN_LENS) if args.extended else SweepSpec()
    rows = run_sweep(spec)
    written = emit_report_set(rows, args.out_dir, spec)
    for path in written:
        print(path)

    by_point = defaultdict(dict)
    for r in rows:
        by_point[(r.batch, r.prompt_len, r.gen_len)][r.arch] = r.throughput
    ordered = sum(
        1
        for thr in by_point.values()
        if None not in thr.values()
        and thr[Architecture.AR] >= thr[Architecture.BLOCK_DIFFUSION] >= thr[Architecture.DLM]
    )
    non_oom = sum(1 for thr in by_point.values() if None not in thr.values())
    print(f"grid points: {len(by_point)} ({non_oom} with all three architectures in memory)")
    print(f"AR >= BlockDiffusion >= DLM at {ordered}/{non_oom} fully-resident points")


if __name__ == "__main__":
    main()
