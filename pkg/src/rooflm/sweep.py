"""Parameter-grid sweeps with CSV and SVG reporting.

A sweep evaluates every (architecture, acceleration, batch, prompt length,
generation length) tuple of its grid, keeping out-of-memory rows (flagged,
with the throughput fields left empty) so plots can show truncated series.
Grid points are independent pure evaluations; rows are always merged into
lexicographic order on the row key, so output is byte-identical across runs.

SVG plots are written by hand rather than through a plotting library: the
files contain nothing but geometry derived from the rows, which keeps
re-renders byte-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .config import (
    AccelerationConfig,
    Architecture,
    HardwareSpec,
    ModelConfig,
    NO_ACCELERATION,
    Workload,
    acceleration_from_dict,
    hardware_from_dict,
    model_config_from_dict,
    validate_model_config,
)
from .errors import ConfigValidationError, EmptyRowSet, KeyMismatch
from .memory import MemoryReport, estimate_memory
from .presets import (
    A800_CLASS,
    DEFAULT_BATCHES,
    DEFAULT_GEN_LENS,
    DEFAULT_MODELS,
    DEFAULT_PROMPT_LENS,
    EXTENDED_GEN_LENS,
)
from .throughput import IntensitySource, ThroughputEstimate, estimate_throughput

CSV_COLUMNS = (
    "arch",
    "accel",
    "batch",
    "prompt_len",
    "gen_len",
    "steps",
    "tpf",
    "flops_total",
    "mops_total",
    "arint",
    "regime",
    "attainable_flops_s",
    "flops_per_token",
    "throughput_tok_s",
    "mem_bytes",
    "oom",
)


@dataclass(frozen=True)
class SweepSpec:
    architectures: tuple[Architecture, ...] = (
        Architecture.AR,
        Architecture.BLOCK_DIFFUSION,
        Architecture.DLM,
    )
    gen_lens: tuple[int, ...] = DEFAULT_GEN_LENS
    batches: tuple[int, ...] = DEFAULT_BATCHES
    prompt_lens: tuple[int, ...] = DEFAULT_PROMPT_LENS
    accel: Mapping[Architecture, AccelerationConfig] = field(default_factory=dict)
    models: Mapping[Architecture, ModelConfig] = field(default_factory=dict)
    hardware: HardwareSpec = A800_CLASS

    def model_for(self, arch: Architecture) -> ModelConfig:
        return self.models.get(arch, DEFAULT_MODELS[arch])

    def accel_for(self, arch: Architecture) -> AccelerationConfig:
        return self.accel.get(arch, NO_ACCELERATION)


def validate_sweep_spec(spec: SweepSpec) -> SweepSpec:
    issues = []
    if not spec.architectures:
        issues.append(("empty_list", "architectures must be non-empty"))
    for name in ("gen_lens", "batches", "prompt_lens"):
        values = getattr(spec, name)
        if not values:
            issues.append(("empty_list", f"{name} must be non-empty"))
            continue
        if any(v <= 0 for v in values) and name != "prompt_lens":
            issues.append(("non_positive_field", f"{name} must be positive, got {values!r}"))
        if name == "prompt_lens" and any(v < 0 for v in values):
            issues.append(("non_positive_field", f"{name} must be >= 0, got {values!r}"))
        if any(b <= a for a, b in zip(values, values[1:])):
            issues.append(("not_increasing", f"{name} must be strictly increasing, got {values!r}"))
    if issues:
        raise ConfigValidationError(issues)
    for arch in spec.architectures:
        validate_model_config(spec.model_for(arch), arch)
    return spec


_SPEC_FIELDS = ("architectures", "gen_lens", "batches", "prompt_lens", "accel", "models", "hardware")


def sweep_spec_from_dict(data: Mapping, strict: bool = True, extended_lengths: bool = False) -> SweepSpec:
    """Build a SweepSpec from a JSON document; every field is optional.

    ``models`` maps architecture name to a model document (its ``arch`` field
    may be omitted and defaults to the key); ``accel`` maps architecture name
    to an acceleration document; ``hardware`` is an inline hardware document.
    """
    unknown = sorted(set(data) - set(_SPEC_FIELDS))
    if unknown and strict:
        raise ConfigValidationError(
            [("unknown_field", f"unknown field {k!r} in sweep spec") for k in unknown]
        )

    kwargs = {}
    if "architectures" in data:
        kwargs["architectures"] = tuple(Architecture(a) for a in data["architectures"])
    for name in ("gen_lens", "batches", "prompt_lens"):
        if name in data:
            kwargs[name] = tuple(data[name])
    if "models" in data:
        models = {}
        for arch_name, doc in data["models"].items():
            doc = dict(doc)
            doc.setdefault("arch", arch_name)
            arch, cfg = model_config_from_dict(doc, strict)
            models[arch] = cfg
        kwargs["models"] = models
    if "accel" in data:
        kwargs["accel"] = {
            Architecture(a): acceleration_from_dict(doc, strict) for a, doc in data["accel"].items()
        }
    if "hardware" in data:
        kwargs["hardware"] = hardware_from_dict(data["hardware"], strict)
    spec = SweepSpec(**kwargs)
    if extended_lengths and "gen_lens" not in data:
        spec = SweepSpec(**{**kwargs, "gen_lens": EXTENDED_GEN_LENS})
    return validate_sweep_spec(spec)


@dataclass(frozen=True)
class SweepRow:
    arch: Architecture
    accel_label: str
    batch: int
    prompt_len: int
    gen_len: int
    steps: int
    tpf: float
    flops_total: float
    mops_total: float
    memory: MemoryReport
    estimate: Optional[ThroughputEstimate]  # None for OOM rows

    @property
    def key(self) -> tuple:
        return (self.arch.value, self.accel_label, self.batch, self.prompt_len, self.gen_len)

    @property
    def throughput(self) -> Optional[float]:
        return self.estimate.tokens_per_second if self.estimate else None


def run_sweep(
    spec: SweepSpec,
    *,
    source: IntensitySource = IntensitySource.SCHEDULE,
    include_prefill: bool = False,
) -> tuple[SweepRow, ...]:
    validate_sweep_spec(spec)
    rows = []
    for arch in spec.architectures:
        cfg = spec.model_for(arch)
        accel = spec.accel_for(arch)
        for batch in spec.batches:
            for prompt_len in spec.prompt_lens:
                for gen_len in spec.gen_lens:
                    wl = Workload(batch=batch, prompt_len=prompt_len, gen_len=gen_len)
                    memory = estimate_memory(arch, cfg, spec.hardware, wl, accel)
                    est = estimate_throughput(
                        arch, cfg, spec.hardware, wl, accel,
                        source=source, include_prefill=include_prefill,
                    )
                    rows.append(
                        SweepRow(
                            arch=arch,
                            accel_label=accel.label,
                            batch=batch,
                            prompt_len=prompt_len,
                            gen_len=gen_len,
                            steps=est.decode_steps,
                            tpf=accel.tpf,
                            flops_total=est.flops_total,
                            mops_total=est.mops_total,
                            memory=memory,
                            estimate=None if memory.oom else est,
                        )
                    )
    return tuple(sorted(rows, key=lambda r: r.key))


@dataclass(frozen=True)
class SpeedupRow:
    arch: Architecture
    batch: int
    prompt_len: int
    gen_len: int
    tpf: float
    baseline_throughput: Optional[float]
    accel_throughput: Optional[float]

    @property
    def speedup(self) -> Optional[float]:
        if self.baseline_throughput and self.accel_throughput:
            return self.accel_throughput / self.baseline_throughput
        return None


def compare_acceleration(
    baseline_rows: Sequence[SweepRow], accel_rows: Sequence[SweepRow]
) -> tuple[SpeedupRow, ...]:
    """Per-key speedup of an accelerated sweep over its baseline.

    Rows are matched on (arch, batch, prompt_len, gen_len); the two sets must
    cover exactly the same keys.
    """

    def keyed(rows):
        out = {}
        for r in rows:
            k = (r.arch, r.batch, r.prompt_len, r.gen_len)
            if k in out:
                raise KeyMismatch(f"duplicate key {k!r}")
            out[k] = r
        return out

    base, acc = keyed(baseline_rows), keyed(accel_rows)
    if set(base) != set(acc):
        missing = sorted(set(base) ^ set(acc))
        raise KeyMismatch(f"baseline/accelerated key sets differ, e.g. {missing[:3]!r}")
    out = []
    for k in sorted(base, key=lambda k: (k[0].value, k[1], k[2], k[3])):
        b, a = base[k], acc[k]
        out.append(
            SpeedupRow(
                arch=b.arch,
                batch=b.batch,
                prompt_len=b.prompt_len,
                gen_len=b.gen_len,
                tpf=a.tpf,
                baseline_throughput=b.throughput,
                accel_throughput=a.throughput,
            )
        )
    return tuple(out)


# ---------------------------------------------------------------------------
# Emission

def _fmt(value: Optional[float]) -> str:
    if value is None:
        return ""
    return f"{value:.6g}"


def csv_text(rows: Sequence[SweepRow]) -> str:
    if not rows:
        raise EmptyRowSet("no sweep rows to emit")
    lines = [",".join(CSV_COLUMNS)]
    for r in rows:
        est = r.estimate
        lines.append(
            ",".join(
                (
                    r.arch.value,
                    r.accel_label,
                    str(r.batch),
                    str(r.prompt_len),
                    str(r.gen_len),
                    str(r.steps),
                    _fmt(r.tpf),
                    _fmt(r.flops_total),
                    _fmt(r.mops_total),
                    _fmt(est.arint if est else None),
                    est.regime.value if est else "",
                    _fmt(est.attainable if est else None),
                    _fmt(est.flops_per_token if est else None),
                    _fmt(est.tokens_per_second if est else None),
                    _fmt(r.memory.total_bytes),
                    "true" if r.memory.oom else "false",
                )
            )
        )
    return "\n".join(lines) + "\n"


def emit_csv(rows: Sequence[SweepRow], path: str | Path) -> Path:
    path = Path(path)
    path.write_text(csv_text(rows), encoding="utf-8", newline="\n")
    return path


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

_WIDTH, _HEIGHT = 720.0, 480.0
_ML, _MR, _MT, _MB = 64.0, 180.0, 40.0, 56.0


def _series_label(arch: Architecture, accel_label: str) -> str:
    if accel_label == "none":
        return arch.value
    return arch.value + "".join(f"+{part}" for part in accel_label.split("+"))


def svg_text(rows: Sequence[SweepRow], axis: str, title: str) -> str:
    """Log-x line plot of throughput against ``axis`` ('gen_len' or 'batch')."""
    if axis not in ("gen_len", "batch"):
        raise ValueError(f"axis must be 'gen_len' or 'batch', got {axis!r}")
    series: dict[tuple[str, str], list[tuple[int, float]]] = {}
    for r in rows:
        if r.throughput is None:
            continue  # truncated series at OOM points
        key = (r.arch.value, r.accel_label)
        series.setdefault(key, []).append((getattr(r, axis), r.throughput))
    if not series:
        raise EmptyRowSet("no plottable (non-OOM) rows")
    for pts in series.values():
        pts.sort()

    xs = sorted({x for pts in series.values() for x, _ in pts})
    ys = [y for pts in series.values() for _, y in pts]
    x_lo, x_hi = math.log10(xs[0]), math.log10(xs[-1])
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    y_lo = math.floor(math.log10(min(ys)))
    y_hi = math.ceil(math.log10(max(ys)))
    if y_hi == y_lo:
        y_hi = y_lo + 1

    plot_w = _WIDTH - _ML - _MR
    plot_h = _HEIGHT - _MT - _MB

    def sx(x: float) -> float:
        return _ML + plot_w * (math.log10(x) - x_lo) / (x_hi - x_lo)

    def sy(y: float) -> float:
        return _MT + plot_h * (1.0 - (math.log10(y) - y_lo) / (y_hi - y_lo))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH:.0f}" height="{_HEIGHT:.0f}" '
        f'viewBox="0 0 {_WIDTH:.0f} {_HEIGHT:.0f}">',
        f'<rect width="{_WIDTH:.0f}" height="{_HEIGHT:.0f}" fill="white"/>',
        f'<text x="{_ML:.2f}" y="24" font-family="sans-serif" font-size="15">{title}</text>',
        # axes
        f'<line x1="{_ML:.2f}" y1="{_MT + plot_h:.2f}" x2="{_ML + plot_w:.2f}" y2="{_MT + plot_h:.2f}" stroke="black"/>',
        f'<line x1="{_ML:.2f}" y1="{_MT:.2f}" x2="{_ML:.2f}" y2="{_MT + plot_h:.2f}" stroke="black"/>',
    ]
    for x in xs:
        px = sx(x)
        out.append(f'<line x1="{px:.2f}" y1="{_MT + plot_h:.2f}" x2="{px:.2f}" y2="{_MT + plot_h + 5:.2f}" stroke="black"/>')
        out.append(
            f'<text x="{px:.2f}" y="{_MT + plot_h + 20:.2f}" font-family="sans-serif" font-size="11" '
            f'text-anchor="middle">{x}</text>'
        )
    for exp in range(y_lo, y_hi + 1):
        py = sy(10.0**exp)
        out.append(f'<line x1="{_ML - 5:.2f}" y1="{py:.2f}" x2="{_ML:.2f}" y2="{py:.2f}" stroke="black"/>')
        out.append(
            f'<text x="{_ML - 9:.2f}" y="{py + 4:.2f}" font-family="sans-serif" font-size="11" '
            f'text-anchor="end">1e{exp}</text>'
        )
    out.append(
        f'<text x="{_ML + plot_w / 2:.2f}" y="{_HEIGHT - 14:.2f}" font-family="sans-serif" '
        f'font-size="13" text-anchor="middle">{axis}</text>'
    )
    out.append(
        f'<text x="18" y="{_MT + plot_h / 2:.2f}" font-family="sans-serif" font-size="13" '
        f'text-anchor="middle" transform="rotate(-90 18 {_MT + plot_h / 2:.2f})">tokens/s</text>'
    )

    for i, key in enumerate(sorted(series)):
        color = _PALETTE[i % len(_PALETTE)]
        pts = series[key]
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>')
        for x, y in pts:
            out.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3" fill="{color}"/>')
        ly = _MT + 16 + 18 * i
        lx = _ML + plot_w + 12
        out.append(f'<line x1="{lx:.2f}" y1="{ly - 4:.2f}" x2="{lx + 22:.2f}" y2="{ly - 4:.2f}" stroke="{color}" stroke-width="2"/>')
        label = _series_label(Architecture(key[0]), key[1])
        out.append(f'<text x="{lx + 28:.2f}" y="{ly:.2f}" font-family="sans-serif" font-size="12">{label}</text>')

    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(rows: Sequence[SweepRow], axis: str, path: str | Path, title: Optional[str] = None) -> Path:
    path = Path(path)
    path.write_text(svg_text(rows, axis, title or f"throughput vs {axis}"), encoding="utf-8", newline="\n")
    return path


def emit_report_set(rows: Sequence[SweepRow], out_dir: str | Path, spec: SweepSpec) -> list[Path]:
    """Write sweep.csv plus one SVG per (axis, prompt length) slice.

    Generation-length plots are sliced at the smallest batch; batch plots at
    generation length 256 when present (the reference batch-sweep setting),
    else the median grid value.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [emit_csv(rows, out_dir / "sweep.csv")]

    gen_batch = min(spec.batches)
    batch_gen = 256 if 256 in spec.gen_lens else spec.gen_lens[len(spec.gen_lens) // 2]
    for prompt_len in spec.prompt_lens:
        gen_rows = [r for r in rows if r.prompt_len == prompt_len and r.batch == gen_batch]
        written.append(
            emit_svg(
                gen_rows,
                "gen_len",
                out_dir / f"throughput_vs_gen_len_p{prompt_len}.svg",
                title=f"throughput vs generation length (prompt {prompt_len}, batch {gen_batch})",
            )
        )
        batch_rows = [r for r in rows if r.prompt_len == prompt_len and r.gen_len == batch_gen]
        written.append(
            emit_svg(
                batch_rows,
                "batch",
                out_dir / f"throughput_vs_batch_p{prompt_len}.svg",
                title=f"throughput vs batch size (prompt {prompt_len}, gen {batch_gen})",
            )
        )
    return written
