"""Model, hardware, and workload configuration types: validation and JSON ingestion.

JSON documents use exactly the short field names of the underlying notation
(``n_l``, ``n_h``, ``n_d``, ``d``, ``alpha``, ``N``, ``G`` for models;
``p_max``, ``b_mem``, ``capacity``, ``bytes_per_element`` for hardware;
``batch``, ``prompt_len``, ``gen_len`` for workloads). Unknown fields are
rejected in strict mode and warned about in lenient mode.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Any, Mapping, Optional

from .errors import ConfigValidationError


class Architecture(str, Enum):
    AR = "AR"
    DLM = "DLM"
    BLOCK_DIFFUSION = "BlockDiffusion"


def architecture_from_name(name: str) -> Architecture:
    for arch in Architecture:
        if arch.value == name:
            return arch
    known = ", ".join(a.value for a in Architecture)
    raise ConfigValidationError([("unknown_architecture", f"unknown architecture {name!r} (expected one of: {known})")])


@dataclass(frozen=True)
class ModelConfig:
    """Transformer shape shared by all three architectures.

    ``block_size`` (JSON key ``G``) is only meaningful for block diffusion and
    is ignored elsewhere. ``n_params`` (JSON key ``N``) is the total parameter
    count used for weight-traffic accounting; when absent from a JSON document
    it is backfilled with :func:`derive_param_count`.
    """

    n_l: int          # transformer layers
    n_h: int          # attention heads per layer
    n_d: int          # dimension per head
    d: int            # hidden size, must equal n_h * n_d
    alpha: float      # FFN expansion ratio
    n_params: float   # total parameter count
    block_size: Optional[int] = None


@dataclass(frozen=True)
class HardwareSpec:
    p_max: float                 # peak floating-point rate, FLOPs/s
    b_mem: float                 # peak sustainable memory bandwidth, bytes/s
    capacity: float              # device memory, bytes
    bytes_per_element: int = 2   # storage width of weights/activations


@dataclass(frozen=True)
class Workload:
    batch: int
    prompt_len: int
    gen_len: int

    @property
    def total_len(self) -> int:
        return self.prompt_len + self.gen_len


@dataclass(frozen=True)
class AccelerationConfig:
    """Decode-acceleration knobs.

    ``tpf`` is the average number of tokens finalized per forward step
    (1 = no parallel decoding). Dual cache restricts diffusion steps to a
    small active window of ``dual_cache_block`` tokens, re-encoding the full
    sequence once every ``cache_refresh_interval`` window steps.
    """

    tpf: float = 1.0
    dual_cache: bool = False
    dual_cache_block: int = 32
    cache_refresh_interval: int = 256

    @property
    def label(self) -> str:
        parts = []
        if self.tpf > 1.0:
            parts.append("parallel")
        if self.dual_cache:
            parts.append("dual-cache")
        return "+".join(parts) if parts else "none"


NO_ACCELERATION = AccelerationConfig()


def derive_param_count(cfg: ModelConfig) -> float:
    """Backbone parameter count: attention (Q,K,V,O) plus a two-matrix FFN.

    n_l * (4*d^2 + 2*alpha*d^2); embeddings and norms excluded.
    """
    return cfg.n_l * (4.0 * cfg.d**2 + 2.0 * cfg.alpha * cfg.d**2)


def validate_model_config(cfg: ModelConfig, arch: Architecture) -> ModelConfig:
    """Return ``cfg`` unchanged if every invariant holds, else raise the full issue list."""
    issues = []
    for name in ("n_l", "n_h", "n_d", "d"):
        value = getattr(cfg, name)
        if not isinstance(value, int) or value < 1:
            issues.append(("non_positive_field", f"{name} must be an integer >= 1, got {value!r}"))
    if cfg.alpha <= 0:
        issues.append(("non_positive_field", f"alpha must be > 0, got {cfg.alpha!r}"))
    if cfg.n_params <= 0:
        issues.append(("non_positive_field", f"N must be > 0, got {cfg.n_params!r}"))
    if isinstance(cfg.n_h, int) and isinstance(cfg.n_d, int) and cfg.d != cfg.n_h * cfg.n_d:
        issues.append(("dimension_mismatch", f"d must equal n_h*n_d: {cfg.d} != {cfg.n_h}*{cfg.n_d}"))
    if arch is Architecture.BLOCK_DIFFUSION:
        if cfg.block_size is None:
            issues.append(("missing_block_size", "block diffusion requires a block size G >= 1"))
        elif not isinstance(cfg.block_size, int) or cfg.block_size < 1:
            issues.append(("non_positive_field", f"G must be an integer >= 1, got {cfg.block_size!r}"))
    if issues:
        raise ConfigValidationError(issues)
    return cfg


_VALID_WIDTHS = (1, 2, 4, 8)


def validate_hardware(hw: HardwareSpec) -> HardwareSpec:
    issues = []
    for name in ("p_max", "b_mem", "capacity"):
        if getattr(hw, name) <= 0:
            issues.append(("non_positive_field", f"{name} must be > 0, got {getattr(hw, name)!r}"))
    if hw.bytes_per_element not in _VALID_WIDTHS:
        issues.append(("non_positive_field", f"bytes_per_element must be one of {_VALID_WIDTHS}, got {hw.bytes_per_element!r}"))
    if issues:
        raise ConfigValidationError(issues)
    return hw


def validate_workload(wl: Workload) -> Workload:
    issues = []
    if not isinstance(wl.batch, int) or wl.batch < 1:
        issues.append(("non_positive_field", f"batch must be an integer >= 1, got {wl.batch!r}"))
    if not isinstance(wl.prompt_len, int) or wl.prompt_len < 0:
        issues.append(("non_positive_field", f"prompt_len must be an integer >= 0, got {wl.prompt_len!r}"))
    if not isinstance(wl.gen_len, int) or wl.gen_len < 1:
        issues.append(("non_positive_field", f"gen_len must be an integer >= 1, got {wl.gen_len!r}"))
    if issues:
        raise ConfigValidationError(issues)
    return wl


def validate_acceleration(accel: AccelerationConfig) -> AccelerationConfig:
    issues = []
    if accel.tpf < 1.0:
        issues.append(("non_positive_field", f"tpf must be >= 1, got {accel.tpf!r}"))
    if accel.dual_cache and (not isinstance(accel.dual_cache_block, int) or accel.dual_cache_block < 1):
        issues.append(("non_positive_field", f"dual_cache_block must be an integer >= 1, got {accel.dual_cache_block!r}"))
    if not isinstance(accel.cache_refresh_interval, int) or accel.cache_refresh_interval < 1:
        issues.append(("non_positive_field", f"cache_refresh_interval must be an integer >= 1, got {accel.cache_refresh_interval!r}"))
    if issues:
        raise ConfigValidationError(issues)
    return accel


# ---------------------------------------------------------------------------
# JSON ingestion

def _check_fields(data: Mapping[str, Any], allowed: tuple[str, ...], what: str, strict: bool) -> None:
    unknown = sorted(set(data) - set(allowed))
    if not unknown:
        return
    if strict:
        raise ConfigValidationError(
            [("unknown_field", f"unknown field {k!r} in {what} config (allowed: {', '.join(allowed)})") for k in unknown]
        )
    for k in unknown:
        warnings.warn(f"ignoring unknown field {k!r} in {what} config", stacklevel=3)


def _require(data: Mapping[str, Any], keys: tuple[str, ...], what: str) -> None:
    missing = [k for k in keys if k not in data]
    if missing:
        raise ConfigValidationError(
            [("missing_field", f"missing required field {k!r} in {what} config") for k in missing]
        )


_MODEL_FIELDS = ("arch", "n_l", "n_h", "n_d", "d", "alpha", "N", "G")


def model_config_from_dict(data: Mapping[str, Any], strict: bool = True) -> tuple[Architecture, ModelConfig]:
    _check_fields(data, _MODEL_FIELDS, "model", strict)
    _require(data, ("arch", "n_l", "n_h", "n_d", "d", "alpha"), "model")
    arch = architecture_from_name(data["arch"])
    cfg = ModelConfig(
        n_l=data["n_l"],
        n_h=data["n_h"],
        n_d=data["n_d"],
        d=data["d"],
        alpha=float(data["alpha"]),
        n_params=float(data["N"]) if "N" in data else 0.0,
        block_size=data.get("G"),
    )
    if "N" not in data:
        cfg = replace(cfg, n_params=derive_param_count(cfg))
    return arch, validate_model_config(cfg, arch)


_HARDWARE_FIELDS = ("p_max", "b_mem", "capacity", "bytes_per_element")


def hardware_from_dict(data: Mapping[str, Any], strict: bool = True) -> HardwareSpec:
    _check_fields(data, _HARDWARE_FIELDS, "hardware", strict)
    _require(data, ("p_max", "b_mem", "capacity"), "hardware")
    hw = HardwareSpec(
        p_max=float(data["p_max"]),
        b_mem=float(data["b_mem"]),
        capacity=float(data["capacity"]),
        bytes_per_element=data.get("bytes_per_element", 2),
    )
    return validate_hardware(hw)


_WORKLOAD_FIELDS = ("batch", "prompt_len", "gen_len", "accel")
_ACCEL_FIELDS = ("tpf", "dual_cache", "dual_cache_block", "cache_refresh_interval")


def acceleration_from_dict(data: Mapping[str, Any], strict: bool = True) -> AccelerationConfig:
    _check_fields(data, _ACCEL_FIELDS, "acceleration", strict)
    defaults = AccelerationConfig()
    accel = AccelerationConfig(
        tpf=float(data.get("tpf", 1.0)),
        dual_cache=bool(data.get("dual_cache", False)),
        dual_cache_block=data.get("dual_cache_block", defaults.dual_cache_block),
        cache_refresh_interval=data.get("cache_refresh_interval", defaults.cache_refresh_interval),
    )
    return validate_acceleration(accel)


def workload_from_dict(data: Mapping[str, Any], strict: bool = True) -> tuple[Workload, AccelerationConfig]:
    _check_fields(data, _WORKLOAD_FIELDS, "workload", strict)
    _require(data, ("batch", "prompt_len", "gen_len"), "workload")
    wl = Workload(batch=data["batch"], prompt_len=data["prompt_len"], gen_len=data["gen_len"])
    accel = acceleration_from_dict(data["accel"], strict) if "accel" in data else NO_ACCELERATION
    return validate_workload(wl), accel


def load_json(path: str | Path) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def load_model_file(path: str | Path, strict: bool = True) -> tuple[Architecture, ModelConfig]:
    return model_config_from_dict(load_json(path), strict)


def load_hardware_file(path: str | Path, strict: bool = True) -> HardwareSpec:
    return hardware_from_dict(load_json(path), strict)


def load_workload_file(path: str | Path, strict: bool = True) -> tuple[Workload, AccelerationConfig]:
    return workload_from_dict(load_json(path), strict)
