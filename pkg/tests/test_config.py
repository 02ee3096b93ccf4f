import json

import pytest

from rooflm.config import (
    AccelerationConfig,
    Architecture,
    HardwareSpec,
    ModelConfig,
    Workload,
    acceleration_from_dict,
    architecture_from_name,
    derive_param_count,
    hardware_from_dict,
    load_model_file,
    model_config_from_dict,
    validate_acceleration,
    validate_hardware,
    validate_model_config,
    validate_workload,
    workload_from_dict,
)
from rooflm.errors import ConfigValidationError


def toy_config(**overrides):
    base = dict(n_l=2, n_h=2, n_d=4, d=8, alpha=4.0, n_params=1000.0)
    base.update(overrides)
    return ModelConfig(**base)


class TestModelValidation:
    def test_valid_config_returned_unchanged(self):
        cfg = toy_config()
        assert validate_model_config(cfg, Architecture.AR) is cfg

    def test_dimension_mismatch(self):
        with pytest.raises(ConfigValidationError) as exc:
            validate_model_config(toy_config(d=9), Architecture.AR)
        assert "dimension_mismatch" in exc.value.codes()

    def test_missing_block_size(self):
        with pytest.raises(ConfigValidationError) as exc:
            validate_model_config(toy_config(), Architecture.BLOCK_DIFFUSION)
        assert "missing_block_size" in exc.value.codes()

    def test_block_size_ignored_for_other_architectures(self):
        cfg = toy_config(block_size=4)
        validate_model_config(cfg, Architecture.AR)
        validate_model_config(cfg, Architecture.DLM)

    def test_errors_aggregate(self):
        with pytest.raises(ConfigValidationError) as exc:
            validate_model_config(toy_config(n_l=0, alpha=-1.0, d=9), Architecture.BLOCK_DIFFUSION)
        codes = exc.value.codes()
        assert "dimension_mismatch" in codes
        assert "missing_block_size" in codes
        assert codes.count("non_positive_field") >= 2

    def test_non_positive_n(self):
        with pytest.raises(ConfigValidationError) as exc:
            validate_model_config(toy_config(n_params=0.0), Architecture.AR)
        assert "non_positive_field" in exc.value.codes()


class TestDeriveParamCount:
    def test_spec_toy(self):
        assert derive_param_count(toy_config(n_l=2, d=8, alpha=4.0)) == 1536

    def test_smallest(self):
        assert derive_param_count(ModelConfig(1, 1, 1, 1, 1.0, 1.0)) == 6

    def test_8b_class(self):
        cfg = ModelConfig(32, 32, 128, 4096, 3.5, 1.0)
        assert derive_param_count(cfg) == pytest.approx(5.91e9, rel=0.01)


class TestHardwareWorkloadAccel:
    def test_hardware_rejects_bad_width(self):
        with pytest.raises(ConfigValidationError):
            validate_hardware(HardwareSpec(1e12, 1e10, 1e9, bytes_per_element=3))

    def test_hardware_rejects_non_positive(self):
        with pytest.raises(ConfigValidationError):
            validate_hardware(HardwareSpec(0, 1e10, 1e9))

    def test_workload_rejects_zero_gen(self):
        with pytest.raises(ConfigValidationError):
            validate_workload(Workload(1, 0, 0))

    def test_workload_total_len(self):
        assert Workload(2, 40, 64).total_len == 104

    def test_accel_rejects_tpf_below_one(self):
        with pytest.raises(ConfigValidationError):
            validate_acceleration(AccelerationConfig(tpf=0.5))

    def test_accel_labels(self):
        assert AccelerationConfig().label == "none"
        assert AccelerationConfig(tpf=2.0).label == "parallel"
        assert AccelerationConfig(dual_cache=True).label == "dual-cache"
        assert AccelerationConfig(tpf=2.0, dual_cache=True).label == "parallel+dual-cache"


class TestIngestion:
    def test_model_roundtrip(self):
        arch, cfg = model_config_from_dict(
            {"arch": "BlockDiffusion", "n_l": 2, "n_h": 2, "n_d": 4, "d": 8, "alpha": 4, "N": 1000, "G": 4}
        )
        assert arch is Architecture.BLOCK_DIFFUSION
        assert cfg.block_size == 4
        assert cfg.n_params == 1000.0

    def test_missing_n_is_derived(self):
        _, cfg = model_config_from_dict({"arch": "AR", "n_l": 2, "n_h": 2, "n_d": 4, "d": 8, "alpha": 4})
        assert cfg.n_params == 1536

    def test_unknown_field_rejected_in_strict_mode(self):
        doc = {"arch": "AR", "n_l": 2, "n_h": 2, "n_d": 4, "d": 8, "alpha": 4, "layers": 2}
        with pytest.raises(ConfigValidationError) as exc:
            model_config_from_dict(doc)
        assert "unknown_field" in exc.value.codes()

    def test_unknown_field_warned_in_lenient_mode(self):
        doc = {"arch": "AR", "n_l": 2, "n_h": 2, "n_d": 4, "d": 8, "alpha": 4, "layers": 2}
        with pytest.warns(UserWarning, match="layers"):
            model_config_from_dict(doc, strict=False)

    def test_missing_required_field(self):
        with pytest.raises(ConfigValidationError) as exc:
            model_config_from_dict({"arch": "AR", "n_l": 2})
        assert "missing_field" in exc.value.codes()

    def test_unknown_architecture(self):
        with pytest.raises(ConfigValidationError):
            architecture_from_name("Mamba")

    def test_workload_with_embedded_accel(self):
        wl, accel = workload_from_dict(
            {"batch": 2, "prompt_len": 40, "gen_len": 64, "accel": {"tpf": 3.1, "dual_cache": True}}
        )
        assert wl.batch == 2
        assert accel.tpf == 3.1
        assert accel.dual_cache

    def test_hardware_defaults_width(self):
        hw = hardware_from_dict({"p_max": 1e12, "b_mem": 1e10, "capacity": 1e9})
        assert hw.bytes_per_element == 2

    def test_accel_unknown_field(self):
        with pytest.raises(ConfigValidationError):
            acceleration_from_dict({"tpf": 2, "window": 8})

    def test_load_model_file(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps({"arch": "DLM", "n_l": 1, "n_h": 1, "n_d": 2, "d": 2, "alpha": 2, "N": 10}))
        arch, cfg = load_model_file(path)
        assert arch is Architecture.DLM
        assert cfg.d == 2


class TestShippedConfigs:
    def test_shipped_files_parse(self, repo_root):
        for name in ("ar_8b", "dlm_8b", "block_diffusion_8b"):
            arch, cfg = load_model_file(repo_root / "configs" / "models" / f"{name}.json")
            validate_model_config(cfg, arch)
            assert cfg.d == cfg.n_h * cfg.n_d

    def test_shipped_hardware_matches_preset(self, repo_root):
        from rooflm.presets import A800_CLASS

        hw = hardware_from_dict(json.loads((repo_root / "configs" / "hardware_a800_class.json").read_text()))
        assert hw == A800_CLASS
