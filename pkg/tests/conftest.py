from pathlib import Path

import pytest

from rooflm.config import HardwareSpec, ModelConfig, Workload


@pytest.fixture(scope="session")
def repo_root() -> Path:
    return Path(__file__).resolve().parent.parent


@pytest.fixture
def toy_hw() -> HardwareSpec:
    # ridge point 100 FLOPs/byte
    return HardwareSpec(p_max=1e12, b_mem=1e10, capacity=1e12)


@pytest.fixture
def tiny_cfg() -> ModelConfig:
    return ModelConfig(n_l=1, n_h=1, n_d=2, d=2, alpha=2.0, n_params=100.0)


@pytest.fixture
def toy_cfg() -> ModelConfig:
    return ModelConfig(n_l=2, n_h=2, n_d=4, d=8, alpha=4.0, n_params=1000.0)


@pytest.fixture
def toy_wl() -> Workload:
    return Workload(batch=1, prompt_len=0, gen_len=16)
