import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rooflm.config import AccelerationConfig, Architecture, ModelConfig, Workload
from rooflm.schedule import StepDescriptor, build_schedule


def cfg_for(arch, block_size=2):
    g = block_size if arch is Architecture.BLOCK_DIFFUSION else None
    return ModelConfig(n_l=1, n_h=1, n_d=2, d=2, alpha=2.0, n_params=100.0, block_size=g)


small_arch = st.sampled_from(list(Architecture))
small_wl = st.builds(
    Workload,
    batch=st.integers(1, 8),
    prompt_len=st.integers(0, 24),
    gen_len=st.integers(1, 48),
)
small_accel = st.builds(
    AccelerationConfig,
    tpf=st.sampled_from([1.0, 1.5, 2.0, 3.0, 3.1, 4.0]),
    dual_cache=st.booleans(),
    dual_cache_block=st.integers(1, 8),
    cache_refresh_interval=st.integers(1, 6),
)


class TestSpecExamples:
    def test_ar_with_prompt(self):
        sched = build_schedule(Architecture.AR, cfg_for(Architecture.AR), Workload(1, 2, 3))
        assert [s.is_prefill for s in sched.steps] == [True, False, False, False]
        assert sched.steps[0] == StepDescriptor(2, 2, 0, True, 0)
        assert [(s.active_tokens, s.context_len) for s in sched.decode_steps] == [(1, 3), (1, 4), (1, 5)]
        assert [s.cached_kv_len for s in sched.decode_steps] == [2, 3, 4]

    def test_dlm_full_sequence_steps(self):
        sched = build_schedule(Architecture.DLM, cfg_for(Architecture.DLM), Workload(1, 0, 3))
        assert len(sched.steps) == 3
        assert all(s == StepDescriptor(3, 3, 0, False, 1) for s in sched.steps)

    def test_dlm_parallel_step_count(self):
        sched = build_schedule(
            Architecture.DLM, cfg_for(Architecture.DLM), Workload(1, 0, 256), AccelerationConfig(tpf=4.0)
        )
        assert sched.decode_step_count == 64

    def test_block_diffusion_blocks(self):
        sched = build_schedule(
            Architecture.BLOCK_DIFFUSION, cfg_for(Architecture.BLOCK_DIFFUSION), Workload(1, 0, 4)
        )
        assert [(s.active_tokens, s.context_len, s.cached_kv_len) for s in sched.steps] == [
            (2, 2, 0),
            (2, 2, 0),
            (2, 4, 2),
            (2, 4, 2),
        ]


class TestDefaults:
    @pytest.mark.parametrize("gen_len", [1, 7, 64])
    def test_ar_default_step_count(self, gen_len):
        sched = build_schedule(Architecture.AR, cfg_for(Architecture.AR), Workload(1, 0, gen_len))
        assert sched.decode_step_count == gen_len
        assert all(s.active_tokens == 1 for s in sched.decode_steps)

    @pytest.mark.parametrize("gen_len", [1, 7, 64])
    def test_dlm_default_step_count(self, gen_len):
        sched = build_schedule(Architecture.DLM, cfg_for(Architecture.DLM), Workload(1, 5, gen_len))
        assert sched.decode_step_count == gen_len
        seq = 5 + gen_len
        assert all(s.active_tokens == seq and s.cached_kv_len == 0 for s in sched.decode_steps)

    @pytest.mark.parametrize("gen_len,block,expected", [(4, 2, 4), (5, 2, 6), (64, 32, 64), (10, 4, 12)])
    def test_block_default_step_count(self, gen_len, block, expected):
        # a partial trailing block still runs its nominal step count
        sched = build_schedule(
            Architecture.BLOCK_DIFFUSION, cfg_for(Architecture.BLOCK_DIFFUSION, block), Workload(1, 0, gen_len)
        )
        assert sched.decode_step_count == math.ceil(gen_len / block) * block
        assert sched.decode_step_count == expected

    def test_no_prefill_without_prompt(self):
        for arch in Architecture:
            sched = build_schedule(arch, cfg_for(arch), Workload(1, 0, 4))
            assert not sched.prefill_steps

    def test_dlm_never_has_prefill(self):
        sched = build_schedule(Architecture.DLM, cfg_for(Architecture.DLM), Workload(1, 10, 4))
        assert not sched.prefill_steps


class TestDualCache:
    def test_window_and_refresh(self):
        accel = AccelerationConfig(dual_cache=True, dual_cache_block=4, cache_refresh_interval=3)
        sched = build_schedule(Architecture.DLM, cfg_for(Architecture.DLM), Workload(1, 0, 6), accel)
        kinds = [(s.active_tokens, s.cached_kv_len) for s in sched.steps]
        # refresh pass opens each 3-step cycle, then window steps
        assert kinds == [(6, 0), (4, 2), (4, 2), (4, 2), (6, 0), (4, 2), (4, 2), (4, 2)]
        assert sched.finalized_total == 6

    def test_window_clamped_to_sequence(self):
        accel = AccelerationConfig(dual_cache=True, dual_cache_block=32, cache_refresh_interval=100)
        sched = build_schedule(Architecture.DLM, cfg_for(Architecture.DLM), Workload(1, 0, 4), accel)
        assert all(s.active_tokens <= 4 for s in sched.steps)


class TestTpfRounding:
    @pytest.mark.parametrize("gen_len,tpf,steps", [(310, 3.1, 100), (31, 3.1, 10), (64, 3.1, 21), (10, 1.5, 7)])
    def test_step_counts(self, gen_len, tpf, steps):
        sched = build_schedule(
            Architecture.DLM, cfg_for(Architecture.DLM), Workload(1, 0, gen_len), AccelerationConfig(tpf=tpf)
        )
        assert sched.decode_step_count == steps

    def test_block_parallel_steps(self):
        cfg = cfg_for(Architecture.BLOCK_DIFFUSION, 31)
        sched = build_schedule(
            Architecture.BLOCK_DIFFUSION, cfg, Workload(1, 0, 310), AccelerationConfig(tpf=3.1)
        )
        assert sched.decode_step_count == 100  # 10 blocks x 10 steps


class TestProperties:
    @settings(max_examples=120, deadline=None)
    @given(arch=small_arch, wl=small_wl, accel=small_accel)
    def test_token_conservation(self, arch, wl, accel):
        sched = build_schedule(arch, cfg_for(arch), wl, accel)
        assert sched.finalized_total == wl.gen_len

    @settings(max_examples=120, deadline=None)
    @given(arch=small_arch, wl=small_wl, accel=small_accel)
    def test_step_bounds(self, arch, wl, accel):
        sched = build_schedule(arch, cfg_for(arch), wl, accel)
        for s in sched.steps:
            assert 1 <= s.active_tokens <= s.context_len <= wl.total_len
            assert s.cached_kv_len in (0, s.context_len - s.active_tokens)

    @settings(max_examples=80, deadline=None)
    @given(arch=st.sampled_from([Architecture.AR, Architecture.BLOCK_DIFFUSION]), wl=small_wl,
           tpf=st.sampled_from([1.0, 2.0, 3.0]))
    def test_context_monotone(self, arch, wl, tpf):
        sched = build_schedule(arch, cfg_for(arch), wl, AccelerationConfig(tpf=tpf))
        ctxs = [s.context_len for s in sched.steps]
        assert all(b >= a for a, b in zip(ctxs, ctxs[1:]))

    @settings(max_examples=60, deadline=None)
    @given(arch=small_arch, wl=small_wl, accel=small_accel)
    def test_determinism(self, arch, wl, accel):
        a = build_schedule(arch, cfg_for(arch), wl, accel)
        b = build_schedule(arch, cfg_for(arch), wl, accel)
        assert a == b
        assert repr(a.steps) == repr(b.steps)

    @settings(max_examples=60, deadline=None)
    @given(wl=small_wl)
    def test_ar_cache_grows_by_step(self, wl):
        sched = build_schedule(Architecture.AR, cfg_for(Architecture.AR), wl)
        for s in sched.decode_steps:
            assert s.cached_kv_len == s.context_len - s.active_tokens
