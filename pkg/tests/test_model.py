"""Tests for the recurrent structure-detail network."""
import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from sdvsr.autograd.tape import Tape
from sdvsr.errors import ArgumentError, DimensionError, UsageError
from sdvsr.model.blocks import ParameterScope, hsa, sd_block
from sdvsr.model.complexity import mac_estimate, param_count, per_block_params
from sdvsr.model.config import BlockVariant, InputMode, ModelConfig, architecture_grid
from sdvsr.model.decompose import decompose
from sdvsr.model.layers import init_params, parameter_shapes
from sdvsr.model.rsdn import RSDN, frame_pairs
from sdvsr.tensor import ops
from sdvsr.tensor.ops import ConvParams
from sdvsr.tensor.tensor4 import Tensor4

BLOCK_CONFIGS = {
    "sd": ModelConfig(blocks=1, channels=4, scale=2),
    "two_stream": ModelConfig(blocks=1, channels=4, scale=2, block_variant="two_stream"),
    "one_stream": ModelConfig(blocks=1, channels=4, scale=2, block_variant="one_stream", input_mode="image"),
}


def conv_reference(params, name, x):
    return ops.conv2d(x, ConvParams(Tensor4.wrap(params[f"{name}.weight"]), params[f"{name}.bias"]))


def sd_block_reference(params, prefix, s, d, variant):
    """The block rebuilt from plain tensor ops."""

    def conv(name, x):
        return conv_reference(params, f"{prefix}.{name}", x)

    if variant == "one_stream":
        return ops.add(s, conv("conv2", ops.relu(conv("conv1", s)))), d
    a_s, a_d = ops.relu(conv("s1", s)), ops.relu(conv("d1", d))
    if variant == "sd":
        a_s = a_d = ops.add(a_s, a_d)
    return ops.add(s, conv("s2", a_s)), ops.add(d, conv("d2", a_d))


class TestModelConfig:
    """Test cases for ModelConfig."""

    def test_head_input_channels(self):
        """Test prev + cur + unshuffled HR estimate + hidden for C=128 at x4."""
        assert ModelConfig(channels=128, scale=4).head_in_channels == 182

    def test_one_stream_doubles_width(self):
        config = ModelConfig(channels=16, block_variant="one_stream", input_mode="image")
        assert config.width == 32
        assert config.one_stream

    def test_strings_become_enums(self):
        config = ModelConfig(block_variant="two_stream", input_mode="image", decomposition="lowpass")
        assert config.block_variant is BlockVariant.TWO_STREAM
        assert config.input_mode is InputMode.IMAGE

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"blocks": 0},
            {"channels": 0},
            {"hsa_kernel": 4},
            {"lowpass_sigma": 0.0},
            {"block_variant": "one_stream", "input_mode": "sd"},
        ],
    )
    def test_invalid_settings(self, kwargs):
        with pytest.raises(ArgumentError):
            ModelConfig(**kwargs)

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            ModelConfig(block_variant="three_stream")

    def test_dict_round_trip(self):
        config = ModelConfig(blocks=3, channels=8, hsa_enabled=False, decomposition="lowpass")
        assert ModelConfig.from_dict(config.to_dict()) == config
        assert config.to_dict()["block_variant"] == "sd"

    def test_architecture_grid(self):
        configs = architecture_grid(channels=16, blocks=2)
        assert [number for number, _ in configs] == list(range(1, 9))
        first, seventh = configs[0][1], configs[6][1]
        assert first.one_stream and not first.hsa_enabled and first.width == 32
        assert seventh.block_variant is BlockVariant.SD and not seventh.hsa_enabled
        assert configs[7][1] == ModelConfig(blocks=2, channels=16)


class TestComplexity:
    """Test cases for parameter and MAC counts at paper scale."""

    @pytest.mark.parametrize("blocks, millions", [(5, 3.83), (7, 5.01), (9, 6.19)])
    def test_param_count(self, blocks, millions):
        count = param_count(ModelConfig(blocks=blocks, channels=128, scale=4))
        assert abs(count - millions * 1e6) <= 0.1 * millions * 1e6

    @pytest.mark.parametrize("blocks, tera", [(5, 0.08), (9, 0.13)])
    def test_mac_estimate(self, blocks, tera):
        macs = mac_estimate(ModelConfig(blocks=blocks, channels=128, scale=4), 120, 180)
        assert abs(macs - tera * 1e12) <= 0.1 * tera * 1e12

    def test_counts_agree_with_parameters(self, tiny_config):
        params = init_params(tiny_config, np.random.default_rng(0))
        assert param_count(tiny_config) == sum(p.size for p in params.values())
        assert RSDN(tiny_config, params).param_count == param_count(tiny_config)

    def test_each_block_adds_the_same_amount(self):
        base = ModelConfig(blocks=2, channels=8)
        grown = base.evolve(blocks=3)
        assert param_count(grown) - param_count(base) == per_block_params(base)


class TestLayers:
    """Test cases for the parameter inventory."""

    def test_hsa_filter_only_when_enabled(self, tiny_config):
        assert "hsa.filter.weight" in parameter_shapes(tiny_config)
        assert "hsa.filter.weight" not in parameter_shapes(tiny_config.evolve(hsa_enabled=False))

    def test_two_branch_names_and_shapes(self, tiny_config):
        shapes = parameter_shapes(tiny_config)
        c, head_in = tiny_config.width, tiny_config.head_in_channels
        assert shapes["head.s.weight"] == (c, head_in, 3, 3)
        assert shapes["head.d.bias"] == (1, c, 1, 1)
        assert shapes["blocks.0.s1.weight"] == (c, c, 3, 3)
        assert shapes["tail.d.weight"] == (3 * 2 * 2, c, 3, 3)
        assert shapes["fuse.weight"] == (c, 2 * c, 3, 3)

    def test_one_stream_names(self):
        config = ModelConfig(blocks=1, channels=4, scale=2, block_variant="one_stream", input_mode="image")
        shapes = parameter_shapes(config)
        assert {"head.weight", "blocks.0.conv1.weight", "tail.weight", "fuse.weight"} <= set(shapes)
        assert shapes["fuse.weight"] == (8, 8, 3, 3)

    def test_init_is_seeded(self, tiny_config):
        a = init_params(tiny_config, np.random.default_rng(5))
        b = init_params(tiny_config, np.random.default_rng(5))
        for name in a:
            assert_array_equal(a[name], b[name])
        assert all(not a[name].any() for name in a if name.endswith(".bias"))


class TestDecompose:
    """Test cases for the structure/detail split."""

    def test_components_sum_to_input_exactly(self, make_frame):
        for _ in range(100):
            frame = make_frame(16, 16)
            s, d = decompose(frame, 4)
            assert s.dtype == np.float64
            assert_array_equal((s + d).data, frame.data.astype(np.float64))

    def test_lowpass_components_sum_to_input_exactly(self, make_frame):
        frame = make_frame(12, 12)
        s, d = decompose(frame, 4, method="lowpass", sigma=1.0)
        assert_array_equal((s + d).data, frame.data.astype(np.float64))

    @pytest.mark.parametrize("method", ["bicubic", "lowpass"])
    def test_constant_frame_has_no_detail(self, method):
        frame = Tensor4.full((1, 3, 16, 16), 0.37)
        s, d = decompose(frame, 4, method=method)
        assert not d.data.any()
        assert_array_equal(s.data, frame.data.astype(np.float64))

    def test_structure_is_smooth(self, make_frame):
        frame = make_frame(32, 32)
        s, d = decompose(frame, 4)
        assert np.abs(np.diff(s.data, axis=3)).mean() < np.abs(np.diff(frame.data, axis=3)).mean()
        assert np.abs(d.data).mean() > 0

    def test_nyquist_checkerboard_is_detail(self):
        """A zero-mean ±1 checkerboard keeps at least 95% of its energy in D.

        A {0, 1} board carries its mean in S, so only the zero-mean form is checked.
        """
        rows, cols = np.indices((16, 16))
        board = np.where((rows + cols) % 2 == 0, 1.0, -1.0)
        frame = Tensor4.wrap(np.broadcast_to(board, (1, 3, 16, 16)).copy())
        _, d = decompose(frame, 4)
        assert (d.data**2).sum() / (frame.data**2).sum() >= 0.95

    def test_size_must_divide(self):
        with pytest.raises(DimensionError):
            decompose(Tensor4.zeros((1, 3, 10, 12)), 4)


class TestBlocks:
    """Test cases for the SD block and hidden-state adaptation."""

    def _scope(self, config, seed=0, bias_rng=None):
        tape = Tape(enabled=False)
        params = init_params(config, np.random.default_rng(seed), np.float64)
        if bias_rng is not None:
            for name, value in list(params.items()):
                if name.endswith(".bias"):
                    params[name] = bias_rng.normal(size=value.shape)
        return tape, ParameterScope(tape, params)

    def test_sd_block_exchanges_information(self, rng):
        config = ModelConfig(blocks=1, channels=4, scale=2)
        tape, scope = self._scope(config)
        s = tape.constant(rng.normal(size=(1, 4, 5, 5)))
        d1 = tape.constant(rng.normal(size=(1, 4, 5, 5)))
        d2 = tape.constant(rng.normal(size=(1, 4, 5, 5)))

        s_out1, _ = sd_block(scope, "blocks.0", s, d1, "sd")
        s_out2, _ = sd_block(scope, "blocks.0", s, d2, "sd")
        assert not np.array_equal(s_out1.data, s_out2.data)

        s_out1, _ = sd_block(scope, "blocks.0", s, d1, "two_stream")
        s_out2, _ = sd_block(scope, "blocks.0", s, d2, "two_stream")
        assert_array_equal(s_out1.data, s_out2.data)

    @pytest.mark.parametrize("variant", list(BLOCK_CONFIGS))
    def test_sd_block_matches_plain_ops(self, rng, variant):
        config = BLOCK_CONFIGS[variant]
        tape, scope = self._scope(config, seed=3, bias_rng=rng)
        s = Tensor4.wrap(rng.normal(size=(2, config.width, 6, 5)))
        d = Tensor4.wrap(rng.normal(size=(2, config.width, 6, 5)))
        s_out, d_out = sd_block(scope, "blocks.0", tape.constant(s), tape.constant(d), variant)
        s_ref, d_ref = sd_block_reference(scope.params, "blocks.0", s, d, variant)
        assert_allclose(s_out.data, s_ref.data, atol=1e-12)
        assert_allclose(d_out.data, d_ref.data, atol=1e-12)

    @pytest.mark.parametrize("variant", list(BLOCK_CONFIGS))
    def test_zero_weights_make_the_block_an_identity(self, rng, variant):
        config = BLOCK_CONFIGS[variant]
        tape = Tape(enabled=False)
        scope = ParameterScope(tape, RSDN.zeros(config, np.float64).params)
        s = rng.normal(size=(1, config.width, 5, 5))
        d = rng.normal(size=(1, config.width, 5, 5))
        s_out, d_out = sd_block(scope, "blocks.0", tape.constant(s), tape.constant(d), variant)
        assert_array_equal(s_out.data, s)
        assert_array_equal(d_out.data, d)

    def test_sd_block_shape_mismatch(self):
        config = ModelConfig(blocks=1, channels=4, scale=2)
        tape, scope = self._scope(config)
        with pytest.raises(DimensionError):
            sd_block(scope, "blocks.0", tape.constant(np.zeros((1, 4, 5, 5))), tape.constant(np.zeros((1, 4, 5, 4))), "sd")

    def test_hsa_gate_is_a_probability(self, rng):
        config = ModelConfig(blocks=1, channels=4, scale=2)
        tape, scope = self._scope(config)
        frame = tape.constant(rng.uniform(size=(1, 3, 6, 6)))
        hidden = tape.constant(rng.normal(size=(1, 4, 6, 6)))
        gated, gate = hsa(scope, frame, hidden, 3)
        assert gate.shape == hidden.shape
        assert ((gate.data > 0) & (gate.data < 1)).all()
        assert_array_equal(gated.data, gate.data * hidden.data)

    def test_hsa_matches_plain_ops(self, rng):
        config = ModelConfig(blocks=1, channels=4, scale=2, hsa_kernel=3)
        tape, scope = self._scope(config, seed=5, bias_rng=rng)
        frame = Tensor4.wrap(rng.uniform(size=(1, 3, 7, 6)))
        hidden = Tensor4.wrap(rng.normal(size=(1, 4, 7, 6)))
        gated, gate = hsa(scope, tape.constant(frame), tape.constant(hidden), 3)
        filters = ops.relu(conv_reference(scope.params, "hsa.filter", frame))
        expected_gate = ops.sigmoid(ops.spatially_variant_filter(hidden, filters, 3))
        assert_allclose(gate.data, expected_gate.data, atol=1e-12)
        assert_allclose(gated.data, ops.mul(expected_gate, hidden).data, atol=1e-12)

    def test_zero_filter_halves_the_hidden_state(self, rng):
        config = ModelConfig(blocks=1, channels=4, scale=2)
        params = init_params(config, np.random.default_rng(0), np.float64)
        for name in ("hsa.filter.weight", "hsa.filter.bias"):
            params[name] = np.zeros_like(params[name])
        tape = Tape(enabled=False)
        hidden = rng.normal(size=(1, 4, 6, 6))
        gated, gate = hsa(
            ParameterScope(tape, params), tape.constant(rng.uniform(size=(1, 3, 6, 6))), tape.constant(hidden), 3
        )
        assert_allclose(gate.data, 0.5, atol=1e-12)
        assert_allclose(gated.data, hidden / 2, atol=1e-12)

    def test_missing_parameter(self):
        config = ModelConfig(blocks=1, channels=4, scale=2, hsa_enabled=False)
        tape, scope = self._scope(config)
        with pytest.raises(UsageError):
            scope("hsa.filter.weight")


class TestRSDN:
    """Test cases for the recurrent network."""

    def test_frame_pairs_reflect_second_frame(self):
        a, b, c = (Tensor4.full((1, 3, 2, 2), v) for v in (0.1, 0.2, 0.3))
        pairs = frame_pairs([a, b, c])
        assert [(p is q) for (p, _), q in zip(pairs, [b, a, b])] == [True] * 3
        assert [cur for _, cur in pairs] == [a, b, c]
        assert frame_pairs([a]) == [(a, a)]

    def test_frame_pairs_validation(self):
        with pytest.raises(ArgumentError):
            frame_pairs([])
        with pytest.raises(DimensionError):
            frame_pairs([Tensor4.zeros((1, 3, 2, 2)), Tensor4.zeros((1, 3, 2, 4))])

    def test_instrumented_forward_sees_padded_inputs(self, tiny_config, lr_frames, mocker):
        """Test that a T=3 clip is processed as (I2, I1), (I1, I2), (I2, I3)."""
        model = RSDN.from_seed(tiny_config, seed=0)
        spy = mocker.spy(RSDN, "step")
        model.forward_sequence(lr_frames)
        first, second, third = lr_frames
        seen = [(call.args[2], call.args[3]) for call in spy.call_args_list]
        assert seen == [(second, first), (first, second), (second, third)]

    def test_output_shapes_and_composition(self, tiny_config, lr_frames):
        model = RSDN.from_seed(tiny_config, seed=1)
        outputs = model.forward_sequence(lr_frames)
        assert len(outputs) == 3
        for out in outputs:
            assert out.i_hr.shape == (1, 3, 16, 16)
            assert out.new_state.hidden.shape == (1, tiny_config.width, 8, 8)
            assert out.i_hr == out.s_hr + out.d_hr
            assert out.hsa_map is not None and out.hsa_map.shape == (1, tiny_config.width, 8, 8)
            assert out.i_hr.is_finite()

    def test_one_stream_composition(self, lr_frames):
        config = ModelConfig(blocks=1, channels=4, scale=2, block_variant="one_stream", input_mode="image", hsa_enabled=False)
        outputs = RSDN.from_seed(config).forward_sequence(lr_frames)
        assert outputs[0].hsa_map is None
        assert outputs[0].new_state.hidden.shape == (1, 8, 8, 8)
        assert all(out.i_hr == out.s_hr + out.d_hr for out in outputs)

    def test_causal(self, tiny_config, make_frame):
        """Test that step t is bit-identical no matter which frames follow it."""
        frames = [make_frame(8, 8) for _ in range(4)]
        model = RSDN.from_seed(tiny_config, seed=2)
        full = model.forward_sequence(frames)
        for length in (2, 3):
            prefix = model.forward_sequence(frames[:length])
            for t in range(length):
                assert prefix[t].i_hr == full[t].i_hr
                assert prefix[t].new_state.hidden == full[t].new_state.hidden

    def test_deterministic_under_seed(self, tiny_config, lr_frames):
        a = RSDN.from_seed(tiny_config, seed=4).forward_sequence(lr_frames)
        b = RSDN.from_seed(tiny_config, seed=4).forward_sequence(lr_frames)
        assert all(x.i_hr == y.i_hr for x, y in zip(a, b))

    @pytest.mark.parametrize("number, config", architecture_grid(channels=4, blocks=1))
    def test_zero_model_predicts_zero(self, number, config, make_frame):
        frames = [make_frame(16, 16) for _ in range(3)]
        for output in RSDN.zeros(config).forward_sequence(frames):
            assert output.i_hr.shape == (1, 3, 64, 64)
            assert not output.i_hr.data.any()

    @pytest.mark.parametrize("number, config", architecture_grid(channels=4, blocks=1))
    def test_every_grid_model_runs(self, number, config, make_frame):
        frames = [make_frame(16, 16) for _ in range(3)]
        outputs = RSDN.from_seed(config, seed=number).forward_sequence(frames)
        assert len(outputs) == 3
        for output in outputs:
            assert output.i_hr.shape == (1, 3, 64, 64)
            assert np.isfinite(output.i_hr.data).all()
            assert np.isfinite(output.s_hr.data).all() and np.isfinite(output.d_hr.data).all()

    def test_initial_state_is_zero(self, tiny_config):
        state = RSDN.from_seed(tiny_config).initial_state(2, 5, 6)
        assert state.prev_s_hr.shape == (2, 3, 10, 12)
        assert state.hidden.shape == (2, tiny_config.width, 5, 6)
        assert not state.hidden.data.any()

    def test_cell_step_checks_state(self, tiny_config, lr_frames):
        model = RSDN.from_seed(tiny_config)
        wrong = model.initial_state(1, 4, 4)
        with pytest.raises(UsageError):
            model.cell_step(lr_frames[0], lr_frames[1], wrong)

    def test_cell_step_matches_sequence(self, tiny_config, lr_frames):
        model = RSDN.from_seed(tiny_config)
        first = model.cell_step(lr_frames[1], lr_frames[0], model.initial_state(1, 8, 8))
        assert first.i_hr == model.forward_sequence(lr_frames)[0].i_hr

    def test_cell_step_needs_matching_frames(self, tiny_config, lr_frames):
        model = RSDN.from_seed(tiny_config)
        with pytest.raises(DimensionError):
            model.cell_step(Tensor4.zeros((1, 3, 8, 6)), lr_frames[0], model.initial_state(1, 8, 8))

    def test_parameters_must_match_config(self, tiny_config):
        params = init_params(tiny_config, np.random.default_rng(0))
        params.pop("fuse.bias")
        with pytest.raises(UsageError, match="fuse.bias"):
            RSDN(tiny_config, params)

    def test_astype_and_copy_are_independent(self, tiny_config):
        model = RSDN.from_seed(tiny_config)
        wide = model.astype(np.float64)
        clone = model.copy()
        clone.params["fuse.bias"] += 1.0
        assert wide.dtype == np.float64
        assert not model.params["fuse.bias"].any()
