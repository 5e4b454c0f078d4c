"""Tests for losses, the optimizer, checkpoints and the training loop."""
import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from sdvsr.autograd.tape import Tape
from sdvsr.data.dataset import SequenceDataset
from sdvsr.data.sequence import SequenceSample
from sdvsr.errors import ArgumentError, DimensionError, FormatError, NumericAbortError, UsageError
from sdvsr.model.config import ModelConfig, architecture_grid
from sdvsr.model.rsdn import RSDN, CellOutput
from sdvsr.tensor.tensor4 import Tensor4
from sdvsr.training.checkpoint import (
    Checkpoint,
    decode_checkpoint,
    encode_checkpoint,
    load_checkpoint,
    save_checkpoint,
)
from sdvsr.training.losses import LossWeights, charbonnier, hr_targets, tape_loss, total_loss
from sdvsr.training.optim import Adam, OptimState, StepSchedule, adam_step, lr_schedule
from sdvsr.training.trainer import (
    CKPT_FINAL,
    CKPT_LAST,
    METRICS_HEADER,
    METRICS_LOG,
    Augmentation,
    ClipSampler,
    Trainer,
    TrainHyper,
    train,
)

SCALE4 = ModelConfig(blocks=1, channels=4, scale=4)


def block_upsample(array, r):
    """Each pixel repeated into an r x r block."""
    return np.repeat(np.repeat(array, r, axis=-2), r, axis=-1)


def quick_hyper(**changes):
    settings = dict(
        epochs=1,
        iterations_per_epoch=3,
        batch=1,
        patch=16,
        clip_len=2,
        val_every=3,
        checkpoint_every=2,
        border_crop=2,
    )
    settings.update(changes)
    return TrainHyper(**settings)


class TestCharbonnier:
    """Test cases for the Charbonnier penalty."""

    def test_identical_inputs_give_eps(self):
        x = Tensor4.full((1, 3, 4, 4), 0.2)
        assert charbonnier(x, x, 1e-3) == pytest.approx(1e-3)

    def test_three_quarter_eps_difference(self):
        eps = 1e-3
        x = Tensor4.full((1, 1, 2, 2), 0.75 * eps, dtype=np.float64)
        assert charbonnier(x, Tensor4.zeros((1, 1, 2, 2), np.float64), eps) == pytest.approx(1.25 * eps)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            charbonnier(Tensor4.zeros((1, 3, 4, 4)), Tensor4.zeros((1, 3, 4, 2)))


class TestLossWeights:
    """Test cases for loss weights and the three-term objective."""

    def test_negative_weight_rejected(self):
        with pytest.raises(ArgumentError):
            LossWeights(alpha=-1.0)
        with pytest.raises(ArgumentError):
            LossWeights(epsilon=0.0)

    def test_active_terms(self):
        assert LossWeights(1.0, 1.0, 0.0).active_terms == ("structure", "detail")

    def test_targets_split_like_the_input(self, make_frame):
        frame = make_frame(16, 16)
        targets = hr_targets(frame, 4)
        assert_array_equal((targets.s_hr + targets.d_hr).data, targets.i_hr.data)

    def test_tape_and_direct_losses_agree(self, tiny_config, lr_frames, make_frame):
        model = RSDN.from_seed(tiny_config, seed=0, dtype=np.float64)
        targets = [hr_targets(make_frame(16, 16), 2) for _ in lr_frames]
        weights = LossWeights(1.0, 0.5, 1.0)

        direct = total_loss(model.forward_sequence(lr_frames), targets, weights)
        tape = Tape()
        _, recorded = tape_loss(tape, model.unroll(tape, lr_frames), targets, weights)

        assert recorded.total == pytest.approx(direct.total, rel=1e-9)
        assert recorded.structure == pytest.approx(direct.structure, rel=1e-9)
        assert direct.total == pytest.approx(direct.structure + 0.5 * direct.detail + direct.image)

    def test_zero_weight_term_is_not_recorded(self, tiny_config, lr_frames, make_frame):
        """Test that gamma=0 leaves the image term off the tape while still reporting it."""
        model = RSDN.from_seed(tiny_config, seed=0)
        targets = [hr_targets(make_frame(16, 16), 2) for _ in lr_frames]

        tape = Tape()
        _, breakdown = tape_loss(tape, model.unroll(tape, lr_frames), targets, LossWeights(1.0, 1.0, 0.0))

        recorded = sum(1 for record in tape.records if record.function.name == "charbonnier")
        assert recorded == 2 * len(lr_frames)
        assert breakdown.active == ("structure", "detail")
        assert breakdown.image > 0
        assert breakdown.total == pytest.approx(breakdown.structure + breakdown.detail, rel=1e-5)

    def test_all_zero_weights(self, tiny_config, lr_frames, make_frame):
        model = RSDN.from_seed(tiny_config)
        targets = [hr_targets(make_frame(16, 16), 2) for _ in lr_frames]
        tape = Tape()
        with pytest.raises(UsageError):
            tape_loss(tape, model.unroll(tape, lr_frames), targets, LossWeights(0.0, 0.0, 0.0))

    def test_perfect_prediction_costs_the_weighted_epsilon(self, tiny_config, make_frame):
        weights = LossWeights(1.0, 0.5, 2.0, epsilon=1e-3)
        targets = [hr_targets(make_frame(16, 16), 2) for _ in range(3)]
        state = RSDN.from_seed(tiny_config).initial_state(1, 8, 8)
        outputs = [CellOutput(t.s_hr, t.d_hr, t.i_hr, state) for t in targets]
        breakdown = total_loss(outputs, targets, weights)
        assert breakdown.total == pytest.approx(3.5 * 1e-3, rel=1e-9)
        for term in (breakdown.structure, breakdown.detail, breakdown.image):
            assert term == pytest.approx(1e-3, rel=1e-9)

    def test_frame_order_does_not_matter(self, tiny_config, lr_frames, make_frame):
        outputs = RSDN.from_seed(tiny_config, seed=4).forward_sequence(lr_frames)
        targets = [hr_targets(make_frame(16, 16), 2) for _ in lr_frames]
        order = [2, 0, 1]
        weights = LossWeights(1.0, 0.5, 1.0)
        straight = total_loss(outputs, targets, weights)
        shuffled = total_loss([outputs[i] for i in order], [targets[i] for i in order], weights)
        assert shuffled.total == pytest.approx(straight.total, rel=1e-12)
        assert shuffled.image == pytest.approx(straight.image, rel=1e-12)

    def test_length_mismatch(self, tiny_config, lr_frames, make_frame):
        outputs = RSDN.from_seed(tiny_config).forward_sequence(lr_frames)
        with pytest.raises(UsageError):
            total_loss(outputs, [hr_targets(make_frame(16, 16), 2)], LossWeights())


class TestAdam:
    """Test cases for the optimizer and schedule."""

    def test_first_step_moves_by_lr(self):
        params = {"w": np.zeros((1, 1, 1, 1))}
        state = OptimState.for_params(params)
        adam_step(params, {"w": np.ones((1, 1, 1, 1))}, state, lr=0.1)
        assert params["w"].item() == pytest.approx(-0.1)
        assert state.step == 1

    def test_non_finite_gradient_leaves_state_untouched(self):
        params = {"a": np.ones((1, 1, 1, 1)), "b": np.ones((1, 1, 1, 1))}
        adam = Adam(params)
        with pytest.raises(NumericAbortError, match="'b'"):
            adam.step({"a": np.ones((1, 1, 1, 1)), "b": np.full((1, 1, 1, 1), np.nan)}, lr=0.1)
        assert params["a"].item() == 1.0
        assert adam.state.step == 0
        assert not adam.state.m["a"].any()

    def test_missing_and_misshapen_gradients(self):
        params = {"w": np.zeros((1, 1, 2, 2))}
        state = OptimState.for_params(params)
        with pytest.raises(UsageError):
            adam_step(params, {}, state, 0.1)
        with pytest.raises(DimensionError):
            adam_step(params, {"w": np.zeros((1, 1, 2, 1))}, state, 0.1)

    def test_single_step_decreases_a_quadratic(self, rng):
        target = rng.normal(size=(1, 2, 3, 3))
        params = {"w": np.zeros((1, 2, 3, 3))}
        before = float(((params["w"] - target) ** 2).sum())
        adam_step(params, {"w": 2.0 * (params["w"] - target)}, OptimState.for_params(params), lr=1e-3)
        assert float(((params["w"] - target) ** 2).sum()) < before

    def test_minimizes_a_quadratic(self):
        params = {"w": np.full((1, 1, 1, 1), 3.0)}
        adam = Adam(params)
        for _ in range(500):
            adam.step({"w": 2.0 * params["w"]}, lr=0.05)
        assert abs(params["w"].item()) < 0.1

    def test_two_scalar_steps(self):
        params = {"w": np.zeros((1, 1, 1, 1))}
        state = OptimState.for_params(params)
        adam_step(params, {"w": np.ones((1, 1, 1, 1))}, state, lr=0.1)
        adam_step(params, {"w": np.full((1, 1, 1, 1), 0.5)}, state, lr=0.1)

        b1, b2, eps = 0.9, 0.999, 1e-8
        m1, v1 = 1 - b1, 1 - b2
        m2, v2 = b1 * m1 + (1 - b1) * 0.5, b2 * v1 + (1 - b2) * 0.25
        first = 0.1 * (m1 / (1 - b1)) / (np.sqrt(v1 / (1 - b2)) + eps)
        second = 0.1 * (m2 / (1 - b1**2)) / (np.sqrt(v2 / (1 - b2**2)) + eps)
        assert params["w"].item() == pytest.approx(-(first + second), rel=1e-12)
        assert state.m["w"].item() == pytest.approx(m2)
        assert state.v["w"].item() == pytest.approx(v2)
        assert state.step == 2

    def test_zero_gradient_is_a_no_op(self, rng):
        params = {"w": rng.normal(size=(1, 2, 3, 3))}
        before = params["w"].copy()
        state = OptimState.for_params(params)
        adam_step(params, {"w": np.zeros((1, 2, 3, 3))}, state, lr=0.1)
        assert_array_equal(params["w"], before)
        assert state.step == 1

    def test_step_schedule(self):
        assert lr_schedule(0) == pytest.approx(1e-4)
        assert lr_schedule(59) == pytest.approx(1e-4)
        assert lr_schedule(60) == pytest.approx(1e-5)
        schedule = StepSchedule()
        assert not schedule.finished(69)
        assert schedule.finished(70)
        with pytest.raises(ArgumentError):
            schedule.lr(-1)


class TestCheckpoint:
    """Test cases for the binary checkpoint format."""

    def _checkpoint(self):
        model = RSDN.from_seed(SCALE4, seed=1)
        optim = OptimState.for_params(model.params)
        optim.step = 7
        for moment in optim.m.values():
            moment += 0.25
        return Checkpoint(model=model, step=42, optim=optim, meta={"epoch": 3})

    def test_round_trip(self):
        original = self._checkpoint()
        restored = decode_checkpoint(encode_checkpoint(original))

        assert restored.step == 42
        assert restored.meta == {"epoch": 3}
        assert restored.model.config == SCALE4
        assert restored.optim is not None and restored.optim.step == 7
        for name, value in original.model.params.items():
            assert_array_equal(restored.model.params[name], value)
            assert_array_equal(restored.optim.m[name], original.optim.m[name])

    def test_encoding_is_byte_stable(self):
        assert encode_checkpoint(self._checkpoint()) == encode_checkpoint(self._checkpoint())

    def test_decode_then_encode_reproduces_the_bytes(self):
        data = encode_checkpoint(self._checkpoint())
        assert encode_checkpoint(decode_checkpoint(data)) == data

    def test_save_load_save_is_byte_identical(self, temp_dir):
        first = save_checkpoint(temp_dir / "first", self._checkpoint())
        second = save_checkpoint(temp_dir / "second", load_checkpoint(first))
        assert second.read_bytes() == first.read_bytes()

    def test_bad_magic(self):
        data = encode_checkpoint(self._checkpoint())
        with pytest.raises(FormatError, match="magic"):
            decode_checkpoint(b"XXXX" + data[4:])

    def test_unsupported_version(self):
        data = bytearray(encode_checkpoint(self._checkpoint()))
        data[4] = 99
        with pytest.raises(FormatError, match="version"):
            decode_checkpoint(bytes(data))

    def test_truncated(self):
        data = encode_checkpoint(self._checkpoint())
        with pytest.raises(FormatError, match="truncated"):
            decode_checkpoint(data[:-5])

    def test_trailing_bytes(self):
        with pytest.raises(FormatError):
            decode_checkpoint(encode_checkpoint(self._checkpoint()) + b"\0")

    def test_save_and_load(self, temp_dir):
        path = save_checkpoint(temp_dir / "run" / "ckpt", self._checkpoint())
        assert path.exists()
        assert not (temp_dir / "run" / "ckpt.tmp").exists()
        assert load_checkpoint(path).step == 42

    def test_missing_file(self, temp_dir):
        with pytest.raises(FormatError):
            load_checkpoint(temp_dir / "absent")


class TestClipSampler:
    """Test cases for random clip extraction."""

    def _aligned_dataset(self, rng):
        hr = [Tensor4.wrap(rng.uniform(size=(1, 3, 32, 32)).astype(np.float32)) for _ in range(4)]
        lr = [Tensor4.wrap(np.ascontiguousarray(f.data[:, :, ::4, ::4])) for f in hr]
        return SequenceDataset([SequenceSample("aligned", tuple(hr), tuple(lr), 4)])

    def test_lr_and_hr_patches_are_aligned(self, rng):
        sampler = ClipSampler(self._aligned_dataset(rng), quick_hyper(augment=False, clip_len=3))
        batch = sampler.sample(np.random.default_rng(0), 2)
        assert len(batch.lr_frames) == 3
        for lr, hr in zip(batch.lr_frames, batch.hr_frames):
            assert lr.shape == (2, 3, 4, 4)
            assert hr.shape == (2, 3, 16, 16)
            assert_array_equal(lr.data, hr.data[:, :, ::4, ::4])

    def test_clip_len_is_capped_by_sequence_length(self, rng):
        sampler = ClipSampler(self._aligned_dataset(rng), quick_hyper(clip_len=10))
        assert sampler.clip_len == 4

    @pytest.mark.parametrize("patch", [18, 64])
    def test_invalid_patch(self, rng, patch):
        with pytest.raises(ArgumentError):
            ClipSampler(self._aligned_dataset(rng), quick_hyper(patch=patch))

    def test_empty_dataset(self):
        with pytest.raises(UsageError):
            ClipSampler(SequenceDataset([]), quick_hyper())

    def test_augmentation(self):
        x = np.arange(4.0).reshape(1, 1, 2, 2)
        assert_array_equal(Augmentation(flip_h=True).apply(x)[0, 0], [[1, 0], [3, 2]])
        assert_array_equal(Augmentation(rot90=2).apply(x)[0, 0], [[3, 2], [1, 0]])

    def test_draw_covers_every_rotation(self):
        drawn = {Augmentation.draw(np.random.default_rng(seed)).rot90 for seed in range(64)}
        assert drawn == {0, 1, 2, 3}

    @pytest.mark.parametrize("k", [1, 2, 3])
    @pytest.mark.parametrize("flip_h, flip_v", [(False, False), (True, False), (False, True), (True, True)])
    def test_augmentation_commutes_with_upsampling(self, rng, k, flip_h, flip_v):
        lr = rng.uniform(size=(2, 3, 4, 6))
        aug = Augmentation(flip_h, flip_v, rot90=k)
        assert_array_equal(aug.apply(block_upsample(lr, 4)), block_upsample(aug.apply(lr), 4))

    def test_augmented_clips_stay_aligned(self, rng):
        """LR and HR of every sampled clip get the same flips and rotation."""
        lr = [rng.uniform(size=(1, 3, 8, 8)).astype(np.float32) for _ in range(3)]
        dataset = SequenceDataset(
            [
                SequenceSample(
                    "blocks",
                    tuple(Tensor4.wrap(block_upsample(f, 4)) for f in lr),
                    tuple(Tensor4.wrap(f) for f in lr),
                    4,
                )
            ]
        )
        sampler = ClipSampler(dataset, quick_hyper(augment=True, clip_len=3))
        for seed in range(32):
            batch = sampler.sample(np.random.default_rng(seed), 2)
            for lr_step, hr_step in zip(batch.lr_frames, batch.hr_frames):
                assert_array_equal(hr_step.data, block_upsample(lr_step.data, 4))


class TestTrainer:
    """Test cases for the training loop."""

    def test_run_writes_artifacts(self, bars_dataset, temp_dir):
        train_set, val_set = bars_dataset[:2], bars_dataset[2:]
        result = Trainer(RSDN.from_seed(SCALE4), hyper=quick_hyper(), out_dir=temp_dir).run(train_set, val_set)

        assert result.iterations == 3
        assert all(np.isfinite(result.losses))
        assert result.checkpoint == temp_dir / CKPT_FINAL
        assert (temp_dir / CKPT_LAST).exists()
        assert [it for it, _ in result.val_psnr] == [3]

        lines = (temp_dir / METRICS_LOG).read_text().splitlines()
        assert lines[0] == METRICS_HEADER
        assert len(lines) == 4
        assert lines[1].startswith("1,0,")
        assert lines[3].split(",")[-1] != ""

    def test_progress_callback(self, bars_dataset, mocker):
        callback = mocker.Mock()
        Trainer(RSDN.from_seed(SCALE4), hyper=quick_hyper(), progress_callback=callback).run(bars_dataset)
        assert callback.call_count == 3
        assert callback.call_args.args[:2] == (3, 3)

    def test_max_iterations_cuts_the_schedule(self, bars_dataset):
        result = train(RSDN.from_seed(SCALE4), bars_dataset, hyper=quick_hyper(epochs=2, max_iterations=4))
        assert result.iterations == 4
        assert result.checkpoint is None

    def test_identical_seeds_give_identical_checkpoints(self, bars_dataset, temp_dir):
        for name in ("a", "b"):
            train(RSDN.from_seed(SCALE4, seed=9), bars_dataset, hyper=quick_hyper(seed=3), out_dir=temp_dir / name)
        assert (temp_dir / "a" / CKPT_FINAL).read_bytes() == (temp_dir / "b" / CKPT_FINAL).read_bytes()

    def test_training_changes_parameters(self, bars_dataset):
        model = RSDN.from_seed(SCALE4)
        before = {k: v.copy() for k, v in model.params.items()}
        train(model, bars_dataset, hyper=quick_hyper(base_lr=1e-3))
        assert any(not np.array_equal(before[k], model.params[k]) for k in before)

    def test_numeric_abort_keeps_last_checkpoint(self, bars_dataset, temp_dir, mocker):
        mocker.patch.object(Trainer, "train_step", side_effect=NumericAbortError("loss became nan"))
        with pytest.raises(NumericAbortError):
            train(RSDN.from_seed(SCALE4), bars_dataset, hyper=quick_hyper(), out_dir=temp_dir)
        assert (temp_dir / CKPT_LAST).exists()
        assert not (temp_dir / CKPT_FINAL).exists()

    def test_hyper_validation(self):
        with pytest.raises(ArgumentError):
            TrainHyper(batch=0)
        with pytest.raises(ArgumentError):
            TrainHyper(max_iterations=0)
        assert TrainHyper(epochs=2, iterations_per_epoch=5, max_iterations=7).total_iterations == 7

    @pytest.mark.slow
    def test_toy_training_beats_bicubic(self, temp_dir):
        """Test that a short run on moving bars halves the loss and beats bicubic by 0.5 dB."""
        from sdvsr.data.synth import synth_sequence
        from sdvsr.metrics.evaluate import bicubic_baseline, evaluate

        dataset = SequenceDataset(
            synth_sequence("moving_bars", 4, (64, 64), 1.0, seed, name=f"bars_{seed}") for seed in range(200)
        )
        train_set, val_set = dataset.split(0.1, seed=0)
        hyper = TrainHyper(epochs=1, iterations_per_epoch=2000, batch=4, patch=64, clip_len=4, base_lr=1e-3)
        result = train(RSDN.from_seed(ModelConfig(blocks=2, channels=16)), train_set, hyper=hyper)

        early = float(np.mean(result.losses[:10]))
        late = float(np.mean(result.losses[-10:]))
        assert late <= 0.5 * early
        model_psnr = evaluate(result.model, val_set).mean().psnr_y
        assert model_psnr >= bicubic_baseline(val_set).mean().psnr_y + 0.5

    @pytest.mark.parametrize("number, config", architecture_grid(channels=4, blocks=1))
    def test_every_grid_model_trains_with_finite_losses(self, bars_dataset, number, config):
        hyper = quick_hyper(iterations_per_epoch=50, val_every=50, checkpoint_every=50, seed=number)
        result = train(RSDN.from_seed(config, seed=number), bars_dataset, hyper=hyper)
        assert result.iterations == 50
        assert len(result.losses) == 50
        assert np.isfinite(result.losses).all()
