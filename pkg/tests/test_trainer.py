"""Dataset split, Adam updates, and the minibatch triplet trainer."""

import math

import numpy as np
import pytest

from chanchart.encoder import EncoderParams, init_random, init_smart, mlp_init
from chanchart.rng import SplitMix64
from chanchart.synthgen import (
    ChannelSet,
    generate_trajectory,
    loop_scenario,
    synthesize_channels,
)
from chanchart.trainer import (
    OptimizerState,
    TrainConfig,
    adam_step,
    split_dataset,
    train,
)
from chanchart.triplet import MiningConfig


# ---------------------------------------------------------------------------
# split


def test_split_sizes_and_disjointness():
    train_idx, eval_idx = split_dataset(100, 0.7, seed=0)
    assert train_idx.size == 70 and eval_idx.size == 30
    assert np.all(np.diff(train_idx) > 0) and np.all(np.diff(eval_idx) > 0)
    merged = np.sort(np.concatenate([train_idx, eval_idx]))
    assert np.array_equal(merged, np.arange(100))


def test_split_rounds_to_nearest():
    train_idx, _ = split_dataset(10, 0.65, seed=1)
    assert train_idx.size == 7  # 6.5 rounds up
    train_idx, _ = split_dataset(10, 0.64, seed=1)
    assert train_idx.size == 6


def test_split_clamps_to_keep_both_sides():
    train_idx, eval_idx = split_dataset(5, 0.01, seed=2)
    assert train_idx.size == 1 and eval_idx.size == 4
    train_idx, eval_idx = split_dataset(5, 0.999, seed=2)
    assert train_idx.size == 4 and eval_idx.size == 1


def test_split_deterministic_and_seed_sensitive():
    a = split_dataset(50, 0.7, seed=3)
    b = split_dataset(50, 0.7, seed=3)
    c = split_dataset(50, 0.7, seed=4)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    assert not np.array_equal(a[0], c[0])


def test_split_rejects_bad_inputs():
    with pytest.raises(ValueError):
        split_dataset(1, 0.5, seed=0)
    with pytest.raises(ValueError):
        split_dataset(10, 0.0, seed=0)
    with pytest.raises(ValueError):
        split_dataset(10, 1.0, seed=0)


# ---------------------------------------------------------------------------
# Adam


def test_adam_first_step_hand_computed():
    cfg = TrainConfig(learning_rate=0.001, beta1=0.9, beta2=0.999, eps=1e-8)
    p = np.array([0.0])
    g = np.array([1.0])
    state = OptimizerState.for_params([p])
    adam_step(state, [p], [g], cfg)
    # bias correction makes the first step lr * g/(|g| + eps) regardless of betas
    expected = -0.001 * 1.0 / (1.0 + 1e-8)
    assert abs(p[0] - expected) < 1e-18
    assert state.step == 1


def test_adam_constant_gradient_steps_are_constant():
    cfg = TrainConfig(learning_rate=0.01)
    p = np.array([0.0])
    state = OptimizerState.for_params([p])
    deltas = []
    prev = 0.0
    for _ in range(5):
        adam_step(state, [p], [np.array([2.0])], cfg)
        deltas.append(prev - p[0])
        prev = p[0]
    # with a constant gradient the bias-corrected moments are fixed points
    assert all(abs(d - deltas[0]) < 1e-12 for d in deltas)


def test_adam_rejects_mismatches():
    cfg = TrainConfig()
    p = np.array([0.0])
    state = OptimizerState.for_params([p])
    with pytest.raises(ValueError):
        adam_step(state, [p], [], cfg)
    with pytest.raises(ValueError):
        adam_step(state, [p], [np.zeros((2, 2))], cfg)


# ---------------------------------------------------------------------------
# end-to-end training on a small synthetic set


def _small_channelset(n: int = 150, seed: int = 0) -> ChannelSet:
    traj, radio, scat = loop_scenario(n, seed=seed)
    track = generate_trajectory(traj)
    return synthesize_channels(track, radio, scat, sample_rate=traj.sample_rate)


def test_train_hybrid_reduces_loss_and_is_deterministic():
    cs = _small_channelset()
    mining = MiningConfig(t_close=1.0, t_far=3.0, sample_rate=cs.sample_rate, seed=5)
    cfg = TrainConfig(epochs=5, batch_size=16, learning_rate=1e-3, seed=9)

    base = init_smart(cs, 20, 4, 5, 2, seed=3)
    model_a = EncoderParams(d_re=base.d_re.copy(), d_im=base.d_im.copy(),
                            z=base.z.copy(), k=base.k)
    report_a = train(model_a, cs, cfg, mining)
    assert len(report_a.epoch_losses) == 5
    assert all(math.isfinite(l) and l >= 0.0 for l in report_a.epoch_losses)
    assert report_a.epoch_losses[-1] < report_a.epoch_losses[0]
    assert report_a.skipped == 0

    model_b = EncoderParams(d_re=base.d_re.copy(), d_im=base.d_im.copy(),
                            z=base.z.copy(), k=base.k)
    report_b = train(model_b, cs, cfg, mining)
    assert report_a.epoch_losses == report_b.epoch_losses
    assert np.array_equal(model_a.d_re, model_b.d_re)
    assert np.array_equal(model_a.z, model_b.z)


def test_train_updates_all_parameter_arrays():
    cs = _small_channelset()
    mining = MiningConfig(t_close=1.0, t_far=3.0, sample_rate=cs.sample_rate, seed=5)
    cfg = TrainConfig(epochs=1, batch_size=16, seed=9)
    model = init_random(cs.channels.shape[1], 12, 4, 2, seed=1)
    before = [a.copy() for a in (model.d_re, model.d_im, model.z)]
    train(model, cs, cfg, mining)
    after = [model.d_re, model.d_im, model.z]
    for b, a in zip(before, after):
        assert not np.array_equal(b, a)


def test_train_mlp_smoke():
    cs = _small_channelset()
    mining = MiningConfig(t_close=1.0, t_far=3.0, sample_rate=cs.sample_rate, seed=5)
    cfg = TrainConfig(epochs=3, batch_size=16, learning_rate=1e-3, seed=9)
    model = mlp_init(cs.channels.shape[1], seed=2, hidden=(16, 8))
    report = train(model, cs, cfg, mining)
    assert len(report.epoch_losses) == 3
    assert all(math.isfinite(l) for l in report.epoch_losses)
    assert report.epoch_losses[-1] < report.epoch_losses[0]


def test_train_counts_skipped_degenerate_triplets():
    cs = _small_channelset()
    channels = cs.channels.copy()
    # zero out a handful of rows: triplets touching them are uncharitable
    for row in (10, 40, 70, 100, 130):
        channels[row] = 0.0
    broken = ChannelSet(channels=channels, positions=cs.positions,
                        sample_rate=cs.sample_rate)
    mining = MiningConfig(t_close=1.0, t_far=3.0, sample_rate=cs.sample_rate, seed=5)
    cfg = TrainConfig(epochs=2, batch_size=16, seed=9)
    model = init_random(channels.shape[1], 12, 4, 2, seed=1)
    report = train(model, broken, cfg, mining)
    assert report.skipped > 0
    assert all(math.isfinite(l) for l in report.epoch_losses)


def test_train_epochs_zero_is_a_no_op():
    cs = _small_channelset()
    mining = MiningConfig(t_close=1.0, t_far=3.0, sample_rate=cs.sample_rate, seed=5)
    cfg = TrainConfig(epochs=0, batch_size=16, seed=9)
    model = init_random(cs.channels.shape[1], 12, 4, 2, seed=1)
    before = model.d_re.copy()
    report = train(model, cs, cfg, mining)
    assert report.epoch_losses == []
    assert np.array_equal(model.d_re, before)
