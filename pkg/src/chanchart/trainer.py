"""Dataset split, Adam, and minibatch triplet training for either encoder.

Each step stacks the anchor/close/far members of a batch into one matrix,
runs a single shared-parameter batched forward, backpropagates the margin
loss through the encoder, averages gradients over the processed triplets,
and applies one Adam update.  Degenerate members (unchartable channels)
knock out their whole triplet, which is counted rather than trained on.

Seeding: the train/eval split uses substream(seed, 0), epoch shuffles use
substream(seed, 1), and mining uses the MiningConfig's own seed, so every
stage is reproducible in isolation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import encoder as enc
from .rng import SplitMix64, substream
from .triplet import MiningConfig, mine_triplets, triplet_loss_grad_batch


@dataclass
class TrainConfig:
    epochs: int = 30
    batch_size: int = 64
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    margin: float = 1.0
    split_ratio: float = 0.7
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.split_ratio < 1.0:
            raise ValueError("split_ratio must be in (0, 1)")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass
class OptimizerState:
    """Adam accumulators, one pair per parameter array."""

    m: list = field(default_factory=list)
    v: list = field(default_factory=list)
    step: int = 0

    @classmethod
    def for_params(cls, params: list) -> "OptimizerState":
        return cls(m=[np.zeros_like(p) for p in params],
                   v=[np.zeros_like(p) for p in params])


@dataclass
class TrainReport:
    epoch_losses: list
    params: object
    skipped: int


def split_dataset(n: int, ratio: float, seed: int):
    """Seeded disjoint train/eval index split; both halves sorted ascending.

    Train size is round(ratio * n) (half away from zero).  Sorting keeps
    sampling-time order inside each subset so temporal mining windows stay
    meaningful on the train positions.
    """
    if n < 2:
        raise ValueError("need at least two samples to split")
    if not 0.0 < ratio < 1.0:
        raise ValueError("ratio must be in (0, 1)")
    perm = np.arange(n)
    SplitMix64(seed).shuffle(perm)
    n_train = int(np.floor(ratio * n + 0.5))
    n_train = min(max(n_train, 1), n - 1)
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])


def adam_step(state: OptimizerState, params: list, grads: list, cfg: TrainConfig) -> None:
    """One bias-corrected Adam update, in place on the parameter arrays."""
    if len(params) != len(grads) or len(params) != len(state.m):
        raise ValueError("parameter/gradient/state length mismatch")
    for p, g in zip(params, grads):
        if p.shape != g.shape:
            raise ValueError(f"shape mismatch {p.shape} vs {g.shape}")
    state.step += 1
    t = state.step
    c1 = 1.0 - cfg.beta1 ** t
    c2 = 1.0 - cfg.beta2 ** t
    for p, g, m, v in zip(params, grads, state.m, state.v):
        m *= cfg.beta1
        m += (1.0 - cfg.beta1) * g
        v *= cfg.beta2
        v += (1.0 - cfg.beta2) * (g * g)
        p -= cfg.learning_rate * (m / c1) / (np.sqrt(v / c2) + cfg.eps)


def _param_arrays(model) -> list:
    if isinstance(model, enc.EncoderParams):
        return [model.d_re, model.d_im, model.z]
    if isinstance(model, enc.MlpParams):
        return list(model.weights)
    raise TypeError(f"unsupported model type {type(model).__name__}")


def _checksum(params: list) -> float:
    return float(sum(float(np.sum(p)) for p in params))


def train(model, cs, cfg: TrainConfig, mining: MiningConfig) -> TrainReport:
    """Triplet-train the model on a split of cs; returns losses, params, skip count.

    Triplets are mined over positions within the ordered train subset, then
    mapped back to dataset indices.  All three branches of a triplet share
    the same parameter snapshot within a step (asserted by checksum).
    """
    channels = cs.channels
    n = channels.shape[0]
    train_idx, _ = split_dataset(n, cfg.split_ratio, substream(cfg.seed, 0))
    triplets = mine_triplets(int(train_idx.size), mining)
    if not triplets:
        raise ValueError("mining produced no triplets")
    trip = np.asarray(triplets, dtype=np.int64)
    anchors = train_idx[trip[:, 0]]
    closes = train_idx[trip[:, 1]]
    fars = train_idx[trip[:, 2]]

    params = _param_arrays(model)
    state = OptimizerState.for_params(params)
    shuffle_rng = SplitMix64(substream(cfg.seed, 1))
    order = np.arange(trip.shape[0])
    is_hybrid = isinstance(model, enc.EncoderParams)

    epoch_losses: list[float] = []
    skipped = 0
    for _epoch in range(cfg.epochs):
        shuffle_rng.shuffle(order)
        loss_sum = 0.0
        loss_count = 0
        for b0 in range(0, order.size, cfg.batch_size):
            sel = order[b0:b0 + cfg.batch_size]
            nb = sel.size
            idx = np.concatenate([anchors[sel], closes[sel], fars[sel]])
            rows = channels[idx]
            before = _checksum(params)
            if is_hybrid:
                z3, cache = enc.forward_batch(model, rows)
                ok3 = cache.ok
            else:
                z3, acts, ok3 = enc.mlp_forward_batch(model, rows)
            ok = ok3[:nb] & ok3[nb:2 * nb] & ok3[2 * nb:]
            n_ok = int(np.sum(ok))
            skipped += nb - n_ok
            if n_ok == 0:
                continue
            loss, gz_a, gz_p, gz_m = triplet_loss_grad_batch(
                z3[:nb], z3[nb:2 * nb], z3[2 * nb:], cfg.margin)
            loss_sum += float(np.sum(loss[ok]))
            loss_count += n_ok
            scale = np.where(ok, 1.0 / n_ok, 0.0)[:, None]
            gz3 = np.concatenate([gz_a * scale, gz_p * scale, gz_m * scale])
            if is_hybrid:
                grads = list(enc.backward_batch(model, cache, rows, gz3))
            else:
                grads = enc.mlp_backward_batch(model, acts, gz3, ok3)
            if _checksum(params) != before:
                raise AssertionError("parameters mutated during forward/backward")
            adam_step(state, params, grads, cfg)
        if loss_count == 0:
            raise enc.DegenerateInputError("all training triplets degenerate")
        epoch_losses.append(loss_sum / loss_count)
    return TrainReport(epoch_losses=epoch_losses, params=model, skipped=skipped)
