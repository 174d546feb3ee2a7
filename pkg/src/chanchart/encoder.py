"""Charting encoders: the sparse-correlation hybrid model and an MLP baseline.

The hybrid encoder maps a channel vector h to chart coordinates in five
steps: correlate against a dictionary of reference channels (a = D^H h),
take moduli (b = |a|), keep the k largest entries, normalize them to sum to
one, and output the weighted average of the corresponding chart anchors
(z = Z d).  Both the dictionary D (stored as a real/imaginary pair) and the
anchor matrix Z are trainable.  The whole map is invariant to scaling and
global phase of the input by construction.

Backward passes are hand-derived reverse mode; batched variants exist for
the trainer and evaluator hot paths and must agree with the per-sample
reference implementations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .metricspace import distance_matrix
from .isomap import isomap
from .rng import SplitMix64


class DegenerateInputError(ValueError):
    """Input that the encoder cannot chart (all kept correlations zero, or zero vector)."""


@dataclass
class EncoderParams:
    """Hybrid encoder parameters: dictionary (as a real pair) and chart anchors."""

    d_re: np.ndarray  # (m, n_init)
    d_im: np.ndarray  # (m, n_init)
    z: np.ndarray     # (d_out, n_init)
    k: int

    def __post_init__(self):
        if self.d_re.shape != self.d_im.shape:
            raise ValueError("d_re and d_im shapes differ")
        if self.z.shape[1] != self.d_re.shape[1]:
            raise ValueError("z column count must match dictionary column count")
        if not 1 <= self.k <= self.d_re.shape[1]:
            raise ValueError("k must be in [1, n_init]")

    @property
    def m(self) -> int:
        return self.d_re.shape[0]

    @property
    def n_init(self) -> int:
        return self.d_re.shape[1]

    @property
    def d_out(self) -> int:
        return self.z.shape[0]

    def dictionary(self) -> np.ndarray:
        return self.d_re + 1j * self.d_im


@dataclass
class ForwardCache:
    """Intermediates of one hybrid forward pass, as needed by backward."""

    a_re: np.ndarray
    a_im: np.ndarray
    b: np.ndarray
    kept: np.ndarray
    s: float
    d: np.ndarray
    z_out: np.ndarray


@dataclass
class MlpParams:
    """Bias-free dense stack; weights[i] has shape (out_i, in_i), dims chain."""

    weights: list = field(default_factory=list)

    def __post_init__(self):
        for a, b in zip(self.weights, self.weights[1:]):
            if b.shape[1] != a.shape[0]:
                raise ValueError("layer dimensions do not chain")

    @property
    def m(self) -> int:
        return self.weights[0].shape[1] // 2

    @property
    def d_out(self) -> int:
        return self.weights[-1].shape[0]


def hard_threshold(v: np.ndarray, k: int):
    """Keep the k largest entries (ties toward the lower index), zero the rest.

    Returns (thresholded copy, kept index array sorted ascending).  k beyond
    the vector length keeps everything.
    """
    v = np.asarray(v)
    if k < 1:
        raise ValueError("k must be >= 1")
    n = v.shape[0]
    if k >= n:
        return v.copy(), np.arange(n)
    order = np.argsort(-v, kind="stable")
    kept = np.sort(order[:k])
    out = np.zeros_like(v)
    out[kept] = v[kept]
    return out, kept


def forward(p: EncoderParams, h: np.ndarray):
    """Chart one channel vector; returns (z, cache).

    Raises DegenerateInputError when every kept correlation modulus is zero
    (the normalizer would vanish).  The correlation a = D^H h is evaluated
    with real matvecs and the modulus as sqrt(re^2 + im^2): under those
    operations, exact power-of-two input scalings and quarter-turn phase
    rotations reproduce the output bit-for-bit.
    """
    h = np.asarray(h, dtype=np.complex128)
    h_re = np.ascontiguousarray(h.real)
    h_im = np.ascontiguousarray(h.imag)
    a_re = p.d_re.T @ h_re + p.d_im.T @ h_im
    a_im = p.d_re.T @ h_im - p.d_im.T @ h_re
    b = np.sqrt(a_re * a_re + a_im * a_im)
    _, ht_kept = hard_threshold(b, p.k)
    kept = ht_kept[b[ht_kept] > 0.0]
    if kept.size == 0:
        raise DegenerateInputError("degenerate correlation: channel uncorrelated with every kept column")
    s = float(np.sum(b[kept]))
    d = np.zeros(p.n_init)
    d[kept] = b[kept] / s
    z = p.z @ d
    cache = ForwardCache(a_re=a_re, a_im=a_im, b=b, kept=kept, s=s, d=d, z_out=z)
    return z, cache


def backward(p: EncoderParams, cache: ForwardCache, h: np.ndarray, gz: np.ndarray):
    """Gradients of (gz . z) w.r.t. (d_re, d_im, z) for one forward pass.

    Gradient flows only through the kept indices; the modulus subgradient at
    zero is zero.  Returns dense (m, n_init), (m, n_init), (d_out, n_init)
    arrays, zero outside the kept columns.
    """
    h = np.asarray(h, dtype=np.complex128)
    gz = np.asarray(gz, dtype=np.float64)
    kept = cache.kept
    gz_mat = np.outer(gz, cache.d)
    gd = p.z.T @ gz
    inner = float(np.dot(gd[kept], cache.d[kept]))
    gc = (gd[kept] - inner) / cache.s
    ga_re = gc * cache.a_re[kept] / cache.b[kept]
    ga_im = gc * cache.a_im[kept] / cache.b[kept]
    gd_re = np.zeros((p.m, p.n_init))
    gd_im = np.zeros((p.m, p.n_init))
    gd_re[:, kept] = np.outer(h.real, ga_re) + np.outer(h.imag, ga_im)
    gd_im[:, kept] = np.outer(h.imag, ga_re) - np.outer(h.real, ga_im)
    return gd_re, gd_im, gz_mat


@dataclass
class BatchCache:
    """Intermediates of a batched hybrid forward; rows with ok=False are degenerate."""

    a_re: np.ndarray    # (n_samples, n_init)
    a_im: np.ndarray
    b: np.ndarray
    kept_mask: np.ndarray  # bool (n_samples, n_init)
    s: np.ndarray          # (n_samples,)
    d: np.ndarray          # (n_samples, n_init)
    ok: np.ndarray         # bool (n_samples,)


def forward_batch(p: EncoderParams, channels: np.ndarray):
    """Batched hybrid forward over rows of `channels`; returns (z, cache).

    Degenerate rows chart to zero and are flagged in cache.ok instead of
    raising, so callers can skip and count them.
    """
    channels = np.asarray(channels, dtype=np.complex128)
    h_re = np.ascontiguousarray(channels.real)
    h_im = np.ascontiguousarray(channels.imag)
    a_re = h_re @ p.d_re + h_im @ p.d_im
    a_im = h_im @ p.d_re - h_re @ p.d_im
    b = np.sqrt(a_re * a_re + a_im * a_im)
    n, n_init = b.shape
    kept_mask = np.zeros((n, n_init), dtype=bool)
    if p.k >= n_init:
        kept_mask[:] = b > 0.0
    else:
        order = np.argsort(-b, axis=1, kind="stable")
        rows = np.repeat(np.arange(n), p.k)
        kept_mask[rows, order[:, : p.k].ravel()] = True
        kept_mask &= b > 0.0
    s = np.sum(np.where(kept_mask, b, 0.0), axis=1)
    ok = s > 0.0
    safe_s = np.where(ok, s, 1.0)
    d = np.where(kept_mask, b, 0.0) / safe_s[:, None]
    d[~ok] = 0.0
    z = d @ p.z.T
    return z, BatchCache(a_re=a_re, a_im=a_im, b=b, kept_mask=kept_mask, s=s, d=d, ok=ok)


def backward_batch(p: EncoderParams, cache: BatchCache, channels: np.ndarray, gz: np.ndarray):
    """Batch-summed hybrid gradients; rows flagged not-ok contribute nothing."""
    channels = np.asarray(channels, dtype=np.complex128)
    gz = np.array(gz, dtype=np.float64)
    gz[~cache.ok] = 0.0
    gz_mat = gz.T @ cache.d
    gd = gz @ p.z  # (n_samples, n_init)
    inner = np.sum(gd * cache.d, axis=1)
    safe_s = np.where(cache.ok, cache.s, 1.0)
    gc = np.where(cache.kept_mask, gd - inner[:, None], 0.0) / safe_s[:, None]
    gc[~cache.ok] = 0.0
    safe_b = np.where(cache.b > 0.0, cache.b, 1.0)
    ga_re = gc * cache.a_re / safe_b
    ga_im = gc * cache.a_im / safe_b
    # contiguous copies: matmul on strided real/imag views bypasses BLAS
    h_re = np.ascontiguousarray(channels.real)
    h_im = np.ascontiguousarray(channels.imag)
    gd_re = h_re.T @ ga_re + h_im.T @ ga_im
    gd_im = h_im.T @ ga_re - h_re.T @ ga_im
    return gd_re, gd_im, gz_mat


def init_smart(cs, n_init: int, k_iso: int, k: int, d_out: int, seed: int) -> EncoderParams:
    """Dictionary = a seeded random subset of collected channels; anchors = its Isomap chart."""
    n = cs.channels.shape[0]
    if n_init > n:
        raise ValueError(f"n_init={n_init} exceeds dataset size {n}")
    rng = SplitMix64(seed)
    chosen = rng.sample(n, n_init)
    rows = cs.channels[chosen]
    emb = isomap(distance_matrix(rows), k_iso, d_out)
    d = rows.T
    return EncoderParams(
        d_re=np.ascontiguousarray(d.real),
        d_im=np.ascontiguousarray(d.imag),
        z=np.ascontiguousarray(emb.coords.T),
        k=k,
    )


def _xavier(rng: SplitMix64, shape, fan_in: int, fan_out: int) -> np.ndarray:
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return (rng.uniforms(int(np.prod(shape))) * 2.0 - 1.0).reshape(shape) * bound


def init_random(m: int, n_init: int, k: int, d_out: int, seed: int) -> EncoderParams:
    """Xavier-uniform hybrid parameters; draw order d_re, d_im, z (row-major each)."""
    rng = SplitMix64(seed)
    d_re = _xavier(rng, (m, n_init), m, n_init)
    d_im = _xavier(rng, (m, n_init), m, n_init)
    z = _xavier(rng, (d_out, n_init), n_init, d_out)
    return EncoderParams(d_re=d_re, d_im=d_im, z=z, k=k)


MLP_HIDDEN = (1024, 512, 256, 128, 64)


def mlp_init(m: int, seed: int, hidden=MLP_HIDDEN, d_out: int = 2) -> MlpParams:
    """Xavier-initialized bias-free MLP on the stacked [Re; Im] channel vector."""
    dims = (2 * m,) + tuple(hidden) + (d_out,)
    rng = SplitMix64(seed)
    weights = []
    for fan_in, fan_out in zip(dims, dims[1:]):
        weights.append(_xavier(rng, (fan_out, fan_in), fan_in, fan_out))
    return MlpParams(weights=weights)


def mlp_forward(p: MlpParams, h: np.ndarray):
    """Chart one channel through the MLP; returns (z, cache of activations)."""
    h = np.asarray(h, dtype=np.complex128)
    x = np.concatenate([h.real, h.imag])
    norm = float(np.linalg.norm(x))
    if norm == 0.0:
        raise DegenerateInputError("zero channel cannot be normalized")
    x = x / norm
    activations = [x]
    for i, w in enumerate(p.weights):
        x = w @ x
        if i < len(p.weights) - 1:
            x = np.maximum(x, 0.0)
        activations.append(x)
    return activations[-1], activations


def mlp_backward(p: MlpParams, activations: list, gz: np.ndarray):
    """Gradients of (gz . z) w.r.t. each weight matrix."""
    g = np.asarray(gz, dtype=np.float64)
    grads = [None] * len(p.weights)
    for i in range(len(p.weights) - 1, -1, -1):
        if i < len(p.weights) - 1:
            g = g * (activations[i + 1] > 0.0)
        grads[i] = np.outer(g, activations[i])
        g = p.weights[i].T @ g
    return grads


def mlp_forward_batch(p: MlpParams, channels: np.ndarray):
    """Batched MLP forward; returns (z (n, d_out), activations, ok mask)."""
    channels = np.asarray(channels, dtype=np.complex128)
    x = np.concatenate([channels.real, channels.imag], axis=1)
    norms = np.linalg.norm(x, axis=1)
    ok = norms > 0.0
    x = x / np.where(ok, norms, 1.0)[:, None]
    x[~ok] = 0.0
    activations = [x]
    for i, w in enumerate(p.weights):
        x = x @ w.T
        if i < len(p.weights) - 1:
            x = np.maximum(x, 0.0)
        activations.append(x)
    return activations[-1], activations, ok


def mlp_backward_batch(p: MlpParams, activations: list, gz: np.ndarray, ok: np.ndarray):
    """Batch-summed MLP weight gradients; rows with ok=False contribute nothing."""
    g = np.array(gz, dtype=np.float64)
    g[~ok] = 0.0
    grads = [None] * len(p.weights)
    for i in range(len(p.weights) - 1, -1, -1):
        if i < len(p.weights) - 1:
            g = g * (activations[i + 1] > 0.0)
        grads[i] = g.T @ activations[i]
        g = g @ p.weights[i]
    return grads


def hybrid_param_count(m: int, n_init: int, d_out: int) -> int:
    """Real trainable parameters of the hybrid encoder: 2*m*n_init + d_out*n_init."""
    return 2 * m * n_init + d_out * n_init


def mlp_param_count(dims) -> int:
    """Trainable parameters of a bias-free dense stack over the given dims chain."""
    return sum(a * b for a, b in zip(dims, dims[1:]))


def count_params(model) -> int:
    """Trainable parameter count of either encoder type."""
    if isinstance(model, EncoderParams):
        return model.d_re.size + model.d_im.size + model.z.size
    if isinstance(model, MlpParams):
        return sum(w.size for w in model.weights)
    raise TypeError(f"unsupported model type {type(model).__name__}")


def chart_batch(model, channels: np.ndarray):
    """Chart many channels with either encoder; returns (z, ok mask)."""
    if isinstance(model, EncoderParams):
        z, cache = forward_batch(model, channels)
        return z, cache.ok
    if isinstance(model, MlpParams):
        z, _, ok = mlp_forward_batch(model, channels)
        return z, ok
    if callable(model):
        z = np.asarray(model(channels), dtype=np.float64)
        return z, np.ones(z.shape[0], dtype=bool)
    raise TypeError(f"unsupported model type {type(model).__name__}")
