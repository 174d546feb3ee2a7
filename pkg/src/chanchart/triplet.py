"""Temporal triplet mining and the triplet margin loss with subgradients.

Triplets exploit sampling-time adjacency: for an anchor sample i, a close
sample j lies within S_c samples and a far sample k between S_c+1 and S_f
samples away, where S_c and S_f convert time windows to sample counts at
the dataset's sampling rate.  The loss max(0, d+ - d- + m) pulls the close
chart point toward the anchor and pushes the far one away.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .rng import SplitMix64


class TripletIndex(NamedTuple):
    anchor: int
    close: int
    far: int


@dataclass
class MiningConfig:
    """Time windows (seconds), sampling rate, triplets per anchor, and draw seed."""

    t_close: float
    t_far: float
    sample_rate: float
    per_anchor: int = 1
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.t_close < self.t_far:
            raise ValueError("need 0 < t_close < t_far")
        if self.per_anchor < 1:
            raise ValueError("per_anchor must be >= 1")

    @property
    def s_close(self) -> int:
        return int(math.floor(self.t_close * self.sample_rate + 0.5))

    @property
    def s_far(self) -> int:
        return int(math.floor(self.t_far * self.sample_rate + 0.5))


def mine_triplets(n: int, cfg: MiningConfig) -> list[TripletIndex]:
    """Draw per_anchor seeded triplets for every anchor index in [0, n).

    Close candidates are [i-S_c, i+S_c] \\ {i} clipped to [0, n); far
    candidates are [i-S_f, i-S_c-1] and [i+S_c+1, i+S_f] clipped likewise.
    Draw order is fixed (anchors ascending, then repeats, close before far)
    so the output is a pure function of (n, cfg).  Anchors whose far set is
    empty after clipping are skipped entirely and consume no draws.
    """
    s_c = cfg.s_close
    s_f = cfg.s_far
    rng = SplitMix64(cfg.seed)
    out: list[TripletIndex] = []
    for i in range(n):
        lo_far_l = max(0, i - s_f)
        n_left = max(0, (i - s_c - 1) - lo_far_l + 1)
        lo_far_r = i + s_c + 1
        n_right = max(0, min(n - 1, i + s_f) - lo_far_r + 1)
        n_far = n_left + n_right
        if n_far == 0:
            continue
        lo_close = max(0, i - s_c)
        n_close = min(n - 1, i + s_c) - lo_close  # window size minus the anchor itself
        if n_close <= 0:
            raise ValueError("empty close window: need n >= 2 and S_c >= 1")
        for _ in range(cfg.per_anchor):
            j = lo_close + rng.randbelow(n_close)
            if j >= i:
                j += 1
            r = rng.randbelow(n_far)
            k = lo_far_l + r if r < n_left else lo_far_r + (r - n_left)
            out.append(TripletIndex(i, j, k))
    return out


def triplet_loss(z, z_plus, z_minus, m: float):
    """Margin loss for one triplet; returns (loss, d_plus, d_minus)."""
    z = np.asarray(z, dtype=np.float64)
    d_plus = float(np.linalg.norm(z - np.asarray(z_plus, dtype=np.float64)))
    d_minus = float(np.linalg.norm(z - np.asarray(z_minus, dtype=np.float64)))
    return max(0.0, d_plus - d_minus + m), d_plus, d_minus


def triplet_loss_grad(z, z_plus, z_minus, m: float):
    """Subgradients of the margin loss w.r.t. (z, z_plus, z_minus).

    Inactive loss gives three zero vectors; a coincident pair (zero
    distance) contributes a zero subgradient for its branch.
    """
    z = np.asarray(z, dtype=np.float64)
    z_plus = np.asarray(z_plus, dtype=np.float64)
    z_minus = np.asarray(z_minus, dtype=np.float64)
    loss, d_plus, d_minus = triplet_loss(z, z_plus, z_minus, m)
    gz = np.zeros_like(z)
    gzp = np.zeros_like(z)
    gzm = np.zeros_like(z)
    if loss == 0.0:
        return gz, gzp, gzm
    if d_plus > 0.0:
        u = (z - z_plus) / d_plus
        gz += u
        gzp -= u
    if d_minus > 0.0:
        u = (z - z_minus) / d_minus
        gz -= u
        gzm += u
    return gz, gzp, gzm


def triplet_loss_batch(z, z_plus, z_minus, m: float):
    """Row-wise margin loss; returns (loss, d_plus, d_minus) vectors."""
    d_plus = np.linalg.norm(z - z_plus, axis=1)
    d_minus = np.linalg.norm(z - z_minus, axis=1)
    return np.maximum(0.0, d_plus - d_minus + m), d_plus, d_minus


def triplet_loss_grad_batch(z, z_plus, z_minus, m: float):
    """Row-wise loss subgradients; returns (loss, gz, gz_plus, gz_minus)."""
    loss, d_plus, d_minus = triplet_loss_batch(z, z_plus, z_minus, m)
    active = loss > 0.0
    wp = np.where(active & (d_plus > 0.0), 1.0 / np.where(d_plus > 0.0, d_plus, 1.0), 0.0)
    wm = np.where(active & (d_minus > 0.0), 1.0 / np.where(d_minus > 0.0, d_minus, 1.0), 0.0)
    up = (z - z_plus) * wp[:, None]
    um = (z - z_minus) * wm[:, None]
    return loss, up - um, -up, um
