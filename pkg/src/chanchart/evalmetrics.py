"""Trustworthiness and continuity of a learned chart against true positions.

Trustworthiness penalizes chart neighborhoods containing points that are
not true spatial neighbors; continuity penalizes true neighbors missing
from chart neighborhoods.  Both use exact integer rank arithmetic so that
independent implementations agree to the last bit, and are reported over a
grid of neighborhood sizes expressed as fractions of the evaluated set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .encoder import chart_batch

DEFAULT_K_GRID = (0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.08, 0.10)


def rank_matrix(points: np.ndarray) -> np.ndarray:
    """Entry (i, j), i != j: rank of j by ascending distance to i (nearest = 1).

    Ranks run over the other n-1 points; distance ties break toward the
    lower index (stable order).  Ranking uses squared Euclidean distances,
    which is order-equivalent.  The diagonal is set to 0 and carries no
    meaning.
    """
    x = np.asarray(points, dtype=np.float64)
    n = x.shape[0]
    if n < 2:
        raise ValueError("need at least two points to rank")
    diff = x[:, None, :] - x[None, :, :]
    sq = np.einsum("ijk,ijk->ij", diff, diff)
    order = np.argsort(sq, axis=1, kind="stable")
    rows = np.arange(n)
    pos = np.empty((n, n), dtype=np.int64)
    pos[rows[:, None], order] = np.arange(n)[None, :]
    self_pos = pos[rows, rows]
    ranks = pos + 1 - (pos > self_pos[:, None])
    ranks[rows, rows] = 0
    return ranks


def _max_k(n: int) -> int:
    return (2 * n - 2) // 3


def _check_k(n: int, k: int) -> None:
    if not 1 <= k <= _max_k(n):
        raise ValueError(f"K={k} outside [1, {_max_k(n)}] for n={n}")


def _score(rank_ranks: np.ndarray, nn_ranks: np.ndarray, k: int) -> float:
    """1 - normalized penalty over points in the nn-space K-NN but not the
    rank-space K-NN, each costing its rank-space rank minus K."""
    n = rank_ranks.shape[0]
    mask = (nn_ranks >= 1) & (nn_ranks <= k) & (rank_ranks > k)
    penalty = int(np.sum((rank_ranks - k) * mask))
    return 1.0 - (2.0 * penalty) / (n * k * (2 * n - 3 * k - 1))


def trustworthiness(positions: np.ndarray, chart: np.ndarray, k: int) -> float:
    """Penalizes false chart neighbors, ranked by their position-space rank."""
    if positions.shape[0] != chart.shape[0]:
        raise ValueError("positions and chart row counts differ")
    _check_k(positions.shape[0], k)
    return _score(rank_matrix(positions), rank_matrix(chart), k)


def continuity(positions: np.ndarray, chart: np.ndarray, k: int) -> float:
    """Penalizes missing true neighbors, ranked by their chart-space rank."""
    if positions.shape[0] != chart.shape[0]:
        raise ValueError("positions and chart row counts differ")
    _check_k(positions.shape[0], k)
    return _score(rank_matrix(chart), rank_matrix(positions), k)


@dataclass
class MetricsReport:
    """TW/CT rows over the neighborhood grid, plus evaluation bookkeeping."""

    rows: list                # (K, K_frac, trustworthiness, continuity)
    n_eval: int
    skipped: int

    def to_csv(self) -> str:
        lines = ["K,K_frac,trustworthiness,continuity"]
        for k, frac, tw, ct in self.rows:
            lines.append(f"{k},{frac!r},{tw!r},{ct!r}")
        return "\n".join(lines) + "\n"


def evaluate(model, cs, indices, k_grid=DEFAULT_K_GRID) -> MetricsReport:
    """Chart the selected samples and score TW/CT at each grid fraction.

    K = max(1, round(frac * n_eval)) per fraction.  Degenerate (unchartable)
    samples are dropped and counted; fewer than 3 chartable samples is an
    error.  The model may be EncoderParams, MlpParams, or any callable
    mapping an (n, M) channel block to an (n, d) chart block.
    """
    indices = np.asarray(indices, dtype=np.int64)
    chart, ok = chart_batch(model, cs.channels[indices])
    skipped = int(np.sum(~ok))
    chart = chart[ok]
    positions = np.asarray(cs.positions, dtype=np.float64)[indices][ok]
    n_eval = chart.shape[0]
    if n_eval < 3:
        raise ValueError("fewer than 3 chartable samples")
    rank_pos = rank_matrix(positions)
    rank_chart = rank_matrix(chart)
    rows = []
    for frac in k_grid:
        k = max(1, int(math.floor(frac * n_eval + 0.5)))
        _check_k(n_eval, k)
        tw = _score(rank_pos, rank_chart, k)
        ct = _score(rank_chart, rank_pos, k)
        rows.append((k, float(frac), tw, ct))
    return MetricsReport(rows=rows, n_eval=n_eval, skipped=skipped)
