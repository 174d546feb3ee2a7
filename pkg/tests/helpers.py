"""Shared oracles for the test suite.

Everything here is written independently of the package internals -- plain
loops and well-known textbook formulations -- so that agreement between an
oracle and the fast implementation is meaningful evidence, not a tautology.
"""

import numpy as np


def procrustes_residual(reference: np.ndarray, embedding: np.ndarray) -> float:
    """Normalized residual after the best similarity transform.

    Centers both point sets, finds the rotation (with reflection) and
    uniform scale aligning ``embedding`` to ``reference``, and returns
    ||reference - s * embedding @ R||^2 / ||reference||^2.
    """
    x = reference - reference.mean(axis=0)
    y = embedding - embedding.mean(axis=0)
    u, s, vt = np.linalg.svd(y.T @ x)
    r = u @ vt
    scale = s.sum() / (y * y).sum()
    resid = x - scale * (y @ r)
    return float((resid * resid).sum() / (x * x).sum())


def central_difference(fn, x: np.ndarray, eps: float = 1e-6) -> np.ndarray:
    """Central finite-difference gradient of scalar fn at x, one entry at a time."""
    x = np.asarray(x, dtype=np.float64)
    grad = np.zeros_like(x)
    flat = x.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + eps
        hi = fn(x)
        flat[i] = orig - eps
        lo = fn(x)
        flat[i] = orig
        gflat[i] = (hi - lo) / (2.0 * eps)
    return grad


def relative_error(a: np.ndarray, b: np.ndarray) -> float:
    """||a - b|| / max(||a||, ||b||, tiny)."""
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    denom = max(float(np.linalg.norm(a)), float(np.linalg.norm(b)), 1e-300)
    return float(np.linalg.norm(a - b)) / denom


def floyd_warshall(weights: np.ndarray) -> np.ndarray:
    """All-pairs shortest paths on a dense weight matrix (inf = no edge)."""
    d = np.array(weights, dtype=np.float64)
    n = d.shape[0]
    np.fill_diagonal(d, 0.0)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                via = d[i, k] + d[k, j]
                if via < d[i, j]:
                    d[i, j] = via
    return d


def brute_ranks(points: np.ndarray) -> np.ndarray:
    """rank[i, j] = position of j in i's neighbor list (nearest = 1).

    Neighbors are ordered by squared Euclidean distance to i, ties broken
    toward the lower index; i itself is excluded and rank[i, i] = 0.
    """
    n = points.shape[0]
    ranks = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        d2 = [float(((points[j] - points[i]) ** 2).sum()) for j in range(n)]
        order = sorted((j for j in range(n) if j != i), key=lambda j: (d2[j], j))
        for pos, j in enumerate(order):
            ranks[i, j] = pos + 1
    return ranks


def brute_trustworthiness(positions: np.ndarray, chart: np.ndarray, k: int) -> float:
    """Direct transcription of the trustworthiness sum over false neighbors."""
    n = positions.shape[0]
    pos_rank = brute_ranks(positions)
    chart_rank = brute_ranks(chart)
    total = 0
    for i in range(n):
        for j in range(n):
            if j == i:
                continue
            if chart_rank[i, j] <= k and pos_rank[i, j] > k:
                total += pos_rank[i, j] - k
    return 1.0 - (2.0 / (n * k * (2 * n - 3 * k - 1))) * total


def brute_continuity(positions: np.ndarray, chart: np.ndarray, k: int) -> float:
    """Continuity is trustworthiness with the two spaces swapped."""
    return brute_trustworthiness(chart, positions, k)
