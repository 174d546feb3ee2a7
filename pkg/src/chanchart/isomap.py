"""From-scratch Isomap over a precomputed distance matrix.

Pipeline: symmetrized k-nearest-neighbor graph, all-pairs shortest paths
(Dijkstra per source, with minimum-cross-edge bridging when the graph falls
apart into components), then classical multidimensional scaling via a cyclic
Jacobi eigensolver.  Only used at encoder-initialization scale (a few
hundred points), so everything favors determinism over asymptotics.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np


@dataclass
class NeighborGraph:
    """Undirected weighted graph; adjacency[i] holds (neighbor, weight) sorted by neighbor."""

    n: int
    adjacency: list


@dataclass
class Embedding:
    """MDS output: coords is (n, d_out); eigenvalues the retained spectrum, non-increasing."""

    coords: np.ndarray
    eigenvalues: np.ndarray


def knn_graph(dist: np.ndarray, k_iso: int) -> NeighborGraph:
    """Symmetrized k-nearest-neighbor graph of a distance matrix.

    Each node keeps its k_iso nearest others (ties broken toward the lower
    index); the edge set is the union over directions, so a node may end up
    with more than k_iso incident edges.
    """
    dist = np.asarray(dist, dtype=np.float64)
    n = dist.shape[0]
    if not 1 <= k_iso < n:
        raise ValueError(f"k_iso must be in [1, {n - 1}], got {k_iso}")
    edges = set()
    for i in range(n):
        order = np.argsort(dist[i], kind="stable")
        picked = 0
        for j in order:
            j = int(j)
            if j == i:
                continue
            edges.add((min(i, j), max(i, j)))
            picked += 1
            if picked == k_iso:
                break
    adjacency = [[] for _ in range(n)]
    for i, j in sorted(edges):
        w = float(dist[i, j])
        adjacency[i].append((j, w))
        adjacency[j].append((i, w))
    for lst in adjacency:
        lst.sort()
    return NeighborGraph(n=n, adjacency=adjacency)


def _components(g: NeighborGraph) -> np.ndarray:
    labels = np.full(g.n, -1, dtype=np.int64)
    comp = 0
    for start in range(g.n):
        if labels[start] >= 0:
            continue
        stack = [start]
        labels[start] = comp
        while stack:
            u = stack.pop()
            for v, _ in g.adjacency[u]:
                if labels[v] < 0:
                    labels[v] = comp
                    stack.append(v)
        comp += 1
    return labels


def _bridge(g: NeighborGraph, dist: np.ndarray) -> None:
    """Connect components by repeatedly adding the minimum-weight cross edge."""
    labels = _components(g)
    while labels.max() > 0:
        cross = labels[:, None] != labels[None, :]
        masked = np.where(cross, dist, np.inf)
        flat = int(np.argmin(masked))
        i, j = divmod(flat, g.n)
        w = float(dist[i, j])
        g.adjacency[i].append((j, w))
        g.adjacency[j].append((i, w))
        g.adjacency[i].sort()
        g.adjacency[j].sort()
        labels = _components(g)


def geodesic_distances(g: NeighborGraph, bridge_dist: np.ndarray | None = None) -> np.ndarray:
    """All-pairs shortest-path lengths over the graph.

    A disconnected graph is first bridged using the original distance matrix
    (`bridge_dist`): the single minimum-weight inter-component edge is added
    repeatedly until one component remains.  Without `bridge_dist` a
    disconnected graph raises.  The result takes each unordered pair from
    the lower-source Dijkstra run and is therefore exactly symmetric.
    """
    if _components(g).max() > 0:
        if bridge_dist is None:
            raise ValueError("graph is disconnected and no distance matrix was given for bridging")
        _bridge(g, np.asarray(bridge_dist, dtype=np.float64))
    n = g.n
    out = np.zeros((n, n))
    for src in range(n):
        d = _dijkstra(g, src)
        out[src, src + 1:] = d[src + 1:]
    out = out + out.T
    return out


def _dijkstra(g: NeighborGraph, src: int) -> np.ndarray:
    dist = np.full(g.n, np.inf)
    dist[src] = 0.0
    done = np.zeros(g.n, dtype=bool)
    heap = [(0.0, src)]
    while heap:
        du, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, w in g.adjacency[u]:
            if done[v]:
                continue
            cand = du + w
            if cand < dist[v]:
                dist[v] = cand
                heapq.heappush(heap, (cand, v))
    return dist


def jacobi_eigh(a: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100):
    """Eigendecomposition of a dense symmetric matrix by cyclic Jacobi rotations.

    Sweeps row by row until the off-diagonal Frobenius norm drops below
    tol * ||a||_F (or max_sweeps is hit).  Returns (eigenvalues, eigenvectors)
    unsorted, eigenvectors in columns.
    """
    a = np.array(a, dtype=np.float64)
    n = a.shape[0]
    v = np.eye(n)
    scale = math.sqrt(float(np.sum(a * a)))
    if scale == 0.0 or n == 1:
        return np.diagonal(a).copy(), v

    def offdiag() -> float:
        off = a - np.diag(np.diagonal(a))
        return math.sqrt(float(np.sum(off * off)))

    for _ in range(max_sweeps):
        if offdiag() <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    return np.diagonal(a).copy(), v


def classical_mds(dist: np.ndarray, d_out: int) -> Embedding:
    """Classical MDS of a symmetric zero-diagonal distance matrix.

    Double-centers the squared distances, takes the top d_out eigenpairs of
    the resulting Gram matrix, and scales eigenvectors by sqrt(max(eig, 0)).
    Each eigenvector's sign is fixed so its largest-magnitude entry is
    positive, making the output reproducible bit-for-bit.
    """
    dist = np.asarray(dist, dtype=np.float64)
    n = dist.shape[0]
    if d_out < 1:
        raise ValueError("d_out must be >= 1")
    if n < d_out:
        raise ValueError(f"need at least d_out={d_out} points, got {n}")
    d2 = dist * dist
    row = d2.mean(axis=1)
    grand = d2.mean()
    b = -0.5 * (d2 - row[:, None] - row[None, :] + grand)
    upper = np.triu(b)
    b = upper + np.triu(b, 1).T
    vals, vecs = jacobi_eigh(b)
    order = np.argsort(-vals, kind="stable")[:d_out]
    top_vals = vals[order]
    coords = vecs[:, order] * np.sqrt(np.clip(top_vals, 0.0, None))[None, :]
    for c in range(coords.shape[1]):
        col = coords[:, c]
        peak = int(np.argmax(np.abs(col)))
        if col[peak] < 0:
            coords[:, c] = -col
    return Embedding(coords=coords, eigenvalues=top_vals)


def isomap(dist: np.ndarray, k_iso: int, d_out: int) -> Embedding:
    """knn_graph -> geodesic_distances -> classical_mds."""
    g = knn_graph(dist, k_iso)
    geo = geodesic_distances(g, bridge_dist=dist)
    return classical_mds(geo, d_out)
