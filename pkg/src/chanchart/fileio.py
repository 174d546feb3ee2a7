"""Stable on-disk formats: binary dataset/model files, CSV and SVG writers.

Binary layouts (all little-endian, all floats IEEE float64):

Dataset, magic ``CCD1``::

    "CCD1" | u64 N | u64 M | u64 P | N*P position doubles (sample-major)
           | N*M*2 channel doubles (sample-major, each entry re then im)

Model, magic ``CCM1``::

    "CCM1" | u64 kind          kind 0 = hybrid, 1 = mlp
    hybrid: u64 M, N_init, D_out, k | d_re | d_im | z     (row-major)
    mlp:    u64 L | L+1 u64 dims | L weight matrices      (row-major,
            weight l has shape (dims[l+1], dims[l]))

Round-trips are bit-exact: float64 values pass through unchanged.  CSVs use
``,`` separators, ``.`` decimals, LF line endings, and ``repr`` floats (the
shortest string that parses back to the same double), so identical inputs
produce byte-identical files.
"""

from __future__ import annotations

import struct

import numpy as np

from .encoder import EncoderParams, MlpParams
from .synthgen import ChannelSet

MAGIC_DATASET = b"CCD1"
MAGIC_MODEL = b"CCM1"

KIND_HYBRID = 0
KIND_MLP = 1


class FileFormatError(ValueError):
    """Raised when a dataset/model file is truncated, oversized, or mislabeled."""


def _read_exact(fh, n: int, path: str, what: str) -> bytes:
    buf = fh.read(n)
    if len(buf) != n:
        raise FileFormatError(f"{path}: truncated while reading {what} "
                              f"(wanted {n} bytes, got {len(buf)})")
    return buf


def _read_u64(fh, count: int, path: str, what: str) -> tuple:
    return struct.unpack(f"<{count}Q", _read_exact(fh, 8 * count, path, what))


def _read_f64(fh, count: int, path: str, what: str) -> np.ndarray:
    buf = _read_exact(fh, 8 * count, path, what)
    return np.frombuffer(buf, dtype="<f8").copy()


def _expect_end(fh, path: str) -> None:
    if fh.read(1):
        raise FileFormatError(f"{path}: trailing bytes after expected end of file")


# ---------------------------------------------------------------------------
# dataset


def write_dataset(path: str, cs: ChannelSet) -> None:
    n, m = cs.channels.shape
    positions = np.asarray(cs.positions, dtype=np.float64)
    p = positions.shape[1]
    interleaved = np.empty((n, m, 2), dtype=np.float64)
    interleaved[:, :, 0] = cs.channels.real
    interleaved[:, :, 1] = cs.channels.imag
    with open(path, "wb") as fh:
        fh.write(MAGIC_DATASET)
        fh.write(struct.pack("<3Q", n, m, p))
        fh.write(positions.astype("<f8", copy=False).tobytes())
        fh.write(interleaved.astype("<f8", copy=False).tobytes())


def read_dataset(path: str, sample_rate: float = 7.0) -> ChannelSet:
    """Load a ``CCD1`` file.

    The file does not store the sampling rate (it belongs to the experiment
    config, not the measurements); pass it in when triplet mining will need
    it downstream.
    """
    with open(path, "rb") as fh:
        magic = _read_exact(fh, 4, path, "magic")
        if magic != MAGIC_DATASET:
            raise FileFormatError(f"{path}: bad magic {magic!r}, expected {MAGIC_DATASET!r}")
        n, m, p = _read_u64(fh, 3, path, "header")
        if n < 1 or m < 1 or p not in (2, 3):
            raise FileFormatError(f"{path}: implausible header N={n} M={m} P={p}")
        positions = _read_f64(fh, n * p, path, "positions").reshape(n, p)
        flat = _read_f64(fh, n * m * 2, path, "channels").reshape(n, m, 2)
        _expect_end(fh, path)
    channels = flat[:, :, 0] + 1j * flat[:, :, 1]
    return ChannelSet(channels=channels, positions=positions, sample_rate=sample_rate)


# ---------------------------------------------------------------------------
# models


def write_model(path: str, model) -> None:
    with open(path, "wb") as fh:
        fh.write(MAGIC_MODEL)
        if isinstance(model, EncoderParams):
            fh.write(struct.pack("<Q", KIND_HYBRID))
            fh.write(struct.pack("<4Q", model.m, model.n_init, model.d_out, model.k))
            for arr in (model.d_re, model.d_im, model.z):
                fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())
        elif isinstance(model, MlpParams):
            fh.write(struct.pack("<Q", KIND_MLP))
            dims = [model.weights[0].shape[1]] + [w.shape[0] for w in model.weights]
            fh.write(struct.pack("<Q", len(model.weights)))
            fh.write(struct.pack(f"<{len(dims)}Q", *dims))
            for w in model.weights:
                fh.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
        else:
            raise TypeError(f"cannot serialize model of type {type(model).__name__}")


def read_model(path: str):
    """Load a ``CCM1`` file into EncoderParams or MlpParams."""
    with open(path, "rb") as fh:
        magic = _read_exact(fh, 4, path, "magic")
        if magic != MAGIC_MODEL:
            raise FileFormatError(f"{path}: bad magic {magic!r}, expected {MAGIC_MODEL!r}")
        (kind,) = _read_u64(fh, 1, path, "model kind")
        if kind == KIND_HYBRID:
            m, n_init, d_out, k = _read_u64(fh, 4, path, "hybrid header")
            if m < 1 or n_init < 1 or d_out < 1 or not (1 <= k <= n_init):
                raise FileFormatError(f"{path}: implausible hybrid header "
                                      f"M={m} N_init={n_init} D_out={d_out} k={k}")
            d_re = _read_f64(fh, m * n_init, path, "d_re").reshape(m, n_init)
            d_im = _read_f64(fh, m * n_init, path, "d_im").reshape(m, n_init)
            z = _read_f64(fh, d_out * n_init, path, "z").reshape(d_out, n_init)
            _expect_end(fh, path)
            return EncoderParams(d_re=d_re, d_im=d_im, z=z, k=int(k))
        if kind == KIND_MLP:
            (count,) = _read_u64(fh, 1, path, "layer count")
            if not (1 <= count <= 64):
                raise FileFormatError(f"{path}: implausible layer count {count}")
            dims = _read_u64(fh, count + 1, path, "layer dims")
            if any(d < 1 for d in dims):
                raise FileFormatError(f"{path}: implausible layer dims {dims}")
            weights = []
            for lo, hi in zip(dims, dims[1:]):
                weights.append(_read_f64(fh, hi * lo, path, "weights").reshape(hi, lo))
            _expect_end(fh, path)
            return MlpParams(weights=weights)
        raise FileFormatError(f"{path}: unknown model kind {kind}")


# ---------------------------------------------------------------------------
# CSV and SVG artifacts


def write_text(path: str, text: str) -> None:
    """Write text with LF endings regardless of platform."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def chart_csv(chart: np.ndarray, positions: np.ndarray) -> str:
    lines = ["index,chart_x,chart_y,true_x,true_y"]
    for i in range(chart.shape[0]):
        lines.append(f"{i},{float(chart[i, 0])!r},{float(chart[i, 1])!r},"
                     f"{float(positions[i, 0])!r},{float(positions[i, 1])!r}")
    return "\n".join(lines) + "\n"


def loss_csv(epoch_losses) -> str:
    lines = ["epoch,mean_loss"]
    for i, loss in enumerate(epoch_losses, start=1):
        lines.append(f"{i},{float(loss)!r}")
    return "\n".join(lines) + "\n"


SEGMENT_COLORS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")


def chart_svg(chart: np.ndarray, width: int = 640, height: int = 640,
              margin: float = 40.0, radius: float = 2.5) -> str:
    """Self-contained SVG scatter of chart points, colored by path progress.

    Points are split into eight equal temporal segments, each drawn in one
    color of a fixed cycle, so a faithful chart shows as an ordered rainbow
    loop and a scrambled one as confetti.
    """
    n = chart.shape[0]
    lo = chart.min(axis=0)
    hi = chart.max(axis=0)
    span = np.where(hi - lo > 0, hi - lo, 1.0)
    scale = min((width - 2 * margin) / span[0], (height - 2 * margin) / span[1])
    mid = (lo + hi) / 2.0
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for i in range(n):
        x = (chart[i, 0] - mid[0]) * scale + width / 2.0
        y = height / 2.0 - (chart[i, 1] - mid[1]) * scale
        color = SEGMENT_COLORS[min(i * 8 // n, 7)]
        parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{radius}" '
                     f'fill="{color}" fill-opacity="0.8"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
