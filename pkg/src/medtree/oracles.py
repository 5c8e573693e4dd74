"""Independent reference filters used as ground truth.

Three interchangeable kinds: per-window full sort, per-window quickselect,
and a sliding plain-histogram filter.  All use replicate borders and the
same 1-based rank convention as the tree engine, so any of them can stand
in as an exact oracle.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import _kernels as K
from .image import GrayImage
from .validation import as_gray_image, check_window, resolve_rank

ORACLE_KINDS = ("full_sort", "quickselect", "huang_histogram")

_CHUNK_BYTES = 64 << 20


def _full_sort(px: np.ndarray, n: int, rank: int) -> np.ndarray:
    h2 = n // 2
    padded = np.pad(px, h2, mode="edge")
    H, W = px.shape
    out = np.empty_like(px)
    rows_per_chunk = max(1, _CHUNK_BYTES // max(1, W * n * n * px.itemsize))
    for a in range(0, H, rows_per_chunk):
        b = min(H, a + rows_per_chunk)
        view = sliding_window_view(padded[a : b + n - 1], (n, n))
        windows = view.reshape(b - a, W, n * n)
        out[a:b] = np.sort(windows, axis=2)[..., rank - 1]
    return out


def oracle_median_filter(image, n: int, rank=None, kind: str = "full_sort") -> GrayImage:
    """Rank-filter with one of the reference implementations."""
    image = as_gray_image(image)
    n = check_window(n, image.width, image.height)
    rank = resolve_rank(n, rank)
    px = image.pixels
    if kind == "full_sort":
        out = _full_sort(px, n, rank)
    elif kind == "quickselect":
        out = np.empty_like(px)
        K.run_quickselect(px, out, n, rank)
    elif kind == "huang_histogram":
        out, _ = huang_filter(image, n, rank)
        return out
    else:
        raise ValueError(f"oracle kind must be one of {ORACLE_KINDS}, got {kind!r}")
    return GrayImage(out, image.bit_depth)


def huang_filter(image, n: int, rank=None) -> tuple[GrayImage, int]:
    """Sliding-histogram rank filter; also returns the number of histogram
    update additions (2n per horizontal step, n^2 per row start)."""
    image = as_gray_image(image)
    n = check_window(n, image.width, image.height)
    rank = resolve_rank(n, rank)
    px = image.pixels
    out = np.empty_like(px)
    adds = K.run_huang(px, out, n, rank, 1 << image.bit_depth)
    return GrayImage(out, image.bit_depth), int(adds)
