"""Input validation shared by the engine, the oracles and the estimator."""

from __future__ import annotations

import numpy as np

from .image import GrayImage


def as_gray_image(X, bit_depth: int | None = None) -> GrayImage:
    """Coerce an image-like input (GrayImage or 2D integer array) to GrayImage."""
    if isinstance(X, GrayImage):
        if bit_depth is not None and X.bit_depth != bit_depth:
            raise ValueError(f"image is {X.bit_depth}-bit, expected {bit_depth}-bit")
        return X
    return GrayImage(np.asarray(X), bit_depth)


def check_window(n, width: int, height: int) -> int:
    """Window side: odd, >= 3 and small enough for replication to cover."""
    n = int(n)
    if n < 3 or n % 2 == 0:
        raise ValueError(f"window must be an odd integer >= 3, got {n}")
    if n > 2 * min(width, height) + 1:
        raise ValueError(
            f"window {n} too large for a {width}x{height} image "
            f"(limit {2 * min(width, height) + 1})"
        )
    return n


def resolve_rank(n: int, rank=None, percentile=None) -> int:
    """1-based rank inside the n*n window; defaults to the median."""
    if rank is not None and percentile is not None:
        raise ValueError("give either rank or percentile, not both")
    size = n * n
    if percentile is not None:
        p = float(percentile)
        if not 0.0 < p <= 1.0:
            raise ValueError(f"percentile must be in (0, 1], got {p}")
        rank = int(np.ceil(p * size))
    if rank is None:
        rank = (size + 1) // 2
    rank = int(rank)
    if not 1 <= rank <= size:
        raise ValueError(f"rank {rank} outside [1, {size}] for window {n}")
    return rank


def check_max_error(max_error) -> int:
    max_error = int(max_error)
    if max_error < 1:
        raise ValueError(f"max_error must be >= 1, got {max_error}")
    return max_error
