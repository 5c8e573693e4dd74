"""The 2D running rank filter: per-column trees feeding a lazily
synchronized window tree.

Scanning is left-to-right, top-to-bottom.  Each column's tree is updated
exactly once per row, when the column enters the window; the window tree
is never updated eagerly — the rank descent pulls each probed node up to
date on demand with one addition and one subtraction per missed column
step, or a rebuild from the n covered columns when it is too stale.  A
row begins with every window node invalidated.
"""

from __future__ import annotations

import numpy as np

from . import _kernels as K
from .counters import OpCounters, new_tally
from .image import GrayImage
from .topology import (
    TreeTopology,
    build_adaptive_topology,
    estimate_median_profile,
    mix_profiles,
    source_histogram,
    uniform_topology,
)
from .validation import as_gray_image, check_max_error, check_window, resolve_rank

MODES = ("uniform", "adaptive", "unconditional")


def _uniform_levels(bit_depth: int, max_error: int) -> int:
    # smallest number of descent steps whose interval width is <= max_error
    levels = bit_depth - (int(max_error).bit_length() - 1)
    return max(0, min(bit_depth, levels))


class WindowEngine:
    """Stepwise filter state over one image.

    ``step()`` yields ``(value, error_bound)`` per output pixel in scan
    order and raises ``StopIteration`` past the last pixel.  ``run()`` is
    the whole-frame fast path (same results, same tallies) and is only
    available before the first ``step()``.
    """

    def __init__(
        self,
        image,
        n: int,
        topology: TreeTopology,
        rank=None,
        max_error: int = 1,
        on_demand: bool = True,
        counting: bool = True,
    ):
        image = as_gray_image(image)
        if topology.bit_depth != image.bit_depth:
            raise ValueError(
                f"topology is {topology.bit_depth}-bit, image is {image.bit_depth}-bit"
            )
        self.image = image
        self.n = check_window(n, image.width, image.height)
        self.topology = topology
        self.rank = resolve_rank(self.n, rank)
        self.max_error = check_max_error(max_error)
        self.on_demand = bool(on_demand)
        self.counting = bool(counting)

        self._px = image.pixels.astype(np.uint16, copy=False)
        self._h2 = self.n // 2
        self._levels = _uniform_levels(topology.bit_depth, self.max_error)
        self._tally = new_tally()
        self._cols = np.zeros((image.width, topology.slots), dtype=np.int32)
        self._win = np.zeros(topology.slots, dtype=np.int64)
        self._lastx = np.zeros(topology.slots, dtype=np.int64)
        self._valid = np.zeros(topology.slots, dtype=np.uint8)
        self._win[0] = self.n * self.n
        self._pos = 0  # pixels emitted so far
        self._stepping = False
        if topology.mode == "uniform":
            K.init_columns_u(self._px, self._cols, self.n, self._h2, topology.bit_depth, self._tally)
        else:
            K.init_columns_a(
                self._px, self._cols, self.n, self._h2,
                topology.up, topology.leaf, topology.span,
                topology.n_values, topology.leaf_precision, self._tally,
            )

    @property
    def position(self) -> tuple[int, int]:
        """(x, y) of the next output pixel."""
        return self._pos % self.image.width, self._pos // self.image.width

    @property
    def counters(self) -> OpCounters:
        return OpCounters.from_tally(self._tally, self._pos)

    def __iter__(self):
        return self

    def __next__(self):
        return self.step()

    def _advance_column(self, c: int, y: int) -> None:
        t = self.topology
        if t.mode == "uniform":
            K.advance_col_u(
                self._cols[c], self._px, c, y, self.n, self._h2,
                t.bit_depth, self._tally, self.counting,
            )
        else:
            K.advance_col_a(
                self._cols[c], self._px, c, y, self.n, self._h2,
                t.up, t.leaf, t.span, t.n_values, t.leaf_precision,
                self._tally, self.counting,
            )

    def step(self) -> tuple[int, int]:
        W, H = self.image.width, self.image.height
        if self._pos >= W * H:
            raise StopIteration
        self._stepping = True
        x, y = self._pos % W, self._pos // W
        t = self.topology

        if x == 0:
            for c in range(min(self._h2, W - 1) + 1):
                self._advance_column(c, y)
            if self.on_demand:
                self._valid[:] = 0
            else:
                K.rebuild_all(
                    self._win, self._cols, 0, self.n, self._h2, W,
                    t.slots, self._tally, self.counting,
                )
        else:
            if x + self._h2 <= W - 1:
                self._advance_column(x + self._h2, y)
            if not self.on_demand:
                K.shift_all(
                    self._win, self._cols, x, self.n, self._h2, W,
                    t.slots, self._tally, self.counting,
                )

        if t.mode == "uniform":
            value, bound = K.extract_u(
                self._win, self._lastx, self._valid, self._cols, x,
                self.n, self._h2, W, self.rank, t.bit_depth, self._levels,
                self._tally, self.counting, self.on_demand,
            )
        else:
            value, bound = K.extract_a(
                self._win, self._lastx, self._valid, self._cols, x,
                self.n, self._h2, W, self.rank,
                t.up, t.leaf, t.span, t.n_values, t.leaf_precision,
                self.max_error, self._tally, self.counting, self.on_demand,
            )
        self._pos += 1
        return int(value), int(bound)

    def run(self) -> np.ndarray:
        """Filter the whole frame with the compiled driver."""
        if self._stepping or self._pos:
            raise RuntimeError("run() requires a fresh engine (step() already used)")
        t = self.topology
        out = np.empty_like(self._px)
        # the frame driver re-initializes the column trees itself
        self._cols[:] = 0
        if t.mode == "uniform":
            K.run_frame_u(
                self._px, out, self._cols, self._win, self._lastx, self._valid,
                self.n, t.bit_depth, self._levels, self.rank,
                self._tally, self.counting, self.on_demand,
            )
        else:
            K.run_frame_a(
                self._px, out, self._cols, self._win, self._lastx, self._valid,
                self.n, self.rank, t.up, t.leaf, t.span, t.n_values,
                t.leaf_precision, self.max_error, self._tally, self.counting,
                self.on_demand,
            )
        self._pos = self.image.width * self.image.height
        return out


def resolve_topology(image: GrayImage, n: int, mode: str, profile=None) -> TreeTopology:
    """Topology for one filter run.

    Adaptive mode without an explicit profile estimates one from the image:
    its own histogram mixed 1:1 with the histogram of its running box mean.
    A degenerate profile falls back to the uniform shape.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if mode != "adaptive":
        return uniform_topology(image.bit_depth)
    if profile is None:
        profile = mix_profiles(source_histogram(image), estimate_median_profile(image, n))
    if profile.weights.size != 1 << image.bit_depth:
        raise ValueError(
            f"profile length {profile.weights.size} does not match {image.bit_depth}-bit data"
        )
    if profile.is_degenerate:
        return uniform_topology(image.bit_depth)
    return build_adaptive_topology(profile)


def filter_image(
    image,
    n: int,
    *,
    rank=None,
    percentile=None,
    max_error: int = 1,
    mode: str = "uniform",
    profile=None,
    topology: TreeTopology | None = None,
    counting: bool = True,
    bands: int = 1,
) -> tuple[GrayImage, OpCounters]:
    """Rank-filter a full frame; returns the output image and the phase
    tallies.  The default rank is the median of the n*n window."""
    image = as_gray_image(image)
    n = check_window(n, image.width, image.height)
    rank = resolve_rank(n, rank, percentile)
    if topology is None:
        topology = resolve_topology(image, n, mode, profile)
    on_demand = mode != "unconditional"

    bands = int(bands)
    if bands < 1:
        raise ValueError(f"bands must be >= 1, got {bands}")
    bands = min(bands, image.height)
    if bands == 1:
        engine = WindowEngine(
            image, n, topology, rank=rank, max_error=max_error,
            on_demand=on_demand, counting=counting,
        )
        out = engine.run()
        return GrayImage(out.astype(image.pixels.dtype), image.bit_depth), engine.counters

    # horizontal bands with halo rows; identical output, summed counters
    h2 = n // 2
    H = image.height
    out = np.empty_like(image.pixels)
    counters = OpCounters()
    edges = np.linspace(0, H, bands + 1, dtype=int)
    for a, b in zip(edges[:-1], edges[1:]):
        if a == b:
            continue
        top = max(0, int(a) - h2)
        bottom = min(H, int(b) + h2)
        sub = GrayImage(image.pixels[top:bottom], image.bit_depth)
        engine = WindowEngine(
            sub, n, topology, rank=rank, max_error=max_error,
            on_demand=on_demand, counting=counting,
        )
        sub_out = engine.run()
        out[a:b] = sub_out[a - top : b - top]
        counters = counters + engine.counters
    return GrayImage(out.astype(image.pixels.dtype), image.bit_depth), counters
