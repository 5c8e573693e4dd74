"""Tree shapes shared by all interval-count trees of a filter run.

A topology fixes how every node's gray-value interval is split.  The
uniform topology bisects each interval and needs no stored bounds (they
fall out of shift arithmetic during descents); the adaptive topology
chooses weighted-median splits from an access-frequency profile so that
frequently visited values sit on short paths.  Either way the counter
array of a tree over ``[0, 2^d)`` has exactly ``2^d`` slots: the top
count plus one slot per left child, rights being derived by subtraction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .image import GrayImage


@dataclass(frozen=True)
class NodeRef:
    """Handle to one tree node; implicit right nodes have no counter slot."""

    topology: "TreeTopology" = field(repr=False)
    lo: int
    hi: int
    slot: int  # counter slot; -1 for implicit right nodes
    child: int  # counter slot of the left child (meaningless on leaves)
    parent: "NodeRef | None" = field(default=None, repr=False)

    @property
    def width(self) -> int:
        return self.hi - self.lo

    @property
    def is_leaf(self) -> bool:
        return self.width <= self.topology.leaf_precision

    @property
    def split(self) -> int:
        if self.is_leaf:
            raise ValueError(f"leaf node [{self.lo}, {self.hi}) has no split")
        return self.topology.split_of(self)

    def left(self) -> "NodeRef":
        s = self.split
        return NodeRef(self.topology, self.lo, s, self.child, self.child + 1, self)

    def right(self) -> "NodeRef":
        s = self.split
        t = self.topology
        jump = t.span[self.child] if t.span is not None else s - self.lo
        return NodeRef(t, s, self.hi, -1, self.child + int(jump), self)


class TreeTopology:
    """Immutable split structure for trees over ``[0, 2^bit_depth)``.

    ``mode`` is ``"uniform"`` or ``"adaptive"``.  Uniform topologies carry
    no arrays; adaptive ones store, per explicit slot, the interval bounds,
    a leaf flag and the size of the slot's explicit subtree (used to jump
    over left subtrees in the flat layout, where each node is followed by
    its whole left subtree and then the subtree under its implicit right
    sibling).
    """

    def __init__(self, bit_depth, mode, leaf_precision=1, lo=None, up=None, leaf=None, span=None):
        self.bit_depth = int(bit_depth)
        self.mode = mode
        self.leaf_precision = int(leaf_precision)
        self.n_values = 1 << self.bit_depth
        self.lo = lo
        self.up = up
        self.leaf = leaf
        self.span = span
        if mode == "uniform":
            self.slots = self.n_values
        else:
            self.slots = len(up)

    def root(self) -> NodeRef:
        return NodeRef(self, 0, self.n_values, 0, 1, None)

    def split_of(self, node: NodeRef) -> int:
        if self.mode == "uniform":
            return node.lo + (node.hi - node.lo) // 2
        return int(self.up[node.child])

    def node_at(self, lo: int, hi: int) -> NodeRef:
        """Descend from the root to the node covering exactly [lo, hi)."""
        node = self.root()
        while (node.lo, node.hi) != (lo, hi):
            if node.is_leaf:
                raise ValueError(f"no node with interval [{lo}, {hi})")
            node = node.left() if hi <= node.split else node.right()
            if node.lo > lo or node.hi < hi:
                raise ValueError(f"no node with interval [{lo}, {hi})")
        return node

    def __repr__(self) -> str:
        return f"TreeTopology(d={self.bit_depth}, {self.mode}, slots={self.slots})"


def uniform_topology(bit_depth: int) -> TreeTopology:
    """Bisection topology for ``[0, 2^bit_depth)`` with unit leaves."""
    if not 1 <= int(bit_depth) <= 16:
        raise ValueError(f"bit_depth must be in 1..16, got {bit_depth}")
    return TreeTopology(bit_depth, "uniform")


@dataclass
class FrequencyProfile:
    """Relative access frequency per gray value, with its provenance."""

    weights: np.ndarray
    source: str = "source-histogram"

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1:
            raise ValueError("profile weights must be one-dimensional")
        if w.size & (w.size - 1) or w.size < 2:
            raise ValueError(f"profile length must be a power of two, got {w.size}")
        if not np.isfinite(w).all():
            raise ValueError("profile weights must be finite")
        if (w < 0).any():
            raise ValueError("profile weights must be non-negative")
        self.weights = w

    @property
    def bit_depth(self) -> int:
        return int(self.weights.size).bit_length() - 1

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    @property
    def is_degenerate(self) -> bool:
        return self.total <= 0.0


def source_histogram(image: GrayImage) -> FrequencyProfile:
    """Global gray-value histogram of the image itself."""
    counts = np.bincount(image.pixels.ravel(), minlength=1 << image.bit_depth)
    return FrequencyProfile(counts.astype(np.float64), "source-histogram")


def box_mean(image: GrayImage, n: int) -> np.ndarray:
    """Box-mean filtered pixels (float), replicate borders, O(1) per pixel."""
    if n < 1 or n % 2 == 0:
        raise ValueError(f"window must be odd and positive, got {n}")
    h, w = image.pixels.shape
    if n > 2 * min(h, w) + 1:
        raise ValueError(f"window {n} larger than twice the image extent {h}x{w}")
    h2 = n // 2
    padded = np.pad(image.pixels.astype(np.float64), h2, mode="edge")
    ii = np.zeros((h + n, w + n))
    ii[1:, 1:] = padded.cumsum(0).cumsum(1)
    sums = ii[n:, n:] - ii[:-n, n:] - ii[n:, :-n] + ii[:-n, :-n]
    return sums / float(n * n)


def estimate_median_profile(image: GrayImage, n: int) -> FrequencyProfile:
    """Histogram of the running box mean, as a stand-in for the unknown
    distribution of the filter output."""
    means = np.rint(box_mean(image, n)).astype(np.int64)
    means = np.clip(means, 0, (1 << image.bit_depth) - 1)
    counts = np.bincount(means.ravel(), minlength=1 << image.bit_depth)
    return FrequencyProfile(counts.astype(np.float64), "median-estimate")


def mix_profiles(source: FrequencyProfile, median: FrequencyProfile) -> FrequencyProfile:
    """Mix two profiles 1:1 by mass.

    One insert+remove and one extraction happen per output pixel, so the
    two profiles get equal say.  A zero-mass input contributes nothing; if
    both are empty the result is degenerate and callers fall back to the
    uniform topology.
    """
    if source.weights.size != median.weights.size:
        raise ValueError(
            f"profile length mismatch: {source.weights.size} vs {median.weights.size}"
        )
    mixed = np.zeros_like(source.weights)
    for profile in (source, median):
        if not profile.is_degenerate:
            mixed += profile.weights / profile.total
    return FrequencyProfile(mixed, "mixed")


def _choose_split(prefix: np.ndarray, lo: int, hi: int) -> int:
    """Split position for [lo, hi): weighted median of the profile mass.

    Zero-mass intervals bisect.  Of the two integer positions bracketing
    the exact half-mass point, the better balanced wins; ties go to the
    position nearer the bisection midpoint, then to the smaller one.
    """
    mass = prefix[hi] - prefix[lo]
    if mass <= 0.0:
        return lo + (hi - lo) // 2
    target = prefix[lo] + mass / 2.0
    s = int(np.searchsorted(prefix[lo + 1 : hi], target, side="left")) + lo + 1
    s = min(s, hi - 1)
    if s == lo + 1:
        return s
    balance = lambda p: abs(2.0 * (prefix[p] - prefix[lo]) - mass)
    mid = (lo + hi) / 2.0
    key = lambda p: (balance(p), abs(p - mid), p)
    return min(s - 1, s, key=key)


def build_adaptive_topology(
    profile: FrequencyProfile, leaf_precision: int = 1
) -> TreeTopology:
    """Adaptive topology from an access-frequency profile.

    Splits are chosen top-down so both children carry as equal a share of
    the profile mass as possible; zero-mass intervals bisect, so without
    any usable profile the shape degrades to the uniform one.  Storage
    stays at ``2^d`` counter slots regardless of the shape.
    """
    if leaf_precision < 1:
        raise ValueError(f"leaf_precision must be >= 1, got {leaf_precision}")
    n_values = profile.weights.size
    prefix = np.zeros(n_values + 1)
    prefix[1:] = np.cumsum(profile.weights)

    lo_arr = [0]
    up_arr = [n_values]
    leaf_arr = [False]
    span_arr = [0]  # top slot; patched after the build
    # stack-driven preorder: each node is emitted, then its left subtree,
    # then the subtree under its implicit right sibling (flat layout)
    stack: list[tuple] = [("div", 0, n_values)]
    while stack:
        op, a, b = stack.pop()
        if op == "close":
            span_arr[a] = len(up_arr) - a
            continue
        if b - a <= leaf_precision:
            continue
        s = _choose_split(prefix, a, b)
        slot = len(up_arr)
        lo_arr.append(a)
        up_arr.append(s)
        leaf_arr.append(s - a <= leaf_precision)
        span_arr.append(0)
        stack.append(("div", s, b))
        stack.append(("close", slot, 0))
        stack.append(("div", a, s))
    span_arr[0] = len(up_arr)

    bit_depth = int(n_values).bit_length() - 1
    return TreeTopology(
        bit_depth,
        "adaptive",
        leaf_precision,
        lo=np.asarray(lo_arr, dtype=np.int64),
        up=np.asarray(up_arr, dtype=np.int64),
        leaf=np.asarray(leaf_arr, dtype=np.uint8),
        span=np.asarray(span_arr, dtype=np.int64),
    )


def weighted_mean_depth(topology: TreeTopology, profile: FrequencyProfile) -> float:
    """Profile-weighted mean depth of the leaf reached by each value's
    insert/remove path (the top node is depth zero)."""
    weights = profile.weights
    total = float(weights.sum())
    if total <= 0.0:
        raise ValueError("cannot average depths over a zero-mass profile")
    acc = 0.0
    stack = [(topology.root(), 0)]
    while stack:
        node, depth = stack.pop()
        if node.is_leaf:
            acc += float(weights[node.lo : node.hi].sum()) * depth
        else:
            stack.append((node.left(), depth + 1))
            stack.append((node.right(), depth + 1))
    return acc / total
