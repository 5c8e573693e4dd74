"""The interval-count tree: a multiset of gray values held as per-interval
occurrence counters over a shared topology.

Storage is implicit: a flat array holds the top count (slot 0) followed by
one counter per left child in layout order; right-node counts are derived
as parent minus left.  Insert, remove and rank selection all walk one
root-to-leaf path, so a tree over ``[0, 2^d)`` costs ``d`` interval
comparisons per operation at full precision.

This class is the plain reference implementation; the sliding-window
engine runs the same descents as compiled kernels.
"""

from __future__ import annotations

import numpy as np

from .topology import NodeRef, TreeTopology


class IntervalCountTree:
    """Occurrence counters for one multiset over a shared topology.

    Instances keep running tallies of the interval comparisons and counter
    additions they perform (``comparisons`` / ``additions``), which the
    path-length tests assert against.
    """

    def __init__(self, topology: TreeTopology):
        self.topology = topology
        self.counts = np.zeros(topology.slots, dtype=np.uint32)
        self.comparisons = 0
        self.additions = 0

    @property
    def total(self) -> int:
        """Number of values currently stored (the top node's count)."""
        return int(self.counts[0])

    def reset_ops(self) -> None:
        self.comparisons = 0
        self.additions = 0

    def add(self, value: int) -> None:
        """Count one occurrence of ``value``."""
        self._update(int(value), +1)

    def remove(self, value: int) -> None:
        """Remove one occurrence of ``value``; it must be currently stored."""
        self._check_removable(int(value))
        self._update(int(value), -1)

    def _check_removable(self, value: int) -> None:
        # read-only guard: the effective count of every interval on the
        # path must be positive, deriving implicit rights by subtraction
        # (a bad removal can underflow a derived count without any stored
        # counter reaching zero)
        t = self.topology
        if not 0 <= value < t.n_values:
            return  # range error raised by the mutation walk
        inside = int(self.counts[0])
        pos, lo, hi = 1, 0, t.n_values
        while inside > 0 and hi - lo > t.leaf_precision:
            if t.mode == "uniform":
                split = lo + (hi - lo) // 2
                jump = split - lo
            else:
                split = int(t.up[pos])
                jump = int(t.span[pos])
            left = int(self.counts[pos])
            if value < split:
                inside = left
                hi = split
                pos += 1
            else:
                inside -= left
                lo = split
                pos += jump
        if inside <= 0:
            raise RuntimeError(f"count underflow: value {value} is not stored")

    def _update(self, value: int, delta: int) -> None:
        t = self.topology
        if not 0 <= value < t.n_values:
            raise ValueError(f"value {value} outside [0, {t.n_values})")
        counts = self.counts
        if delta > 0:
            counts[0] += 1
        else:
            counts[0] -= 1
        self.additions += 1

        pos, lo, hi = 1, 0, t.n_values
        uniform = t.mode == "uniform"
        while hi - lo > t.leaf_precision:
            if uniform:
                split = lo + (hi - lo) // 2
                jump = split - lo
            else:
                split = int(t.up[pos])
                jump = int(t.span[pos])
            self.comparisons += 1
            if value < split:
                if delta > 0:
                    counts[pos] += 1
                else:
                    counts[pos] -= 1
                self.additions += 1
                hi = split
                pos += 1
            else:
                lo = split
                pos += jump

    def select_rank(self, rank: int, max_error: int = 1) -> tuple[int, int]:
        """Value and error bound for the ``rank``-th smallest stored value.

        ``rank`` is 1-based.  The descent stops once the current interval
        is no wider than ``max_error`` and returns the interval's lower
        bound together with its width; with ``max_error=1`` the result is
        the exact order statistic (ties resolved by value identity).
        """
        t = self.topology
        total = self.total
        if total == 0:
            raise ValueError("rank query on an empty tree")
        if not 1 <= rank <= total:
            raise ValueError(f"rank {rank} outside [1, {total}]")
        if max_error < 1:
            raise ValueError(f"max_error must be >= 1, got {max_error}")

        counts = self.counts
        uniform = t.mode == "uniform"
        acc, pos, lo, hi = 0, 1, 0, t.n_values
        while hi - lo > max_error and hi - lo > t.leaf_precision:
            if uniform:
                split = lo + (hi - lo) // 2
                jump = split - lo
            else:
                split = int(t.up[pos])
                jump = int(t.span[pos])
            below = acc + int(counts[pos])
            self.comparisons += 1
            self.additions += 1
            if rank <= below:
                hi = split
                pos += 1
            else:
                acc = below
                lo = split
                pos += jump
        return lo, hi - lo

    def count(self, node: NodeRef) -> int:
        """Stored values inside the node's interval; implicit right nodes
        are derived by subtracting the left sibling from the parent."""
        if node.topology is not self.topology:
            raise ValueError("node belongs to a different topology")
        subtract = 0
        while node.slot < 0:
            parent = node.parent
            if parent is None:
                raise ValueError("implicit node without a parent")
            subtract += int(self.counts[parent.child])
            node = parent
        return int(self.counts[node.slot]) - subtract
