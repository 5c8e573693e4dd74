"""Operation counters with the three-phase breakdown used by the benchmarks.

Additions are occurrence-counter increments/decrements and accumulator
additions inside descents; comparisons are value-vs-bound tests, descent
decisions and (adaptive only) leaf tests.  Index arithmetic is never
counted.  The engine kernels tally into a flat int64 array using the slot
numbers below; :class:`OpCounters` is the reporting-side view of that
array.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

# slots of the raw tally array shared with the numba kernels
OPS_COL_ADD = 0
OPS_COL_CMP = 1
OPS_WIN_ADD = 2
OPS_WIN_CMP = 3
OPS_EXT_ADD = 4
OPS_EXT_CMP = 5
OPS_ELEMENTARY = 6
OPS_REPLAY = 7
OPS_REBUILD = 8
OPS_SLOTS = 9

CSV_HEADER = (
    "label,col_add,col_cmp,win_add,win_cmp,ext_add,ext_cmp,"
    "total_add,total_cmp,elementary_fraction,pixels"
)


def new_tally() -> np.ndarray:
    """Fresh raw tally array for the kernels."""
    return np.zeros(OPS_SLOTS, dtype=np.int64)


@dataclass
class OpCounters:
    """Per-run operation tallies, split by phase.

    Phases: column maintenance (per-column value insert/remove), window
    update (lazy node synchronization) and extraction (the rank descent).
    Sync events are classified elementary / replay / rebuild.
    """

    col_add: int = 0
    col_cmp: int = 0
    win_add: int = 0
    win_cmp: int = 0
    ext_add: int = 0
    ext_cmp: int = 0
    elementary: int = 0
    replay: int = 0
    rebuild: int = 0
    pixels: int = 0

    @classmethod
    def from_tally(cls, tally: np.ndarray, pixels: int) -> "OpCounters":
        return cls(
            col_add=int(tally[OPS_COL_ADD]),
            col_cmp=int(tally[OPS_COL_CMP]),
            win_add=int(tally[OPS_WIN_ADD]),
            win_cmp=int(tally[OPS_WIN_CMP]),
            ext_add=int(tally[OPS_EXT_ADD]),
            ext_cmp=int(tally[OPS_EXT_CMP]),
            elementary=int(tally[OPS_ELEMENTARY]),
            replay=int(tally[OPS_REPLAY]),
            rebuild=int(tally[OPS_REBUILD]),
            pixels=int(pixels),
        )

    def __add__(self, other: "OpCounters") -> "OpCounters":
        if not isinstance(other, OpCounters):
            return NotImplemented
        return OpCounters(
            **{f.name: getattr(self, f.name) + getattr(other, f.name) for f in fields(self)}
        )

    @property
    def total_add(self) -> int:
        return self.col_add + self.win_add + self.ext_add

    @property
    def total_cmp(self) -> int:
        return self.col_cmp + self.win_cmp + self.ext_cmp

    @property
    def sync_events(self) -> int:
        return self.elementary + self.replay + self.rebuild

    @property
    def elementary_fraction(self) -> float:
        events = self.sync_events
        return self.elementary / events if events else 0.0

    def per_pixel(self, field: str) -> float:
        """Exact per-pixel average of one tally (0.0 on an empty run)."""
        value = getattr(self, field)
        return value / self.pixels if self.pixels else 0.0

    def csv_row(self, label: str) -> str:
        cells = [
            label,
            str(self.col_add),
            str(self.col_cmp),
            str(self.win_add),
            str(self.win_cmp),
            str(self.ext_add),
            str(self.ext_cmp),
            str(self.total_add),
            str(self.total_cmp),
            f"{self.elementary_fraction:.6f}",
            str(self.pixels),
        ]
        return ",".join(cells)


def counters_report(rows, fmt: str = "human") -> str:
    """Render labelled counter rows.

    ``rows`` is an iterable of ``(label, OpCounters)``.  ``fmt`` is
    ``"human"`` (aligned per-pixel table) or ``"csv"`` (schema in
    :data:`CSV_HEADER`).
    """
    rows = list(rows)
    if fmt == "csv":
        return "\n".join([CSV_HEADER] + [c.csv_row(label) for label, c in rows])
    if fmt != "human":
        raise ValueError(f"unknown report format: {fmt!r}")

    width = max([len(label) for label, _ in rows] + [9])
    head = (
        f"{'':{width}}  {'columns':>15}  {'window':>15}  "
        f"{'extraction':>15}  {'overall':>15}  {'elem%':>6}"
    )
    sub = (
        f"{'per pixel':{width}}  "
        + "  ".join(f"{'add':>7} {'cmp':>7}" for _ in range(4))
        + f"  {'':>6}"
    )
    lines = [head, sub]
    for label, c in rows:
        p = c.pixels or 1
        lines.append(
            f"{label:{width}}  "
            f"{c.col_add / p:7.2f} {c.col_cmp / p:7.2f}  "
            f"{c.win_add / p:7.2f} {c.win_cmp / p:7.2f}  "
            f"{c.ext_add / p:7.2f} {c.ext_cmp / p:7.2f}  "
            f"{c.total_add / p:7.2f} {c.total_cmp / p:7.2f}  "
            f"{100.0 * c.elementary_fraction:5.1f}%"
        )
    return "\n".join(lines)
