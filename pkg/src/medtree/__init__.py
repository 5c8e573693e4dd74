"""medtree: approximately constant-time 2D running median and order
statistics over hierarchical interval-count trees."""

from .counters import CSV_HEADER, OpCounters, counters_report
from .engine import WindowEngine, filter_image, resolve_topology
from .estimator import MedianFilter2D
from .image import GrayImage, PgmFormatError, gen_image, read_pgm, write_pgm
from .oracles import ORACLE_KINDS, huang_filter, oracle_median_filter
from .topology import (
    FrequencyProfile,
    TreeTopology,
    box_mean,
    build_adaptive_topology,
    estimate_median_profile,
    mix_profiles,
    source_histogram,
    uniform_topology,
    weighted_mean_depth,
)
from .tree import IntervalCountTree

__version__ = "0.1.0"

__all__ = [
    "CSV_HEADER",
    "FrequencyProfile",
    "GrayImage",
    "IntervalCountTree",
    "MedianFilter2D",
    "OpCounters",
    "ORACLE_KINDS",
    "PgmFormatError",
    "TreeTopology",
    "WindowEngine",
    "box_mean",
    "build_adaptive_topology",
    "counters_report",
    "estimate_median_profile",
    "filter_image",
    "gen_image",
    "huang_filter",
    "mix_profiles",
    "oracle_median_filter",
    "read_pgm",
    "resolve_topology",
    "source_histogram",
    "uniform_topology",
    "weighted_mean_depth",
    "write_pgm",
]
