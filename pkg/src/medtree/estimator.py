"""scikit-learn style front end for the running rank filter."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .engine import filter_image, resolve_topology
from .validation import as_gray_image, check_max_error, check_window, resolve_rank


class MedianFilter2D(BaseEstimator, TransformerMixin):
    """2D running median (or any order statistic) as a transformer.

    ``fit`` fixes the tree topology: uniform modes need only the bit depth,
    while ``mode="adaptive"`` learns value-frequency driven splits from the
    fitted image so that common gray values sit on short paths.
    ``transform`` filters an image and returns an array of the same shape
    and dtype.

    Parameters
    ----------
    window : odd int >= 3
        Side of the square filter window.
    rank : int, optional
        1-based order statistic inside the window; default is the median.
    percentile : float in (0, 1], optional
        Alternative to ``rank``.
    max_error : int, default 1
        Allowed output error in gray values; values > 1 stop the rank
        descent early and trade precision for speed.
    mode : {"uniform", "adaptive", "unconditional"}
        Tree shape and window update policy.  ``unconditional`` updates the
        whole window tree at every pixel (the strictly constant-time
        variant); the default lazy policy is the fast one.
    profile : FrequencyProfile, optional
        Externally supplied access-frequency profile for adaptive mode;
        when omitted, ``fit`` estimates one from the fitted image.
    count_ops : bool, default False
        Tally additions/comparisons per phase into ``counters_``.
    bands : int, default 1
        Split the image into this many independently filtered horizontal
        bands (identical output, useful for frame-level parallelism).

    Attributes
    ----------
    topology_ : TreeTopology
        The fitted tree shape, shared by every tree in a run.
    counters_ : OpCounters
        Operation tallies of the most recent ``transform``.
    """

    def __init__(
        self,
        window: int = 3,
        rank=None,
        percentile=None,
        max_error: int = 1,
        mode: str = "uniform",
        profile=None,
        count_ops: bool = False,
        bands: int = 1,
    ):
        self.window = window
        self.rank = rank
        self.percentile = percentile
        self.max_error = max_error
        self.mode = mode
        self.profile = profile
        self.count_ops = count_ops
        self.bands = bands

    def _validate(self, X):
        image = as_gray_image(np.asarray(X))
        n = check_window(self.window, image.width, image.height)
        resolve_rank(n, self.rank, self.percentile)
        check_max_error(self.max_error)
        return image, n

    def fit(self, X, y=None):
        """Fix the tree topology from an example image."""
        image, n = self._validate(X)
        self.bit_depth_ = image.bit_depth
        self.topology_ = resolve_topology(image, n, self.mode, self.profile)
        return self

    def transform(self, X):
        """Filter an image with the fitted topology."""
        check_is_fitted(self, "topology_")
        image, n = self._validate(X)
        if image.bit_depth != self.bit_depth_:
            raise ValueError(
                f"transform input is {image.bit_depth}-bit, fitted on {self.bit_depth_}-bit"
            )
        out, counters = filter_image(
            image,
            n,
            rank=self.rank,
            percentile=self.percentile,
            max_error=self.max_error,
            mode=self.mode,
            topology=self.topology_,
            counting=self.count_ops,
            bands=self.bands,
        )
        self.counters_ = counters
        return out.pixels
