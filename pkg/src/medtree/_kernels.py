"""Compiled kernels for the sliding-window engine and the baseline filters.

Counter layout per tree: slot 0 is the top count, slots 1..N-1 are the
explicit left nodes in flat layout order (node, left subtree, right-hanging
subtree).  Uniform descents derive bounds with shift arithmetic; adaptive
descents read the topology arrays.  Every kernel takes an int64 ``ops``
tally (slot meaning in ``counters.py``) and a ``counting`` flag; counting
never changes results.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .counters import (
    OPS_COL_ADD,
    OPS_COL_CMP,
    OPS_ELEMENTARY,
    OPS_EXT_ADD,
    OPS_EXT_CMP,
    OPS_REBUILD,
    OPS_REPLAY,
    OPS_WIN_ADD,
    OPS_WIN_CMP,
)


# ---------------------------------------------------------------- columns

@njit(cache=True)
def col_add_u(col, v, d, ops, counting):
    pos = 1
    lo = 0
    w = 1 << d
    for _ in range(d):
        w >>= 1
        if counting:
            ops[OPS_COL_CMP] += 1
        if v < lo + w:
            col[pos] += 1
            if counting:
                ops[OPS_COL_ADD] += 1
            pos += 1
        else:
            lo += w
            pos += w


@njit(cache=True)
def col_remove_u(col, v, d, ops, counting):
    pos = 1
    lo = 0
    w = 1 << d
    for _ in range(d):
        w >>= 1
        if counting:
            ops[OPS_COL_CMP] += 1
        if v < lo + w:
            col[pos] -= 1
            if counting:
                ops[OPS_COL_ADD] += 1
            pos += 1
        else:
            lo += w
            pos += w


@njit(cache=True)
def col_add_a(col, v, up, leaf, span, n_values, precision, ops, counting):
    pos = 1
    hi = n_values
    while True:
        s = up[pos]
        if counting:
            ops[OPS_COL_CMP] += 2  # interval test plus leaf test
        if v < s:
            col[pos] += 1
            if counting:
                ops[OPS_COL_ADD] += 1
            if leaf[pos] != 0:
                return
            hi = s
            pos += 1
        else:
            nxt = pos + span[pos]
            if hi - s <= precision:
                return
            pos = nxt


@njit(cache=True)
def col_remove_a(col, v, up, leaf, span, n_values, precision, ops, counting):
    pos = 1
    hi = n_values
    while True:
        s = up[pos]
        if counting:
            ops[OPS_COL_CMP] += 2
        if v < s:
            col[pos] -= 1
            if counting:
                ops[OPS_COL_ADD] += 1
            if leaf[pos] != 0:
                return
            hi = s
            pos += 1
        else:
            nxt = pos + span[pos]
            if hi - s <= precision:
                return
            pos = nxt


@njit(cache=True)
def advance_col_u(col, img, c, y, n, h2, d, ops, counting):
    """One row step of one column tree: drop the value leaving the vertical
    span, take the one entering it.  The constant total is left untouched."""
    H = img.shape[0]
    y_out = y - h2 - 1
    if y_out < 0:
        y_out = 0
    y_in = y + h2
    if y_in > H - 1:
        y_in = H - 1
    col_remove_u(col, img[y_out, c], d, ops, counting)
    col_add_u(col, img[y_in, c], d, ops, counting)


@njit(cache=True)
def advance_col_a(col, img, c, y, n, h2, up, leaf, span, n_values, precision, ops, counting):
    H = img.shape[0]
    y_out = y - h2 - 1
    if y_out < 0:
        y_out = 0
    y_in = y + h2
    if y_in > H - 1:
        y_in = H - 1
    col_remove_a(col, img[y_out, c], up, leaf, span, n_values, precision, ops, counting)
    col_add_a(col, img[y_in, c], up, leaf, span, n_values, precision, ops, counting)


# ----------------------------------------------------------- window tree

@njit(cache=True)
def sync_node(win, lastx, valid, cols, k, x, n, h2, W, ops, counting):
    """Bring window node ``k`` up to date for center column ``x``.

    Fresh nodes replay the missed one-column steps (one addition and one
    subtraction each); stale or invalid nodes are rebuilt by summing the
    node over the n covered columns.
    """
    if counting:
        ops[OPS_WIN_CMP] += 1
    if valid[k] != 0:
        g = x - lastx[k]
        if g == 0:
            return win[k]
        if g < n:
            c = win[k]
            p = lastx[k] + 1
            while p <= x:
                cin = p + h2
                if cin > W - 1:
                    cin = W - 1
                cout = p - h2 - 1
                if cout < 0:
                    cout = 0
                c += cols[cin, k] - cols[cout, k]
                p += 1
            win[k] = c
            lastx[k] = x
            if counting:
                ops[OPS_WIN_ADD] += 2 * g
                if g == 1:
                    ops[OPS_ELEMENTARY] += 1
                else:
                    ops[OPS_REPLAY] += 1
            return c
    s = 0
    for j in range(-h2, h2 + 1):
        cc = x + j
        if cc < 0:
            cc = 0
        elif cc > W - 1:
            cc = W - 1
        s += cols[cc, k]
    win[k] = s
    valid[k] = 1
    lastx[k] = x
    if counting:
        ops[OPS_WIN_ADD] += n
        ops[OPS_REBUILD] += 1
    return s


@njit(cache=True)
def rebuild_all(win, cols, x, n, h2, W, slots, ops, counting):
    for k in range(1, slots):
        s = 0
        for j in range(-h2, h2 + 1):
            cc = x + j
            if cc < 0:
                cc = 0
            elif cc > W - 1:
                cc = W - 1
            s += cols[cc, k]
        win[k] = s
    if counting:
        ops[OPS_WIN_ADD] += (slots - 1) * n


@njit(cache=True)
def shift_all(win, cols, x, n, h2, W, slots, ops, counting):
    cin = x + h2
    if cin > W - 1:
        cin = W - 1
    cout = x - h2 - 1
    if cout < 0:
        cout = 0
    for k in range(1, slots):
        win[k] += cols[cin, k] - cols[cout, k]
    if counting:
        ops[OPS_WIN_ADD] += 2 * (slots - 1)


# ------------------------------------------------------------ extraction

@njit(cache=True)
def extract_u(win, lastx, valid, cols, x, n, h2, W, r, d, levels, ops, counting, on_demand):
    """Rank descent over the window tree, syncing the probed node at each
    of the ``levels`` steps.  Returns (interval lower bound, width)."""
    acc = 0
    pos = 1
    lo = 0
    w = 1 << d
    for _ in range(levels):
        w >>= 1
        if on_demand:
            leftc = sync_node(win, lastx, valid, cols, pos, x, n, h2, W, ops, counting)
        else:
            leftc = win[pos]
        below = acc + leftc
        if counting:
            ops[OPS_EXT_ADD] += 1
            ops[OPS_EXT_CMP] += 1
        if r <= below:
            pos += 1
        else:
            acc = below
            lo += w
            pos += w
    return lo, w


@njit(cache=True)
def extract_a(
    win, lastx, valid, cols, x, n, h2, W, r,
    up, leaf, span, n_values, precision, max_error, ops, counting, on_demand,
):
    acc = 0
    pos = 1
    lo = 0
    hi = n_values
    while hi - lo > max_error:
        if counting:
            ops[OPS_EXT_CMP] += 1  # variable height: leaf/precision test
        s = up[pos]
        if on_demand:
            leftc = sync_node(win, lastx, valid, cols, pos, x, n, h2, W, ops, counting)
        else:
            leftc = win[pos]
        below = acc + leftc
        if counting:
            ops[OPS_EXT_ADD] += 1
            ops[OPS_EXT_CMP] += 1
        if r <= below:
            hi = s
            if leaf[pos] != 0:
                break
            pos += 1
        else:
            acc = below
            nxt = pos + span[pos]
            lo = s
            if hi - lo <= precision:
                break
            pos = nxt
    return lo, hi - lo


# ---------------------------------------------------------- frame drivers

@njit(cache=True)
def init_columns_u(img, cols, n, h2, d, ops):
    # columns start holding the vertical span of a virtual row -1, so that
    # every output row, the first included, performs one counted advance
    H, W = img.shape
    for x in range(W):
        col = cols[x]
        col[0] = n
        for j in range(-h2, h2 + 1):
            y = j - 1
            if y < 0:
                y = 0
            elif y > H - 1:
                y = H - 1
            col_add_u(col, img[y, x], d, ops, False)


@njit(cache=True)
def init_columns_a(img, cols, n, h2, up, leaf, span, n_values, precision, ops):
    H, W = img.shape
    for x in range(W):
        col = cols[x]
        col[0] = n
        for j in range(-h2, h2 + 1):
            y = j - 1
            if y < 0:
                y = 0
            elif y > H - 1:
                y = H - 1
            col_add_a(col, img[y, x], up, leaf, span, n_values, precision, ops, False)


@njit(cache=True)
def run_frame_u(img, out, cols, win, lastx, valid, n, d, levels, r, ops, counting, on_demand):
    H, W = img.shape
    h2 = n // 2
    slots = 1 << d
    win[0] = n * n
    init_columns_u(img, cols, n, h2, d, ops)
    for y in range(H):
        top = h2 if h2 < W - 1 else W - 1
        for c in range(top + 1):
            advance_col_u(cols[c], img, c, y, n, h2, d, ops, counting)
        if on_demand:
            for k in range(slots):
                valid[k] = 0
        else:
            rebuild_all(win, cols, 0, n, h2, W, slots, ops, counting)
        for x in range(W):
            if x > 0:
                if x + h2 <= W - 1:
                    advance_col_u(cols[x + h2], img, x + h2, y, n, h2, d, ops, counting)
                if not on_demand:
                    shift_all(win, cols, x, n, h2, W, slots, ops, counting)
            v, _ = extract_u(
                win, lastx, valid, cols, x, n, h2, W, r, d, levels, ops, counting, on_demand
            )
            out[y, x] = v


@njit(cache=True)
def run_frame_a(
    img, out, cols, win, lastx, valid, n, r,
    up, leaf, span, n_values, precision, max_error, ops, counting, on_demand,
):
    H, W = img.shape
    h2 = n // 2
    slots = up.shape[0]
    win[0] = n * n
    init_columns_a(img, cols, n, h2, up, leaf, span, n_values, precision, ops)
    for y in range(H):
        top = h2 if h2 < W - 1 else W - 1
        for c in range(top + 1):
            advance_col_a(
                cols[c], img, c, y, n, h2, up, leaf, span, n_values, precision, ops, counting
            )
        if on_demand:
            for k in range(slots):
                valid[k] = 0
        else:
            rebuild_all(win, cols, 0, n, h2, W, slots, ops, counting)
        for x in range(W):
            if x > 0:
                if x + h2 <= W - 1:
                    advance_col_a(
                        cols[x + h2], img, x + h2, y, n, h2,
                        up, leaf, span, n_values, precision, ops, counting,
                    )
                if not on_demand:
                    shift_all(win, cols, x, n, h2, W, slots, ops, counting)
            v, _ = extract_a(
                win, lastx, valid, cols, x, n, h2, W, r,
                up, leaf, span, n_values, precision, max_error, ops, counting, on_demand,
            )
            out[y, x] = v


# ------------------------------------------------------------- baselines

@njit(cache=True)
def _hist_rank(hist, r):
    cum = 0
    for b in range(hist.shape[0]):
        cum += hist[b]
        if cum >= r:
            return b
    return hist.shape[0] - 1


@njit(cache=True)
def run_huang(img, out, n, r, n_values):
    """Sliding plain-histogram rank filter; returns the number of histogram
    update additions performed (rank-scan cost not included)."""
    H, W = img.shape
    h2 = n // 2
    hist = np.zeros(n_values, dtype=np.int64)
    adds = 0
    for y in range(H):
        for b in range(n_values):
            hist[b] = 0
        for j in range(-h2, h2 + 1):
            yy = y + j
            if yy < 0:
                yy = 0
            elif yy > H - 1:
                yy = H - 1
            for i in range(-h2, h2 + 1):
                xx = i
                if xx < 0:
                    xx = 0
                elif xx > W - 1:
                    xx = W - 1
                hist[img[yy, xx]] += 1
                adds += 1
        out[y, 0] = _hist_rank(hist, r)
        for x in range(1, W):
            cin = x + h2
            if cin > W - 1:
                cin = W - 1
            cout = x - h2 - 1
            if cout < 0:
                cout = 0
            for j in range(-h2, h2 + 1):
                yy = y + j
                if yy < 0:
                    yy = 0
                elif yy > H - 1:
                    yy = H - 1
                hist[img[yy, cout]] -= 1
                hist[img[yy, cin]] += 1
                adds += 2
            out[y, x] = _hist_rank(hist, r)
    return adds


@njit(cache=True)
def _select_kth(a, k):
    """In-place Hoare quickselect with median-of-three pivots."""
    lo = 0
    hi = a.shape[0] - 1
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] < a[lo]:
            a[mid], a[lo] = a[lo], a[mid]
        if a[hi] < a[lo]:
            a[hi], a[lo] = a[lo], a[hi]
        if a[hi] < a[mid]:
            a[hi], a[mid] = a[mid], a[hi]
        p = a[mid]
        i = lo
        j = hi
        while i <= j:
            while a[i] < p:
                i += 1
            while a[j] > p:
                j -= 1
            if i <= j:
                a[i], a[j] = a[j], a[i]
                i += 1
                j -= 1
        if k <= j:
            hi = j
        elif k >= i:
            lo = i
        else:
            return a[k]
    return a[k]


@njit(cache=True)
def run_quickselect(img, out, n, r):
    """Per-window gather plus quickselect to the requested rank."""
    H, W = img.shape
    h2 = n // 2
    buf = np.empty(n * n, dtype=img.dtype)
    for y in range(H):
        for x in range(W):
            m = 0
            for j in range(-h2, h2 + 1):
                yy = y + j
                if yy < 0:
                    yy = 0
                elif yy > H - 1:
                    yy = H - 1
                for i in range(-h2, h2 + 1):
                    xx = x + i
                    if xx < 0:
                        xx = 0
                    elif xx > W - 1:
                        xx = W - 1
                    buf[m] = img[yy, xx]
                    m += 1
            out[y, x] = _select_kth(buf, r - 1)
