"""Compiled inner loops of the labeling pipeline.

Every function here is a plain Python function wrapped with ``numba.njit``;
``fn.py_func`` runs the uncompiled version, which the tests use for
instrumented checks. Arrays are int64 unless noted.
"""

import numpy as np
from numba import njit

from .model import (
    F_CMAX,
    F_CMIN,
    F_RMAX,
    F_RMIN,
    F_S,
    F_SX,
    F_SY,
    INT64_MAX,
    N_FEATURES,
    NONE,
)

_jit = njit(cache=True, nogil=True)


@_jit
def encode_row(x, er, rlc):
    """Segment detection for one row; fills ``er``/``rlc`` and returns ner."""
    w = x.shape[0]
    rlc[0] = 0
    e = 0
    x1 = 0
    for j in range(w):
        x0 = x[j]
        rlc[e + 1] = j
        e += x0 ^ x1
        er[j] = e
        x1 = x0
    rlc[e + 1] = w
    return e + 1


@_jit
def find(t, e):
    while t[e] != e:
        e = t[e]
    return e


@_jit
def _merge_rows(feats, dst, src):
    if feats[src, F_S] == 0:
        return
    feats[dst, F_S] += feats[src, F_S]
    feats[dst, F_SX] += feats[src, F_SX]
    feats[dst, F_SY] += feats[src, F_SY]
    if feats[src, F_RMIN] < feats[dst, F_RMIN]:
        feats[dst, F_RMIN] = feats[src, F_RMIN]
    if feats[src, F_RMAX] > feats[dst, F_RMAX]:
        feats[dst, F_RMAX] = feats[src, F_RMAX]
    if feats[src, F_CMIN] < feats[dst, F_CMIN]:
        feats[dst, F_CMIN] = feats[src, F_CMIN]
    if feats[src, F_CMAX] > feats[dst, F_CMAX]:
        feats[dst, F_CMAX] = feats[src, F_CMAX]


@_jit
def _add_segment(feats, label, i, j0, j1, fresh):
    n = j1 - j0
    sx = n * (j0 + j1 - 1) // 2
    if fresh:
        feats[label, F_S] = n
        feats[label, F_SX] = sx
        feats[label, F_SY] = i * n
        feats[label, F_RMIN] = i
        feats[label, F_RMAX] = i
        feats[label, F_CMIN] = j0
        feats[label, F_CMAX] = j1 - 1
        return
    feats[label, F_S] += n
    feats[label, F_SX] += sx
    feats[label, F_SY] += i * n
    if i < feats[label, F_RMIN]:
        feats[label, F_RMIN] = i
    if i > feats[label, F_RMAX]:
        feats[label, F_RMAX] = i
    if j0 < feats[label, F_CMIN]:
        feats[label, F_CMIN] = j0
    if j1 - 1 > feats[label, F_CMAX]:
        feats[label, F_CMAX] = j1 - 1


@_jit
def unify_row(i, w, er_prev, era_prev, rlc, ner, era, t, parity, iadj, feats,
              ne, fg8, do_features):
    """Black & white unification of row ``i`` against the previous row.

    Fills ``era[:ner]`` and updates the tables in place. Returns the new
    label counter. Capacity for ``ne + ner`` labels must already exist.
    """
    ers = 0
    if rlc[1] == 0:
        era[0] = 0
        ers = 1
    for er in range(ers, ner):
        j0 = rlc[er]
        j1 = rlc[er + 1]
        p = er & 1
        c8 = p if fg8 else p ^ 1
        # features use the unextended interval
        f_j0 = j0
        f_j1 = j1
        j0 = max(j0 - c8, 0)
        j1 = min(j1 + c8, w)
        er0 = er_prev[j0]
        er1 = er_prev[j1 - 1]
        er0 = er0 + ((er0 & 1) ^ p)
        er1 = er1 - ((er1 & 1) ^ p)
        if er1 >= er0:
            a = find(t, era_prev[er0])
            for erk in range(er0 + 2, er1 + 1, 2):
                ak = find(t, era_prev[erk])
                if a < ak:
                    t[ak] = a
                if a > ak:
                    t[a] = ak
                    a = ak
            era[er] = a
            if do_features:
                _add_segment(feats, a, i, f_j0, f_j1, False)
        else:
            era[er] = ne
            t[ne] = ne
            parity[ne] = p
            # column 0 has the exterior frame on its left
            iadj[ne] = era[er - 1] if er > 0 else 0
            if do_features:
                _add_segment(feats, ne, i, f_j0, f_j1, True)
            ne += 1
    a = find(t, era[0])
    t[a] = 0
    if ner & 1:
        a = find(t, era[ner - 1])
        t[a] = 0
    return ne


@_jit
def close_bottom_border(era, ner, t):
    """Tie every background segment of the last row to the exterior."""
    for er in range(0, ner, 2):
        a = find(t, era[er])
        t[a] = 0


@_jit
def transitive_closure(t, parity, iadj, feats, ne, fill_holes, do_features,
                       count_roots):
    """Flatten ``t``, merge features into roots, point ``iadj`` at roots.

    Returns ``(fg_roots, bg_roots_excluding_exterior)`` counted before any
    hole is merged; both are -1 when ``count_roots`` is false.
    """
    n_fg = 0
    n_bg = 0
    for e in range(ne):
        a = t[e]
        if e == a:
            if count_roots and e > 0:
                if parity[e]:
                    n_fg += 1
                else:
                    n_bg += 1
            if fill_holes and e > 0:
                s = iadj[e]
                if t[s] > 0:
                    t[e] = s
                    a = s
        if a < e:
            r = t[a]
            t[e] = r
            if do_features:
                _merge_rows(feats, r, e)
        elif e > 0:
            iadj[e] = t[iadj[e]]
    if not count_roots:
        return -1, -1
    return n_fg, n_bg


@_jit
def relabel(rlc_all, era_all, ner_all, t, dmap, use_dmap, out):
    h = out.shape[0]
    for i in range(h):
        j0 = rlc_all[i, 0]
        for er in range(ner_all[i]):
            r = t[era_all[i, er]]
            if use_dmap:
                r = dmap[r]
            j1 = rlc_all[i, er + 1]
            for j in range(j0, j1):
                out[i, j] = r
            j0 = j1


@_jit
def _grow_1d(a, cap):
    b = np.zeros(cap, dtype=a.dtype)
    b[: a.shape[0]] = a
    return b


@_jit
def _grow_feats(f, cap):
    g = np.empty((cap, N_FEATURES), dtype=np.int64)
    g[: f.shape[0]] = f
    for k in range(f.shape[0], cap):
        g[k, F_S] = 0
        g[k, F_SX] = 0
        g[k, F_SY] = 0
        g[k, F_RMIN] = INT64_MAX
        g[k, F_RMAX] = -1
        g[k, F_CMIN] = INT64_MAX
        g[k, F_CMAX] = -1
    return g


@_jit
def scan(pixels, fg8, do_features, retain, capacity):
    """Encode and unify every row, then close the bottom border.

    Row codes are kept for all rows when ``retain`` is true, otherwise in a
    two-row ring buffer. Tables start at ``capacity`` labels and double
    whenever a row could overflow them.
    """
    h, w = pixels.shape
    nbuf = h if retain else 2
    er_buf = np.zeros((2, w), dtype=np.int64)
    rlc_all = np.zeros((nbuf, w + 2), dtype=np.int64)
    era_all = np.zeros((nbuf, w + 1), dtype=np.int64)
    ner_all = np.zeros(nbuf, dtype=np.int64)

    t = np.zeros(capacity, dtype=np.int64)
    parity = np.zeros(capacity, dtype=np.uint8)
    iadj = np.zeros(capacity, dtype=np.int64)
    iadj[0] = NONE
    feats = _grow_feats(np.empty((0, N_FEATURES), dtype=np.int64),
                        capacity if do_features else 1)

    er_top = np.zeros(w, dtype=np.int64)
    era_top = np.zeros(1, dtype=np.int64)
    ne = 1
    for i in range(h):
        slot = i if retain else i & 1
        er_cur = er_buf[i & 1]
        ner = encode_row(pixels[i], er_cur, rlc_all[slot])
        ner_all[slot] = ner
        if ne + ner + 1 > t.shape[0]:
            cap = t.shape[0]
            while ne + ner + 1 > cap:
                cap *= 2
            t = _grow_1d(t, cap)
            parity = _grow_1d(parity, cap)
            iadj = _grow_1d(iadj, cap)
            if do_features:
                feats = _grow_feats(feats, cap)
        if i == 0:
            er_prev = er_top
            era_prev = era_top
        else:
            er_prev = er_buf[(i - 1) & 1]
            era_prev = era_all[i - 1 if retain else (i - 1) & 1]
        ne = unify_row(i, w, er_prev, era_prev, rlc_all[slot], ner,
                       era_all[slot], t, parity, iadj, feats, ne, fg8,
                       do_features)
    last = h - 1 if retain else (h - 1) & 1
    close_bottom_border(era_all[last], ner_all[last], t)
    return t, parity, iadj, feats, ne, rlc_all, era_all, ner_all


@_jit
def encode_all(pixels):
    """Segment detection of every row into a two-row buffer.

    Mirrors the encoding work done inside :func:`scan` so that it can be
    timed on its own; returns the total number of segments.
    """
    h, w = pixels.shape
    er_buf = np.zeros((2, w), dtype=np.int64)
    rlc_buf = np.zeros((2, w + 2), dtype=np.int64)
    total = 0
    for i in range(h):
        total += encode_row(pixels[i], er_buf[i & 1], rlc_buf[i & 1])
    return total
