"""Minutiae-based fingerprint similarity.

Exhaustive reference-pair alignment: for every pair of minutiae (one from
each template) the second template is rigidly transformed so the pair
coincides in position and angle, then transformed minutiae are greedily
paired to unmatched minutiae of the first template within 15 px and 20
degrees and of the same kind.  The score is the best alignment's paired
count divided by the larger template size.

Greedy pairing consumes candidate pairs in ascending (distance, angle
difference, a-index, b-index) order, which makes the score deterministic.
The kernel is JIT-compiled; candidate lookup uses a spatial hash grid with
cell size equal to the distance tolerance.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .templates import FingerprintTemplate

DIST_TOL = 15.0
ANGLE_TOL = 20.0

_CELL = 2.0 * DIST_TOL  # cell >= tolerance radius, so a disc spans <= 2 cells per axis
_NCELL = 17


@njit(cache=True, fastmath=True)
def _match_score(ax, ay, aang, akind, bx, by, bang, bkind):
    n_a = ax.shape[0]
    n_b = bx.shape[0]
    maxn = max(n_a, n_b)
    minn = min(n_a, n_b)

    cell_head = np.full(_NCELL * _NCELL, -1, np.int64)
    cell_next = np.full(n_a, -1, np.int64)
    for idx in range(n_a):
        cx = int(ax[idx] // _CELL)
        cy = int(ay[idx] // _CELL)
        if cx >= _NCELL:
            cx = _NCELL - 1
        if cy >= _NCELL:
            cy = _NCELL - 1
        c = cy * _NCELL + cx
        cell_next[idx] = cell_head[c]
        cell_head[c] = idx

    cap = n_a * n_b
    cand_ai = np.empty(cap, np.int64)
    cand_bi = np.empty(cap, np.int64)
    cand_d2 = np.empty(cap, np.float64)
    cand_ad = np.empty(cap, np.float64)
    a_used = np.empty(n_a, np.bool_)
    b_used = np.empty(n_b, np.bool_)

    deg2rad = np.pi / 180.0
    tol2 = DIST_TOL * DIST_TOL
    best = 0

    for i in range(n_a):
        for j in range(n_b):
            dtheta = aang[i] - bang[j]
            cr = np.cos(dtheta * deg2rad)
            sr = np.sin(dtheta * deg2rad)
            k = 0
            for m in range(n_b):
                relx = bx[m] - bx[j]
                rely = by[m] - by[j]
                tx = ax[i] + cr * relx - sr * rely
                ty = ay[i] + sr * relx + cr * rely
                tang = (bang[m] + dtheta) % 360.0

                ix0 = int(np.floor((tx - DIST_TOL) / _CELL))
                ix1 = int(np.floor((tx + DIST_TOL) / _CELL))
                iy0 = int(np.floor((ty - DIST_TOL) / _CELL))
                iy1 = int(np.floor((ty + DIST_TOL) / _CELL))
                if ix1 < 0 or iy1 < 0 or ix0 >= _NCELL or iy0 >= _NCELL:
                    continue
                if ix0 < 0:
                    ix0 = 0
                if iy0 < 0:
                    iy0 = 0
                if ix1 >= _NCELL:
                    ix1 = _NCELL - 1
                if iy1 >= _NCELL:
                    iy1 = _NCELL - 1

                for cy in range(iy0, iy1 + 1):
                    for cx in range(ix0, ix1 + 1):
                        idx = cell_head[cy * _NCELL + cx]
                        while idx >= 0:
                            if akind[idx] == bkind[m]:
                                dx = ax[idx] - tx
                                dy = ay[idx] - ty
                                d2 = dx * dx + dy * dy
                                if d2 <= tol2:
                                    ad = abs(aang[idx] - tang) % 360.0
                                    if ad > 180.0:
                                        ad = 360.0 - ad
                                    if ad <= ANGLE_TOL:
                                        cand_ai[k] = idx
                                        cand_bi[k] = m
                                        cand_d2[k] = d2
                                        cand_ad[k] = ad
                                        k += 1
                            idx = cell_next[idx]

            if k == 0:
                continue
            for t in range(n_a):
                a_used[t] = False
            for t in range(n_b):
                b_used[t] = False
            matched = 0
            while True:
                sel = -1
                sd2 = 0.0
                sad = 0.0
                sai = 0
                sbi = 0
                for t in range(k):
                    if a_used[cand_ai[t]] or b_used[cand_bi[t]]:
                        continue
                    take = False
                    if sel < 0 or cand_d2[t] < sd2:
                        take = True
                    elif cand_d2[t] == sd2:
                        if cand_ad[t] < sad:
                            take = True
                        elif cand_ad[t] == sad:
                            if cand_ai[t] < sai or (cand_ai[t] == sai and cand_bi[t] < sbi):
                                take = True
                    if take:
                        sel = t
                        sd2 = cand_d2[t]
                        sad = cand_ad[t]
                        sai = cand_ai[t]
                        sbi = cand_bi[t]
                if sel < 0:
                    break
                a_used[sai] = True
                b_used[sbi] = True
                matched += 1
            if matched > best:
                best = matched
                if best == minn:
                    return best / maxn
    return best / maxn


def fingerprint_score(a: FingerprintTemplate, b: FingerprintTemplate) -> float:
    ax, ay, aang, akind = a.arrays()
    bx, by, bang, bkind = b.arrays()
    return float(_match_score(ax, ay, aang, akind, bx, by, bang, bkind))
