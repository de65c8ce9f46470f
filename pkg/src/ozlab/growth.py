"""Direct i.i.d. cluster growth for the q = 1 (Bernoulli) model.

Every edge state is the counter-based hash of (seed, sample index, edge key),
so a whole percolation configuration is a pure function of (seed, index):
clusters can be regrown exactly, and results do not depend on exploration
order, chunking or thread count. Samples are split over a fixed number of
chunks whose partial results are combined in a fixed order.

The staged kernels reveal the cluster of the origin slab by slab along a
direction w: stage t allows vertices with <x,w> < t*L + 1, and the unit band
[t*L, t*L+1) carries the slab statistics (top coordinate, active segments).
A vertex can only enter at or after the stage of its band, and an empty band
implies a fully explored cluster, so "reaches slab m" is equivalent to
max <x,w> >= m*L.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit, prange

from .rng import edge_key, edge_u01, sample_key

GRID_R = 512
GRID_W = 2 * GRID_R + 1
N_CHUNKS = 256


@njit(cache=True, parallel=True)
def _twopoint_kernel(p, seed, n_samples, tgt_grid, tgt_r, n_targets):
    hits = np.zeros((N_CHUNKS, n_targets), dtype=np.int64)
    trunc = np.zeros(N_CHUNKS, dtype=np.int64)
    tgt_w = 2 * tgt_r + 1
    for c in prange(N_CHUNKS):
        lo = c * n_samples // N_CHUNKS
        hi = (c + 1) * n_samples // N_CHUNKS
        stamp = np.zeros(GRID_W * GRID_W, dtype=np.int32)
        stack = np.empty(GRID_W * GRID_W, dtype=np.int32)
        local = np.zeros(n_targets, dtype=np.int64)
        tr = 0
        for i in range(lo, hi):
            sv = np.int32(i - lo + 1)
            hs = sample_key(seed, i)
            oidx = GRID_R * GRID_W + GRID_R
            stamp[oidx] = sv
            stack[0] = oidx
            top = 1
            tj = tgt_grid[tgt_r * tgt_w + tgt_r]
            if tj >= 0:
                local[tj] += 1
            truncated = False
            while top > 0:
                top -= 1
                idx = stack[top]
                x = idx // GRID_W - GRID_R
                y = idx % GRID_W - GRID_R
                for d in range(4):
                    if d == 0:
                        nx = x + 1
                        ny = y
                        k = edge_key(x, y, 0)
                    elif d == 1:
                        nx = x - 1
                        ny = y
                        k = edge_key(x - 1, y, 0)
                    elif d == 2:
                        nx = x
                        ny = y + 1
                        k = edge_key(x, y, 1)
                    else:
                        nx = x
                        ny = y - 1
                        k = edge_key(x, y - 1, 1)
                    if edge_u01(hs, k) < p:
                        if nx < -GRID_R or nx > GRID_R or ny < -GRID_R or ny > GRID_R:
                            truncated = True
                            continue
                        nidx = (nx + GRID_R) * GRID_W + (ny + GRID_R)
                        if stamp[nidx] != sv:
                            stamp[nidx] = sv
                            stack[top] = nidx
                            top += 1
                            if -tgt_r <= nx <= tgt_r and -tgt_r <= ny <= tgt_r:
                                tj = tgt_grid[(nx + tgt_r) * tgt_w + (ny + tgt_r)]
                                if tj >= 0:
                                    local[tj] += 1
            if truncated:
                tr += 1
        for j in range(n_targets):
            hits[c, j] = local[j]
        trunc[c] = tr
    return hits.sum(axis=0), trunc.sum()


def twopoint_hits(p, targets, n_samples, seed):
    """Counts of samples whose cluster of 0 contains each target vertex."""
    targets = [(int(x), int(y)) for x, y in targets]
    tgt_r = max(1, max(max(abs(x), abs(y)) for x, y in targets))
    if tgt_r > GRID_R // 2:
        raise ValueError("targets too far for the growth grid")
    tgt_w = 2 * tgt_r + 1
    grid = np.full(tgt_w * tgt_w, -1, dtype=np.int64)
    for j, (x, y) in enumerate(targets):
        grid[(x + tgt_r) * tgt_w + (y + tgt_r)] = j
    hits, trunc = _twopoint_kernel(float(p), seed, int(n_samples), grid, tgt_r, len(targets))
    return hits, int(trunc)


@njit(cache=True, parallel=True)
def _reach_kernel(p, seed, n_samples, wx, wy, L, m_cap):
    hist = np.zeros((N_CHUNKS, m_cap + 1), dtype=np.int64)
    trunc = np.zeros(N_CHUNKS, dtype=np.int64)
    for c in prange(N_CHUNKS):
        lo = c * n_samples // N_CHUNKS
        hi = (c + 1) * n_samples // N_CHUNKS
        stamp = np.zeros(GRID_W * GRID_W, dtype=np.int32)
        stack = np.empty(GRID_W * GRID_W, dtype=np.int32)
        local = np.zeros(m_cap + 1, dtype=np.int64)
        tr = 0
        for i in range(lo, hi):
            sv = np.int32(i - lo + 1)
            hs = sample_key(seed, i)
            oidx = GRID_R * GRID_W + GRID_R
            stamp[oidx] = sv
            stack[0] = oidx
            top = 1
            maxp = 0.0
            truncated = False
            while top > 0:
                top -= 1
                idx = stack[top]
                x = idx // GRID_W - GRID_R
                y = idx % GRID_W - GRID_R
                for d in range(4):
                    if d == 0:
                        nx = x + 1
                        ny = y
                        k = edge_key(x, y, 0)
                    elif d == 1:
                        nx = x - 1
                        ny = y
                        k = edge_key(x - 1, y, 0)
                    elif d == 2:
                        nx = x
                        ny = y + 1
                        k = edge_key(x, y, 1)
                    else:
                        nx = x
                        ny = y - 1
                        k = edge_key(x, y - 1, 1)
                    if edge_u01(hs, k) < p:
                        if nx < -GRID_R or nx > GRID_R or ny < -GRID_R or ny > GRID_R:
                            truncated = True
                            continue
                        nidx = (nx + GRID_R) * GRID_W + (ny + GRID_R)
                        if stamp[nidx] != sv:
                            stamp[nidx] = sv
                            stack[top] = nidx
                            top += 1
                            s = nx * wx + ny * wy
                            if s > maxp:
                                maxp = s
            m = int(math.floor(maxp / L))
            if m > m_cap:
                m = m_cap
            local[m] += 1
            if truncated:
                tr += 1
        for j in range(m_cap + 1):
            hist[c, j] = local[j]
        trunc[c] = tr
    return hist.sum(axis=0), trunc.sum()


def reach_histogram(p, direction, L, n_samples, seed, m_cap=30):
    """Histogram over m of the deepest slab band reached by the cluster of 0."""
    hist, trunc = _reach_kernel(float(p), seed, int(n_samples),
                                direction.wx, direction.wy, int(L), int(m_cap))
    return hist, int(trunc)


@njit(cache=True)
def _stage_explore(hs, p, wx, wy, L, stage_cap, alpha,
                   stamp, sv, stack, pend, Xbuf, Mbuf, Nbuf):
    """One staged exploration. Returns (death, truncated, cone_margin).

    Fills Xbuf[t] (band top), Mbuf[t] (band midpoint (top+bottom)/2, the
    transient-free drift observable) and Nbuf[t] for t = 0..death. death = -1
    means the stage cap was hit before the cluster died.
    """
    segbuf = np.empty(128, dtype=np.int64)
    oidx = GRID_R * GRID_W + GRID_R
    stamp[oidx] = sv
    top = 0
    npend = 0
    # origin has projection 0: allowed at stage 0 (bound 1)
    stack[top] = oidx
    top += 1
    truncated = False
    margin = -1e18
    death = -1
    for t in range(stage_cap + 1):
        bound = t * L + 1.0
        band_lo = float(t * L)
        # release pending vertices now inside the allowed half-space
        w = 0
        for j in range(npend):
            idx = pend[j]
            x = idx // GRID_W - GRID_R
            y = idx % GRID_W - GRID_R
            if x * wx + y * wy < bound:
                stack[top] = idx
                top += 1
            else:
                pend[w] = idx
                w += 1
        npend = w
        bandmax = -1e18
        bandmin = 1e18
        nseg = 0
        while top > 0:
            top -= 1
            idx = stack[top]
            x = idx // GRID_W - GRID_R
            y = idx % GRID_W - GRID_R
            s = x * wx + y * wy
            h = -x * wy + y * wx
            m = abs(h) / alpha - s
            if m > margin:
                margin = m
            if s >= band_lo:
                if h > bandmax:
                    bandmax = h
                if h < bandmin:
                    bandmin = h
                k = int(math.floor(h / L))
                found = False
                for j in range(nseg):
                    if segbuf[j] == k:
                        found = True
                        break
                if not found and nseg < 128:
                    segbuf[nseg] = k
                    nseg += 1
            for d in range(4):
                if d == 0:
                    nx = x + 1
                    ny = y
                    kk = edge_key(x, y, 0)
                elif d == 1:
                    nx = x - 1
                    ny = y
                    kk = edge_key(x - 1, y, 0)
                elif d == 2:
                    nx = x
                    ny = y + 1
                    kk = edge_key(x, y, 1)
                else:
                    nx = x
                    ny = y - 1
                    kk = edge_key(x, y - 1, 1)
                if edge_u01(hs, kk) < p:
                    if nx < -GRID_R or nx > GRID_R or ny < -GRID_R or ny > GRID_R:
                        truncated = True
                        continue
                    nidx = (nx + GRID_R) * GRID_W + (ny + GRID_R)
                    if stamp[nidx] != sv:
                        stamp[nidx] = sv
                        if nx * wx + ny * wy < bound:
                            stack[top] = nidx
                            top += 1
                        else:
                            pend[npend] = nidx
                            npend += 1
        Nbuf[t] = nseg
        if nseg == 0:
            Xbuf[t] = np.nan
            Mbuf[t] = np.nan
            death = t
            break
        Xbuf[t] = bandmax
        Mbuf[t] = 0.5 * (bandmax + bandmin)
    return death, truncated, margin


@njit(cache=True, parallel=True)
def _explore_agg_kernel(p, seed, n_samples, wx, wy, L, stage_cap, t_cap, m_cap,
                        n_cond, quota, alpha):
    reach_hist = np.zeros((N_CHUNKS, m_cap + 1), dtype=np.int64)
    xsum = np.zeros((N_CHUNKS, m_cap + 1, t_cap + 1))
    x2sum = np.zeros((N_CHUNKS, m_cap + 1, t_cap + 1))
    pre_total = np.zeros(N_CHUNKS, dtype=np.int64)
    pre_last = np.zeros(N_CHUNKS, dtype=np.int64)
    trunc = np.zeros(N_CHUNKS, dtype=np.int64)
    ids = np.full((N_CHUNKS, quota), -1, dtype=np.int64)
    n_ids = np.zeros(N_CHUNKS, dtype=np.int64)
    overflow = np.zeros(N_CHUNKS, dtype=np.int64)
    for c in prange(N_CHUNKS):
        lo = c * n_samples // N_CHUNKS
        hi = (c + 1) * n_samples // N_CHUNKS
        stamp = np.zeros(GRID_W * GRID_W, dtype=np.int32)
        stack = np.empty(GRID_W * GRID_W, dtype=np.int32)
        pend = np.empty(GRID_W * GRID_W, dtype=np.int32)
        Xbuf = np.empty(stage_cap + 1)
        Mbuf = np.empty(stage_cap + 1)
        Nbuf = np.zeros(stage_cap + 1, dtype=np.int32)
        cnt = 0
        for i in range(lo, hi):
            sv = np.int32(i - lo + 1)
            hs = sample_key(seed, i)
            death, truncated, _ = _stage_explore(
                hs, p, wx, wy, L, stage_cap, alpha, stamp, sv, stack, pend,
                Xbuf, Mbuf, Nbuf)
            if truncated:
                trunc[c] += 1
            reach = death - 1 if death >= 0 else stage_cap
            rbin = reach if reach < m_cap else m_cap
            reach_hist[c, rbin] += 1
            tmax = reach if reach < t_cap else t_cap
            for t in range(tmax + 1):
                v = Mbuf[t]
                xsum[c, rbin, t] += v
                x2sum[c, rbin, t] += v * v
            # pre-renewal times with the minimum spacing of 2 slabs
            if death >= 0:
                s_prev = 0
                npre = 0
                for t in range(2, reach + 1):
                    if Nbuf[t] == 1 and t >= s_prev + 2:
                        npre += 1
                        s_prev = t
                pre_total[c] += npre
                if npre >= 1:
                    pre_last[c] += 1
            if n_cond > 0 and reach >= n_cond:
                if cnt < quota:
                    ids[c, cnt] = i
                    cnt += 1
                else:
                    overflow[c] += 1
        n_ids[c] = cnt
    return (reach_hist.sum(axis=0), xsum.sum(axis=0), x2sum.sum(axis=0),
            pre_total.sum(), pre_last.sum(), trunc.sum(), ids, n_ids, overflow.sum())


def explore_aggregates(p, direction, L, n_samples, seed, *, stage_cap=120,
                       t_cap=24, m_cap=24, n_cond=0, max_ids=0, alpha=4.0):
    """Staged-exploration sweep: reach histogram, per-slab X moments binned by
    reach, pre-renewal killing counters, and (optionally) ids of samples whose
    cluster reaches slab n_cond."""
    quota = max(1, int(max_ids * 2 // N_CHUNKS + 8)) if n_cond > 0 else 1
    (reach_hist, xsum, x2sum, pre_total, pre_last, trunc,
     ids, n_ids, overflow) = _explore_agg_kernel(
        float(p), seed, int(n_samples), direction.wx, direction.wy, int(L),
        int(stage_cap), int(t_cap), int(m_cap), int(n_cond), quota, float(alpha))
    if overflow > 0 and sum(n_ids) < max_ids:
        raise RuntimeError("accepted-id quota overflowed; raise max_ids")
    accepted = []
    for c in range(N_CHUNKS):
        accepted.extend(int(v) for v in ids[c, : n_ids[c]])
    accepted.sort()
    return {
        "reach_hist": reach_hist,
        "xsum": xsum,
        "x2sum": x2sum,
        "pre_total": int(pre_total),
        "pre_last": int(pre_last),
        "truncated": int(trunc),
        "accepted_ids": accepted,
    }


@njit(cache=True)
def _explore_single_kernel(p, seed, sample_idx, wx, wy, L, stage_cap, alpha):
    """Full staged regrow of one sample; returns per-stage trace and piece stats."""
    stamp = np.zeros(GRID_W * GRID_W, dtype=np.int32)
    stack = np.empty(GRID_W * GRID_W, dtype=np.int32)
    pend = np.empty(GRID_W * GRID_W, dtype=np.int32)
    segbuf = np.empty(128, dtype=np.int64)
    X = np.full(stage_cap + 1, np.nan)
    N = np.zeros(stage_cap + 1, dtype=np.int32)
    verts = np.zeros(stage_cap + 1, dtype=np.int64)
    edges = np.zeros(stage_cap + 1, dtype=np.int64)
    bbox = np.zeros((stage_cap + 1, 4), dtype=np.int64)  # minx maxx miny maxy
    hs = sample_key(seed, sample_idx)
    sv = np.int32(1)
    oidx = GRID_R * GRID_W + GRID_R
    stamp[oidx] = sv
    top = 0
    npend = 0
    stack[top] = oidx
    top += 1
    truncated = False
    margin = -1e18
    death = -1
    for t in range(stage_cap + 1):
        bound = t * L + 1.0
        band_lo = float(t * L)
        w = 0
        for j in range(npend):
            idx = pend[j]
            x = idx // GRID_W - GRID_R
            y = idx % GRID_W - GRID_R
            if x * wx + y * wy < bound:
                stack[top] = idx
                top += 1
            else:
                pend[w] = idx
                w += 1
        npend = w
        bandmax = -1e18
        nseg = 0
        minx = 1 << 30
        maxx = -(1 << 30)
        miny = 1 << 30
        maxy = -(1 << 30)
        nv = 0
        ne = 0
        while top > 0:
            top -= 1
            idx = stack[top]
            x = idx // GRID_W - GRID_R
            y = idx % GRID_W - GRID_R
            nv += 1
            if x < minx:
                minx = x
            if x > maxx:
                maxx = x
            if y < miny:
                miny = y
            if y > maxy:
                maxy = y
            s = x * wx + y * wy
            h = -x * wy + y * wx
            m = abs(h) / alpha - s
            if m > margin:
                margin = m
            if s >= band_lo:
                if h > bandmax:
                    bandmax = h
                k = int(math.floor(h / L))
                found = False
                for j in range(nseg):
                    if segbuf[j] == k:
                        found = True
                        break
                if not found and nseg < 128:
                    segbuf[nseg] = k
                    nseg += 1
            for d in range(4):
                if d == 0:
                    nx = x + 1
                    ny = y
                    kk = edge_key(x, y, 0)
                    canonical = True
                elif d == 1:
                    nx = x - 1
                    ny = y
                    kk = edge_key(x - 1, y, 0)
                    canonical = False
                elif d == 2:
                    nx = x
                    ny = y + 1
                    kk = edge_key(x, y, 1)
                    canonical = True
                else:
                    nx = x
                    ny = y - 1
                    kk = edge_key(x, y - 1, 1)
                    canonical = False
                if edge_u01(hs, kk) < p:
                    if canonical:
                        ne += 1
                    if nx < -GRID_R or nx > GRID_R or ny < -GRID_R or ny > GRID_R:
                        truncated = True
                        continue
                    nidx = (nx + GRID_R) * GRID_W + (ny + GRID_R)
                    if stamp[nidx] != sv:
                        stamp[nidx] = sv
                        if nx * wx + ny * wy < bound:
                            stack[top] = nidx
                            top += 1
                        else:
                            pend[npend] = nidx
                            npend += 1
        N[t] = nseg
        verts[t] = nv
        edges[t] = ne
        bbox[t, 0] = minx
        bbox[t, 1] = maxx
        bbox[t, 2] = miny
        bbox[t, 3] = maxy
        if nseg == 0:
            death = t
            break
        X[t] = bandmax
    return X, N, verts, edges, bbox, death, truncated, margin


def explore_sample(p, seed, sample_idx, direction, L, stage_cap=160, alpha=4.0):
    """Regrow one sample and return its staged-exploration record."""
    return _explore_single_kernel(float(p), seed, int(sample_idx),
                                  direction.wx, direction.wy, int(L),
                                  int(stage_cap), float(alpha))


@njit(cache=True, parallel=True)
def _explore_batch_kernel(p, seed, ids, wx, wy, L, stage_cap, alpha):
    n = ids.shape[0]
    S = stage_cap + 1
    X = np.full((n, S), np.nan, dtype=np.float32)
    N = np.zeros((n, S), dtype=np.int16)
    verts = np.zeros((n, S), dtype=np.int32)
    edges = np.zeros((n, S), dtype=np.int32)
    bbox = np.zeros((n, S, 4), dtype=np.int16)
    death = np.full(n, -1, dtype=np.int32)
    truncated = np.zeros(n, dtype=np.int8)
    margin = np.zeros(n, dtype=np.float64)
    for c in prange(N_CHUNKS):
        lo = c * n // N_CHUNKS
        hi = (c + 1) * n // N_CHUNKS
        if hi <= lo:
            continue
        stamp = np.zeros(GRID_W * GRID_W, dtype=np.int32)
        stack = np.empty(GRID_W * GRID_W, dtype=np.int32)
        pend = np.empty(GRID_W * GRID_W, dtype=np.int32)
        segbuf = np.empty(128, dtype=np.int64)
        for j in range(lo, hi):
            sv = np.int32(j - lo + 1)
            hs = sample_key(seed, ids[j])
            oidx = GRID_R * GRID_W + GRID_R
            stamp[oidx] = sv
            top = 0
            npend = 0
            stack[top] = oidx
            top += 1
            trunc = False
            marg = -1e18
            dth = -1
            for t in range(stage_cap + 1):
                bound = t * L + 1.0
                band_lo = float(t * L)
                w = 0
                for jj in range(npend):
                    idx = pend[jj]
                    x = idx // GRID_W - GRID_R
                    y = idx % GRID_W - GRID_R
                    if x * wx + y * wy < bound:
                        stack[top] = idx
                        top += 1
                    else:
                        pend[w] = idx
                        w += 1
                npend = w
                bandmax = -1e18
                nseg = 0
                minx = 1 << 14
                maxx = -(1 << 14)
                miny = 1 << 14
                maxy = -(1 << 14)
                nv = 0
                ne = 0
                while top > 0:
                    top -= 1
                    idx = stack[top]
                    x = idx // GRID_W - GRID_R
                    y = idx % GRID_W - GRID_R
                    nv += 1
                    if x < minx:
                        minx = x
                    if x > maxx:
                        maxx = x
                    if y < miny:
                        miny = y
                    if y > maxy:
                        maxy = y
                    s = x * wx + y * wy
                    h = -x * wy + y * wx
                    m = abs(h) / alpha - s
                    if m > marg:
                        marg = m
                    if s >= band_lo:
                        if h > bandmax:
                            bandmax = h
                        k = int(math.floor(h / L))
                        found = False
                        for jj in range(nseg):
                            if segbuf[jj] == k:
                                found = True
                                break
                        if not found and nseg < 128:
                            segbuf[nseg] = k
                            nseg += 1
                    for d in range(4):
                        if d == 0:
                            nx = x + 1
                            ny = y
                            kk = edge_key(x, y, 0)
                            canonical = True
                        elif d == 1:
                            nx = x - 1
                            ny = y
                            kk = edge_key(x - 1, y, 0)
                            canonical = False
                        elif d == 2:
                            nx = x
                            ny = y + 1
                            kk = edge_key(x, y, 1)
                            canonical = True
                        else:
                            nx = x
                            ny = y - 1
                            kk = edge_key(x, y - 1, 1)
                            canonical = False
                        if edge_u01(hs, kk) < p:
                            if canonical:
                                ne += 1
                            if nx < -GRID_R or nx > GRID_R or ny < -GRID_R or ny > GRID_R:
                                trunc = True
                                continue
                            nidx = (nx + GRID_R) * GRID_W + (ny + GRID_R)
                            if stamp[nidx] != sv:
                                stamp[nidx] = sv
                                if nx * wx + ny * wy < bound:
                                    stack[top] = nidx
                                    top += 1
                                else:
                                    pend[npend] = nidx
                                    npend += 1
                N[j, t] = nseg
                verts[j, t] = nv
                edges[j, t] = ne
                bbox[j, t, 0] = minx
                bbox[j, t, 1] = maxx
                bbox[j, t, 2] = miny
                bbox[j, t, 3] = maxy
                if nseg == 0:
                    dth = t
                    break
                X[j, t] = bandmax
            death[j] = dth
            truncated[j] = 1 if trunc else 0
            margin[j] = marg
    return X, N, verts, edges, bbox, death, truncated, margin


def explore_samples_batch(p, seed, ids, direction, L, stage_cap=80, alpha=4.0):
    """Regrow many counter-indexed samples in one pass (shared workspaces)."""
    ids = np.ascontiguousarray(np.asarray(ids, dtype=np.int64))
    return _explore_batch_kernel(float(p), seed, ids, direction.wx, direction.wy,
                                 int(L), int(stage_cap), float(alpha))


@njit(cache=True, parallel=True)
def _crossing_kernel(p, seed, n_samples, n):
    W = 2 * n + 1
    wins = np.zeros(N_CHUNKS, dtype=np.int64)
    for c in prange(N_CHUNKS):
        lo = c * n_samples // N_CHUNKS
        hi = (c + 1) * n_samples // N_CHUNKS
        stamp = np.zeros(W * W, dtype=np.int32)
        stack = np.empty(W * W, dtype=np.int32)
        won = 0
        for i in range(lo, hi):
            sv = np.int32(i - lo + 1)
            hs = sample_key(seed, i)
            top = 0
            for y in range(-n, n + 1):
                idx = 0 * W + (y + n)
                stamp[idx] = sv
                stack[top] = idx
                top += 1
            found = False
            while top > 0 and not found:
                top -= 1
                idx = stack[top]
                x = idx // W - n
                y = idx % W - n
                for d in range(4):
                    if d == 0:
                        nx = x + 1
                        ny = y
                        kk = edge_key(x, y, 0)
                    elif d == 1:
                        nx = x - 1
                        ny = y
                        kk = edge_key(x - 1, y, 0)
                    elif d == 2:
                        nx = x
                        ny = y + 1
                        kk = edge_key(x, y, 1)
                    else:
                        nx = x
                        ny = y - 1
                        kk = edge_key(x, y - 1, 1)
                    if nx < -n or nx > n or ny < -n or ny > n:
                        continue
                    if edge_u01(hs, kk) < p:
                        nidx = (nx + n) * W + (ny + n)
                        if stamp[nidx] != sv:
                            stamp[nidx] = sv
                            if nx == n:
                                found = True
                                break
                            stack[top] = nidx
                            top += 1
            if found:
                won += 1
        wins[c] = won
    return wins.sum()


def crossing_count(p, n, n_samples, seed) -> int:
    """Samples containing an open left-right crossing of Lambda_n (q = 1)."""
    return int(_crossing_kernel(float(p), seed, int(n_samples), int(n)))


@njit(cache=True, parallel=True)
def _onearm_kernel(p, seed, n_samples, R):
    W = 2 * R + 1
    wins = np.zeros(N_CHUNKS, dtype=np.int64)
    for c in prange(N_CHUNKS):
        lo = c * n_samples // N_CHUNKS
        hi = (c + 1) * n_samples // N_CHUNKS
        stamp = np.zeros(W * W, dtype=np.int32)
        stack = np.empty(W * W, dtype=np.int32)
        won = 0
        for i in range(lo, hi):
            sv = np.int32(i - lo + 1)
            hs = sample_key(seed, i)
            oidx = R * W + R
            stamp[oidx] = sv
            stack[0] = oidx
            top = 1
            found = False
            while top > 0 and not found:
                top -= 1
                idx = stack[top]
                x = idx // W - R
                y = idx % W - R
                for d in range(4):
                    if d == 0:
                        nx = x + 1
                        ny = y
                        kk = edge_key(x, y, 0)
                    elif d == 1:
                        nx = x - 1
                        ny = y
                        kk = edge_key(x - 1, y, 0)
                    elif d == 2:
                        nx = x
                        ny = y + 1
                        kk = edge_key(x, y, 1)
                    else:
                        nx = x
                        ny = y - 1
                        kk = edge_key(x, y - 1, 1)
                    if nx < -R or nx > R or ny < -R or ny > R:
                        continue
                    if edge_u01(hs, kk) < p:
                        nidx = (nx + R) * W + (ny + R)
                        if stamp[nidx] != sv:
                            stamp[nidx] = sv
                            if nx == R or nx == -R or ny == R or ny == -R:
                                found = True
                                break
                            stack[top] = nidx
                            top += 1
            if found:
                won += 1
        wins[c] = won
    return wins.sum()


def onearm_count(p, R, n_samples, seed) -> int:
    """Samples whose cluster of 0 reaches the boundary of Lambda_R (q = 1)."""
    if R == 0:
        return int(n_samples)
    return int(_onearm_kernel(float(p), seed, int(n_samples), int(R)))


@njit(cache=True)
def _materialize_kernel(p, seed, sample_idx, ex, ey, orient):
    m = ex.shape[0]
    bits = np.zeros(m, dtype=np.uint8)
    hs = sample_key(seed, sample_idx)
    for k in range(m):
        kk = edge_key(ex[k], ey[k], orient[k])
        if edge_u01(hs, kk) < p:
            bits[k] = 1
    return bits


def materialize_box_config(p, seed, sample_idx, graph):
    """Edge states of one counter-indexed sample on an explicit box graph.

    Exactly the states the growth kernels would draw, so kernel traces can be
    cross-checked against the stored-configuration explorer.
    """
    ex = np.zeros(graph.n_edges, dtype=np.int64)
    ey = np.zeros(graph.n_edges, dtype=np.int64)
    orient = np.zeros(graph.n_edges, dtype=np.int64)
    for k, (a, b) in enumerate(graph.edges):
        (ax, ay), (bx, by) = graph.vertices[a], graph.vertices[b]
        if bx == ax + 1:
            ex[k], ey[k], orient[k] = ax, ay, 0
        elif ax == bx + 1:
            ex[k], ey[k], orient[k] = bx, by, 0
        elif by == ay + 1:
            ex[k], ey[k], orient[k] = ax, ay, 1
        else:
            ex[k], ey[k], orient[k] = bx, by, 1
    return _materialize_kernel(float(p), seed, int(sample_idx), ex, ey, orient)
