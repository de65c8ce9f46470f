"""Macroscopic estimators: crossing probabilities, characteristic length,
one-arm probability, two-point function, correlation lengths.

q = 1 estimators ride the direct growth kernels (exact i.i.d. sampling);
q > 1 estimators read indicators off cluster-move chains. All estimates carry
binomial-type standard errors; points with fewer than 10 successes are flagged
censored and excluded from fits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import growth
from .exact import ModelParams
from .lattice import Direction, round_to_lattice
from .sampler import SamplerSpec, cm_box_twopoint, sample_chain
from .stats import LineFit, binomial_stderr, weighted_line_fit

CENSOR_FLOOR = 10


@dataclass(frozen=True)
class LengthEstimate:
    value: float
    stderr: float
    window: tuple
    method: str

    @property
    def censored(self) -> bool:
        return self.method.endswith("/censored")


@dataclass(frozen=True)
class TwoPointCurve:
    direction: Direction
    n: np.ndarray
    estimate: np.ndarray
    stderr: np.ndarray
    censored: np.ndarray
    samples: int

    def usable(self):
        return ~self.censored


def crossing_probability(n, params: ModelParams, bc="free", n_samples=20000, seed=0):
    """Monte Carlo estimate of the left-right crossing probability of Lambda_n."""
    if params.q == 1.0:
        wins = growth.crossing_count(params.p, n, n_samples, seed)
        return wins / n_samples, binomial_stderr(wins, n_samples)
    from .exact import grid_graph

    side = 2 * n + 1
    g = grid_graph(side, side)
    spec = SamplerSpec(params=params, algorithm="cluster-move", sweeps=n_samples,
                       burn_in=200, thinning=2, seed=seed, bc=bc)
    bits, _ = sample_chain(g, spec)
    wins = 0
    ea = g.edge_array()
    for row in bits:
        parent = np.arange(g.n_vertices, dtype=np.int64)

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for k in np.nonzero(row)[0]:
            ra, rb = find(ea[k, 0]), find(ea[k, 1])
            if ra != rb:
                parent[rb] = ra
        left = {find(i * side) for i in range(side)}
        right = {find(i * side + side - 1) for i in range(side)}
        if left & right:
            wins += 1
    return wins / n_samples, binomial_stderr(wins, n_samples)


def characteristic_length(params: ModelParams, delta=0.05, n_max=256,
                          n_samples=20000, seed=0) -> LengthEstimate:
    """Smallest n whose crossing probability leaves [delta, 1-delta].

    Doubling locates an exit scale, bisection finds the smallest one; the scan
    starts at n = 1 (Lambda_0 crossing is degenerate). Exceeding n_max returns
    a censored estimate.
    """
    if not (0.0 < delta < 0.5):
        raise ValueError("delta must be in (0, 1/2)")

    def exits(n):
        est, _ = crossing_probability(n, params, n_samples=n_samples, seed=seed + n)
        return est < delta or est > 1.0 - delta

    n = 1
    while not exits(n):
        if n >= n_max:
            return LengthEstimate(float(n_max), 0.0, (1, n_max),
                                  "characteristic_length/censored")
        n = min(2 * n, n_max)
    lo = n // 2 if n > 1 else 0  # largest power scale known inside, 0 if n=1 exits
    hi = n
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid == 0 or not exits(mid):
            lo = mid
        else:
            hi = mid
    return LengthEstimate(float(hi), 0.5, (1, n_max), "characteristic_length")


def one_arm(R, params: ModelParams, n_samples=100000, seed=0):
    """Estimate of P[0 <-> boundary of Lambda_R] (q = 1 growth)."""
    if R == 0:
        return 1.0, 0.0
    if params.q != 1.0:
        raise NotImplementedError("one-arm estimator implemented for q = 1")
    wins = growth.onearm_count(params.p, R, n_samples, seed)
    return wins / n_samples, binomial_stderr(wins, n_samples)


def two_point_curve(v: Direction, n_list, params: ModelParams,
                    n_samples=10**6, seed=0, box_side=128, burn=2000) -> TwoPointCurve:
    """Connection probabilities 0 <-> round(n*v) for all n in one pass.

    q = 1 grows the cluster of the origin per independent sample and records
    every reached target simultaneously; q > 1 averages connectivity indicators
    over cluster-move chains on a box (axis directions).
    """
    n_arr = np.array(sorted(set(int(n) for n in n_list)), dtype=np.int64)
    if np.any(n_arr < 0):
        raise ValueError("n must be nonnegative")
    inner = n_arr[n_arr > 0]
    if params.q == 1.0:
        targets = []
        for n in inner:
            pt = round_to_lattice((n * v.wx, n * v.wy))
            targets.append(pt.as_tuple())
        uniq = {}
        for j, t in enumerate(targets):
            uniq.setdefault(t, []).append(j)
        tlist = list(uniq)
        hits_u, trunc = growth.twopoint_hits(params.p, tlist, n_samples, seed)
        hits = np.zeros(inner.size, dtype=np.int64)
        for ti, t in enumerate(tlist):
            for j in uniq[t]:
                hits[j] = hits_u[ti]
        count = n_samples
    else:
        if abs(v.wy) > 1e-12:
            raise NotImplementedError("q > 1 two-point curves are measured along e1")
        hits, count = cm_box_twopoint(box_side, params, inner, n_samples, burn, seed)
    est = hits / count
    err = np.array([binomial_stderr(h, count) for h in hits])
    cens = hits < CENSOR_FLOOR
    if n_arr[0] == 0:
        est = np.concatenate([[1.0], est])
        err = np.concatenate([[0.0], err])
        cens = np.concatenate([[False], cens])
    return TwoPointCurve(v, n_arr, est, err, cens, int(count))


@dataclass(frozen=True)
class XiFit:
    estimate: LengthEstimate
    correction: str
    window: tuple
    n_used: np.ndarray
    residuals: np.ndarray
    fit: LineFit


def _xi_from_fit(fit: LineFit, window, method) -> LengthEstimate:
    if fit.slope >= 0:
        raise ValueError("two-point curve does not decay on the fit window")
    xi = -1.0 / fit.slope
    return LengthEstimate(xi, fit.slope_err * xi * xi, window, method)


def estimate_xi(curve: TwoPointCurve, correction="oz", window=None) -> XiFit:
    """Weighted fit of log G(n) = c - n/xi (- 1/2 log n with the OZ correction).

    The default window [2 xi_hat, 6 xi_hat] comes from a preliminary
    uncorrected fit over all usable points.
    """
    if correction not in ("none", "oz"):
        raise ValueError("correction must be 'none' or 'oz'")
    use = curve.usable() & (curve.n >= 1) & (curve.estimate > 0)
    if use.sum() < 5:
        raise ValueError("need at least 5 usable points")
    n = curve.n[use].astype(np.float64)
    g = curve.estimate[use]
    sig = curve.stderr[use] / g  # log-scale errors
    y = np.log(g)
    if window is None:
        prelim = weighted_line_fit(n, y, sig)
        xi0 = _xi_from_fit(prelim, (int(n[0]), int(n[-1])), "xi/prelim").value
        window = (2.0 * xi0, 6.0 * xi0)
    sel = (n >= window[0]) & (n <= window[1])
    if sel.sum() < 3:
        raise ValueError("fewer than 3 points in the fit window")
    yy = y[sel] + (0.5 * np.log(n[sel]) if correction == "oz" else 0.0)
    fit = weighted_line_fit(n[sel], yy, sig[sel])
    est = _xi_from_fit(fit, (float(window[0]), float(window[1])), f"xi/{correction}")
    return XiFit(est, correction, (float(window[0]), float(window[1])),
                 n[sel].astype(np.int64), fit.residuals, fit)


def halfspace_profile(w: Direction, params: ModelParams, L: int, m_max=20,
                      n_samples=10**6, seed=0):
    """P[0 <-> half-space at distance m*L] for m = 0..m_max, from one growth pass."""
    if params.q != 1.0:
        raise NotImplementedError("half-space profiles implemented for q = 1")
    hist, trunc = growth.reach_histogram(params.p, w, L, n_samples, seed, m_cap=m_max + 1)
    reach_ge = np.cumsum(hist[::-1])[::-1]  # samples with reach >= m
    hits = reach_ge[: m_max + 1]
    est = hits / n_samples
    err = np.array([binomial_stderr(h, n_samples) for h in hits])
    return np.arange(m_max + 1), est, err, hits


def halfspace_hit(w: Direction, n: int, params: ModelParams, L=None,
                  n_samples=10**6, seed=0):
    """Estimate of P[0 <-> H^w_{>= n*L}]; L defaults to the characteristic length."""
    if L is None:
        L = int(math.ceil(characteristic_length(params).value))
    _, est, err, _ = halfspace_profile(w, params, L, m_max=n, n_samples=n_samples, seed=seed)
    return est[n], err[n]


def estimate_zeta(w: Direction, params: ModelParams, L=None, n_samples=10**6,
                  seed=0, min_hits=1000, m_lo=2) -> LengthEstimate:
    """Survival rate zeta from the exponential-ratio decay of slab hits.

    Fits log hit(m) over the resolvable window (counts >= min_hits, m >= m_lo);
    zeta is per slab of thickness L, so xi* = zeta * L.
    """
    if L is None:
        L = int(math.ceil(characteristic_length(params).value))
    m, est, err, hits = halfspace_profile(w, params, L, m_max=24,
                                          n_samples=n_samples, seed=seed)
    sel = (hits >= min_hits) & (m >= m_lo)
    if sel.sum() < 3:
        raise ValueError("not enough resolvable slabs; raise n_samples")
    fit = weighted_line_fit(m[sel].astype(float), np.log(est[sel]), err[sel] / est[sel])
    le = _xi_from_fit(fit, (int(m[sel][0]), int(m[sel][-1])), "zeta/ratio")
    return LengthEstimate(le.value, le.stderr, le.window, "zeta/ratio")


def hit_ratios(w: Direction, params: ModelParams, L: int, n_samples=10**6,
               seed=0, min_hits=25000):
    """Successive slab-survival ratios over the resolvable window."""
    m, est, err, hits = halfspace_profile(w, params, L, m_max=24,
                                          n_samples=n_samples, seed=seed)
    usable = np.nonzero(hits >= min_hits)[0]
    m_hi = usable.max()
    ratios = []
    for k in range(1, m_hi + 1):
        r = est[k] / est[k - 1]
        rel = math.sqrt(1.0 / max(hits[k], 1) + 1.0 / max(hits[k - 1], 1))
        ratios.append((int(k), float(r), float(r * rel)))
    return ratios, int(m_hi)
