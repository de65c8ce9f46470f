"""Direction-resolved analysis: drift/variance per direction, the drift map
w -> v(w) and its inverse, the point and half-space correlation lengths, and the
polygonal unit ball / Wulff shape with duality and convexity checks.

The half-space decay rate zeta(w) gives xi*(w) = zeta * L; the transverse drift
mu(w) of survival-conditioned explorations tilts the travel direction to
v(w) ~ w + mu * w_perp, and xi along v(w) equals xi*(w) / <v(w), w>. The two
shapes are convex duals: the gauge function of one is the support function of
the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import Direction
from .observables import LengthEstimate


@dataclass(frozen=True)
class DirectionProfile:
    w: Direction
    zeta: LengthEstimate
    mu: float
    mu_err: float
    sigma: float
    sigma_err: float
    v_of_w: Direction
    xi_star: LengthEstimate
    xi_along_v: LengthEstimate
    L: int
    n_used: int

    @property
    def theta_w(self) -> float:
        return self.w.angle

    @property
    def theta_v(self) -> float:
        return self.v_of_w.angle


def drift_from_aggregates(agg, n_cond: int, t_lo: int, t_hi: int, L: int):
    """Transverse drift and dispersion per slab from reach-binned X moments.

    Uses samples surviving past t_hi (half-space conditioning): the endpoint
    difference of the band-midpoint observable between t_lo and t_hi estimates
    mu*L with a clean independent-sample error (the band top carries a growing
    width offset at small t, which the midpoint cancels); the variance
    difference estimates (sigma*L)^2 per slab.
    """
    if t_hi <= t_lo:
        raise ValueError("need t_hi > t_lo")
    hist = agg["reach_hist"]
    xsum = agg["xsum"]
    x2sum = agg["x2sum"]
    m0 = max(n_cond, t_hi)
    cnt = int(hist[m0:].sum())
    if cnt < 50:
        raise ValueError(f"only {cnt} conditioned samples; raise the budget")
    sx = xsum[m0:].sum(axis=0)
    sx2 = x2sum[m0:].sum(axis=0)
    mean = sx / cnt
    var = np.maximum(sx2 / cnt - mean**2, 0.0)
    dt = t_hi - t_lo
    mu = (mean[t_hi] - mean[t_lo]) / (dt * L)
    # Var[X_hi - X_lo] = Var_hi - Var_lo for ladder increments independent of the past
    var_inc = max(var[t_hi] - var[t_lo], 1e-12)
    sigma = math.sqrt(var_inc / dt) / L
    mu_err = math.sqrt(var_inc / dt / cnt) / (L * math.sqrt(dt))
    # relative error of a variance estimate ~ sqrt(2/cnt), propagated through sqrt
    sigma_err = sigma * math.sqrt(2.0 / cnt) / 2.0 * (var[t_hi] + var[t_lo]) / var_inc
    return float(mu), float(mu_err), float(sigma), float(sigma_err), cnt


def v_from_mu(w: Direction, mu: float) -> Direction:
    return Direction(w.wx - mu * w.wy, w.wy + mu * w.wx)


def direction_profile(w: Direction, zeta: LengthEstimate, agg, n_cond: int,
                      t_lo: int, t_hi: int, L: int) -> DirectionProfile:
    """Assemble the per-direction estimates from a staged-exploration sweep."""
    mu, mu_err, sigma, sigma_err, cnt = drift_from_aggregates(agg, n_cond, t_lo, t_hi, L)
    v = v_from_mu(w, mu)
    xi_star = LengthEstimate(zeta.value * L, zeta.stderr * L, zeta.window, "xi_star/zeta")
    norm = math.sqrt(1.0 + mu * mu)
    xi_v = xi_star.value * norm
    # delta method through mu and zeta
    dxi = math.hypot(xi_star.stderr * norm, xi_star.value * mu / norm * mu_err)
    return DirectionProfile(
        w=w, zeta=zeta, mu=mu, mu_err=mu_err, sigma=sigma, sigma_err=sigma_err,
        v_of_w=v, xi_star=xi_star,
        xi_along_v=LengthEstimate(xi_v, dxi, zeta.window, "xi/along-v"),
        L=L, n_used=cnt,
    )


def angle_map(profiles):
    """(theta_w, theta_v) pairs sorted by theta_w."""
    pairs = sorted((p.theta_w, p.theta_v) for p in profiles)
    return np.array([a for a, _ in pairs]), np.array([b for _, b in pairs])


def monotone_violations(profiles, slack):
    """Indices where theta_v decreases beyond the allowed statistical slack."""
    tw, tv = angle_map(profiles)
    bad = []
    for i in range(1, len(tv)):
        if tv[i] < tv[i - 1] - slack[i]:
            bad.append(i)
    return bad


def w_of_v(v: Direction, profiles) -> Direction:
    """Invert the drift map by monotone interpolation of the angle map."""
    tw, tv = angle_map(profiles)
    if np.any(np.diff(tv) <= 0):
        raise ValueError("angle map not strictly increasing on the grid")
    target = v.angle
    if not (tv[0] <= target <= tv[-1]):
        raise ValueError("v outside the mapped angular range")
    theta_w = float(np.interp(target, tv, tw))
    return Direction.from_angle(theta_w)


@dataclass(frozen=True)
class ShapeApprox:
    """Polygonal approximations: unit ball of 1/xi (gauge) and of 1/xi* (Wulff)."""

    u_angles: np.ndarray
    u_radii: np.ndarray
    u_errs: np.ndarray
    w_angles: np.ndarray
    w_radii: np.ndarray
    w_errs: np.ndarray
    p: float
    q: float

    def u_vertices(self):
        return np.stack([self.u_radii * np.cos(self.u_angles),
                         self.u_radii * np.sin(self.u_angles)], axis=1)

    def w_vertices(self):
        return np.stack([self.w_radii * np.cos(self.w_angles),
                         self.w_radii * np.sin(self.w_angles)], axis=1)


def _symmetrize_quadrant(angles, radii, errs):
    """Average first-quadrant radii with their diagonal reflections, then
    replicate over the dihedral orbit to the full circle."""
    ang = np.asarray(angles, dtype=float)
    rad = np.asarray(radii, dtype=float)
    err = np.asarray(errs, dtype=float)
    order = np.argsort(ang)
    ang, rad, err = ang[order], rad[order], err[order]
    refl = np.pi / 2 - ang
    rad_sym = 0.5 * (rad + np.interp(refl, ang, rad))
    err_sym = 0.5 * np.hypot(err, np.interp(refl, ang, err))
    full_a, full_r, full_e = [], [], []
    for a, r, e in zip(ang, rad_sym, err_sym):
        for base in (a, np.pi - a, np.pi + a, -a):
            full_a.append(math.atan2(math.sin(base), math.cos(base)))
            full_r.append(r)
            full_e.append(e)
    fa = np.array(full_a)
    order = np.argsort(fa)
    uniq = np.concatenate([[True], np.diff(fa[order]) > 1e-9])
    return fa[order][uniq], np.array(full_r)[order][uniq], np.array(full_e)[order][uniq]


def build_shapes(xi_angles, xi_values, xi_errs, profiles, p, q) -> ShapeApprox:
    """U from point correlation lengths on a first-quadrant grid, W from profiles."""
    if len(xi_angles) < 8:
        raise ValueError("need at least 8 grid directions per quadrant")
    ua, ur, ue = _symmetrize_quadrant(xi_angles, xi_values, xi_errs)
    wa = [pr.theta_w for pr in profiles]
    wr = [pr.xi_star.value for pr in profiles]
    we = [pr.xi_star.stderr for pr in profiles]
    wa, wr, we = _symmetrize_quadrant(wa, wr, we)
    return ShapeApprox(ua, ur, ue, wa, wr, we, p, q)


@dataclass(frozen=True)
class DualityReport:
    max_violation_sigmas: float
    pair_count: int
    equality_angle_errors: list
    reconstruction_rel_dev: float

    def ok(self, angle_tol_deg: float) -> bool:
        return (self.max_violation_sigmas <= 2.0
                and all(abs(e) <= angle_tol_deg for _, e in self.equality_angle_errors))


def duality_check(shapes: ShapeApprox, profiles) -> DualityReport:
    """xi(v) <v,w> <= xi*(w) on the grid; equality attained at v(w).

    The maximizer over v is located with a parabolic refinement; reconstruction
    rebuilds the gauge radii of U from the support values xi* and compares.
    """
    ua, ur, ue = shapes.u_angles, shapes.u_radii, shapes.u_errs
    max_sig = 0.0
    count = 0
    for pr in profiles:
        wx, wy = pr.w.wx, pr.w.wy
        star, star_err = pr.xi_star.value, pr.xi_star.stderr
        for a, r, e in zip(ua, ur, ue):
            dot = math.cos(a) * wx + math.sin(a) * wy
            if dot <= 0:
                continue
            lhs = r * dot
            err = math.hypot(e * dot, star_err)
            sig = (lhs - star) / err if err > 0 else 0.0
            max_sig = max(max_sig, sig)
            count += 1
    # equality directions
    eq_errors = []
    for pr in profiles:
        wx, wy = pr.w.wx, pr.w.wy
        vals = ur * (np.cos(ua) * wx + np.sin(ua) * wy)
        j = int(np.argmax(vals))
        jm, jp = max(j - 1, 0), min(j + 1, len(ua) - 1)
        if jm < j < jp:
            d2 = vals[jm] - 2 * vals[j] + vals[jp]
            off = 0.5 * (vals[jm] - vals[jp]) / d2 if d2 < 0 else 0.0
            off = max(-1.0, min(1.0, off))
            theta_star = ua[j] + off * (ua[jp] - ua[j] if off > 0 else ua[j] - ua[jm])
        else:
            theta_star = ua[j]
        eq_errors.append((pr.theta_w, math.degrees(theta_star - pr.theta_v)))
    # support reconstruction of U from xi*
    wa, wr = shapes.w_angles, shapes.w_radii
    rec_dev = 0.0
    for a, r in zip(ua, ur):
        dots = np.cos(wa - a)
        ok = dots > 0.05
        rec = np.min(wr[ok] / dots[ok])
        rec_dev = max(rec_dev, abs(rec - r) / r)
    return DualityReport(max_sig, count, eq_errors, rec_dev)


@dataclass(frozen=True)
class ConvexityReport:
    curvature: np.ndarray
    facet_flags: np.ndarray
    colinear_flags: np.ndarray

    @property
    def facet_free(self) -> bool:
        return not self.facet_flags.any()


def convexity_check(angles, radii, errs, noise_sigmas=3.0) -> ConvexityReport:
    """Support-function curvature proxy h + h'' > 0 and colinearity facet flags.

    `radii` are support values on the angle grid; a facet shows up as a run of
    vanishing curvature (h + h'' ~ 0) or three colinear boundary points.
    """
    a = np.asarray(angles, dtype=float)
    h = np.asarray(radii, dtype=float)
    e = np.asarray(errs, dtype=float)
    n = len(a)
    if n < 5:
        raise ValueError("need at least 5 grid points")
    curv = np.empty(n)
    noise = np.empty(n)
    for i in range(n):
        im, ip = (i - 1) % n, (i + 1) % n
        d1 = math.atan2(math.sin(a[i] - a[im]), math.cos(a[i] - a[im]))
        d2 = math.atan2(math.sin(a[ip] - a[i]), math.cos(a[ip] - a[i]))
        d = 0.5 * (abs(d1) + abs(d2))
        hpp = (h[ip] - 2 * h[i] + h[im]) / (d * d)
        curv[i] = h[i] + hpp
        noise[i] = noise_sigmas * math.sqrt(e[ip] ** 2 + 4 * e[i] ** 2 + e[im] ** 2) / (d * d)
    # a facet has h + h'' ~ 0: flag curvature indistinguishable from zero at
    # the noise level, with a 2% radius floor for discretization error
    facet = curv < noise + 0.02 * np.abs(h)
    # colinearity of consecutive boundary points of the polygon with radii h
    pts = np.stack([h * np.cos(a), h * np.sin(a)], axis=1)
    colin = np.zeros(n, dtype=bool)
    for i in range(n):
        p0, p1, p2 = pts[(i - 1) % n], pts[i], pts[(i + 1) % n]
        cross = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p1[1] - p0[1]) * (p2[0] - p0[0])
        base = np.linalg.norm(p2 - p0)
        height = abs(cross) / base if base > 0 else 0.0
        tol = 3.0 * max(e[(i - 1) % n], e[i], e[(i + 1) % n]) + 1e-12
        colin[i] = height < tol
    return ConvexityReport(curv, facet, colin)


def measure_direction_grid(params, L, *, n_quadrant=16, zeta_samples=10**7,
                           drift_budget=10**7, t_lo=1, t_hi=4, seed=0,
                           xi_samples=10**7, n_max_factor=7.0):
    """Full first-quadrant measurement: profiles per w plus xi(v) on the grid.

    One half-space scan per direction gives zeta and the drift statistics; a
    single two-point pass over all grid directions gives the point correlation
    lengths. Returns (profiles, xi_angles, xi_values, xi_errs).
    """
    from . import growth, observables

    thetas = [i * (math.pi / 2) / (n_quadrant - 1) for i in range(n_quadrant)]
    profiles = []
    for i, theta in enumerate(thetas):
        w = Direction.from_angle(theta)
        zeta = observables.estimate_zeta(w, params, L=L, n_samples=zeta_samples,
                                         seed=seed + 1000 + i, min_hits=400)
        agg = growth.explore_aggregates(params.p, w, L, drift_budget,
                                        seed + 2000 + i, stage_cap=40,
                                        t_cap=max(8, t_hi), m_cap=max(8, t_hi))
        profiles.append(direction_profile(w, zeta, agg, t_hi, t_lo, t_hi, L))
    # preliminary axis xi sizes the two-point windows; one combined pass
    # over all grid directions shares the growth samples
    xi_axis = profiles[0].xi_along_v.value
    n_max = int(math.ceil(n_max_factor * xi_axis))
    n_list = np.arange(1, n_max + 1)
    from .lattice import round_to_lattice

    targets = []
    for theta in thetas:
        v = Direction.from_angle(theta)
        for n in n_list:
            targets.append(round_to_lattice((n * v.wx, n * v.wy)).as_tuple())
    uniq = sorted(set(targets))
    pos = {t: j for j, t in enumerate(uniq)}
    hits_u, _ = growth.twopoint_hits(params.p, uniq, xi_samples, seed + 3000)
    xi_angles, xi_values, xi_errs = [], [], []
    for i, theta in enumerate(thetas):
        v = Direction.from_angle(theta)
        hits = np.array([hits_u[pos[round_to_lattice((n * v.wx, n * v.wy)).as_tuple()]]
                         for n in n_list])
        est = hits / xi_samples
        err = np.array([observables.binomial_stderr(h, xi_samples) for h in hits])
        curve = observables.TwoPointCurve(v, n_list, est, err,
                                          hits < observables.CENSOR_FLOOR, xi_samples)
        fit = observables.estimate_xi(curve, correction="oz")
        xi_angles.append(theta)
        xi_values.append(fit.estimate.value)
        xi_errs.append(fit.estimate.stderr)
    return profiles, np.array(xi_angles), np.array(xi_values), np.array(xi_errs)


def wulff_csv_rows(profiles, xi_map, run_id: str):
    """Rows for wulff.csv: one per measured direction."""
    rows = []
    for pr in profiles:
        rows.append({
            "run_id": run_id,
            "theta_w": pr.theta_w,
            "zeta": pr.zeta.value,
            "mu": pr.mu,
            "sigma": pr.sigma,
            "theta_v": pr.theta_v,
            "xi_star": pr.xi_star.value,
            "xi": xi_map.get(round(pr.theta_w, 9), pr.xi_along_v.value),
        })
    return rows
