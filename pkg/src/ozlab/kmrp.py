"""Killed Markov renewal processes: simulation, renewal convolutions, survival rate.

A process renews at i.i.d. inter-renewal steps (tau, dx) drawn from the interior
law (total mass 1-kappa) and is killed with probability kappa at each renewal;
death is instantaneous, so survival without a renewal for n frames means the
current step is still in progress. The survival rate zeta and the amplitude of
the pure-exponential law of renewal hits come from the generating-function
identity P(z) = 1/(1-A(z)): the rate is the root of A(z) = 1, unique below the
tail radius for aperiodic laws with a mass-gap.

X-increments live on a configurable lattice (default spacing 1.0) so that local
limit statements are about well-defined point masses; continuous inputs are
binned on ingestion.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.stats import norm

from .rng import philox, mix64, next_state, state_u01, GOLDEN


class PeriodicLawError(ValueError):
    """gcd of the tau-support exceeds 1; the renewal equation root is not unique."""


class NoMassGapError(ValueError):
    """A(z) stays below 1 up to the certified tail radius (condensation signal)."""


def _ingest_table(table, x_lattice):
    taus, dxs, probs = [], [], []
    for tau, dx, prob in table:
        tau = int(tau)
        if tau < 1:
            raise ValueError("tau increments must be >= 1")
        if prob < 0:
            raise ValueError("negative probability")
        k = round(float(dx) / x_lattice)
        taus.append(tau)
        dxs.append(k * x_lattice)
        probs.append(float(prob))
    # merge duplicates created by binning
    agg = {}
    for t, x, pr in zip(taus, dxs, probs):
        agg[(t, x)] = agg.get((t, x), 0.0) + pr
    items = sorted(agg.items())
    tau = np.array([k[0] for k, _ in items], dtype=np.int64)
    dx = np.array([k[1] for k, _ in items], dtype=np.float64)
    prob = np.array([v for _, v in items], dtype=np.float64)
    return tau, dx, prob


@dataclass
class StepLaw:
    """Joint law of one irreducible step plus killing and initial-step data.

    interior_*: atoms of the interior step (tau >= 1, dx on the X lattice) with
    total mass 1 - kappa. initial_*: atoms of the first step with total mass
    sigma1 (initial survival). tail_rate, when given, certifies
    P[tau > n] <= exp(-tail_rate * n) and bounds the search radius for the
    survival-rate root; None means the finite table is exact.
    """

    kappa: float
    interior_tau: np.ndarray
    interior_dx: np.ndarray
    interior_prob: np.ndarray
    initial_tau: np.ndarray
    initial_dx: np.ndarray
    initial_prob: np.ndarray
    tail_rate: float | None = None
    x_lattice: float = 1.0

    TOL = 1e-12

    @classmethod
    def from_tables(cls, kappa, interior, initial=None, tail_rate=None, x_lattice=1.0):
        """Build from [(tau, dx, prob), ...] tables; interior probs are conditional
        on survival and get scaled by (1 - kappa)."""
        t, x, pr = _ingest_table(interior, x_lattice)
        s = pr.sum()
        if s <= 0:
            raise ValueError("empty interior law")
        pr = pr / s * (1.0 - kappa)
        if initial is None:
            it, ix, ipr = t.copy(), x.copy(), pr / (1.0 - kappa)
        else:
            it, ix, ipr = _ingest_table(initial, x_lattice)
        return cls(kappa, t, x, pr, it, ix, ipr, tail_rate=tail_rate, x_lattice=x_lattice)

    def __post_init__(self):
        # kappa = 0 is reserved for tilted (survival-conditioned) laws
        if not (0.0 <= self.kappa < 1.0):
            raise ValueError("kappa must be in [0,1)")
        if abs(self.interior_prob.sum() - (1.0 - self.kappa)) > self.TOL:
            raise ValueError("interior mass must equal 1 - kappa")
        s1 = self.initial_prob.sum()
        if not (0.0 < s1 <= 1.0 + self.TOL):
            raise ValueError("initial survival mass must lie in (0, 1]")
        if np.any(self.interior_tau < 1) or np.any(self.initial_tau < 1):
            raise ValueError("tau increments must be >= 1")
        if self.tail_rate is not None:
            self.validate_tail_certificate()

    @property
    def sigma1(self) -> float:
        return float(self.initial_prob.sum())

    def tau_marginal(self) -> dict:
        out = {}
        for t, pr in zip(self.interior_tau, self.interior_prob):
            out[int(t)] = out.get(int(t), 0.0) + float(pr)
        return out

    def validate_tail_certificate(self):
        marg = self.tau_marginal()
        total = 1.0 - self.kappa
        taus = sorted(marg)
        cum = 0.0
        for t in taus:
            cum += marg[t]
            tail = total - cum  # P[tau > t], killed mass excluded
            if tail > math.exp(-self.tail_rate * t) + self.TOL:
                raise ValueError(f"tail certificate violated at tau={t}")

    def gcd_tau_support(self) -> int:
        g = 0
        for t, pr in zip(self.interior_tau, self.interior_prob):
            if pr > 0:
                g = math.gcd(g, int(t))
        return g

    def moments(self):
        """(mean tau, mean dx, std dx) of the interior step conditioned on survival."""
        w = self.interior_prob / self.interior_prob.sum()
        mt = float(w @ self.interior_tau)
        mx = float(w @ self.interior_dx)
        vx = float(w @ (self.interior_dx - mx) ** 2)
        return mt, mx, math.sqrt(vx)

    def to_json(self) -> str:
        return json.dumps(
            {
                "kappa": self.kappa,
                "initial": [[int(t), float(x), float(p)] for t, x, p in
                            zip(self.initial_tau, self.initial_dx, self.initial_prob)],
                "interior": [[int(t), float(x), float(p)] for t, x, p in
                             zip(self.interior_tau, self.interior_dx, self.interior_prob)],
                "tail_rate": self.tail_rate,
                "x_lattice": self.x_lattice,
            },
            indent=1,
        )

    @classmethod
    def from_json(cls, text: str) -> "StepLaw":
        d = json.loads(text)
        t, x, pr = _ingest_table(d["interior"], d.get("x_lattice", 1.0))
        it, ix, ipr = _ingest_table(d["initial"], d.get("x_lattice", 1.0))
        return cls(d["kappa"], t, x, pr, it, ix, ipr,
                   tail_rate=d.get("tail_rate"), x_lattice=d.get("x_lattice", 1.0))


def geometric_law(kappa: float, dx: float = 0.0) -> StepLaw:
    """tau identically 1: the renewal chain with survival probability 1-kappa."""
    return StepLaw.from_tables(kappa, [(1, dx, 1.0)])


@dataclass(frozen=True)
class KMRPPath:
    """One simulated trajectory; X is NaN from the death frame onwards."""

    X: np.ndarray
    Y: np.ndarray
    renewal_times: np.ndarray
    death_time: int | None

    def alive(self, t: int) -> bool:
        return not math.isnan(self.X[t])


def simulate(law: StepLaw, n: int, seed: int) -> KMRPPath:
    """Simulate n frames; X linearly interpolated between renewal values."""
    rng = philox(seed)
    X = np.full(n + 1, np.nan)
    Y = np.zeros(n + 1, dtype=np.int8)
    X[0] = 0.0
    Y[0] = 1  # T_0 = 0
    renewals = [0]
    # initial step
    u = rng.random()
    cum = np.cumsum(law.initial_prob)
    t_cur, x_cur = 0, 0.0
    death = None
    if u >= cum[-1]:
        death = 1
    else:
        j = int(np.searchsorted(cum, u, side="right"))
        t_cur = int(law.initial_tau[j])
        x_cur = float(law.initial_dx[j])
    if death is None:
        if t_cur <= n:
            X[1: t_cur + 1] = np.linspace(0.0, x_cur, t_cur + 1)[1:]
            Y[t_cur] = 1
            renewals.append(t_cur)
        else:
            X[1:] = np.linspace(0.0, x_cur, t_cur + 1)[1: n + 1]
        cum_int = np.cumsum(law.interior_prob)
        while t_cur <= n:
            u = rng.random()
            if u >= cum_int[-1]:
                death = t_cur + 1
                break
            j = int(np.searchsorted(cum_int, u, side="right"))
            tau = int(law.interior_tau[j])
            dx = float(law.interior_dx[j])
            t_next, x_next = t_cur + tau, x_cur + dx
            hi = min(t_next, n)
            for t in range(t_cur + 1, hi + 1):
                X[t] = x_cur + dx * (t - t_cur) / tau
            if t_next <= n:
                Y[t_next] = 1
                renewals.append(t_next)
            t_cur, x_cur = t_next, x_next
    if death is not None and death <= n:
        X[death:] = np.nan
    return KMRPPath(X, Y, np.array(renewals, dtype=np.int64), death)


@dataclass(frozen=True)
class RenewalSequences:
    """a_n (renewal-step atoms), c_n (survival w/o renewal), p_n (renewal hits), s_n (survival)."""

    a: np.ndarray
    c: np.ndarray
    p: np.ndarray
    s: np.ndarray


@njit(cache=True)
def _convolve(taus, avals, c, n_max):
    p = np.zeros(n_max + 1)
    s = np.zeros(n_max + 1)
    p[0] = 1.0
    n_atoms = taus.shape[0]
    for n in range(1, n_max + 1):
        acc = 0.0
        comp = 0.0
        for j in range(n_atoms):
            if taus[j] <= n:
                term = avals[j] * p[n - taus[j]]
                y = term - comp
                t = acc + y
                comp = (t - acc) - y
                acc = t
        p[n] = acc
    c_len = c.shape[0]
    for n in range(n_max + 1):
        acc = 0.0
        comp = 0.0
        hi = min(n, c_len - 1)
        for d in range(hi + 1):
            term = p[n - d] * c[d]
            y = term - comp
            t = acc + y
            comp = (t - acc) - y
            acc = t
        s[n] = acc
    return p, s


def convolve_renewal(law: StepLaw, n_max: int) -> RenewalSequences:
    """Exact renewal recursions p_n = sum_k a_k p_{n-k} (+1 at n=0) and s_n = (p*c)_n."""
    if n_max > 10**6:
        raise ValueError("n_max capped at 1e6")
    marg = law.tau_marginal()
    a = np.zeros(n_max + 1)
    for t, pr in marg.items():
        if t <= n_max:
            a[t] += pr
    # survival of the in-progress step: c_0 = 1, c_n = P[tau > n, not killed]
    t_max = min(max(marg), n_max)
    c = np.zeros(t_max + 1)
    c[0] = 1.0
    if t_max >= 1:
        c[1:] = np.maximum((1.0 - law.kappa) - np.cumsum(a[1: t_max + 1]), 0.0)
    taus = np.array(sorted(t for t in marg if t <= n_max), dtype=np.int64)
    avals = np.array([marg[int(t)] for t in taus], dtype=np.float64)
    p, s = _convolve(taus, avals, c, n_max)
    a_full = a
    c_full = np.zeros(n_max + 1)
    c_full[: t_max + 1] = c
    return RenewalSequences(a=a_full, c=c_full, p=p, s=s)


@dataclass(frozen=True)
class RateSolution:
    """Root data of the killed renewal equation for one step law."""

    R_p: float
    zeta: float
    amplitude: float
    mass_gap_margin: float


def _gen_fun(law):
    taus = law.interior_tau.astype(np.float64)
    probs = law.interior_prob

    def A(z):
        return float(np.sum(probs * z ** taus))

    def A_prime(z):
        return float(np.sum(probs * taus * z ** (taus - 1)))

    return A, A_prime


def solve_rate(law: StepLaw) -> RateSolution:
    """Solve A(R_p) = 1 on (1, R_a); zeta = 1/log R_p, amplitude = 1/(R_p A'(R_p)).

    Rejects periodic laws; failure to bracket a root below the certified tail
    radius is reported as the no-mass-gap (condensation) signal, never silently
    extrapolated.
    """
    g = law.gcd_tau_support()
    if g != 1:
        raise PeriodicLawError(f"gcd of tau-support is {g}")
    A, A_prime = _gen_fun(law)
    lo = 1.0 + 1e-9
    if law.tail_rate is not None:
        hi = math.exp(law.tail_rate) - 1e-9
        if hi <= lo or A(hi) < 1.0:
            raise NoMassGapError("no root of A(z)=1 below the certified tail radius")
    else:
        hi = 2.0
        while A(hi) < 1.0:
            hi *= 2.0
            if hi > 1e12:
                raise NoMassGapError("A(z) never reaches 1")
    # bisection bracket, then Newton polish
    a_lo, a_hi = lo, hi
    for _ in range(200):
        mid = 0.5 * (a_lo + a_hi)
        if A(mid) < 1.0:
            a_lo = mid
        else:
            a_hi = mid
        if a_hi - a_lo < 1e-9 * a_hi:
            break
    z = 0.5 * (a_lo + a_hi)
    for _ in range(60):
        f = A(z) - 1.0
        df = A_prime(z)
        step = f / df
        z_new = z - step
        if not (a_lo * 0.5 <= z_new <= a_hi * 2.0):
            break
        if abs(z_new - z) <= 1e-15 * z_new:
            z = z_new
            break
        z = z_new
    R_p = z
    if abs(A(R_p) - 1.0) > 1e-12:
        raise ArithmeticError("root polish failed")
    radius = math.exp(law.tail_rate) if law.tail_rate is not None else math.inf
    return RateSolution(
        R_p=R_p,
        zeta=1.0 / math.log(R_p),
        amplitude=1.0 / (R_p * A_prime(R_p)),
        mass_gap_margin=radius - R_p,
    )


def asymptotic_check(law: StepLaw, n: int) -> float:
    """|p_n R_p^n / amplitude - 1| with the convolution oracle as p_n."""
    sol = solve_rate(law)
    seq = convolve_renewal(law, n)
    log_val = math.log(seq.p[n]) + n * math.log(sol.R_p) - math.log(sol.amplitude)
    return abs(math.expm1(log_val))


def tilted_law(law: StepLaw) -> StepLaw:
    """Interior law reweighted by R_p^tau: the step law conditioned to survive forever.

    Killing disappears (kappa -> 0 is represented by an epsilon-free construction:
    the returned object keeps kappa as 0 mass via the interior table summing to 1
    and a nominal kappa of 0); the initial law is kept untilted (first/last steps
    of a conditioned chain have boundary laws of their own).
    """
    sol = solve_rate(law)
    w = law.interior_prob * sol.R_p ** law.interior_tau.astype(np.float64)
    w = w / w.sum()
    return StepLaw(
        kappa=0.0,
        interior_tau=law.interior_tau.copy(),
        interior_dx=law.interior_dx.copy(),
        interior_prob=w,
        initial_tau=law.initial_tau.copy(),
        initial_dx=law.initial_dx.copy(),
        initial_prob=law.initial_prob.copy(),
        tail_rate=None,
        x_lattice=law.x_lattice,
    )


def untilt_law(tilted: StepLaw, R_p: float) -> np.ndarray:
    """Reverse tilt: probabilities proportional to R_p^{-tau}, normalized to 1."""
    w = tilted.interior_prob * R_p ** (-tilted.interior_tau.astype(np.float64))
    return w / w.sum()


@njit(cache=True)
def _simulate_sums(tau_cum, dx_vals, n, trials, seed, t_grid):
    """i.i.d. tilted steps; returns X at the t_grid frames and at frame n."""
    n_grid = t_grid.shape[0]
    out_grid = np.zeros((trials, n_grid))
    out_end = np.zeros(trials)
    for tr in range(trials):
        s = mix64(np.uint64(seed) + GOLDEN * np.uint64(tr))
        x = 0.0
        gi = 0
        for k in range(1, n + 1):
            s = next_state(s)
            u = state_u01(s)
            j = np.searchsorted(tau_cum, u)
            x += dx_vals[j]
            while gi < n_grid and t_grid[gi] == k:
                out_grid[tr, gi] = x
                gi += 1
        out_end[tr] = x
    return out_grid, out_end


@dataclass(frozen=True)
class CLTReport:
    ks_distance: float
    supnorm: float
    mu_frame: float
    sigma_frame: float
    n: int
    trials: int


def local_clt_check(law: StepLaw, n: int, trials: int, seed: int) -> CLTReport:
    """Simulate the survival-conditioned chain and compare X_n to the Gaussian.

    The comparison uses the tilted law's exact per-frame moments; the sup-norm
    line compares lattice point masses against the density, the KS line compares
    distribution functions against Phi.
    """
    if n < 500:
        raise ValueError("n >= 500 required for the limit comparison")
    tl = tilted_law(law)
    w = tl.interior_prob
    mu = float(w @ tl.interior_dx)
    sig = math.sqrt(float(w @ (tl.interior_dx - mu) ** 2))
    cum = np.cumsum(w)
    _, ends = _simulate_sums(cum, tl.interior_dx, n, trials, seed, np.empty(0, dtype=np.int64))
    z = (ends - n * mu) / (sig * math.sqrt(n))
    z.sort()
    cdf = norm.cdf(z)
    i = np.arange(1, trials + 1)
    ks = float(max(np.max(i / trials - cdf), np.max(cdf - (i - 1) / trials)))
    # lattice point masses vs density
    h = law.x_lattice
    kk = np.round((ends - np.round(n * mu / h) * h) / h).astype(np.int64)
    lo, hi = kk.min(), kk.max()
    counts = np.bincount((kk - lo).astype(np.int64))
    scale = sig * math.sqrt(n) / h
    sup = 0.0
    for idx, cnt in enumerate(counts):
        k = lo + idx
        emp = scale * cnt / trials
        g = norm.pdf(k / scale)
        sup = max(sup, abs(emp - g))
    return CLTReport(ks, sup, mu, sig, n, trials)


@dataclass(frozen=True)
class BridgeReport:
    t_grid: np.ndarray
    pinned_var: np.ndarray
    pinned_expected: np.ndarray
    unpinned_var: np.ndarray
    unpinned_expected: np.ndarray
    max_rel_dev: float
    n_pinned: int


def bridge_statistics(law: StepLaw, n: int, trials: int, seed: int,
                      t_fracs=(0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9),
                      bin_halfwidth_sigmas: float = 0.15) -> BridgeReport:
    """Variance profile of paths pinned near the typical endpoint vs t(1-t) law.

    Paths with |X_n - n mu| <= bin_halfwidth_sigmas * sigma * sqrt(n) form the
    pinned ensemble; the unpinned ensemble checks the linear t-profile.
    """
    tl = tilted_law(law)
    w = tl.interior_prob
    mu = float(w @ tl.interior_dx)
    sig = math.sqrt(float(w @ (tl.interior_dx - mu) ** 2))
    t_grid = np.array([int(round(f * n)) for f in t_fracs], dtype=np.int64)
    cum = np.cumsum(w)
    grid_vals, ends = _simulate_sums(cum, tl.interior_dx, n, trials, seed, t_grid)
    sel = np.abs(ends - n * mu) <= bin_halfwidth_sigmas * sig * math.sqrt(n)
    n_pinned = int(sel.sum())
    if n_pinned < 100:
        raise ValueError(f"terminal bin too thin ({n_pinned} trajectories)")
    fr = np.asarray(t_fracs)
    pinned = grid_vals[sel]
    pinned_var = pinned.var(axis=0)
    pinned_exp = sig * sig * n * fr * (1.0 - fr)
    unp_var = grid_vals.var(axis=0)
    unp_exp = sig * sig * n * fr
    max_rel = float(np.max(np.abs(pinned_var - pinned_exp) / pinned_exp))
    return BridgeReport(t_grid, pinned_var, pinned_exp, unp_var, unp_exp, max_rel, n_pinned)


def rates_csv_rows(law_name: str, sol: RateSolution, run_id: str):
    return [
        {
            "run_id": run_id,
            "law": law_name,
            "R_p": sol.R_p,
            "zeta": sol.zeta,
            "amplitude": sol.amplitude,
            "mass_gap_margin": sol.mass_gap_margin,
        }
    ]
