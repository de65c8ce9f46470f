import math

import numpy as np
import pytest

from ozlab.exact import ModelParams
from ozlab.lattice import E1, E2, Direction
from ozlab.observables import (TwoPointCurve, characteristic_length,
                               crossing_probability, estimate_xi, estimate_zeta,
                               halfspace_hit, halfspace_profile, hit_ratios, one_arm,
                               two_point_curve)

P35 = ModelParams(0.35, 1.0)


def test_crossing_trivial_limits():
    lo, _ = crossing_probability(4, ModelParams(1e-4, 1.0), n_samples=4000, seed=1)
    hi, _ = crossing_probability(4, ModelParams(1 - 1e-4, 1.0), n_samples=4000, seed=1)
    assert lo == 0.0
    assert hi == 1.0


def test_crossing_self_dual_near_half():
    est, err = crossing_probability(16, ModelParams(0.5, 1.0), n_samples=40000, seed=2)
    # square with both boundary columns included: self-duality pins ~1/2
    assert abs(est - 0.5) < 3 * err + 0.02


def test_characteristic_length_values():
    assert characteristic_length(ModelParams(0.01, 1.0), n_samples=20000, seed=3).value == 1.0
    L25 = characteristic_length(ModelParams(0.25, 1.0), n_samples=20000, seed=3)
    assert L25.value <= 8.0  # frozen regression: small scale well below criticality
    L35 = characteristic_length(P35, n_samples=20000, seed=3)
    assert 2.0 <= L35.value <= 8.0


def test_characteristic_length_censored_near_pc():
    est = characteristic_length(ModelParams(0.495, 1.0), n_max=16,
                                n_samples=4000, seed=4)
    assert est.censored
    assert est.value == 16.0


def test_one_arm_trivial_and_monotone():
    est0, _ = one_arm(0, P35)
    assert est0 == 1.0
    vals = []
    for R in (1, 2, 4, 8):
        est, err = one_arm(R, P35, n_samples=200000, seed=5)
        vals.append((est, err))
    for (a, ea), (b, eb) in zip(vals, vals[1:]):
        assert b <= a + 3 * math.hypot(ea, eb)


def test_two_point_basics():
    curve = two_point_curve(E1, range(0, 13), P35, n_samples=300000, seed=6)
    assert curve.estimate[0] == 1.0
    assert curve.n[0] == 0
    # log-curve decreasing trend
    usable = curve.usable() & (curve.n >= 1)
    logs = np.log(curve.estimate[usable])
    assert np.all(np.diff(logs) < 0.05)


def test_two_point_censoring_floor():
    curve = two_point_curve(E1, [1, 2, 30], P35, n_samples=2000, seed=7)
    assert curve.censored[-1]


def test_estimate_xi_exact_exponential():
    n = np.arange(1, 40)
    g = np.exp(-n / 7.0)
    curve = TwoPointCurve(E1, n, g, np.full(n.size, 1e-6), np.zeros(n.size, bool), 10**9)
    fit = estimate_xi(curve, correction="none")
    assert abs(fit.estimate.value - 7.0) < 1e-6


def test_estimate_xi_oz_correction_on_synthetic():
    n = np.arange(1, 60)
    g = 0.8 * n ** -0.5 * np.exp(-n / 7.0)
    curve = TwoPointCurve(E1, n, g, np.full(n.size, 1e-9), np.zeros(n.size, bool), 10**9)
    fit_oz = estimate_xi(curve, correction="oz")
    fit_plain = estimate_xi(curve, correction="none", window=fit_oz.window)
    assert abs(fit_oz.estimate.value - 7.0) < 1e-3
    # ignoring the sqrt prefactor steepens the slope: xi comes out low
    assert fit_plain.estimate.value < 7.0 - 0.2


def test_estimate_xi_norm_scaling():
    # direction 2v: G at index n equals G(2n v), so the fitted xi halves
    n = np.arange(1, 40)
    g1 = np.exp(-n / 8.0)
    g2 = np.exp(-2 * n / 8.0)
    c1 = TwoPointCurve(E1, n, g1, np.full(n.size, 1e-6), np.zeros(n.size, bool), 1)
    c2 = TwoPointCurve(E1, n, g2, np.full(n.size, 1e-6), np.zeros(n.size, bool), 1)
    x1 = estimate_xi(c1, correction="none").estimate.value
    x2 = estimate_xi(c2, correction="none").estimate.value
    assert abs(x2 - x1 / 2) < 1e-6


def test_estimate_xi_needs_points():
    n = np.arange(1, 5)
    curve = TwoPointCurve(E1, n, np.exp(-n / 3), np.full(n.size, 1e-6),
                          np.zeros(n.size, bool), 1)
    with pytest.raises(ValueError):
        estimate_xi(curve)


def test_halfspace_trivial_and_ratios():
    est, _ = halfspace_hit(E1, 0, P35, L=4, n_samples=1000, seed=8)
    assert est == 1.0
    m, est, err, hits = halfspace_profile(E1, P35, 4, m_max=5,
                                          n_samples=10**6, seed=9)
    # monotone decreasing, event inclusion is exact on shared samples
    assert np.all(np.diff(est) <= 0)
    ratios, m_hi = hit_ratios(E1, P35, 4, n_samples=10**6, seed=10, min_hits=500)
    rs = [r for (_, r, _) in ratios[1:]]
    assert max(rs) - min(rs) < 0.1 * np.mean(rs)


def test_halfspace_dominates_two_point():
    # reaching the half-plane at distance m*L is implied by reaching (m*L, 0)
    n_samp = 200000
    _, est, _, _ = halfspace_profile(E1, P35, 4, m_max=3, n_samples=n_samp, seed=11)
    curve = two_point_curve(E1, [4, 8, 12], P35, n_samples=n_samp, seed=11)
    for m in (1, 2, 3):
        g = curve.estimate[curve.n == 4 * m][0]
        assert est[m] >= g - 3 * curve.stderr[curve.n == 4 * m][0]


def test_estimate_zeta_axis_symmetry():
    z1 = estimate_zeta(E1, P35, L=4, n_samples=10**6, seed=12, min_hits=300)
    z2 = estimate_zeta(E2, P35, L=4, n_samples=10**6, seed=13, min_hits=300)
    assert abs(z1.value - z2.value) < 3 * math.hypot(z1.stderr, z2.stderr)
    assert 0.1 < z1.value < 10.0


def test_supermultiplicativity_proxy():
    curve = two_point_curve(E1, [3, 6, 9], P35, n_samples=10**6, seed=14)
    g = dict(zip(curve.n.tolist(), curve.estimate))
    e = dict(zip(curve.n.tolist(), curve.stderr))
    for n, m in ((3, 3), (3, 6)):
        lhs = g[n + m]
        rhs = g[n] * g[m]
        noise = 3 * (e[n] * g[m] + e[m] * g[n] + e[n + m])
        assert lhs >= rhs - noise
