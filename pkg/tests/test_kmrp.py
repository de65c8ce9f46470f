import json
import math

import numpy as np
import pytest

from ozlab.kmrp import (NoMassGapError, PeriodicLawError, StepLaw, asymptotic_check,
                        bridge_statistics, convolve_renewal, geometric_law,
                        local_clt_check, simulate, solve_rate, tilted_law, untilt_law)


def quadratic_law(kappa=0.5):
    return StepLaw.from_tables(kappa, [(1, 0.0, 0.5), (2, 0.0, 0.5)])


def test_geometric_renewal_sequences():
    seq = convolve_renewal(geometric_law(0.5), 60)
    assert np.array_equal(seq.p, 0.5 ** np.arange(61))
    assert abs(seq.a.sum() - 0.5) < 1e-12
    assert seq.p[0] == 1.0


def test_spec_hand_recursion():
    # atoms 0.3/0.3 at tau = 1, 2 (kappa 0.4): p_2 = 0.3 p_1 + 0.3 p_0 = 0.39
    law = StepLaw.from_tables(0.4, [(1, 0.0, 0.5), (2, 0.0, 0.5)])
    seq = convolve_renewal(law, 5)
    assert abs(seq.p[1] - 0.3) < 1e-15
    assert abs(seq.p[2] - 0.39) < 1e-15


def test_renewal_counting_upper_bound():
    law = StepLaw.from_tables(0.3, [(1, 0.0, 0.2), (3, 0.0, 0.8)])
    seq = convolve_renewal(law, 200)
    kappa_min, tau_max = 0.3, 3
    for n in range(201):
        assert seq.p[n] <= (1 - kappa_min) ** (n // tau_max) + 1e-12


def test_renewal_identity_exact():
    law = StepLaw.from_tables(0.45, [(1, 0.0, 0.3), (2, 0.0, 0.5), (5, 0.0, 0.2)])
    seq = convolve_renewal(law, 400)
    for n in range(1, 401):
        recon = sum(seq.a[k] * seq.p[n - k] for k in range(1, min(n, 5) + 1))
        assert abs(seq.p[n] - recon) < 1e-12
    assert seq.p[0] == 1.0


def test_solve_rate_geometric():
    sol = solve_rate(geometric_law(0.5))
    assert abs(sol.R_p - 2.0) < 1e-13
    assert abs(sol.zeta - 1.0 / math.log(2.0)) < 1e-13
    assert abs(sol.amplitude - 1.0) < 1e-13
    # p_n R_p^n = 1 exactly for the geometric law
    assert asymptotic_check(geometric_law(0.5), 37) < 1e-12


def test_solve_rate_quadratic():
    sol = solve_rate(quadratic_law())
    assert abs(sol.R_p - (-1 + math.sqrt(17)) / 2) < 1e-12
    assert asymptotic_check(quadratic_law(), 300) < 1e-10


def test_periodic_law_rejected():
    with pytest.raises(PeriodicLawError):
        solve_rate(StepLaw.from_tables(0.4, [(2, 0.0, 1.0)]))


def test_no_mass_gap_signal():
    # certified tail radius below the root of A(z) = 1
    law = StepLaw.from_tables(0.5, [(1, 0.0, 1.0)], tail_rate=math.log(1.5))
    with pytest.raises(NoMassGapError):
        solve_rate(law)


def test_random_laws_asymptotics():
    rng = np.random.default_rng(7)
    for _ in range(5):
        support = sorted(rng.choice(np.arange(1, 7), size=3, replace=False))
        if math.gcd(*[int(s) for s in support[:2]]) != 1 and len(support) < 3:
            support.append(1)
        masses = rng.uniform(0.2, 1.0, size=len(support))
        kappa = rng.uniform(0.2, 0.6)
        table = [(int(t), 0.0, float(m)) for t, m in zip(support, masses)]
        law = StepLaw.from_tables(kappa, table)
        if law.gcd_tau_support() != 1:
            table.append((1, 0.0, 0.1))
            law = StepLaw.from_tables(kappa, table)
        assert asymptotic_check(law, 300) <= 0.02


def test_generating_function_consistency():
    law = quadratic_law()
    sol = solve_rate(law)
    n_max = 600
    seq = convolve_renewal(law, n_max)
    taus = law.interior_tau.astype(float)
    for z in np.linspace(1.01, sol.R_p - 0.05, 5):
        A = float(np.sum(law.interior_prob * z ** taus))
        partial = float(np.sum(seq.p * z ** np.arange(n_max + 1)))
        # tail bound: p_n <= C R^-n with C read off the computed sequence
        C = max(seq.p * sol.R_p ** np.arange(n_max + 1))
        tail = C * (z / sol.R_p) ** (n_max + 1) / (1 - z / sol.R_p)
        assert abs(partial - 1.0 / (1.0 - A)) <= tail + 1e-9


def test_mass_gap_ordering():
    # survival-without-renewal decays strictly faster than renewal hits
    law = quadratic_law()
    seq = convolve_renewal(law, 60)
    sol = solve_rate(law)
    # c_n vanishes beyond the support cap, p_n has rate 1/zeta
    assert seq.c[3:].max() == 0.0
    rate_p = -np.log(seq.p[40] / seq.p[30]) / 10
    assert abs(rate_p - 1.0 / sol.zeta) < 1e-6
    assert sol.mass_gap_margin > 0


def test_tilt_closed_form():
    law = quadratic_law()
    sol = solve_rate(law)
    tl = tilted_law(law)
    ratio = tl.interior_prob[1] / tl.interior_prob[0]
    assert abs(ratio - sol.R_p) < 1e-12
    assert abs(tl.interior_prob.sum() - 1.0) < 1e-12
    assert tl.kappa == 0.0


def test_tilt_geometric_point_mass():
    tl = tilted_law(geometric_law(0.3))
    assert tl.interior_prob.shape == (1,)
    assert abs(tl.interior_prob[0] - 1.0) < 1e-15


def test_tilt_round_trip():
    law = StepLaw.from_tables(0.4, [(1, -1.0, 0.2), (2, 1.0, 0.5), (3, 0.0, 0.3)])
    sol = solve_rate(law)
    back = untilt_law(tilted_law(law), sol.R_p)
    cond = law.interior_prob / law.interior_prob.sum()
    assert np.abs(back - cond).max() < 1e-12


def test_simulate_deterministic_survival():
    law = StepLaw.from_tables(0.5, [(1, 0.0, 1.0)], initial=[(1, 0.0, 0.8)])
    n, hits = 6, 0
    trials = 20000
    for s in range(trials):
        path = simulate(law, n, s)
        if not math.isnan(path.X[n]):
            hits += 1
    expect = 0.8 * 0.5 ** (n - 1)
    err = 3 * math.sqrt(expect / trials)
    assert abs(hits / trials - expect) < err


def test_simulate_death_absorbing_and_renewals():
    law = StepLaw.from_tables(0.3, [(1, 1.0, 0.5), (2, -1.0, 0.5)])
    for s in range(50):
        path = simulate(law, 30, s)
        dead = False
        for t in range(31):
            if math.isnan(path.X[t]):
                dead = True
            elif dead:
                pytest.fail("resurrected after death")
        assert path.Y[0] == 1
        for t in path.renewal_times:
            assert path.Y[t] == 1


def test_simulate_kill_frequency():
    law = geometric_law(0.35)
    kills = 0
    steps = 0
    for s in range(3000):
        path = simulate(law, 50, s)
        assert path.death_time is not None  # survival to 50 has prob 0.65^50
        # each renewal after T_0 drew one interior step; the last draw killed
        steps += len(path.renewal_times) - 1
        kills += 1
    phat = kills / steps
    assert abs(phat - 0.35) < 3 * math.sqrt(0.35 * 0.65 / steps)


def test_simulation_matches_convolution_oracle():
    law = quadratic_law(0.4)
    n_paths = 200000
    n_max = 18
    counts = np.zeros(n_max + 1)
    # start at a renewal: interior steps only
    cum = np.cumsum(law.interior_prob)
    rng = np.random.default_rng(5)
    us = rng.random((n_paths, n_max + 2))
    for i in range(n_paths):
        t = 0
        counts[0] += 1
        for j in range(n_max + 1):
            u = us[i, j]
            if u >= cum[-1]:
                break
            t += int(law.interior_tau[np.searchsorted(cum, u, side="right")])
            if t > n_max:
                break
            counts[t] += 1
    seq = convolve_renewal(law, n_max)
    for n in range(n_max + 1):
        se = math.sqrt(seq.p[n] * (1 - seq.p[n]) / n_paths)
        assert abs(counts[n] / n_paths - seq.p[n]) < 4 * se + 1e-9


def test_local_clt_classical():
    law = StepLaw.from_tables(0.3, [(1, -1.0, 0.5), (1, 1.0, 0.5)])
    rep = local_clt_check(law, 2000, 50000, 42)
    assert rep.ks_distance <= 0.02
    rep_small = local_clt_check(law, 500, 50000, 42)
    assert rep.ks_distance <= rep_small.ks_distance + 0.01


def test_local_clt_centering_removes_drift():
    law = StepLaw.from_tables(0.3, [(1, 0.0, 0.3), (2, 1.0, 0.4), (3, 2.0, 0.3)])
    rep = local_clt_check(law, 2000, 50000, 44)
    assert rep.ks_distance <= 0.02
    assert rep.supnorm <= 0.05
    assert rep.mu_frame > 0


def test_local_clt_requires_large_n():
    with pytest.raises(ValueError):
        local_clt_check(geometric_law(0.2), 100, 1000, 0)


def test_bridge_profile():
    law = StepLaw.from_tables(0.3, [(1, -1.0, 0.5), (1, 1.0, 0.5)])
    br = bridge_statistics(law, 2000, 60000, 43)
    i_half = list(br.t_grid).index(1000)
    assert abs(br.pinned_var[i_half] / br.pinned_expected[i_half] - 1.0) <= 0.10
    # pinned ends: variance shrinks toward t=0 and t=1
    assert br.pinned_var[0] < br.pinned_var[i_half]
    assert br.pinned_var[-1] < br.pinned_var[i_half]
    # unpinned ensemble is linear in t
    ratio = br.unpinned_var / br.unpinned_expected
    assert np.all(np.abs(ratio - 1.0) < 0.1)


def test_bridge_thin_bin_error():
    law = StepLaw.from_tables(0.3, [(1, -1.0, 0.5), (1, 1.0, 0.5)])
    with pytest.raises(ValueError):
        bridge_statistics(law, 1000, 90, 1)  # fewer than 100 in any bin


def test_json_round_trip(tmp_path):
    law = StepLaw.from_tables(0.4, [(1, -1.0, 0.25), (2, 0.5, 0.75)],
                              tail_rate=0.2, x_lattice=0.5)
    text = law.to_json()
    back = StepLaw.from_json(text)
    assert back.kappa == law.kappa
    assert np.array_equal(back.interior_tau, law.interior_tau)
    assert np.allclose(back.interior_prob, law.interior_prob)
    assert back.tail_rate == 0.2
    d = json.loads(text)
    assert set(d) == {"kappa", "initial", "interior", "tail_rate", "x_lattice"}


def test_tail_certificate_validation():
    with pytest.raises(ValueError):
        StepLaw.from_tables(0.2, [(1, 0.0, 0.1), (8, 0.0, 0.9)], tail_rate=2.0)


def test_x_lattice_binning():
    law = StepLaw.from_tables(0.3, [(1, 0.24, 0.5), (1, 0.26, 0.5)], x_lattice=0.5)
    # both atoms bin to dx ~ 0.25 -> single atom at 0.0 or 0.5? 0.24->0.0, 0.26->0.5
    assert set(law.interior_dx.tolist()) == {0.0, 0.5}


def test_invalid_laws():
    with pytest.raises(ValueError):
        StepLaw.from_tables(1.2, [(1, 0.0, 1.0)])
    with pytest.raises(ValueError):
        StepLaw.from_tables(0.5, [(0, 0.0, 1.0)])
