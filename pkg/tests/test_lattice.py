import math

import numpy as np
import pytest

from ozlab.lattice import (ConeSpec, Direction, EdgeId, LatticePoint, SliceSpec,
                           cone_contains, cone_margin, dual_edge,
                           halfspace_band_vertices, round_to_lattice, segment_of)


def test_round_exact_point():
    assert round_to_lattice((5.0, 0.0)) == LatticePoint(5, 0)


def test_round_tie_left():
    assert round_to_lattice((0.5, 0.0)) == LatticePoint(0, 0)


def test_round_tie_top_left():
    # four equidistant corners: left first, then top
    assert round_to_lattice((0.5, 0.5)) == LatticePoint(0, 1)


def test_round_minimizes_distance_brute_force():
    rng = np.random.default_rng(1)
    for _ in range(300):
        v = rng.uniform(-5, 5, size=2)
        r = round_to_lattice(v)
        best = min((v[0] - x) ** 2 + (v[1] - y) ** 2
                   for x in range(-7, 8) for y in range(-7, 8))
        assert (v[0] - r.x) ** 2 + (v[1] - r.y) ** 2 <= best + 1e-12


def test_round_rejects_nonfinite():
    with pytest.raises(ValueError):
        round_to_lattice((math.inf, 0.0))


def test_band_axis_column():
    spec = SliceSpec(Direction(1, 0), 4, t=1)
    band = halfspace_band_vertices(spec, 8)
    assert band == {LatticePoint(4, y) for y in range(-8, 9)}


def test_band_axis_row_t0():
    spec = SliceSpec(Direction(0, 1), 3, t=0)
    band = halfspace_band_vertices(spec, 4)
    assert band == {LatticePoint(x, 0) for x in range(-4, 5)}


def test_band_diagonal_matches_enumeration():
    w = Direction(1 / math.sqrt(2), 1 / math.sqrt(2))
    spec = SliceSpec(w, 4, t=1)
    band = {p.as_tuple() for p in halfspace_band_vertices(spec, 12)}
    expect = {(x, y) for x in range(-12, 13) for y in range(-12, 13)
              if 4 <= (x + y) / math.sqrt(2) < 5}
    assert band == expect


def test_band_misses_box():
    with pytest.raises(ValueError):
        halfspace_band_vertices(SliceSpec(Direction(1, 0), 10, t=3), 4)


def test_segment_of_examples():
    spec = SliceSpec(Direction(1, 0), 4, t=1)
    assert segment_of((4, 0), spec) == 0
    assert segment_of((4, -1), spec) == -1
    assert segment_of((4, 7), spec) == 1
    assert segment_of((4, 8), spec) == 2  # half-open interval


def test_segment_requires_band_membership():
    spec = SliceSpec(Direction(1, 0), 4, t=1)
    with pytest.raises(ValueError):
        segment_of((5, 0), spec)


def test_segments_partition_band():
    w = Direction.from_angle(0.35)
    spec = SliceSpec(w, 3, t=2)
    band = halfspace_band_vertices(spec, 20)
    by_k = {}
    for pt in band:
        by_k.setdefault(segment_of(pt, spec), set()).add(pt)
    total = sum(len(v) for v in by_k.values())
    assert total == len(band)
    # each vertex got exactly one k: perp coordinate within [kL, (k+1)L)
    for k, pts in by_k.items():
        for pt in pts:
            h = w.perp(pt.x, pt.y)
            assert k * 3 <= h < (k + 1) * 3


def test_cone_membership_examples():
    c = ConeSpec(4.0)
    assert cone_contains(c, (1, 4))        # boundary
    assert not cone_contains(c, (1, 4.01))
    assert not cone_contains(c, (-1, 0))   # behind apex


def test_cone_monotone_in_alpha():
    rng = np.random.default_rng(3)
    for _ in range(200):
        z = rng.uniform(-3, 3, size=2)
        a = rng.uniform(0.5, 5.0)
        if cone_contains(ConeSpec(a), z):
            assert cone_contains(ConeSpec(a * 1.5), z)


def test_cone_margin_matches_membership():
    w = Direction.from_angle(0.3)
    for z in [(2.0, 1.0), (-1.0, 3.0), (4.0, -2.0)]:
        m = cone_margin(4.0, w, z)
        for k in range(0, 5):
            apex = (-k * 2 * w.wx, -k * 2 * w.wy)
            inside = cone_contains(ConeSpec(4.0, apex, w), z)
            assert inside == (m <= k * 2 + 1e-12)


def test_dual_edge_examples():
    h = EdgeId(LatticePoint(0, 0), "h")
    d = dual_edge(h)
    assert d.dual and d.orientation == "v"
    assert dual_edge(d) == h
    v = EdgeId(LatticePoint(2, 3), "v")
    dv = dual_edge(v)
    assert dv.orientation == "h" and dv.dual
    assert dual_edge(dv) == v


def test_dual_edge_bijection_on_box():
    edges = []
    for x in range(-2, 2):
        for y in range(-2, 2):
            edges.append(EdgeId(LatticePoint(x, y), "h"))
            edges.append(EdgeId(LatticePoint(x, y), "v"))
    duals = [dual_edge(e) for e in edges]
    assert len(set(duals)) == len(edges)
    assert all(dual_edge(d) == e for d, e in zip(duals, edges))


def test_direction_perp_is_positive_rotation():
    w = Direction.from_angle(0.7)
    px, py = w.w_perp
    # rotating w by +pi/2 gives (-sin, cos)
    assert abs(px - -math.sin(0.7)) < 1e-12
    assert abs(py - math.cos(0.7)) < 1e-12
    assert abs(px * w.wx + py * w.wy) < 1e-12
