import itertools
import math

import numpy as np
import pytest

from ozlab.exact import (BoundaryCondition, ExactMeasure, FiniteGraph, ModelParams,
                         box_interior_3x3, critical_point, dmp_check, dual_parameter,
                         event_probability, fkg_check, grid_graph, isolated_vertices,
                         partition_function, path_graph, single_edge, square_2x2)


def test_partition_single_edge_free():
    # open: (p/(1-p)) q = 2, closed: q^2 = 4
    lz = partition_function(single_edge(), ModelParams(0.5, 2.0),
                            BoundaryCondition.free(single_edge()))
    assert abs(lz - math.log(6.0)) < 1e-12


def test_partition_single_edge_wired():
    g = single_edge()
    lz = partition_function(g, ModelParams(0.5, 2.0), BoundaryCondition.wired(g))
    assert abs(lz - math.log(4.0)) < 1e-12


def test_partition_isolated_vertices():
    g = isolated_vertices(4)
    bc = BoundaryCondition.free(g)
    lz = partition_function(g, ModelParams(0.3, 2.5), bc)
    assert abs(lz - 4 * math.log(2.5)) < 1e-12


def test_edge_cap():
    g = grid_graph(4, 7)  # 45 edges
    with pytest.raises(ValueError):
        partition_function(g, ModelParams(0.5, 2.0), BoundaryCondition.free(g))


def test_single_edge_probability():
    g = single_edge()
    mu = ExactMeasure(g, ModelParams(0.5, 2.0), BoundaryCondition.free(g))
    assert abs(mu.probability(mu.edge_open_mask(0)) - 1.0 / 3.0) < 1e-12


def test_full_space_probability_one():
    g = square_2x2()
    mu = ExactMeasure(g, ModelParams(0.4, 1.7), BoundaryCondition.wired(g))
    assert abs(mu.probability(np.ones(mu.n_states, dtype=bool)) - 1.0) < 1e-12
    assert abs(mu.probs.sum() - 1.0) < 1e-12


def test_q1_is_bernoulli():
    g = path_graph(3)
    for bc in (BoundaryCondition.free(g), BoundaryCondition.wired(g)):
        mu = ExactMeasure(g, ModelParams(0.37, 1.0), bc)
        for e in range(3):
            assert abs(mu.probability(mu.edge_open_mask(e)) - 0.37) < 1e-12


def test_fkg_trivial_same_event():
    g = square_2x2()
    mu = ExactMeasure(g, ModelParams(0.5, 2.0), BoundaryCondition.free(g))
    a = mu.edge_open_mask(0)
    lhs, rhs = fkg_check(g, ModelParams(0.5, 2.0), BoundaryCondition.free(g), a, a)
    assert lhs >= rhs - 1e-12


def test_fkg_two_edges():
    g = square_2x2()
    params = ModelParams(0.5, 2.0)
    mu = ExactMeasure(g, params, BoundaryCondition.free(g))
    lhs, rhs = fkg_check(g, params, BoundaryCondition.free(g),
                         mu.edge_open_mask(0), mu.edge_open_mask(2))
    assert lhs >= rhs - 1e-12
    assert lhs > rhs  # positive correlation at q = 2


def test_fkg_q1_disjoint_edges_independent():
    g = path_graph(2)
    params = ModelParams(0.3, 1.0)
    mu = ExactMeasure(g, params, BoundaryCondition.free(g))
    lhs, rhs = fkg_check(g, params, BoundaryCondition.free(g),
                         mu.edge_open_mask(0), mu.edge_open_mask(1))
    assert abs(lhs - rhs) < 1e-14


def test_fkg_rejects_non_increasing():
    g = single_edge()
    params = ModelParams(0.5, 2.0)
    mu = ExactMeasure(g, params, BoundaryCondition.free(g))
    with pytest.raises(ValueError):
        fkg_check(g, params, BoundaryCondition.free(g),
                  ~mu.edge_open_mask(0), mu.edge_open_mask(0))


def _partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def test_mon_all_partitions_square():
    g = square_2x2()
    params = ModelParams(0.45, 2.0)
    bcs = [BoundaryCondition(tuple(frozenset(b) for b in part))
           for part in _partitions(sorted(g.boundary))]
    probs = {}
    for bc in bcs:
        mu = ExactMeasure(g, params, bc)
        probs[bc.blocks] = mu.probability(mu.edge_open_mask(0, 2))
    for b1 in bcs:
        for b2 in bcs:
            if b2.is_coarsening_of(b1):
                assert probs[b2.blocks] >= probs[b1.blocks] - 1e-12


def test_dmp_path_condition_middle_closed():
    g = path_graph(3)
    d = dmp_check(g, ModelParams(0.6, 1.5), BoundaryCondition.free(g), (0, 2), {1: 0})
    assert d < 1e-12


def test_dmp_square_condition_edge_open():
    g = square_2x2()
    d = dmp_check(g, ModelParams(0.6, 2.0), BoundaryCondition.wired(g),
                  (0, 1, 2), {3: 1})
    assert d < 1e-12


def test_dmp_all_single_edge_conditionings_3x3():
    g = box_interior_3x3()
    params = ModelParams(0.5, 2.0)
    bc = BoundaryCondition.free(g)
    sub = tuple(e for e in range(g.n_edges) if e != 5)
    for state in (0, 1):
        assert dmp_check(g, params, bc, sub, {5: state}) < 1e-12


def test_dmp_zero_probability_conditioning():
    g = path_graph(2)
    with pytest.raises(ValueError):
        # conditioning must cover exactly the complement
        dmp_check(g, ModelParams(0.5, 2.0), BoundaryCondition.free(g), (0,), {})


def test_dual_parameter_examples():
    assert abs(dual_parameter(ModelParams(0.4, 1.0)) - 0.6) < 1e-14
    sd = critical_point(2.0)
    assert abs(dual_parameter(ModelParams(sd, 2.0)) - sd) < 1e-14
    assert abs(dual_parameter(ModelParams(0.5, 4.0)) - 0.8) < 1e-14


def test_dual_parameter_involution():
    for q in (1.0, 1.5, 2.0, 3.0, 4.0):
        for p in (0.1, 0.3, 0.5, 0.7, 0.9):
            ps = dual_parameter(ModelParams(p, q))
            assert abs(dual_parameter(ModelParams(ps, q)) - p) < 1e-14


def test_duality_q1_dual_marginal():
    # q=1: dual edge open iff primal closed, so dual marginal is 1-p exactly
    g = square_2x2()
    mu = ExactMeasure(g, ModelParams(0.3, 1.0), BoundaryCondition.free(g))
    for e in range(4):
        assert abs((1.0 - mu.probability(mu.edge_open_mask(e))) - 0.7) < 1e-12


def test_boundary_detection():
    g = box_interior_3x3()
    # center vertex (1,1) has all four edges inside the graph
    center = g.vertices.index((1, 1))
    assert center not in g.boundary
    assert len(g.boundary) == 8


def test_self_dual_point():
    assert abs(critical_point(1.0) - 0.5) < 1e-15
    q = 2.0
    assert abs(critical_point(q) - math.sqrt(q) / (1 + math.sqrt(q))) < 1e-15
