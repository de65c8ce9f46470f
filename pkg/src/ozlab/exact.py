"""Exact random-cluster measures on tiny graphs by full state enumeration.

Ground truth for the samplers and for the correlation-inequality property tests.
Weights are (p/(1-p))^{#open} * q^{#clusters}, with clusters counted after
identifying the wired blocks of the boundary partition. Everything is kept in
log space; the enumeration cap is 24 edges (2^24 states).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.special import logsumexp

MAX_ENUM_EDGES = 24


def critical_point(q: float) -> float:
    """Self-dual point sqrt(q)/(1+sqrt(q))."""
    s = math.sqrt(q)
    return s / (1.0 + s)


@dataclass(frozen=True)
class ModelParams:
    p: float
    q: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.p < 1.0):
            raise ValueError(f"p must be in (0,1), got {self.p}")
        if self.q < 1.0:
            raise ValueError(f"q must be >= 1, got {self.q}")

    @property
    def p_c(self) -> float:
        return critical_point(self.q)

    @property
    def log_edge_weight(self) -> float:
        return math.log(self.p / (1.0 - self.p))


def dual_parameter(params: ModelParams) -> float:
    """The p* solving p p* = q (1-p)(1-p*); fixed point at the self-dual point."""
    p, q = params.p, params.q
    return q * (1.0 - p) / (p + q * (1.0 - p))


@dataclass(frozen=True)
class FiniteGraph:
    """Subgraph of Z^2: vertex coordinates, edges as vertex-index pairs.

    `boundary` follows the lattice convention: vertices incident to at least one
    Z^2-edge absent from the graph.
    """

    vertices: tuple
    edges: tuple
    name: str = ""

    def __post_init__(self):
        idx = {v: i for i, v in enumerate(self.vertices)}
        if len(idx) != len(self.vertices):
            raise ValueError("duplicate vertices")
        for (a, b) in self.edges:
            (ax, ay), (bx, by) = self.vertices[a], self.vertices[b]
            if abs(ax - bx) + abs(ay - by) != 1:
                raise ValueError(f"edge {(a, b)} endpoints not at distance 1")

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def boundary(self) -> frozenset:
        present = set()
        for (a, b) in self.edges:
            present.add(frozenset((self.vertices[a], self.vertices[b])))
        out = set()
        for i, (x, y) in enumerate(self.vertices):
            for nb in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                if frozenset(((x, y), nb)) not in present:
                    out.add(i)
                    break
        return frozenset(out)

    def edge_array(self) -> np.ndarray:
        return np.array(self.edges, dtype=np.int32).reshape(-1, 2)

    def edge_index(self, va, vb) -> int:
        """Index of the edge with the given endpoint coordinates."""
        ia = self.vertices.index(va)
        ib = self.vertices.index(vb)
        for k, (a, b) in enumerate(self.edges):
            if {a, b} == {ia, ib}:
                return k
        raise KeyError((va, vb))


def single_edge() -> FiniteGraph:
    return FiniteGraph(((0, 0), (1, 0)), ((0, 1),), name="single-edge")


def path_graph(k: int) -> FiniteGraph:
    verts = tuple((i, 0) for i in range(k + 1))
    edges = tuple((i, i + 1) for i in range(k))
    return FiniteGraph(verts, edges, name=f"path-{k}")


def grid_graph(nx: int, ny: int, name: str = "") -> FiniteGraph:
    """Full nx x ny vertex grid with all internal edges."""
    verts = tuple((x, y) for y in range(ny) for x in range(nx))
    idx = {v: i for i, v in enumerate(verts)}
    edges = []
    for (x, y) in verts:
        if (x + 1, y) in idx:
            edges.append((idx[(x, y)], idx[(x + 1, y)]))
        if (x, y + 1) in idx:
            edges.append((idx[(x, y)], idx[(x, y + 1)]))
    return FiniteGraph(verts, tuple(edges), name=name or f"grid-{nx}x{ny}")


def square_2x2() -> FiniteGraph:
    return grid_graph(2, 2, name="square-2x2")


def centered_box_graph(R: int, name: str = "") -> FiniteGraph:
    """Lambda_R: all vertices of [-R, R]^2 with all internal edges."""
    verts = tuple((x, y) for y in range(-R, R + 1) for x in range(-R, R + 1))
    idx = {v: i for i, v in enumerate(verts)}
    edges = []
    for (x, y) in verts:
        if (x + 1, y) in idx:
            edges.append((idx[(x, y)], idx[(x + 1, y)]))
        if (x, y + 1) in idx:
            edges.append((idx[(x, y)], idx[(x, y + 1)]))
    return FiniteGraph(verts, tuple(edges), name=name or f"box-{R}")


def box_interior_3x3() -> FiniteGraph:
    return grid_graph(3, 3, name="box-3x3-interior")


def isolated_vertices(n: int) -> FiniteGraph:
    return FiniteGraph(tuple((i, 0) for i in range(0, 2 * n, 2)), (), name=f"isolated-{n}")


@dataclass(frozen=True)
class BoundaryCondition:
    """Partition of the boundary vertex set; blocks are wired together."""

    blocks: tuple

    def __post_init__(self):
        seen = set()
        for b in self.blocks:
            if seen & set(b):
                raise ValueError("boundary blocks must be disjoint")
            seen |= set(b)

    @classmethod
    def free(cls, graph: FiniteGraph) -> "BoundaryCondition":
        return cls(tuple(frozenset((i,)) for i in sorted(graph.boundary)))

    @classmethod
    def wired(cls, graph: FiniteGraph) -> "BoundaryCondition":
        b = graph.boundary
        return cls((frozenset(b),) if b else ())

    def validate_for(self, graph: FiniteGraph):
        union = set()
        for b in self.blocks:
            union |= set(b)
        if union != set(graph.boundary):
            raise ValueError("blocks must cover exactly the boundary")

    def is_coarsening_of(self, other: "BoundaryCondition") -> bool:
        """True if every block of `other` is contained in one block of self."""
        for ob in other.blocks:
            if not any(set(ob) <= set(sb) for sb in self.blocks):
                return False
        return True


@njit(cache=True)
def _find(parent, v):
    while parent[v] != v:
        parent[v] = parent[parent[v]]
        v = parent[v]
    return v


@njit(cache=True)
def _cluster_counts(n_vertices, eu, ev, base_parent):
    m = eu.shape[0]
    out = np.empty(1 << m, dtype=np.int32)
    parent = np.empty(n_vertices, dtype=np.int32)
    for s in range(1 << m):
        for v in range(n_vertices):
            parent[v] = base_parent[v]
        for e in range(m):
            if (s >> e) & 1:
                ra = _find(parent, eu[e])
                rb = _find(parent, ev[e])
                if ra != rb:
                    parent[rb] = ra
        c = 0
        for v in range(n_vertices):
            if _find(parent, v) == v:
                c += 1
        out[s] = c
    return out


def _base_parent(graph: FiniteGraph, bc: BoundaryCondition) -> np.ndarray:
    parent = np.arange(graph.n_vertices, dtype=np.int32)
    for block in bc.blocks:
        members = sorted(block)
        for v in members[1:]:
            parent[v] = members[0]
    return parent


class ExactMeasure:
    """Full enumeration of the random-cluster measure on a small graph."""

    def __init__(self, graph: FiniteGraph, params: ModelParams, bc: BoundaryCondition):
        if graph.n_edges > MAX_ENUM_EDGES:
            raise ValueError(f"enumeration capped at {MAX_ENUM_EDGES} edges")
        bc.validate_for(graph)
        self.graph = graph
        self.params = params
        self.bc = bc
        ea = graph.edge_array()
        counts = _cluster_counts(
            graph.n_vertices,
            np.ascontiguousarray(ea[:, 0]),
            np.ascontiguousarray(ea[:, 1]),
            _base_parent(graph, bc),
        )
        states = np.arange(1 << graph.n_edges, dtype=np.uint64)
        opens = np.bitwise_count(states).astype(np.float64)
        self.cluster_counts = counts
        self.log_weights = opens * params.log_edge_weight + counts * math.log(params.q)
        self.log_z = float(logsumexp(self.log_weights))
        self.probs = np.exp(self.log_weights - self.log_z)

    @property
    def n_states(self) -> int:
        return self.log_weights.shape[0]

    def probability(self, mask: np.ndarray) -> float:
        if mask.dtype != bool or mask.shape != self.log_weights.shape:
            raise ValueError("mask must be a boolean array over all states")
        if not mask.any():
            return 0.0
        return float(np.exp(logsumexp(self.log_weights[mask]) - self.log_z))

    def event_mask(self, predicate) -> np.ndarray:
        m = self.graph.n_edges
        states = np.arange(1 << m)
        bits = ((states[:, None] >> np.arange(m)[None, :]) & 1).astype(bool)
        return np.fromiter((predicate(bits[s]) for s in range(1 << m)), dtype=bool, count=1 << m)

    def edge_open_mask(self, *edge_indices) -> np.ndarray:
        states = np.arange(self.n_states)
        mask = np.ones(self.n_states, dtype=bool)
        for e in edge_indices:
            mask &= ((states >> e) & 1).astype(bool)
        return mask

    def is_increasing(self, mask: np.ndarray) -> bool:
        states = np.arange(self.n_states)
        for e in range(self.graph.n_edges):
            lo = states[((states >> e) & 1) == 0]
            if np.any(mask[lo] & ~mask[lo | (1 << e)]):
                return False
        return True


def partition_function(graph: FiniteGraph, params: ModelParams, bc: BoundaryCondition) -> float:
    """log Z of the model on `graph` with boundary condition `bc`."""
    if graph.n_edges == 0:
        return graph.n_vertices * math.log(params.q)
    return ExactMeasure(graph, params, bc).log_z


def event_probability(graph, params, bc, event) -> float:
    """Exact probability of `event` (predicate over the edge-bit vector, or a state mask)."""
    mu = ExactMeasure(graph, params, bc)
    mask = event if isinstance(event, np.ndarray) else mu.event_mask(event)
    return mu.probability(mask)


def fkg_check(graph, params, bc, mask_a, mask_b):
    """Return (phi[A and B], phi[A] phi[B]) for increasing events A, B."""
    mu = ExactMeasure(graph, params, bc)
    if not mu.is_increasing(mask_a) or not mu.is_increasing(mask_b):
        raise ValueError("events must be increasing")
    lhs = mu.probability(mask_a & mask_b)
    rhs = mu.probability(mask_a) * mu.probability(mask_b)
    return lhs, rhs


def _induced_boundary_condition(graph, bc, sub_edges, conditioning):
    """Boundary partition induced on the subgraph by outside edges + wiring."""
    parent = _base_parent(graph, bc)

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e, state in conditioning.items():
        if state:
            a, b = graph.edges[e]
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[rb] = ra
    sub_vertex = set()
    for e in sub_edges:
        a, b = graph.edges[e]
        sub_vertex.add(a)
        sub_vertex.add(b)
    order = sorted(sub_vertex)
    remap = {old: new for new, old in enumerate(order)}
    sub_graph = FiniteGraph(
        tuple(graph.vertices[i] for i in order),
        tuple((remap[graph.edges[e][0]], remap[graph.edges[e][1]]) for e in sub_edges),
        name=graph.name + "/sub",
    )
    groups = {}
    for new_i, old_i in enumerate(order):
        if new_i in sub_graph.boundary:
            groups.setdefault(find(old_i), []).append(new_i)
    blocks = tuple(frozenset(g) for g in groups.values())
    return sub_graph, BoundaryCondition(blocks)


def dmp_check(graph, params, bc, sub_edges, conditioning) -> float:
    """Sup-norm gap between the conditional law on `sub_edges` and the induced-bc law.

    `conditioning` maps every edge index outside `sub_edges` to its forced state.
    """
    sub_edges = tuple(sub_edges)
    outside = [e for e in range(graph.n_edges) if e not in sub_edges]
    if set(conditioning) != set(outside):
        raise ValueError("conditioning must cover exactly the complement edges")
    mu = ExactMeasure(graph, params, bc)
    states = np.arange(mu.n_states)
    cond_mask = np.ones(mu.n_states, dtype=bool)
    for e, state in conditioning.items():
        bit = ((states >> e) & 1).astype(bool)
        cond_mask &= bit if state else ~bit
    p_cond = float(mu.probs[cond_mask].sum())
    if p_cond <= 0.0:
        raise ValueError("conditioning event has probability zero")

    sub_graph, induced_bc = _induced_boundary_condition(graph, bc, sub_edges, conditioning)
    nu = ExactMeasure(sub_graph, params, induced_bc)

    msub = len(sub_edges)
    sub_idx = np.zeros(mu.n_states, dtype=np.int64)
    for j, e in enumerate(sub_edges):
        sub_idx |= ((states >> e) & 1) << j
    lhs = np.bincount(sub_idx[cond_mask], weights=mu.probs[cond_mask],
                      minlength=1 << msub) / p_cond
    return float(np.abs(lhs - nu.probs).max())


def oracle_record(graph, params, bc, event_name, probability) -> dict:
    """JSONL-ready dict pinning one exact probability."""
    return {
        "graph": graph.name or f"{graph.n_vertices}v{graph.n_edges}e",
        "params": {"p": params.p, "q": params.q},
        "bc": "wired" if len(bc.blocks) == 1 and len(bc.blocks[0]) > 1 else "free",
        "event": event_name,
        "probability": probability,
    }
