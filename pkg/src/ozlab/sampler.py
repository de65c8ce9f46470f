"""Markov chain samplers for the random-cluster model on finite graphs.

Two exact-stationarity updates are provided and cross-validated against full
enumeration: the single-edge heat-bath (conditional probability p when the
endpoints are connected off the edge, p/(p + q(1-p)) otherwise) and the
active-cluster move (clusters activated independently with probability 1/q,
edges inside the active vertex set resampled as Bernoulli(p)). Wired blocks
are pre-merged into the connectivity structure, which realizes the ghost
vertex picture of wired boundary conditions.

Chains are deterministic functions of (seed, chain index); small graphs get a
precomputed off-edge connectivity table so full-histogram validation runs at
millions of sweeps per second.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from numba import njit, prange

from .exact import BoundaryCondition, FiniteGraph, ModelParams, _base_parent
from .rng import GOLDEN, mix64, next_state, philox, state_u01
from .stats import integrated_autocorrelation

MAX_TABLE_EDGES = 20


@dataclass
class BondConfig:
    """Open/closed state over a graph's edge list (uint8 in memory, bit-packed on disk)."""

    graph: FiniteGraph
    bits: np.ndarray

    def __post_init__(self):
        self.bits = np.ascontiguousarray(self.bits, dtype=np.uint8)
        if self.bits.shape != (self.graph.n_edges,):
            raise ValueError("bits length must equal the edge count")

    def open_count(self) -> int:
        return int(self.bits.sum())

    def copy(self) -> "BondConfig":
        return BondConfig(self.graph, self.bits.copy())

    def as_state(self) -> int:
        return int(np.packbits(self.bits, bitorder="little").view(np.uint8)
                   .astype(object) @ (256 ** np.arange(len(self.bits) // 8 + 1, dtype=object)
                                      [: (len(self.bits) + 7) // 8]))


def config_from_state(graph: FiniteGraph, state: int) -> BondConfig:
    bits = np.array([(state >> e) & 1 for e in range(graph.n_edges)], dtype=np.uint8)
    return BondConfig(graph, bits)


def save_config(path, config: BondConfig, header: dict):
    """JSON header line + raw little-endian bitset."""
    packed = np.packbits(config.bits, bitorder="little")
    with open(path, "wb") as fh:
        fh.write((json.dumps(header, sort_keys=True) + "\n").encode())
        fh.write(packed.tobytes())


def load_config(path, graph: FiniteGraph):
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode())
        raw = np.frombuffer(fh.read(), dtype=np.uint8)
    bits = np.unpackbits(raw, bitorder="little")[: graph.n_edges]
    return BondConfig(graph, bits), header


@dataclass(frozen=True)
class SamplerSpec:
    params: ModelParams
    algorithm: str = "auto"  # bernoulli | heat-bath | cluster-move | auto
    sweeps: int = 1000
    burn_in: int = 100
    thinning: int = 1
    seed: int = 0
    bc: str = "free"  # free | wired

    def __post_init__(self):
        if self.sweeps <= 0 or self.thinning <= 0:
            raise ValueError("sweeps and thinning must be positive")
        if self.algorithm not in ("auto", "bernoulli", "heat-bath", "cluster-move"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.algorithm == "bernoulli" and self.params.q != 1.0:
            raise ValueError("bernoulli sampling requires q = 1")

    def resolved_algorithm(self) -> str:
        if self.algorithm != "auto":
            return self.algorithm
        return "bernoulli" if self.params.q == 1.0 else "cluster-move"


@dataclass
class ChainDiagnostics:
    iat: dict
    flip_rate: float
    burn_in: int
    thinning: int
    burn_in_ok: bool


def _bc_object(graph, bc):
    if isinstance(bc, BoundaryCondition):
        return bc
    return BoundaryCondition.wired(graph) if bc == "wired" else BoundaryCondition.free(graph)


# ----------------------------------------------------------------------------- reference updates


def _find(parent, v):
    while parent[v] != v:
        parent[v] = parent[parent[v]]
        v = parent[v]
    return v


def _connected_off_edge(config: BondConfig, e: int, base_parent) -> bool:
    parent = base_parent.copy()
    eu, ev = config.graph.edges[e]
    for k, (a, b) in enumerate(config.graph.edges):
        if k != e and config.bits[k]:
            ra, rb = _find(parent, a), _find(parent, b)
            if ra != rb:
                parent[rb] = ra
    return _find(parent, eu) == _find(parent, ev)


def heat_bath_conditional(config: BondConfig, e: int, params: ModelParams, bc) -> float:
    """Exact conditional open probability of edge e given the rest."""
    base = _base_parent(config.graph, _bc_object(config.graph, bc))
    if _connected_off_edge(config, e, base):
        return params.p
    return params.p / (params.p + params.q * (1.0 - params.p))


def heat_bath_sweep(config: BondConfig, params: ModelParams, bc, rng) -> BondConfig:
    """One deterministic-order pass of exact single-edge resampling."""
    out = config.copy()
    for e in range(out.graph.n_edges):
        pe = heat_bath_conditional(out, e, params, bc)
        out.bits[e] = 1 if rng.random() < pe else 0
    return out


def cluster_move(config: BondConfig, params: ModelParams, bc, rng) -> BondConfig:
    """One active-cluster update (full resample of edges inside active clusters)."""
    graph = config.graph
    base = _base_parent(graph, _bc_object(graph, bc))
    parent = base.copy()
    for k, (a, b) in enumerate(graph.edges):
        if config.bits[k]:
            ra, rb = _find(parent, a), _find(parent, b)
            if ra != rb:
                parent[rb] = ra
    roots = {_find(parent, v) for v in range(graph.n_vertices)}
    active = {r: rng.random() < 1.0 / params.q for r in roots}
    out = config.copy()
    for k, (a, b) in enumerate(graph.edges):
        ra, rb = _find(parent, a), _find(parent, b)
        if active[ra] and active[rb]:
            out.bits[k] = 1 if rng.random() < params.p else 0
        elif active[ra] != active[rb]:
            out.bits[k] = 0
    return out


def sample_bernoulli(graph: FiniteGraph, p: float, seed: int) -> BondConfig:
    """Exact q = 1 sample: independent Bernoulli(p) edges."""
    rng = philox(seed)
    return BondConfig(graph, (rng.random(graph.n_edges) < p).astype(np.uint8))


# ----------------------------------------------------------------------------- chain kernels


@njit(cache=True)
def _uf_find(parent, v):
    while parent[v] != v:
        parent[v] = parent[parent[v]]
        v = parent[v]
    return v


@njit(cache=True)
def _conn_table(n_vertices, eu, ev, base_parent):
    """table[e, s] (s with bit e cleared): endpoints of e connected in s minus e."""
    m = eu.shape[0]
    table = np.zeros((m, 1 << m), dtype=np.bool_)
    parent = np.empty(n_vertices, dtype=np.int32)
    for e in range(m):
        bit = 1 << e
        for s in range(1 << m):
            if s & bit:
                continue
            for v in range(n_vertices):
                parent[v] = base_parent[v]
            for k in range(m):
                if (s >> k) & 1:
                    ra = _uf_find(parent, eu[k])
                    rb = _uf_find(parent, ev[k])
                    if ra != rb:
                        parent[rb] = ra
            table[e, s] = _uf_find(parent, eu[e]) == _uf_find(parent, ev[e])
    return table


@njit(cache=True, nogil=True)
def _heat_bath_hist(m, table, p_conn, p_disc, n_record, thin, burn, state0, seed):
    hist = np.zeros(1 << m, dtype=np.int64)
    s = state0
    rs = mix64(np.uint64(seed) + GOLDEN)
    flips = 0
    total = 0
    sweeps = burn + n_record * thin
    for sw in range(sweeps):
        for e in range(m):
            bit = 1 << e
            pe = p_conn if table[e, s & ~bit] else p_disc
            rs = next_state(rs)
            old = s & bit
            if state_u01(rs) < pe:
                s |= bit
            else:
                s &= ~bit
            if (s & bit) != old:
                flips += 1
            total += 1
        if sw >= burn and (sw - burn) % thin == thin - 1:
            hist[s] += 1
    return hist, flips, total


@njit(cache=True, nogil=True)
def _cluster_hist(n_vertices, eu, ev, base_parent, p, q, n_record, thin, burn, state0, seed):
    m = eu.shape[0]
    hist = np.zeros(1 << m, dtype=np.int64)
    parent = np.empty(n_vertices, dtype=np.int32)
    active = np.zeros(n_vertices, dtype=np.bool_)
    s = state0
    rs = mix64(np.uint64(seed) + GOLDEN)
    inv_q = 1.0 / q
    sweeps = burn + n_record * thin
    for sw in range(sweeps):
        for v in range(n_vertices):
            parent[v] = base_parent[v]
        for k in range(m):
            if (s >> k) & 1:
                ra = _uf_find(parent, eu[k])
                rb = _uf_find(parent, ev[k])
                if ra != rb:
                    parent[rb] = ra
        for v in range(n_vertices):
            if _uf_find(parent, v) == v:
                rs = next_state(rs)
                active[v] = state_u01(rs) < inv_q
        for k in range(m):
            ra = _uf_find(parent, eu[k])
            rb = _uf_find(parent, ev[k])
            aa = active[ra]
            ab = active[rb]
            bit = 1 << k
            if aa and ab:
                rs = next_state(rs)
                if state_u01(rs) < p:
                    s |= bit
                else:
                    s &= ~bit
            elif aa != ab:
                s &= ~bit
        if sw >= burn and (sw - burn) % thin == thin - 1:
            hist[s] += 1
    return hist


@njit(cache=True, nogil=True)
def _general_chain(algo, n_vertices, eu, ev, base_parent, p, q,
                   n_record, thin, burn, seed, bits0, out_bits, out_obs):
    """algo 0 = heat-bath (per-edge union-find rebuild), 1 = cluster move."""
    m = eu.shape[0]
    bits = bits0.copy()
    parent = np.empty(n_vertices, dtype=np.int32)
    active = np.zeros(n_vertices, dtype=np.bool_)
    size = np.empty(n_vertices, dtype=np.int64)
    rs = mix64(np.uint64(seed) + GOLDEN)
    p_disc = p / (p + q * (1.0 - p))
    rec = 0
    sweeps = burn + n_record * thin
    for sw in range(sweeps):
        if algo == 0:
            for e in range(m):
                for v in range(n_vertices):
                    parent[v] = base_parent[v]
                for k in range(m):
                    if k != e and bits[k] == 1:
                        ra = _uf_find(parent, eu[k])
                        rb = _uf_find(parent, ev[k])
                        if ra != rb:
                            parent[rb] = ra
                conn = _uf_find(parent, eu[e]) == _uf_find(parent, ev[e])
                pe = p if conn else p_disc
                rs = next_state(rs)
                bits[e] = 1 if state_u01(rs) < pe else 0
        else:
            for v in range(n_vertices):
                parent[v] = base_parent[v]
            for k in range(m):
                if bits[k] == 1:
                    ra = _uf_find(parent, eu[k])
                    rb = _uf_find(parent, ev[k])
                    if ra != rb:
                        parent[rb] = ra
            for v in range(n_vertices):
                if _uf_find(parent, v) == v:
                    rs = next_state(rs)
                    active[v] = state_u01(rs) < 1.0 / q
            for k in range(m):
                ra = _uf_find(parent, eu[k])
                rb = _uf_find(parent, ev[k])
                aa = active[ra]
                ab = active[rb]
                if aa and ab:
                    rs = next_state(rs)
                    bits[k] = 1 if state_u01(rs) < p else 0
                elif aa != ab:
                    bits[k] = 0
        if sw >= burn and (sw - burn) % thin == thin - 1:
            for e in range(m):
                out_bits[rec, e] = bits[e]
            # observables: open edge count + largest cluster
            for v in range(n_vertices):
                parent[v] = base_parent[v]
            for k in range(m):
                if bits[k] == 1:
                    ra = _uf_find(parent, eu[k])
                    rb = _uf_find(parent, ev[k])
                    if ra != rb:
                        parent[rb] = ra
            for v in range(n_vertices):
                size[v] = 0
            for v in range(n_vertices):
                size[_uf_find(parent, v)] += 1
            big = 0
            nopen = 0
            for v in range(n_vertices):
                if size[v] > big:
                    big = size[v]
            for e in range(m):
                nopen += bits[e]
            out_obs[rec, 0] = nopen
            out_obs[rec, 1] = big
            rec += 1
    return bits


def chain_histogram(graph: FiniteGraph, spec: SamplerSpec) -> np.ndarray:
    """Full-state histogram of a thinned chain; graphs up to 20 edges."""
    m = graph.n_edges
    if m > MAX_TABLE_EDGES:
        raise ValueError("histogram chains capped at 20 edges")
    ea = graph.edge_array()
    eu = np.ascontiguousarray(ea[:, 0])
    ev = np.ascontiguousarray(ea[:, 1])
    base = _base_parent(graph, _bc_object(graph, spec.bc))
    algo = spec.resolved_algorithm()
    p, q = spec.params.p, spec.params.q
    if algo == "bernoulli":
        rng = philox(spec.seed)
        states = (rng.random((spec.sweeps, m)) < p).astype(np.uint8)
        weights = (1 << np.arange(m, dtype=np.int64))
        return np.bincount(states @ weights, minlength=1 << m).astype(np.int64)
    if algo == "heat-bath":
        table = _conn_table(graph.n_vertices, eu, ev, base)
        p_disc = p / (p + q * (1.0 - p))
        hist, _, _ = _heat_bath_hist(m, table, p, p_disc, spec.sweeps,
                                     spec.thinning, spec.burn_in, 0, spec.seed)
        return hist
    return _cluster_hist(graph.n_vertices, eu, ev, base, p, q, spec.sweeps,
                         spec.thinning, spec.burn_in, 0, spec.seed)


def sample_chain(graph: FiniteGraph, spec: SamplerSpec):
    """Thinned sample stream (bit matrix) plus online diagnostics."""
    m = graph.n_edges
    algo = spec.resolved_algorithm()
    if algo == "bernoulli":
        rng = philox(spec.seed)
        bits = (rng.random((spec.sweeps, m)) < spec.params.p).astype(np.uint8)
        obs = np.empty((spec.sweeps, 2))
        obs[:, 0] = bits.sum(axis=1)
        obs[:, 1] = 0.0
        diag = ChainDiagnostics(
            iat={"edge_density": integrated_autocorrelation(obs[:, 0])},
            flip_rate=float("nan"),
            burn_in=0,
            thinning=1,
            burn_in_ok=True,
        )
        return bits, diag
    ea = graph.edge_array()
    eu = np.ascontiguousarray(ea[:, 0])
    ev = np.ascontiguousarray(ea[:, 1])
    base = _base_parent(graph, _bc_object(graph, spec.bc))
    out_bits = np.zeros((spec.sweeps, m), dtype=np.uint8)
    out_obs = np.zeros((spec.sweeps, 2))
    _general_chain(0 if algo == "heat-bath" else 1, graph.n_vertices, eu, ev, base,
                   spec.params.p, spec.params.q, spec.sweeps, spec.thinning,
                   spec.burn_in, spec.seed, np.zeros(m, dtype=np.uint8),
                   out_bits, out_obs)
    iat_density = integrated_autocorrelation(out_obs[:, 0])
    iat_big = integrated_autocorrelation(out_obs[:, 1])
    ok = spec.burn_in >= 20 * iat_density * spec.thinning
    if not ok:
        warnings.warn(f"burn-in {spec.burn_in} below 20x measured autocorrelation "
                      f"({iat_density:.1f} samples x thinning {spec.thinning})")
    diag = ChainDiagnostics(
        iat={"edge_density": iat_density, "largest_cluster": iat_big},
        flip_rate=float(np.mean(np.abs(np.diff(out_obs[:, 0])) > 0)),
        burn_in=spec.burn_in,
        thinning=spec.thinning,
        burn_in_ok=bool(ok),
    )
    return out_bits, diag


# ------------------------------------------------------------------- box-model two-point chain


@njit(cache=True, parallel=True)
def _cm_box_twopoint(side, p, q, n_sweeps, burn, n_chains, seed, dxs):
    """Cluster-move chains on a side x side box (free bc): counts of 0 <-> (dx, 0).

    The origin sits at the box center; indicators are read off the cluster
    labels of the current configuration at every sweep after burn-in. Labels
    are resolved once per sweep (union by size, then one compression pass).
    """
    nt = dxs.shape[0]
    hits = np.zeros((n_chains, nt), dtype=np.int64)
    recs = np.zeros(n_chains, dtype=np.int64)
    nv = side * side
    for ch in prange(n_chains):
        bits_h = np.zeros((side - 1) * side, dtype=np.uint8)
        bits_v = np.zeros(side * (side - 1), dtype=np.uint8)
        parent = np.empty(nv, dtype=np.int32)
        size = np.empty(nv, dtype=np.int32)
        labels = np.empty(nv, dtype=np.int32)
        active = np.zeros(nv, dtype=np.bool_)
        rs = mix64(np.uint64(seed) + GOLDEN * np.uint64(ch + 1))
        c0 = side // 2
        origin = c0 * side + c0
        inv_q = 1.0 / q
        for sw in range(burn + n_sweeps):
            for v in range(nv):
                parent[v] = v
                size[v] = 1
            for x in range(side - 1):
                for y in range(side):
                    if bits_h[x * side + y] == 1:
                        ra = _uf_find(parent, x * side + y)
                        rb = _uf_find(parent, (x + 1) * side + y)
                        if ra != rb:
                            if size[ra] < size[rb]:
                                ra, rb = rb, ra
                            parent[rb] = ra
                            size[ra] += size[rb]
            for x in range(side):
                for y in range(side - 1):
                    if bits_v[x * (side - 1) + y] == 1:
                        ra = _uf_find(parent, x * side + y)
                        rb = _uf_find(parent, x * side + y + 1)
                        if ra != rb:
                            if size[ra] < size[rb]:
                                ra, rb = rb, ra
                            parent[rb] = ra
                            size[ra] += size[rb]
            for v in range(nv):
                labels[v] = _uf_find(parent, v)
            if sw >= burn:
                r0 = labels[origin]
                for j in range(nt):
                    d = dxs[j]
                    # four symmetric arms share the sweep
                    if labels[(c0 + d) * side + c0] == r0:
                        hits[ch, j] += 1
                    if labels[(c0 - d) * side + c0] == r0:
                        hits[ch, j] += 1
                    if labels[c0 * side + c0 + d] == r0:
                        hits[ch, j] += 1
                    if labels[c0 * side + c0 - d] == r0:
                        hits[ch, j] += 1
                recs[ch] += 4
            # activate clusters, resample active-active edges
            for v in range(nv):
                if labels[v] == v:
                    rs = next_state(rs)
                    active[v] = state_u01(rs) < inv_q
            for x in range(side - 1):
                for y in range(side):
                    u = x * side + y
                    aa = active[labels[u]]
                    ab = active[labels[u + side]]
                    if aa and ab:
                        rs = next_state(rs)
                        bits_h[x * side + y] = 1 if state_u01(rs) < p else 0
                    elif aa != ab:
                        bits_h[x * side + y] = 0
            for x in range(side):
                for y in range(side - 1):
                    u = x * side + y
                    aa = active[labels[u]]
                    ab = active[labels[u + 1]]
                    if aa and ab:
                        rs = next_state(rs)
                        bits_v[x * (side - 1) + y] = 1 if state_u01(rs) < p else 0
                    elif aa != ab:
                        bits_v[x * (side - 1) + y] = 0
    return hits.sum(axis=0), recs.sum()


def cm_box_twopoint(side, params: ModelParams, dxs, n_sweeps, burn, seed, n_chains=8):
    """Chain-estimated two-point function along the axis on a box (free bc)."""
    dxs = np.ascontiguousarray(np.asarray(dxs, dtype=np.int64))
    if np.any(np.abs(dxs) > side // 2 - 1):
        raise ValueError("targets leave the box")
    hits, recs = _cm_box_twopoint(int(side), params.p, params.q, int(n_sweeps),
                                  int(burn), int(n_chains), seed, dxs)
    return hits, int(recs)
