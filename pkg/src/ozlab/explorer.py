"""Slab-by-slab exploration of the origin's cluster along a direction.

The cluster restricted to the half-space of slab t is grown stage by stage;
the unit band [t*L, t*L+1) carries the per-slab observables: the top transverse
coordinate X_t (NaN once dead), the number of active length-L segments N_t, and
the pre-renewal times S_k (slabs with a single active segment, spaced at least
2 apart). Renewal-level calculus on these statistics lives in the kmrp module;
this one only reports observable quantities of sampled configurations.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import growth
from .exact import ModelParams
from .kmrp import StepLaw
from .lattice import Direction
from .sampler import BondConfig
from .stats import binomial_stderr


def prerenewal_times(N, reach) -> list:
    """Slabs t >= 2 with exactly one active segment, spaced >= 2 apart."""
    S = []
    s_prev = 0
    for t in range(2, reach + 1):
        if N[t] == 1 and t >= s_prev + 2:
            S.append(t)
            s_prev = t
    return S


@dataclass
class ExplorationTrace:
    direction: Direction
    L: int
    X: np.ndarray
    N: np.ndarray
    S: list
    death_time: int | None
    truncated: bool
    stage_verts: np.ndarray | None = None
    stage_edges: np.ndarray | None = None
    stage_bbox: np.ndarray | None = None
    cone_alpha: float | None = None
    cone_margin: float | None = None

    def __post_init__(self):
        reach = self.reach
        for t in range(len(self.N)):
            dead = self.N[t] == 0
            if dead != math.isnan(self.X[t]):
                raise ValueError("X must be NaN exactly when N is zero")
            if self.death_time is not None and t >= self.death_time and not dead:
                raise ValueError("death is absorbing")
        for a, b in zip(self.S, self.S[1:]):
            if b - a < 2:
                raise ValueError("pre-renewal spacing violated")

    @property
    def reach(self) -> int:
        if self.death_time is not None:
            return self.death_time - 1
        return len(self.N) - 1

    def to_json(self) -> str:
        return json.dumps({
            "w": [self.direction.wx, self.direction.wy],
            "L": self.L,
            "X": [None if math.isnan(v) else v for v in self.X.tolist()],
            "N": self.N.tolist(),
            "S": list(self.S),
            "death_time": self.death_time,
            "truncated": self.truncated,
        })

    @classmethod
    def from_json(cls, line: str) -> "ExplorationTrace":
        d = json.loads(line)
        X = np.array([np.nan if v is None else v for v in d["X"]])
        return cls(Direction(d["w"][0], d["w"][1]), d["L"], X,
                   np.array(d["N"], dtype=np.int64), list(d["S"]),
                   d["death_time"], d["truncated"])


def explore(config: BondConfig, w: Direction, L: int) -> ExplorationTrace:
    """Staged exploration of a stored configuration (reference implementation).

    Pure function of (config, w, L). The trace is flagged truncated when the
    cluster touches the graph boundary, where the box may clip it.
    """
    graph = config.graph
    coords = graph.vertices
    if (0, 0) not in coords:
        raise ValueError("the graph must contain the origin")
    idx = {v: i for i, v in enumerate(coords)}
    adj = {i: [] for i in range(graph.n_vertices)}
    for k, (a, b) in enumerate(graph.edges):
        if config.bits[k]:
            adj[a].append((b, k))
            adj[b].append((a, k))
    boundary = graph.boundary
    origin = idx[(0, 0)]

    proj = {i: w.proj(x, y) for i, (x, y) in enumerate(coords)}
    perp = {i: w.perp(x, y) for i, (x, y) in enumerate(coords)}

    visited = {origin}
    pend = []
    stack = [origin]
    X, N, S = [], [], []
    stage_verts, stage_edges, stage_bbox = [], [], []
    seen_edges = set()
    truncated = False
    death = None
    t = 0
    while True:
        bound = t * L + 1.0
        band_lo = float(t * L)
        keep = []
        for v in pend:
            (stack if proj[v] < bound else keep).append(v)
        pend = keep
        bandmax = -math.inf
        segs = set()
        nv = ne = 0
        bbox = [math.inf, -math.inf, math.inf, -math.inf]
        while stack:
            v = stack.pop()
            nv += 1
            x, y = coords[v]
            bbox = [min(bbox[0], x), max(bbox[1], x), min(bbox[2], y), max(bbox[3], y)]
            if v in boundary:
                truncated = True
            if proj[v] >= band_lo:
                bandmax = max(bandmax, perp[v])
                segs.add(math.floor(perp[v] / L))
            for (u, k) in adj[v]:
                if k not in seen_edges:
                    seen_edges.add(k)
                    ne += 1
                if u not in visited:
                    visited.add(u)
                    (stack if proj[u] < bound else pend).append(u)
        X.append(bandmax if segs else math.nan)
        N.append(len(segs))
        stage_verts.append(nv)
        stage_edges.append(ne)
        stage_bbox.append(bbox if nv else [0, 0, 0, 0])
        if not segs:
            death = t
            break
        t += 1
    N = np.array(N, dtype=np.int64)
    trace = ExplorationTrace(
        w, L, np.array(X), N, prerenewal_times(N, death - 1), death, truncated,
        stage_verts=np.array(stage_verts, dtype=np.int64),
        stage_edges=np.array(stage_edges, dtype=np.int64),
        stage_bbox=np.array(stage_bbox, dtype=np.float64),
    )
    return trace


def _assemble_trace(w, L, X, N, verts, edges, bbox, death, truncated, margin,
                    alpha) -> ExplorationTrace:
    if death < 0:
        hi = len(N)
        death_time = None
        truncated = True
    else:
        hi = death + 1
        death_time = death
    Nv = N[:hi].astype(np.int64)
    reach = death - 1 if death >= 0 else hi - 1
    return ExplorationTrace(
        w, L, X[:hi].astype(np.float64), Nv, prerenewal_times(Nv, reach), death_time,
        bool(truncated), stage_verts=verts[:hi].astype(np.int64),
        stage_edges=edges[:hi].astype(np.int64),
        stage_bbox=bbox[:hi].astype(np.float64), cone_alpha=alpha,
        cone_margin=float(margin),
    )


def trace_from_growth(p, seed, sample_idx, w: Direction, L: int,
                      stage_cap=160, alpha=4.0) -> ExplorationTrace:
    """Regrow one counter-indexed q=1 sample into a full trace."""
    X, N, verts, edges, bbox, death, truncated, margin = growth.explore_sample(
        p, seed, sample_idx, w, L, stage_cap=stage_cap, alpha=alpha)
    return _assemble_trace(w, L, X, N, verts, edges, bbox, death, truncated,
                           margin, alpha)


def traces_from_growth_batch(p, seed, ids, w: Direction, L: int,
                             stage_cap=80, alpha=4.0) -> list:
    """Regrow many counter-indexed samples into traces (one shared kernel pass)."""
    X, N, verts, edges, bbox, death, truncated, margin = growth.explore_samples_batch(
        p, seed, ids, w, L, stage_cap=stage_cap, alpha=alpha)
    return [
        _assemble_trace(w, L, X[j], N[j], verts[j], edges[j], bbox[j],
                        int(death[j]), bool(truncated[j]), float(margin[j]), alpha)
        for j in range(len(ids))
    ]


class BudgetExhausted(RuntimeError):
    pass


def conditioned_ensemble(params: ModelParams, w: Direction, L: int, n_slices: int,
                         sample_budget: int, seed=0, max_traces=2000, alpha=4.0,
                         stage_cap=None):
    """Traces conditioned on the cluster reaching slab n_slices, by rejection.

    Returns (traces, info) where info holds the acceptance rate and the raw
    aggregate statistics of the scan. n_slices = 0 yields an unconditioned
    ensemble.
    """
    if params.q != 1.0:
        raise NotImplementedError("conditioned ensembles are grown at q = 1")
    if stage_cap is None:
        stage_cap = max(40, 4 * n_slices + 20)
    if n_slices == 0:
        ids = list(range(min(sample_budget, max_traces)))
        agg = None
        accepted = sample_budget
    else:
        agg = growth.explore_aggregates(
            params.p, w, L, sample_budget, seed, stage_cap=stage_cap,
            t_cap=min(stage_cap, max(24, n_slices)), m_cap=max(24, n_slices),
            n_cond=n_slices, max_ids=max_traces, alpha=alpha)
        ids = agg["accepted_ids"][:max_traces]
        accepted = int(agg["reach_hist"][n_slices:].sum())
        if accepted == 0:
            raise BudgetExhausted("no accepted sample within the budget")
    traces = traces_from_growth_batch(params.p, seed, ids, w, L,
                                      stage_cap=stage_cap, alpha=alpha)
    info = {
        "acceptance": accepted / sample_budget,
        "accepted": accepted,
        "budget": sample_budget,
        "aggregates": agg,
        "requested": max_traces,
    }
    if len(traces) < min(max_traces, accepted):
        raise BudgetExhausted("accepted-id quota clipped below the requested count")
    return traces, info


@dataclass(frozen=True)
class PieceRecord:
    index: int
    length: int
    dx: float
    edge_count: int
    bbox: tuple
    terminal: bool


def piece_decomposition(trace: ExplorationTrace, n_slices=None) -> list:
    """Split a trace at its pre-renewal slabs into irreducible pieces.

    Piece k runs over stages (S_{k-1}, S_k]; the final piece (to death, or to
    n_slices on conditioned traces) is marked terminal. Edge counts and boxes
    use the stage at which the exploration first processed each vertex/edge.
    """
    if not trace.S:
        raise ValueError("trace has no pre-renewal")
    ends = [0] + list(trace.S)
    if trace.death_time is not None:
        last = trace.death_time
    else:
        last = n_slices if n_slices is not None else len(trace.N) - 1
    out = []
    have_stats = trace.stage_edges is not None

    def stats(lo, hi):
        if not have_stats:
            return -1, (0.0, 0.0, 0.0, 0.0)
        ec = int(trace.stage_edges[lo: hi + 1].sum())
        bb = trace.stage_bbox[lo: hi + 1]
        sel = trace.stage_verts[lo: hi + 1] > 0
        if not sel.any():
            return ec, (0.0, 0.0, 0.0, 0.0)
        bb = bb[sel]
        return ec, (float(bb[:, 0].min()), float(bb[:, 1].max()),
                    float(bb[:, 2].min()), float(bb[:, 3].max()))

    for k in range(1, len(ends)):
        lo, hi = ends[k - 1], ends[k]
        # piece 1 covers stages [0, S_1]; later pieces (S_{k-1}, S_k]
        ec, bb = stats(0 if k == 1 else lo + 1, hi)
        out.append(PieceRecord(k, hi - lo, float(trace.X[hi] - trace.X[lo]),
                               ec, bb, False))
    lo = ends[-1]
    hi_alive = min(trace.reach, len(trace.X) - 1)
    ec, bb = stats(lo + 1, min(last, len(trace.N) - 1))
    dx_term = float(trace.X[hi_alive] - trace.X[lo]) if hi_alive > lo else 0.0
    out.append(PieceRecord(len(ends), last - lo, dx_term, ec, bb, True))
    return out


def cone_stats(traces, alpha, k_list):
    """Empirical probabilities that the cluster leaves the cone pulled back by k slabs."""
    use = [tr for tr in traces if tr.cone_margin is not None and tr.cone_alpha == alpha]
    if not use:
        raise ValueError("traces carry no cone margins for this alpha")
    n = len(use)
    out = []
    for k in k_list:
        cnt = sum(1 for tr in use if tr.cone_margin > k * tr.L)
        out.append((int(k), cnt / n, binomial_stderr(cnt, n)))
    return out


def empirical_step_law(traces, kappa, initial_survival=1.0, boundary_margin=2,
                       x_lattice=1.0, min_pieces=1000) -> StepLaw:
    """Histogram of interior (length, X-displacement) pieces as a step law.

    Pieces within `boundary_margin` slabs of the conditioning horizon are
    dropped (endpoint bias). The conditioned histogram approximates the
    survival-tilted step law; together with an externally estimated killing
    rate it feeds the renewal calculus.
    """
    interior = {}
    initial = {}
    n_int = 0
    for tr in traces:
        horizon = tr.reach - boundary_margin
        if tr.S and tr.S[0] <= horizon:
            key = (tr.S[0], float(tr.X[tr.S[0]] - tr.X[0]))
            initial[key] = initial.get(key, 0.0) + 1.0
        for a, b in zip(tr.S, tr.S[1:]):
            if b > horizon:
                break
            key = (b - a, float(tr.X[b] - tr.X[a]))
            interior[key] = interior.get(key, 0.0) + 1.0
            n_int += 1
    if n_int < min_pieces:
        raise ValueError(f"only {n_int} interior pieces; need >= {min_pieces}")
    init_total = sum(initial.values())
    init_table = [(t, dx, c / init_total * initial_survival)
                  for (t, dx), c in sorted(initial.items())]
    int_table = [(t, dx, c) for (t, dx), c in sorted(interior.items())]
    return StepLaw.from_tables(kappa, int_table, initial=init_table, x_lattice=x_lattice)


def write_traces_jsonl(path, traces):
    with open(path, "w") as fh:
        for tr in traces:
            fh.write(tr.to_json() + "\n")


def read_traces_jsonl(path):
    with open(path) as fh:
        return [ExplorationTrace.from_json(line) for line in fh if line.strip()]
