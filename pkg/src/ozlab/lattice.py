"""Discrete geometry of Z^2: directions, half-space bands, slab segments, cones, dual edges.

All direction-dependent predicates are float inequalities with exact integer fast
paths for axis directions. Conventions frozen here (band width, rounding tie-break)
are relied on by the explorer and the estimators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

_EPS = 1e-12


@dataclass(frozen=True)
class LatticePoint:
    x: int
    y: int

    def as_tuple(self):
        return (self.x, self.y)


@dataclass(frozen=True)
class Direction:
    """Unit vector w together with its positive (counter-clockwise) normal."""

    wx: float
    wy: float

    def __post_init__(self):
        n = math.hypot(self.wx, self.wy)
        if abs(n - 1.0) > 1e-9:
            object.__setattr__(self, "wx", self.wx / n)
            object.__setattr__(self, "wy", self.wy / n)
        assert abs(math.hypot(self.wx, self.wy) - 1.0) < _EPS * 10

    @classmethod
    def from_angle(cls, theta: float) -> "Direction":
        return cls(math.cos(theta), math.sin(theta))

    @property
    def w(self):
        return (self.wx, self.wy)

    @property
    def w_perp(self):
        # rotation of w by +pi/2
        return (-self.wy, self.wx)

    @property
    def angle(self) -> float:
        return math.atan2(self.wy, self.wx)

    def proj(self, x: float, y: float) -> float:
        return x * self.wx + y * self.wy

    def perp(self, x: float, y: float) -> float:
        return -x * self.wy + y * self.wx

    @property
    def is_axis(self) -> bool:
        return abs(self.wx) < _EPS or abs(self.wy) < _EPS


E1 = Direction(1.0, 0.0)
E2 = Direction(0.0, 1.0)


@dataclass(frozen=True)
class SliceSpec:
    """Slab geometry: bands [t*L, t*L+1) along w, length-L segments along w_perp."""

    direction: Direction
    L: int
    t: int = 0
    k: int = 0

    def __post_init__(self):
        if self.L <= 0:
            raise ValueError("slab thickness L must be positive")


@dataclass(frozen=True)
class ConeSpec:
    """Forward cone of half-aperture arctan(alpha) around `direction` from `apex`."""

    alpha: float
    apex: tuple = (0.0, 0.0)
    direction: Direction = E1

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("cone aperture parameter must be positive")


def round_to_lattice(v) -> LatticePoint:
    """Nearest lattice vertex; ties broken top-left (minimal x, then maximal y)."""
    vx, vy = float(v[0]), float(v[1])
    if not (math.isfinite(vx) and math.isfinite(vy)):
        raise ValueError("coordinates must be finite")
    best = None
    for cx in (math.floor(vx), math.ceil(vx)):
        for cy in (math.floor(vy), math.ceil(vy)):
            d2 = (vx - cx) ** 2 + (vy - cy) ** 2
            key = (d2, cx, -cy)
            if best is None or key < best[0]:
                best = (key, (cx, cy))
    return LatticePoint(*best[1])


def halfspace_band_vertices(spec: SliceSpec, box: int) -> set:
    """Vertices of Lambda_box in the unit-width band t*L <= <x,w> < t*L + 1.

    The band is the integer approximation of the slab boundary hyperplane; for
    w = e1 it is exactly the column x = ceil(t*L).
    """
    w = spec.direction
    lo = spec.t * spec.L
    out = set()
    if w.is_axis:
        # exact integer column/row
        sgn = 1 if (w.wx + w.wy) > 0 else -1
        c = math.ceil(lo) if sgn > 0 else -math.ceil(lo)
        if abs(c) <= box:
            for u in range(-box, box + 1):
                out.add((c, u) if abs(w.wx) > 0.5 else (u, c))
        if not out:
            raise ValueError("band misses the box; enlarge the box")
        return {LatticePoint(x, y) for (x, y) in out}
    for x in range(-box, box + 1):
        for y in range(-box, box + 1):
            s = w.proj(x, y)
            if lo <= s < lo + 1.0:
                out.add((x, y))
    if not out:
        raise ValueError("band misses the box; enlarge the box")
    return {LatticePoint(x, y) for (x, y) in out}


def segment_of(point, spec: SliceSpec) -> int:
    """Index k of the length-L segment (along w_perp) containing `point`'s band position."""
    w = spec.direction
    px, py = (point.x, point.y) if isinstance(point, LatticePoint) else (point[0], point[1])
    s = w.proj(px, py)
    lo = spec.t * spec.L
    if not (lo - _EPS <= s < lo + 1.0):
        raise ValueError(f"point {point!r} not in the band of slice t={spec.t}")
    return math.floor(w.perp(px, py) / spec.L)


def cone_contains(cone: ConeSpec, point) -> bool:
    """|<z - apex, w_perp>| <= alpha * <z - apex, w>."""
    zx = point[0] - cone.apex[0]
    zy = point[1] - cone.apex[1]
    w = cone.direction
    return abs(w.perp(zx, zy)) <= cone.alpha * w.proj(zx, zy)


def cone_margin(cone_alpha: float, direction: Direction, point) -> float:
    """Smallest a >= 0 such that `point` lies in the alpha-cone with apex -a*w.

    Equals |<z,w_perp>|/alpha - <z,w>; the point exits the cone shifted back by
    (k*L, 0) exactly when this margin exceeds k*L.
    """
    s = direction.proj(point[0], point[1])
    h = direction.perp(point[0], point[1])
    return abs(h) / cone_alpha - s


@dataclass(frozen=True)
class EdgeId:
    """Lattice edge from `endpoint` one unit right ('h') or up ('v').

    `dual` marks edges of the shifted dual lattice Z^2 + (1/2, 1/2); a dual edge
    with endpoint (a, b) runs from (a+1/2, b+1/2).
    """

    endpoint: LatticePoint
    orientation: str
    dual: bool = False

    def __post_init__(self):
        if self.orientation not in ("h", "v"):
            raise ValueError("orientation must be 'h' or 'v'")

    @property
    def endpoints(self):
        x, y = self.endpoint.x, self.endpoint.y
        if self.orientation == "h":
            return ((x, y), (x + 1, y))
        return ((x, y), (x, y + 1))


def dual_edge(e: EdgeId) -> EdgeId:
    """The unique dual-lattice edge crossing e (and back again: an exact involution)."""
    x, y = e.endpoint.x, e.endpoint.y
    if not e.dual:
        if e.orientation == "h":
            return EdgeId(LatticePoint(x, y - 1), "v", dual=True)
        return EdgeId(LatticePoint(x - 1, y), "h", dual=True)
    if e.orientation == "v":
        return EdgeId(LatticePoint(x, y + 1), "h", dual=False)
    return EdgeId(LatticePoint(x + 1, y), "v", dual=False)
