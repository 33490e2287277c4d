"""Geometry kernel: domains, simple polygonal chains, wall crossings.

Orientation and intersection tests run a floating-point filter first and
fall back to exact rational arithmetic (floats are exact rationals, so
`Fraction` conversion loses nothing).  Crossing miscounts corrupt singular
weights, hence the exactness requirement.

Chains are arc-length parameterized: params[i] - params[i-1] equals the
length of segment i, and each segment carries a unit direction, the foot of
its supporting line on the hyperplane through the origin, and the offset of
the segment start along the direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import ChainRejected, ContractError, DomainError

Point = tuple[float, float]

_FILTER_REL = 1e-12


def orient(a: Point, b: Point, c: Point) -> int:
    """Sign of the cross product (b - a) x (c - a): +1 left turn, -1 right
    turn, 0 collinear.  Exact."""
    t1 = (b[0] - a[0]) * (c[1] - a[1])
    t2 = (b[1] - a[1]) * (c[0] - a[0])
    det = t1 - t2
    mag = abs(t1) + abs(t2)
    if abs(det) > _FILTER_REL * mag:
        return 1 if det > 0 else -1
    # filter failed: redo in exact rational arithmetic
    ax, ay = Fraction(a[0]), Fraction(a[1])
    det_exact = (Fraction(b[0]) - ax) * (Fraction(c[1]) - ay) - (
        Fraction(b[1]) - ay
    ) * (Fraction(c[0]) - ax)
    if det_exact > 0:
        return 1
    if det_exact < 0:
        return -1
    return 0


def on_segment(p: Point, a: Point, b: Point) -> bool:
    """True when p lies on the closed segment [a, b] (exact)."""
    if orient(a, b, p) != 0:
        return False
    return (
        min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def segments_intersect(p: Point, q: Point, r: Point, s: Point) -> str:
    """Classify the intersection of closed segments [p,q] and [r,s].

    Returns "none", "proper" (interiors cross transversally), or "touch"
    (endpoint contact or collinear overlap).
    """
    o1, o2 = orient(p, q, r), orient(p, q, s)
    o3, o4 = orient(r, s, p), orient(r, s, q)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return "proper"
    if o1 == 0 and on_segment(r, p, q):
        return "touch"
    if o2 == 0 and on_segment(s, p, q):
        return "touch"
    if o3 == 0 and on_segment(p, r, s):
        return "touch"
    if o4 == 0 and on_segment(q, r, s):
        return "touch"
    return "none"


def proper_intersection_param(p: Point, q: Point, r: Point, s: Point) -> float:
    """Parameter in (0, 1) along [p, q] of a proper crossing with [r, s]."""
    d1 = (q[0] - p[0], q[1] - p[1])
    d2 = (s[0] - r[0], s[1] - r[1])
    denom = d1[0] * d2[1] - d1[1] * d2[0]
    num = (r[0] - p[0]) * d2[1] - (r[1] - p[1]) * d2[0]
    return num / denom


def dist_point_segment(p: Point, a: Point, b: Point) -> float:
    ax, ay = a
    dx, dy = b[0] - ax, b[1] - ay
    L2 = dx * dx + dy * dy
    if L2 == 0.0:
        return math.hypot(p[0] - ax, p[1] - ay)
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / L2
    t = min(1.0, max(0.0, t))
    return math.hypot(p[0] - (ax + t * dx), p[1] - (ay + t * dy))


# ---------------------------------------------------------------------------
# domains


@dataclass(frozen=True)
class Domain:
    """Open, connected, bounded planar domain: an axis-aligned rectangle or
    a simple polygon (given by its vertex loop, not repeated at the end)."""

    polygon: tuple[Point, ...]
    is_rect: bool = False

    @staticmethod
    def rect(x0: float, y0: float, x1: float, y1: float) -> "Domain":
        if not (x1 > x0 and y1 > y0):
            raise ContractError(f"empty rectangle [{x0},{x1}]x[{y0},{y1}]")
        return Domain(((x0, y0), (x1, y0), (x1, y1), (x0, y1)), is_rect=True)

    @staticmethod
    def from_polygon(vertices: Sequence[Point]) -> "Domain":
        verts = tuple((float(x), float(y)) for x, y in vertices)
        if len(verts) < 3:
            raise ContractError("polygon needs at least 3 vertices")
        n = len(verts)
        # simplicity: non-adjacent edges must not meet at all
        for i in range(n):
            a, b = verts[i], verts[(i + 1) % n]
            if a == b:
                raise ContractError("polygon has a zero-length edge")
            for j in range(i + 1, n):
                if j == i or (j + 1) % n == i or (i + 1) % n == j:
                    continue
                c, d = verts[j], verts[(j + 1) % n]
                if segments_intersect(a, b, c, d) != "none":
                    raise ContractError("polygon is not simple")
        area2 = sum(
            verts[i][0] * verts[(i + 1) % n][1] - verts[(i + 1) % n][0] * verts[i][1]
            for i in range(n)
        )
        if abs(area2) <= 0.0:
            raise ContractError("polygon has zero area")
        return Domain(verts)

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        xs = [v[0] for v in self.polygon]
        ys = [v[1] for v in self.polygon]
        return min(xs), min(ys), max(xs), max(ys)

    def edges(self) -> list[tuple[Point, Point]]:
        n = len(self.polygon)
        return [(self.polygon[i], self.polygon[(i + 1) % n]) for i in range(n)]

    def contains(self, p: Point) -> bool:
        """Strict interior membership."""
        x0, y0, x1, y1 = self.bbox
        if not (x0 < p[0] < x1 and y0 < p[1] < y1):
            return False
        if self.is_rect:
            return True
        # crossing-number test; boundary points count as outside
        for a, b in self.edges():
            if on_segment(p, a, b):
                return False
        inside = False
        for a, b in self.edges():
            if (a[1] > p[1]) != (b[1] > p[1]):
                xint = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1])
                if xint > p[0]:
                    inside = not inside
        return inside

    def contains_segment(self, p: Point, q: Point) -> bool:
        if not (self.contains(p) and self.contains(q)):
            return False
        if self.is_rect:
            return True  # convex
        for a, b in self.edges():
            if segments_intersect(p, q, a, b) != "none":
                return False
        return True

    def to_dict(self) -> dict:
        if self.is_rect:
            x0, y0, x1, y1 = self.bbox
            return {"rect": [x0, y0, x1, y1]}
        return {"polygon": [list(v) for v in self.polygon]}


# ---------------------------------------------------------------------------
# polygonal chains


@dataclass(frozen=True)
class PolygonalChain:
    """Simple, injective, arc-length parameterized polygonal chain."""

    vertices: tuple[Point, ...]
    params: tuple[float, ...]

    @property
    def segment_count(self) -> int:
        return len(self.vertices) - 1

    @property
    def length(self) -> float:
        return self.params[-1] - self.params[0]

    def direction(self, i: int) -> Point:
        """Unit direction of segment i (0-based)."""
        p, q = self.vertices[i], self.vertices[i + 1]
        L = self.params[i + 1] - self.params[i]
        return ((q[0] - p[0]) / L, (q[1] - p[1]) / L)

    def frame(self, i: int) -> tuple[Point, Point, float]:
        """(direction, hyperplane foot, offset) of segment i: the segment
        start decomposes as foot + offset * direction with foot orthogonal
        to the direction."""
        eta = self.direction(i)
        p = self.vertices[i]
        t_i = p[0] * eta[0] + p[1] * eta[1]
        foot = (p[0] - t_i * eta[0], p[1] - t_i * eta[1])
        return eta, foot, t_i

    def point_at(self, t: float) -> Point:
        if t < self.params[0] - 1e-12 or t > self.params[-1] + 1e-12:
            raise DomainError(f"parameter {t} outside chain interval")
        for i in range(self.segment_count):
            if t <= self.params[i + 1] or i == self.segment_count - 1:
                s = t - self.params[i]
                eta = self.direction(i)
                p = self.vertices[i]
                return (p[0] + s * eta[0], p[1] + s * eta[1])
        raise DomainError(f"parameter {t} not located")  # pragma: no cover

    def reversed(self) -> "PolygonalChain":
        verts = tuple(reversed(self.vertices))
        total = self.params[-1]
        params = tuple(total - p for p in reversed(self.params))
        return PolygonalChain(verts, params)

    def to_dict(self) -> dict:
        return {"vertices": [list(v) for v in self.vertices]}


def validate_chain(domain: Domain, vertices: Sequence[Point]) -> PolygonalChain:
    """Check simplicity, injectivity, and containment; compute arc-length
    parameters.  Raises ChainRejected naming the first violation."""
    verts = [(float(x), float(y)) for x, y in vertices]
    if len(verts) < 2:
        raise ChainRejected("chain needs at least 2 vertices")
    for i, (p, q) in enumerate(zip(verts, verts[1:])):
        if p == q:
            raise ChainRejected("zero-length segment", segment=i)
    if len(set(verts)) != len(verts):
        raise ChainRejected("repeated vertex (chain not injective)")
    for i in range(len(verts) - 1):
        if not domain.contains_segment(verts[i], verts[i + 1]):
            raise ChainRejected("segment exits the domain", segment=i)
    n = len(verts) - 1
    for i in range(n):
        for j in range(i + 1, n):
            kind = segments_intersect(verts[i], verts[i + 1], verts[j], verts[j + 1])
            if j == i + 1:
                # consecutive segments share exactly the common vertex; any
                # other contact (overlap fold-back) is a self-intersection
                if kind == "proper":
                    raise ChainRejected("self-intersection", segment=j)
                if on_segment(verts[j + 1], verts[i], verts[i + 1]) or on_segment(
                    verts[i], verts[j], verts[j + 1]
                ):
                    raise ChainRejected("segments fold back onto each other", segment=j)
            elif kind != "none":
                raise ChainRejected("self-intersection", segment=j)
    params = [0.0]
    for p, q in zip(verts, verts[1:]):
        params.append(params[-1] + math.hypot(q[0] - p[0], q[1] - p[1]))
    return PolygonalChain(tuple(verts), tuple(params))


def segment_chain(domain: Domain, p: Point, q: Point) -> PolygonalChain:
    """Single-segment chain from p to q."""
    return validate_chain(domain, [p, q])


def crossing_sign(wall_a: Point, wall_b: Point, direction: Point) -> int:
    """+1 when `direction` crosses the oriented segment wall_a -> wall_b
    from its left side to its right side, -1 the other way."""
    cross = (wall_b[0] - wall_a[0]) * direction[1] - (wall_b[1] - wall_a[1]) * direction[0]
    if cross == 0:
        raise ChainRejected("tangential wall contact")
    return 1 if cross < 0 else -1


def wall_crossings(
    chain: PolygonalChain, wall_segments: Sequence[tuple[Point, Point]]
) -> list[tuple[float, int, int]]:
    """Transversal crossings of the chain with a wall polyline.

    Returns (chain parameter, orientation sign, wall segment index) sorted
    by parameter.  Signs are +1 for left-to-right crossings of the oriented
    wall.  Any degenerate contact (touching endpoints, collinear overlap,
    crossing at a chain vertex) raises ChainRejected.
    """
    out: list[tuple[float, int, int]] = []
    for i in range(chain.segment_count):
        p, q = chain.vertices[i], chain.vertices[i + 1]
        for w, (a, b) in enumerate(wall_segments):
            kind = segments_intersect(p, q, a, b)
            if kind == "none":
                continue
            if kind == "touch":
                raise ChainRejected("degenerate wall contact", segment=i)
            s = proper_intersection_param(p, q, a, b)
            seg_len = chain.params[i + 1] - chain.params[i]
            t = chain.params[i] + s * seg_len
            sign = crossing_sign(a, b, chain.direction(i))
            out.append((t, sign, w))
    out.sort(key=lambda item: item[0])
    return out
