"""Structured planar BV fields: smooth grid part + jump walls + Cantor channels.

The three components model the three pieces of the distributional gradient:
a bilinearly interpolated sample grid carries the absolutely continuous
part, oriented polylines with signed heights carry the jump part, and
direction/band/weight triples composed with the Cantor function carry the
purely Cantor part.

Pointwise values integrate wall crossings along the straight segment from a
fixed anchor point.  That potential is single valued whenever no wall ends
strictly inside the domain; fields with interior wall tips (which force a
multivalued potential, exactly the configurations whose singular set does
not disconnect the domain) still have well-defined restriction profiles and
singular weights, but their pointwise values are anchor-relative.  See
`is_potential_consistent`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import bv1d
from .bv1d import BVProfile, CantorAtom
from .cantor import DEFAULT_DEPTH, cantor_eval, in_cantor_set
from .chains import (
    Domain,
    Point,
    PolygonalChain,
    dist_point_segment,
    on_segment,
    proper_intersection_param,
    segments_intersect,
    validate_chain,
    wall_crossings,
)
from .errors import ChainRejected, ContractError, DomainError, InternalInvariantError

ON_WALL_EPS = 1e-9  # geometric tolerance: closer than this counts as on-wall
_INV_SQRT3 = 1.0 / math.sqrt(3.0)


# ---------------------------------------------------------------------------
# components


@dataclass(frozen=True)
class SmoothGrid:
    """Regular sample lattice with bilinear interpolation (the W^{1,1} part)."""

    x0: float
    y0: float
    dx: float
    dy: float
    values: np.ndarray  # shape (ny, nx), row j holds y = y0 + j*dy

    @property
    def nx(self) -> int:
        return self.values.shape[1]

    @property
    def ny(self) -> int:
        return self.values.shape[0]

    @staticmethod
    def constant(domain: Domain, value: float, nx: int = 2, ny: int = 2) -> "SmoothGrid":
        return SmoothGrid.sample(domain, lambda x, y: value, nx, ny)

    @staticmethod
    def sample(
        domain: Domain, fn: Callable[[float, float], float], nx: int, ny: int
    ) -> "SmoothGrid":
        if nx < 2 or ny < 2:
            raise ContractError("smooth grid needs at least 2x2 samples")
        bx0, by0, bx1, by1 = domain.bbox
        dx = (bx1 - bx0) / (nx - 1)
        dy = (by1 - by0) / (ny - 1)
        vals = np.array(
            [[float(fn(bx0 + i * dx, by0 + j * dy)) for i in range(nx)] for j in range(ny)]
        )
        if not np.all(np.isfinite(vals)):
            raise ContractError("smooth grid samples must be finite")
        return SmoothGrid(bx0, by0, dx, dy, vals)

    def _cell(self, p: Point) -> tuple[int, int, float, float]:
        i = int((p[0] - self.x0) / self.dx)
        j = int((p[1] - self.y0) / self.dy)
        i = min(max(i, 0), self.nx - 2)
        j = min(max(j, 0), self.ny - 2)
        u = (p[0] - (self.x0 + i * self.dx)) / self.dx
        w = (p[1] - (self.y0 + j * self.dy)) / self.dy
        return i, j, u, w

    def value(self, p: Point) -> float:
        i, j, u, w = self._cell(p)
        v = self.values
        return (
            v[j, i] * (1 - u) * (1 - w)
            + v[j, i + 1] * u * (1 - w)
            + v[j + 1, i] * (1 - u) * w
            + v[j + 1, i + 1] * u * w
        )

    def gradient(self, p: Point) -> Point:
        i, j, u, w = self._cell(p)
        v = self.values
        gx = ((v[j, i + 1] - v[j, i]) * (1 - w) + (v[j + 1, i + 1] - v[j + 1, i]) * w) / self.dx
        gy = ((v[j + 1, i] - v[j, i]) * (1 - u) + (v[j + 1, i + 1] - v[j, i + 1]) * u) / self.dy
        return gx, gy

    def grid_lines(self) -> tuple[list[float], list[float]]:
        xs = [self.x0 + i * self.dx for i in range(self.nx)]
        ys = [self.y0 + j * self.dy for j in range(self.ny)]
        return xs, ys

    def is_constant(self, tol: float = 0.0) -> bool:
        return float(self.values.max() - self.values.min()) <= tol


@dataclass(frozen=True)
class JumpWall:
    """Oriented polyline across which the field jumps.

    Crossing a segment from its left side to its right side gains the
    segment's height.  Heights are per segment and nonzero; a closed wall
    repeats its first vertex at the end.
    """

    polyline: tuple[Point, ...]
    heights: tuple[float, ...]

    @staticmethod
    def build(polyline: Sequence[Point], height: float | Sequence[float]) -> "JumpWall":
        pts = tuple((float(x), float(y)) for x, y in polyline)
        if len(pts) < 2:
            raise ContractError("wall polyline needs at least 2 vertices")
        nseg = len(pts) - 1
        hs = (
            tuple(float(h) for h in height)
            if isinstance(height, (list, tuple))
            else (float(height),) * nseg
        )
        if len(hs) != nseg:
            raise ContractError("one height per wall segment required")
        for k, h in enumerate(hs):
            if not abs(h) > 0:
                raise ContractError(f"wall segment {k} has zero height")
        for a, b in zip(pts, pts[1:]):
            if a == b:
                raise ContractError("wall has a zero-length segment")
        # simple polyline: non-consecutive segments must not meet (closed
        # walls share only the wrap-around vertex)
        closed = pts[0] == pts[-1]
        for i in range(nseg):
            for j in range(i + 1, nseg):
                if j == i + 1 or (closed and i == 0 and j == nseg - 1):
                    continue
                if segments_intersect(pts[i], pts[i + 1], pts[j], pts[j + 1]) != "none":
                    raise ContractError("wall polyline self-intersects")
        return JumpWall(pts, hs)

    @property
    def is_closed(self) -> bool:
        return self.polyline[0] == self.polyline[-1]

    def segments(self) -> list[tuple[Point, Point, float]]:
        return [
            (self.polyline[k], self.polyline[k + 1], self.heights[k])
            for k in range(len(self.polyline) - 1)
        ]

    def to_dict(self) -> dict:
        return {
            "polyline": [list(v) for v in self.polyline],
            "heights": list(self.heights),
        }


@dataclass(frozen=True)
class CantorChannel:
    """Purely Cantor contribution w * C((x . nu - a) / (b - a)), clamped.

    nu is a unit direction; the field varies only across the slab
    a <= x . nu <= b and is constant on each side of it.
    """

    nu: Point
    band: tuple[float, float]
    weight: float

    @staticmethod
    def build(direction: Point, band: tuple[float, float], weight: float) -> "CantorChannel":
        norm = math.hypot(direction[0], direction[1])
        if norm == 0.0:
            raise ContractError("channel direction must be nonzero")
        a, b = float(band[0]), float(band[1])
        if not b > a:
            raise ContractError(f"channel band [{a}, {b}] is empty")
        if not abs(weight) > 0:
            raise ContractError("channel weight must be nonzero")
        return CantorChannel((direction[0] / norm, direction[1] / norm), (a, b), float(weight))

    def ell(self, p: Point) -> float:
        a, b = self.band
        return (p[0] * self.nu[0] + p[1] * self.nu[1] - a) / (b - a)

    def value(self, p: Point, depth: int = DEFAULT_DEPTH) -> float:
        return self.weight * cantor_eval(min(max(self.ell(p), 0.0), 1.0), depth)

    def to_dict(self) -> dict:
        return {"direction": list(self.nu), "band": list(self.band), "weight": self.weight}


# ---------------------------------------------------------------------------
# the field


@dataclass(frozen=True)
class StructuredBVField:
    """Immutable structured BV function on an open bounded planar domain."""

    domain: Domain
    smooth: SmoothGrid
    walls: tuple[JumpWall, ...] = ()
    channels: tuple[CantorChannel, ...] = ()
    anchor: Point = (0.0, 0.0)
    depth: int = DEFAULT_DEPTH
    node_tol: float = ON_WALL_EPS

    @staticmethod
    def build(
        domain: Domain,
        smooth: SmoothGrid | float = 0.0,
        walls: Sequence[JumpWall] = (),
        channels: Sequence[CantorChannel] = (),
        anchor: Point | None = None,
        depth: int = DEFAULT_DEPTH,
    ) -> "StructuredBVField":
        if isinstance(smooth, (int, float)):
            smooth = SmoothGrid.constant(domain, float(smooth))
        walls = tuple(walls)
        channels = tuple(channels)
        for wall in walls:
            for a, b, _ in wall.segments():
                if not _segment_in_closure(domain, a, b):
                    raise ContractError("wall polyline leaves the domain closure")
        if anchor is None:
            anchor = _default_anchor(domain, walls)
        else:
            anchor = (float(anchor[0]), float(anchor[1]))
            if _min_wall_distance(anchor, walls) <= ON_WALL_EPS:
                raise ContractError("anchor lies on a wall")
        return StructuredBVField(domain, smooth, walls, channels, anchor, depth)

    # -- wall geometry --------------------------------------------------

    def wall_segments(self) -> list[tuple[Point, Point, float]]:
        out = []
        for wall in self.walls:
            out.extend(wall.segments())
        return out

    def wall_vertices(self) -> list[Point]:
        out = []
        for wall in self.walls:
            out.extend(wall.polyline)
        return out

    def is_potential_consistent(self) -> bool:
        """True when no wall polyline has an endpoint strictly inside the
        domain, so the anchor-integrated wall potential is path independent
        and pointwise values are genuinely single valued."""
        for wall in self.walls:
            if wall.is_closed:
                continue
            if self.domain.contains(wall.polyline[0]) or self.domain.contains(
                wall.polyline[-1]
            ):
                return False
        return True

    def _anchor_wall_sum(self, x: Point) -> float:
        """Signed wall potential at x: sum of crossing heights along the
        straight segment anchor -> x, retried from nudged anchors on
        degenerate contact."""
        segs = self.wall_segments()
        if not segs:
            return 0.0
        bx0, by0, bx1, by1 = self.domain.bbox
        scale = max(bx1 - bx0, by1 - by0)
        clearance = _min_wall_distance(self.anchor, self.walls)
        step = min(1e-7 * scale, 0.3 * clearance) if clearance > 0 else 1e-7 * scale
        for k in range(12):
            if k == 0:
                a = self.anchor
            else:
                ang = 0.7 + 2.39996 * k  # deterministic low-discrepancy angles
                a = (
                    self.anchor + np.array([math.cos(ang), math.sin(ang)]) * (step * k)
                )
                a = (float(a[0]), float(a[1]))
            total = 0.0
            ok = True
            for p, q, h in segs:
                kind = segments_intersect(a, x, p, q)
                if kind == "touch":
                    ok = False
                    break
                if kind == "proper":
                    dx = (x[0] - a[0], x[1] - a[1])
                    cross = (q[0] - p[0]) * dx[1] - (q[1] - p[1]) * dx[0]
                    total += h if cross < 0 else -h
            if ok:
                return total
        raise InternalInvariantError(f"wall potential degenerate at {x}")

    def _sector_wall_values(self, x: Point) -> list[float]:
        """Wall-potential limits of the angular sectors around x.

        A single value for points off all walls; two or more values on a
        wall, at a wall vertex, or at a tip.  Values are exact signed sums
        of wall heights relative to the anchor.
        """
        incident = [
            (p, q)
            for p, q, _ in self.wall_segments()
            if dist_point_segment(x, p, q) <= self.node_tol
        ]
        if not incident:
            return [self._anchor_wall_sum(x)]
        features: list[float] = []
        for p, q, _ in self.wall_segments():
            for v in (p, q):
                d = math.hypot(v[0] - x[0], v[1] - x[1])
                if d > self.node_tol:
                    features.append(d)
            if (p, q) not in incident:
                d = dist_point_segment(x, p, q)
                if d > self.node_tol:
                    features.append(d)
        bx0, by0, bx1, by1 = self.domain.bbox
        radius = 0.45 * min(features) if features else 0.05 * max(bx1 - bx0, by1 - by0)
        # probe angles: rotate to avoid incident ray directions
        rays = []
        for p, q in incident:
            for v in (p, q):
                d = math.hypot(v[0] - x[0], v[1] - x[1])
                if d > self.node_tol:
                    rays.append(math.atan2(v[1] - x[1], v[0] - x[0]))
        values = []
        nprobe = 16
        offset = 0.5 * math.pi / nprobe
        for k in range(nprobe):
            ang = offset + 2.0 * math.pi * k / nprobe
            if any(abs(_angle_diff(ang, r)) < 1e-3 for r in rays):
                ang += 2.5e-3
            probe = (x[0] + radius * math.cos(ang), x[1] + radius * math.sin(ang))
            if _min_wall_distance(probe, self.walls) <= self.node_tol:
                continue
            values.append(self._anchor_wall_sum(probe))
        if not values:
            raise InternalInvariantError(f"no clean probe around {x}")
        return sorted(set(values))


def _angle_diff(a: float, b: float) -> float:
    d = (a - b) % (2.0 * math.pi)
    return min(d, 2.0 * math.pi - d)


def _min_wall_distance(x: Point, walls: Sequence[JumpWall]) -> float:
    best = math.inf
    for wall in walls:
        for p, q, _ in wall.segments():
            best = min(best, dist_point_segment(x, p, q))
    return best


def _default_anchor(domain: Domain, walls: Sequence[JumpWall]) -> Point:
    bx0, by0, bx1, by1 = domain.bbox
    cx, cy = 0.5 * (bx0 + bx1), 0.5 * (by0 + by1)
    scale = max(bx1 - bx0, by1 - by0)
    candidates = [(cx, cy)]
    for k in range(1, 40):
        ang = 2.39996 * k
        r = 0.011 * k * scale
        candidates.append((cx + r * math.cos(ang), cy + r * math.sin(ang)))
    for cand in candidates:
        if domain.contains(cand) and _min_wall_distance(cand, walls) > 1e-6 * scale:
            return cand
    raise ContractError("could not place a reference anchor off the walls")


def _segment_in_closure(domain: Domain, a: Point, b: Point) -> bool:
    bx0, by0, bx1, by1 = domain.bbox
    for p in (a, b):
        if not (bx0 - 1e-12 <= p[0] <= bx1 + 1e-12 and by0 - 1e-12 <= p[1] <= by1 + 1e-12):
            return False
    if domain.is_rect:
        return True
    for p in (a, b):
        if not domain.contains(p) and not any(
            on_segment(p, e0, e1) for e0, e1 in domain.edges()
        ):
            return False
    for e0, e1 in domain.edges():
        if segments_intersect(a, b, e0, e1) == "proper":
            return False
    return True


# ---------------------------------------------------------------------------
# operations


def eval_lower(F: StructuredBVField, x: Point) -> float:
    """Lower approximate limit of the field at x: smooth part plus channel
    values plus the minimum sector wall potential (on a wall, the smaller
    one-sided trace)."""
    x = (float(x[0]), float(x[1]))
    if not _in_domain_or_on_wall(F, x):
        raise DomainError(f"point {x} outside the domain")
    base = F.smooth.value(x) + sum(ch.value(x, F.depth) for ch in F.channels)
    return base + min(F._sector_wall_values(x))


def jump_size(F: StructuredBVField, x: Point) -> float:
    """Approximate jump of the field at x: 0 off the walls, |h| on a wall
    segment interior, and the net trace spread at shared wall vertices."""
    x = (float(x[0]), float(x[1]))
    if not _in_domain_or_on_wall(F, x):
        raise DomainError(f"point {x} outside the domain")
    sectors = F._sector_wall_values(x)
    return sectors[-1] - sectors[0]


def _in_domain_or_on_wall(F: StructuredBVField, x: Point) -> bool:
    if F.domain.contains(x):
        return True
    # walls may lie in the closure; allow evaluating traces on them
    return _min_wall_distance(x, F.walls) <= F.node_tol


def is_admissible_node(F: StructuredBVField, x: Point) -> bool:
    """Nodes suitable as chain endpoints: inside the domain, clear of every
    wall, and on no channel's Cantor fiber (ternary digits to the working
    depth exclude the coordinate from the Cantor set)."""
    x = (float(x[0]), float(x[1]))
    if not F.domain.contains(x):
        return False
    if _min_wall_distance(x, F.walls) <= F.node_tol:
        return False
    for ch in F.channels:
        ell = ch.ell(x)
        if 0.0 <= ell <= 1.0 and in_cantor_set(ell, F.depth):
            return False
    return True


def _channel_atom(
    ch: CantorChannel, start: Point, end: Point, t0: float, t1: float
) -> CantorAtom | None:
    """Cantor atom of one channel along one segment, or None when the
    channel is constant there.

    Endpoint reparameterization values are computed from the segment
    endpoints (not from the affine coefficients), so atoms of adjoining
    segments share bitwise-identical arguments and sums of weights
    telescope exactly along lattice paths.
    """
    length = t1 - t0
    eta = ((end[0] - start[0]) / length, (end[1] - start[1]) / length)
    dot = eta[0] * ch.nu[0] + eta[1] * ch.nu[1]
    if dot == 0.0:
        return None
    a, b = ch.band
    proj0 = start[0] * ch.nu[0] + start[1] * ch.nu[1]
    alpha = dot / (b - a)
    beta = (proj0 - a - t0 * dot) / (b - a)
    # sub-interval of [t0, t1] where the reparameterization is in [0, 1]
    tz = (0.0 - beta) / alpha
    to = (1.0 - beta) / alpha
    lo, hi = (tz, to) if tz < to else (to, tz)
    s0, s1 = max(t0, lo), min(t1, hi)
    if not s1 > s0 + 1e-15:
        return None
    ell_start = min(max(ch.ell(start), 0.0), 1.0)
    ell_end = min(max(ch.ell(end), 0.0), 1.0)
    ell0 = ell_start if s0 == t0 else (0.0 if alpha > 0 else 1.0)
    ell1 = ell_end if s1 == t1 else (1.0 if alpha > 0 else 0.0)
    return CantorAtom(s0, s1, alpha, beta, ch.weight, ell0, ell1)


def _singular_parts(
    F: StructuredBVField, chain: PolygonalChain
) -> tuple[list[tuple[float, float]], list[CantorAtom]]:
    """Jump atoms and Cantor atoms of the restriction (singular data only).

    Shared by `restrict` and `singular_weight` so that lattice edge weights
    equal variation(restrict(...), "singular") exactly.
    """
    crossings = wall_crossings(chain, [(p, q) for p, q, _ in F.wall_segments()])
    heights = [h for _, _, h in F.wall_segments()]
    jumps = [(t, sign * heights[widx]) for t, sign, widx in crossings]
    atoms: list[CantorAtom] = []
    for i in range(chain.segment_count):
        t0, t1 = chain.params[i], chain.params[i + 1]
        start, end = chain.vertices[i], chain.vertices[i + 1]
        for ch in F.channels:
            atom = _channel_atom(ch, start, end, t0, t1)
            if atom is not None:
                atoms.append(atom)
    return jumps, atoms


def restrict(F: StructuredBVField, chain: PolygonalChain) -> BVProfile:
    """Exact 1-D profile of the field along a polygonal chain.

    Affine pieces sample the smooth gradient at the two Gauss points of
    every lattice-cell chunk (exact increments, exact variation up to sign
    changes inside a chunk); jump atoms carry the signed wall heights at
    transversal crossings; Cantor atoms carry each channel's affine
    reparameterization over the sub-interval where it is active.

    Raises ChainRejected for tangential or degenerate wall contact and for
    endpoints that are not admissible.
    """
    if not is_admissible_node(F, chain.vertices[0]) or not is_admissible_node(
        F, chain.vertices[-1]
    ):
        raise ChainRejected("chain endpoint not admissible")
    jumps, atoms = _singular_parts(F, chain)

    pieces: list[tuple[float, float, float]] = []
    for i in range(chain.segment_count):
        eta = chain.direction(i)
        for c0, c1 in _cell_chunks(F.smooth, chain, i):
            mid = 0.5 * (c0 + c1)
            half = 0.5 * (c1 - c0)
            g1 = mid - half * _INV_SQRT3
            g2 = mid + half * _INV_SQRT3
            s1 = _dir_derivative(F.smooth, chain, i, g1, eta)
            s2 = _dir_derivative(F.smooth, chain, i, g2, eta)
            pieces.append((c0, mid, s1))
            pieces.append((mid, c1, s2))

    base = eval_lower(F, chain.vertices[0])
    profile = BVProfile.build(
        chain.params[0],
        chain.params[-1],
        base=base,
        pieces=pieces,
        jumps=jumps,
        cantor_atoms=atoms,
        depth=F.depth,
    )
    if not bv1d.endpoint_bound_check(profile):
        raise InternalInvariantError("restriction violates the endpoint bound")
    return profile


def _dir_derivative(
    grid: SmoothGrid, chain: PolygonalChain, i: int, t: float, eta: Point
) -> float:
    p = chain.vertices[i]
    s = t - chain.params[i]
    g = grid.gradient((p[0] + s * eta[0], p[1] + s * eta[1]))
    return g[0] * eta[0] + g[1] * eta[1]


def _cell_chunks(grid: SmoothGrid, chain: PolygonalChain, i: int) -> list[tuple[float, float]]:
    """Split segment i's parameter range at smooth-lattice line crossings."""
    t0, t1 = chain.params[i], chain.params[i + 1]
    p = chain.vertices[i]
    eta = chain.direction(i)
    cuts = {t0, t1}
    xs, ys = grid.grid_lines()
    if eta[0] != 0.0:
        for gx in xs:
            t = t0 + (gx - p[0]) / eta[0]
            if t0 < t < t1:
                cuts.add(t)
    if eta[1] != 0.0:
        for gy in ys:
            t = t0 + (gy - p[1]) / eta[1]
            if t0 < t < t1:
                cuts.add(t)
    sorted_cuts = sorted(cuts)
    out = []
    for a, b in zip(sorted_cuts, sorted_cuts[1:]):
        if b - a > 1e-13 * max(1.0, abs(t1)):
            out.append((a, b))
    if not out:
        return [(t0, t1)]
    # guard against dropped slivers leaving a gap
    out[0] = (t0, out[0][1])
    out[-1] = (out[-1][0], t1)
    return out


def singular_weight(F: StructuredBVField, p: Point, q: Point) -> float:
    """Singular variation of the field restricted to the segment p -> q,
    without building the smooth quadrature.  Same rejection rules and the
    same arithmetic as `restrict`, so the result equals
    variation(restrict(F, segment), "singular") exactly."""
    length = math.hypot(q[0] - p[0], q[1] - p[1])
    if length == 0.0:
        raise ChainRejected("zero-length segment")
    chain = PolygonalChain((p, q), (0.0, length))
    jumps, atoms = _singular_parts(F, chain)
    # replicate the profile's canonical ordering and summation order
    merged: dict[float, float] = {}
    for t, h in jumps:
        merged[t] = merged.get(t, 0.0) + h
    jump_var = sum(abs(h) for _, h in sorted(merged.items()) if abs(h) > bv1d.ATOM_EPS)
    atoms.sort(key=lambda a: (a.s0, a.s1))
    cantor_var = sum(a.variation(F.depth) for a in atoms if abs(a.weight) > bv1d.ATOM_EPS)
    return jump_var + cantor_var


def scaled(F: StructuredBVField, lam: float) -> StructuredBVField:
    """Field with all singular data (wall heights, channel weights) scaled
    by lam; the smooth part is kept as is."""
    walls = tuple(
        JumpWall(w.polyline, tuple(lam * h for h in w.heights)) for w in F.walls
    )
    channels = tuple(
        CantorChannel(c.nu, c.band, lam * c.weight) for c in F.channels
    )
    return StructuredBVField(F.domain, F.smooth, walls, channels, F.anchor, F.depth, F.node_tol)


def with_smooth(F: StructuredBVField, smooth: SmoothGrid) -> StructuredBVField:
    return StructuredBVField(F.domain, smooth, F.walls, F.channels, F.anchor, F.depth, F.node_tol)
