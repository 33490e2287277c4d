"""Discrete essential-disconnection and positivity-set topology.

Borel sets become finite cell sets on a lattice; the measure-theoretic
condition "the interface of some nontrivial partition lies inside K" is
replaced by its combinatorial surrogate: removing every cell-adjacency
interface covered by K splits the cell graph.  The surrogate is exact for
the structured model, whose candidate partitions have polygonal interfaces.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

from .bv1d import BVProfile, lower_limit
from .bvfield import StructuredBVField, eval_lower
from .errors import ContractError

ZERO_TOL = 1e-12

Cell = tuple[int, int]
Interface = tuple[int, int, int]  # (i, j, axis): axis 0 joins (i,j)-(i+1,j)


@dataclass(frozen=True)
class CellSet:
    """Finite set of lattice cells, with optional explicit interfaces
    (used for thin, measure-zero separating sets such as zero lines)."""

    origin: tuple[float, float]
    resolution: float
    cells: frozenset[Cell]
    interfaces: frozenset[Interface] = field(default_factory=frozenset)

    def cell_center(self, c: Cell) -> tuple[float, float]:
        return (
            self.origin[0] + (c[0] + 0.5) * self.resolution,
            self.origin[1] + (c[1] + 0.5) * self.resolution,
        )

    def interface_midpoint(self, itf: Interface) -> tuple[float, float]:
        i, j, axis = itf
        x0, y0 = self.origin
        r = self.resolution
        if axis == 0:
            return (x0 + (i + 1) * r, y0 + (j + 0.5) * r)
        return (x0 + (i + 0.5) * r, y0 + (j + 1) * r)

    def components(self, blocked: frozenset[Interface] = frozenset()) -> list[set[Cell]]:
        """Connected components of the 4-adjacency graph, ignoring blocked
        interfaces."""
        seen: set[Cell] = set()
        out: list[set[Cell]] = []
        for start in sorted(self.cells):
            if start in seen:
                continue
            comp = {start}
            stack = [start]
            seen.add(start)
            while stack:
                i, j = stack.pop()
                for di, dj, itf in (
                    (1, 0, (i, j, 0)),
                    (-1, 0, (i - 1, j, 0)),
                    (0, 1, (i, j, 1)),
                    (0, -1, (i, j - 1, 1)),
                ):
                    nbr = (i + di, j + dj)
                    if nbr in self.cells and nbr not in seen and itf not in blocked:
                        seen.add(nbr)
                        comp.add(nbr)
                        stack.append(nbr)
            out.append(comp)
        return out

    def rle(self) -> dict:
        """Run-length encoding by rows, for the JSON report schema."""
        if not self.cells:
            return {"origin": list(self.origin), "resolution": self.resolution, "rows": {}}
        rows: dict[str, list[list[int]]] = {}
        by_row: dict[int, list[int]] = {}
        for i, j in self.cells:
            by_row.setdefault(j, []).append(i)
        for j, cols in sorted(by_row.items()):
            cols.sort()
            runs = []
            start = prev = cols[0]
            for i in cols[1:]:
                if i == prev + 1:
                    prev = i
                else:
                    runs.append([start, prev - start + 1])
                    start = prev = i
            runs.append([start, prev - start + 1])
            rows[str(j)] = runs
        return {"origin": list(self.origin), "resolution": self.resolution, "rows": rows}

    def to_pgm(self) -> bytes:
        """8-bit PGM bitmap of the cell mask (filled = white)."""
        if not self.cells:
            return b"P5\n1 1\n255\n\x00"
        imin = min(c[0] for c in self.cells)
        imax = max(c[0] for c in self.cells)
        jmin = min(c[1] for c in self.cells)
        jmax = max(c[1] for c in self.cells)
        w, h = imax - imin + 1, jmax - jmin + 1
        img = bytearray(w * h)
        for i, j in self.cells:
            img[(jmax - j) * w + (i - imin)] = 255
        return b"P5\n%d %d\n255\n" % (w, h) + bytes(img)


def essentially_disconnects(K: CellSet, G: CellSet) -> bool:
    """Combinatorial essential disconnection: removing every interface
    covered by K (explicitly listed, or touching a K-cell) splits G's
    adjacency graph into two or more parts of positive cell count."""
    if not G.cells:
        raise ContractError("G must be nonempty")
    blocked = set(K.interfaces)
    for i, j in K.cells:
        blocked.update(
            ((i, j, 0), (i - 1, j, 0), (i, j, 1), (i, j - 1, 1))
        )
    comps = G.components(frozenset(blocked))
    return len(comps) >= 2


def field_cellsets(
    v: StructuredBVField, resolution: float, tol: float = ZERO_TOL
) -> tuple[CellSet, CellSet]:
    """(K, G) for a field: G collects the cells where the field is positive
    at the center; K collects zero cells plus zero interfaces (midpoint
    value at or below tol), catching measure-zero zero lines."""
    bx0, by0, bx1, by1 = v.domain.bbox
    nx = max(1, int(round((bx1 - bx0) / resolution)))
    ny = max(1, int(round((by1 - by0) / resolution)))
    gcells: set[Cell] = set()
    kcells: set[Cell] = set()
    kinterfaces: set[Interface] = set()

    def val(p) -> float | None:
        if not v.domain.contains(p):
            return None
        return eval_lower(v, p)

    for j in range(ny):
        for i in range(nx):
            c = (bx0 + (i + 0.5) * resolution, by0 + (j + 0.5) * resolution)
            x = val(c)
            if x is None:
                continue
            if x > tol:
                gcells.add((i, j))
            else:
                kcells.add((i, j))
    for j in range(ny):
        for i in range(nx):
            for axis, mid in (
                (0, (bx0 + (i + 1) * resolution, by0 + (j + 0.5) * resolution)),
                (1, (bx0 + (i + 0.5) * resolution, by0 + (j + 1) * resolution)),
            ):
                x = val(mid)
                if x is not None and x <= tol:
                    kinterfaces.add((i, j, axis))
    origin = (bx0, by0)
    return (
        CellSet(origin, resolution, frozenset(kcells), frozenset(kinterfaces)),
        CellSet(origin, resolution, frozenset(gcells)),
    )


# ---------------------------------------------------------------------------
# one-dimensional positivity sets


@dataclass(frozen=True)
class PositivitySet1D:
    ok: bool
    interval: tuple[float, float] | None
    witness: float | None
    samples: int
    positive_fraction: float

    def to_dict(self) -> dict:
        return {
            "single_open_interval": self.ok,
            "interval": list(self.interval) if self.interval else None,
            "witness": self.witness,
            "samples": self.samples,
            "positive_fraction": self.positive_fraction,
        }


def positivity_set_1d(
    v: BVProfile, samples: int = 4096, tol: float = ZERO_TOL
) -> PositivitySet1D:
    """Structure of {v > 0} for a nonnegative 1-D profile.

    A zero point with positive mass of {v > 0} strictly on both sides
    witnesses that the zero set essentially disconnects the positivity set
    (the hypothesis fails); otherwise the positivity set is a single open
    interval and its sampled endpoints are returned.
    """
    ts = [v.a0 + (v.am - v.a0) * k / samples for k in range(samples + 1)]
    vals = [lower_limit(v, t) for t in ts]
    if min(vals) < -1e-9:
        raise ContractError("profile takes negative values")
    positive = [x > tol for x in vals]
    if not any(positive):
        return PositivitySet1D(True, None, None, samples + 1, 0.0)
    first = positive.index(True)
    last = len(positive) - 1 - positive[::-1].index(True)
    for k in range(first + 1, last):
        if not positive[k]:
            return PositivitySet1D(
                False, None, ts[k], samples + 1, sum(positive) / len(positive)
            )
    return PositivitySet1D(
        True, (ts[first], ts[last]), None, samples + 1, sum(positive) / len(positive)
    )


# ---------------------------------------------------------------------------
# dense-ball complement generator


@dataclass(frozen=True)
class DenseBallReport:
    count: int
    seed: int
    epsilon: float
    radii_sum_bound: float  # 2*pi*sum(r_h), must be <= 1
    summability_ok: bool
    union_area_bound: float  # sum pi r^2, must be <= epsilon
    area_bound_ok: bool
    union_area_estimate: float
    interior_probe_failures: int
    complement: CellSet

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "seed": self.seed,
            "epsilon": self.epsilon,
            "radii_sum_bound": self.radii_sum_bound,
            "summability_ok": self.summability_ok,
            "union_area_bound": self.union_area_bound,
            "area_bound_ok": self.area_bound_ok,
            "union_area_estimate": self.union_area_estimate,
            "interior_probe_failures": self.interior_probe_failures,
            "complement_cells": len(self.complement.cells),
        }


def dense_ball_complement(
    count: int,
    seed: int,
    epsilon: float,
    resolution: int = 128,
    radii: list[float] | None = None,
) -> DenseBallReport:
    """Closure of the unit disk minus a union of small balls around a
    pseudo-dense center sequence.

    The radii satisfy 2*pi*sum(r_h) <= 1 (so the complement keeps finite
    perimeter below 1) and sum(pi r_h^2) <= epsilon (so the removed mass is
    small); both bounds are verified numerically and reported.  The
    genuinely empty interior of the limiting complement cannot be certified
    at finite count: cells that fail to meet any ball are counted and
    reported, not asserted away.
    """
    if count < 1:
        raise ContractError("count must be >= 1")
    if not 0.0 < epsilon < math.pi:
        raise ContractError("epsilon must lie in (0, area of the unit disk)")
    rng = random.Random(seed)
    centers = []
    for _ in range(count):
        r = math.sqrt(rng.random())
        phi = 2.0 * math.pi * rng.random()
        centers.append((r * math.cos(phi), r * math.sin(phi)))
    if radii is None:
        q = 0.995
        geo1 = (1.0 - q ** count) / (1.0 - q)
        geo2 = (1.0 - q ** (2 * count)) / (1.0 - q * q)
        r0 = 0.999 * min(
            1.0 / (2.0 * math.pi) / geo1, math.sqrt(epsilon / (math.pi * geo2))
        )
        radii = [r0 * q ** h for h in range(count)]
    if len(radii) != count:
        raise ContractError("one radius per ball required")
    sum_bound = 2.0 * math.pi * sum(radii)
    area_bound = math.pi * sum(r * r for r in radii)
    summability_ok = sum_bound <= 1.0
    area_ok = area_bound <= epsilon
    if not summability_ok:
        raise ContractError(
            f"perimeter summability bound violated: 2*pi*sum(r) = {sum_bound} > 1"
        )
    if not area_ok:
        raise ContractError(
            f"ball union area bound violated: sum(pi r^2) = {area_bound} > {epsilon}"
        )

    # grid mask over [-1, 1]^2
    n = resolution
    h = 2.0 / n
    xs = -1.0 + (np.arange(n) + 0.5) * h
    cx, cy = np.meshgrid(xs, xs, indexing="ij")
    covered = np.zeros((n, n), dtype=bool)
    for (px, py), r in zip(centers, radii):
        i0 = max(0, int((px - r + 1.0) / h) - 1)
        i1 = min(n, int((px + r + 1.0) / h) + 2)
        j0 = max(0, int((py - r + 1.0) / h) - 1)
        j1 = min(n, int((py + r + 1.0) / h) + 2)
        if i0 >= i1 or j0 >= j1:
            continue
        sub = (cx[i0:i1, j0:j1] - px) ** 2 + (cy[i0:i1, j0:j1] - py) ** 2 <= r * r
        covered[i0:i1, j0:j1] |= sub
    in_disk = cx ** 2 + cy ** 2 <= 1.0
    est_area = float(np.count_nonzero(covered & in_disk)) * h * h
    kcells = frozenset(
        (int(i), int(j))
        for i, j in zip(*np.nonzero(in_disk & ~covered))
    )
    complement = CellSet((-1.0, -1.0), h, kcells)

    # interior probe: cells whose full 3x3 neighbourhood avoids every ball
    # center mask, checked against exact rectangle-disk contact
    failures = 0
    neigh = {(di, dj) for di in (-1, 0, 1) for dj in (-1, 0, 1)}
    for i, j in sorted(kcells):
        if not all((i + di, j + dj) in kcells for di, dj in neigh):
            continue
        x0, y0 = -1.0 + i * h, -1.0 + j * h
        touches = False
        for (px, py), r in zip(centers, radii):
            qx = min(max(px, x0), x0 + h)
            qy = min(max(py, y0), y0 + h)
            if (qx - px) ** 2 + (qy - py) ** 2 <= r * r:
                touches = True
                break
        if not touches:
            failures += 1
    return DenseBallReport(
        count,
        seed,
        epsilon,
        sum_bound,
        summability_ok,
        area_bound,
        area_ok,
        est_area,
        failures,
        complement,
    )


# ---------------------------------------------------------------------------
# open-set candidate from the positivity structure


@dataclass(frozen=True)
class OmegaCandidate:
    cells: CellSet
    connected: bool
    component_count: int

    def to_dict(self) -> dict:
        return {
            "cell_count": len(self.cells.cells),
            "connected": self.connected,
            "component_count": self.component_count,
        }


def omega_candidate(
    v: StructuredBVField, resolution: float, tol: float = ZERO_TOL
) -> OmegaCandidate:
    """Cells whose closed neighbourhood stays clear of the zero set of the
    lower limit: the discrete candidate for the complement of the closure
    of {v = 0}, with its connectivity cross-check."""
    bx0, by0, bx1, by1 = v.domain.bbox
    nx = max(1, int(round((bx1 - bx0) / resolution)))
    ny = max(1, int(round((by1 - by0) / resolution)))

    def positive_probe(i: int, j: int) -> bool:
        cx0, cy0 = bx0 + i * resolution, by0 + j * resolution
        for fx in (0.0, 0.5, 1.0):
            for fy in (0.0, 0.5, 1.0):
                p = (cx0 + fx * resolution, cy0 + fy * resolution)
                p = (
                    min(max(p[0], bx0 + 1e-12), bx1 - 1e-12),
                    min(max(p[1], by0 + 1e-12), by1 - 1e-12),
                )
                if not v.domain.contains(p):
                    return False
                if eval_lower(v, p) <= tol:
                    return False
        return True

    clear = [[positive_probe(i, j) for j in range(ny)] for i in range(nx)]
    kept: set[Cell] = set()
    for i in range(nx):
        for j in range(ny):
            if not clear[i][j]:
                continue
            ok = True
            for di in (-1, 0, 1):
                for dj in (-1, 0, 1):
                    ii, jj = i + di, j + dj
                    if 0 <= ii < nx and 0 <= jj < ny and not clear[ii][jj]:
                        ok = False
            if ok:
                kept.add((i, j))
    cs = CellSet((bx0, by0), resolution, frozenset(kept))
    comps = cs.components()
    return OmegaCandidate(cs, len(comps) <= 1, len(comps))
