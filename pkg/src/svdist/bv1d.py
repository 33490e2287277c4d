"""Exact one-dimensional BV calculus on closed intervals.

A profile is a function of bounded variation decomposed into an absolutely
continuous part (contiguous affine pieces), a jump part (finitely many
signed atoms at interior parameters), and a Cantor part (weighted, affinely
reparameterized copies of the Cantor function).  All variations are closed
form: slopes times lengths, absolute jump heights, and endpoint differences
of the monotone Cantor composition.

Value assembly is incremental from the left endpoint: the value at t is

    base + sum of affine increments up to t
         + sum of jump heights at parameters < t (<= t for the right limit)
         + sum over Cantor atoms of w * (C(l(clamp(t))) - C(l(s0)))

which keeps concatenation and restriction of 2-D fields exact.  Good
representatives take one-sided limits at the interval endpoints and the
lower (minimum) one-sided limit at interior parameters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

from .cantor import DEFAULT_DEPTH, cantor_eval
from .errors import ContractError, DomainError

ATOM_EPS = 1e-15  # atoms below this magnitude are numeric dust, dropped
GLUE_EPS = 1e-12  # interval endpoints closer than this are considered equal

VariationPart = Literal["total", "ac", "jump", "cantor", "singular"]


@dataclass(frozen=True)
class CantorAtom:
    """One Cantor contribution: w * C(l(t)) on [s0, s1], constant outside.

    l(t) = alpha * t + beta is affine and maps [s0, s1] into [0, 1]; the
    composition C(l(.)) is monotone there, so the atom's variation is the
    endpoint difference |w| * |C(l(s1)) - C(l(s0))|.

    ell0/ell1 optionally pin the endpoint values of l; restrictions of 2-D
    fields compute them from the segment endpoints directly so that atoms
    of consecutive collinear segments share bitwise-identical endpoint
    arguments and their variations telescope exactly.
    """

    s0: float
    s1: float
    alpha: float
    beta: float
    weight: float
    ell0: float | None = None
    ell1: float | None = None

    def _ell0(self) -> float:
        if self.ell0 is not None:
            return self.ell0
        return min(max(self.alpha * self.s0 + self.beta, 0.0), 1.0)

    def _ell1(self) -> float:
        if self.ell1 is not None:
            return self.ell1
        return min(max(self.alpha * self.s1 + self.beta, 0.0), 1.0)

    def ell(self, t: float) -> float:
        if t <= self.s0:
            return self._ell0()
        if t >= self.s1:
            return self._ell1()
        return min(max(self.alpha * t + self.beta, 0.0), 1.0)

    def increment(self, t: float, depth: int = DEFAULT_DEPTH) -> float:
        """Accumulated contribution from s0 up to t (0 for t <= s0)."""
        return self.weight * (
            cantor_eval(self.ell(t), depth) - cantor_eval(self._ell0(), depth)
        )

    def variation(self, depth: int = DEFAULT_DEPTH) -> float:
        return abs(self.weight) * abs(
            cantor_eval(self._ell1(), depth) - cantor_eval(self._ell0(), depth)
        )


@dataclass(frozen=True)
class BVProfile:
    """Canonical 1-D BV function on [a0, am].

    pieces: contiguous (t_left, t_right, slope) triples covering [a0, am];
    jumps: (parameter, height) atoms, strictly interior, heights nonzero;
    cantor_atoms: CantorAtom instances with sub-intervals inside [a0, am].
    Immutable; all operations on profiles are pure functions.
    """

    a0: float
    am: float
    base: float
    pieces: tuple[tuple[float, float, float], ...]
    jumps: tuple[tuple[float, float], ...]
    cantor_atoms: tuple[CantorAtom, ...]
    depth: int = DEFAULT_DEPTH

    # -- construction -------------------------------------------------

    @staticmethod
    def build(
        a0: float,
        am: float,
        base: float = 0.0,
        pieces: Sequence[tuple[float, float, float]] | None = None,
        jumps: Iterable[tuple[float, float]] = (),
        cantor_atoms: Iterable[CantorAtom] = (),
        depth: int = DEFAULT_DEPTH,
    ) -> "BVProfile":
        """Validate and canonicalize raw data into a profile.

        Canonicalization drops atoms with magnitude below ATOM_EPS, merges
        jump atoms sharing a parameter, and sorts everything.
        """
        if not am > a0:
            raise ContractError(f"empty interval [{a0}, {am}]")
        if pieces is None:
            pieces = [(a0, am, 0.0)]
        pieces = [(float(t0), float(t1), float(s)) for (t0, t1, s) in pieces]
        pieces.sort(key=lambda pc: pc[0])
        if abs(pieces[0][0] - a0) > GLUE_EPS or abs(pieces[-1][1] - am) > GLUE_EPS:
            raise ContractError("ac pieces do not cover the interval")
        for (l0, r0, _), (l1, _, _) in zip(pieces, pieces[1:]):
            if abs(r0 - l1) > GLUE_EPS:
                raise ContractError(f"ac pieces not contiguous at {r0} vs {l1}")
        for t0, t1, _ in pieces:
            if not t1 > t0:
                raise ContractError(f"degenerate ac piece [{t0}, {t1}]")

        merged: dict[float, float] = {}
        for t, h in jumps:
            merged[float(t)] = merged.get(float(t), 0.0) + float(h)
        clean_jumps = tuple(
            sorted((t, h) for t, h in merged.items() if abs(h) > ATOM_EPS)
        )
        for t, _ in clean_jumps:
            if not (a0 < t < am):
                raise ContractError(f"jump parameter {t} not strictly inside")

        clean_atoms = []
        for atom in cantor_atoms:
            if abs(atom.weight) <= ATOM_EPS:
                continue
            if not (atom.s1 > atom.s0):
                raise ContractError("cantor atom with empty sub-interval")
            if atom.s0 < a0 - GLUE_EPS or atom.s1 > am + GLUE_EPS:
                raise ContractError("cantor atom outside the interval")
            lo, hi = atom.alpha * atom.s0 + atom.beta, atom.alpha * atom.s1 + atom.beta
            if min(lo, hi) < -1e-9 or max(lo, hi) > 1.0 + 1e-9:
                raise ContractError("cantor reparameterization leaves [0, 1]")
            clean_atoms.append(atom)
        clean_atoms.sort(key=lambda a: (a.s0, a.s1))

        return BVProfile(
            a0=float(a0),
            am=float(am),
            base=float(base),
            pieces=tuple(pieces),
            jumps=clean_jumps,
            cantor_atoms=tuple(clean_atoms),
            depth=depth,
        )

    @staticmethod
    def constant(a0: float, am: float, value: float) -> "BVProfile":
        return BVProfile.build(a0, am, base=value)

    @staticmethod
    def affine(a0: float, am: float, value: float, slope: float) -> "BVProfile":
        return BVProfile.build(a0, am, base=value, pieces=[(a0, am, slope)])

    # -- evaluation ----------------------------------------------------

    def breakpoints(self) -> list[float]:
        pts = {self.a0, self.am}
        for t0, t1, _ in self.pieces:
            pts.add(t0)
            pts.add(t1)
        for t, _ in self.jumps:
            pts.add(t)
        for atom in self.cantor_atoms:
            pts.add(atom.s0)
            pts.add(atom.s1)
        return sorted(pts)

    def _ac_increment(self, t: float) -> float:
        acc = 0.0
        for t0, t1, slope in self.pieces:
            if t <= t0:
                break
            acc += slope * (min(t, t1) - t0)
        return acc

    def _cantor_increment(self, t: float) -> float:
        return sum(atom.increment(t, self.depth) for atom in self.cantor_atoms)

    def value_right(self, t: float) -> float:
        """Right limit of the good representative (defined for t < am)."""
        self._check_param(t)
        jump_sum = sum(h for tj, h in self.jumps if tj <= t)
        return self.base + self._ac_increment(t) + jump_sum + self._cantor_increment(t)

    def value_left(self, t: float) -> float:
        """Left limit of the good representative (defined for t > a0)."""
        self._check_param(t)
        jump_sum = sum(h for tj, h in self.jumps if tj < t)
        return self.base + self._ac_increment(t) + jump_sum + self._cantor_increment(t)

    def _check_param(self, t: float) -> None:
        if t < self.a0 - GLUE_EPS or t > self.am + GLUE_EPS:
            raise DomainError(f"parameter {t} outside [{self.a0}, {self.am}]")

    def endpoint_values(self) -> tuple[float, float]:
        """One-sided limits at the interval endpoints."""
        return self.value_right(self.a0), self.value_left(self.am)

    def to_dict(self) -> dict:
        return {
            "interval": [self.a0, self.am],
            "base": self.base,
            "pieces": [list(p) for p in self.pieces],
            "jumps": [list(j) for j in self.jumps],
            "cantor_atoms": [
                {
                    "sub_interval": [a.s0, a.s1],
                    "alpha": a.alpha,
                    "beta": a.beta,
                    "weight": a.weight,
                }
                for a in self.cantor_atoms
            ],
        }


def lower_limit(p: BVProfile, t: float) -> float:
    """Lower approximate limit of the good representative at t.

    Interior parameters take min(left limit, right limit); the endpoints
    have only their one-sided limit.
    """
    if abs(t - p.a0) <= GLUE_EPS:
        return p.value_right(p.a0)
    if abs(t - p.am) <= GLUE_EPS:
        return p.value_left(p.am)
    return min(p.value_left(t), p.value_right(t))


def variation(p: BVProfile, part: VariationPart = "total") -> float:
    """Variation of the requested part of the derivative over (a0, am).

    ac = sum |slope| * length; jump = sum |h|; cantor = closed-form endpoint
    differences of the monotone Cantor compositions; singular = jump +
    cantor; total = ac + singular.
    """
    if part == "ac":
        return sum(abs(s) * (t1 - t0) for t0, t1, s in p.pieces)
    if part == "jump":
        return sum(abs(h) for _, h in p.jumps)
    if part == "cantor":
        return sum(atom.variation(p.depth) for atom in p.cantor_atoms)
    if part == "singular":
        return variation(p, "jump") + variation(p, "cantor")
    if part == "total":
        # left-associated so that total == ac + jump + cantor exactly
        return variation(p, "ac") + variation(p, "jump") + variation(p, "cantor")
    raise ContractError(f"unknown variation part {part!r}")


def singular_variation_between(p: BVProfile, t1: float, t2: float) -> float:
    """Singular variation of p over the open interval (t1, t2).

    This is the one-dimensional singular vertical distance: the only chain
    joining two parameters of an interval is the interval between them.
    """
    lo, hi = (t1, t2) if t1 <= t2 else (t2, t1)
    p._check_param(lo)
    p._check_param(hi)
    jump = sum(abs(h) for t, h in p.jumps if lo < t < hi)
    cantor = 0.0
    for atom in p.cantor_atoms:
        a, b = max(atom.s0, lo), min(atom.s1, hi)
        if b > a:
            cantor += abs(atom.weight) * abs(
                cantor_eval(atom.ell(b), p.depth) - cantor_eval(atom.ell(a), p.depth)
            )
    return jump + cantor


def endpoint_bound_check(p: BVProfile) -> bool:
    """Whether |value(am) - value(a0)| <= total variation.

    True for every canonical profile up to floating-point roundoff; used as
    a runtime assertion by consumers (a False return indicates a bug).
    """
    v0, v1 = p.endpoint_values()
    tv = variation(p, "total")
    return abs(v1 - v0) <= tv + 1e-12 * (1.0 + tv)


def concat(p1: BVProfile, p2: BVProfile, junction_jump: float = 0.0) -> BVProfile:
    """Glue two profiles over adjacent intervals.

    p2 is re-based so that its start value equals p1's end value plus
    junction_jump; a jump atom of that height appears at the junction when
    nonzero.  Total variation is additive plus |junction_jump|.
    """
    if abs(p1.am - p2.a0) > GLUE_EPS:
        raise ContractError(
            f"intervals do not meet: [{p1.a0}, {p1.am}] then [{p2.a0}, {p2.am}]"
        )
    jumps = list(p1.jumps)
    if abs(junction_jump) > ATOM_EPS:
        jumps.append((p1.am, junction_jump))
    jumps.extend(p2.jumps)
    return BVProfile.build(
        p1.a0,
        p2.am,
        base=p1.base,
        pieces=list(p1.pieces) + list(p2.pieces),
        jumps=jumps,
        cantor_atoms=list(p1.cantor_atoms) + list(p2.cantor_atoms),
        depth=max(p1.depth, p2.depth),
    )
