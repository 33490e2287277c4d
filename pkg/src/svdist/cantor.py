"""Cantor-Lebesgue function ("devil's staircase") evaluation.

All singular Cantor-type data in the package is expressed through weighted,
affinely reparameterized copies of the standard Cantor function C, so this
module is the single numeric kernel for that part: point evaluation by
ternary-digit consumption, membership in the middle-thirds Cantor set, and
integration of affine densities against the Cantor measure.

The digit algorithm returns dyadic rationals (sums of powers of 1/2 down to
2^-depth), so differences and sums of returned values of moderate magnitude
are exact in double precision.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .errors import DomainError

DEFAULT_DEPTH = 40  # absolute error 2^-40 ~ 9.1e-13, below comparison tolerances


@lru_cache(maxsize=65536)
def cantor_eval(x: "float | Fraction", depth: int = DEFAULT_DEPTH) -> float:
    """Cantor function C(x) on [0, 1] with absolute error <= 2^-depth.

    Consumes up to `depth` ternary digits of x, emitting binary ones.
    Digits are extracted in exact integer arithmetic (a float is an exact
    dyadic rational; pass a Fraction for non-dyadic rationals such as 1/3),
    so the only error is the final truncation; inside a removed middle
    third the flat value is returned exactly.  Monotone nondecreasing in x
    at fixed depth; C(0) = 0 and C(1) = 1 exactly.
    """
    if depth < 1:
        raise DomainError(f"depth must be >= 1, got {depth}")
    if x < 0.0 or x > 1.0:
        raise DomainError(f"cantor_eval argument {x!r} outside [0, 1]")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    frac = Fraction(x)
    num, den = frac.numerator, frac.denominator
    value = 0.0
    half = 0.5
    for _ in range(depth):
        num *= 3
        if num >= 2 * den:
            value += half
            num -= 2 * den
        elif num >= den:
            # digit 1: a removed middle third (or its right edge), flat value
            return value + half
        half *= 0.5
    return value


def in_cantor_set(x: "float | Fraction", depth: int = DEFAULT_DEPTH) -> bool:
    """True when x cannot be excluded from the middle-thirds Cantor set
    after inspecting `depth` exact ternary digits.

    Points outside [0, 1] are never in the set.  A strict interior digit 1
    excludes x; a terminating digit 1 (remainder exactly 0) is an endpoint
    of a removed interval, which belongs to the set.
    """
    if x < 0.0 or x > 1.0:
        return False
    frac = Fraction(x)
    num, den = frac.numerator, frac.denominator
    for _ in range(depth):
        num *= 3
        if num >= 2 * den:
            num -= 2 * den
        elif num > den:
            return False
        elif num == den:
            return True
        # else digit 0: keep the remainder
    return True


def cantor_affine_integral(
    p: float, q: float, lo: float, hi: float, depth: int = 24
) -> float:
    """Integral of the affine density s -> p + q*s over [lo, hi] against the
    Cantor measure (the Stieltjes measure of C restricted to [0, 1]).

    Uses the self-similarity mu(A) = mu(3A)/2 + mu(3A - 2)/2 recursively;
    at the depth cutoff the remaining mass is assigned the interval's
    midpoint density.  Absolute error is O(2^-depth) * |q|.
    """
    lo = max(0.0, lo)
    hi = min(1.0, hi)
    if hi <= lo:
        return 0.0

    def rec(p_: float, q_: float, a: float, b: float, d: int) -> float:
        if b <= 0.0 or a >= 1.0 or b <= a:
            return 0.0
        a = max(a, 0.0)
        b = min(b, 1.0)
        if a == 0.0 and b == 1.0:
            return p_ + 0.5 * q_  # the Cantor measure has mean 1/2
        if d == 0:
            mass = cantor_eval(b) - cantor_eval(a)
            return mass * (p_ + 0.5 * q_ * (a + b))
        # left copy: s = s'/3, density p_ + q_*s'/3, half the mass
        left = rec(p_, q_ / 3.0, 3.0 * a, 3.0 * b, d - 1)
        # right copy: s = (2 + s')/3
        right = rec(p_ + 2.0 * q_ / 3.0, q_ / 3.0, 3.0 * a - 2.0, 3.0 * b - 2.0, d - 1)
        return 0.5 * (left + right)

    return rec(p, q, lo, hi, depth)
