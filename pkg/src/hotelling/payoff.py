"""Market shares in the linear city.

Two independent routes compute a vendor's payoff: the closed form, which
splits each co-located block's Voronoi cell equally among its members, and
a midpoint-rule integration of the nearest-vendor density, evaluated
exactly on integer-scaled coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import _kernels
from .core import ONE, ZERO, Profile, RatLike, as_location, as_rat, check_vendor, format_rat


@dataclass(frozen=True)
class PayoffVector:
    values: tuple[Fraction, ...]

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def f(self, k: int) -> Fraction:
        """Payoff of vendor ``k`` (1-based)."""
        check_vendor(k, len(self.values))
        return self.values[k - 1]

    def total(self) -> Fraction:
        return sum(self.values, ZERO)

    def to_strings(self) -> list[str]:
        return [format_rat(v) for v in self.values]


@dataclass(frozen=True)
class TieSet:
    y: Fraction
    indices: frozenset[int]

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, k: int) -> bool:
        return k in self.indices


def _positions(loc) -> tuple[Fraction, ...]:
    if isinstance(loc, Profile):
        return loc.positions
    return as_location(loc)


def tie_set(loc: Profile | Sequence[RatLike], y: RatLike) -> TieSet:
    """Vendors (1-based) at minimum distance from customer ``y``."""
    pos = _positions(loc)
    y = as_rat(y)
    if not ZERO <= y <= ONE:
        raise ValueError(f"customer point {format_rat(y)} lies outside [0, 1]")
    dist = [abs(x - y) for x in pos]
    best = min(dist)
    return TieSet(y, frozenset(i + 1 for i, d in enumerate(dist) if d == best))


def density(loc: Profile | Sequence[RatLike], k: int, y: RatLike) -> Fraction:
    """Share of the demand at ``y`` captured by vendor ``k``."""
    pos = _positions(loc)
    check_vendor(k, len(pos))
    ties = tie_set(pos, y)
    if k not in ties:
        return ZERO
    return Fraction(1, len(ties))


def block_shares(sorted_positions: Sequence[Fraction]) -> list[tuple[Fraction, int, Fraction]]:
    """``(position, multiplicity, per-member payoff)`` for each block of a sorted location.

    A block's market runs from 0 (or the midpoint to the previous block) to 1
    (or the midpoint to the next block).
    """
    nums, denom = scale_to_integers(sorted_positions)
    pts: list[int] = []
    mult: list[int] = []
    for x in nums:
        if pts and pts[-1] == x:
            mult[-1] += 1
        else:
            pts.append(x)
            mult.append(1)
    # doubled coordinates keep the midpoints integral
    scale = 2 * denom
    out = []
    last = len(pts) - 1
    for b, x in enumerate(pts):
        left = 0 if b == 0 else pts[b - 1] + x
        right = scale if b == last else x + pts[b + 1]
        out.append((Fraction(x, denom), mult[b], Fraction(right - left, scale * mult[b])))
    return out


def payoff_closed_form(loc: Profile | Sequence[RatLike]) -> PayoffVector:
    """Exact payoffs of every vendor, in the order of ``loc``."""
    pos = _positions(loc)
    n = len(pos)
    order = range(n) if isinstance(loc, Profile) else sorted(range(n), key=pos.__getitem__)
    out: list[Fraction] = [ZERO] * n
    members = iter(order)
    for _, mult, share in block_shares([pos[i] for i in order]):
        for _ in range(mult):
            out[next(members)] = share
    return PayoffVector(tuple(out))


def payoff_of(loc: Profile | Sequence[RatLike], k: int) -> Fraction:
    """Exact payoff of vendor ``k`` (1-based) in an arbitrary-order location."""
    pos = _positions(loc)
    check_vendor(k, len(pos))
    return _payoff_at(pos, k)


def _payoff_at(pos: Sequence[Fraction], k: int) -> Fraction:
    """:func:`payoff_of` without input validation, for already-checked locations."""
    nums, denom = scale_to_integers(pos)
    x = nums[k - 1]
    cnt = 0
    lo = hi = None
    for q in nums:
        if q == x:
            cnt += 1
        elif q < x:
            if lo is None or q > lo:
                lo = q
        elif hi is None or q < hi:
            hi = q
    # doubled coordinates: market ends are the midpoints lo + x and x + hi
    left = 0 if lo is None else lo + x
    right = 2 * denom if hi is None else x + hi
    return Fraction(right - left, 2 * denom * cnt)


def scale_to_integers(pos: Sequence[Fraction]) -> tuple[list[int], int]:
    """Numerators over the least common denominator of ``pos``."""
    denom = math.lcm(*(x.denominator for x in pos))
    return [x.numerator * (denom // x.denominator) for x in pos], denom


def payoff_numeric(
    loc: Profile | Sequence[RatLike], k: int, m: int, backend: str | None = None
) -> Fraction:
    """Midpoint-rule estimate of vendor ``k``'s payoff with ``m`` cells.

    Evaluates ``(1/m) * sum_j rho_k((2j+1)/(2m))`` exactly; ties at sample
    points are resolved by exact integer comparison.  The error against the
    closed form is at most ``n/m``.
    """
    pos = _positions(loc)
    check_vendor(k, len(pos))
    if m < 1:
        raise ValueError("the number of cells must be at least 1")
    nums, denom = scale_to_integers(pos)
    counts = _kernels.tie_counts(nums, k - 1, m, denom, backend=backend)
    total = sum((Fraction(int(c), s) for s, c in enumerate(counts) if s and c), ZERO)
    return total / m
