"""Construct equilibrium profiles for four or more vendors.

An equilibrium is determined by its gap lengths: edge gaps ``a``, zero
gaps next to them (the outer pairs), gaps ``2a`` after the pairs, and free
interior gaps ``L_3..L_{n-3}`` in ``[0, 2a]`` whose consecutive sums are at
least ``2a``.  Everything here is exact; sampling draws lengths from a fixed
rational grid.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .core import ZERO, Profile

DEFAULT_GRID = 840
MAX_RETRIES = 1000


class InfeasibleError(ValueError):
    pass


@dataclass(frozen=True)
class LengthSystem:
    """Free parameters of an equilibrium: edge gap ``a`` and the interior gaps."""

    n: int
    a: Fraction
    interior: tuple[Fraction, ...] = ()

    def __post_init__(self):
        n, a, inner = self.n, self.a, self.interior
        if n < 4:
            raise InfeasibleError(f"length systems need n >= 4, got {n}")
        if not a > 0:
            raise InfeasibleError("the edge gap must be positive")
        if len(inner) != max(0, n - 5):
            raise InfeasibleError(f"n = {n} needs {max(0, n - 5)} interior lengths, got {len(inner)}")
        full = self.lengths()
        if any(x < 0 or x > 2 * a for x in full):
            raise InfeasibleError("every gap must lie in [0, 2a]")
        if any(full[k] + full[k + 1] < 2 * a for k in range(1, n - 1)):
            raise InfeasibleError("consecutive interior gaps must sum to at least 2a")
        if sum(full, ZERO) != 1:
            raise InfeasibleError(f"gaps sum to {sum(full, ZERO)}, not 1")

    def lengths(self) -> tuple[Fraction, ...]:
        """All ``n + 1`` gaps ``L_0..L_n``."""
        a = self.a
        if self.n == 4:
            return (a, ZERO, 2 * a, ZERO, a)
        return (a, ZERO, 2 * a, *self.interior, 2 * a, ZERO, a)


def lengths_to_profile(system: LengthSystem) -> Profile:
    """Positions are prefix sums of the gaps, dropping the final boundary."""
    pos = []
    acc = ZERO
    for gap in system.lengths()[:-1]:
        acc += gap
        pos.append(acc)
    return Profile(tuple(pos))


def canonical_equilibrium(n: int) -> Profile:
    """Outer pairs at ``a`` and ``1 - a``, singles ``2a`` apart, ``a = 1/(2n - 4)``."""
    if n < 4:
        raise InfeasibleError(f"canonical equilibria exist for n >= 4, got {n}")
    a = Fraction(1, 2 * n - 4)
    return lengths_to_profile(LengthSystem(n, a, (2 * a,) * (n - 5)))


def edge_gap_range(n: int) -> tuple[Fraction, Fraction]:
    """Smallest and largest feasible edge gap ``a``.

    With ``r = n - 5`` interior gaps the interior total ``1 - 6a`` ranges
    from ``2a * (r // 2)`` (alternating 0 and 2a) up to ``2a * r``.
    """
    if n < 4:
        raise InfeasibleError(f"no equilibrium family for n = {n}")
    if n == 4:
        return Fraction(1, 4), Fraction(1, 4)
    r = n - 5
    return Fraction(1, 6 + 2 * r), Fraction(1, 6 + 2 * (r // 2))


def _draw_interior(rng: random.Random, r: int, A: int, total: int) -> list[int] | None:
    """Integer gaps ``l_1..l_r`` in ``[0, 2A]``, consecutive sums ``>= 2A``, summing to ``total``.

    The gap before ``l_1`` and after ``l_r`` is ``2A``.  Returns ``None`` on
    a dead end so the caller can redraw.
    """
    out: list[int] = []
    prev = 2 * A
    remaining = total
    for j in range(r - 1):
        rest = r - j - 1
        lo = max(0, 2 * A - prev, remaining - 2 * A * rest)
        hi = min(2 * A, remaining)
        if rest % 2 == 0:
            # the rest can be as small as A * rest whatever this gap is
            hi = min(hi, remaining - A * rest)
        elif remaining < 2 * A * (rest // 2 + 1):
            return None
        if lo > hi:
            return None
        gap = rng.randint(lo, hi)
        out.append(gap)
        remaining -= gap
        prev = gap
    # final gap takes whatever is left
    if not (max(0, 2 * A - prev) <= remaining <= 2 * A):
        return None
    out.append(remaining)
    return out


def sample_equilibria(n: int, count: int, seed: int, grid: int = DEFAULT_GRID) -> list[Profile]:
    """Draw ``count`` equilibrium profiles, reproducibly from ``seed``.

    The edge gap is uniform over grid points in the feasible range, then the
    interior gaps are drawn one at a time within the range that keeps the
    remainder feasible, the last one fixed by the exact total.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if n < 4:
        raise InfeasibleError(f"no equilibrium exists for n={n}" if n == 3
                              else f"synthesis covers n >= 4, got {n}")
    lo, hi = edge_gap_range(n)
    denom = math.lcm(grid, lo.denominator, hi.denominator)
    a_lo, a_hi = int(lo * denom), int(hi * denom)
    rng = random.Random(seed)
    r = max(0, n - 5)
    out = []
    for _ in range(count):
        for _ in range(MAX_RETRIES):
            A = rng.randint(a_lo, a_hi)
            inner = _draw_interior(rng, r, A, denom - 6 * A) if r else []
            if inner is not None:
                break
        else:
            raise InfeasibleError(f"no feasible draw after {MAX_RETRIES} attempts (n={n})")
        system = LengthSystem(n, Fraction(A, denom), tuple(Fraction(g, denom) for g in inner))
        out.append(lengths_to_profile(system))
    return out


def enumerate_length_grid(n: int, denom: int) -> Iterator[tuple[int, ...]]:
    """All ways to split ``denom`` into ``n + 1`` nonnegative integer gaps."""
    slots = denom + n
    for bars in itertools.combinations(range(slots), n):
        edges = (-1, *bars, slots)
        yield tuple(b - a - 1 for a, b in zip(edges, edges[1:]))


def gaps_to_positions(gaps: Sequence[int]) -> list[int]:
    """Integer positions (prefix sums) for integer gaps, final boundary dropped."""
    return list(itertools.accumulate(gaps[:-1]))
