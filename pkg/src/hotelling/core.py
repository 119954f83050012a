"""Exact numbers and the geometry of the linear city.

Every scalar (position, length, payoff) is a :class:`fractions.Fraction`.
Vendor indices in the public API are 1-based, matching the usual
``x_1 <= ... <= x_n`` labelling of a sorted profile.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rat = Fraction
RatLike = Union[Fraction, int, str]

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)

_RATIO_RE = re.compile(r"^([+-]?\d+)/(\d+)$")
_DECIMAL_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)$")


class ParseError(ValueError):
    """Raised for text that is not a rational ``p/q`` or a finite decimal."""


def parse_rat(text: str, max_denominator: int | None = None) -> Fraction:
    """Parse ``"p/q"`` or a finite decimal such as ``"0.3"`` exactly.

    >>> parse_rat("4/8")
    Fraction(1, 2)
    >>> parse_rat("0.3")
    Fraction(3, 10)
    """
    s = text.strip()
    m = _RATIO_RE.match(s)
    if m:
        num, den = int(m.group(1)), int(m.group(2))
        if den == 0:
            raise ParseError(f"zero denominator in {text!r}")
        value = Fraction(num, den)
    elif _DECIMAL_RE.match(s):
        value = Fraction(s)
    else:
        raise ParseError(f"not a rational number: {text!r}")
    if max_denominator is not None and value.denominator > max_denominator:
        raise ParseError(
            f"denominator of {text!r} exceeds the cap {max_denominator}"
        )
    return value


def format_rat(value: Fraction) -> str:
    """Canonical ``p/q`` text; integers keep the ``/1``."""
    if type(value) is not Fraction:
        value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def as_rat(value: RatLike) -> Fraction:
    if type(value) is Fraction:
        return value
    if isinstance(value, str):
        return parse_rat(value)
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass a Fraction or a string")
    return Fraction(value)


def as_location(values: Iterable[RatLike]) -> tuple[Fraction, ...]:
    """Convert an arbitrary-order location vector, checking each entry is in [0, 1]."""
    loc = tuple(as_rat(v) for v in values)
    for v in loc:
        if not ZERO <= v <= ONE:
            raise ValueError(f"position {format_rat(v)} lies outside [0, 1]")
    return loc


@dataclass(frozen=True)
class Profile:
    """Sorted locations of ``n >= 2`` vendors on ``[0, 1]``.

    The boundaries ``x_0 = 0`` and ``x_{n+1} = 1`` are implied and never
    stored.  Use :func:`make_profile` to build one from unsorted input.
    """

    positions: tuple[Fraction, ...]

    def __post_init__(self):
        pos = self.positions
        if len(pos) < 2:
            raise ValueError(f"a profile needs at least 2 vendors, got {len(pos)}")
        if any(not isinstance(p, Fraction) for p in pos):
            raise TypeError("profile positions must be Fractions")
        if pos[0] < 0 or pos[-1] > 1:
            raise ValueError("profile positions must lie in [0, 1]")
        if any(a > b for a, b in zip(pos, pos[1:])):
            raise ValueError("profile positions must be nondecreasing")

    @property
    def n(self) -> int:
        return len(self.positions)

    def __len__(self) -> int:
        return len(self.positions)

    def __iter__(self):
        return iter(self.positions)

    def __getitem__(self, i):
        return self.positions[i]

    def x(self, k: int) -> Fraction:
        """Position of vendor ``k`` (1-based)."""
        check_vendor(k, self.n)
        return self.positions[k - 1]

    def mirror(self) -> Profile:
        """Reflect through ``x -> 1 - x``; vendor ``k`` becomes vendor ``n + 1 - k``."""
        return Profile(tuple(ONE - x for x in reversed(self.positions)))

    def replace(self, k: int, t: Fraction) -> tuple[Fraction, ...]:
        """The unsorted location with vendor ``k`` moved to ``t``."""
        pos = list(self.positions)
        pos[k - 1] = t
        return tuple(pos)

    def to_strings(self) -> list[str]:
        return [format_rat(x) for x in self.positions]

    def __str__(self) -> str:
        return "(" + ", ".join(self.to_strings()) + ")"


def check_vendor(k: int, n: int) -> None:
    if not 1 <= k <= n:
        raise IndexError(f"vendor index {k} out of range 1..{n}")


def make_profile(positions: Iterable[RatLike]) -> Profile:
    """Sort positions into a :class:`Profile`.  Input order is discarded."""
    loc = as_location(positions)
    if len(loc) < 2:
        raise ValueError(f"a profile needs at least 2 vendors, got {len(loc)}")
    return Profile(tuple(sorted(loc)))


def parse_profile(text: str, max_denominator: int | None = None) -> Profile:
    """Parse a comma-separated profile such as ``"1/4,1/4,0.75,3/4"``."""
    tokens = [t for t in text.replace(";", ",").split(",")]
    if any(not t.strip() for t in tokens):
        raise ParseError(f"empty entry in profile {text!r}")
    return make_profile(parse_rat(t, max_denominator) for t in tokens)


@dataclass(frozen=True)
class Intervals:
    """Lengths ``L_0..L_n`` of the gaps ``[x_j, x_{j+1}]`` with ``x_0 = 0``, ``x_{n+1} = 1``."""

    lengths: tuple[Fraction, ...]

    def __len__(self) -> int:
        return len(self.lengths)

    def __getitem__(self, j: int) -> Fraction:
        return self.lengths[j]

    def __iter__(self):
        return iter(self.lengths)

    @property
    def n(self) -> int:
        return len(self.lengths) - 1


def intervals(p: Profile) -> Intervals:
    pts = (ZERO, *p.positions, ONE)
    return Intervals(tuple(b - a for a, b in zip(pts, pts[1:])))


@dataclass(frozen=True)
class Block:
    position: Fraction
    members: tuple[int, ...]

    @property
    def multiplicity(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class BlockDecomposition:
    """Co-located groups of vendors, ordered by position.

    ``members`` hold 1-based indices into the location the decomposition was
    built from (so for an unsorted location they need not be contiguous).
    """

    blocks: tuple[Block, ...]

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __getitem__(self, i: int) -> Block:
        return self.blocks[i]

    @property
    def positions(self) -> tuple[Fraction, ...]:
        return tuple(b.position for b in self.blocks)

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(b.multiplicity for b in self.blocks)


def blocks(loc: Profile | Sequence[RatLike]) -> BlockDecomposition:
    positions = loc.positions if isinstance(loc, Profile) else as_location(loc)
    order = sorted(range(len(positions)), key=lambda i: positions[i])
    out: list[Block] = []
    for i in order:
        x = positions[i]
        if out and out[-1].position == x:
            out[-1] = Block(x, out[-1].members + (i + 1,))
        else:
            out.append(Block(x, (i + 1,)))
    return BlockDecomposition(tuple(out))
