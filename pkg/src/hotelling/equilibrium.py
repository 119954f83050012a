"""Equilibrium checks.

Two independent verdicts are produced for a profile:

* :func:`verify_equilibrium` works from the definition.  For every vendor it
  computes the exact supremum of the payoff over all relocations, using the
  fact that with the other vendors fixed the payoff is piecewise linear with
  finitely many pieces.
* :func:`check_theorem_conditions` only looks at the gap lengths and tests
  the closed-form characterisation (unique midpoint pair for two vendors, no
  equilibrium for three, linear equalities and inequalities for four or more).

:func:`cross_validate` runs both and flags any disagreement.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .core import HALF, ONE, ZERO, Profile, check_vendor, format_rat
from .payoff import _payoff_at, block_shares, payoff_closed_form, scale_to_integers

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Finding:
    """One failed condition or one profitable deviation."""

    tag: str
    message: str
    vendor: int | None = None
    point: Fraction | None = None
    payoff: Fraction | None = None
    gain: Fraction | None = None

    def to_dict(self) -> dict:
        d = {"tag": self.tag, "message": self.message}
        if self.vendor is not None:
            d["vendor"] = self.vendor
        for key in ("point", "payoff", "gain"):
            value = getattr(self, key)
            if value is not None:
                d[key] = format_rat(value)
        return d


@dataclass(frozen=True)
class Verdict:
    equilibrium: bool
    reasons: tuple[Finding, ...] = ()

    def __post_init__(self):
        if self.equilibrium and self.reasons:
            raise ValueError("an equilibrium verdict cannot carry reasons")

    def __bool__(self) -> bool:
        return self.equilibrium

    @property
    def tags(self) -> list[str]:
        return [r.tag for r in self.reasons]

    def to_dict(self) -> dict:
        return {
            "equilibrium": self.equilibrium,
            "reasons": [r.to_dict() for r in self.reasons],
        }


@dataclass(frozen=True)
class GapLimit:
    """Supremum approached, but not reached, inside the open gap ``(lo, hi)``.

    ``toward`` is the endpoint the payoff increases toward.
    """

    lo: Fraction
    hi: Fraction
    toward: Fraction

    def to_dict(self) -> dict:
        return {"open_interval": [format_rat(self.lo), format_rat(self.hi)],
                "toward": format_rat(self.toward)}


@dataclass(frozen=True)
class DeviationReport:
    vendor: int
    current: Fraction
    sup: Fraction
    attained: bool
    witness: Fraction | GapLimit

    @property
    def gain(self) -> Fraction:
        return self.sup - self.current

    @property
    def profitable(self) -> bool:
        return self.sup > self.current

    def to_dict(self) -> dict:
        w = self.witness
        return {
            "vendor": self.vendor,
            "current": format_rat(self.current),
            "sup": format_rat(self.sup),
            "attained": self.attained,
            "witness": w.to_dict() if isinstance(w, GapLimit) else {"point": format_rat(w)},
        }


def _join(others: Sequence[int], v: int, D: int) -> tuple[int, int]:
    """Payoff of a vendor at ``v`` among ``others`` as ``(num, den)``.

    Coordinates are integers over ``D``; the payoff is ``num / (2 D den)``.
    """
    cnt = 1
    lo = hi = None
    for q in others:
        if q == v:
            cnt += 1
        elif q < v:
            if lo is None or q > lo:
                lo = q
        elif hi is None or q < hi:
            hi = q
    left = 0 if lo is None else lo + v
    right = 2 * D if hi is None else v + hi
    return right - left, cnt


def _candidates(others: Sequence[int], D: int):
    """``(num, den, witness)`` for every piece of the deviation payoff.

    ``others`` is the sorted integer location with the deviating vendor
    removed.  Values are ``num / (2 D den)``; a witness is either a point in
    doubled coordinates (``w / 2D``, payoff attained there) or, for the
    open edge gaps, a ``(lo, hi, toward)`` triple in plain coordinates.
    """
    pts = sorted(set(others))
    out = []
    # interior gaps: payoff is constant, half the gap
    for a, b in zip(pts, pts[1:]):
        out.append((b - a, 1, a + b))
    # joining an existing block
    for x in pts:
        num, den = _join(others, x, D)
        out.append((num, den, 2 * x))
    # edge gaps: payoff rises toward the nearest block, never reaching it
    first, final = pts[0], pts[-1]
    if first > 0:
        out.append((2 * first, 1, (0, first, first)))
        out.append((first, 1, 0))
    if final < D:
        out.append((2 * (D - final), 1, (final, D, final)))
        out.append((D - final, 1, 2 * D))
    return out


def _deviation_scaled(X: Sequence[int], D: int, k: int) -> DeviationReport:
    i = k - 1
    others = X[:i] + X[i + 1:]
    cur_num, cur_den = _join(others, X[i], D)
    cands = _candidates(others, D)
    best_num, best_den = 0, 1
    for num, den, _ in cands:
        if num * best_den > best_num * den:
            best_num, best_den = num, den
    at_sup = [w for num, den, w in cands if num * best_den == best_num * den]
    points = [w for w in at_sup if not isinstance(w, tuple)]
    scale = 2 * D
    current = Fraction(cur_num, scale * cur_den)
    sup = Fraction(best_num, scale * best_den)
    if points:
        return DeviationReport(k, current, sup, True, Fraction(points[0], scale))
    lo, hi, toward = at_sup[0]
    return DeviationReport(k, current, sup, False,
                           GapLimit(Fraction(lo, D), Fraction(hi, D), Fraction(toward, D)))


def deviation_sup(p: Profile, k: int) -> DeviationReport:
    """Supremum of vendor ``k``'s payoff over every relocation in ``[0, 1]``.

    With the others fixed the payoff is constant on interior gaps, linear on
    the two edge gaps, and takes special values at occupied points and at the
    ends of the city, so the supremum is a maximum over finitely many pieces.
    """
    check_vendor(k, p.n)
    X, D = scale_to_integers(p.positions)
    return _deviation_scaled(X, D, k)


def profitable_point(p: Profile, report: DeviationReport) -> Fraction:
    """A concrete location where the vendor earns strictly more than now.

    Only meaningful when ``report.profitable``.  For an unattained edge
    supremum the payoff inside the edge gap is linear, so any point past the
    break-even location works; the midpoint of the remaining stretch is used.
    """
    w = report.witness
    if not isinstance(w, GapLimit):
        return w
    f = report.current
    if w.toward == w.hi:
        # payoff (t + hi) / 2 exceeds f once t > 2f - hi
        start = max(ZERO, 2 * f - w.hi)
        return (start + w.hi) / 2
    # payoff 1 - (lo + t) / 2 exceeds f while t < 2 - 2f - lo
    stop = min(ONE, 2 - 2 * f - w.lo)
    return (w.lo + stop) / 2


def verify_equilibrium(p: Profile) -> Verdict:
    """Check that no vendor can gain by moving anywhere in ``[0, 1]``."""
    X, D = scale_to_integers(p.positions)
    reasons = []
    for k in range(1, p.n + 1):
        rep = _deviation_scaled(X, D, k)
        if not rep.profitable:
            continue
        t = profitable_point(p, rep)
        gained = _payoff_at(p.replace(k, t), k)
        if gained <= rep.current:  # pragma: no cover - would be an internal defect
            raise AssertionError(f"witness {t} for vendor {k} in {p} is not profitable")
        reasons.append(Finding(
            "deviation.profitable",
            f"vendor {k} moves {format_rat(p.x(k))} -> {format_rat(t)}: "
            f"{format_rat(rep.current)} -> {format_rat(gained)}",
            vendor=k, point=t, payoff=gained, gain=gained - rep.current,
        ))
    return Verdict(not reasons, tuple(reasons))


def check_theorem_conditions(p: Profile) -> Verdict:
    """Equilibrium test from the gap lengths alone.

    Two vendors: only ``(1/2, 1/2)``.  Three vendors: never.  Four or more:
    edge gaps equal and positive, inner-edge gaps zero, second gaps twice the
    edge gap, every gap at most twice the edge gap, and every pair of
    consecutive interior gaps at least twice the edge gap.
    """
    n = p.n
    if n == 2:
        if p.positions == (HALF, HALF):
            return Verdict(True)
        return Verdict(False, (Finding(
            "main3.unique_midpoint", "with two vendors only (1/2, 1/2) is an equilibrium"),))
    if n == 3:
        return Verdict(False, (Finding(
            "main4.no_equilibrium", "three vendors admit no equilibrium"),))

    # integer gaps over the common denominator; Fractions only for messages
    X, D = scale_to_integers(p.positions)
    L = [b - a for a, b in zip([0, *X], [*X, D])]
    a = L[0]
    reasons = []

    def fail(tag, message):
        reasons.append(Finding(tag, message))

    def r(v):
        return format_rat(Fraction(v, D))

    if L[0] != L[n]:
        fail("main1.edge_lengths_equal", f"L_0 = {r(L[0])} != L_{n} = {r(L[n])}")
    if not L[0] > 0:
        fail("main1.edge_positive", "L_0 must be positive")
    if L[1] != 0:
        fail("main1.inner_edge_zero_left", f"L_1 = {r(L[1])} != 0")
    if L[n - 1] != 0:
        fail("main1.inner_edge_zero_right", f"L_{n - 1} = {r(L[n - 1])} != 0")
    if L[2] != 2 * L[0]:
        fail("main1.ratio_left", f"L_2 = {r(L[2])} != 2 L_0 = {r(2 * L[0])}")
    if L[n - 2] != 2 * L[n]:
        fail("main1.ratio_right", f"L_{n - 2} = {r(L[n - 2])} != 2 L_{n} = {r(2 * L[n])}")
    for j in range(n + 1):
        if L[j] > 2 * a:
            fail("main2.gap_bound", f"L_{j} = {r(L[j])} > 2 L_0 = {r(2 * a)}")
    for k in range(1, n - 1):
        if L[k] + L[k + 1] < 2 * a:
            fail("main2.pair_sum", f"L_{k} + L_{k + 1} = {r(L[k] + L[k + 1])} < 2 L_0 = {r(2 * a)}")
    return Verdict(not reasons, tuple(reasons))


def check_necessary(p: Profile) -> list[Finding]:
    """Necessary conditions every equilibrium satisfies (sufficient they are not).

    Nobody at either end of the city, at most two vendors per point, and the
    outermost vendors paired up.
    """
    x = p.positions
    out = []
    if x[0] == 0:
        out.append(Finding("pro1.left_endpoint", "x_1 = 0"))
    if x[-1] == 1:
        out.append(Finding("pro1.right_endpoint", f"x_{p.n} = 1"))
    for pos, mult, _ in block_shares(x):
        if mult > 2:
            out.append(Finding("pro2.multiplicity",
                               f"{mult} vendors share the point {format_rat(pos)}", point=pos))
    if x[0] != x[1]:
        out.append(Finding("pro3.left_pair", "x_1 != x_2"))
    if x[-2] != x[-1]:
        out.append(Finding("pro3.right_pair", f"x_{p.n - 1} != x_{p.n}"))
    return out


class PreconditionError(ValueError):
    def __init__(self, message: str, findings: Sequence[Finding] = ()):
        super().__init__(message)
        self.findings = tuple(findings)


def payoff_floor_check(p: Profile) -> bool:
    """Whether every vendor earns at least the edge gap ``L_0``.

    Defined only for profiles meeting the four-or-more-vendor conditions;
    anything else raises :class:`PreconditionError` carrying the failed
    conditions.
    """
    if p.n < 4:
        raise PreconditionError("the payoff floor applies to n >= 4 only")
    verdict = check_theorem_conditions(p)
    if not verdict:
        raise PreconditionError("profile violates the equilibrium conditions", verdict.reasons)
    floor = p.positions[0]
    return min(payoff_closed_form(p)) >= floor


@dataclass(frozen=True)
class CrossValidation:
    profile: Profile
    definition: Verdict
    theorem: Verdict

    @property
    def agree(self) -> bool:
        return self.definition.equilibrium == self.theorem.equilibrium

    def to_dict(self) -> dict:
        return {
            "profile": self.profile.to_strings(),
            "definition": self.definition.to_dict(),
            "theorem": self.theorem.to_dict(),
            "agree": self.agree,
        }


class DisagreementError(AssertionError):
    def __init__(self, record: CrossValidation):
        self.record = record
        super().__init__(
            f"verdicts disagree on {record.profile}: "
            f"definition={record.definition.to_dict()} theorem={record.theorem.to_dict()}"
        )


def cross_validate(p: Profile) -> CrossValidation:
    return CrossValidation(p, verify_equilibrium(p), check_theorem_conditions(p))


def cross_validate_many(
    profiles: Iterable[Profile], workers: int = 1, abort: bool = True
) -> list[CrossValidation]:
    """Cross-validate many profiles, preserving input order.

    With ``abort`` set the first disagreement raises :class:`DisagreementError`
    carrying the full record.
    """
    profiles = list(profiles)
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            records = list(pool.map(cross_validate, profiles, chunksize=64))
    else:
        records = [cross_validate(p) for p in profiles]
    for rec in records:
        if not rec.agree:
            log.error("disagreement: %s", rec.to_dict())
            if abort:
                raise DisagreementError(rec)
    return records


def screen_equilibria(profiles: Sequence[Profile], backend: str | None = None) -> np.ndarray:
    """Definition-based verdicts for a batch of same-size profiles.

    Runs the integer kernel instead of :func:`verify_equilibrium`; returns a
    boolean array.  Intended for large sweeps where per-profile reports are
    not needed.
    """
    if not profiles:
        return np.zeros(0, dtype=bool)
    n = profiles[0].n
    if any(p.n != n for p in profiles):
        raise ValueError("all profiles in a batch must have the same n")
    _, denom = scale_to_integers([x for p in profiles for x in p.positions])
    P = np.array([[int(x * denom) for x in p.positions] for p in profiles], dtype=np.int64)
    return _kernels.first_profitable_vendor(P, denom, backend=backend) < 0
