"""Best-response dynamics on a finite grid of locations.

Vendors may only stand on ``{0, 1/m, ..., 1}``.  At every step the vendor
with the largest strict improvement (smallest index on ties) jumps to its
best grid response.  Runs end at a fixed point, at the first repeated state
(a cycle), or at the step limit.  Scheduling is deterministic.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .core import Profile, check_vendor, format_rat
from .equilibrium import verify_equilibrium
from .payoff import payoff_of


class OffGridError(ValueError):
    pass


def _check_grid(p: Profile, m: int) -> None:
    if m < 2:
        raise ValueError("grid size must be at least 2")
    for x in p.positions:
        if (x * m).denominator != 1:
            raise OffGridError(f"position {format_rat(x)} is not on the 1/{m} grid")


def best_response_on_grid(p: Profile, k: int, m: int) -> Fraction:
    """Grid point maximising vendor ``k``'s payoff; smallest such point on ties."""
    _check_grid(p, m)
    check_vendor(k, p.n)
    return _best_response(p, k, m)[0]


def _best_response(p: Profile, k: int, m: int) -> tuple[Fraction, Fraction]:
    best_t = best_v = None
    for i in range(m + 1):
        t = Fraction(i, m)
        v = payoff_of(p.replace(k, t), k)
        if best_v is None or v > best_v:
            best_t, best_v = t, v
    return best_t, best_v


@dataclass(frozen=True)
class Step:
    vendor: int
    source: Fraction
    target: Fraction
    payoff_before: Fraction
    payoff_after: Fraction

    def to_dict(self) -> dict:
        return {
            "vendor": self.vendor,
            "from": format_rat(self.source),
            "to": format_rat(self.target),
            "payoff_before": format_rat(self.payoff_before),
            "payoff_after": format_rat(self.payoff_after),
        }


@dataclass
class DynamicsTrace:
    grid: int
    start: Profile
    steps: list[Step] = field(default_factory=list)
    outcome: str = "step-limit"
    period: int | None = None
    final: Profile | None = None
    exact_equilibrium: bool | None = None
    seed: int | None = None

    def to_dict(self) -> dict:
        return {
            "grid": self.grid,
            "seed": self.seed,
            "start": self.start.to_strings(),
            "outcome": self.outcome,
            "period": self.period,
            "final": self.final.to_strings() if self.final else None,
            "exact_equilibrium": self.exact_equilibrium,
            "steps": [s.to_dict() for s in self.steps],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["step", "vendor", "from", "to", "payoff_before", "payoff_after"])
        for i, s in enumerate(self.steps, 1):
            d = s.to_dict()
            writer.writerow([i, d["vendor"], d["from"], d["to"], d["payoff_before"], d["payoff_after"]])
        return buf.getvalue()


def run_dynamics(p0: Profile, m: int, max_steps: int = 10_000, seed: int | None = None) -> DynamicsTrace:
    """Largest-improvement-first best-response dynamics from ``p0``.

    Vendor indices refer to sorted positions at the time of the move.  A grid
    fixed point is only an approximate equilibrium; ``exact_equilibrium``
    records whether the exact verifier accepts it too.  ``seed`` does not
    affect the schedule; it is kept on the trace for :func:`random_restarts`.
    """
    _check_grid(p0, m)
    trace = DynamicsTrace(grid=m, start=p0, seed=seed)
    seen = {p0.positions: 0}
    p = p0
    for step in range(1, max_steps + 1):
        mover = None
        for k in range(1, p.n + 1):
            current = payoff_of(p, k)
            t, v = _best_response(p, k, m)
            gain = v - current
            if gain > 0 and (mover is None or gain > mover[0]):
                mover = (gain, k, t, current, v)
        if mover is None:
            trace.outcome = "fixed-point"
            break
        _, k, t, before, after = mover
        trace.steps.append(Step(k, p.x(k), t, before, after))
        p = Profile(tuple(sorted(p.replace(k, t))))
        if p.positions in seen:
            trace.outcome = "cycle"
            trace.period = step - seen[p.positions]
            break
        seen[p.positions] = step
    trace.final = p
    if trace.outcome == "fixed-point":
        trace.exact_equilibrium = verify_equilibrium(p).equilibrium
    return trace


def random_restarts(n: int, m: int, runs: int, seed: int, max_steps: int = 10_000) -> list[DynamicsTrace]:
    """Run the dynamics from ``runs`` random grid starts drawn with ``seed``."""
    rng = random.Random(seed)
    traces = []
    for _ in range(runs):
        start = Profile(tuple(sorted(Fraction(rng.randint(0, m), m) for _ in range(n))))
        traces.append(run_dynamics(start, m, max_steps, seed=seed))
    return traces
