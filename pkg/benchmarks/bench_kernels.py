"""Compare the numba and numpy kernel backends.

Run with ``python benchmarks/bench_kernels.py``.  Both backends are timed in
one process on identical inputs, and their outputs are checked for equality
before any timing is reported.
"""

from __future__ import annotations

import argparse
import random
import timeit
from fractions import Fraction

import numpy as np

from hotelling import _kernels
from hotelling.payoff import scale_to_integers
from hotelling.synthesis import enumerate_length_grid


def _best(stmt, repeat: int) -> float:
    return min(timeit.repeat(stmt, number=1, repeat=repeat))


def bench_tie_counts(m: int, repeat: int, seed: int) -> list[tuple[str, dict]]:
    rng = random.Random(seed)
    rows = []
    for n in (2, 4, 8):
        q = 840
        pos = sorted(Fraction(rng.randint(0, q), q) for _ in range(n))
        nums, denom = scale_to_integers(pos)
        ref = _kernels.tie_counts(nums, 0, m, denom, backend="numpy")
        times = {}
        for backend in _kernels.available_backends():
            out = _kernels.tie_counts(nums, 0, m, denom, backend=backend)  # also compiles
            assert np.array_equal(out, ref), backend
            times[backend] = _best(lambda: _kernels.tie_counts(nums, 0, m, denom, backend=backend), repeat)
        rows.append((f"tie_counts n={n} M={m}", times))
    return rows


def bench_screen(denom: int, n: int, repeat: int) -> list[tuple[str, dict]]:
    gaps = np.array(list(enumerate_length_grid(n, denom)), dtype=np.int64)
    P = np.cumsum(gaps[:, :-1], axis=1)
    ref = _kernels.first_profitable_vendor(P, denom, backend="numpy")
    times = {}
    for backend in _kernels.available_backends():
        out = _kernels.first_profitable_vendor(P, denom, backend=backend)
        assert np.array_equal(out, ref), backend
        times[backend] = _best(lambda: _kernels.first_profitable_vendor(P, denom, backend=backend), repeat)
    return [(f"first_profitable_vendor n={n} grid 1/{denom} ({len(P)} profiles)", times)]


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--cells", type=int, default=100_000, help="midpoint cells M")
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    rows = bench_tie_counts(args.cells, args.repeat, args.seed)
    rows += bench_screen(24, 4, args.repeat)
    rows += bench_screen(24, 5, args.repeat)
    backends = _kernels.available_backends()
    width = max(len(name) for name, _ in rows)
    print(f"{'kernel':<{width}}  " + "  ".join(f"{b:>10}" for b in backends) + "   speed-up")
    for name, times in rows:
        cells = "  ".join(f"{times[b] * 1e3:8.2f}ms" for b in backends)
        ratio = times["numpy"] / times["numba"] if "numba" in times else float("nan")
        print(f"{name:<{width}}  {cells}   {ratio:7.1f}x")


if __name__ == "__main__":
    main()
