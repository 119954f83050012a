"""Integer kernels behind the exact payoff oracle and batch equilibrium screening.

Callers scale rational positions to integers over a common denominator
``D`` so both kernels work purely in int64 arithmetic, which keeps them
exact.  Each kernel has a numba loop implementation and a vectorised numpy
implementation; set ``HOTELLING_DISABLE_NUMBA=1`` to force numpy.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a soft dependency
    numba = None

HAVE_NUMBA = numba is not None
DISABLE_NUMBA = os.environ.get("HOTELLING_DISABLE_NUMBA", "").strip() not in ("", "0")

# |values| must stay below this for int64 cross-multiplication headroom.
INT64_SAFE = 2**62


def default_backend() -> str:
    return "numba" if HAVE_NUMBA and not DISABLE_NUMBA else "numpy"


def available_backends() -> tuple[str, ...]:
    """Backends usable in this process; the env flag only changes the default."""
    return ("numba", "numpy") if HAVE_NUMBA else ("numpy",)


def resolve_backend(backend: str | None) -> str:
    if backend is None:
        return default_backend()
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend


def _njit(func):
    if HAVE_NUMBA:
        return numba.njit(cache=True, nogil=True)(func)
    return func


# ---------------------------------------------------------------------------
# midpoint-rule tie counting

def _tie_counts_loop(pos, k, m, denom):
    # Sample y_j = (2j+1)/(2m); in units of 1/(2 m denom) the distance to
    # x_i = pos[i]/denom is |2 m pos[i] - (2j+1) denom|.
    n = pos.shape[0]
    counts = np.zeros(n + 1, dtype=np.int64)
    scaled = 2 * m * pos
    for j in range(m):
        y = (2 * j + 1) * denom
        best = scaled[0] - y
        if best < 0:
            best = -best
        for i in range(1, n):
            d = scaled[i] - y
            if d < 0:
                d = -d
            if d < best:
                best = d
        dk = scaled[k] - y
        if dk < 0:
            dk = -dk
        if dk != best:
            continue
        size = 0
        for i in range(n):
            d = scaled[i] - y
            if d < 0:
                d = -d
            if d == best:
                size += 1
        counts[size] += 1
    return counts


_tie_counts_numba = _njit(_tie_counts_loop)


def _tie_counts_numpy(pos, k, m, denom, chunk=1 << 15):
    n = pos.shape[0]
    counts = np.zeros(n + 1, dtype=np.int64)
    scaled = (2 * m * pos)[:, None]
    for start in range(0, m, chunk):
        j = np.arange(start, min(m, start + chunk), dtype=pos.dtype)
        dist = np.abs(scaled - (2 * j + 1) * denom)
        hit = dist == dist.min(axis=0)
        sizes = hit.sum(axis=0)[hit[k]]
        counts += np.bincount(sizes, minlength=n + 1)[: n + 1].astype(np.int64)
    return counts


def tie_counts(numerators, k: int, m: int, denom: int, backend: str | None = None) -> np.ndarray:
    """Count midpoint samples where vendor ``k`` (0-based) is among the nearest.

    ``counts[s]`` is the number of samples ``(2j+1)/(2m)``, ``0 <= j < m``,
    at which vendor ``k`` is one of exactly ``s`` nearest vendors.  Positions
    are ``numerators[i] / denom``.
    """
    backend = resolve_backend(backend)
    if 2 * m * denom + denom >= INT64_SAFE:
        pos = np.array([int(v) for v in numerators], dtype=object)
        return _tie_counts_numpy(pos, k, m, denom, chunk=1 << 12)
    pos = np.asarray(numerators, dtype=np.int64)
    if backend == "numba":
        return _tie_counts_numba(pos, k, m, denom)
    return _tie_counts_numpy(pos, k, m, denom)


# ---------------------------------------------------------------------------
# batch equilibrium screening
#
# Payoffs are carried as (num, den) with value num / (2 * D * den); a vendor
# joining a point v among others Q gets market [L, R] in doubled units split
# over (count of Q at v) + 1 members.

def _first_profitable_loop(P, D):
    B, n = P.shape
    out = np.full(B, -1, dtype=np.int64)
    others = np.empty(n - 1, dtype=np.int64)
    for b in range(B):
        for k in range(n):
            c = 0
            for i in range(n):
                if i != k:
                    others[c] = P[b, i]
                    c += 1
            cur_num, cur_den = _share(others, P[b, k], D)
            found = False
            # open gaps between consecutive others
            for i in range(n - 2):
                if (others[i + 1] - others[i]) * cur_den > cur_num:
                    found = True
            # left and right edge gaps: unattained suprema
            if 2 * others[0] * cur_den > cur_num:
                found = True
            if 2 * (D - others[n - 2]) * cur_den > cur_num:
                found = True
            # joining an occupied point, or sitting at either end
            for i in range(n - 1):
                num, den = _share(others, others[i], D)
                if num * cur_den > cur_num * den:
                    found = True
            num, den = _share(others, 0, D)
            if num * cur_den > cur_num * den:
                found = True
            num, den = _share(others, D, D)
            if num * cur_den > cur_num * den:
                found = True
            if found:
                out[b] = k
                break
    return out


def _share_loop(others, v, D):
    has_left = False
    has_right = False
    best_left = 0
    best_right = 0
    cnt = 1
    for i in range(others.shape[0]):
        q = others[i]
        if q == v:
            cnt += 1
        elif q < v:
            if not has_left or q > best_left:
                best_left = q
                has_left = True
        else:
            if not has_right or q < best_right:
                best_right = q
                has_right = True
    left = best_left + v if has_left else 0
    right = v + best_right if has_right else 2 * D
    return right - left, cnt


_share = _njit(_share_loop)
_first_profitable_numba = _njit(_first_profitable_loop)


def _share_numpy(Q, v, D):
    # Q: (B, m) others, v: (B,) joining point
    v = v[:, None]
    cnt = (Q == v).sum(axis=1) + 1
    below = np.where(Q < v, Q, -1)
    lo = below.max(axis=1)
    above = np.where(Q > v, Q, 2 * D + 1)
    hi = above.min(axis=1)
    v = v[:, 0]
    left = np.where(lo >= 0, lo + v, 0)
    right = np.where(hi <= D, v + hi, 2 * D)
    return right - left, cnt


def _first_profitable_numpy(P, D):
    B, n = P.shape
    out = np.full(B, -1, dtype=np.int64)
    zeros = np.zeros(B, dtype=P.dtype)
    ends = np.full(B, D, dtype=P.dtype)
    for k in range(n):
        Q = np.delete(P, k, axis=1)
        cur_num, cur_den = _share_numpy(Q, P[:, k], D)
        found = np.zeros(B, dtype=bool)
        gaps = np.diff(Q, axis=1)
        found |= (gaps * cur_den[:, None] > cur_num[:, None]).any(axis=1)
        found |= 2 * Q[:, 0] * cur_den > cur_num
        found |= 2 * (D - Q[:, -1]) * cur_den > cur_num
        for v in (*Q.T, zeros, ends):
            num, den = _share_numpy(Q, v, D)
            found |= num * cur_den > cur_num * den
        out = np.where((out < 0) & found, k, out)
    return out


def first_profitable_vendor(P, D: int, backend: str | None = None) -> np.ndarray:
    """For each sorted integer profile row, the first vendor (0-based) with a
    strictly profitable deviation, or -1 when the row is an equilibrium.

    Rows of ``P`` are positions scaled by ``D``; ``n >= 2`` columns.
    """
    backend = resolve_backend(backend)
    P = np.asarray(P, dtype=np.int64)
    if P.ndim != 2 or P.shape[1] < 2:
        raise ValueError("expected a (batch, n) array with n >= 2")
    if 2 * D * (P.shape[1] + 1) >= INT64_SAFE:
        raise OverflowError("denominator too large for int64 screening")
    if backend == "numba":
        return _first_profitable_numba(P, D)
    return _first_profitable_numpy(P, D)
