"""Hot inner loops, JIT-compiled with numba when available.

Set TWOLIN_NO_NUMBA=1 to force the pure-Python/numpy fallback; the kernels
are written so both paths execute the same source and therefore produce
bit-identical trajectories for a given seed. The generation loop simulates
the zero-bit count pair directly: flip counts in the four bit categories
(zero/one bits in the left/right part) are independent binomials, and
acceptance depends only on those counts, so the count pair is a Markov
chain with exactly the law of the bit-string algorithm.
"""
from __future__ import annotations

import math
import os

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)

NUMBA_ENABLED = os.environ.get("TWOLIN_NO_NUMBA", "") not in ("1", "true", "yes")
if NUMBA_ENABLED:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - depends on install
        NUMBA_ENABLED = False

if not NUMBA_ENABLED:
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap


@njit(cache=True)
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def _next_u64(st):
    st[0] = st[0] + _GOLDEN
    return _mix64(st[0])


@njit(cache=True)
def _next_unit(st):
    """Uniform double in [0, 1) with 53 random bits."""
    return (_next_u64(st) >> np.uint64(11)) * 1.1102230246251565e-16


@njit(cache=True)
def _binom_inv(st, m, log1mp, odds):
    """Binomial(m, p) by sequential inversion; O(1 + m*p) expected."""
    if m <= 0:
        return 0
    u = _next_unit(st)
    pk = math.exp(m * log1mp)
    cum = pk
    k = 0
    while u > cum and k < m:
        pk *= (m - k) / (k + 1.0) * odds
        k += 1
        cum += pk
    return k


@njit(cache=True)
def ea_chain(seed, x_l, x_r, left_len, right_len, chi, rho, budget,
             record_every, rec_t, rec_xl, rec_xr):
    """Run the selection loop on the zero-count pair.

    Records (t, x_l, x_r) at t=0, every record_every generations, and at the
    final generation. Returns (hit, generations, n_records) with hit = -1
    when the optimum was not reached within the budget.
    """
    n = left_len + right_len
    p = chi / n
    log1mp = math.log1p(-p)
    odds = p / (1.0 - p)

    st = np.empty(1, dtype=np.uint64)
    st[0] = _mix64(np.uint64(seed))

    nrec = 0
    rec_t[nrec] = 0
    rec_xl[nrec] = x_l
    rec_xr[nrec] = x_r
    nrec += 1
    if x_l == 0 and x_r == 0:
        return 0, 0, nrec

    t = 0
    hit = -1
    while t < budget:
        t += 1
        env1 = _next_unit(st) < rho
        i = _binom_inv(st, x_l, log1mp, odds)
        r1 = _binom_inv(st, left_len - x_l, log1mp, odds)
        j = _binom_inv(st, x_r, log1mp, odds)
        r2 = _binom_inv(st, right_len - x_r, log1mp, odds)
        if env1:
            accept = i > r1 or (i == r1 and j >= r2)
        else:
            accept = j > r2 or (j == r2 and i >= r1)
        if accept:
            x_l += r1 - i
            x_r += r2 - j
        if t % record_every == 0:
            rec_t[nrec] = t
            rec_xl[nrec] = x_l
            rec_xr[nrec] = x_r
            nrec += 1
        if x_l == 0 and x_r == 0:
            hit = t
            break

    if rec_t[nrec - 1] != t:
        rec_t[nrec] = t
        rec_xl[nrec] = x_l
        rec_xr[nrec] = x_r
        nrec += 1
    return hit, t, nrec


@njit(cache=True)
def ea_chain_hit_only(seed, x_l, x_r, left_len, right_len, chi, rho, budget):
    """Same loop without trajectory recording.

    Returns (hit, generations, final_x_l, final_x_r).
    """
    n = left_len + right_len
    p = chi / n
    log1mp = math.log1p(-p)
    odds = p / (1.0 - p)

    st = np.empty(1, dtype=np.uint64)
    st[0] = _mix64(np.uint64(seed))

    if x_l == 0 and x_r == 0:
        return 0, 0, 0, 0

    t = 0
    while t < budget:
        t += 1
        env1 = _next_unit(st) < rho
        i = _binom_inv(st, x_l, log1mp, odds)
        r1 = _binom_inv(st, left_len - x_l, log1mp, odds)
        j = _binom_inv(st, x_r, log1mp, odds)
        r2 = _binom_inv(st, right_len - x_r, log1mp, odds)
        if env1:
            accept = i > r1 or (i == r1 and j >= r2)
        else:
            accept = j > r2 or (j == r2 and i >= r1)
        if accept:
            x_l += r1 - i
            x_r += r2 - j
        if x_l == 0 and x_r == 0:
            return t, t, x_l, x_r
    return -1, t, x_l, x_r


_M64 = (1 << 64) - 1


def _mix64_py(z: int) -> int:
    z &= _M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


def derive_seed(master: int, index: int) -> int:
    """Deterministic per-trial seed from a master seed and trial index."""
    z = ((master & _M64) + (index + 1) * 0x9E3779B97F4A7C15) & _M64
    return _mix64_py(_mix64_py(z))


def kernel_mode() -> str:
    return "numba" if NUMBA_ENABLED else "numpy-fallback"
