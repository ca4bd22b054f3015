"""Hot numeric kernels.

Every kernel has two implementations: a numba ``@njit`` loop and a pure
numpy/scipy path. The compiled path is used when numba imports cleanly and
``INCASCADE_DISABLE_NUMBA`` is unset (or ``0``); set it to ``1`` to force the
numpy path. Both paths return identical results up to floating point
round-off, and the simulator kernels are bit-identical.
"""
import math
import os

import numpy as np
from scipy import special

_DISABLED = os.environ.get("INCASCADE_DISABLE_NUMBA", "0").lower() not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError("numba disabled by INCASCADE_DISABLE_NUMBA")
    from numba import njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda fn: fn


BACKEND = "numba" if HAS_NUMBA else "numpy"


def _binomial_tail_py(k, p, m):
    # P[Bin(k, p) >= m]. The pmf recurrence is anchored at the larger of m and
    # the mode so the starting term never underflows; terms shrink monotonically
    # away from the mode, which allows early exit once they stop contributing.
    if m <= 0:
        return 1.0
    if m > k:
        return 0.0
    if p <= 0.0:
        return 0.0
    if p >= 1.0:
        return 1.0
    mode = int(math.floor((k + 1) * p))
    if mode > k:
        mode = k
    start = m if m > mode else mode
    log_pmf = (
        math.lgamma(k + 1.0)
        - math.lgamma(start + 1.0)
        - math.lgamma(k - start + 1.0)
        + start * math.log(p)
        + (k - start) * math.log1p(-p)
    )
    first = math.exp(log_pmf)
    total = first
    ratio = p / (1.0 - p)
    term = first
    i = start
    while i < k:
        term *= (k - i) / (i + 1.0) * ratio
        i += 1
        total += term
        if term <= total * 1e-18:
            break
    term = first
    i = start
    while i > m:
        term *= i / ((k - i + 1.0) * ratio)
        i -= 1
        total += term
        if term <= total * 1e-18:
            break
    if total > 1.0:
        total = 1.0
    return total


def _tail_slope_py(k, p, m):
    # d/dp P[Bin(k, p) >= m] = k * P[Bin(k-1, p) = m-1]
    if m <= 0 or m > k:
        return 0.0
    j = m - 1
    n = k - 1
    if p <= 0.0:
        return float(k) if j == 0 else 0.0
    if p >= 1.0:
        return float(k) if j == n else 0.0
    log_pmf = (
        math.lgamma(n + 1.0)
        - math.lgamma(j + 1.0)
        - math.lgamma(n - j + 1.0)
        + j * math.log(p)
        + (n - j) * math.log1p(-p)
    )
    return k * math.exp(log_pmf)


def _tail_slopes_np(n, m, p):
    n = np.asarray(n, dtype=np.int64)
    m = np.asarray(m, dtype=np.int64)
    out = np.zeros(n.shape[0])
    inner = (m > 0) & (m <= n)
    # endpoints done by hand: scipy's pmf overflows at p = 0 for some shapes
    if p <= 0.0:
        hit = inner & (m == 1)
        out[hit] = n[hit]
    elif p >= 1.0:
        hit = inner & (m == n)
        out[hit] = n[hit]
    elif inner.any():
        # k * P[Bin(k-1, p) = m-1] in log space; stable for subnormal p
        k, j = n[inner].astype(float), m[inner].astype(float) - 1.0
        log_pmf = (
            special.gammaln(k) - special.gammaln(j + 1.0) - special.gammaln(k - j)
            + special.xlogy(j, p) + special.xlog1py(k - 1.0 - j, -p)
        )
        out[inner] = k * np.exp(log_pmf)
    return out


def _tails_np(n, m, p):
    n = np.asarray(n, dtype=np.int64)
    m = np.asarray(m, dtype=np.int64)
    out = np.zeros(n.shape[0])
    out[m <= 0] = 1.0
    inner = (m > 0) & (m <= n)
    if p >= 1.0:
        out[inner] = 1.0
    elif p > 0.0 and inner.any():
        # bdtrc(j, n, p) = P[Bin(n, p) > j]
        out[inner] = special.bdtrc(m[inner] - 1, n[inner], p)
    return out


def _cascade_rounds_py(indptr, indices, threshold, intent):
    n = threshold.shape[0]
    registered = np.zeros(n, dtype=np.bool_)
    active = np.zeros(n, dtype=np.bool_)
    queued = np.zeros(n, dtype=np.bool_)
    count = np.zeros(n, dtype=np.int64)
    frontier = np.empty(n, dtype=np.int64)
    candidates = np.empty(n, dtype=np.int64)
    n_front = 0
    for v in range(n):
        if threshold[v] == 0:
            registered[v] = True
            if intent[v]:
                active[v] = True
                frontier[n_front] = v
                n_front += 1
    rounds = 0
    while True:
        n_cand = 0
        for a in range(n_front):
            v = frontier[a]
            for j in range(indptr[v], indptr[v + 1]):
                w = indices[j]
                count[w] += 1
                if not registered[w] and not queued[w] and count[w] >= threshold[w]:
                    queued[w] = True
                    candidates[n_cand] = w
                    n_cand += 1
        if n_cand == 0:
            break
        rounds += 1
        n_front = 0
        for a in range(n_cand):
            w = candidates[a]
            registered[w] = True
            if intent[w]:
                active[w] = True
                frontier[n_front] = w
                n_front += 1
    return registered, active, rounds


def _cascade_rounds_np(indptr, indices, threshold, intent):
    n = threshold.shape[0]
    owner = np.repeat(np.arange(n), np.diff(indptr))
    registered = threshold == 0
    active = registered & intent
    rounds = 0
    while True:
        count = np.bincount(owner, weights=active[indices], minlength=n)
        new = ~registered & (count >= threshold)
        if not new.any():
            break
        rounds += 1
        registered = registered | new
        active = active | (new & intent)
    return registered, active, rounds


binomial_tail = njit(cache=True)(_binomial_tail_py) if HAS_NUMBA else _binomial_tail_py


@njit(cache=True)
def _tails_loop(n, m, p):
    out = np.empty(n.shape[0])
    for i in range(n.shape[0]):
        out[i] = binomial_tail(n[i], p, m[i])
    return out


tail_slope = njit(cache=True)(_tail_slope_py) if HAS_NUMBA else _tail_slope_py


@njit(cache=True)
def _slopes_loop(n, m, p):
    out = np.empty(n.shape[0])
    for i in range(n.shape[0]):
        out[i] = tail_slope(n[i], p, m[i])
    return out


if HAS_NUMBA:
    cascade_rounds = njit(cache=True, nogil=True)(_cascade_rounds_py)

    def tails(n, m, p):
        """Vector of P[Bin(n_i, p) >= m_i]."""
        return _tails_loop(np.asarray(n, dtype=np.int64), np.asarray(m, dtype=np.int64), float(p))

    def tail_slopes(n, m, p):
        """Vector of d/dp P[Bin(n_i, p) >= m_i]."""
        return _slopes_loop(np.asarray(n, dtype=np.int64), np.asarray(m, dtype=np.int64), float(p))

else:
    tails = _tails_np
    tail_slopes = _tail_slopes_np
    cascade_rounds = _cascade_rounds_np
