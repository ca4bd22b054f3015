"""The numba kernels and the pure-numpy fallbacks must agree."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from incascade import _kernels


def exact_tail(k, p, m):
    if m <= 0:
        return 1.0
    return math.fsum(math.comb(k, i) * p**i * (1 - p) ** (k - i) for i in range(m, k + 1))


@given(st.integers(0, 60), st.floats(0, 1), st.integers(-1, 62))
def test_scalar_tail_matches_enumeration(k, p, m):
    assert _kernels._binomial_tail_py(k, p, m) == pytest.approx(exact_tail(k, p, m), abs=1e-13)


@pytest.mark.parametrize("k,m,p", [(300, 150, 0.5), (273, 137, 0.9), (273, 1, 1e-6), (1000, 999, 0.999)])
def test_scalar_tail_large_k(k, m, p):
    assert _kernels._binomial_tail_py(k, p, m) == pytest.approx(stats.binom.sf(m - 1, k, p), rel=1e-10, abs=1e-300)


@settings(max_examples=50)
@given(st.lists(st.tuples(st.integers(1, 80), st.integers(0, 82)), min_size=1, max_size=30), st.floats(0, 1))
def test_vector_tails_backends_agree(pairs, p):
    n = np.array([a for a, _ in pairs], dtype=np.int64)
    m = np.array([b for _, b in pairs], dtype=np.int64)
    np.testing.assert_allclose(_kernels.tails(n, m, p), _kernels._tails_np(n, m, p), atol=1e-13)
    np.testing.assert_allclose(_kernels.tail_slopes(n, m, p), _kernels._tail_slopes_np(n, m, p), atol=1e-11)


@given(st.integers(1, 40), st.integers(1, 40), st.floats(0.01, 0.99))
def test_tail_slope_is_derivative(k, m, p):
    h = 1e-6
    numeric = (exact_tail(k, min(p + h, 1), m) - exact_tail(k, max(p - h, 0), m)) / (2 * h)
    assert _kernels._tail_slope_py(k, p, m) == pytest.approx(numeric, abs=1e-5)


def _random_csr(rng, n, avg):
    src = rng.integers(0, n, size=n * avg // 2)
    dst = rng.integers(0, n, size=src.size)
    keep = src != dst
    a = np.concatenate([src[keep], dst[keep]])
    b = np.concatenate([dst[keep], src[keep]])
    key = np.unique(a * n + b)
    a, b = key // n, key % n
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(a, minlength=n), out=indptr[1:])
    return indptr, b.astype(np.int64)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_cascade_backends_identical(seed):
    rng = np.random.default_rng(seed)
    n = 400
    indptr, indices = _random_csr(rng, n, 6)
    deg = np.diff(indptr)
    threshold = np.where(rng.random(n) < 0.2, 0, np.maximum(1, np.ceil(0.5 * deg))).astype(np.int64)
    intent = rng.random(n) < 0.6
    fast = _kernels.cascade_rounds(indptr, indices, threshold, intent)
    loop = _kernels._cascade_rounds_py(indptr, indices, threshold, intent)
    vec = _kernels._cascade_rounds_np(indptr, indices, threshold, intent)
    for a, b in ((fast, loop), (fast, vec)):
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1]) and a[2] == b[2]


def test_backend_flag_reported():
    assert _kernels.BACKEND in ("numba", "numpy")
