"""Property-based complements to the example-driven unit tests."""

import math

import numpy as np
from hypothesis import given, settings, strategies as st

from entropion import RngState, kernel_k, scalar_log_identity, von_neumann_entropy

positive = st.floats(min_value=1e-6, max_value=1e6, allow_nan=False, allow_infinity=False)


@given(a=positive, b=positive)
@settings(max_examples=200, deadline=None)
def test_kernel_k_bounds(a, b):
    # the integrand is positive and dominated by 1/(a (1+t)^2), so
    # 0 < k(a, b) <= 1/a; and k(a, a) = 1/(2a) sits strictly inside
    v = kernel_k(a, b)
    assert 0.0 < v <= 1.0 / a + 1e-12
    # monotone decreasing in b: a larger b shrinks the integrand pointwise
    assert kernel_k(a, b * 2.0) <= v + 1e-12


@given(w=st.floats(min_value=1e-3, max_value=1e3, allow_nan=False))
@settings(max_examples=50, deadline=None)
def test_scalar_identity_everywhere(w):
    lhs, rhs1, rhs2 = scalar_log_identity(w)
    assert math.isclose(lhs, -math.log(w), rel_tol=0, abs_tol=1e-12)
    assert math.isclose(rhs1, lhs, rel_tol=0, abs_tol=1e-8)
    assert math.isclose(rhs2, lhs, rel_tol=0, abs_tol=1e-8)


@given(seed=st.integers(min_value=0, max_value=2 ** 63 - 1))
@settings(max_examples=100, deadline=None)
def test_rng_uniform_stays_in_unit_interval(seed):
    r = RngState(seed)
    for _ in range(8):
        u = r.uniform()
        assert 0.0 <= u < 1.0
    p = RngState(seed)
    assert 0.0 < p.uniform_pos() <= 1.0


@given(
    probs=st.lists(st.floats(min_value=1e-9, max_value=1.0), min_size=1, max_size=8)
)
@settings(max_examples=100, deadline=None)
def test_entropy_of_diagonal_matches_shannon(probs):
    p = np.array(probs) / np.sum(probs)
    rho = np.diag(p)
    expected = float(-np.sum(p * np.log(p)))
    assert math.isclose(von_neumann_entropy(rho), expected, rel_tol=0, abs_tol=1e-10)
    # entropy is bounded by ln(d)
    assert von_neumann_entropy(rho) <= math.log(len(probs)) + 1e-12
