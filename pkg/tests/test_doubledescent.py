import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sci_interp.doubledescent import DescentSpec, draw_problem, min_norm_lsq, run_descent


def normal_equations(X, Y):
    return np.linalg.solve(X.T @ X, X.T @ Y)


def row_space_solution(X, Y):
    """Oracle for full row rank: beta = X^T (X X^T)^-1 Y lies in the row space."""
    return X.T @ np.linalg.solve(X @ X.T, Y)


def test_identity():
    Y = np.array([3.0, -1.0, 2.5])
    assert np.allclose(min_norm_lsq(np.eye(3), Y), Y, rtol=0, atol=1e-15)


def test_projection_mean():
    assert min_norm_lsq([[1.0], [1.0]], [0.0, 2.0]) == pytest.approx([1.0])


def test_min_norm_on_solution_line():
    assert min_norm_lsq([[1.0, 1.0]], [2.0]) == pytest.approx([1.0, 1.0])


def test_zero_matrix():
    assert np.array_equal(min_norm_lsq(np.zeros((3, 2)), [1.0, 2.0, 3.0]), np.zeros(2))


def test_rank_deficient_drops_null_space():
    X = np.array([[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]])
    b = min_norm_lsq(X, [1.0, 2.0, 3.0])
    # solutions satisfy b1 + 2 b2 = 1; the shortest is (1, 2) / 5
    assert b == pytest.approx([0.2, 0.4])


def test_shape_and_finiteness_checks():
    with pytest.raises(ValueError):
        min_norm_lsq(np.ones((3, 2)), [1.0, 2.0])
    with pytest.raises(ValueError):
        min_norm_lsq([[np.nan]], [1.0])


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32), m=st.integers(2, 40), p=st.integers(1, 60))
def test_oracle_agreement(seed, m, p):
    X = np.random.default_rng(seed).standard_normal((m, p))
    Y = np.random.default_rng(seed + 1).standard_normal(m)
    b = min_norm_lsq(X, Y)
    if p < m:
        ref = normal_equations(X, Y)
    elif p > m:
        ref = row_space_solution(X, Y)
    else:
        ref = np.linalg.solve(X, Y)
    assert np.linalg.norm(b - ref) <= 1e-8 * max(np.linalg.norm(ref), 1e-300)
    if p >= m:
        assert np.linalg.norm(Y - X @ b) < 1e-8 * np.linalg.norm(Y)


@pytest.mark.parametrize(
    "kw",
    [{"m": 100, "D": 100}, {"p_grid": (5, 2)}, {"p_grid": (0, 5)}, {"p_grid": (5, 101)}, {"noise_sd": -1}, {"signal_norm": 0}],
)
def test_spec_validation(kw):
    with pytest.raises(ValueError):
        DescentSpec(**kw)


def test_signal_on_sphere_and_determinism():
    spec = DescentSpec(signal_norm=2.0)
    X, Y, beta = draw_problem(spec, 3)
    assert np.linalg.norm(beta) == pytest.approx(2.0)
    X2, Y2, _ = draw_problem(spec, 3)
    assert np.array_equal(X, X2) and np.array_equal(Y, Y2)


def test_noiseless_interpolation_at_full_width():
    spec = DescentSpec(m=10, D=40, p_grid=(40,), noise_sd=0.0, replicates=5)
    curve = run_descent(spec)
    r = curve.records[0]
    assert r.max_train_residual < 1e-10
    assert r.mean_ge > 0


def test_peak_at_threshold_small():
    spec = DescentSpec(p_grid=(2, 10, 20, 40, 100), replicates=60, seed=3)
    curve = run_descent(spec)
    ge = curve.mean_ge
    j = list(curve.p).index(spec.m)
    assert ge[j] > ge[0] and ge[j] > ge[-1]
    assert np.argmin(curve.min_singular_value) == j
    assert np.all(curve.min_singular_value > 0)


def test_thread_invariance():
    spec = DescentSpec(replicates=12)
    a = run_descent(spec, threads=1).to_dict()
    b = run_descent(spec, threads=4).to_dict()
    assert a == b
