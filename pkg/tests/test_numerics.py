import numpy as np
import pytest
import scipy.sparse as sp

from nodebench.numerics import (finite_diff_check, log_sigmoid, sigmoid, standardize_apply,
                                standardize_fit, truncated_svd)

from oracles import jacobi_singular_values


def test_svd_diagonal():
    _, s, _ = truncated_svd(np.diag([3.0, 2.0, 1.0]), 2)
    assert np.allclose(s, [3, 2], atol=1e-8)


def test_svd_rank_one_reconstruction():
    rng = np.random.default_rng(0)
    u, v = rng.standard_normal(30), rng.standard_normal(20)
    m = np.outer(u, v)
    U, s, Vt = truncated_svd(m, 1)
    assert np.abs(U * s @ Vt - m).max() <= 1e-6


def test_jacobi_oracle_self_check():
    m = np.random.default_rng(3).standard_normal((7, 5))
    assert np.allclose(jacobi_singular_values(m), np.linalg.svd(m, compute_uv=False), atol=1e-10)


def test_svd_sparse_against_jacobi():
    m = sp.random(50, 40, density=0.2, random_state=np.random.default_rng(5), format="csr")
    ref = jacobi_singular_values(m.toarray())
    _, s, _ = truncated_svd(m, 10, oversample=30, power_iters=6)
    assert np.allclose(s, ref[:10], rtol=1e-4)


def test_svd_deterministic_and_bad_rank():
    m = np.random.default_rng(1).standard_normal((20, 10))
    assert truncated_svd(m, 3, seed=4)[1].tobytes() == truncated_svd(m, 3, seed=4)[1].tobytes()
    with pytest.raises(ValueError):
        truncated_svd(m, 11)
    with pytest.raises(ValueError):
        truncated_svd(m, 0)


def test_standardize_column():
    x = np.array([[1.0, 5.0], [3.0, 5.0], [100.0, 7.0]])
    st = standardize_fit(x, [0, 1])
    assert np.allclose(st.mean, [2, 5]) and np.allclose(st.std, [1, 1])
    z = standardize_apply(x, st)
    assert np.allclose(z[:2, 0], [-1, 1])
    assert np.allclose(z[:2, 1], 0)
    before = st.mean.copy()
    standardize_apply(x[2:], st)
    assert np.array_equal(st.mean, before)
    with pytest.raises(ValueError):
        standardize_fit(x, [])


def test_finite_diff_polynomial():
    err = finite_diff_check(lambda v: float(v[0] ** 2), lambda v: 2 * v, np.array([3.0]))
    assert err <= 1e-6


def test_finite_diff_detects_wrong_gradient():
    assert finite_diff_check(lambda v: float(v @ v), lambda v: v, np.ones(3)) > 0.5


def test_sigmoid_stable():
    z = np.array([-1000.0, -5.0, 0.0, 5.0, 1000.0])
    s = sigmoid(z)
    assert np.all(np.isfinite(s)) and s[2] == 0.5 and np.all(np.diff(s) >= 0)
    assert np.allclose(log_sigmoid(z[1:4]), np.log(s[1:4]))
