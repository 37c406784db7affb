import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qsdpi.errors import FunctionUndefined, NonHermitian
from qsdpi.numerics import (
    conjugation_superop,
    dagger,
    check_hermitian,
    frob,
    hermitian_eig,
    hermitian_matrix_function,
    partial_trace,
    random_density,
    random_hermitian,
    trace_norm,
    unvec,
    vec,
)


def rng_for(seed):
    return np.random.default_rng(seed)


def test_vec_unvec_roundtrip():
    A = rng_for(3).standard_normal((4, 4)) + 1j * rng_for(4).standard_normal((4, 4))
    assert np.allclose(unvec(vec(A), 4), A)


def test_vec_is_column_stacking():
    A = np.array([[1, 2], [3, 4]])
    assert np.array_equal(vec(A), np.array([1, 3, 2, 4]))


def test_conjugation_superop_matches_sandwich():
    rng = rng_for(7)
    K = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    X = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    assert np.allclose(unvec(conjugation_superop(K) @ vec(X), 3),
                       K @ X @ dagger(K))


def test_partial_trace_tensor_product():
    rng = rng_for(11)
    a = random_density(2, rng)
    b = random_density(3, rng)
    ab = np.kron(a, b)
    assert np.allclose(partial_trace(ab, (2, 3), keep=(0,)), a)
    assert np.allclose(partial_trace(ab, (2, 3), keep=(1,)), b)


def test_partial_trace_three_factors():
    rng = rng_for(13)
    parts = [random_density(d, rng) for d in (2, 2, 3)]
    full = np.kron(np.kron(parts[0], parts[1]), parts[2])
    got = partial_trace(full, (2, 2, 3), keep=(0, 2))
    assert np.allclose(got, np.kron(parts[0], parts[2]), atol=1e-12)


def test_hermitian_eig_descending():
    vals, vecs = hermitian_eig(np.diag([1.0, 3.0, 2.0]))
    assert np.allclose(vals, [3.0, 2.0, 1.0])
    assert np.allclose(vecs @ np.diag(vals) @ dagger(vecs), np.diag([1, 3, 2.0]))


def test_check_hermitian_raises():
    with pytest.raises(NonHermitian):
        check_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_matrix_function_strict_policy():
    A = np.diag([1.0, 0.0])
    with pytest.raises(FunctionUndefined):
        with np.errstate(divide="ignore"):
            hermitian_matrix_function(A, np.log, zero_policy="strict")


def test_matrix_function_skip_policy_matches_spectral_sum():
    rng = rng_for(17)
    A = random_density(3, rng)
    lg = hermitian_matrix_function(A, np.log, zero_policy="skip")
    vals, vecs = hermitian_eig(A)
    direct = vecs @ np.diag(np.log(vals)) @ dagger(vecs)
    assert np.allclose(lg, direct, atol=1e-10)


def test_trace_norm_vs_eigenvalues():
    H = np.diag([2.0, -3.0, 0.5])
    assert trace_norm(H) == pytest.approx(5.5)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_random_density_valid(seed):
    rho = random_density(3, np.random.default_rng(seed))
    vals = np.linalg.eigvalsh(rho)
    assert vals.min() > -1e-12
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_random_hermitian_is_hermitian(seed):
    H = random_hermitian(4, np.random.default_rng(seed))
    assert frob(H - dagger(H)) < 1e-12
