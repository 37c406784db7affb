"""Weyl-covariant (additive) channels over Z_n x Z_n."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsdpi.channels import depolarizing, weyl_unitaries
from qsdpi.errors import InvalidParameter
from qsdpi.weyl import (
    PmfZnZn,
    additive_channel,
    check_ln_mixture,
    degradation_witness,
    gamma0,
    inverse_weyl_transform,
    mixture_pmf,
    omega_delta,
    read_pmf,
    shifted_pmf,
    weyl_eigenvalues,
    write_pmf,
)


def _random_pmf(n, rng):
    t = rng.dirichlet(np.ones(n * n)).reshape(n, n)
    return PmfZnZn(n, t)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=2, max_value=5), st.integers(min_value=0,
                                                          max_value=10 ** 6))
def test_transform_roundtrip(n, seed):
    rng = np.random.default_rng(seed)
    f = _random_pmf(n, rng)
    back = inverse_weyl_transform(weyl_eigenvalues(f))
    assert np.max(np.abs(back - f.table)) <= 1e-10


def test_eigenvalues_diagonalize_the_channel():
    # M_f(W_ab) = A_f(a,b) W_ab for every Weyl unitary.
    n = 3
    rng = np.random.default_rng(5)
    f = _random_pmf(n, rng)
    ch = additive_channel(f)
    A = weyl_eigenvalues(f)
    W = weyl_unitaries(n)
    for a in range(n):
        for b in range(n):
            out = sum(f.table[ap, bp]
                      * W[ap][bp] @ W[a][b] @ W[ap][bp].conj().T
                      for ap in range(n) for bp in range(n))
            assert np.allclose(out, A[a, b] * W[a][b], atol=1e-12)
            assert np.allclose(ch(W[a][b] / n + np.eye(n) / n) - np.eye(n) / n,
                               A[a, b] * W[a][b] / n, atol=1e-12)


def test_omega_delta_matches_depolarizing_choi():
    for n, delta in ((2, 0.2), (3, 0.4)):
        p = delta * n * n / (n * n - 1.0)
        ch = additive_channel(omega_delta(n, delta))
        assert np.allclose(ch.choi, depolarizing(p, n).choi, atol=1e-12)
    with pytest.raises(InvalidParameter):
        omega_delta(2, 1.2)


def test_degradation_witness_interval():
    # omega_delta -> omega_gamma succeeds exactly on
    # delta <= gamma <= 1 - delta/(n^2 - 1), here [0.2, 0.93333].
    n, delta = 2, 0.2
    lo, hi = delta, 1.0 - delta / (n * n - 1.0)
    f_delta = omega_delta(n, delta)
    for gamma in np.linspace(0.05, 0.99, 10):
        res = degradation_witness(omega_delta(n, gamma), f_delta)
        inside = lo - 1e-12 <= gamma <= hi + 1e-12
        assert res.ok == inside, f"gamma = {gamma}"
        if res.ok:
            # witness composes back: A_gamma = A_k * A_delta pointwise
            Ak = weyl_eigenvalues(res.pmf)
            assert np.allclose(Ak * weyl_eigenvalues(f_delta),
                               weyl_eigenvalues(omega_delta(n, gamma)),
                               atol=1e-9)
        else:
            assert "negative entry" in res.reason


def test_gamma0_value_and_witness_failure():
    assert gamma0(2, 0.3) == pytest.approx(
        0.7 / (0.7 + 0.3 / 9.0), abs=1e-12)
    # 0.954545... at n = 2, delta = 0.3 lies outside the degradation interval
    g0 = gamma0(2, 0.3)
    assert g0 == pytest.approx(0.9545454545, abs=1e-9)
    res = degradation_witness(omega_delta(2, g0), omega_delta(2, 0.3))
    assert not res.ok
    with pytest.raises(InvalidParameter):
        gamma0(2, 0.9)


def test_shift_and_mixture_pmf():
    f = omega_delta(2, 0.2)
    s = shifted_pmf(f, 1, 0)
    assert s.table[1, 0] == pytest.approx(0.8)
    m = mixture_pmf([(0.25, f), (0.75, s)])
    assert m.table.sum() == pytest.approx(1.0)
    with pytest.raises(InvalidParameter):
        mixture_pmf([(0.25, f), (0.25, s)])


def test_check_ln_mixture_small_budget():
    v = check_ln_mixture(2, 0.3, trials=200, seed=0)
    assert v.status == "undecided"
    assert v.gap <= 1e-6
    assert v.info["gamma0"] == pytest.approx(0.9545454545, abs=1e-9)
    assert v.info["gamma0_degradation_witness_exists"] is False
    assert "negative entry" in v.info["gamma0_degradation_failure"]


def test_pmf_file_roundtrip(tmp_path):
    f = omega_delta(3, 0.4)
    path = tmp_path / "pmf.txt"
    write_pmf(path, f)
    back = read_pmf(path)
    assert back.n == 3
    assert np.allclose(back.table, f.table, atol=1e-12)
