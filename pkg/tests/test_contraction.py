"""Contraction coefficients: closed forms, bound calculus, Petz recovery,
hypercontractivity windows and the derived SDPI slopes."""

import math

import numpy as np
import pytest

from qsdpi.channels import (
    QuantumChannel,
    compose,
    depolarizing,
    dephasing_z,
    erasure,
    identity_channel,
    replacer,
)
from qsdpi.contraction import (
    Compose,
    Flag,
    Leaf,
    Tensor,
    closed_form_eta,
    domination_factor,
    estimate_eta,
    eta_bounds,
    hypercontractivity_window,
    moe_lower_bound,
    pauli_transfer_block,
    petz_recovery,
    sdpi_from_pq,
    spectral_gap,
    two_two_condition,
)
from qsdpi.errors import MissingLeafCoefficient, NoClosedForm, OutOfRange
from qsdpi.divergences import binary_entropy
from qsdpi.numerics import random_density


def test_closed_forms():
    assert closed_form_eta("depolarizing", p=0.3) == pytest.approx(0.49)
    assert closed_form_eta("dephasing_z", p=0.2) == 1.0
    assert closed_form_eta("erasure", eps=0.4) == pytest.approx(0.6)
    assert closed_form_eta("erasure_power", eps=0.4, n=3) == \
        pytest.approx(1.0 - 0.4 ** 3)
    assert closed_form_eta("dephrasure", eps=0.25, p=0.1) == pytest.approx(0.75)
    assert closed_form_eta("replacer") == 0.0
    assert closed_form_eta("identity") == 1.0
    with pytest.raises(NoClosedForm):
        closed_form_eta("amplitude_damping", gamma=0.3)


def test_unital_qubit_closed_form_matches_depolarizing():
    ch = depolarizing(0.35)
    # Bloch block is (1-p) I, squared 2->2 norm is (1-p)^2.
    T = pauli_transfer_block(ch)
    assert np.allclose(T, 0.65 * np.eye(3), atol=1e-12)
    assert closed_form_eta("unital_qubit", channel=ch) == pytest.approx(0.65 ** 2)


def test_estimate_eta_lower_bounds_depolarizing():
    for p in (0.3, 0.6):
        est = estimate_eta(depolarizing(p), restarts=8, seed=1)
        target = (1.0 - p) ** 2
        assert est.value_lower <= target + 1e-7
        assert est.value_lower >= target - 5e-3


def test_estimate_eta_erasure():
    est = estimate_eta(erasure(0.25, 2), restarts=6, seed=2)
    assert est.value_lower == pytest.approx(0.75, abs=1e-4)


def test_eta_bounds_compose_and_flag():
    lo, hi = eta_bounds(Compose([Leaf(0.5), Leaf(0.3)]))
    assert lo == 0.0 and hi == pytest.approx(0.15)

    lo, hi = eta_bounds(Flag([0.4, 0.6], [Leaf(0.5), Leaf(1.0)]))
    assert hi == pytest.approx(0.4 * 0.5 + 0.6 * 1.0)
    with pytest.raises(OutOfRange):
        eta_bounds(Flag([0.4, 0.4], [Leaf(0.5), Leaf(1.0)]))
    with pytest.raises(MissingLeafCoefficient):
        eta_bounds(Leaf(None, family="mystery"))


def test_eta_bounds_tensor_rules():
    # replacer factors drop out entirely
    lo, hi = eta_bounds(Tensor([Leaf(0.0, family="replacer"),
                                Leaf(0.49, family="depolarizing",
                                     params={"p": 0.3})]))
    assert (lo, hi) == (pytest.approx(0.49), pytest.approx(0.49))

    # pure erasure tensor: 1 - prod eps
    e1 = Leaf(0.7, family="erasure", params={"eps": 0.3})
    e2 = Leaf(0.5, family="erasure", params={"eps": 0.5})
    lo, hi = eta_bounds(Tensor([e1, e2]))
    assert hi == pytest.approx(1.0 - 0.3 * 0.5)
    assert lo == pytest.approx(0.7)

    # erasure (x) qubit depolarizing carries the classical witness lower bound
    eps, p = 0.4, 0.3
    dep = Leaf((1 - p) ** 2, family="depolarizing", params={"p": p})
    era = Leaf(1 - eps, family="erasure", params={"eps": eps})
    lo, hi = eta_bounds(Tensor([era, dep]))
    expected_lower = 1.0 - eps * binary_entropy(p / 2) / math.log(2)
    assert lo == pytest.approx(expected_lower)
    assert hi == pytest.approx((1 - eps) + eps * (1 - p) ** 2)
    assert lo <= hi + 1e-12


def test_petz_recovery_fixed_point_and_unitary():
    rng = np.random.default_rng(7)
    N = depolarizing(0.4)
    sigma = random_density(2, rng)
    R = petz_recovery(N, sigma)
    assert np.allclose(R(N(sigma)), sigma, atol=1e-10)

    # Petz recovery of a unitary channel is its inverse.
    theta = 0.7
    U = np.array([[math.cos(theta), -math.sin(theta)],
                  [math.sin(theta), math.cos(theta)]], dtype=complex)
    ch = QuantumChannel([U])
    R = petz_recovery(ch, sigma)
    rho = random_density(2, rng)
    assert np.allclose(R(ch(rho)), rho, atol=1e-10)


def test_domination_factor_erasure_pair():
    # eta(erasure 0.25) / eta(erasure 0.75) witnessed ratio: the best
    # two-point pair gives (1 - 0.25)/(1 - 0.75) = 3 in the classical limit.
    M = erasure(0.75, 2)
    N = erasure(0.25, 2)
    est = domination_factor(M, N, restarts=8, seed=3)
    assert est.value_lower == pytest.approx(3.0, rel=5e-3)


def test_hypercontractivity_window_identity():
    sigma = np.eye(2, dtype=complex) / 2
    out = hypercontractivity_window(identity_channel(2), sigma, 1.0,
                                    [0.5, 1.0], restarts=3, seed=0)
    for v in out.values():
        assert v == pytest.approx(1.0, abs=5e-3)


def test_hypercontractivity_window_depolarizing():
    sigma = np.eye(2, dtype=complex) / 2
    ch = depolarizing(0.5)
    ok = hypercontractivity_window(ch, sigma, 0.25, [1.0], restarts=5, seed=0)
    assert ok[1.0] <= 1.0 + 1e-6
    # Claiming a stronger contraction (eta below the true coefficient)
    # breaks the norm inequality.
    bad = hypercontractivity_window(ch, sigma, 0.1, [1.0], restarts=5, seed=0)
    assert bad[1.0] > 1.0 + 1e-4


def test_two_two_condition_self_is_one():
    sigma = np.diag([0.7, 0.3]).astype(complex)
    ch = depolarizing(0.3)
    assert two_two_condition(ch, ch, sigma) == pytest.approx(1.0, abs=1e-8)


def test_spectral_gap_depolarizing():
    assert spectral_gap(depolarizing(0.3)) == pytest.approx(0.3, abs=1e-10)
    assert spectral_gap(identity_channel(2)) == pytest.approx(0.0, abs=1e-10)


def test_moe_lower_bound_value():
    p, n = 0.5, 2
    expected = n * (1.0 - math.exp((1 - 1 / n) * math.log(p) / math.log(n)))
    assert moe_lower_bound(p, n) == pytest.approx(expected, abs=1e-12)
    assert moe_lower_bound(0.5, 2) == pytest.approx(0.7869386806, abs=1e-9)
    with pytest.raises(OutOfRange):
        moe_lower_bound(0.0, 2)
    with pytest.raises(OutOfRange):
        moe_lower_bound(0.5, 1)


def test_sdpi_from_pq_slope():
    slope, add = sdpi_from_pq(1.5, 2.0, C=1.0)
    assert slope == pytest.approx(0.5 * 2.0 / (1.5 * 1.0))
    assert add == 0.0
    slope, add = sdpi_from_pq(1.5, 2.0, C=math.e)
    assert add == pytest.approx(2.0)
    with pytest.raises(OutOfRange):
        sdpi_from_pq(1.0, 2.0, C=1.0)
