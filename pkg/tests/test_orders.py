"""Partial-order verdicts: degradability certification, falsifiers for the
less-noisy family, and the approximate-order level report."""

import numpy as np
import pytest

from qsdpi.channels import (
    amplitude_damping,
    complementary_channel,
    compose,
    depolarizing,
    erasure,
    identity_channel,
)
from qsdpi.divergences import eps_hat, eps_tilde, relative_entropy
from qsdpi.errors import DimensionMismatch, DimensionTooLarge
from qsdpi.orders import (
    approx_orders_from_diamond,
    check_complete_ln,
    check_degradable,
    check_regularized_ln,
    falsify_less_noisy,
    render_approx_orders,
)


def test_check_degradable_constructed_pair():
    M = depolarizing(0.2)
    N = compose(depolarizing(0.3), M)
    v = check_degradable(M, N)
    assert v.status == "certified"
    assert v.eps <= 1e-6
    # witness really degrades M to N
    theta = v.witness
    rng = np.random.default_rng(0)
    from qsdpi.numerics import random_density

    rho = random_density(2, rng)
    assert np.allclose(compose(theta, M)(rho), N(rho), atol=1e-5)


def test_check_degradable_erasure_complement():
    N = erasure(0.25, 2)
    v = check_degradable(N, complementary_channel(N))
    assert v.status == "certified"
    # reverse direction is not degradable at eps = 0.25 < 1/2
    v_rev = check_degradable(complementary_channel(N), N)
    assert v_rev.status == "undecided"
    assert v_rev.eps == pytest.approx(0.75, abs=1e-4)


def test_falsify_less_noisy_positive_case():
    # less noise cannot dominate more noise: dep(0.6) is not less noisy
    # than dep(0.2), and a random pair search finds a witness.
    M = depolarizing(0.6)
    N = depolarizing(0.2)
    v = falsify_less_noisy(M, N, trials=60, restarts=2, seed=0)
    assert v.status == "falsified"
    assert v.gap > 1e-6
    # re-evaluating the defining inequality at the witness reproduces it
    rho, sig = v.witness
    gap = float(relative_entropy(N(rho), N(sig))) - \
        float(relative_entropy(M(rho), M(sig)))
    assert gap >= v.gap - 1e-8


def test_falsify_less_noisy_true_order_stays_undecided():
    M = depolarizing(0.2)
    N = compose(depolarizing(0.4), M)
    v = falsify_less_noisy(M, N, trials=60, restarts=2, seed=0)
    assert v.status == "undecided"
    assert v.gap <= 1e-8


def test_falsify_variants_and_anti():
    M = depolarizing(0.6)
    N = depolarizing(0.2)
    for variant in ("fq", "mc", "mc_fq"):
        v = falsify_less_noisy(M, N, variant=variant, trials=40, seed=1)
        assert v.status == "falsified", variant
    # anti variant swaps the roles: N anti-dominating M is falsifiable too
    v = falsify_less_noisy(N, M, variant="anti_ln", trials=40,
                           restarts=1, seed=1)
    assert v.kind == "anti_ln"
    assert v.status == "falsified"
    with pytest.raises(DimensionMismatch):
        falsify_less_noisy(M, N, variant="nope")
    with pytest.raises(DimensionMismatch):
        falsify_less_noisy(erasure(0.2, 2), depolarizing(0.1, 3))


def test_check_regularized_ln():
    M = depolarizing(0.6)
    N = depolarizing(0.2)
    out = check_regularized_ln(M, N, n_max=2, trials=40, seed=0)
    assert set(out) == {1, 2}
    assert out[1].status == "falsified"
    assert out[1].kind == "ln_reg(1)"
    with pytest.raises(DimensionTooLarge):
        check_regularized_ln(M, N, n_max=4)


def test_check_complete_ln():
    M = depolarizing(0.6)
    N = depolarizing(0.2)
    v = check_complete_ln(M, N, trials=40, seed=0)
    assert v.status == "falsified"
    v2 = check_complete_ln(depolarizing(0.2),
                           compose(depolarizing(0.4), depolarizing(0.2)),
                           trials=30, seed=0)
    assert v2.status == "undecided"
    assert "dimR=2" in v2.kind


def test_approx_orders_report_levels():
    M = amplitude_damping(0.3)
    N = compose(depolarizing(0.15), M)
    rep = approx_orders_from_diamond(M, N)
    assert rep["eps_deg"] <= 1e-6
    assert rep["eps_tilde"] == pytest.approx(
        float(eps_tilde(min(rep["eps_deg"], 1.0), 2)))
    assert rep["eps_hat"] == pytest.approx(
        float(eps_hat(min(rep["eps_deg"], 1.0), 2)))
    assert "diamond_distance" in rep
    assert rep["comparable_eps_tilde"] >= 0.0

    text = render_approx_orders(rep)
    assert "eps_deg" in text and "implication chain" in text
    assert text == render_approx_orders(rep)


def test_order_verdict_render():
    v = check_degradable(depolarizing(0.2),
                         compose(depolarizing(0.3), depolarizing(0.2)))
    text = v.render()
    assert text.startswith("order deg: certified")
    assert "eps =" in text
