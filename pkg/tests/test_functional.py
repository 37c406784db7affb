"""Dirichlet forms, log-Sobolev estimates and generalized-depolarizing SDPI."""

import math

import numpy as np
import pytest

from qsdpi.channels import depolarizing, replacer
from qsdpi.errors import KernelMismatch, SingularSigma
from qsdpi.functional import (
    SemigroupGenerator,
    compare_dirichlet,
    depolarizing_sdpi_constant,
    dirichlet_form,
    discrete_dirichlet_form,
    ent2,
    estimate_lsi,
    lsi_depolarizing,
)

Z = np.diag([1.0, -1.0]).astype(complex)
I2 = np.eye(2, dtype=complex)


def _dep_gen(p, d=2):
    return SemigroupGenerator(depolarizing(p, d), np.eye(d, dtype=complex) / d)


def test_generator_basics():
    gen = _dep_gen(0.3)
    assert gen.reversible
    assert gen.primitive
    # S annihilates the identity and acts as -p on traceless observables
    assert np.allclose(gen.apply_s(I2), 0.0, atol=1e-12)
    assert np.allclose(gen.apply_s(Z), -0.3 * Z, atol=1e-12)
    # semigroup interpolates: P_t(Z) = e^{-pt} Z
    from qsdpi.numerics import unvec, vec

    out = unvec(gen.heisenberg_at(2.0) @ vec(Z), 2)
    assert np.allclose(out, math.exp(-0.6) * Z, atol=1e-12)


def test_generator_rejects_bad_input():
    with pytest.raises(KernelMismatch):
        SemigroupGenerator(depolarizing(0.3), np.diag([0.9, 0.1]))
    with pytest.raises(SingularSigma):
        SemigroupGenerator(replacer(np.diag([1.0, 0.0]).astype(complex)),
                           np.diag([1.0, 0.0]))


def test_dirichlet_form_depolarizing():
    # E(Z, Z) = p <Z, Z>_sigma = p * Tr(sigma Z^2) = p at sigma = I/2.
    for p in (0.2, 0.7):
        gen = _dep_gen(p)
        assert dirichlet_form(gen, Z) == pytest.approx(p, abs=1e-12)
        assert dirichlet_form(gen, I2) == pytest.approx(0.0, abs=1e-12)


def test_discrete_dirichlet_form():
    # id - N* hat N* acts as 1 - (1-p)^2 on traceless observables.
    p = 0.3
    val = discrete_dirichlet_form(depolarizing(p), I2 / 2, Z)
    assert val == pytest.approx(1.0 - (1.0 - p) ** 2, abs=1e-12)


def test_ent2_values():
    assert ent2(I2 / 2, Z) == pytest.approx(0.0, abs=1e-12)
    # G = diag(1, 0): Ent = Tr G ln G - Tr G ln sigma - Tr G ln Tr G = ln 2
    X = np.diag([math.sqrt(2.0), 0.0]).astype(complex)
    assert ent2(I2 / 2, X) == pytest.approx(math.log(2.0), abs=1e-10)
    assert ent2(I2 / 2, np.zeros((2, 2))) == 0.0
    with pytest.raises(SingularSigma):
        ent2(np.diag([1.0, 0.0]), Z)


def test_lsi_depolarizing_closed_form():
    assert lsi_depolarizing(2) == 1.0
    assert lsi_depolarizing(4) == pytest.approx(1.0 / math.log(3.0), abs=1e-12)
    assert lsi_depolarizing(4) == pytest.approx(0.9102392266, abs=1e-9)
    with pytest.raises(SingularSigma):
        lsi_depolarizing(1)


def test_estimate_lsi_qubit_depolarizing():
    # The variational infimum for the unit-rate qubit depolarizing semigroup
    # under this normalization is the two-point Bobkov constant 1/2.
    gen = _dep_gen(1.0)
    val = estimate_lsi(gen, restarts=6, seed=0)
    assert val <= 1.0 + 1e-3
    assert val == pytest.approx(0.5, abs=5e-3)


def test_compare_dirichlet_depolarizing_ratio():
    g1 = _dep_gen(0.6)
    g2 = _dep_gen(0.3)
    out = compare_dirichlet(g1, g2)
    assert out["lam"] == pytest.approx(2.0, abs=1e-9)
    assert "alpha(gen2) >= alpha(gen1) / 2" in out["lsi_transfer"]
    assert compare_dirichlet(g1, g1)["lam"] == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(KernelMismatch):
        compare_dirichlet(g1, SemigroupGenerator(depolarizing(0.3, 3),
                                                 np.eye(3) / 3))


def test_depolarizing_sdpi_constant():
    for p in (0.2, 0.5, 0.8):
        assert depolarizing_sdpi_constant(p, I2 / 2) == \
            pytest.approx((1.0 - p) ** 2, abs=1e-12)
    # skewed sigma: alpha < 1 strictly, so the constant exceeds (1-p)^2
    val = depolarizing_sdpi_constant(0.5, np.diag([0.9, 0.1]))
    assert (1.0 - 0.5) ** 2 < val < (1.0 - 0.5)
    with pytest.raises(SingularSigma):
        depolarizing_sdpi_constant(0.3, np.diag([1.0, 0.0]))
