"""Distinguishability measures.

Entropies, relative entropy evaluated through the spectral double sum
(well defined for arbitrary positive operators), sandwiched Renyi
divergences, sigma-weighted p-norms, standard and maximal f-divergences,
the chi-squared family, min-entropy, and the scalar continuity bounds
used by the approximate channel orders.

Everything is in nats.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .channels import state_matrix
from .errors import (DimensionMismatch, OutOfRange, SingularSigma,
                     SupportViolation)
from .numerics import (CLIP_REL, clip_threshold, dagger, hermitian_eig,
                       hermitian_matrix_function, partial_trace)

#: Mass of rho outside the support of sigma above which the support
#: condition counts as violated.
SUPPORT_TOL = 1e-9
#: Regularization weight of the maximally mixed state in "regularized" mode.
REG_MIX = 1e-12


@dataclass
class DivergenceValue:
    """Extended-real divergence value with a support diagnostic."""

    value: float
    support_ok: bool = True
    residual: float = 0.0

    def __float__(self):
        return float(self.value)

    @property
    def finite(self):
        return math.isfinite(self.value)


@dataclass
class SpectralPair:
    """Joint eigendata of a state pair plus the squared-overlap matrix."""

    eig_rho: tuple
    eig_sigma: tuple
    overlap: np.ndarray = field(repr=False)


def spectral_pair(rho, sigma):
    rho = state_matrix(rho)
    sigma = state_matrix(sigma)
    if rho.shape != sigma.shape:
        raise DimensionMismatch("states live on different spaces")
    a, Va = hermitian_eig(rho)
    b, Vb = hermitian_eig(sigma)
    O = np.abs(dagger(Va) @ Vb) ** 2
    return SpectralPair((a, Va), (b, Vb), O)


def _xlogx(x):
    out = np.zeros_like(x, dtype=float)
    pos = x > 0
    out[pos] = x[pos] * np.log(x[pos])
    return out


def von_neumann_entropy(rho):
    """H(rho) = -Tr rho ln rho in nats."""
    vals, _ = hermitian_eig(state_matrix(rho))
    vals = np.clip(vals, 0.0, None)
    return float(-np.sum(_xlogx(vals)))


def conditional_entropy(rho_ab, dims):
    """H(A|B) = H(AB) - H(B)."""
    rho_ab = state_matrix(rho_ab)
    rho_b = partial_trace(rho_ab, dims, keep=[1])
    return von_neumann_entropy(rho_ab) - von_neumann_entropy(rho_b)


def mutual_information(rho_ab, dims):
    """I(A:B) = H(A) + H(B) - H(AB)."""
    rho_ab = state_matrix(rho_ab)
    rho_a = partial_trace(rho_ab, dims, keep=[0])
    rho_b = partial_trace(rho_ab, dims, keep=[1])
    return (von_neumann_entropy(rho_a) + von_neumann_entropy(rho_b)
            - von_neumann_entropy(rho_ab))


def relative_entropy(rho, sigma, policy="strict", clip_rel=CLIP_REL,
                     support_tol=SUPPORT_TOL):
    """Relative entropy D(rho||sigma) via the spectral double sum

        sum_ij |<a_i|b_j>|^2 (a_i ln a_i - a_i ln b_j + b_j - a_i),

    which extends to arbitrary positive operators.  ``policy`` controls
    what happens when rho has mass outside the support of sigma:
    "strict" returns +inf, "regularized" mixes sigma with a sliver of
    the maximally mixed state and reports the offending mass as residual.
    """
    sp = spectral_pair(rho, sigma)
    a, _ = sp.eig_rho
    b, _ = sp.eig_sigma
    O = sp.overlap
    d = len(a)
    a = np.clip(a, 0.0, None)
    b = np.clip(b, 0.0, None)
    thr_b = clip_threshold(b, clip_rel)
    ker = b <= thr_b
    residual = float(np.sum(O[:, ker] * a[:, None])) if ker.any() else 0.0
    support_ok = residual <= support_tol
    if not support_ok:
        if policy == "strict":
            return DivergenceValue(math.inf, False, residual)
        b = (b + REG_MIX / d) / (1.0 + REG_MIX)
    B = np.where(b > 0, b, np.finfo(float).tiny)
    term = O * (_xlogx(a)[:, None] - np.outer(a, np.log(B)) + b[None, :]
                - a[:, None])
    if support_ok and ker.any():
        # zero-against-zero cells carry no divergence mass
        cell = np.outer(a <= clip_threshold(a, clip_rel), ker)
        term = np.where(cell, O * b[None, :], term)
    return DivergenceValue(float(np.sum(term)), support_ok, residual)


def sandwiched_renyi(rho, sigma, p, clip_rel=CLIP_REL):
    """Sandwiched Renyi divergence of order p in nats."""
    if p <= 0 or p == 1:
        raise OutOfRange(f"sandwiched Renyi order p = {p} outside (0,1)u(1,inf)")
    rho = state_matrix(rho)
    sigma = state_matrix(sigma)
    if p > 1:
        dv = relative_entropy(rho, sigma, policy="strict", clip_rel=clip_rel)
        if not dv.support_ok:
            raise SupportViolation(
                "supp(rho) not within supp(sigma); D_p infinite for p > 1"
            )
    e = (1.0 - p) / (2.0 * p)
    S = hermitian_matrix_function(sigma, lambda x: x ** e, zero_policy="skip",
                                  clip_rel=clip_rel)
    M = S @ rho @ S
    vals, _ = hermitian_eig(M)
    vals = np.clip(vals, 0.0, None)
    Q = float(np.sum(vals ** p))
    return DivergenceValue(math.log(Q) / (p - 1.0))


def weighted_norm(X, p, sigma, clip_rel=CLIP_REL):
    """Sigma-weighted norm ||X||_{p,sigma} = (tr |sigma^{1/2p} X sigma^{1/2p}|^p)^{1/p}."""
    sigma = state_matrix(sigma)
    vals, _ = hermitian_eig(sigma)
    if vals[-1] <= clip_threshold(vals, clip_rel):
        raise SingularSigma("weighted norm needs a full-rank sigma")
    S = hermitian_matrix_function(sigma, lambda x: x ** (1.0 / (2.0 * p)))
    M = S @ np.asarray(X, dtype=complex) @ S
    sv = np.linalg.svd(M, compute_uv=False)
    return float(np.sum(sv ** p) ** (1.0 / p))


# -- f-divergences ----------------------------------------------------------

@dataclass(frozen=True)
class ConvexFunction:
    """Scalar convex function with the limits needed at the edges:
    ``at_zero`` = f(0+), ``slope_inf`` = lim_{w->inf} f(w)/w.
    """

    name: str
    fn: callable
    at_zero: float
    slope_inf: float

    def __call__(self, w):
        return self.fn(w)


XLNX = ConvexFunction("xlnx", lambda w: w * math.log(w), 0.0, math.inf)
SQUARE = ConvexFunction("(x-1)^2", lambda w: (w - 1.0) ** 2, 1.0, math.inf)


def power_function(s):
    """f(w) = (w^s - 1)/(s(s-1)) for Renyi-related uses; convex, f(1)=0."""
    if s in (0.0, 1.0):
        raise OutOfRange("power exponent must avoid {0, 1}")
    c = 1.0 / (s * (s - 1.0))
    at_zero = -c if s > 0 else math.inf
    slope_inf = math.inf if s > 1 else (0.0 if s > 0 else 0.0)
    return ConvexFunction(f"power({s})", lambda w: (w ** s - 1.0) * c,
                          at_zero, slope_inf)


def f_divergence(rho, sigma, f, variant="standard", clip_rel=CLIP_REL,
                 support_tol=SUPPORT_TOL):
    """Standard (relative-modular) or maximal f-divergence."""
    if variant == "standard":
        sp = spectral_pair(rho, sigma)
        a, _ = sp.eig_rho
        b, _ = sp.eig_sigma
        O = sp.overlap
        a = np.clip(a, 0.0, None)
        b = np.clip(b, 0.0, None)
        thr_a = clip_threshold(a, clip_rel)
        thr_b = clip_threshold(b, clip_rel)
        residual = 0.0
        total = 0.0
        for i in range(len(a)):
            for j in range(len(b)):
                w = O[i, j]
                if w < 1e-16:
                    continue
                if b[j] > thr_b:
                    x = a[i] / b[j] if a[i] > thr_a else 0.0
                    total += w * b[j] * (f.fn(x) if x > 0 else f.at_zero)
                elif a[i] > thr_a:
                    residual += w * a[i]
                    total += w * a[i] * f.slope_inf if math.isfinite(f.slope_inf) else 0.0
        if residual > support_tol and not math.isfinite(f.slope_inf):
            return DivergenceValue(math.inf, False, residual)
        return DivergenceValue(float(total), residual <= support_tol, residual)
    if variant == "maximal":
        sigma = state_matrix(sigma)
        rho = state_matrix(rho)
        dv = relative_entropy(rho, sigma, policy="strict", clip_rel=clip_rel)
        if not dv.support_ok and not math.isfinite(f.slope_inf):
            return DivergenceValue(math.inf, False, dv.residual)
        S = hermitian_matrix_function(sigma, lambda x: x ** -0.5,
                                      zero_policy="skip", clip_rel=clip_rel)
        R = S @ rho @ S
        fR = hermitian_matrix_function(
            R, lambda x: f.fn(x) if x > 0 else f.at_zero,
            zero_policy="strict", clip_rel=clip_rel)
        return DivergenceValue(float(np.real(np.trace(sigma @ fR))),
                               dv.support_ok, dv.residual)
    raise OutOfRange(f"unknown f-divergence variant {variant!r}")


# -- chi-squared family ------------------------------------------------------

@dataclass(frozen=True)
class KernelFunction:
    """k_alpha(w) = (w^-alpha + w^(alpha-1))/2 for alpha in [0, 1]."""

    alpha: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise OutOfRange(f"kernel alpha = {self.alpha} outside [0, 1]")

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        return 0.5 * (w ** (-self.alpha) + w ** (self.alpha - 1.0))


def chi2_divergence(rho, sigma, k=KernelFunction(0.5), clip_rel=CLIP_REL,
                    support_tol=SUPPORT_TOL):
    """chi^2_k(rho, sigma) evaluated in sigma's eigenbasis."""
    rho = state_matrix(rho)
    sigma = state_matrix(sigma)
    s, V = hermitian_eig(sigma)
    s = np.clip(s, 0.0, None)
    thr = clip_threshold(s, clip_rel)
    D = dagger(V) @ (rho - sigma) @ V
    supp = s > thr
    residual = float(np.real(np.trace(
        dagger(V[:, ~supp]) @ rho @ V[:, ~supp]))) if (~supp).any() else 0.0
    if residual > support_tol:
        return DivergenceValue(math.inf, False, residual)
    idx = np.where(supp)[0]
    total = 0.0
    for i in idx:
        for j in idx:
            total += abs(D[i, j]) ** 2 * float(k(s[i] / s[j])) / s[j]
    return DivergenceValue(float(total), True, residual)


# -- scalar continuity bounds ------------------------------------------------

def binary_entropy(x):
    if not 0.0 <= x <= 1.0:
        raise OutOfRange(f"binary entropy argument {x} outside [0, 1]")
    if x in (0.0, 1.0):
        return 0.0
    return float(-x * math.log(x) - (1 - x) * math.log(1 - x))


def eps_tilde(eps, dim_b):
    """2 eps ln|B| + (2+eps) h(eps/(2+eps))."""
    if not 0.0 <= eps <= 1.0:
        raise OutOfRange(f"eps = {eps} outside [0, 1]")
    return 2 * eps * math.log(dim_b) + (2 + eps) * binary_entropy(eps / (2 + eps))


def eps_hat(eps, dim_b):
    """eps/2 ln(|B|-1) + eps ln|B| + (1+eps/2) h(eps/(2+eps)) + h(eps/2)."""
    if not 0.0 <= eps <= 1.0:
        raise OutOfRange(f"eps = {eps} outside [0, 1]")
    lead = 0.0 if dim_b <= 1 else 0.5 * eps * math.log(dim_b - 1)
    return (lead + eps * math.log(dim_b)
            + (1 + eps / 2) * binary_entropy(eps / (2 + eps))
            + binary_entropy(eps / 2))


def audenaert_bound(eps, dim):
    """eps ln(d-1) + h(eps)."""
    if not 0.0 <= eps <= 1.0:
        raise OutOfRange(f"eps = {eps} outside [0, 1]")
    lead = 0.0 if dim <= 1 else eps * math.log(dim - 1)
    return lead + binary_entropy(eps)


def afw_bound(eps, dim_a):
    """2 eps ln|A| + (1+eps) h(eps/(1+eps))."""
    if not 0.0 <= eps <= 1.0:
        raise OutOfRange(f"eps = {eps} outside [0, 1]")
    return 2 * eps * math.log(dim_a) + (1 + eps) * binary_entropy(eps / (1 + eps))


def h_min(rho_ab, dims):
    """Conditional min-entropy H_min(A|B) in nats.

    Solved as the SDP min{Tr sigma_B : rho_AB <= I_A (x) sigma_B} in base 2
    and converted to nats at the boundary.
    """
    from .convex_opt import hmin_value

    return hmin_value(state_matrix(rho_ab), dims)
