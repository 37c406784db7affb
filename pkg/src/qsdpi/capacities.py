"""One-shot information quantities and approximate capacity bounds.

All optimized quantities are lower bounds produced by multi-start search;
reports pair them with the formula bounds without conflating the two.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .channels import complementary_channel, state_matrix
from .contraction import StateParameterization
from .divergences import eps_hat, eps_tilde, von_neumann_entropy
from .errors import InvalidParameter, UnknownKind


@dataclass
class EnsembleCQ:
    probabilities: np.ndarray
    states: list

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if abs(p.sum() - 1) > 1e-12 or np.any(p < -1e-15):
            raise InvalidParameter("ensemble probabilities must form a pmf")
        self.probabilities = p


def ensemble_mutual_information(ensemble, channel=None):
    """I(U:B) of the cq state sum_u p_u |u><u| (x) N(rho_u)."""
    p = ensemble.probabilities
    outs = [state_matrix(s) if channel is None else channel(s)
            for s in ensemble.states]
    avg = sum(pi * o for pi, o in zip(p, outs))
    return von_neumann_entropy(avg) - sum(
        pi * von_neumann_entropy(o) for pi, o in zip(p, outs) if pi > 0)


def coherent_information(N, rho):
    """I_c(rho, N) = H(N(rho)) - H(N^c(rho))."""
    Nc = complementary_channel(N)
    rho = state_matrix(rho)
    return von_neumann_entropy(N(rho)) - von_neumann_entropy(Nc(rho))


def q1(N, restarts=10, seed=0):
    """Lower bound on the one-shot quantum capacity max_rho I_c(rho, N)."""
    Nc = complementary_channel(N)
    par = StateParameterization(N.dim_in)

    def neg(x):
        rho = par.decode(x)
        return -(von_neumann_entropy(N(rho)) - von_neumann_entropy(Nc(rho)))

    best = -neg(np.concatenate([np.eye(N.dim_in).reshape(-1),
                                np.zeros(N.dim_in ** 2)]))
    for r in range(restarts):
        rng = np.random.default_rng(seed * 48271 + r)
        res = minimize(neg, par.random(rng), method="Nelder-Mead",
                       options={"maxiter": 400, "fatol": 1e-10})
        best = max(best, -res.fun)
    return float(best)


def _decode_ensemble(x, size, dim):
    """Softmax probabilities + normalized complex vectors -> pure ensemble."""
    w = x[:size]
    w = np.exp(w - w.max())
    p = w / w.sum()
    states = []
    off = size
    for _ in range(size):
        v = x[off:off + dim] + 1j * x[off + dim:off + 2 * dim]
        off += 2 * dim
        nrm = np.linalg.norm(v)
        v = v / nrm if nrm > 1e-12 else np.eye(dim)[0]
        states.append(np.outer(v, v.conj()))
    return EnsembleCQ(p, states)


def _basis_ensemble(dim):
    eye = np.eye(dim)
    return EnsembleCQ(np.full(dim, 1.0 / dim),
                      [np.outer(eye[i], eye[i]).astype(complex)
                       for i in range(dim)])


def _optimize_ensembles(objective, dim, ensemble_size, restarts, seed):
    n = ensemble_size + 2 * dim * ensemble_size
    best = objective(_basis_ensemble(dim))

    def neg(x):
        return -objective(_decode_ensemble(x, ensemble_size, dim))

    for r in range(restarts):
        rng = np.random.default_rng(seed * 16807 + r)
        res = minimize(neg, rng.standard_normal(n), method="Nelder-Mead",
                       options={"maxiter": 400, "fatol": 1e-10})
        best = max(best, -res.fun)
    return float(best)


def holevo_chi(N, ensemble_size=None, restarts=10, seed=0):
    """Lower bound on the Holevo quantity of N."""
    size = ensemble_size or N.dim_in ** 2
    if size < 2:
        raise InvalidParameter("ensemble_size must be at least 2")
    return _optimize_ensembles(
        lambda e: ensemble_mutual_information(e, N), N.dim_in, size,
        restarts, seed)


def private_info_p1(N, ensemble_size=None, restarts=10, seed=0):
    """Lower bound on the one-shot private information: max ensembles of
    pure states of I(X:B) - I(X:E).  The trivial ensemble gives 0, so the
    bound is never negative."""
    size = ensemble_size or N.dim_in ** 2
    if size < 2:
        raise InvalidParameter("ensemble_size must be at least 2")
    Nc = complementary_channel(N)
    val = _optimize_ensembles(
        lambda e: (ensemble_mutual_information(e, N)
                   - ensemble_mutual_information(e, Nc)),
        N.dim_in, size, restarts, seed)
    return max(val, 0.0)


def capacity_bounds(kind, eps, dim_b=2, weakly_additive=False):
    """Numeric right-hand sides of the capacity inequalities implied by an
    (approximate) order at level ``eps``.

    ``kind`` selects which order the level refers to.  For the degradation
    kinds the derived levels come from the continuity bounds eps_tilde and
    eps_hat at output dimension ``dim_b``.
    """
    if eps < 0:
        raise InvalidParameter("eps must be nonnegative")
    ineqs = []
    if kind in ("mc", "reg_mc", "fq_ln", "c_ln"):
        label = {"mc": "more capable", "reg_mc": "regularized more capable",
                 "fq_ln": "fully quantum less noisy", "c_ln": "completely less noisy"}[kind]
        ineqs.append((f"Q1(N) <= P1(N)   [{label}, eps = {eps:g}]", 0.0))
        ineqs.append(("P1(N) - Q1(N) <= eps", eps))
        if kind == "c_ln":
            note = "requires N weakly additive" if not weakly_additive else \
                "weak additivity asserted by caller"
            ineqs.append((f"C(N) - chi(N) <= 2*eps   [{note}]", 2 * eps))
    elif kind == "deg":
        et = eps_tilde(eps, dim_b)
        eh = eps_hat(eps, dim_b)
        ineqs.append(("P1(N) - Q1(N) <= eps_hat(eps_deg, |B|)", eh))
        ineqs.append(("P(N) - Q(N) <= eps_tilde(eps_deg, |B|)", et))
    elif kind == "anti_deg":
        et = eps_tilde(eps, dim_b)
        ineqs.append(("Q(N) <= eps_tilde(eps_deg, |B|)", et))
    elif kind in ("anti_mc", "anti_ln"):
        ineqs.append(("Q1(N) <= eps", eps))
    else:
        raise UnknownKind(f"unknown capacity bound kind {kind!r}")
    return ineqs


def render_capacity_bounds(kind, eps, dim_b=2, weakly_additive=False):
    lines = [f"capacity bounds from order kind {kind!r} at eps = {eps:.9g}:"]
    for text, rhs in capacity_bounds(kind, eps, dim_b, weakly_additive):
        lines.append(f"  {text}: rhs = {rhs:.9g}")
    return "\n".join(lines)
