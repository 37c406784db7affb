"""Certify or falsify channel partial orders and their approximate versions.

Only degradability has an efficient certificate (an SDP); the remaining
orders are attacked by randomized falsifiers.  A falsifier that finds no
violating witness reports "undecided" together with its trial budget and
the largest gap seen -- it never upgrades to "certified".
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .capacities import EnsembleCQ, ensemble_mutual_information
from .channels import state_matrix, tensor_power
from .convex_opt import diamond_norm, min_degrading_eps
from .divergences import eps_hat, eps_tilde, mutual_information, relative_entropy
from .errors import DimensionMismatch, DimensionTooLarge
from .numerics import partial_trace, random_density

FALSIFY_GAP = 1e-6


@dataclass
class OrderVerdict:
    kind: str
    status: str  # certified | falsified | undecided
    gap: float = 0.0
    eps: float = None
    witness: object = None
    info: dict = field(default_factory=dict)

    def render(self):
        lines = [f"order {self.kind}: {self.status}"]
        if self.eps is not None:
            lines.append(f"  eps = {self.eps:.9g}")
        lines.append(f"  max gap found = {self.gap:.6g}")
        for k, v in self.info.items():
            if k == "witness_matrices":
                continue
            lines.append(f"  {k} = {v}")
        return "\n".join(lines)


def check_degradable(M, N, tol=1e-6):
    """Certified iff min ||N - Theta o M||_diamond <= tol."""
    eps, theta = min_degrading_eps(M, N)
    status = "certified" if eps <= tol else "undecided"
    return OrderVerdict("deg", status, gap=0.0, eps=eps,
                        witness=theta, info={"tol": tol})


def _random_pure_bipartite(d1, d2, rng):
    v = rng.standard_normal(d1 * d2) + 1j * rng.standard_normal(d1 * d2)
    v /= np.linalg.norm(v)
    return np.outer(v, v.conj())


def _mi_after(channel, rho_aa, d_ref):
    """I(A':B) of (id_ref (x) channel)(rho) for rho on ref (x) in."""
    d_in, d_out = channel.dim_in, channel.dim_out
    out = np.zeros((d_ref * d_out, d_ref * d_out), dtype=complex)
    for K in channel.kraus:
        Kf = np.kron(np.eye(d_ref), K)
        out += Kf @ rho_aa @ Kf.conj().T
    return mutual_information(out, (d_ref, d_out))


def _coherent_after(channel, rho_aa, d_ref):
    """I(A'>B) = H(B) - H(A'B) after the channel on the second factor."""
    from .divergences import von_neumann_entropy

    d_out = channel.dim_out
    out = np.zeros((d_ref * d_out, d_ref * d_out), dtype=complex)
    for K in channel.kraus:
        Kf = np.kron(np.eye(d_ref), K)
        out += Kf @ rho_aa @ Kf.conj().T
    hb = von_neumann_entropy(partial_trace(out, [d_ref, d_out], keep=[1]))
    return hb - von_neumann_entropy(out)


def _random_ensemble(dim, size, rng):
    p = rng.dirichlet(np.ones(size))
    states = []
    for _ in range(size):
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        v /= np.linalg.norm(v)
        states.append(np.outer(v, v.conj()))
    return EnsembleCQ(p, states)


def falsify_less_noisy(M, N, variant="ln", trials=200, restarts=3, seed=0):
    """Search for a witness violating "M is <variant>-noisier-ordered above N".

    - ln: state pairs, gap = D(N(rho)||N(sigma)) - D(M(rho)||M(sigma))
    - fq: pure bipartite inputs, gap of I(A':B)
    - mc: cq ensembles of pure states, gap of I(U:B)
    - mc_fq: pure bipartite inputs, gap of coherent information
    - anti_*: same searches with the channels swapped
    """
    if variant.startswith("anti_"):
        v = falsify_less_noisy(N, M, variant[5:], trials, restarts, seed)
        return OrderVerdict("anti_" + v.kind, v.status, v.gap, v.eps,
                            v.witness, v.info)
    if M.dim_in != N.dim_in:
        raise DimensionMismatch("channels must share the input dimension")
    dim = M.dim_in

    if variant == "ln":
        def gap_fn(rng):
            rho = random_density(dim, rng)
            sig = random_density(dim, rng)
            dn = relative_entropy(N(rho), N(sig))
            dm = relative_entropy(M(rho), M(sig))
            if not (dn.finite and dm.finite):
                if dn.value == math.inf and dm.finite:
                    return math.inf, (rho, sig)
                return -math.inf, (rho, sig)
            return dn.value - dm.value, (rho, sig)
    elif variant == "fq":
        def gap_fn(rng):
            rho = _random_pure_bipartite(dim, dim, rng)
            return (_mi_after(N, rho, dim) - _mi_after(M, rho, dim)), rho
    elif variant == "mc":
        size = dim * dim

        def gap_fn(rng):
            e = _random_ensemble(dim, size, rng)
            return (ensemble_mutual_information(e, N)
                    - ensemble_mutual_information(e, M)), e
    elif variant == "mc_fq":
        def gap_fn(rng):
            rho = _random_pure_bipartite(dim, dim, rng)
            return (_coherent_after(N, rho, dim)
                    - _coherent_after(M, rho, dim)), rho
    else:
        raise DimensionMismatch(f"unknown variant {variant!r}")

    best_gap = -math.inf
    best_wit = None
    for t in range(trials):
        rng = np.random.default_rng(seed * 69621 + t)
        g, w = gap_fn(rng)
        if g > best_gap:
            best_gap, best_wit = g, w

    # polish the ln variant with a short local search around the best pair
    if variant == "ln" and restarts > 0 and math.isfinite(best_gap):
        from .contraction import StateParameterization

        par = StateParameterization(dim)

        def neg(x):
            rho = par.decode(x[:par.n_params])
            sig = par.decode(x[par.n_params:])
            dn = relative_entropy(N(rho), N(sig))
            dm = relative_entropy(M(rho), M(sig))
            if not (dn.finite and dm.finite):
                return 1e6
            return -(dn.value - dm.value)

        for r in range(restarts):
            rng = np.random.default_rng(seed * 50087 + r)
            res = minimize(neg, rng.standard_normal(2 * par.n_params),
                           method="Nelder-Mead",
                           options={"maxiter": 300, "fatol": 1e-12})
            if -res.fun > best_gap:
                best_gap = -res.fun
                best_wit = (par.decode(res.x[:par.n_params]),
                            par.decode(res.x[par.n_params:]))

    status = "falsified" if best_gap > FALSIFY_GAP else "undecided"
    return OrderVerdict(variant, status, gap=float(best_gap), witness=best_wit,
                        info={"trials": trials, "seed": seed})


def check_regularized_ln(M, N, n_max=2, trials=100, seed=0):
    """Falsify the regularized less-noisy order on tensor powers up to n_max."""
    if n_max > 3:
        raise DimensionTooLarge("n_max capped at 3")
    verdicts = {}
    for n in range(1, n_max + 1):
        Mn = M if n == 1 else tensor_power(M, n)
        Nn = N if n == 1 else tensor_power(N, n)
        v = falsify_less_noisy(Mn, Nn, "ln", trials=trials, restarts=0,
                               seed=seed + n)
        verdicts[n] = OrderVerdict(f"ln_reg({n})", v.status, v.gap,
                                   witness=v.witness, info=v.info)
    return verdicts


def check_complete_ln(M, N, dim_r=None, trials=100, seed=0):
    """Falsifier for the completely-less-noisy order at a fixed reference
    dimension.  The verdict is annotated with dim_r; undecided never means
    certified (no reference-dimension bound is known)."""
    dim = M.dim_in
    d_r = dim_r or dim
    size = dim * dim

    def joint_mi(channel, e):
        # I(U:BR) for ensemble states on A (x) R, channel on A
        outs = []
        for s in e.states:
            o = np.zeros((channel.dim_out * d_r, channel.dim_out * d_r),
                         dtype=complex)
            for K in channel.kraus:
                Kf = np.kron(K, np.eye(d_r))
                o += Kf @ s @ Kf.conj().T
            outs.append(o)
        avg = sum(p * o for p, o in zip(e.probabilities, outs))
        from .divergences import von_neumann_entropy

        return von_neumann_entropy(avg) - sum(
            p * von_neumann_entropy(o)
            for p, o in zip(e.probabilities, outs) if p > 0)

    best_gap = -math.inf
    best_wit = None
    for t in range(trials):
        rng = np.random.default_rng(seed * 28657 + t)
        e = EnsembleCQ(rng.dirichlet(np.ones(size)),
                       [_random_pure_bipartite(dim, d_r, rng)
                        for _ in range(size)])
        g = joint_mi(N, e) - joint_mi(M, e)
        if g > best_gap:
            best_gap, best_wit = g, e
    status = "falsified" if best_gap > FALSIFY_GAP else "undecided"
    return OrderVerdict(f"ln_complete(dimR={d_r})", status,
                        gap=float(best_gap), witness=best_wit,
                        info={"trials": trials, "seed": seed,
                              "note": "undecided is evidence only"})


def approx_orders_from_diamond(M, N):
    """Approximate-order levels implied by the minimal degrading epsilon.

    Returns a dict with eps_deg, the derived eps-tilde (completely less
    noisy) and eps-hat (fully quantum less noisy) levels, and -- when the
    channels are directly comparable -- the diamond distance itself.
    """
    eps_deg, theta = min_degrading_eps(M, N)
    dim_b = N.dim_out
    report = {
        "eps_deg": eps_deg,
        "dim_b": dim_b,
        "eps_tilde": eps_tilde(min(eps_deg, 1.0), dim_b),
        "eps_hat": eps_hat(min(eps_deg, 1.0), dim_b),
        "theta": theta,
        "chain": "deg(eps) => c-ln(eps_tilde) => {reg-ln, fq-ln(eps_hat)} => ln",
    }
    if M.dim_out == N.dim_out:
        dd = diamond_norm(M.choi - N.choi, (M.dim_in, M.dim_out))
        report["diamond_distance"] = dd
        report["comparable_eps_tilde"] = eps_tilde(min(dd, 1.0), dim_b)
    return report


def render_approx_orders(report):
    lines = ["approximate orders from the degradability SDP:"]
    lines.append(f"  eps_deg = {report['eps_deg']:.9g}")
    lines.append(f"  eps_tilde (c-ln level, |B| = {report['dim_b']}) = "
                 f"{report['eps_tilde']:.9g}")
    lines.append(f"  eps_hat (fq-ln level) = {report['eps_hat']:.9g}")
    if "diamond_distance" in report:
        lines.append(f"  ||M - N||_diamond = {report['diamond_distance']:.9g}")
        lines.append(f"  comparable eps_tilde = "
                     f"{report['comparable_eps_tilde']:.9g}")
    lines.append(f"  implication chain: {report['chain']}")
    return "\n".join(lines)
