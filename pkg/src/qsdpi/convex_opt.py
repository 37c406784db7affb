"""Small dense semidefinite programs and their three applications here:
diamond norm, minimal degrading epsilon, and conditional min-entropy.

Problems are assembled with cvxpy and solved with a high-accuracy interior
point backend (CLARABEL), falling back to SCS.  Problem sizes are desk
scale (variable dimension ~500), so robustness is the only concern.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .channels import channel_from_choi, state_matrix
from .errors import DimensionMismatch, SolverFailure
from .numerics import dagger, hermitian_eig, partial_trace

DEFAULT_TOL = 1e-8


def _cp():
    import cvxpy

    return cvxpy


@dataclass
class SdpProblem:
    """A small SDP: Hermitian PSD blocks, affine constraints, linear objective.

    ``variables`` are cvxpy Hermitian variables (PSD constraints included in
    ``constraints``), ``objective`` a real-valued affine cvxpy expression.
    """

    variables: list
    objective: object
    constraints: list
    sense: str = "min"  # or "max"


@dataclass
class SdpSolution:
    status: str
    objective: float
    primal: list = field(repr=False, default_factory=list)
    gap: float = float("nan")
    iterations: int = -1


def psd_variable(d, name=None):
    cp = _cp()
    X = cp.Variable((d, d), hermitian=True, name=name)
    return X, [X >> 0]


def solve_sdp(problem, tol=DEFAULT_TOL):
    """Solve an SdpProblem; returns an SdpSolution or raises SolverFailure."""
    cp = _cp()
    obj = cp.Minimize(problem.objective) if problem.sense == "min" \
        else cp.Maximize(problem.objective)
    prob = cp.Problem(obj, problem.constraints)
    value = None
    last_exc = None
    for solver in ("CLARABEL", "SCS"):
        try:
            value = prob.solve(solver=solver)
            if prob.status in ("optimal", "optimal_inaccurate"):
                break
        except Exception as exc:  # noqa: BLE001 - surface below
            last_exc = exc
    if value is None or prob.status not in ("optimal", "optimal_inaccurate"):
        raise SolverFailure(f"SDP failed: status={prob.status!r} ({last_exc})")
    stats = prob.solver_stats
    iters = -1
    if stats is not None and stats.num_iters is not None:
        iters = int(stats.num_iters)
    return SdpSolution(
        status=prob.status,
        objective=float(value),
        primal=[np.asarray(v.value) for v in problem.variables],
        gap=0.0 if prob.status == "optimal" else float("nan"),
        iterations=iters,
    )


# -- diamond norm ------------------------------------------------------------

def diamond_norm(J, dims, tol=DEFAULT_TOL):
    """Diamond norm of the Hermiticity-preserving map with Choi matrix J.

    ``J`` uses the convention input (x) output; ``dims = (d_in, d_out)``.
    """
    cp = _cp()
    d_in, d_out = dims
    J = np.asarray(J, dtype=complex)
    if J.shape != (d_in * d_out, d_in * d_out):
        raise DimensionMismatch("Choi matrix does not match dims")
    rho0 = cp.Variable((d_in, d_in), hermitian=True)
    rho1 = cp.Variable((d_in, d_in), hermitian=True)
    X = cp.Variable((d_in * d_out, d_in * d_out), complex=True)
    I_out = np.eye(d_out)
    block = cp.bmat([
        [cp.kron(rho0, I_out), X],
        [X.H, cp.kron(rho1, I_out)],
    ])
    constraints = [
        rho0 >> 0, rho1 >> 0,
        cp.trace(rho0) == 1, cp.trace(rho1) == 1,
        block >> 0,
    ]
    obj = cp.Maximize(cp.real(cp.trace(J.conj().T @ X)))
    prob = cp.Problem(obj, constraints)
    return float(_robust_solve(prob))


_SOLVER_OPTS = {
    "CLARABEL": {"tol_gap_abs": 1e-11, "tol_gap_rel": 1e-11, "tol_feas": 1e-11},
    "SCS": {"eps": 1e-9, "max_iters": 50000},
}


def _robust_solve(prob, solvers=("CLARABEL", "SCS")):
    import warnings

    last_exc = None
    best = None
    for solver in solvers:
        try:
            with warnings.catch_warnings():
                # inaccurate statuses are handled explicitly below
                warnings.simplefilter("ignore", UserWarning)
                value = prob.solve(solver=solver, **_SOLVER_OPTS.get(solver, {}))
            if prob.status == "optimal":
                return value
            if prob.status == "optimal_inaccurate" and best is None:
                best = value
        except Exception as exc:  # noqa: BLE001
            last_exc = exc
    if best is not None:
        return best
    raise SolverFailure(f"SDP failed: status={prob.status!r} ({last_exc})")


# -- minimal degrading epsilon ------------------------------------------------

def composed_choi_expr(J_M, J_theta, d_a, d_b, d_c):
    """cvxpy expression for the Choi matrix of Theta o M, linear in J_theta.

    J_M on A (x) B is constant; J_theta on B (x) C is a cvxpy variable.
    Uses J(Theta o M) = Tr_B[(J_M^{T_B} (x) I_C)(I_A (x) J_Theta)].
    """
    cp = _cp()
    JM_TB = J_M.reshape(d_a, d_b, d_a, d_b).transpose(0, 3, 2, 1)\
        .reshape(d_a * d_b, d_a * d_b)
    K = np.kron(JM_TB, np.eye(d_c))
    expr = K @ cp.kron(np.eye(d_a), J_theta)
    return cp.partial_trace(expr, dims=[d_a, d_b, d_c], axis=1)


def min_degrading_eps(M, N, tol=DEFAULT_TOL):
    """Minimal eps with ||N - Theta o M||_diamond <= eps over CPTP Theta.

    Joint SDP: the degrading map's Choi matrix enters the dual-form
    diamond-norm bound linearly.  Returns (eps, Theta).
    """
    cp = _cp()
    if M.dim_in != N.dim_in:
        raise DimensionMismatch("channels must share the input dimension")
    d_a, d_b, d_c = M.dim_in, M.dim_out, N.dim_out
    J_M = M.choi
    J_N = N.choi
    Jt = cp.Variable((d_b * d_c, d_b * d_c), hermitian=True)
    Y0 = cp.Variable((d_a * d_c, d_a * d_c), hermitian=True)
    Y1 = cp.Variable((d_a * d_c, d_a * d_c), hermitian=True)
    u0 = cp.Variable()
    u1 = cp.Variable()
    delta = J_N - composed_choi_expr(J_M, Jt, d_a, d_b, d_c)
    I_a = np.eye(d_a)
    constraints = [
        Jt >> 0,
        cp.partial_trace(Jt, dims=[d_b, d_c], axis=1) == np.eye(d_b),
        cp.bmat([[Y0, -delta], [-delta.H, Y1]]) >> 0,
        u0 * I_a - cp.partial_trace(Y0, dims=[d_a, d_c], axis=1) >> 0,
        u1 * I_a - cp.partial_trace(Y1, dims=[d_a, d_c], axis=1) >> 0,
    ]
    prob = cp.Problem(cp.Minimize(0.5 * (u0 + u1)), constraints)
    eps = float(_robust_solve(prob))
    J_opt = np.asarray(Jt.value)
    J_opt = (J_opt + dagger(J_opt)) / 2
    theta = channel_from_choi(_project_tp(J_opt, d_b, d_c), d_b, d_c,
                              name="degrading")
    return max(eps, 0.0), theta


def _project_tp(J, d_in, d_out):
    """Rescale a (nearly) CPTP Choi matrix so Tr_out J = I exactly."""
    T = partial_trace(J, [d_in, d_out], keep=[0])
    vals, vecs = hermitian_eig(T)
    vals = np.clip(vals.real, 1e-12, None)
    T_inv_half = (vecs * (vals ** -0.5)) @ dagger(vecs)
    G = np.kron(T_inv_half, np.eye(d_out))
    return G @ J @ dagger(G)


# -- conditional min-entropy ---------------------------------------------------

def hmin_value(rho_ab, dims, tol=DEFAULT_TOL):
    """H_min(A|B) in nats: -ln min{Tr sigma_B : rho_AB <= I_A (x) sigma_B}."""
    cp = _cp()
    rho_ab = state_matrix(rho_ab)
    d_a, d_b = dims
    sig = cp.Variable((d_b, d_b), hermitian=True)
    constraints = [cp.kron(np.eye(d_a), sig) - rho_ab >> 0]
    prob = cp.Problem(cp.Minimize(cp.real(cp.trace(sig))), constraints)
    value = float(_robust_solve(prob))
    return -math.log(value)
