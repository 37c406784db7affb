"""Channel representations, validation, named families, composition,
and complementary channel construction.

A channel is stored as a Kraus list; the Choi matrix (convention
``J = sum_ij |i><j| (x) N(|i><j|)``, input factor first) is computed lazily
and cached.
"""

import numpy as np

from .errors import DimensionMismatch, InvalidParameter, QsdpiError
from .numerics import check_hermitian, dagger, hermitian_eig, partial_trace

TP_TOL = 1e-9
PSD_TOL = 1e-9
KRAUS_RANK_CUT = 1e-10


class DensityMatrix:
    """Validated quantum state.

    Parameters
    ----------
    matrix : array_like
        Hermitian PSD matrix with unit trace (within tolerances).
    """

    def __init__(self, matrix, tol=1e-8):
        mat = check_hermitian(np.asarray(matrix, dtype=complex), name="state")
        vals, _ = hermitian_eig(mat, check=False)
        if vals[-1] < -tol:
            raise InvalidParameter(f"state has negative eigenvalue {vals[-1]}")
        tr = np.trace(mat).real
        if abs(tr - 1) > tol:
            raise InvalidParameter(f"state trace {tr} != 1")
        self.matrix = (mat + dagger(mat)) / 2
        self.dim = mat.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def state_matrix(rho):
    """Coerce a DensityMatrix or array_like into a complex ndarray."""
    if isinstance(rho, DensityMatrix):
        return rho.matrix
    return np.asarray(rho, dtype=complex)


class QuantumChannel:
    """Completely positive (trace-preserving) map in Kraus form."""

    def __init__(self, kraus, dim_in=None, dim_out=None, require_tp=True,
                 tol=TP_TOL, name=""):
        kraus = [np.asarray(K, dtype=complex) for K in kraus]
        if not kraus:
            raise InvalidParameter("empty Kraus list")
        d_out, d_in = kraus[0].shape
        for K in kraus:
            if K.shape != (d_out, d_in):
                raise DimensionMismatch("inconsistent Kraus shapes")
        if dim_in is not None and dim_in != d_in:
            raise DimensionMismatch(f"dim_in {dim_in} != Kraus column count {d_in}")
        if dim_out is not None and dim_out != d_out:
            raise DimensionMismatch(f"dim_out {dim_out} != Kraus row count {d_out}")
        self.dim_in = d_in
        self.dim_out = d_out
        self.kraus = kraus
        self.dim_env = len(kraus)
        self.name = name
        self.trace_preserving = require_tp
        self._choi = None
        if require_tp:
            S = sum(dagger(K) @ K for K in kraus)
            err = np.linalg.norm(S - np.eye(d_in))
            if err > tol * 10 * d_in:
                raise InvalidParameter(
                    f"Kraus operators not trace preserving: |sum K^dag K - I| = {err:.2e}"
                )

    # -- representations ---------------------------------------------------

    @property
    def choi(self):
        if self._choi is None:
            self._choi = choi_from_kraus(self.kraus)
        return self._choi

    def apply(self, rho):
        rho = state_matrix(rho)
        if rho.shape[0] != self.dim_in:
            raise DimensionMismatch(
                f"state dim {rho.shape[0]} != channel input dim {self.dim_in}"
            )
        out = np.zeros((self.dim_out, self.dim_out), dtype=complex)
        for K in self.kraus:
            out += K @ rho @ dagger(K)
        return out

    def __call__(self, rho):
        return self.apply(rho)

    def transfer_matrix(self):
        """Matrix of the channel on column-vectorized operators."""
        return sum(np.kron(np.conj(K), K) for K in self.kraus)

    def adjoint_apply(self, X):
        """Heisenberg-picture action N*(X) = sum K^dag X K."""
        X = np.asarray(X, dtype=complex)
        out = np.zeros((self.dim_in, self.dim_in), dtype=complex)
        for K in self.kraus:
            out += dagger(K) @ X @ K
        return out

    def minimal(self):
        """Equivalent channel with a minimal (Choi-rank) Kraus list."""
        ops = kraus_from_choi(self.choi, self.dim_in, self.dim_out)
        return QuantumChannel(ops, require_tp=self.trace_preserving,
                              name=self.name)


def choi_from_kraus(kraus):
    d_out, d_in = kraus[0].shape
    J = np.zeros((d_in * d_out, d_in * d_out), dtype=complex)
    for K in kraus:
        w = np.ascontiguousarray(K.T).reshape(-1)  # w[(i,b)] = K[b,i]
        J += np.outer(w, np.conj(w))
    return J


def kraus_from_choi(J, d_in, d_out, rank_cut=KRAUS_RANK_CUT):
    vals, vecs = hermitian_eig(J)
    thr = rank_cut * max(vals[0], 1e-300)
    ops = []
    for lam, v in zip(vals, vecs.T):
        if lam > thr:
            ops.append(np.sqrt(lam) * v.reshape(d_in, d_out).T)
    return ops


def channel_from_choi(J, d_in, d_out, require_tp=True, name=""):
    return QuantumChannel(kraus_from_choi(J, d_in, d_out),
                          require_tp=require_tp, name=name)


def apply_choi(J, rho, d_in, d_out):
    """Channel action from the Choi matrix: Tr_in[(rho^T (x) I) J]."""
    rho = state_matrix(rho)
    M = np.kron(rho.T, np.eye(d_out)) @ J
    return partial_trace(M, [d_in, d_out], keep=[1])


# -- composition ----------------------------------------------------------

def compose(A, B):
    """The channel A after B (first B, then A)."""
    if A.dim_in != B.dim_out:
        raise DimensionMismatch(
            f"compose: A.dim_in {A.dim_in} != B.dim_out {B.dim_out}"
        )
    ops = [Ka @ Kb for Ka in A.kraus for Kb in B.kraus]
    ch = QuantumChannel(ops, require_tp=A.trace_preserving and B.trace_preserving)
    if len(ops) > ch.dim_in * ch.dim_out:
        ch = ch.minimal()
    return ch


def tensor(A, B):
    ops = [np.kron(Ka, Kb) for Ka in A.kraus for Kb in B.kraus]
    ch = QuantumChannel(ops, require_tp=A.trace_preserving and B.trace_preserving)
    if len(ops) > ch.dim_in * ch.dim_out:
        ch = ch.minimal()
    return ch


def tensor_power(A, n):
    out = A
    for _ in range(n - 1):
        out = tensor(out, A)
    return out


def complementary_channel(N):
    """Map to the environment of a minimal Stinespring dilation of ``N``.

    The environment dimension equals the minimal Kraus rank; the output is
    fixed only up to an isometry on the environment, so callers should
    compare isometry-invariant quantities (entropies, divergences) only.
    """
    Nm = N.minimal()
    d_in, d_out, d_env = Nm.dim_in, Nm.dim_out, Nm.dim_env
    # V|a> = sum_e (K_e |a>) (x) |e>;  N^c(rho) has Kraus L_b[e, a] = K_e[b, a]
    ops = []
    for b in range(d_out):
        L = np.zeros((d_env, d_in), dtype=complex)
        for e, K in enumerate(Nm.kraus):
            L[e, :] = K[b, :]
        ops.append(L)
    return QuantumChannel(ops, name=f"comp({N.name})" if N.name else "")


# -- Weyl unitaries (used by the depolarizing and weyl_additive families) --

def weyl_unitaries(n):
    """Table of W[a][b] = U^a V^b with U the shift and V the clock on C^n."""
    U = np.zeros((n, n), dtype=complex)
    for k in range(n):
        U[(k + 1) % n, k] = 1.0
    omega = np.exp(2j * np.pi / n)
    V = np.diag([omega ** k for k in range(n)])
    return [[np.linalg.matrix_power(U, a) @ np.linalg.matrix_power(V, b)
             for b in range(n)] for a in range(n)]


# -- named families --------------------------------------------------------

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _check_range(name, value, lo, hi):
    if not (lo <= value <= hi):
        raise InvalidParameter(f"{name} = {value} outside [{lo}, {hi}]")


def depolarizing(p, dim=2):
    """D_p(rho) = (1-p) rho + p I/dim."""
    n = int(dim)
    pmax = n * n / (n * n - 1.0)
    _check_range("depolarizing p", p, 0.0, pmax)
    W = weyl_unitaries(n)
    f00 = 1.0 - p * (n * n - 1.0) / (n * n)
    frest = p / (n * n)
    ops = []
    for a in range(n):
        for b in range(n):
            w = f00 if (a == 0 and b == 0) else frest
            if w > 0:
                ops.append(np.sqrt(w) * W[a][b])
    return QuantumChannel(ops, name=f"depolarizing(p={p}, dim={n})")


def dephasing_z(p):
    """(1-p) rho + p Z rho Z on a qubit."""
    _check_range("dephasing p", p, 0.0, 1.0)
    ops = [np.sqrt(1 - p) * np.eye(2, dtype=complex)]
    if p > 0:
        ops.append(np.sqrt(p) * PAULI_Z)
    return QuantumChannel(ops, name=f"dephasing_z(p={p})")


def bitflip_x(p):
    _check_range("bitflip p", p, 0.0, 1.0)
    ops = [np.sqrt(1 - p) * np.eye(2, dtype=complex)]
    if p > 0:
        ops.append(np.sqrt(p) * PAULI_X)
    return QuantumChannel(ops, name=f"bitflip_x(p={p})")


def erasure(eps, dim=2):
    """Erasure channel: output dimension dim+1, flag = last basis vector."""
    _check_range("erasure eps", eps, 0.0, 1.0)
    d = int(dim)
    embed = np.zeros((d + 1, d), dtype=complex)
    embed[:d, :] = np.eye(d)
    ops = [np.sqrt(1 - eps) * embed]
    if eps > 0:
        for a in range(d):
            K = np.zeros((d + 1, d), dtype=complex)
            K[d, a] = np.sqrt(eps)
            ops.append(K)
    return QuantumChannel(ops, name=f"erasure(eps={eps}, dim={d})")


def erasure_on_flagged(eps, dim):
    """Erasure acting on a space whose last basis vector already is a flag.

    Input and output dimension are both ``dim + 1``; erased mass is routed to
    the existing flag, so composing after ``erasure(b, dim)`` reproduces
    ``erasure(a + b - ab, dim)`` exactly.
    """
    _check_range("erasure eps", eps, 0.0, 1.0)
    d = int(dim) + 1
    ops = [np.sqrt(1 - eps) * np.eye(d, dtype=complex)]
    if eps > 0:
        for a in range(d):
            K = np.zeros((d, d), dtype=complex)
            K[d - 1, a] = np.sqrt(eps)
            ops.append(K)
    return QuantumChannel(ops, name=f"erasure_on_flagged(eps={eps}, dim={dim})")


def dephrasure(eps, p):
    """Dephasing followed by erasure on a qubit."""
    ch = compose(erasure(eps, 2), dephasing_z(p))
    ch.name = f"dephrasure(eps={eps}, p={p})"
    return ch


def amplitude_damping(gamma):
    _check_range("amplitude damping gamma", gamma, 0.0, 1.0)
    K0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    K1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    return QuantumChannel([K0, K1], name=f"amplitude_damping({gamma})")


def replacer(tau):
    """R_tau(rho) = tau * Tr(rho)."""
    tau = state_matrix(tau)
    d = tau.shape[0]
    vals, vecs = hermitian_eig(tau)
    ops = []
    for lam, v in zip(vals, vecs.T):
        if lam > 1e-14:
            for a in range(d):
                K = np.sqrt(lam) * np.outer(v, np.eye(d)[a])
                ops.append(K)
    return QuantumChannel(ops, name="replacer")


def isometry_channel(V):
    V = np.asarray(V, dtype=complex)
    if np.linalg.norm(dagger(V) @ V - np.eye(V.shape[1])) > 1e-9:
        raise InvalidParameter("matrix is not an isometry")
    return QuantumChannel([V], name="isometry")


def identity_channel(dim=2):
    return QuantumChannel([np.eye(int(dim), dtype=complex)], name=f"identity({dim})")


def weyl_additive(f):
    """Additive-noise Weyl channel from a pmf table on Z_n x Z_n."""
    f = np.asarray(f, dtype=float)
    n = f.shape[0]
    if f.shape != (n, n) or np.any(f < -1e-12) or abs(f.sum() - 1) > 1e-10:
        raise InvalidParameter("weyl_additive needs an n x n pmf table")
    W = weyl_unitaries(n)
    ops = [np.sqrt(f[a, b]) * W[a][b]
           for a in range(n) for b in range(n) if f[a, b] > 0]
    return QuantumChannel(ops, name=f"weyl_additive(n={n})")


_FAMILY_BUILDERS = {
    "depolarizing": lambda p: depolarizing(p["p"], p.get("dim", 2)),
    "dephasing_z": lambda p: dephasing_z(p["p"]),
    "bitflip_x": lambda p: bitflip_x(p["p"]),
    "erasure": lambda p: erasure(p["eps"], p.get("dim", 2)),
    "dephrasure": lambda p: dephrasure(p["eps"], p["p"]),
    "amplitude_damping": lambda p: amplitude_damping(p["gamma"]),
    "replacer": lambda p: replacer(np.asarray(p["tau"], dtype=complex)),
    "isometry": lambda p: isometry_channel(np.asarray(p["V"], dtype=complex)),
    "weyl_additive": lambda p: weyl_additive(np.asarray(p["f"], dtype=float)),
    "identity": lambda p: identity_channel(p.get("dim", 2)),
}


def build_channel(kind, **params):
    """Build a named channel family; see _FAMILY_BUILDERS for kinds."""
    if kind == "kraus":
        return QuantumChannel(params["ops"])
    try:
        builder = _FAMILY_BUILDERS[kind]
    except KeyError:
        raise InvalidParameter(f"unknown channel family {kind!r}") from None
    try:
        return builder(params)
    except KeyError as exc:
        raise InvalidParameter(f"family {kind!r} missing parameter {exc}") from None
