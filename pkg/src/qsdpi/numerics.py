"""Dense complex linear algebra foundation.

Hermitian eigendecompositions, matrix functions with explicit handling of
(numerically) zero eigenvalues, partial traces over tensor factors, and
superoperator matrices on vectorized operators.

All logarithms throughout the package are natural logarithms; entropic
quantities are reported in nats.
"""

import numpy as np

from .errors import DimensionMismatch, FunctionUndefined, NonHermitian

HERMITICITY_TOL = 1e-10
#: Relative eigenvalue threshold below which an eigenvalue counts as zero
#: for support decisions.
CLIP_REL = 1e-10


def dagger(A):
    return np.conj(A.T)


def check_hermitian(A, tol=HERMITICITY_TOL, name="matrix"):
    """Raise NonHermitian unless ``A`` is Hermitian within ``tol`` (relative)."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NonHermitian(f"{name} is not square: shape {A.shape}")
    scale = max(np.linalg.norm(A), 1.0)
    if np.linalg.norm(A - dagger(A)) > tol * scale * 10:
        raise NonHermitian(f"{name} is not Hermitian within tolerance {tol}")
    return A


def hermitian_eig(A, check=True):
    """Eigendecomposition of a Hermitian matrix.

    Returns
    -------
    vals : ndarray
        Real eigenvalues sorted descending.
    vecs : ndarray
        Unitary matrix whose columns are the matching eigenvectors.
    """
    if check:
        A = check_hermitian(A)
    else:
        A = np.asarray(A, dtype=complex)
    vals, vecs = np.linalg.eigh((A + dagger(A)) / 2)
    # eigh sorts ascending; the package convention is descending
    return vals[::-1].copy(), vecs[:, ::-1].copy()


def clip_threshold(vals, clip_rel=CLIP_REL):
    """Support threshold: ``clip_rel`` times the largest eigenvalue magnitude."""
    top = np.max(np.abs(vals)) if len(vals) else 0.0
    return clip_rel * top


def hermitian_matrix_function(A, f, zero_policy="strict", clip_rel=CLIP_REL):
    """Apply a scalar function to a Hermitian matrix through its spectrum.

    Eigenvalues with magnitude below ``clip_rel * max|eig|`` are routed
    through ``zero_policy``:

    - ``"strict"``: evaluate ``f(0)``; raise FunctionUndefined if not finite.
    - ``"zero"``: the function value is taken to be 0 (e.g. ``x ln x``).
    - ``"clip"``: the eigenvalue is replaced by the clip threshold.
    - ``"skip"``: the eigenvalue is excluded (projected out), i.e. f is
      applied only on the support.
    """
    vals, vecs = hermitian_eig(A)
    thr = clip_threshold(vals, clip_rel)
    out = np.zeros(len(vals))
    for i, v in enumerate(vals):
        if abs(v) > thr:
            out[i] = f(v)
        elif zero_policy == "zero" or zero_policy == "skip":
            out[i] = 0.0
        elif zero_policy == "clip":
            out[i] = f(thr if thr > 0 else np.finfo(float).tiny)
        elif zero_policy == "strict":
            fv = f(0.0)
            if not np.isfinite(fv):
                raise FunctionUndefined(
                    f"f undefined at (numerically) zero eigenvalue {v!r}"
                )
            out[i] = fv
        else:
            raise ValueError(f"unknown zero_policy {zero_policy!r}")
        if not np.isfinite(out[i]):
            raise FunctionUndefined(f"f({vals[i]}) is not finite")
    return (vecs * out) @ dagger(vecs)


def partial_trace(X, dims, keep):
    """Partial trace of a matrix on a tensor-product space.

    Parameters
    ----------
    X : array_like
        Square matrix on the tensor product of factors with dimensions ``dims``.
    dims : sequence of int
        Dimensions of the factors, in tensor order.
    keep : int or sequence of int
        Indices of the factors to keep.
    """
    X = np.asarray(X, dtype=complex)
    dims = list(dims)
    if np.isscalar(keep):
        keep = [int(keep)]
    keep = sorted(keep)
    total = int(np.prod(dims))
    if X.shape != (total, total):
        raise DimensionMismatch(
            f"matrix shape {X.shape} does not match dims {dims}"
        )
    n = len(dims)
    t = X.reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    for count, i in enumerate(traced):
        # axes shift left as factors are consumed
        ax = i - sum(1 for j in traced[:count] if j < i)
        t = np.trace(t, axis1=ax, axis2=ax + (n - count))
    d_keep = int(np.prod([dims[i] for i in keep])) if keep else 1
    return t.reshape(d_keep, d_keep)


def superop_two_two_norm(S):
    """Largest singular value of a superoperator given as a matrix on vec(X)."""
    S = np.asarray(S, dtype=complex)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionMismatch(f"superoperator must be square, got {S.shape}")
    return float(np.linalg.norm(S, 2))


def vec(X):
    """Column-stacking vectorization (Fortran order)."""
    return np.asarray(X, dtype=complex).reshape(-1, order="F")


def unvec(v, d=None):
    v = np.asarray(v, dtype=complex)
    if d is None:
        d = int(round(np.sqrt(v.size)))
    return v.reshape((d, d), order="F")


def conjugation_superop(K):
    """Matrix of X -> K X K^dagger on vec(X)."""
    K = np.asarray(K, dtype=complex)
    return np.kron(np.conj(K), K)


def trace_norm(X):
    return float(np.sum(np.linalg.svd(np.asarray(X, dtype=complex), compute_uv=False)))


def frob(X):
    return float(np.linalg.norm(X))


def random_hermitian(d, rng):
    G = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (G + dagger(G)) / 2


def random_density(d, rng, rank=None):
    r = rank or d
    G = rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))
    rho = G @ dagger(G)
    return rho / np.trace(rho).real


def random_pure(d, rng):
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    v = v / np.linalg.norm(v)
    return np.outer(v, np.conj(v))
