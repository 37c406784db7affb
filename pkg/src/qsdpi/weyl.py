"""Weyl-covariant (discrete additive noise) channels on Z_n x Z_n.

Construction from a pmf over displacement labels, the symplectic character
transform of the pmf (the channel's eigenvalues on the Weyl operators),
degradation witnesses by pointwise division in transform space, the
depolarizing subfamily, and the less-noisy-but-not-degraded mixtures.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .channels import QuantumChannel, weyl_additive, weyl_unitaries
from .errors import InvalidParameter
from .orders import OrderVerdict
from .divergences import relative_entropy
from .numerics import random_density


@dataclass
class WeylSystem:
    n: int
    W: list = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 2:
            raise InvalidParameter("Weyl system needs n >= 2")
        self.W = weyl_unitaries(self.n)

    @property
    def U(self):
        return self.W[1][0]

    @property
    def V(self):
        return self.W[0][1]


@dataclass
class PmfZnZn:
    n: int
    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if t.shape != (self.n, self.n):
            raise InvalidParameter("pmf table must be n x n")
        if np.any(t < -1e-12) or abs(t.sum() - 1.0) > 1e-12:
            raise InvalidParameter("table is not a pmf")
        self.table = np.clip(t, 0.0, None)


def read_pmf(path):
    """Pmf file format: n followed by n^2 nonnegative reals, row-major."""
    tokens = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            tokens.extend(line.split())
    n = int(tokens[0])
    vals = [float(t) for t in tokens[1:1 + n * n]]
    if len(vals) != n * n:
        raise InvalidParameter(f"pmf file needs {n * n} entries after n")
    return PmfZnZn(n, np.array(vals).reshape(n, n))


def write_pmf(path, pmf):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{pmf.n}\n")
        for row in pmf.table:
            fh.write(" ".join(f"{float(x)!r}" for x in row) + "\n")


def additive_channel(f):
    if isinstance(f, PmfZnZn):
        f = f.table
    return weyl_additive(f)


def weyl_eigenvalues(f):
    """A_f(a,b) = sum_{a',b'} f(a',b') exp(2 pi i (b'a - a'b)/n), the
    eigenvalue of the additive channel on W_{a,b} = U^a V^b."""
    if isinstance(f, PmfZnZn):
        f = f.table
    f = np.asarray(f, dtype=complex)
    n = f.shape[0]
    A = np.zeros((n, n), dtype=complex)
    for a in range(n):
        for b in range(n):
            tot = 0.0 + 0.0j
            for ap in range(n):
                for bp in range(n):
                    tot += f[ap, bp] * np.exp(2j * np.pi * (bp * a - ap * b) / n)
            A[a, b] = tot
    return A


def inverse_weyl_transform(A):
    """Inverse of weyl_eigenvalues: f(a',b') = n^-2 sum A(a,b) e^{-2pi i(b'a-a'b)/n}."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    f = np.zeros((n, n), dtype=complex)
    for ap in range(n):
        for bp in range(n):
            tot = 0.0 + 0.0j
            for a in range(n):
                for b in range(n):
                    tot += A[a, b] * np.exp(-2j * np.pi * (bp * a - ap * b) / n)
            f[ap, bp] = tot / (n * n)
    return f


@dataclass
class WitnessResult:
    ok: bool
    pmf: PmfZnZn = None
    reason: str = ""
    location: tuple = None


def degradation_witness(f, h, tol=1e-9):
    """Try to write M_f = M_k o M_h by pointwise division of the transforms.

    Returns a WitnessResult; success certifies that M_h degrades to M_f.
    The 0/0 cells are set to 0 (any value works there).
    """
    Af = weyl_eigenvalues(f)
    Ah = weyl_eigenvalues(h)
    n = Af.shape[0]
    Ak = np.zeros_like(Af)
    for a in range(n):
        for b in range(n):
            if abs(Ah[a, b]) < 1e-12:
                if abs(Af[a, b]) < 1e-12:
                    Ak[a, b] = 0.0
                else:
                    return WitnessResult(False, reason="division undefined: "
                                         "A_h = 0 but A_f != 0",
                                         location=(a, b))
            else:
                Ak[a, b] = Af[a, b] / Ah[a, b]
    k = inverse_weyl_transform(Ak)
    if np.max(np.abs(k.imag)) > tol:
        return WitnessResult(False, reason="inverse transform not real",
                             location=tuple(np.unravel_index(
                                 np.argmax(np.abs(k.imag)), k.shape)))
    k = k.real
    if np.min(k) < -tol:
        return WitnessResult(False, reason="inverse transform has a negative "
                             f"entry ({np.min(k):.3e})",
                             location=tuple(np.unravel_index(np.argmin(k),
                                                             k.shape)))
    if abs(k.sum() - 1.0) > max(tol, 1e-10):
        return WitnessResult(False, reason="inverse transform does not sum to 1")
    k = np.clip(k, 0.0, None)
    return WitnessResult(True, pmf=PmfZnZn(n, k / k.sum()))


def omega_delta(n, delta):
    """Depolarizing pmf: weight 1-delta at (0,0), delta spread evenly on the
    rest; equals ``depolarizing(p, n)`` with p = delta n^2/(n^2-1)."""
    if not 0.0 <= delta <= 1.0:
        raise InvalidParameter(f"delta = {delta} outside [0, 1]")
    f = np.full((n, n), delta / (n * n - 1.0))
    f[0, 0] = 1.0 - delta
    return PmfZnZn(n, f)


def gamma0(n, delta):
    """Threshold gamma_0 = (1-delta)/(1-delta + delta/(n^2-1)^2): M_gamma0 is
    less-noisy-dominated by M_delta but not degraded from it."""
    if not 0.0 <= delta <= (n * n - 1.0) / (n * n):
        raise InvalidParameter(
            f"delta = {delta} outside [0, {(n * n - 1.0) / (n * n)}]")
    d = 1.0 - delta + delta / (n * n - 1.0) ** 2
    return (1.0 - delta) / d


def shifted_pmf(pmf, a, b):
    """Pmf of W_{a,b} composed after the additive channel (a translation)."""
    return PmfZnZn(pmf.n, np.roll(np.roll(pmf.table, a, axis=0), b, axis=1))


def mixture_pmf(components):
    """components: list of (weight, pmf); returns the mixture pmf."""
    if abs(sum(w for w, _ in components) - 1.0) > 1e-12:
        raise InvalidParameter("mixture weights must sum to 1")
    n = components[0][1].n
    table = sum(w * p.table for w, p in components)
    return PmfZnZn(n, table)


def check_ln_mixture(n, delta, mixture=None, trials=10000, seed=0,
                     gap_tol=1e-6):
    """Monte-Carlo check that M_delta is less noisy than a convex mixture of
    Weyl-rotated M_delta and M_gamma0 channels.

    ``mixture``: list of (weight, (a, b), which) with which in
    {"delta", "gamma0"}; default is the equal mixture of W_{0,1} o M_delta
    and W_{1,0} o M_gamma0.  Also records that the gamma0 component itself
    admits no degradation witness (less noisy without degraded).
    """
    g0 = gamma0(n, delta)
    if mixture is None:
        mixture = [(0.5, (0, 1), "delta"), (0.5, (1, 0), "gamma0")]
    comps = []
    for w, (a, b), which in mixture:
        base = omega_delta(n, delta if which == "delta" else g0)
        comps.append((w, shifted_pmf(base, a, b)))
    f_mix = mixture_pmf(comps)
    M_delta = additive_channel(omega_delta(n, delta))
    M_mix = additive_channel(f_mix)

    worst = -math.inf
    worst_pair = None
    for t in range(trials):
        rng = np.random.default_rng(seed * 62089 + t)
        rho = random_density(n, rng)
        sig = random_density(n, rng)
        gap = (relative_entropy(M_mix(rho), M_mix(sig)).value
               - relative_entropy(M_delta(rho), M_delta(sig)).value)
        if gap > worst:
            worst, worst_pair = gap, (rho, sig)

    deg_fail = degradation_witness(omega_delta(n, g0), omega_delta(n, delta))
    status = "falsified" if worst > gap_tol else "undecided"
    return OrderVerdict(
        "ln(weyl-mixture)", status, gap=float(worst), witness=worst_pair,
        info={"trials": trials, "seed": seed, "gamma0": g0,
              "gamma0_degradation_witness_exists": deg_fail.ok,
              "gamma0_degradation_failure": deg_fail.reason})
