"""Block-model priors, samplers, losses and SNR thresholds.

Conventions used throughout the package:

* community labels are 1-based integers in ``{1, ..., k}``;
* probability, adjacency and membership matrices are symmetric with an
  explicit zero diagonal, and all losses ignore the diagonal;
* sampling is pure given ``(inputs, seed)``: the same seed always reproduces
  the same draw.
"""

from dataclasses import dataclass
from fractions import Fraction
import math

import numpy as np

from .seeds import as_generator


@dataclass(frozen=True)
class SbmPqPrior:
    """Two-parameter SBM prior: p within communities, q across.

    ``fixed_first`` conditions the label draw on the first vertex belonging
    to community 1, which breaks the label symmetry used by the exact
    low-degree machinery.
    """

    n: int
    k: int
    p: float
    q: float
    fixed_first: bool = False

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least two vertices")
        if self.k < 1:
            raise ValueError("need at least one community")
        if not (0 <= self.q <= self.p <= 1):
            raise ValueError(f"require 0 <= q <= p <= 1, got p={self.p}, q={self.q}")


@dataclass(frozen=True)
class BiclusterPrior:
    """Rectangular planted-diagonal prior: M_ij = lam * 1(row and column labels agree).

    Row and column labels are i.i.d. uniform on {1, ..., k1 ^ k2};
    ``fixed_first`` pins the first row label to 1.
    """

    n1: int
    n2: int
    k1: int
    k2: int
    lam: float
    fixed_first: bool = False

    def __post_init__(self):
        if self.k1 < 1 or self.k2 < 1:
            raise ValueError("cluster counts must be >= 1")
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError("matrix dimensions must be >= 1")

    @property
    def kmin(self) -> int:
        return min(self.k1, self.k2)


def sample_membership(prior: SbmPqPrior, seed) -> np.ndarray:
    """Draw i.i.d. uniform labels in {1, ..., k}; z[0] = 1 when fixed_first."""
    rng = as_generator(seed)
    z = rng.integers(1, prior.k + 1, size=prior.n)
    if prior.fixed_first:
        z[0] = 1
    return z


def build_probability_matrix(z: np.ndarray, p: float, q: float) -> np.ndarray:
    """Connectivity matrix M with M_ij = p iff z_i == z_j (i != j), else q."""
    if p < q:
        raise ValueError(f"require p >= q, got p={p}, q={q}")
    z = np.asarray(z)
    same = z[:, None] == z[None, :]
    M = np.where(same, float(p), float(q))
    np.fill_diagonal(M, 0.0)
    return M


def sample_adjacency(M: np.ndarray, seed) -> np.ndarray:
    """Symmetric 0/1 adjacency with independent Bern(M_ij) upper-triangular entries."""
    rng = as_generator(seed)
    n = M.shape[0]
    U = rng.random((n, n))
    A = (U < M).astype(np.int8)
    iu = np.triu_indices(n, k=1)
    out = np.zeros((n, n), dtype=np.int8)
    out[iu] = A[iu]
    out += out.T
    return out


def sample_sbm(prior: SbmPqPrior, seed):
    """Full draw: labels, probability matrix and adjacency, from one seed."""
    rng = as_generator(seed)
    z = sample_membership(prior, rng)
    M = build_probability_matrix(z, prior.p, prior.q)
    A = sample_adjacency(M, rng)
    return z, M, A


def empirical_loss(Mhat, M):
    """Mean squared off-diagonal error: (1 / C(n,2)) * sum_{i<j} (Mhat_ij - M_ij)^2.

    Works on float arrays and exactly on object arrays of Fractions.
    """
    Mhat = np.asarray(Mhat)
    M = np.asarray(M)
    if Mhat.shape != M.shape or Mhat.ndim != 2 or Mhat.shape[0] != Mhat.shape[1]:
        raise ValueError(f"shape mismatch: {Mhat.shape} vs {M.shape}")
    n = M.shape[0]
    if n < 2:
        raise ValueError("need at least two vertices")
    iu = np.triu_indices(n, k=1)
    diff = Mhat[iu] - M[iu]
    if diff.dtype == object:
        total = sum((d * d for d in diff), start=Fraction(0))
        return total / math.comb(n, 2)
    return float(np.sum(diff * diff) / math.comb(n, 2))


def membership_matrix(z: np.ndarray) -> np.ndarray:
    """Binary matrix Z with Z_ij = 1(z_i == z_j) off-diagonal, zero diagonal."""
    z = np.asarray(z)
    Z = (z[:, None] == z[None, :]).astype(np.int8)
    np.fill_diagonal(Z, 0)
    return Z


def clustering_loss(Zhat, Z):
    """Membership-matrix loss; same functional as empirical_loss on {0,1} targets."""
    return empirical_loss(Zhat, Z)


def bicluster_loss(Mhat, M) -> float:
    """Mean squared error over all n1*n2 entries of a rectangular matrix."""
    Mhat = np.asarray(Mhat, dtype=float)
    M = np.asarray(M, dtype=float)
    if Mhat.shape != M.shape:
        raise ValueError(f"shape mismatch: {Mhat.shape} vs {M.shape}")
    return float(np.mean((Mhat - M) ** 2))


def sample_bicluster(prior: BiclusterPrior, seed):
    """Draw (z1, z2, M, Y): planted means M plus i.i.d. standard Gaussian noise."""
    rng = as_generator(seed)
    m = prior.kmin
    z1 = rng.integers(1, m + 1, size=prior.n1)
    z2 = rng.integers(1, m + 1, size=prior.n2)
    if prior.fixed_first:
        z1[0] = 1
    M = prior.lam * (z1[:, None] == z2[None, :]).astype(float)
    Y = M + rng.standard_normal((prior.n1, prior.n2))
    return z1, z2, M, Y


# -- SNR quantities ----------------------------------------------------------


def snr_fraction(p: Fraction, q: Fraction):
    """(p-q)^2 / (q(1-p)) as an exact Fraction; None encodes +infinity."""
    p, q = Fraction(p), Fraction(q)
    denom = q * (1 - p)
    if denom == 0:
        return None if p != q else Fraction(0)
    return (p - q) ** 2 / denom


def lowdeg_snr_threshold(n: int, k: int, D: int, r: Fraction):
    """Exact threshold (r / (D(D+1))^2) * min(k^2/n, 1); None means +infinity (D=0)."""
    if D == 0:
        return None
    r = Fraction(r)
    return r / Fraction(D * (D + 1)) ** 2 * min(Fraction(k * k, n), Fraction(1))


@dataclass(frozen=True)
class SnrReport:
    snr: float
    sw_threshold: float
    sw_condition_holds: bool
    ks_value: float


def snr_and_thresholds(n: int, k: int, p, q, D: int, r) -> SnrReport:
    """SNR (p-q)^2/(q(1-p)), the low-degree smallness condition, and the
    generalized Kesten-Stigum value n(p-q)^2 / (k(p + (k-1)q))."""
    if q > p:
        raise ValueError("require p >= q")
    pf, qf, rf = Fraction(str(p) if isinstance(p, float) else p), Fraction(
        str(q) if isinstance(q, float) else q
    ), Fraction(str(r) if isinstance(r, float) else r)
    snr = snr_fraction(pf, qf)
    thr = lowdeg_snr_threshold(n, k, D, rf)
    if snr is None:
        holds = False  # infinite SNR can never satisfy a finite bound
        snr_val = math.inf
    else:
        holds = True if thr is None else snr <= thr
        snr_val = float(snr)
    ks_denom = k * (pf + (k - 1) * qf)
    ks = math.inf if ks_denom == 0 and pf != qf else (
        0.0 if ks_denom == 0 else float(n * (pf - qf) ** 2 / ks_denom)
    )
    return SnrReport(
        snr=snr_val,
        sw_threshold=math.inf if thr is None else float(thr),
        sw_condition_holds=holds,
        ks_value=ks,
    )
