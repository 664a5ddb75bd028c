"""Polynomial-time and exhaustive-search estimators for block-model data.

All SBM-facing estimators return dense float matrices clipped to [0, 1]:
clipping is a pointwise contraction toward any [0,1]-valued target, so it
never hurts the empirical loss.  The Gaussian bicluster estimator is an
unclipped truncated SVD.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.cluster.vq import kmeans2

from ._kernels import scan_labelings
from .errors import GuardError
from .model import membership_matrix
from .seeds import as_generator

MAX_LS_STATES = 10**7


def _clip01(M: np.ndarray) -> np.ndarray:
    return np.clip(M, 0.0, 1.0)


def default_usvt_tau(A: np.ndarray) -> float:
    """2.01 * sqrt(n * density): a documented default choice, not a canonical
    value; the threshold only needs to clear the noise spectral norm."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    density = float(np.sum(A)) / (n * (n - 1)) if n > 1 else 0.0
    return 2.01 * math.sqrt(max(n * density, 1.0))


def usvt(A, tau: float = None, clip: bool = True) -> np.ndarray:
    """Keep singular components with singular value strictly above tau.

    tau=None picks the default threshold from the observed density; the
    comparison sigma > tau is exact, no tolerance fuzz.
    """
    A = np.asarray(A, dtype=float)
    if tau is None:
        tau = default_usvt_tau(A)
    if tau < 0:
        raise ValueError("tau must be >= 0")
    # symmetric input: eigendecomposition is the SVD up to signs
    if np.allclose(A, A.T):
        vals, vecs = np.linalg.eigh(A)
        keep = np.abs(vals) > tau
        M = (vecs[:, keep] * vals[keep]) @ vecs[:, keep].T
    else:
        u, s, vt = np.linalg.svd(A, full_matrices=False)
        keep = s > tau
        M = (u[:, keep] * s[keep]) @ vt[keep]
    return _clip01(M) if clip else M


def degree_truncate(A, tau: float) -> np.ndarray:
    """Zero every row and column whose degree exceeds tau."""
    if tau <= 0:
        raise ValueError("tau must be > 0")
    A = np.asarray(A, dtype=float)
    deg = A.sum(axis=1)
    keep = deg <= tau
    T = A * keep[:, None] * keep[None, :]
    return T


def rank_truncate(Y, k: int) -> np.ndarray:
    """Best rank-k approximation in Frobenius norm (truncated SVD)."""
    Y = np.asarray(Y, dtype=float)
    if k >= min(Y.shape):
        return Y.copy()
    if Y.shape[0] == Y.shape[1] and np.allclose(Y, Y.T):
        vals, vecs = np.linalg.eigh(Y)
        order = np.argsort(np.abs(vals))[::-1][:k]
        return (vecs[:, order] * vals[order]) @ vecs[:, order].T
    u, s, vt = np.linalg.svd(Y, full_matrices=False)
    return (u[:, :k] * s[:k]) @ vt[:k]


def trunc_spectral(A, tau: float, k: int, clip: bool = True) -> np.ndarray:
    """Degree truncation followed by the best rank-k approximation."""
    if k < 1:
        raise ValueError("k must be >= 1")
    M = rank_truncate(degree_truncate(A, tau), k)
    return _clip01(M) if clip else M


def mean_estimator(A) -> np.ndarray:
    """Constant matrix at the global edge frequency, zero diagonal."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if n < 2:
        raise ValueError("need at least two vertices")
    abar = float(np.sum(np.triu(A, k=1))) / math.comb(n, 2)
    M = np.full((n, n), abar)
    np.fill_diagonal(M, 0.0)
    return M


@dataclass
class LeastSquaresFit:
    Mhat: np.ndarray
    zhat: np.ndarray
    block_means: np.ndarray
    objective: float


def exhaustive_least_squares(A, k: int, use_numba=None) -> LeastSquaresFit:
    """Global minimizer of the block least-squares objective over all label
    vectors (up to label permutation), with plug-in block means.

    The objective is sum over ordered pairs (i, j), i != j, of
    (A_ij - mean of A over the (z_i, z_j) block)^2.  Blocks without pairs
    contribute nothing; their mean entries are set to the global edge
    frequency so the output is deterministic.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if k < 1:
        raise ValueError("k must be >= 1")
    if k**n > MAX_LS_STATES:
        raise GuardError(f"k^n = {k**n} exceeds the exhaustive-search guard")
    if np.any(np.diag(A) != 0):
        raise ValueError("expected a zero diagonal")
    z0, _ = scan_labelings(A, k, use_numba=use_numba)
    zhat = z0 + 1  # back to 1-based labels

    abar_global = float(np.sum(np.triu(A, k=1))) / math.comb(n, 2) if n > 1 else 0.0
    eye = np.eye(k)
    H = eye[z0]
    counts = H.sum(axis=0)
    P = H.T @ A @ H
    Q = np.full((k, k), abar_global)
    for a in range(k):
        for b in range(k):
            denom = counts[a] * counts[b] if a != b else counts[a] * (counts[a] - 1)
            if denom > 0:
                Q[a, b] = P[a, b] / denom
    Mhat = Q[z0[:, None], z0[None, :]]
    np.fill_diagonal(Mhat, 0.0)
    mask = ~np.eye(n, dtype=bool)
    objective = float(np.sum((A[mask] - Mhat[mask]) ** 2))
    return LeastSquaresFit(Mhat=Mhat, zhat=zhat, block_means=Q, objective=objective)


def block_ls_objective(A, z) -> float:
    """Ordered-pair objective of a given labeling with plug-in block means.

    Only the induced partition matters, so any label convention works.  A
    slow double loop by design: this is the independent cross-check for the
    scan kernels.
    """
    A = np.asarray(A, dtype=float)
    _, labels = np.unique(np.asarray(z), return_inverse=True)
    groups = [np.where(labels == g)[0] for g in range(labels.max() + 1)]
    total = 0.0
    for idx_a in groups:
        for idx_b in groups:
            vals = []
            for i in idx_a:
                for j in idx_b:
                    if i != j:
                        vals.append(A[i, j])
            if not vals:
                continue
            mean = sum(vals) / len(vals)
            total += sum((v - mean) ** 2 for v in vals)
    return total


def bicluster_svd(Y, k: int) -> np.ndarray:
    """Rank-k truncated SVD of a rectangular observation."""
    if k < 1 or k > min(np.asarray(Y).shape):
        raise ValueError("require 1 <= k <= min(n1, n2)")
    return rank_truncate(Y, k)


# -- SDP via ADMM ----------------------------------------------------------------


@dataclass
class SdpControls:
    penalty: float = 1.0
    max_iter: int = 5000
    tol: float = 1e-6
    adapt: bool = True


@dataclass
class SdpResult:
    Z: np.ndarray
    converged: bool
    iterations: int
    primal_residuals: list = field(default_factory=list)
    dual_residuals: list = field(default_factory=list)


def _project_psd(S: np.ndarray) -> np.ndarray:
    S = 0.5 * (S + S.T)
    vals, vecs = np.linalg.eigh(S)
    pos = vals > 0
    return (vecs[:, pos] * vals[pos]) @ vecs[:, pos].T


def _project_box(S: np.ndarray) -> np.ndarray:
    W = np.clip(S, 0.0, 1.0)
    np.fill_diagonal(W, 1.0)
    return W


def sdp_community(A, p: float, q: float, controls: SdpControls = None) -> SdpResult:
    """Approximate maximizer of <Z, A - (p+q)/2 * J> over the PSD matrices
    with unit diagonal and entries in [0, 1], by two-block ADMM.

    One block carries the PSD cone (eigenvalue clipping), the other the
    box/diagonal constraints, with a scaled dual and optional residual
    balancing.  The returned iterate always satisfies the box and diagonal
    constraints exactly; non-convergence is flagged, not raised.  p = q is
    accepted (the program is still well-defined) so that zero-signal
    baselines can be scanned.
    """
    if p < q:
        raise ValueError("require p >= q")
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if n > 500:
        raise GuardError("desk-scale SDP guard: n <= 500")
    controls = controls or SdpControls()
    C = A - (p + q) / 2.0 * np.ones((n, n))
    rho = controls.penalty
    W = np.eye(n)
    U = np.zeros((n, n))
    primal_hist, dual_hist = [], []
    converged = False
    it = 0
    for it in range(1, controls.max_iter + 1):
        Z = _project_psd(W - U + C / rho)
        W_prev = W
        W = _project_box(Z + U)
        U = U + Z - W
        primal = float(np.linalg.norm(Z - W))
        dual = float(rho * np.linalg.norm(W - W_prev))
        primal_hist.append(primal)
        dual_hist.append(dual)
        if primal + dual < controls.tol:
            converged = True
            break
        if controls.adapt and it % 50 == 0:
            if primal > 10 * dual:
                rho *= 2.0
                U /= 2.0
            elif dual > 10 * primal:
                rho /= 2.0
                U *= 2.0
    return SdpResult(
        Z=W,
        converged=converged,
        iterations=it,
        primal_residuals=primal_hist,
        dual_residuals=dual_hist,
    )


# -- label extraction for community detection -------------------------------------


def spectral_labels(A, k: int, seed) -> np.ndarray:
    """k-means on the top-k eigenvectors of the adjacency matrix; 1-based labels."""
    rng = as_generator(seed)
    A = np.asarray(A, dtype=float)
    vals, vecs = np.linalg.eigh(A)
    emb = vecs[:, np.argsort(vals)[::-1][:k]]
    _, labels = kmeans2(emb, k, minit="++", seed=rng)
    return labels + 1


def sdp_labels(A, p: float, q: float, k: int, seed, controls: SdpControls = None) -> np.ndarray:
    """Round the SDP iterate to hard labels via its top-k eigenspace."""
    rng = as_generator(seed)
    result = sdp_community(A, p, q, controls)
    vals, vecs = np.linalg.eigh(result.Z)
    emb = vecs[:, np.argsort(vals)[::-1][:k]]
    _, labels = kmeans2(emb, k, minit="++", seed=rng)
    return labels + 1


def membership_estimate(labels: np.ndarray) -> np.ndarray:
    """Hard membership matrix of estimated labels."""
    return membership_matrix(labels)
