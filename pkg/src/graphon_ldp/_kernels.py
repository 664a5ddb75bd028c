"""Scan kernels for the exhaustive block least-squares estimator.

The search over all k^n label vectors is the one hot inner loop in the
package; it carries a numba-jitted kernel with a pure-numpy fallback.  The
active path is chosen at import time by ``GRAPHON_LDP_NO_NUMBA`` (see
``graphon_ldp._numba``); both paths scan assignments in lexicographic order
over z in {0..k-1}^n, maximize the explained block sum of squares

    F(z) = sum_{a<b, both blocks non-empty} 2 U_ab^2 / (n_a n_b)
         + sum_{a, n_a >= 2} 4 W_a^2 / (n_a (n_a - 1)),

and break ties toward the lexicographically smallest z.
"""

import numpy as np

from ._numba import NUMBA_ENABLED, njit


@njit(cache=True)
def _scan_numba(A, k, total):  # pragma: no cover - exercised via dispatch
    n = A.shape[0]
    z = np.zeros(n, np.int64)
    counts = np.zeros(k, np.int64)
    cross = np.zeros((k, k), np.float64)
    diag = np.zeros(k, np.float64)
    best_f = -1.0
    best_idx = 0
    for idx in range(total):
        rem = idx
        for i in range(n - 1, -1, -1):
            z[i] = rem % k
            rem //= k
        for a in range(k):
            counts[a] = 0
            diag[a] = 0.0
            for b in range(k):
                cross[a, b] = 0.0
        for i in range(n):
            counts[z[i]] += 1
        for i in range(n):
            for j in range(i + 1, n):
                a = z[i]
                b = z[j]
                if a == b:
                    diag[a] += A[i, j]
                elif a < b:
                    cross[a, b] += A[i, j]
                else:
                    cross[b, a] += A[i, j]
        f = 0.0
        for a in range(k):
            if counts[a] >= 2:
                f += 4.0 * diag[a] * diag[a] / (counts[a] * (counts[a] - 1.0))
            for b in range(a + 1, k):
                if counts[a] >= 1 and counts[b] >= 1:
                    f += 2.0 * cross[a, b] * cross[a, b] / (counts[a] * counts[b])
        if f > best_f:
            best_f = f
            best_idx = idx
    return best_idx, best_f


def _scan_numpy(A, k, total):
    n = A.shape[0]
    best_f = -1.0
    best_idx = 0
    eye = np.eye(k)
    for idx in range(total):
        rem = idx
        z = np.empty(n, dtype=np.int64)
        for i in range(n - 1, -1, -1):
            z[i] = rem % k
            rem //= k
        H = eye[z]  # n x k one-hot
        counts = H.sum(axis=0)
        P = H.T @ A @ H  # symmetric ordered block sums (diag includes i==j, A_ii = 0)
        f = 0.0
        for a in range(k):
            if counts[a] >= 2:
                f += P[a, a] ** 2 / (counts[a] * (counts[a] - 1.0))
            for b in range(a + 1, k):
                if counts[a] >= 1 and counts[b] >= 1:
                    f += 2.0 * P[a, b] ** 2 / (counts[a] * counts[b])
        if f > best_f:
            best_f = f
            best_idx = idx
    return best_idx, best_f


def scan_labelings(A: np.ndarray, k: int, use_numba=None):
    """Return (best z as int64 array of 0-based labels, explained sum F)."""
    A = np.ascontiguousarray(A, dtype=np.float64)
    n = A.shape[0]
    total = k**n
    if use_numba is None:
        use_numba = NUMBA_ENABLED
    if use_numba:
        idx, f = _scan_numba(A, k, total)
    else:
        idx, f = _scan_numpy(A, k, total)
    z = np.empty(n, dtype=np.int64)
    rem = int(idx)
    for i in range(n - 1, -1, -1):
        z[i] = rem % k
        rem //= k
    return z, f
