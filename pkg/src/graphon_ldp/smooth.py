"""Mollifier-based smooth graphon that embeds a k-block model.

The bump kernel ``K(x) = C_K exp(-1/(1 - 64 x^2))`` on (-1/8, 1/8) is
normalized so that its integral is one; the cutoff ``psi(x)`` is K convolved
with the indicator of [-3/8, 3/8], which makes psi identically 1 on
[-1/4, 1/4] and identically 0 outside (-1/2, 1/2).  A block-constant
connectivity matrix placed on the psi bumps then yields an infinitely smooth
graphon that agrees with the block model on a sub-grid of block centers.
"""

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from scipy.interpolate import CubicSpline

from .seeds import as_generator

#: grid resolution for the tabulated cutoff ramp
PSI_GRID_POINTS = 4096

#: absolute quadrature tolerance for the normalizing constant
QUAD_TOL = 1e-10


def mollifier_raw(x):
    """Unnormalized bump exp(-1/(1-64x^2)) supported on (-1/8, 1/8)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 0.125
    xi = x[inside]
    out[inside] = np.exp(-1.0 / (1.0 - 64.0 * xi * xi))
    return out


def adaptive_simpson(f, a: float, b: float, tol: float, max_depth: int = 40) -> float:
    """Classic recursive adaptive Simpson quadrature to absolute tolerance."""

    def simpson(lo, hi, flo, fmid, fhi):
        return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)

    def recurse(lo, hi, flo, fmid, fhi, whole, eps, depth):
        mid = 0.5 * (lo + hi)
        lmid = 0.5 * (lo + mid)
        rmid = 0.5 * (mid + hi)
        fl = f(lmid)
        fr = f(rmid)
        left = simpson(lo, mid, flo, fl, fmid)
        right = simpson(mid, hi, fmid, fr, fhi)
        if depth <= 0 or abs(left + right - whole) <= 15.0 * eps:
            return left + right + (left + right - whole) / 15.0
        return recurse(lo, mid, flo, fl, fmid, left, eps / 2.0, depth - 1) + recurse(
            mid, hi, fmid, fr, fhi, right, eps / 2.0, depth - 1
        )

    fa, fb = f(a), f(b)
    mid = 0.5 * (a + b)
    fm = f(mid)
    whole = simpson(a, b, fa, fm, fb)
    return recurse(a, b, fa, fm, fb, whole, tol, max_depth)


@lru_cache(maxsize=1)
def mollifier_constant() -> float:
    """Normalizing constant C_K with integral(C_K * bump) = 1, cached."""

    def f(x):
        return math.exp(-1.0 / (1.0 - 64.0 * x * x)) if abs(x) < 0.125 else 0.0

    raw = adaptive_simpson(f, -0.125, 0.125, QUAD_TOL)
    return 1.0 / raw


def mollifier(x):
    """Normalized bump K(x); integrates to 1 over its support (-1/8, 1/8)."""
    return mollifier_constant() * mollifier_raw(x)


@lru_cache(maxsize=1)
def _ramp_spline():
    """Cubic spline of psi on the ramp x in [1/4, 1/2].

    psi(x) = integral of K over [x - 3/8, 1/8] there, so only the mollifier's
    cumulative integral is needed.  Direct quadrature per call is too slow for
    the samplers, hence the one-time tabulation.
    """
    ck = mollifier_constant()
    xs = np.linspace(0.25, 0.5, PSI_GRID_POINTS)

    def f(u):
        return ck * math.exp(-1.0 / (1.0 - 64.0 * u * u)) if abs(u) < 0.125 else 0.0

    # cumulative integral of K from -1/8 to t, on the shifted grid t = x - 3/8
    ts = xs - 0.375
    vals = np.empty_like(ts)
    acc = 0.0
    prev = ts[0]
    vals[0] = 0.0
    for i in range(1, len(ts)):
        acc += adaptive_simpson(f, prev, ts[i], QUAD_TOL / PSI_GRID_POINTS)
        vals[i] = acc
        prev = ts[i]
    psi_vals = 1.0 - vals
    psi_vals[0] = 1.0  # exact by construction at x = 1/4
    psi_vals[-1] = 0.0  # exact at x = 1/2
    return CubicSpline(xs, psi_vals)


def cutoff_psi(x):
    """Smooth cutoff: 1 on [-1/4, 1/4], 0 outside (-1/2, 1/2), smooth ramp between."""
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    out = np.zeros_like(ax)
    out[ax <= 0.25] = 1.0
    ramp = (ax > 0.25) & (ax < 0.5)
    if np.any(ramp):
        out[ramp] = np.clip(_ramp_spline()(ax[ramp]), 0.0, 1.0)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class SmoothGraphonSpec:
    """Block count, block levels and the global scale factor delta in (0, 1]."""

    k: int
    p: float
    q: float
    delta: float = 0.5

    def __post_init__(self):
        if not (0 <= self.q <= self.p <= 1):
            raise ValueError("require 0 <= q <= p <= 1")
        if self.p - self.q > 1.0 / self.k + 1e-12:
            raise ValueError(
                f"smoothness requires p - q <= 1/k (got {self.p - self.q} > 1/{self.k})"
            )
        if not (0 < self.delta <= 1):
            raise ValueError("delta must lie in (0, 1]")

    def level_matrix(self) -> np.ndarray:
        """k x k block matrix with p on the diagonal and q elsewhere."""
        Q = np.full((self.k, self.k), self.q, dtype=float)
        np.fill_diagonal(Q, self.p)
        return Q


def graphon_fqp(x, y, spec: SmoothGraphonSpec):
    """Evaluate the scaled smooth graphon at (x, y) in [0,1]^2.

    Value: delta * (sum_{a,b} (Q_ab - q) psi(kx - a + 1/2) psi(ky - b + 1/2) + q).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    k, q = spec.k, spec.q
    Q = spec.level_matrix()
    a_idx = np.arange(1, k + 1)
    px = cutoff_psi(k * x[..., None] - a_idx + 0.5)
    py = cutoff_psi(k * y[..., None] - a_idx + 0.5)
    core = np.einsum("...a,ab,...b->...", px, Q - q, py)
    val = spec.delta * (core + q)
    return val if val.ndim else float(val)


def graphon_probability_matrix(spec: SmoothGraphonSpec, xi: np.ndarray) -> np.ndarray:
    """Dense M with M_ij = f(xi_i, xi_j) off-diagonal and zero diagonal."""
    xi = np.asarray(xi, dtype=float)
    k, q = spec.k, spec.q
    Q = spec.level_matrix()
    a_idx = np.arange(1, k + 1)
    psi_mat = cutoff_psi(k * xi[:, None] - a_idx + 0.5)  # n x k
    M = spec.delta * (psi_mat @ (Q - q) @ psi_mat.T + q)
    np.fill_diagonal(M, 0.0)
    return M


def sample_graphon(spec: SmoothGraphonSpec, n: int, seed, design: str = "uniform"):
    """Draw latent positions and the induced probability matrix.

    design="uniform" takes xi_i i.i.d. Uniform[0,1]; design="grid-permutation"
    places xi on the discrete grid {1/n, ..., n/n} in a random order, the
    discrete-support choice under which the graphon restricts to a block model.
    """
    rng = as_generator(seed)
    if design == "uniform":
        xi = rng.random(n)
    elif design == "grid-permutation":
        xi = rng.permutation(np.arange(1, n + 1)) / n
    else:
        raise ValueError(f"unknown design {design!r}")
    return xi, graphon_probability_matrix(spec, xi)
