"""Brute-force exact degree-D projection oracles on tiny instances.

For the binary SBM observation the signal scalar is the (1,2) connectivity
entry; for the Gaussian bicluster observation it is the (1,1) mean entry.  In
both cases the best degree-D polynomial estimator is the L2 projection of the
scalar onto the span of monomials of the observation, so the squared
correlation is c^T G^+ c with G the monomial Gram matrix and c the
correlation vector, both assembled in exact rational arithmetic.  Rank
deficiency of G (forced by small n) is handled inside the solve: the
projection lives in the function span, not the basis.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product
import math

from .errors import GuardError
from .linalg import dot, solve_psd_system
from .model import BiclusterPrior, SbmPqPrior, lowdeg_snr_threshold, snr_fraction
from .multigraph import Multigraph, all_edges
from .cumulants import (
    SbmMomentOracle,
    kappa,
    lowdeg_lower_bound_sbm,
    lowdeg_lower_bound_bicluster,
)

MAX_BASIS = 5000
MAX_ORACLE_N = 6
MAX_ORACLE_K = 4


@dataclass(frozen=True)
class ExactProjection:
    """Exact degree-D projection summary: corr_sq = c^T G^+ c, mmse = E[x^2] - corr_sq."""

    D: int
    basis_size: int
    gram_rank: int
    ex2: Fraction
    corr_sq: Fraction
    mmse: Fraction


def binary_monomials(n: int, D: int):
    """Square-free monomials over the n(n-1)/2 edge positions, degree <= D,
    in graded-lex order over lexicographically sorted edge indices."""
    edges = all_edges(n)
    basis = []
    for d in range(D + 1):
        for combo in combinations(range(len(edges)), d):
            basis.append(tuple(edges[i] for i in combo))
    return basis


class SbmExactModel:
    """Exact mixed moments of (A, M_12) under the two-parameter SBM prior.

    E[A^gamma | z] = prod_e M_e(z) for square-free gamma by conditional
    independence and binary idempotence, so the z-average is a polynomial in
    (p, q) whose exponent counts are enumerated once per gamma and reused.
    """

    def __init__(self, prior: SbmPqPrior, fixed_first: bool = True):
        if prior.n > MAX_ORACLE_N or prior.k > MAX_ORACLE_K:
            raise GuardError(
                f"exact-moment guard: n <= {MAX_ORACLE_N}, k <= {MAX_ORACLE_K}"
            )
        self.prior = prior
        self.fixed_first = fixed_first
        self.p = Fraction(str(prior.p) if isinstance(prior.p, float) else prior.p)
        self.q = Fraction(str(prior.q) if isinstance(prior.q, float) else prior.q)
        self._patterns = {}
        n, k = prior.n, prior.k
        if fixed_first:
            self._assignments = [
                (1,) + rest for rest in product(range(1, k + 1), repeat=n - 1)
            ]
        else:
            self._assignments = list(product(range(1, k + 1), repeat=n))
        self._weight = Fraction(1, len(self._assignments))

    def _pattern(self, gamma, with_x: bool):
        """Counts of (#same-community edges) over label assignments; the x
        factor M_12 is folded in as one extra (1,2) edge."""
        key = (gamma, with_x)
        hit = self._patterns.get(key)
        if hit is not None:
            return hit
        edges = list(gamma) + ([(1, 2)] if with_x else [])
        counts = {}
        for z in self._assignments:
            same = sum(1 for i, j in edges if z[i - 1] == z[j - 1])
            counts[same] = counts.get(same, 0) + 1
        self._patterns[key] = (counts, len(edges))
        return counts, len(edges)

    def _poly_value(self, counts, total) -> Fraction:
        acc = Fraction(0)
        for same, cnt in counts.items():
            acc += cnt * self.p**same * self.q ** (total - same)
        return acc * self._weight

    def expect_a(self, gamma) -> Fraction:
        """E[A^gamma] for a square-free edge tuple gamma."""
        counts, total = self._pattern(tuple(sorted(gamma)), False)
        return self._poly_value(counts, total)

    def expect_a_x(self, gamma) -> Fraction:
        """E[A^gamma * M_12]."""
        counts, total = self._pattern(tuple(sorted(gamma)), True)
        return self._poly_value(counts, total)

    def expect_x2(self) -> Fraction:
        """E[M_12^2] = q^2 + (p^2 - q^2)/k under the uniform label draw."""
        acc = Fraction(0)
        for z in self._assignments:
            val = self.p if z[0] == z[1] else self.q
            acc += val * val
        return acc * self._weight


def exact_moment_sbm(prior: SbmPqPrior, alpha, beta, fixed_first: bool = True) -> Fraction:
    """E[A^(alpha v beta)] for two square-free monomials given as edge tuples."""
    model = SbmExactModel(prior, fixed_first)
    union = tuple(sorted(set(alpha) | set(beta)))
    return model.expect_a(union)


def _project(basis, gram_entry, corr_entry, ex2, D) -> ExactProjection:
    m = len(basis)
    if m > MAX_BASIS:
        raise GuardError(f"basis size {m} exceeds guard {MAX_BASIS}")
    G = [[gram_entry(basis[i], basis[j]) for j in range(m)] for i in range(m)]
    c = [corr_entry(basis[i]) for i in range(m)]
    a, _, rank = solve_psd_system(G, c)
    corr_sq = dot(c, a)
    return ExactProjection(
        D=D, basis_size=m, gram_rank=rank, ex2=ex2, corr_sq=corr_sq, mmse=ex2 - corr_sq
    )


def exact_corr_and_mmse(prior: SbmPqPrior, D: int, fixed_first: bool = True) -> ExactProjection:
    """Exact squared degree-D correlation and MMSE for estimating the (1,2)
    connectivity entry from the adjacency matrix."""
    model = SbmExactModel(prior, fixed_first)
    basis = binary_monomials(prior.n, D)

    def gram(mi, mj):
        return model.expect_a(tuple(sorted(set(mi) | set(mj))))

    def corr(mi):
        return model.expect_a_x(mi)

    return _project(basis, gram, corr, model.expect_x2(), D)


@dataclass(frozen=True)
class CorrBoundReport:
    corr_sq: Fraction
    kappa_bound: Fraction
    ok: bool


def verify_corr_bound(prior: SbmPqPrior, D: int) -> CorrBoundReport:
    """Check corr_sq <= sum over square-free alpha with |alpha| <= D of
    kappa_alpha(M_12, X)^2 / (q(1-p))^|alpha|.

    The centered/scaled prior has signal scale lambda = (p-q)/sqrt(q(1-p)),
    and cumulant multilinearity turns each |alpha| >= 1 term into
    q(1-p) * coeff^2 * (lambda^2)^(|alpha|+1); the degree-0 term is E[M_12]^2.
    """
    proj = exact_corr_and_mmse(prior, D)
    p = Fraction(str(prior.p) if isinstance(prior.p, float) else prior.p)
    q = Fraction(str(prior.q) if isinstance(prior.q, float) else prior.q)
    k = prior.k
    mean_x = q + (p - q) / k
    bound = mean_x**2
    tau = q * (1 - p)
    if tau > 0:
        lam2 = (p - q) ** 2 / tau
        oracle = SbmMomentOracle(k)
        for d in range(1, D + 1):
            for combo in combinations(all_edges(prior.n), d):
                alpha = Multigraph(prior.n, tuple((e, 1) for e in combo))
                val = kappa(alpha, oracle)
                if not val.is_zero:
                    bound += tau * (val * val).value_at_lambda_sq(lam2)
    elif p != q:
        # tau = 0 with p > q: the cumulant bound degenerates to +infinity;
        # report the degree-0 term and flag ok (vacuously true)
        return CorrBoundReport(corr_sq=proj.corr_sq, kappa_bound=bound, ok=True)
    return CorrBoundReport(
        corr_sq=proj.corr_sq, kappa_bound=bound, ok=proj.corr_sq <= bound
    )


@dataclass(frozen=True)
class SandwichReport:
    rhs: Fraction
    mmse: Fraction
    variance: Fraction
    snr_ok: bool
    ok: bool


def mmse_sandwich(prior: SbmPqPrior, D: int, r) -> SandwichReport:
    """Risk floor <= exact mmse <= prior variance of the (1,2) entry."""
    proj = exact_corr_and_mmse(prior, D)
    p = Fraction(str(prior.p) if isinstance(prior.p, float) else prior.p)
    q = Fraction(str(prior.q) if isinstance(prior.q, float) else prior.q)
    k = prior.k
    variance = (p - q) ** 2 * (Fraction(1, k) - Fraction(1, k * k))
    rhs = lowdeg_lower_bound_sbm(prior.n, k, p, q, r)
    snr = snr_fraction(p, q)
    thr = lowdeg_snr_threshold(prior.n, k, D, Fraction(r))
    snr_ok = snr is not None and (thr is None or snr <= thr)
    ok = rhs <= proj.mmse <= variance
    return SandwichReport(rhs=rhs, mmse=proj.mmse, variance=variance, snr_ok=snr_ok, ok=ok)


# -- Gaussian bicluster oracle ---------------------------------------------------

MAX_GAUSS_N = 3
MAX_GAUSS_D = 2


def gaussian_raw_moment(m: int) -> int:
    """Raw moments of N(0,1): 0 for odd m, (m-1)!! for even m."""
    if m % 2:
        return 0
    out = 1
    for t in range(m - 1, 0, -2):
        out *= t
    return out


def gaussian_monomials(n1: int, n2: int, D: int):
    """Multi-indices over the n1*n2 positions with total degree <= D,
    graded-lex over row-major positions."""
    positions = [(i, j) for i in range(1, n1 + 1) for j in range(1, n2 + 1)]
    basis = []
    for d in range(D + 1):
        for combo in combinations_with_replacement(range(len(positions)), d):
            entry = {}
            for idx in combo:
                entry[positions[idx]] = entry.get(positions[idx], 0) + 1
            basis.append(tuple(sorted(entry.items())))
    return basis


class BiclusterExactModel:
    """Exact mixed moments of (Y, M_11) for Y = M + N(0,1) noise.

    Conditionally on the labels, each Y entry is lambda*s + standard normal
    with s the agreement indicator, so E[Y_e^t | z] expands through the
    Gaussian raw moments; the label average is an exhaustive enumeration.
    """

    def __init__(self, prior: BiclusterPrior, fixed_first: bool = True):
        if prior.n1 > MAX_GAUSS_N or prior.n2 > MAX_GAUSS_N:
            raise GuardError(f"gaussian oracle guard: n1, n2 <= {MAX_GAUSS_N}")
        self.prior = prior
        self.lam = Fraction(str(prior.lam) if isinstance(prior.lam, float) else prior.lam)
        m = prior.kmin
        n1, n2 = prior.n1, prior.n2
        if fixed_first:
            rows = [(1,) + rest for rest in product(range(1, m + 1), repeat=n1 - 1)]
        else:
            rows = list(product(range(1, m + 1), repeat=n1))
        cols = list(product(range(1, m + 1), repeat=n2))
        self._assignments = [(z1, z2) for z1 in rows for z2 in cols]
        self._weight = Fraction(1, len(self._assignments))

    def _term(self, t: int, s: int) -> Fraction:
        """E[(lambda*s + N(0,1))^t] for indicator value s."""
        if s == 0:
            return Fraction(gaussian_raw_moment(t))
        acc = Fraction(0)
        for j in range(t + 1):
            acc += math.comb(t, j) * self.lam**j * gaussian_raw_moment(t - j)
        return acc

    def expect_y(self, gamma) -> Fraction:
        """E[Y^gamma] for a multi-index given as a tuple of ((i,j), mult)."""
        acc = Fraction(0)
        for z1, z2 in self._assignments:
            term = Fraction(1)
            for (i, j), t in gamma:
                s = 1 if z1[i - 1] == z2[j - 1] else 0
                term *= self._term(t, s)
            acc += term
        return acc * self._weight

    def expect_y_x(self, gamma) -> Fraction:
        """E[Y^gamma * M_11]."""
        acc = Fraction(0)
        for z1, z2 in self._assignments:
            if z1[0] != z2[0]:
                continue
            term = self.lam
            for (i, j), t in gamma:
                s = 1 if z1[i - 1] == z2[j - 1] else 0
                term *= self._term(t, s)
            acc += term
        return acc * self._weight

    def expect_x2(self) -> Fraction:
        acc = Fraction(0)
        for z1, z2 in self._assignments:
            if z1[0] == z2[0]:
                acc += self.lam**2
        return acc * self._weight


def exact_mmse_gaussian_bicluster(prior: BiclusterPrior, D: int, fixed_first: bool = True) -> ExactProjection:
    """Exact degree-D MMSE for estimating the (1,1) mean entry of the
    bicluster model from the noisy observation."""
    if D > MAX_GAUSS_D:
        raise GuardError(f"gaussian oracle guard: D <= {MAX_GAUSS_D}")
    model = BiclusterExactModel(prior, fixed_first)
    basis = gaussian_monomials(prior.n1, prior.n2, D)

    def gram(mi, mj):
        merged = {}
        for pos, t in mi:
            merged[pos] = merged.get(pos, 0) + t
        for pos, t in mj:
            merged[pos] = merged.get(pos, 0) + t
        return model.expect_y(tuple(sorted(merged.items())))

    def corr(mi):
        return model.expect_y_x(mi)

    return _project(basis, gram, corr, model.expect_x2(), D)


@dataclass(frozen=True)
class BiclusterSandwichReport:
    rhs: Fraction
    mmse: Fraction
    ex2: Fraction
    snr_ok: bool
    ok: bool


def bicluster_mmse_check(prior: BiclusterPrior, D: int, r) -> BiclusterSandwichReport:
    """Risk floor <= exact mmse <= E[x^2] for the bicluster oracle."""
    proj = exact_mmse_gaussian_bicluster(prior, D)
    lam = Fraction(str(prior.lam) if isinstance(prior.lam, float) else prior.lam)
    lam2 = lam * lam
    rhs = lowdeg_lower_bound_bicluster(prior.n1, prior.n2, prior.k1, prior.k2, lam2, r)
    m = prior.kmin
    thr = Fraction(r) / Fraction(D * (D + 1)) ** 2 * min(
        Fraction(1), Fraction(m * m, prior.n1 + prior.n2)
    ) if D >= 1 else None
    snr_ok = thr is None or lam2 <= thr
    ok = rhs <= proj.mmse <= proj.ex2
    return BiclusterSandwichReport(
        rhs=rhs, mmse=proj.mmse, ex2=proj.ex2, snr_ok=snr_ok, ok=ok
    )
