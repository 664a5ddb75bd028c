"""Exact cumulants of block-model priors, and the closed-form risk bounds.

``kappa(alpha)`` is the joint cumulant of the distinguished signal entry with
the multiset of signal entries indexed by the multigraph ``alpha``, computed
by the moment recursion

    kappa_0 = E[x],
    kappa_alpha = E[x X^alpha]
                  - sum over proper sub-multigraphs beta of
                    kappa_beta * binom(alpha, beta) * E[X^(alpha - beta)].

Values are exact rationals times a tracked power of the signal scale lambda
(lambda itself is generally irrational, but only lambda^2 is ever
substituted, which keeps everything exact).  An independent set-partition
oracle over exhaustively enumerated label assignments validates the
recursion.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
import math

from .errors import GuardError
from .multigraph import (
    BipartiteMultigraph,
    Multigraph,
    enumerate_binary_graphs,
    enumerate_bipartite_multigraphs,
    enumerate_multigraphs,
)


@dataclass(frozen=True)
class ScaledRational:
    """An exact value coeff * lambda^power.

    Sums require matching powers (zero is the exception and adopts the other
    side's power); products add powers.  This suffices because each cumulant
    is lambda-homogeneous of degree |alpha| + 1.
    """

    coeff: Fraction
    power: int

    @staticmethod
    def of(coeff, power: int = 0) -> "ScaledRational":
        return ScaledRational(Fraction(coeff), power)

    @property
    def is_zero(self) -> bool:
        return self.coeff == 0

    def __add__(self, other: "ScaledRational") -> "ScaledRational":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.power != other.power:
            raise ValueError(
                f"mixed lambda powers in sum: {self.power} vs {other.power}"
            )
        return ScaledRational(self.coeff + other.coeff, self.power)

    def __sub__(self, other: "ScaledRational") -> "ScaledRational":
        return self + (-other)

    def __neg__(self) -> "ScaledRational":
        return ScaledRational(-self.coeff, self.power)

    def __mul__(self, other):
        if isinstance(other, ScaledRational):
            return ScaledRational(self.coeff * other.coeff, self.power + other.power)
        return ScaledRational(self.coeff * Fraction(other), self.power)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScaledRational):
            return NotImplemented
        if self.coeff == 0 and other.coeff == 0:
            return True
        return self.coeff == other.coeff and self.power == other.power

    def __hash__(self):
        return hash((self.coeff, self.power if self.coeff else 0))

    def value_at_lambda_sq(self, lambda_sq) -> Fraction:
        """Substitute a rational lambda^2; requires an even power."""
        if self.coeff == 0:
            return Fraction(0)
        if self.power % 2:
            raise ValueError(f"odd lambda power {self.power} cannot take lambda^2")
        return self.coeff * Fraction(lambda_sq) ** (self.power // 2)


ZERO = ScaledRational(Fraction(0), 0)


# -- moment oracles ------------------------------------------------------------


class SbmMomentOracle:
    """Exact moments under the uniform fixed-first-vertex SBM prior.

    Signal entries are X_e = lambda * 1(z_i = z_j) with i.i.d. uniform labels
    over k communities and z_1 pinned; the distinguished scalar is the (1,2)
    entry.  For any multigraph g (connected or not),

        E[X^g] = lambda^|g| * (1/k)^(|V(g)| - components(g)),

    each connected component going monochromatic independently; the cross
    moment adds one more (1,2) edge to the graph.
    """

    kind = "sbm"

    def __init__(self, k: int):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.k = k

    def cache_token(self):
        return ("sbm", self.k)

    def moment(self, g: Multigraph) -> ScaledRational:
        expo = g.vertex_count - g.component_count
        return ScaledRational(Fraction(1, self.k**expo), g.size)

    def cross_moment(self, g: Multigraph) -> ScaledRational:
        joined = g.with_edge(1, 2)
        expo = joined.vertex_count - joined.component_count
        return ScaledRational(Fraction(1, self.k**expo), g.size + 1)

    def x_joined(self, g: Multigraph) -> Multigraph:
        return g.with_edge(1, 2)


class BiclusterMomentOracle:
    """Exact moments under the fixed-first-row bicluster prior.

    X_(i,j) = lambda * 1((z1)_i = (z2)_j) with labels uniform over
    m = k1 ^ k2 values; the distinguished scalar is the (1,1) entry, so the
    cross moment joins the bipartite edge (row 1, col 1).
    """

    kind = "bicluster"

    def __init__(self, m: int):
        if m < 1:
            raise ValueError("m must be >= 1")
        self.m = m

    def cache_token(self):
        return ("bicluster", self.m)

    def moment(self, g: BipartiteMultigraph) -> ScaledRational:
        expo = g.vertex_count - g.component_count
        return ScaledRational(Fraction(1, self.m**expo), g.size)

    def cross_moment(self, g: BipartiteMultigraph) -> ScaledRational:
        joined = g.with_edge(1, 1)
        expo = joined.vertex_count - joined.component_count
        return ScaledRational(Fraction(1, self.m**expo), g.size + 1)

    def x_joined(self, g: BipartiteMultigraph):
        return g.with_edge(1, 1)


# -- the recursion --------------------------------------------------------------

_KAPPA_CACHE: dict = {}


def clear_kappa_cache():
    _KAPPA_CACHE.clear()


def kappa(alpha, oracle, memoize: bool = True) -> ScaledRational:
    """Joint cumulant of (x, X entries of alpha) via the moment recursion.

    Memoized on the canonical relabeling of alpha that fixes the
    distinguished vertices, exploiting prior exchangeability over the rest.
    The memo table only ever receives deterministic values, so concurrent
    insert-if-absent is idempotent.
    """
    if alpha.sub_count() > 10**6:
        raise GuardError("kappa recursion guard: too many sub-multigraphs")
    if memoize:
        key = (oracle.cache_token(), alpha.canonical_key())
        hit = _KAPPA_CACHE.get(key)
        if hit is not None:
            return hit
    total = oracle.cross_moment(alpha)
    for beta, weight in alpha.sub_multigraphs():
        if beta == alpha:
            continue
        kb = kappa(beta, oracle, memoize)
        if kb.is_zero:
            continue
        total = total - kb * weight * oracle.moment(alpha.minus(beta))
    if not total.is_zero and total.power != alpha.size + 1:
        raise AssertionError("lambda-homogeneity violated in recursion")
    if memoize:
        total = _KAPPA_CACHE.setdefault(key, total)
    return total


# -- independent set-partition oracle -------------------------------------------


def set_partitions(items):
    """All partitions of a list into non-empty blocks."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def joint_cumulant(outcomes) -> Fraction:
    """Joint cumulant of finitely supported variables by Moebius inversion.

    ``outcomes`` is a list of (probability, values) pairs where ``values``
    holds one realization of every variable; probabilities must sum to 1.
    kappa(X_1..X_m) = sum over partitions pi of (|pi|-1)! (-1)^(|pi|-1)
    prod_{blocks B} E[prod_{i in B} X_i].
    """
    outcomes = [(Fraction(p), tuple(Fraction(v) for v in vals)) for p, vals in outcomes]
    total_prob = sum(p for p, _ in outcomes)
    if total_prob != 1:
        raise ValueError("outcome probabilities must sum to 1")
    m = len(outcomes[0][1])

    def block_moment(block):
        acc = Fraction(0)
        for p, vals in outcomes:
            term = p
            for idx in block:
                term *= vals[idx]
            acc += term
        return acc

    result = Fraction(0)
    for part in set_partitions(range(m)):
        b = len(part)
        term = Fraction(math.factorial(b - 1)) * (-1) ** (b - 1)
        for block in part:
            term *= block_moment(block)
        result += term
    return result


def _expand_multiset(alpha):
    """Edge list of alpha with one entry per multiplicity copy."""
    out = []
    for pair, m in alpha.edges:
        out.extend([pair] * m)
    return out


def kappa_via_enumeration(alpha: Multigraph, k: int) -> ScaledRational:
    """Set-partition oracle for the SBM prior: exhaustive enumeration over
    label assignments, independent of the moment recursion."""
    verts = sorted(alpha.support | {1, 2})
    free = [v for v in verts if v != 1]
    if k ** len(free) > 10**7:
        raise GuardError("joint-cumulant enumeration guard exceeded")
    edge_copies = _expand_multiset(alpha)
    outcomes = []
    weight = Fraction(1, k ** len(free))
    for labels in product(range(1, k + 1), repeat=len(free)):
        z = {1: 1}
        z.update(zip(free, labels))
        vals = [Fraction(int(z[1] == z[2]))]
        vals.extend(Fraction(int(z[i] == z[j])) for i, j in edge_copies)
        outcomes.append((weight, vals))
    coeff = joint_cumulant(outcomes)
    return ScaledRational(coeff, alpha.size + 1)


def bicluster_kappa_via_enumeration(alpha: BipartiteMultigraph, m: int) -> ScaledRational:
    """Set-partition oracle for the bicluster prior ((z1)_1 pinned to 1)."""
    rows = sorted(alpha.row_support | {1})
    cols = sorted(alpha.col_support | {1})
    free_rows = [v for v in rows if v != 1]
    total_free = len(free_rows) + len(cols)
    if m**total_free > 10**7:
        raise GuardError("joint-cumulant enumeration guard exceeded")
    edge_copies = _expand_multiset(alpha)
    outcomes = []
    weight = Fraction(1, m**total_free)
    for labels in product(range(1, m + 1), repeat=total_free):
        z1 = {1: 1}
        z1.update(zip(free_rows, labels[: len(free_rows)]))
        z2 = dict(zip(cols, labels[len(free_rows) :]))
        vals = [Fraction(int(z1[1] == z2[1]))]
        vals.extend(Fraction(int(z1[i] == z2[j])) for i, j in edge_copies)
        outcomes.append((weight, vals))
    coeff = joint_cumulant(outcomes)
    return ScaledRational(coeff, alpha.size + 1)


# -- structural scans ------------------------------------------------------------


def classify_alpha(alpha: Multigraph) -> str:
    """Zero-structure case tag for a non-empty multigraph.

    'zero-disconnected-or-no-2': disconnected, or connected avoiding vertex 2;
    'zero-2-without-1': connected through 2 but not 1;
    'bounded': connected through both distinguished vertices.
    """
    if not alpha.connected:
        return "zero-disconnected-or-no-2"
    sup = alpha.support
    if 2 not in sup:
        return "zero-disconnected-or-no-2"
    if 1 not in sup:
        return "zero-2-without-1"
    return "bounded"


@dataclass
class StructureReport:
    n: int
    k: int
    D: int
    checked: dict
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_kappa_structure(n: int, k: int, D: int, max_n: int = 6, max_d: int = 4) -> StructureReport:
    """Exhaustively assert the zero cases and the magnitude bound
    |coeff| <= (1/k)^(|V|-1) * (|alpha|+1)^|alpha| for all |alpha| <= D."""
    if n > max_n or D > max_d:
        raise GuardError(f"structure scan guard exceeded: n={n}, D={D}")
    oracle = SbmMomentOracle(k)
    checked = {"zero-disconnected-or-no-2": 0, "zero-2-without-1": 0, "bounded": 0}
    violations = []
    for d in range(1, D + 1):
        for alpha in enumerate_multigraphs(n, d):
            case = classify_alpha(alpha)
            checked[case] += 1
            val = kappa(alpha, oracle)
            if case.startswith("zero"):
                if not val.is_zero:
                    violations.append((alpha.to_text(), case, val))
            else:
                bound = Fraction(
                    (alpha.size + 1) ** alpha.size, k ** (alpha.vertex_count - 1)
                )
                if abs(val.coeff) > bound:
                    violations.append((alpha.to_text(), case, val))
    return StructureReport(n=n, k=k, D=D, checked=checked, violations=violations)


# -- summed squares and closed-form bounds ---------------------------------------


@dataclass(frozen=True)
class SumKappaReport:
    exact_sum: Fraction
    series_bound: Fraction
    simple_bound: Fraction
    condition_holds: bool


def _sum_kappa_series_bound(n_eff: int, k_eff: int, D: int, lambda_sq: Fraction) -> Fraction:
    """Unconditional series bound:
    lam^2/k^2 - lam^2/n + (lam^2/n) * sum_{h<=D} (D^2(D+1)^2 lam^2)^h
                                   * sum_{d=h..D} (D(D+1)^2 n lam^2 / k^2)^(d-h)."""
    lam2 = Fraction(lambda_sq)
    k2 = Fraction(k_eff**2)
    base_h = Fraction(D**2 * (D + 1) ** 2) * lam2
    base_d = Fraction(D * (D + 1) ** 2) * Fraction(n_eff) * lam2 / k2
    series = Fraction(0)
    for h in range(D + 1):
        inner = sum(base_d ** (d - h) for d in range(h, D + 1))
        series += base_h**h * inner
    return lam2 / k2 - lam2 / n_eff + lam2 / n_eff * series


def _sum_kappa_simple_bound(n_eff: int, k_eff: int, lambda_sq: Fraction, r: Fraction) -> Fraction:
    lam2, r = Fraction(lambda_sq), Fraction(r)
    return lam2 / k_eff**2 + r * (2 - r) * lam2 / ((1 - r) ** 2 * n_eff)


def sum_kappa(n: int, k: int, D: int, lambda_sq, r) -> SumKappaReport:
    """Exact sum of kappa_alpha^2 over binary alpha with |alpha| <= D, against
    both closed-form bounds (the simple one applies when lambda^2 is below the
    low-degree smallness threshold)."""
    lam2, r = Fraction(lambda_sq), Fraction(r)
    oracle = SbmMomentOracle(k)
    total = Fraction(0)
    for d in range(0, D + 1):
        if d == 0:
            val = kappa(Multigraph(n, ()), oracle)
            total += (val * val).value_at_lambda_sq(lam2)
            continue
        for alpha in enumerate_binary_graphs(n, d):
            val = kappa(alpha, oracle)
            if not val.is_zero:
                total += (val * val).value_at_lambda_sq(lam2)
    if D == 0:
        condition = True  # the smallness condition is vacuous without degrees
    else:
        threshold = r / Fraction(D * (D + 1)) ** 2 * min(Fraction(1), Fraction(k * k, n))
        condition = lam2 <= threshold
    return SumKappaReport(
        exact_sum=total,
        series_bound=_sum_kappa_series_bound(n, k, D, lam2),
        simple_bound=_sum_kappa_simple_bound(n, k, lam2, r),
        condition_holds=condition,
    )


def sum_kappa_bicluster(n1: int, n2: int, k1: int, k2: int, D: int, lambda_sq, r) -> SumKappaReport:
    """Gaussian-path analogue: sum of kappa_alpha^2 / alpha! over all
    multi-indices with |alpha| <= D, with k -> k1^k2 and n -> n1+n2."""
    lam2, r = Fraction(lambda_sq), Fraction(r)
    m = min(k1, k2)
    oracle = BiclusterMomentOracle(m)
    total = Fraction(0)
    for d in range(0, D + 1):
        if d == 0:
            val = kappa(BipartiteMultigraph(n1, n2, ()), oracle)
            total += (val * val).value_at_lambda_sq(lam2)
            continue
        for alpha in enumerate_bipartite_multigraphs(n1, n2, d):
            val = kappa(alpha, oracle)
            if val.is_zero:
                continue
            factorial = 1
            for _, mult in alpha.edges:
                factorial *= math.factorial(mult)
            total += (val * val).value_at_lambda_sq(lam2) / factorial
    n_eff = n1 + n2
    if D == 0:
        condition = True
    else:
        threshold = r / Fraction(D * (D + 1)) ** 2 * min(Fraction(1), Fraction(m * m, n_eff))
        condition = lam2 <= threshold
    return SumKappaReport(
        exact_sum=total,
        series_bound=_sum_kappa_series_bound(n_eff, m, D, lam2),
        simple_bound=_sum_kappa_simple_bound(n_eff, m, lam2, r),
        condition_holds=condition,
    )


def lowdeg_lower_bound_sbm(n: int, k: int, p, q, r) -> Fraction:
    """Degree-D risk floor for SBM graphon estimation under the smallness
    condition: (p-q)^2/k - (p-q)^2 (1/k^2 + r(2-r)/((1-r)^2 n))."""
    p, q, r = Fraction(p), Fraction(q), Fraction(r)
    gap2 = (p - q) ** 2
    return gap2 / k - gap2 * (Fraction(1, k * k) + r * (2 - r) / ((1 - r) ** 2 * n))


@dataclass(frozen=True)
class LowerBoundRecord:
    rhs: Fraction
    snr_ok: bool
    vacuous: bool


def lowdeg_lower_bound_record(n: int, k: int, p, q, D: int, r) -> LowerBoundRecord:
    from .model import lowdeg_snr_threshold, snr_fraction

    p, q, r = Fraction(p), Fraction(q), Fraction(r)
    rhs = lowdeg_lower_bound_sbm(n, k, p, q, r)
    snr = snr_fraction(p, q)
    thr = lowdeg_snr_threshold(n, k, D, r)
    snr_ok = snr is not None and (thr is None or snr <= thr)
    return LowerBoundRecord(rhs=rhs, snr_ok=snr_ok, vacuous=rhs <= 0)


def lowdeg_clustering_lower_bound(n: int, k: int, r) -> Fraction:
    """Clustering-loss floor 1/k - (1/k^2 + r(2-r)/((1-r)^2 n))."""
    r = Fraction(r)
    return Fraction(1, k) - (Fraction(1, k * k) + r * (2 - r) / ((1 - r) ** 2 * n))


def best_lowdeg_rate_bound(n: int, k: int, D: int, r, eps=Fraction(1, 100), steps: int = 60) -> Fraction:
    """Maximize the SBM risk floor over eps <= q <= p <= 1-eps subject to the
    smallness condition, on a rational grid; the desk-scale stand-in for the
    (k/n ^ 1/k)/D^4 rate whose absolute constant is never explicit."""
    from .model import lowdeg_snr_threshold, snr_fraction

    r, eps = Fraction(r), Fraction(eps)
    thr = lowdeg_snr_threshold(n, k, D, r)
    best = Fraction(0)
    for i in range(steps + 1):
        q = eps + (1 - 2 * eps) * Fraction(i, steps)
        for j in range(steps + 1):
            p = q + (1 - eps - q) * Fraction(j, steps)
            snr = snr_fraction(p, q)
            if snr is None or (thr is not None and snr > thr):
                continue
            best = max(best, lowdeg_lower_bound_sbm(n, k, p, q, r))
    return best


def lowdeg_lower_bound_bicluster(n1: int, n2: int, k1: int, k2: int, lambda_sq, r) -> Fraction:
    """Bicluster risk floor lam^2/m - (lam^2/m^2 + r(2-r) lam^2/((1-r)^2 (n1+n2)))."""
    lam2, r = Fraction(lambda_sq), Fraction(r)
    m = min(k1, k2)
    return lam2 / m - (lam2 / m**2 + r * (2 - r) * lam2 / ((1 - r) ** 2 * (n1 + n2)))
