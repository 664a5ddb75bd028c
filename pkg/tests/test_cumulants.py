"""Exact cumulants: moment formulas, the recursion, the set-partition oracle,
structural zero/magnitude facts, and the closed-form bounds."""

from fractions import Fraction

import pytest

from graphon_ldp.cumulants import (
    BiclusterMomentOracle,
    SbmMomentOracle,
    ScaledRational,
    bicluster_kappa_via_enumeration,
    best_lowdeg_rate_bound,
    clear_kappa_cache,
    joint_cumulant,
    kappa,
    kappa_via_enumeration,
    lowdeg_clustering_lower_bound,
    lowdeg_lower_bound_bicluster,
    lowdeg_lower_bound_record,
    lowdeg_lower_bound_sbm,
    set_partitions,
    sum_kappa,
    sum_kappa_bicluster,
    verify_kappa_structure,
)
from graphon_ldp.multigraph import (
    BipartiteMultigraph,
    Multigraph,
    enumerate_bipartite_multigraphs,
    enumerate_multigraphs,
)


def mg(n, edges):
    return Multigraph.from_edges(n, edges)


class TestScaledRational:
    def test_sum_requires_matching_powers(self):
        a = ScaledRational.of(Fraction(1, 2), 3)
        b = ScaledRational.of(Fraction(1, 3), 2)
        with pytest.raises(ValueError):
            _ = a + b

    def test_zero_adapts(self):
        zero = ScaledRational.of(0, 7)
        a = ScaledRational.of(Fraction(1, 2), 3)
        assert (zero + a) == a
        assert (a - a).is_zero

    def test_product_adds_powers(self):
        a = ScaledRational.of(Fraction(1, 2), 3)
        b = ScaledRational.of(Fraction(2, 5), 1)
        assert a * b == ScaledRational.of(Fraction(1, 5), 4)
        assert 3 * a == ScaledRational.of(Fraction(3, 2), 3)

    def test_substitution(self):
        a = ScaledRational.of(Fraction(3, 4), 4)
        assert a.value_at_lambda_sq(Fraction(1, 9)) == Fraction(3, 4) / 81
        with pytest.raises(ValueError):
            ScaledRational.of(1, 3).value_at_lambda_sq(Fraction(1, 2))


class TestMoments:
    def test_connected_single_edge(self):
        o = SbmMomentOracle(3)
        assert o.moment(mg(5, {(1, 2): 1})) == ScaledRational.of(Fraction(1, 3), 1)

    def test_connected_path(self):
        o = SbmMomentOracle(3)
        assert o.moment(mg(5, {(1, 2): 1, (2, 3): 1})) == ScaledRational.of(Fraction(1, 9), 2)

    def test_disjoint_components(self):
        o = SbmMomentOracle(2)
        assert o.moment(mg(5, {(1, 2): 1, (3, 4): 1})) == ScaledRational.of(Fraction(1, 4), 2)

    def test_empty(self):
        o = SbmMomentOracle(4)
        assert o.moment(Multigraph(5, ())) == ScaledRational.of(1, 0)

    def test_cross_moment_empty(self):
        o = SbmMomentOracle(4)
        assert o.cross_moment(Multigraph(5, ())) == ScaledRational.of(Fraction(1, 4), 1)

    def test_cross_moment_on_x_edge(self):
        o = SbmMomentOracle(2)
        assert o.cross_moment(mg(5, {(1, 2): 1})) == ScaledRational.of(Fraction(1, 2), 2)

    def test_cross_moment_disjoint(self):
        o = SbmMomentOracle(3)
        assert o.cross_moment(mg(5, {(3, 4): 1})) == ScaledRational.of(Fraction(1, 9), 2)

    def test_moment_by_enumeration(self):
        """Closed form against direct averaging over label assignments."""
        from itertools import product

        k = 3
        o = SbmMomentOracle(k)
        for edges in [{(1, 2): 1, (3, 4): 2}, {(1, 3): 1, (2, 3): 1, (4, 5): 1}]:
            g = mg(5, edges)
            expect = Fraction(0)
            copies = [(i, j) for (i, j), m in g.edges for _ in range(m)]
            for z in product(range(k), repeat=5):
                if all(z[i - 1] == z[j - 1] for i, j in copies):
                    expect += Fraction(1, k**5)
            assert o.moment(g).coeff == expect


class TestKappa:
    def test_empty(self):
        assert kappa(Multigraph(4, ()), SbmMomentOracle(2)) == ScaledRational.of(Fraction(1, 2), 1)

    def test_x_edge(self):
        assert kappa(mg(4, {(1, 2): 1}), SbmMomentOracle(2)) == ScaledRational.of(Fraction(1, 4), 2)

    def test_connected_without_vertex_two(self):
        assert kappa(mg(4, {(3, 4): 1}), SbmMomentOracle(2)).is_zero

    def test_case_two_without_one(self):
        assert kappa(mg(4, {(2, 3): 1, (3, 4): 1}), SbmMomentOracle(2)).is_zero

    def test_homogeneity(self):
        o = SbmMomentOracle(3)
        for edges in [{(1, 2): 2}, {(1, 2): 1, (1, 3): 1, (2, 3): 1}, {(1, 3): 2, (2, 3): 1}]:
            g = mg(4, edges)
            val = kappa(g, o)
            if not val.is_zero:
                assert val.power == g.size + 1

    def test_memoization_matches_plain_recursion(self):
        clear_kappa_cache()
        o = SbmMomentOracle(3)
        for edges in [{(1, 3): 1, (3, 4): 1}, {(1, 2): 1, (2, 4): 2}, {(1, 2): 1, (1, 3): 1, (2, 3): 1}]:
            g = mg(5, edges)
            assert kappa(g, o, memoize=True) == kappa(g, o, memoize=False)

    def test_triangle_bound(self):
        g = mg(4, {(1, 2): 1, (1, 3): 1, (2, 3): 1})
        val = kappa(g, SbmMomentOracle(2))
        assert abs(val.coeff) <= Fraction(4**3, 2**2)


class TestJointCumulantOracle:
    def test_single_variable_mean(self):
        outcomes = [(Fraction(1, 4), (Fraction(3),)), (Fraction(3, 4), (Fraction(7),))]
        assert joint_cumulant(outcomes) == Fraction(3, 4) + Fraction(21, 4)

    def test_shift_only_moves_singletons(self):
        base = [
            (Fraction(1, 3), (Fraction(0), Fraction(1))),
            (Fraction(1, 3), (Fraction(1), Fraction(1))),
            (Fraction(1, 3), (Fraction(2), Fraction(0))),
        ]
        shifted_pair = [(p, (v0 + 5, v1)) for p, (v0, v1) in base]
        assert joint_cumulant(shifted_pair) == joint_cumulant(base)
        single = [(p, (v0,)) for p, (v0, _) in base]
        shifted_single = [(p, (v0 + 5,)) for p, (v0,) in single]
        assert joint_cumulant(shifted_single) == joint_cumulant(single) + 5

    def test_scaling(self):
        base = [
            (Fraction(1, 2), (Fraction(1), Fraction(2), Fraction(1))),
            (Fraction(1, 4), (Fraction(0), Fraction(1), Fraction(3))),
            (Fraction(1, 4), (Fraction(2), Fraction(0), Fraction(1))),
        ]
        scaled = [(p, (7 * v0, v1, v2)) for p, (v0, v1, v2) in base]
        assert joint_cumulant(scaled) == 7 * joint_cumulant(base)

    def test_independent_groups_vanish(self):
        """Product distribution of (X, X) with (Y,): cumulant must be zero."""
        xs = [(Fraction(1, 2), Fraction(0)), (Fraction(1, 2), Fraction(1))]
        ys = [(Fraction(1, 3), Fraction(2)), (Fraction(2, 3), Fraction(5))]
        outcomes = [
            (px * py, (vx, vx, vy)) for px, vx in xs for py, vy in ys
        ]
        assert joint_cumulant(outcomes) == 0

    def test_partition_count(self):
        assert len(list(set_partitions(range(4)))) == 15
        assert len(list(set_partitions(range(5)))) == 52


class TestRecursionAgainstOracle:
    def test_sbm_small(self):
        for k in (2, 3):
            o = SbmMomentOracle(k)
            for d in (1, 2):
                for alpha in enumerate_multigraphs(4, d):
                    assert kappa(alpha, o) == kappa_via_enumeration(alpha, k)

    def test_bicluster_small(self):
        for m in (2, 3):
            o = BiclusterMomentOracle(m)
            for d in (1, 2):
                for alpha in enumerate_bipartite_multigraphs(2, 2, d):
                    assert kappa(alpha, o) == bicluster_kappa_via_enumeration(alpha, m)


class TestStructure:
    def test_scan_clean(self):
        rep = verify_kappa_structure(4, 2, 3)
        assert rep.ok
        assert rep.checked["bounded"] > 0
        assert rep.checked["zero-disconnected-or-no-2"] > 0

    def test_bicluster_zero_structure(self):
        """Disconnected, or missing a distinguished side vertex: kappa = 0."""
        o = BiclusterMomentOracle(2)
        for d in (1, 2):
            for alpha in enumerate_bipartite_multigraphs(3, 3, d):
                val = kappa(alpha, o)
                rows, cols = alpha.row_support, alpha.col_support
                if not alpha.connected or 1 not in cols or 1 not in rows:
                    assert val.is_zero, alpha
                else:
                    bound = Fraction((alpha.size + 1) ** alpha.size, 2 ** (alpha.vertex_count - 1))
                    assert abs(val.coeff) <= bound


class TestSumKappa:
    def test_degree_zero(self):
        rep = sum_kappa(5, 2, 0, Fraction(1, 100), Fraction(1, 2))
        assert rep.exact_sum == Fraction(1, 100) / 4

    def test_zero_signal(self):
        rep = sum_kappa(5, 2, 2, Fraction(0), Fraction(1, 2))
        assert rep.exact_sum == 0
        assert rep.simple_bound == 0

    def test_bounds_hold_below_threshold(self):
        n, k, D, r = 5, 2, 2, Fraction(1, 2)
        thr = r / Fraction(D * (D + 1)) ** 2 * Fraction(4, 5)
        rep = sum_kappa(n, k, D, thr / 2, r)
        assert rep.condition_holds
        assert rep.exact_sum <= rep.series_bound
        assert rep.exact_sum <= rep.simple_bound

    def test_bicluster_bounds(self):
        rep = sum_kappa_bicluster(2, 2, 2, 2, 2, Fraction(1, 200), Fraction(1, 2))
        assert rep.condition_holds
        assert rep.exact_sum <= rep.simple_bound
        assert rep.exact_sum <= rep.series_bound


class TestBounds:
    def test_rhs_value(self):
        # n=100, k=2, r=1/2: factor is 1/2 - 1/4 - (3/4)/(1/4 * 100) = 0.22
        p, q = Fraction(3, 5), Fraction(2, 5)
        rhs = lowdeg_lower_bound_sbm(100, 2, p, q, Fraction(1, 2))
        assert rhs == (p - q) ** 2 * Fraction(22, 100)

    def test_vacuous_at_tiny_n(self):
        rec = lowdeg_lower_bound_record(4, 2, Fraction(3, 5), Fraction(2, 5), 1, Fraction(1, 2))
        assert rec.vacuous

    def test_zero_gap(self):
        assert lowdeg_lower_bound_sbm(100, 2, Fraction(1, 2), Fraction(1, 2), Fraction(1, 2)) == 0

    def test_clustering_bound(self):
        val = lowdeg_clustering_lower_bound(100, 2, Fraction(1, 2))
        assert val == Fraction(1, 2) - Fraction(1, 4) - Fraction(3, 4) / 25

    def test_bicluster_rhs(self):
        val = lowdeg_lower_bound_bicluster(10, 10, 2, 3, Fraction(1, 100), Fraction(1, 2))
        expected = Fraction(1, 100) * (
            Fraction(1, 2) - Fraction(1, 4) - Fraction(3, 4) / (Fraction(1, 4) * 20)
        )
        assert val == expected

    def test_best_rate_bound_positive(self):
        val = best_lowdeg_rate_bound(100, 2, 1, Fraction(1, 2), steps=25)
        assert val > 0
