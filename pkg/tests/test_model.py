"""Priors, samplers, losses and SNR threshold checks."""

from fractions import Fraction
import math

import numpy as np
import pytest

from graphon_ldp.model import (
    BiclusterPrior,
    SbmPqPrior,
    build_probability_matrix,
    clustering_loss,
    empirical_loss,
    membership_matrix,
    sample_adjacency,
    sample_bicluster,
    sample_membership,
    snr_and_thresholds,
)


class TestSampleMembership:
    def test_single_community(self):
        prior = SbmPqPrior(n=3, k=1, p=0.5, q=0.5)
        for seed in range(5):
            assert np.array_equal(sample_membership(prior, seed), [1, 1, 1])

    def test_fixed_first_pins_z1(self):
        prior = SbmPqPrior(n=2, k=2, p=0.8, q=0.2, fixed_first=True)
        hits = 0
        trials = 4000
        for seed in range(trials):
            z = sample_membership(prior, seed)
            assert z[0] == 1
            hits += z[1] == 1
        # z2 uniform over {1, 2}: binomial 4-sigma band around 1/2
        sigma = math.sqrt(trials * 0.25)
        assert abs(hits - trials / 2) < 4 * sigma

    def test_label_frequencies_k4(self):
        """Empirical frequencies over 1e5 seeds each within 4 sigma of 1/4."""
        prior = SbmPqPrior(n=2, k=4, p=0.5, q=0.2, fixed_first=True)
        trials = 10**5
        counts = np.zeros(5, dtype=int)
        for seed in range(trials):
            counts[sample_membership(prior, seed)[1]] += 1
        sigma = math.sqrt(trials * 0.25 * 0.75)
        for label in range(1, 5):
            assert abs(counts[label] - trials / 4) < 4 * sigma

    def test_deterministic_given_seed(self):
        prior = SbmPqPrior(n=10, k=3, p=0.6, q=0.1)
        assert np.array_equal(sample_membership(prior, 42), sample_membership(prior, 42))


class TestProbabilityMatrix:
    def test_same_community_pair(self):
        M = build_probability_matrix(np.array([1, 1]), 0.9, 0.1)
        np.testing.assert_allclose(M, [[0.0, 0.9], [0.9, 0.0]])

    def test_cross_community_pair(self):
        M = build_probability_matrix(np.array([1, 2]), 0.9, 0.1)
        assert M[0, 1] == 0.1

    def test_degenerate_levels(self):
        M = build_probability_matrix(np.array([1, 2, 1]), 0.5, 0.5)
        off = M[~np.eye(3, dtype=bool)]
        assert np.all(off == 0.5)

    def test_rejects_p_below_q(self):
        with pytest.raises(ValueError):
            build_probability_matrix(np.array([1, 2]), 0.1, 0.9)

    def test_two_level_structure(self):
        z = np.array([1, 1, 2, 3])
        M = build_probability_matrix(z, 0.7, 0.2)
        off = M[np.triu_indices(4, k=1)]
        assert set(off.tolist()) == {0.7, 0.2}


class TestSampleAdjacency:
    def test_all_zero_probability(self):
        assert not sample_adjacency(np.zeros((4, 4)), 0).any()

    def test_complete_graph(self):
        M = np.ones((4, 4)) - np.eye(4)
        A = sample_adjacency(M, 0)
        assert np.array_equal(A, (np.ones((4, 4)) - np.eye(4)).astype(np.int8))

    def test_symmetric_zero_diagonal(self):
        M = build_probability_matrix(np.array([1, 2, 1, 2, 2]), 0.7, 0.3)
        for seed in range(20):
            A = sample_adjacency(M, seed)
            assert np.array_equal(A, A.T)
            assert not np.diag(A).any()
            assert set(np.unique(A)) <= {0, 1}

    def test_edge_frequency(self):
        """Edge frequency for M_ij = 0.3 within 4 sigma over ~1e5 Bernoulli draws."""
        n = 101
        M = np.full((n, n), 0.3)
        np.fill_diagonal(M, 0.0)
        pairs = math.comb(n, 2)
        draws = 20
        total = 0
        for seed in range(draws):
            A = sample_adjacency(M, seed)
            total += int(np.sum(np.triu(A, k=1)))
        N = pairs * draws
        sigma = math.sqrt(N * 0.3 * 0.7)
        assert abs(total - 0.3 * N) < 4 * sigma


class TestEmpiricalLoss:
    def test_zero_on_equal(self):
        M = build_probability_matrix(np.array([1, 2, 1]), 0.6, 0.2)
        assert empirical_loss(M, M) == 0.0

    def test_single_pair(self):
        Mhat = np.array([[0.0, 0.5], [0.5, 0.0]])
        M = np.zeros((2, 2))
        assert empirical_loss(Mhat, M) == 0.25

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            empirical_loss(np.zeros((2, 2)), np.zeros((3, 3)))

    def test_affine_identity_exact(self):
        """loss(q + (p-q) Zhat, M) == (p-q)^2 loss(Zhat, Z) exactly on rationals."""
        p, q = Fraction(7, 10), Fraction(1, 5)
        Z = membership_matrix(np.array([1, 2, 1, 3]))
        vals = [Fraction(1, 3), Fraction(2, 7), Fraction(0), Fraction(1), Fraction(3, 5), Fraction(1, 2)]
        Zobj = np.empty((4, 4), dtype=object)
        Zhat = np.empty((4, 4), dtype=object)
        M = np.empty((4, 4), dtype=object)
        Mhat = np.empty((4, 4), dtype=object)
        idx = 0
        for i in range(4):
            for j in range(4):
                Zobj[i, j] = Fraction(int(Z[i, j]))
                M[i, j] = Fraction(0) if i == j else q + (p - q) * Zobj[i, j]
        for i in range(4):
            Zhat[i, i] = Fraction(0)
            for j in range(i + 1, 4):
                Zhat[i, j] = Zhat[j, i] = vals[idx % len(vals)]
                idx += 1
        for i in range(4):
            for j in range(4):
                Mhat[i, j] = Fraction(0) if i == j else q + (p - q) * Zhat[i, j]
        lhs = empirical_loss(Mhat, M)
        rhs = (p - q) ** 2 * empirical_loss(Zhat, Zobj)
        assert lhs == rhs


class TestMembership:
    def test_example(self):
        Z = membership_matrix(np.array([1, 1, 2]))
        np.testing.assert_array_equal(Z, [[0, 1, 0], [1, 0, 0], [0, 0, 0]])

    def test_self_loss_zero(self):
        Z = membership_matrix(np.array([1, 2, 2, 3]))
        assert clustering_loss(Z, Z) == 0.0

    def test_zero_estimator_trivial_error(self):
        """The all-zero membership guess has expected loss 1/k under the prior."""
        k, n, reps = 4, 30, 400
        prior = SbmPqPrior(n=n, k=k, p=0.6, q=0.2)
        losses = []
        for seed in range(reps):
            z = sample_membership(prior, seed)
            Z = membership_matrix(z)
            losses.append(clustering_loss(np.zeros((n, n)), Z))
        mean = np.mean(losses)
        se = np.std(losses, ddof=1) / math.sqrt(reps)
        assert abs(mean - 1.0 / k) < 4 * se


class TestSnrThresholds:
    def test_zero_signal(self):
        rep = snr_and_thresholds(50, 2, 0.4, 0.4, 2, Fraction(1, 2))
        assert rep.snr == 0.0
        assert rep.sw_condition_holds
        assert rep.ks_value == 0.0

    def test_threshold_value(self):
        rep = snr_and_thresholds(100, 2, 0.5, 0.49, 1, Fraction(1, 2))
        assert rep.sw_threshold == pytest.approx(0.005, abs=1e-15)

    def test_infinite_snr(self):
        rep = snr_and_thresholds(50, 2, 1.0, 0.3, 1, Fraction(1, 2))
        assert math.isinf(rep.snr)
        assert not rep.sw_condition_holds

    def test_ks_value(self):
        rep = snr_and_thresholds(300, 2, 0.9, 0.1, 1, Fraction(1, 2))
        assert rep.ks_value == pytest.approx(300 * 0.64 / (2 * (0.9 + 0.1)), rel=1e-12)


class TestBicluster:
    def test_zero_signal(self):
        prior = BiclusterPrior(n1=3, n2=4, k1=2, k2=2, lam=0.0)
        _, _, M, Y = sample_bicluster(prior, 0)
        assert not M.any()
        assert Y.shape == (3, 4)

    def test_single_cluster_all_lam(self):
        prior = BiclusterPrior(n1=3, n2=3, k1=1, k2=5, lam=2.5)
        _, _, M, _ = sample_bicluster(prior, 1)
        assert np.all(M == 2.5)

    def test_noise_moments(self):
        """Mean of Y - M within 4 sigma of 0, variance near 1, over ~1e5 entries."""
        prior = BiclusterPrior(n1=100, n2=100, k1=2, k2=2, lam=1.0)
        diffs = []
        for seed in range(10):
            _, _, M, Y = sample_bicluster(prior, seed)
            diffs.append((Y - M).ravel())
        E = np.concatenate(diffs)
        N = E.size
        assert N == 10**5
        assert abs(E.mean()) < 4 / math.sqrt(N)
        assert abs(E.var() - 1.0) < 0.02

    def test_fixed_first(self):
        prior = BiclusterPrior(n1=4, n2=4, k1=3, k2=2, lam=1.0, fixed_first=True)
        for seed in range(10):
            z1, _, _, _ = sample_bicluster(prior, seed)
            assert z1[0] == 1
