"""Mollifier, smooth cutoff and the block-embedding graphon."""

import math

import numpy as np
import pytest
import scipy.integrate as si

from graphon_ldp.smooth import (
    SmoothGraphonSpec,
    adaptive_simpson,
    cutoff_psi,
    graphon_fqp,
    graphon_probability_matrix,
    mollifier,
    mollifier_constant,
    sample_graphon,
)


def test_adaptive_simpson_against_quad():
    for f, a, b in [(math.sin, 0.0, 2.0), (lambda x: math.exp(-x * x), -1.0, 3.0)]:
        ours = adaptive_simpson(f, a, b, 1e-12)
        ref, _ = si.quad(f, a, b, epsabs=1e-13)
        assert abs(ours - ref) < 1e-10


def test_mollifier_constant_matches_quad():
    """Independent quadrature route for the normalizing constant."""
    raw, _ = si.quad(
        lambda x: math.exp(-1.0 / (1.0 - 64 * x * x)) if abs(x) < 0.125 else 0.0,
        -0.125,
        0.125,
        epsabs=1e-13,
    )
    assert abs(1.0 / mollifier_constant() - raw) < 1e-10


def test_mollifier_integrates_to_one():
    total = adaptive_simpson(lambda x: float(mollifier(x)), -0.125, 0.125, 1e-12)
    assert abs(total - 1.0) < 1e-9


def test_mollifier_support():
    assert mollifier(0.2) == 0.0
    assert mollifier(-0.125) == 0.0
    assert mollifier(0.0) > 0


class TestCutoff:
    def test_one_on_inner_interval(self):
        xs = np.linspace(-0.25, 0.25, 101)
        assert np.max(np.abs(cutoff_psi(xs) - 1.0)) < 1e-8

    def test_zero_outside_support(self):
        assert cutoff_psi(0.6) == 0.0
        assert cutoff_psi(-0.5) == 0.0
        assert cutoff_psi(0.5) == 0.0

    def test_symmetric(self):
        xs = np.linspace(0.0, 0.49, 57)
        np.testing.assert_array_equal(cutoff_psi(xs), cutoff_psi(-xs))

    def test_ramp_against_direct_quadrature(self):
        """psi on the ramp equals the integral of the bump over the window."""
        ck = mollifier_constant()

        def k_fn(u):
            return ck * math.exp(-1.0 / (1.0 - 64 * u * u)) if abs(u) < 0.125 else 0.0

        for x in (0.3, 0.375, 0.45):
            direct, _ = si.quad(k_fn, x - 0.375, 0.125, epsabs=1e-12)
            assert abs(float(cutoff_psi(x)) - direct) < 1e-7

    def test_monotone_ramp(self):
        xs = np.linspace(0.25, 0.5, 200)
        vals = cutoff_psi(xs)
        assert np.all(np.diff(vals) <= 1e-12)


class TestGraphon:
    def test_block_center_value(self):
        spec = SmoothGraphonSpec(k=4, p=0.5, q=0.3, delta=0.5)
        for a in range(1, 5):
            c = (a - 0.5) / 4
            assert graphon_fqp(c, c, spec) == pytest.approx(0.5 * 0.5, abs=1e-12)

    def test_off_block_center_value(self):
        spec = SmoothGraphonSpec(k=4, p=0.5, q=0.3, delta=0.5)
        assert graphon_fqp(0.125, 0.375, spec) == pytest.approx(0.5 * 0.3, abs=1e-12)

    def test_values_in_unit_interval(self):
        spec = SmoothGraphonSpec(k=3, p=0.6, q=0.3, delta=1.0)
        rng = np.random.default_rng(0)
        x, y = rng.random(500), rng.random(500)
        vals = graphon_fqp(x, y, spec)
        assert np.all(vals >= 0) and np.all(vals <= 1)

    def test_symmetry(self):
        spec = SmoothGraphonSpec(k=3, p=0.5, q=0.25)
        rng = np.random.default_rng(1)
        x, y = rng.random(50), rng.random(50)
        np.testing.assert_allclose(graphon_fqp(x, y, spec), graphon_fqp(y, x, spec))

    def test_rejects_rough_levels(self):
        with pytest.raises(ValueError):
            SmoothGraphonSpec(k=4, p=0.9, q=0.3)

    def test_probability_matrix(self):
        spec = SmoothGraphonSpec(k=2, p=0.7, q=0.3, delta=0.5)
        xi = np.array([0.25, 0.75, 0.1])
        M = graphon_probability_matrix(spec, xi)
        assert np.allclose(M, M.T)
        assert not np.diag(M).any()
        assert M[0, 1] == pytest.approx(0.5 * 0.3, abs=1e-12)

    def test_grid_permutation_design(self):
        spec = SmoothGraphonSpec(k=2, p=0.7, q=0.3)
        xi, M = sample_graphon(spec, 8, 3, design="grid-permutation")
        assert sorted(xi.tolist()) == [i / 8 for i in range(1, 9)]
        assert M.shape == (8, 8)

    def test_unknown_design(self):
        spec = SmoothGraphonSpec(k=2, p=0.7, q=0.3)
        with pytest.raises(ValueError):
            sample_graphon(spec, 5, 0, design="sorted")
