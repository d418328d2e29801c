import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwperturb.errors import DimensionMismatch, NotErgodic, OverlapTooSmall
from qwperturb.markov_core import Distribution, tv_distance, uniform_chain, validate
from qwperturb.perturb import random_row_perturbation
from qwperturb.sampler import (
    ChainSequence,
    build_sequence,
    emulate_sampling,
    overlap,
    verify_triangle,
)

Q2 = [[0.75, 0.25], [0.5, 0.5]]


class TestOverlap:
    def test_examples(self):
        assert overlap([0.3, 0.7], [0.3, 0.7]) == pytest.approx(1.0, abs=1e-15)
        assert overlap([1.0, 0.0], [0.0, 1.0]) == 0.0
        expected = (math.sqrt(0.375) + math.sqrt(0.125)) ** 2
        assert overlap([0.5, 0.5], [0.75, 0.25]) == pytest.approx(expected, abs=1e-15)
        assert round(expected, 4) == 0.9330

    def test_mismatch(self):
        with pytest.raises(DimensionMismatch):
            overlap([0.5, 0.5], [1 / 3] * 3)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(2, 12), st.integers(0, 2**32 - 1))
    def test_symmetric_and_fidelity_tv(self, n, seed):
        rng = np.random.default_rng(seed)
        p, q = rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))
        f = overlap(p, q)
        assert f == pytest.approx(overlap(q, p), abs=1e-15)
        assert 0.0 <= f <= 1.0 + 1e-15
        assert f >= (1.0 - tv_distance(p, q)) ** 2 - 1e-12


def _interpolant_pi(beta):
    """Stationary law of (1 - beta) J/2 + beta Q2 by the two-state balance, exactly."""
    b = Fraction(beta)
    a01 = (1 - b) * Fraction(1, 2) + b * Fraction(1, 4)
    a10 = (1 - b) * Fraction(1, 2) + b * Fraction(1, 2)
    return a10 / (a01 + a10), a01 / (a01 + a10)


class TestSequence:
    def test_endpoints_only(self):
        seq = build_sequence(Q2, 1)
        assert seq.r == 1
        np.testing.assert_allclose(seq.chains[0].entries, 0.5, atol=0)
        np.testing.assert_array_equal(seq.chains[1].entries, np.array(Q2))

    def test_symmetric_target_has_unit_overlaps(self, sym_chain):
        seq = build_sequence(sym_chain(7), 5)
        np.testing.assert_allclose(seq.overlaps, 1.0, atol=1e-14)
        for d in seq.distributions:
            np.testing.assert_allclose(d.weights, 1 / 7, atol=1e-15)

    def test_two_state_overlaps_against_rational_balance(self):
        seq = build_sequence(Q2, 4)
        for i, d in enumerate(seq.distributions):
            exact = _interpolant_pi(Fraction(i, 4))
            np.testing.assert_allclose(d.weights, [float(x) for x in exact], atol=1e-14)
        assert (seq.overlaps >= 0.99).all()
        assert seq.c == seq.overlaps.min()
        assert np.all(seq.gaps > 0)

    def test_every_interpolant_is_ergodic(self, gen_chain):
        seq = build_sequence(gen_chain(6), 6)
        assert all(ch.ergodic for ch in seq.chains)

    def test_errors(self):
        with pytest.raises(NotErgodic):
            build_sequence([[0.0, 1.0], [1.0, 0.0]], 3)
        with pytest.raises(ValueError):
            build_sequence(Q2, 0)


class TestEmulation:
    def test_zero_eta_returns_target(self):
        seq = build_sequence(Q2, 4)
        s = emulate_sampling(seq, 0.0, 5)
        np.testing.assert_array_equal(s.output.weights, s.target.weights)
        assert s.achieved_tv == 0.0

    def test_two_state_example(self):
        s = emulate_sampling(build_sequence(Q2, 4), 0.05, 7)
        np.testing.assert_allclose(s.target.weights, [2 / 3, 1 / 3], atol=1e-14)
        assert 0.0 <= s.achieved_tv <= 0.05
        assert s.achieved_tv == pytest.approx(tv_distance(s.target, s.output), abs=1e-15)

    def test_deterministic(self, gen_chain):
        seq = build_sequence(gen_chain(5), 3)
        a, b = emulate_sampling(seq, 0.08, 11), emulate_sampling(seq, 0.08, 11)
        np.testing.assert_array_equal(a.output.weights, b.output.weights)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(2, 10), st.floats(0.0, 0.5), st.integers(0, 2**32 - 1))
    def test_output_within_eta(self, n, eta, seed):
        rng = np.random.default_rng(seed)
        p = rng.random((n, n)) + 0.05
        p /= p.sum(axis=1, keepdims=True)
        s = emulate_sampling(build_sequence(p, 2), eta, seed)
        assert s.achieved_tv <= eta + 1e-12
        Distribution.of(s.output.weights)

    def test_low_overlap_warns(self):
        q = validate([[0.98, 0.02], [0.98, 0.02]])
        seq = build_sequence(q, 1)
        assert seq.c < 0.9
        with pytest.warns(UserWarning):
            s = emulate_sampling(seq, 0.01, 1, min_overlap=0.9)
        assert s.warnings

    def test_broken_sequence(self):
        seq = build_sequence(Q2, 2)
        broken = ChainSequence(seq.chains, seq.distributions, np.array([0.5, 1e-9]), seq.gaps)
        with pytest.raises(OverlapTooSmall):
            emulate_sampling(broken, 0.01, 0)

    def test_eta_range(self):
        with pytest.raises(ValueError):
            emulate_sampling(build_sequence(Q2, 1), 1.0, 0)


class TestTriangle:
    def test_identity_pair(self):
        p = validate(Q2)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            s = emulate_sampling(build_sequence(p, 4), 0.0, 0)
        r = verify_triangle(p, p, s)
        assert r.lhs == 0.0 and r.rhs == 0.0 and r.passed

    def test_two_state_pair(self):
        q = [[0.7, 0.3], [0.5, 0.5]]
        s = emulate_sampling(build_sequence(q, 4), 0.01, 3)
        r = verify_triangle(Q2, q, s)
        assert r.lhs <= 0.0767 and r.passed
        assert r.context["lhs_source"] == "emulated_sample"

    def test_target_must_match(self):
        s = emulate_sampling(build_sequence(Q2, 2), 0.01, 0)
        with pytest.raises(ValueError):
            verify_triangle(Q2, uniform_chain(2), s)

    def test_random_runs(self, gen_chain, rng):
        for _ in range(30):
            p = validate(gen_chain(int(rng.integers(2, 10))))
            q, _ = random_row_perturbation(p, 0.05 * rng.uniform(), int(rng.integers(2**32)))
            s = emulate_sampling(build_sequence(q, 4), 0.1 * rng.uniform(), int(rng.integers(2**32)))
            assert verify_triangle(p, q, s).passed
