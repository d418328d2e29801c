import numpy as np
import pytest
from oracles import dense_szegedy

from qwperturb.errors import AllMarked, DimensionLimit, EmptyMarkedSet, SaturatedLeak
from qwperturb.markov_core import spectral_summary, uniform_chain, validate
from qwperturb.sweep import random_marked_set
from qwperturb.szegedy import (
    build_walk,
    classical_hitting_proxy,
    hitting_proxy,
    leak_norm,
    mark,
    simulate_absorption,
    spectral_correspondence,
)


class TestWalk:
    def test_swap_chain_phases(self):
        walk = build_walk([[0, 1], [1, 0]])
        phases = np.abs(walk.eigenphases())
        assert set(np.round(phases, 12)) == {0.0, round(np.pi, 12)}
        np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(walk.discriminant)), [-1, 1])

    def test_uniform_two_state_phases(self):
        walk = build_walk(uniform_chain(2))
        np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(walk.discriminant)), [0, 1], atol=1e-15)
        phases = walk.eigenphases()
        assert np.isclose(phases, np.pi / 2).any() and np.isclose(phases, -np.pi / 2).any()

    def test_symmetric_discriminant_equals_p(self, sym_chain):
        p = sym_chain(7)
        np.testing.assert_allclose(build_walk(p).discriminant, p, rtol=1e-15, atol=0)

    def test_matches_kronecker_oracle(self, sym_chain, gen_chain):
        for p in (sym_chain(5), gen_chain(4)):
            w_oracle, a, swap = dense_szegedy(p)
            walk = build_walk(p)
            np.testing.assert_allclose(walk.operator, w_oracle, atol=1e-14)
            np.testing.assert_allclose(walk.discriminant, a.T @ swap @ a, atol=1e-14)

    def test_square_is_two_reflection_form(self, sym_chain):
        walk = build_walk(sym_chain(5))
        w = walk.operator
        np.testing.assert_allclose(w @ w, walk.two_reflection_operator(), atol=1e-13)

    def test_step_matches_dense(self, gen_chain, rng):
        walk = build_walk(gen_chain(6))
        v = rng.standard_normal(36)
        np.testing.assert_allclose(walk.step(v), walk.operator @ v, atol=1e-14)

    @pytest.mark.parametrize("n", [2, 3, 8, 16])
    def test_orthogonal(self, sym_chain, gen_chain, n):
        for p in (sym_chain(n), gen_chain(n)):
            w = build_walk(p).operator
            assert np.abs(w.T @ w - np.eye(n * n)).max() <= 1e-10

    def test_spectral_correspondence(self, sym_chain):
        for n in (2, 5, 9, 12):
            corr = spectral_correspondence(build_walk(sym_chain(n)))
            assert corr["max_matched_error"] <= 1e-8
            assert corr["max_unmatched_error"] <= 1e-8

    def test_dimension_limit(self):
        with pytest.raises(DimensionLimit):
            build_walk(uniform_chain(65))
        assert build_walk(uniform_chain(65), max_dim=65 * 65).n == 65


class TestMark:
    def test_uniform_block(self):
        part = mark(uniform_chain(4), [3])
        np.testing.assert_allclose(part.p1, np.full((3, 3), 0.25))
        assert part.p4.shape == (1, 1)
        assert part.epsilon == 0.25

    def test_permutation(self):
        part = mark(uniform_chain(3), {0})
        assert part.permutation.tolist() == [1, 2, 0]

    def test_errors(self):
        with pytest.raises(AllMarked):
            mark(uniform_chain(3), [0, 1, 2])
        with pytest.raises(EmptyMarkedSet):
            mark(uniform_chain(3), [])
        with pytest.raises(ValueError):
            mark(uniform_chain(3), [5])

    def test_modified_chain_layout(self, sym_chain):
        p = sym_chain(6)
        part = mark(p, [1, 4])
        k = part.unmarked_count
        mod = part.modified.entries
        np.testing.assert_array_equal(mod[k:], np.hstack([np.zeros((2, k)), np.eye(2)]))
        np.testing.assert_array_equal(mod[:k], part.reordered[:k])
        column_form = np.block([[part.p1, np.zeros((k, 2))], [part.p3, np.eye(2)]])
        np.testing.assert_allclose(mod.T, column_form, atol=0)
        np.testing.assert_array_equal(part.reordered, p[np.ix_(part.permutation, part.permutation)])


class TestLeakAndProxies:
    @pytest.mark.parametrize("n", [4, 16])
    def test_uniform_family(self, n):
        part = mark(uniform_chain(n), [n - 1])
        assert leak_norm(part) == pytest.approx((n - 1) / n, abs=1e-15)
        assert hitting_proxy(part) == pytest.approx(np.sqrt(n), abs=1e-10)
        assert classical_hitting_proxy(part) == pytest.approx(n, abs=1e-10)

    def test_leak_below_one_and_proxy_relation(self, sym_chain, rng):
        for n in range(2, 15):
            part = mark(sym_chain(n), random_marked_set(rng, n))
            assert leak_norm(part) < 1
            assert hitting_proxy(part) ** 2 == pytest.approx(classical_hitting_proxy(part), rel=1e-15)

    def test_saturated(self):
        part = mark(validate([[1, 0, 0], [0, 0.5, 0.5], [0, 0.5, 0.5]]), [2])
        with pytest.raises(SaturatedLeak):
            hitting_proxy(part)
        with pytest.raises(SaturatedLeak):
            classical_hitting_proxy(part)

    def test_leak_bound_from_gap(self, sym_chain, rng):
        for _ in range(500):
            n = int(rng.integers(2, 33))
            p = validate(sym_chain(n))
            part = mark(p, random_marked_set(rng, n))
            delta = spectral_summary(p).gap
            assert leak_norm(part) <= 1 - delta * part.epsilon / 2 + 1e-10

    def test_enlarging_marked_set_never_increases_leak(self, sym_chain, rng):
        for _ in range(100):
            n = int(rng.integers(3, 20))
            p = sym_chain(n)
            small = random_marked_set(rng, n - 1)
            extra = [i for i in range(n) if i not in small]
            big = small + [extra[int(rng.integers(len(extra) - 1))]] if len(extra) > 1 else small
            assert leak_norm(mark(p, big)) <= leak_norm(mark(p, small)) + 1e-12


class TestAbsorption:
    def test_starts_at_zero(self, sym_chain):
        curve = simulate_absorption(mark(sym_chain(5), [2]), 10)
        assert curve[0] == 0
        assert curve.shape == (11,)
        assert (curve >= -1e-12).all() and (curve <= 1 + 1e-12).all()

    def test_two_state_reaches_half(self):
        curve = simulate_absorption(mark(uniform_chain(2), [1]), 2)
        assert curve[1:].max() >= 0.5

    def test_identical_chains_identical_curves(self, sym_chain):
        p = sym_chain(6)
        q = validate(p.copy())
        c1 = simulate_absorption(mark(p, [0, 3]), 20)
        c2 = simulate_absorption(mark(q, [0, 3]), 20)
        np.testing.assert_array_equal(c1, c2)

    def test_dense_iteration_agrees(self, sym_chain):
        part = mark(sym_chain(4), [1])
        walk = build_walk(part.modified)
        k = part.unmarked_count
        psi = np.zeros((4, 4))
        psi[:k, :k] = 1.0
        state = (psi / np.linalg.norm(psi)).reshape(-1)
        curve = simulate_absorption(part, 6)
        for t in range(1, 7):
            state = walk.operator @ state
            assert curve[t] == pytest.approx(1 - np.sum(state.reshape(4, 4)[:k, :k] ** 2), abs=1e-13)

    def test_start_skips_missing_edges(self):
        p = validate([[0.5, 0.5, 0.0], [0.5, 0.0, 0.5], [0.0, 0.5, 0.5]])
        curve = simulate_absorption(mark(p, [2]), 1)
        # P_11 = 0, so the start state spreads over (0,0), (0,1) and (1,0) only.
        assert curve[1] == pytest.approx(1 - np.sum(
            build_walk(mark(p, [2]).modified).step(np.array([1, 1, 0, 1, 0, 0, 0, 0, 0]) / np.sqrt(3))
            .reshape(3, 3)[:2, :2] ** 2), abs=1e-15)

    def test_negative_steps(self):
        with pytest.raises(ValueError):
            simulate_absorption(mark(uniform_chain(3), [0]), -1)
