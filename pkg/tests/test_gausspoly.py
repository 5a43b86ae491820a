import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pytest import approx
from scipy.integrate import quad as scipy_quad

from cvcat import (
    CapacityError,
    DomainError,
    GaussianMomentSpec,
    GaussPolyState,
    GaussTerm,
    UsageError,
    beam_splitter,
    condition_x,
    fidelity,
    gaussian_moment_integral,
    hermite_gauss,
    inner_product,
    multiply,
    norm_squared,
    project_p,
    relabel,
    superpose,
)
from cvcat import oracle, states


def gaussian_term(q, lin, c=0j, poly=None, m=1):
    return GaussTerm(poly or {(0,) * m: 1.0 + 0j},
                     np.array(q, dtype=complex).reshape(m, m),
                     np.array(lin, dtype=complex).reshape(m), c)


# ---------------------------------------------------------------------------
# Gaussian moments
# ---------------------------------------------------------------------------

class TestMoments:
    def test_plain_gaussian(self):
        assert gaussian_moment_integral(GaussianMomentSpec(1, 0, 0)) == approx(math.sqrt(math.pi))

    def test_odd_symmetry(self):
        assert gaussian_moment_integral(GaussianMomentSpec(1, 0, 1)) == 0

    def test_second_moment_vs_adaptive_quadrature(self):
        # oracle: adaptive quadrature on [-12, 12]
        expected = scipy_quad(lambda x: x * x * math.exp(-x * x + x), -12, 12)[0]
        value = gaussian_moment_integral(GaussianMomentSpec(1.0, 0.5, 2))
        assert value.imag == 0
        assert value.real == approx(expected, rel=1e-10)

    def test_complex_case_vs_quadrature(self):
        a, b, k = 1.3 - 0.4j, 0.2 + 0.7j, 5
        re = scipy_quad(lambda x: (x ** k * np.exp(-a * x * x + 2 * b * x)).real, -12, 12)[0]
        im = scipy_quad(lambda x: (x ** k * np.exp(-a * x * x + 2 * b * x)).imag, -12, 12)[0]
        value = gaussian_moment_integral(GaussianMomentSpec(a, b, k))
        assert value == approx(re + 1j * im, rel=1e-10)

    def test_rejects_non_integrable(self):
        with pytest.raises(DomainError):
            GaussianMomentSpec(-1.0, 0.0, 2)
        with pytest.raises(UsageError):
            GaussianMomentSpec(1.0, 0.0, -1)

    @given(
        a_re=st.floats(0.2, 3.0), a_im=st.floats(-1.0, 1.0),
        b_re=st.floats(-1.5, 1.5), b_im=st.floats(-1.5, 1.5),
        k=st.integers(2, 16),
    )
    def test_two_term_recurrence(self, a_re, a_im, b_re, b_im, k):
        a, b = complex(a_re, a_im), complex(b_re, b_im)
        i = [gaussian_moment_integral(GaussianMomentSpec(a, b, n)) for n in (k - 2, k - 1, k)]
        rec = (2 * b * i[1] + (k - 1) * i[0]) / (2 * a)
        assert i[2] == approx(rec, rel=1e-12, abs=1e-300)


# ---------------------------------------------------------------------------
# products
# ---------------------------------------------------------------------------

class TestMultiply:
    def test_vacuum_tensor_vacuum(self):
        two = multiply(hermite_gauss(0, "1"), hermite_gauss(0, "2"))
        assert two.modes == ("1", "2")
        (term,) = two.terms
        assert term.quad == approx(np.eye(2))
        assert norm_squared(two) == approx(1.0)

    def test_ladder_tensor_ladder_poly(self):
        u = multiply(states.make_approx(1, "1"), states.make_approx(1, "2"))
        (term,) = u.terms
        assert set(term.poly) == {(1, 1)}

    def test_same_mode_square_matches_quartic_quadrature(self):
        u = states.make_approx(2)
        sq = multiply(u, u)
        grid = oracle.GridSpec()
        quartic = oracle.quad_inner(oracle.sample(sq, grid), oracle.sample(sq, grid), grid)
        assert norm_squared(sq) == approx(quartic.value.real, rel=1e-8)

    def test_degree_cap(self):
        u = states.make_approx(32)
        with pytest.raises(CapacityError):
            multiply(multiply(u, u), u)

    def test_overlapping_mode_sets_rejected(self):
        u = multiply(hermite_gauss(0, "1"), hermite_gauss(0, "2"))
        v = multiply(hermite_gauss(0, "2"), hermite_gauss(0, "3"))
        with pytest.raises(UsageError):
            multiply(u, v)


# ---------------------------------------------------------------------------
# inner products
# ---------------------------------------------------------------------------

class TestInnerProduct:
    def test_hermite_orthonormality(self):
        for i in range(4):
            for j in range(4):
                val = inner_product(hermite_gauss(i), hermite_gauss(j))
                assert val == approx(1.0 if i == j else 0.0, abs=1e-13)

    def test_ladder_states_normalised(self):
        for n in range(4):
            assert norm_squared(states.make_approx(n)) == approx(1.0, abs=1e-12)

    def test_coherent_overlap(self):
        val = inner_product(states.make_squeezed_coherent(1.0),
                            states.make_squeezed_coherent(-1.0))
        assert abs(val) ** 2 == approx(math.exp(-4.0), rel=1e-12)

    def test_mode_mismatch(self):
        with pytest.raises(UsageError):
            inner_product(hermite_gauss(0, "a"), hermite_gauss(0, "b"))

    def test_mode_order_irrelevant(self):
        u = multiply(states.make_approx(1, "1"), states.make_squeezed_coherent(0.7, 0.1, "2"))
        v_swapped = multiply(states.make_squeezed_coherent(0.3, 0.0, "2"), states.make_approx(2, "1"))
        v_direct = multiply(states.make_approx(2, "1"), states.make_squeezed_coherent(0.3, 0.0, "2"))
        assert v_swapped.modes == ("2", "1")
        assert inner_product(u, v_swapped) == approx(inner_product(u, v_direct), rel=1e-12)

    @given(seed=st.integers(0, 10_000))
    def test_conjugate_symmetry(self, seed):
        rng = np.random.default_rng(seed)
        u = oracle.random_gauss_poly(rng, 1, max_degree=4)
        v = oracle.random_gauss_poly(rng, 1, max_degree=4, modes=u.modes)
        scale = math.sqrt(norm_squared(u) * norm_squared(v))
        assert inner_product(u, v) == approx(inner_product(v, u).conjugate(),
                                             rel=1e-10, abs=1e-12 * scale)


# ---------------------------------------------------------------------------
# beam splitter
# ---------------------------------------------------------------------------

class TestBeamSplitter:
    def test_vacuum_invariance(self):
        two = multiply(hermite_gauss(0, "1"), hermite_gauss(0, "2"))
        assert fidelity(beam_splitter(two, "1", "2"), two) == approx(1.0, abs=1e-12)

    def test_coherent_pair_combines(self):
        alpha = 0.9
        pair = multiply(states.make_squeezed_coherent(alpha, 0.0, "1"),
                        states.make_squeezed_coherent(alpha, 0.0, "2"))
        mixed = beam_splitter(pair, "1", "2")
        target = multiply(states.make_squeezed_coherent(math.sqrt(2) * alpha, 0.0, "1"),
                          hermite_gauss(0, "2"))
        assert inner_product(target, mixed) == approx(1.0, abs=1e-12)

    @given(seed=st.integers(0, 10_000))
    @settings(max_examples=15)
    def test_unitarity(self, seed):
        rng = np.random.default_rng(seed)
        u = oracle.random_gauss_poly(rng, 2, max_degree=4)
        v = oracle.random_gauss_poly(rng, 2, max_degree=4, modes=u.modes)
        before = inner_product(u, v)
        after = inner_product(beam_splitter(u, *u.modes), beam_splitter(v, *u.modes))
        scale = math.sqrt(norm_squared(u) * norm_squared(v))
        assert after == approx(before, rel=1e-10, abs=1e-12 * scale)
        assert norm_squared(beam_splitter(u, *u.modes)) == approx(norm_squared(u), rel=1e-10)

    def test_needs_distinct_modes(self):
        two = multiply(hermite_gauss(0, "1"), hermite_gauss(0, "2"))
        with pytest.raises(UsageError):
            beam_splitter(two, "1", "1")


# ---------------------------------------------------------------------------
# conditioning and projection
# ---------------------------------------------------------------------------

class TestConditionX:
    def test_squeezed_vacuum_amplitude(self):
        g = 0.4466
        val = condition_x(states.make_squeezed_vacuum(g), "x", 0.0)
        assert val == approx((math.pi * g) ** -0.25, rel=1e-14)

    def test_two_mode_vacuum(self):
        two = multiply(hermite_gauss(0, "1"), hermite_gauss(0, "2"))
        rest = condition_x(two, "2", 0.0)
        assert rest.modes == ("1",)
        assert inner_product(hermite_gauss(0, "1"), rest) == approx(math.pi ** -0.25, rel=1e-13)

    def test_odd_state_conditions_to_zero(self):
        odd = states.make_ideal_squeezed_cat(1.0, 0.2, "odd")
        assert condition_x(odd, "x", 0.0) == approx(0.0, abs=1e-15)

    def test_mixed_cat_pair_matches_two_branch_form(self, benchmark_params):
        # post-selecting one splitter arm leaves
        # (amplitude of the vacuum branch) * grown cat + (cat branch) * vacuum
        alpha, r, g = 1.1, benchmark_params["r"], benchmark_params["g"]
        cat = states.make_ideal_squeezed_cat(alpha, r, "even", "1")
        pair = multiply(cat, relabel(cat, {"1": "2"}))
        conditioned = condition_x(beam_splitter(pair, "1", "2"), "2", 0.0)
        plus = states.make_squeezed_coherent(math.sqrt(2) * alpha, r, "1")
        minus = states.make_squeezed_coherent(-math.sqrt(2) * alpha, r, "1")
        vac = states.make_squeezed_vacuum(g, "1")
        p_vac = (math.pi * g) ** -0.25
        p_cat = 2.0 * math.exp(-2.0 * alpha ** 2) * p_vac
        target = superpose([plus, minus, vac], [p_vac, p_vac, p_cat])
        assert fidelity(conditioned, target) == approx(1.0, abs=1e-10)


class TestProjectP:
    def test_squeezed_vacuum_at_zero(self):
        g = 0.4466
        val = project_p(states.make_squeezed_vacuum(g), "x", 0.0)
        assert val == approx((g / math.pi) ** 0.25, rel=1e-13)

    def test_even_superposition_null_point(self, benchmark_params):
        alpha, r, g = 0.9, benchmark_params["r"], benchmark_params["g"]
        beta = math.pi / (4.0 * alpha * math.sqrt(g))
        cat = states.make_ideal_squeezed_cat(math.sqrt(2) * alpha, r, "even")
        assert abs(project_p(cat, "x", beta)) < 1e-10

    def test_ladder_projection_vs_quadrature(self):
        u = states.make_approx(2)
        val = project_p(u, "x", 0.7)
        grid = oracle.GridSpec()
        xs = grid.axis()
        w = np.full(xs.size, grid.step)
        w[0] = w[-1] = grid.step / 2.0
        direct = np.sum(np.exp(0.7j * xs) * u.evaluate(xs) * w) / math.sqrt(2 * math.pi)
        assert val == approx(direct, rel=1e-8)

    def test_missing_mode(self):
        with pytest.raises(UsageError):
            project_p(hermite_gauss(0, "x"), "y", 0.0)


# ---------------------------------------------------------------------------
# oracle equivalence on random states
# ---------------------------------------------------------------------------

class TestOracleEquivalence:
    @given(seed=st.integers(0, 10_000))
    @settings(max_examples=20)
    def test_inner_product_single_mode(self, seed):
        rng = np.random.default_rng(seed)
        u = oracle.random_gauss_poly(rng, 1)
        v = oracle.random_gauss_poly(rng, 1, modes=u.modes)
        grid = oracle.GridSpec(-18, 18, 4096)
        q = oracle.quad_inner(oracle.sample(u, grid), oracle.sample(v, grid), grid)
        scale = math.sqrt(norm_squared(u) * norm_squared(v))
        assert abs(inner_product(u, v) - q.value) <= 1e-8 * scale

    @given(seed=st.integers(0, 10_000))
    @settings(max_examples=10)
    def test_projection_two_modes(self, seed):
        rng = np.random.default_rng(seed)
        u = oracle.random_gauss_poly(rng, 2)
        beta = float(rng.uniform(-1.5, 1.5))
        proj = project_p(u, u.modes[0], beta)
        grid = oracle.GridSpec(-18, 18, 1024)
        xs = grid.axis()
        w = np.full(xs.size, grid.step)
        w[0] = w[-1] = grid.step / 2.0
        kernel = np.exp(1j * beta * xs) / math.sqrt(2 * math.pi)
        direct = (kernel * w) @ u.evaluate(xs[:, None], xs[None, :])
        engine = proj.evaluate(xs)
        peak = float(np.max(np.abs(direct)))
        assert float(np.max(np.abs(engine - direct))) <= 1e-8 * peak


# ---------------------------------------------------------------------------
# state plumbing
# ---------------------------------------------------------------------------

class TestStateBasics:
    def test_normalized_rejects_zero_state(self):
        zero = GaussPolyState(("x",), ())
        with pytest.raises(DomainError):
            zero.normalized()

    def test_renormalisation(self):
        u = superpose([states.make_squeezed_coherent(0.5), hermite_gauss(2)], [0.4, 1.7])
        assert norm_squared(u.normalized()) == approx(1.0, abs=1e-12)

    def test_compaction_merges_shared_gaussians(self):
        u = hermite_gauss(3)
        doubled = superpose([u, u], [0.5, 0.5])
        assert len(doubled.terms) == 1
        assert fidelity(doubled, u) == approx(1.0, abs=1e-12)

    def test_relabel(self):
        u = relabel(hermite_gauss(1, "x"), {"x": "s"})
        assert u.modes == ("s",)

    def test_constructor_rejects_four_modes(self):
        with pytest.raises(UsageError):
            GaussPolyState(("a", "b", "c", "d"), ())

    def test_evaluate_matches_manual_gaussian(self):
        u = states.make_squeezed_coherent(0.8, 0.1)
        xs = np.linspace(-3, 3, 11)
        g = math.exp(-0.2)
        mu = 0.8 * math.sqrt(2 * g)
        expected = (math.pi * g) ** -0.25 * np.exp(-((xs - mu) ** 2) / (2 * g))
        assert u.evaluate(xs) == approx(expected, rel=1e-12)
