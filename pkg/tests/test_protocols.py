import math

import numpy as np
import pytest
from pytest import approx

from cvcat import protocols, states
from cvcat.errors import CapacityError, DomainError, UsageError
from cvcat.gausspoly import fidelity, norm_squared


ALPHA = math.sqrt(1.3)
R = 0.4029
G = math.exp(-2 * R)


def signal(a, b, alpha=ALPHA, r=R):
    return states.SignalParams(a, b, alpha, r)


class TestTeleportIdeal:
    def test_equal_amplitudes_perfect(self):
        out = protocols.teleport(signal(1, 1, alpha=math.sqrt(2.6)), protocols.IdealResource("even"))
        assert out.accepted
        assert out.fidelity_vs_signal == approx(1.0, abs=1e-9)

    def test_opposite_amplitudes_perfect(self):
        out = protocols.teleport(signal(1, -1), protocols.IdealResource("even"))
        assert out.fidelity_vs_signal == approx(1.0, abs=1e-9)

    def test_output_is_normalised_mode_two(self):
        out = protocols.teleport(signal(0.8, 0.3j), protocols.IdealResource("even"))
        assert out.output.modes == ("2",)
        assert norm_squared(out.output) == approx(1.0, abs=1e-10)
        assert out.herald_weight > 0

    def test_generic_signal_above_lower_bound(self):
        ratio = protocols.signal_content_ratio(ALPHA, "even")
        bound = protocols.fidelity_lower_bound(ratio)
        for a, b in [(1, 0), (1, 1j), (0.3, -0.9)]:
            out = protocols.teleport(signal(a, b), protocols.IdealResource("even"))
            assert bound - 1e-12 <= out.fidelity_vs_signal <= 1 + 1e-10

    def test_odd_resource_runs_with_matched_projection(self):
        res = protocols.IdealResource("odd")
        beta = protocols.default_beta(signal(1, 1), res)
        assert beta == approx(math.pi / (4 * ALPHA * math.sqrt(G)))
        out = protocols.teleport(signal(1, 1), res)
        assert out.accepted
        assert 0.0 <= out.fidelity_vs_signal <= 1 + 1e-10


class TestTeleportApprox:
    def test_equal_amplitudes_benchmark(self):
        out = protocols.teleport(signal(1, 1), protocols.ApproxResource(2))
        assert out.fidelity_vs_signal == approx(0.9996, abs=0.0003)

    def test_opposite_amplitudes_benchmark(self):
        out = protocols.teleport(signal(1, -1), protocols.ApproxResource(2))
        assert out.fidelity_vs_signal == approx(0.9974, abs=0.0005)

    def test_identity_resource(self):
        out = protocols.teleport(signal(0.6, 0.4), protocols.IdentityResource())
        assert out.fidelity_vs_signal == approx(1.0)

    def test_channel_matches_direct_teleport(self):
        chan = protocols.teleport_channel(ALPHA, R, protocols.ApproxResource(2))
        for a, b in [(1, 1), (1, -1), (0.7, 0.3j), (0.2, 1)]:
            direct = protocols.teleport(signal(a, b), protocols.ApproxResource(2))
            assert chan.fidelity(a, b) == approx(direct.fidelity_vs_signal, abs=1e-12)


class TestClosedForm:
    def test_vacuum_resource_single_term(self):
        state = protocols.output_closed_form(signal(1, 0), 0, 0.0)
        assert len(state.terms) == 1

    def test_agreement_with_pipeline(self):
        beta_star = math.pi / (4 * ALPHA * math.sqrt(G))
        for beta in (0.0, beta_star):
            for theta in np.linspace(0.2, 1.4, 5):
                for phi in np.linspace(0.0, 5.5, 5):
                    p = signal(math.cos(theta), math.sin(theta) * np.exp(1j * phi))
                    eng = protocols.teleport(p, protocols.ApproxResource(2), beta=beta).output
                    ref = protocols.output_closed_form(p, 2, beta)
                    assert fidelity(eng, ref) >= 1 - 1e-8

    def test_alt_beta_terms_disagree_off_axis(self):
        p = signal(0.7, 0.3j)
        eng = protocols.teleport(p, protocols.ApproxResource(2), beta=0.3).output
        alt = protocols.output_closed_form(p, 2, 0.3, alt_beta_terms=True)
        assert fidelity(eng, alt) < 1 - 1e-4

    def test_random_amplitudes_at_nonzero_beta(self):
        rng = np.random.default_rng(11)
        for _ in range(4):
            a = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            b = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            if abs(a) + abs(b) < 0.2:
                continue
            p = signal(a, b)
            eng = protocols.teleport(p, protocols.ApproxResource(2), beta=0.3).output
            assert fidelity(eng, protocols.output_closed_form(p, 2, 0.3)) >= 1 - 1e-8


class TestContentRatio:
    def test_even_formula(self):
        assert protocols.signal_content_ratio(math.sqrt(2.6), "even") \
            == approx(math.exp(5.2), rel=1e-14)

    def test_small_amplitude_limit(self):
        assert protocols.signal_content_ratio(1e-8, "even") == approx(1.0, abs=1e-16 + 1e-7)

    def test_odd_below_even(self):
        for alpha in (0.5, 1.0, 2.0):
            even = protocols.signal_content_ratio(alpha, "even")
            odd = protocols.signal_content_ratio(alpha, "odd")
            assert odd < even
            assert odd / even == approx(math.sqrt(math.tanh(2 * alpha ** 2)), rel=1e-12)

    def test_parity_gap_closes_with_amplitude(self):
        gaps = [1 - protocols.signal_content_ratio(a, "odd") / protocols.signal_content_ratio(a, "even")
                for a in (0.5, 1.0, 1.5, 2.0)]
        assert all(g2 < g1 for g1, g2 in zip(gaps, gaps[1:]))
        assert gaps[-1] < 1e-3

    def test_engine_agreement(self):
        for alpha in (0.5, 1.0, math.sqrt(2.6)):
            engine = protocols.engine_content_ratio(alpha, R)
            assert engine == approx(math.exp(2 * alpha ** 2), rel=1e-8)

    def test_squeezing_invariance(self):
        base = protocols.engine_content_ratio(1.0, 0.0)
        for r in (0.2, R, 0.8):
            assert protocols.engine_content_ratio(1.0, r) == approx(base, rel=1e-10)

    def test_heralding_amplitude_relations(self):
        amp = protocols.signal_content_amplitudes(ALPHA, R)
        assert amp["x_vac"] == approx((math.pi * G) ** -0.25, rel=1e-12)
        assert amp["p_vac"] == approx((G / math.pi) ** 0.25, rel=1e-12)
        # the vacuum branch dominates the quadrature amplitude pair
        assert amp["x_vac"] == approx(0.5 * math.exp(2 * ALPHA ** 2) * amp["x_even"], rel=1e-12)
        assert amp["p_vac"] == approx(0.5 * amp["p_even"], rel=1e-12)
        assert abs(amp["p_beta_even"]) < 1e-12
        beta = math.pi / (4 * ALPHA * math.sqrt(G))
        expected_odd = 2j * math.sin(2 * ALPHA * beta * math.sqrt(G)) * amp["p_beta_vac"]
        assert amp["p_beta_odd"] == approx(expected_odd, rel=1e-12)


class TestLowerBound:
    def test_midpoint(self):
        assert protocols.fidelity_lower_bound(1.0) == approx(0.5)

    def test_benchmark_value(self):
        val = protocols.fidelity_lower_bound(math.exp(2 * 2.6))
        assert val == approx(0.99997, abs=1e-5)

    def test_monotone(self):
        rs = np.linspace(0.1, 10.0, 40)
        vals = [protocols.fidelity_lower_bound(r) for r in rs]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_rejects_nonpositive(self):
        with pytest.raises(UsageError):
            protocols.fidelity_lower_bound(0.0)


class TestFidelityMap:
    def test_ideal_max_at_equal_amplitudes(self):
        grid = protocols.SweepGrid(9, 9)
        rows = protocols.fidelity_map(protocols.IdealResource("even"), ALPHA, R, grid)
        best = max(rows, key=lambda row: row[2])
        assert best[0] == approx(math.pi / 4)
        assert best[2] == approx(1.0, abs=1e-9)

    def test_phi_periodicity(self):
        grid = protocols.SweepGrid(5, 9)
        rows = protocols.fidelity_map(protocols.ApproxResource(2), ALPHA, R, grid)
        by_theta: dict = {}
        for theta, phi, f in rows:
            by_theta.setdefault(theta, []).append(f)
        for vals in by_theta.values():
            assert vals[0] == approx(vals[-1], rel=1e-12)

    def test_all_values_are_valid_fidelities(self):
        grid = protocols.SweepGrid(7, 7)
        for res in (protocols.IdealResource("even"), protocols.ApproxResource(2)):
            for _, _, f in protocols.fidelity_map(res, ALPHA, R, grid):
                assert 0.0 <= f <= 1.0 + 1e-10

    def test_benchmark_extremes(self):
        grid = protocols.SweepGrid(5, 5)  # contains (pi/4, 0) and (pi/4, pi)
        rows = protocols.fidelity_map(protocols.ApproxResource(2), ALPHA, R, grid)
        lookup = {(round(t, 10), round(p, 10)): f for t, p, f in rows}
        q = math.pi / 4
        assert lookup[(round(q, 10), 0.0)] == approx(0.9996, abs=0.0003)
        assert lookup[(round(q, 10), round(math.pi, 10))] == approx(0.9974, abs=0.0005)

    def test_grid_validation(self):
        with pytest.raises(UsageError):
            protocols.SweepGrid(1, 5)


class TestAverageFidelity:
    def test_identity_channel(self):
        res = protocols.average_fidelity(protocols.IdentityResource(), ALPHA, R)
        assert res.value == approx(1.0, abs=1e-9)
        assert res.converged

    def test_ideal_benchmark(self):
        res = protocols.average_fidelity(protocols.IdealResource("even"), ALPHA, R)
        assert res.value == approx(0.9963, abs=0.002)
        assert res.parametrization == "half-angle"

    def test_approx_benchmark_both_parametrizations(self):
        both = protocols.average_fidelity_both(protocols.ApproxResource(2), ALPHA, R)
        assert set(both) == {"half-angle", "figure-angle"}
        assert both["half-angle"].value == approx(0.9963, abs=0.002)
        # ideal and approximate resources give nearly the same average
        ideal = protocols.average_fidelity(protocols.IdealResource("even"), ALPHA, R)
        assert abs(ideal.value - both["half-angle"].value) < 2e-4

    def test_non_convergence_raises(self):
        quad = protocols.BlochQuadrature(8, 16, tol=0.0, max_doublings=1)
        with pytest.raises(DomainError):
            protocols.average_fidelity(protocols.IdealResource("even"), ALPHA, R, quad)


class TestAmplify:
    def test_ladder_doubling_exact(self):
        for n in (1, 2, 4):
            out = protocols.amplify(protocols.ApproxResource(n))
            assert fidelity(out.output, states.make_approx(2 * n, "1")) \
                == approx(1.0, abs=1e-10)

    def test_ladder_fitted_target_reported(self):
        out = protocols.amplify(protocols.ApproxResource(1))
        fit = states.fit_effective_params(2)
        assert out.fidelity_vs_target == approx(fit.fidelity, abs=1e-9)

    def test_vacuum_input_trivial(self):
        out = protocols.amplify(protocols.IdealCat(0.0, R))
        assert out.fidelity_vs_target == approx(1.0, abs=1e-12)
        assert protocols.amplification_spurious(0.0, R)

    def test_large_amplitude_faithful(self):
        for alpha in (1.5, 2.0, 2.5):
            out = protocols.amplify(protocols.IdealCat(alpha, R))
            assert out.fidelity_vs_target > 0.99
            assert not protocols.amplification_spurious(alpha, R)

    def test_squeezing_independent(self):
        vals = [protocols.amplify(protocols.IdealCat(0.9, r)).fidelity_vs_target
                for r in (0.0, 0.3, 0.8)]
        assert vals[0] == approx(vals[1], rel=1e-12)
        assert vals[0] == approx(vals[2], rel=1e-12)

    def test_iterate_small_amplitude_decays(self):
        seq = protocols.amplify_iterate(protocols.IdealCat(0.3, R), 3)
        fids = [o.fidelity_vs_target for o in seq]
        assert fids[1] < fids[0]
        assert fids[2] < fids[1]

    def test_iterate_large_beats_small(self):
        small = protocols.amplify_iterate(protocols.IdealCat(0.3, R), 2)
        large = protocols.amplify_iterate(protocols.IdealCat(1.5, R), 2)
        for s, b in zip(small, large):
            assert b.fidelity_vs_target >= s.fidelity_vs_target

    def test_iterate_ladder_doubles_exactly(self):
        seq = protocols.amplify_iterate(protocols.ApproxResource(1), 3)
        for k, out in enumerate(seq, start=1):
            ladder = states.make_approx(2 ** k, "1")
            assert fidelity(out.output, ladder) == approx(1.0, abs=1e-10)

    def test_capacity_error_carries_step(self):
        with pytest.raises(CapacityError) as err:
            protocols.amplify_iterate(protocols.ApproxResource(8), 3)
        assert "step 3" in str(err.value)

    def test_amplify_capacity(self):
        with pytest.raises(CapacityError):
            protocols.amplify(protocols.ApproxResource(32))

    def test_steps_validation(self):
        with pytest.raises(UsageError):
            protocols.amplify_iterate(protocols.IdealCat(1.0, R), 0)


class TestSweepCurve:
    def test_single_step_curve_shape(self):
        alphas = np.linspace(0.0, 2.5, 26)
        fids = [protocols.amplify(protocols.IdealCat(float(a), R)).fidelity_vs_target
                for a in alphas]
        diffs = np.abs(np.diff(fids))
        assert float(np.max(diffs)) < 0.05  # continuous on this grid
        assert fids[0] == approx(1.0, abs=1e-12)  # spurious near-unity point
        assert protocols.amplification_spurious(float(alphas[0]), R)
        for a, f in zip(alphas, fids):
            if a >= 1.5:
                assert f > 0.99
        assert min(fids) < 0.97  # genuine dip at intermediate amplitude
