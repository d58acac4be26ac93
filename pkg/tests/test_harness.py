import math

import numpy as np
import pytest

from qgames.cloning import (
    optimal_cloner,
    product_embedding_channel,
    symmetric_noise_channel,
    value_formulas,
)
from qgames.core import PureState, RandomStream, ShapeError, haar_random_state
from qgames.estimation import Povm, build_povm, default_directions, respond, universal_povm
from qgames.harness import (
    GameSpec,
    asym_bound_scan,
    asymmetry_grid_channels,
    cloner_perturbations,
    default_state_sets,
    discretize_cloning_game,
    discretize_estimation_game,
    fibonacci_states,
    icosahedral_states,
    monte_carlo_play,
    nested_state_sets,
    perturb_best_response_check,
    povm_perturbations,
    sandwich_report,
)
from qgames.swap_test import expected_payoff
from qgames.zerosum import solve


class TestGameSpec:
    def test_estimation_requires_qubits(self):
        with pytest.raises(ValueError):
            GameSpec("estimation", d=3, n=1)

    def test_cloning_arity(self):
        with pytest.raises(ValueError):
            GameSpec("cloning", d=2, n=3, m=2)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            GameSpec("guessing", d=2, n=1, m=1)

    def test_theoretical_values(self):
        assert GameSpec("estimation", n=1).theoretical_value() == pytest.approx(2 / 3)
        assert GameSpec("cloning", d=2, n=1, m=2).theoretical_value() == pytest.approx(2 / 3)
        assert GameSpec("one_particle", d=2, n=1, m=2).theoretical_value() == pytest.approx(5 / 6)


class TestStateSets:
    def test_icosahedron_has_twelve_distinct_states(self):
        states = icosahedral_states()
        assert len(states) == 12
        overlaps = [
            states[i].overlap_probability(states[j])
            for i in range(12)
            for j in range(i + 1, 12)
        ]
        assert max(overlaps) < 1.0 - 1e-6

    def test_icosahedron_is_a_two_design(self):
        # average of |<a|b>|^4 over a projective 2-design equals 1/3
        states = icosahedral_states()
        probe = PureState(np.array([0.8, 0.6j]))
        mean = np.mean([probe.overlap_probability(s) ** 2 for s in states])
        assert mean == pytest.approx(1.0 / 3.0, abs=1e-12)

    def test_nested_sets_are_prefixes(self):
        sets = nested_state_sets(fibonacci_states(16), (4, 8, 16))
        assert [len(s) for s in sets] == [4, 8, 16]
        assert sets[0] == sets[1][:4]

    def test_haar_sets_need_stream(self):
        with pytest.raises(ValueError):
            default_state_sets(3, (4, 8))


class TestDiscretizedGames:
    def test_entries_match_referee_payoff(self, rng):
        # cross-module consistency: matrix entries equal expected_payoff of
        # the corresponding strategy pair
        povm = build_povm(1, default_directions(1))
        states = [haar_random_state(2, rng.substream(i)) for i in range(6)]
        game = discretize_estimation_game(1, [povm], states)
        for j, psi in enumerate(states):
            direct = expected_payoff(psi.density(), respond(povm, psi))
            assert abs(game.payoff[0, j] - direct) <= 1e-12

    def test_universal_row_is_constant_two_thirds(self):
        game = discretize_estimation_game(1, [universal_povm(1)], icosahedral_states())
        assert np.max(np.abs(game.payoff - 2.0 / 3.0)) <= 1e-10

    def test_flipped_guesses_score_below_value_on_own_axes(self):
        povm = build_povm(1, default_directions(1))
        flipped = Povm(1, povm.effects, tuple(reversed(povm.guesses)))
        states = [PureState.basis(2, 0), PureState.basis(2, 1)]
        game = discretize_estimation_game(1, [flipped], states)
        assert np.all(game.payoff < 2.0 / 3.0)

    def test_single_entry_game_solves_to_itself(self):
        game = discretize_estimation_game(
            1, [universal_povm(1)], [PureState.basis(2, 0)]
        )
        eq = solve(game)
        assert eq.value == pytest.approx(game.payoff[0, 0])

    def test_cloning_rows(self, rng):
        states = [haar_random_state(2, rng.substream(50 + i)) for i in range(8)]
        game = discretize_cloning_game(
            2, 1, 2,
            [optimal_cloner(2, 1, 2), product_embedding_channel(2, 1, 2)],
            states,
        )
        assert np.max(np.abs(game.payoff[0] - 2.0 / 3.0)) <= 1e-10
        assert np.max(np.abs(game.payoff[1] - 0.5)) <= 1e-10

    def test_empty_inputs_rejected(self):
        with pytest.raises(ShapeError):
            discretize_estimation_game(1, [], [PureState.basis(2, 0)])


class TestSandwich:
    def test_estimation_refinement(self):
        spec = GameSpec("estimation", n=1, seed=1)
        player_i = [universal_povm(1), build_povm(1, default_directions(1))]
        sets = default_state_sets(2, (4, 8, 16))
        report = sandwich_report(spec, player_i, sets, tol=1e-9)
        assert report.lower_bound_ok and report.monotone_ok and report.converged
        assert report.levels[-1].value == pytest.approx(2.0 / 3.0, abs=1e-9)

    def test_estimation_single_optimal_povm_against_icosahedron(self):
        spec = GameSpec("estimation", n=1, seed=1)
        report = sandwich_report(
            spec, [universal_povm(1)], [icosahedral_states()], tol=1e-9
        )
        assert report.levels[0].value >= 2.0 / 3.0 - 1e-9
        assert abs(report.levels[0].value - 2.0 / 3.0) <= 1e-9

    def test_cloning_refinement(self, rng):
        spec = GameSpec("cloning", d=2, n=1, m=2, seed=1)
        player_i = [optimal_cloner(2, 1, 2), product_embedding_channel(2, 1, 2)]
        states = [haar_random_state(2, rng.substream(100 + i)) for i in range(20)]
        report = sandwich_report(spec, player_i, nested_state_sets(states, (5, 10, 20)))
        assert report.passed
        assert report.levels[-1].value == pytest.approx(2.0 / 3.0, abs=1e-9)

    def test_values_non_increasing_under_refinement(self):
        # a non-universal row makes the coarse values genuinely larger
        spec = GameSpec("estimation", n=1, seed=1)
        player_i = [build_povm(1, default_directions(1))]
        polar = fibonacci_states(16)  # first entries cluster near the pole
        report = sandwich_report(spec, player_i, nested_state_sets(polar, (2, 4, 16)), tol=1e-9)
        values = [lv.value for lv in report.levels]
        assert values[0] > values[-1]
        assert report.monotone_ok


class TestPerturbations:
    def test_base_against_itself_is_equality(self):
        ch = optimal_cloner(2, 1, 2)
        report = perturb_best_response_check(ch, [ch], tol=1e-9)
        assert report.passed
        assert report.max_value == pytest.approx(report.base_value)

    def test_cloner_perturbations_never_win(self, rng):
        ch = optimal_cloner(2, 1, 2)
        perts = cloner_perturbations(ch, 60, rng.substream(1))
        report = perturb_best_response_check(ch, perts, tol=1e-9)
        assert report.passed
        assert report.n_perturbations == 60

    def test_povm_perturbations_never_win(self, rng):
        povm = universal_povm(1)
        perts = povm_perturbations(povm, 60, rng.substream(2))
        report = perturb_best_response_check(povm, perts, tol=1e-9)
        assert report.passed

    def test_full_noise_output_scores_inverse_bose_dimension(self):
        ch = optimal_cloner(2, 1, 2)
        noise = symmetric_noise_channel(2, 1, 2)
        report = perturb_best_response_check(ch, [noise], tol=1e-9)
        assert report.passed
        assert report.max_value == pytest.approx(1.0 / 3.0, abs=1e-12)

    def test_empty_perturbations_rejected(self):
        with pytest.raises(ValueError):
            perturb_best_response_check(optimal_cloner(2, 1, 2), [])


class TestMonteCarlo:
    def test_estimation_play_matches_value(self):
        spec = GameSpec("estimation", n=1, samples=30_000, seed=42)
        povm = build_povm(1, default_directions(1))
        record = monte_carlo_play(spec, povm)
        assert abs(record.mean_payoff - 2.0 / 3.0) <= 3.0 * record.stderr_payoff
        assert record.pass_rate == pytest.approx((1.0 + record.mean_payoff) / 2.0)

    def test_cloning_play_matches_value(self):
        spec = GameSpec("cloning", d=2, n=1, m=2, samples=30_000, seed=43)
        record = monte_carlo_play(spec, optimal_cloner(2, 1, 2))
        assert abs(record.mean_payoff - 2.0 / 3.0) <= 3.0 * record.stderr_payoff

    def test_one_particle_play_matches_value(self):
        spec = GameSpec("one_particle", d=2, n=1, m=2, samples=30_000, seed=44)
        record = monte_carlo_play(spec, optimal_cloner(2, 1, 2))
        assert abs(record.mean_payoff - 5.0 / 6.0) <= 3.0 * record.stderr_payoff

    def test_identical_seed_identical_record(self):
        spec = GameSpec("cloning", d=2, n=1, m=2, samples=2_000, seed=7)
        a = monte_carlo_play(spec, optimal_cloner(2, 1, 2))
        b = monte_carlo_play(spec, optimal_cloner(2, 1, 2))
        assert a == b

    def test_seed_override(self):
        spec = GameSpec("cloning", d=2, n=1, m=2, samples=500, seed=7)
        a = monte_carlo_play(spec, optimal_cloner(2, 1, 2), seed=8)
        assert a.seed == 8

    def test_calibration_across_seeds(self):
        # z <= 3 should hold in at least 99% of repetitions; with these fixed
        # seeds the outcome is deterministic and was verified to hold
        spec_template = GameSpec("estimation", n=1, samples=1_500, seed=0)
        povm = build_povm(1, default_directions(1))
        bad = 0
        for seed in range(100):
            record = monte_carlo_play(spec_template, povm, seed=seed)
            z = abs(record.mean_payoff - 2.0 / 3.0) / record.stderr_payoff
            bad += z > 3.0
        assert bad <= 1


class TestAsymBoundScan:
    def test_grid_passes_through_optimal(self):
        channels = asymmetry_grid_channels(2, 21)
        sums = {}
        for t, ch in channels:
            from qgames.cloning import single_clone_haar_fidelity

            sums[t] = sum(single_clone_haar_fidelity(ch, k) for k in (1, 2))
        assert sums[0.0] == pytest.approx(1.5, abs=1e-12)
        assert sums[1.0] == pytest.approx(1.5, abs=1e-12)
        assert sums[0.5] == pytest.approx(5.0 / 3.0, abs=1e-12)

    def test_scan_respects_bound(self):
        report = asym_bound_scan(2, 1, 2, n_random=150, grid_points=21, seed=5)
        assert report.passed
        assert report.bound == pytest.approx(5.0 / 3.0)
        assert report.max_sum_fidelity <= report.bound + 1e-9
        assert report.argmax == "optimal-cloner"
        optimal = [r for r in report.records if r.kind == "optimal"][0]
        assert abs(optimal.sum_fidelity - 5.0 / 3.0) <= 1e-10

    def test_scan_other_arities_skip_grid(self):
        report = asym_bound_scan(2, 2, 3, n_random=10, grid_points=21, seed=6)
        assert all(r.kind != "grid" for r in report.records)
        assert report.passed

    def test_invalid_channel_rejected_before_scanning(self):
        from qgames.cloning import Channel
        from qgames.harness import _scan_channel

        # bypass constructor validation to fake a lossy channel
        ch = Channel.__new__(Channel)
        ch.d, ch.n_in, ch.n_out = 2, 1, 2
        ch.dim_in, ch.dim_out = 2, 4
        ch.domain = "full"
        k = np.zeros((4, 2))
        k[0, 0] = 0.7
        ch.kraus = (k,)
        with pytest.raises(ValueError, match="trace preserving"):
            _scan_channel(ch, "random", "lossy")

    def test_deterministic_given_seed(self):
        a = asym_bound_scan(2, 1, 2, n_random=5, grid_points=5, seed=11)
        b = asym_bound_scan(2, 1, 2, n_random=5, grid_points=5, seed=11)
        assert a == b
