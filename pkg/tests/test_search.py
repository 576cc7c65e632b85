import itertools
import math

import pytest

from ontolab.errors import TooLargeError
from ontolab.models import validate
from ontolab.quantum import (
    CHSH_ZX_SETTING,
    KET_ONE,
    KET_PLUS,
    KET_ZERO,
    PHI_PLUS,
    X_MEASUREMENT,
    Z_MEASUREMENT,
    ChshSetting,
    born_probability,
    chsh_optimal_value,
    schmidt_pair_state,
)
from ontolab.search import (
    brute_force_overlap,
    chsh_monte_carlo,
    grid_search_overlap_with_chsh,
    max_overlap_lp,
    max_overlap_with_chsh,
)

SQRT2 = math.sqrt(2.0)
TSIRELSON = 2.0 * SQRT2


def stochastic_grid_overlap(states, measurements, mass_units=4, xi_steps=3):
    """Independent oracle allowing stochastic responses.

    Enumerates models on 3 ontic states where masses move in 1/mass_units
    steps and each response probability in 1/(xi_steps-1) steps, keeps those
    reproducing every Born probability exactly, and returns the largest mass
    the second state places on the support of the first.  The restriction of
    the main optimizer to deterministic response patterns is lossless, so
    this must never exceed it.
    """
    n_labels = 3
    phi, psi = states
    mass_grids = [
        tuple(u / mass_units for u in combo)
        for combo in itertools.product(range(mass_units + 1), repeat=n_labels)
        if sum(combo) == mass_units
    ]
    xi_values = [k / (xi_steps - 1) for k in range(xi_steps)]
    # per-label response column for each measurement (two outcomes each)
    label_choices = list(itertools.product(xi_values, repeat=len(measurements)))
    targets = [
        [born_probability(state, meas, meas.labels[0]) for meas in measurements]
        for state in (phi, psi)
    ]

    best = -1.0
    for xi in itertools.product(label_choices, repeat=n_labels):
        for mu_phi in mass_grids:
            if any(
                abs(sum(xi[l][mi] * mu_phi[l] for l in range(n_labels)) - targets[0][mi]) > 1e-9
                for mi in range(len(measurements))
            ):
                continue
            support = [l for l in range(n_labels) if mu_phi[l] > 0]
            for mu_psi in mass_grids:
                if any(
                    abs(sum(xi[l][mi] * mu_psi[l] for l in range(n_labels)) - targets[1][mi]) > 1e-9
                    for mi in range(len(measurements))
                ):
                    continue
                best = max(best, sum(mu_psi[l] for l in support))
    return best


class TestBudgetOptimum:
    def test_symmetric_tsirelson_point(self):
        value = max_overlap_with_chsh(0.5, TSIRELSON)
        assert abs(value - (2.0 - SQRT2)) <= 1e-9

    def test_local_value_leaves_overlap_free(self):
        assert max_overlap_with_chsh(0.5, 2.0) == pytest.approx(1.0, abs=1e-9)

    def test_asymmetric_quantum_point(self):
        target = 2.0 * math.sqrt(1.64)
        value = max_overlap_with_chsh(0.8, target)
        assert value == pytest.approx(2.0 - math.sqrt(1.64), abs=1e-9)

    def test_interior_value(self):
        # 2 + 2r = 2.4 -> rest 0.2 -> overlap 0.8
        assert max_overlap_with_chsh(0.5, 2.4) == pytest.approx(0.8, abs=1e-9)

    def test_range_guards(self):
        with pytest.raises(ValueError):
            max_overlap_with_chsh(0.0, 2.5)
        with pytest.raises(ValueError):
            max_overlap_with_chsh(0.5, 1.5)
        with pytest.raises(ValueError):
            max_overlap_with_chsh(0.5, 3.0)
        with pytest.raises(ValueError):
            max_overlap_with_chsh(0.8, 2.7)  # above this state's quantum maximum

    def test_nonincreasing_in_chsh_everywhere(self):
        # full 101x101 sweep: tightening the CHSH demand can only shrink
        # the admissible overlap
        for i in range(101):
            alpha_sq = 0.01 + 0.98 * i / 100
            top = 2.0 * math.sqrt(1.0 + 4.0 * alpha_sq * (1.0 - alpha_sq))
            previous = None
            for j in range(101):
                chsh = 2.0 + (top - 2.0) * j / 100
                value = max_overlap_with_chsh(alpha_sq, chsh)
                if previous is not None:
                    assert value <= previous + 1e-9
                previous = value

    def test_grid_oracle_agreement(self):
        for alpha_sq, chsh in ((0.5, TSIRELSON), (0.5, 2.3), (0.8, 2.2), (0.3, 2.5)):
            lp = max_overlap_with_chsh(alpha_sq, chsh)
            grid = grid_search_overlap_with_chsh(alpha_sq, chsh)
            assert abs(lp - grid) <= 2e-3

    def test_grid_resolution_guard(self):
        with pytest.raises(ValueError):
            grid_search_overlap_with_chsh(0.5, 2.5, resolution=1e-4)


class TestPatternOptimum:
    def test_zero_plus_under_both_measurements(self):
        optimum, witness = max_overlap_lp(
            [KET_ZERO, KET_PLUS], [Z_MEASUREMENT, X_MEASUREMENT]
        )
        assert optimum == pytest.approx(0.5, abs=1e-9)
        assert validate(witness).passed

    def test_self_pair_is_total_mass(self):
        optimum, _ = max_overlap_lp(
            [KET_ZERO, KET_PLUS], [Z_MEASUREMENT], objective_pair=(0, 0)
        )
        assert optimum == pytest.approx(1.0, abs=1e-9)

    def test_orthogonal_pair_shares_nothing(self):
        optimum, witness = max_overlap_lp([KET_ZERO, KET_ONE], [Z_MEASUREMENT])
        assert optimum == pytest.approx(0.0, abs=1e-9)
        assert validate(witness).passed

    def test_unconstrained_objective_state_is_free(self):
        # X does not contain |0>, so nothing pins the core
        optimum, _ = max_overlap_lp([KET_ZERO, KET_PLUS], [X_MEASUREMENT])
        assert optimum == pytest.approx(1.0, abs=1e-9)

    def test_witness_reproduces_born_exactly(self):
        _, witness = max_overlap_lp(
            [KET_ZERO, KET_PLUS], [Z_MEASUREMENT, X_MEASUREMENT]
        )
        report = validate(witness)
        assert report.worst.max_residual <= 1e-9

    def test_witness_is_deterministic_across_calls(self):
        from ontolab.models import model_to_json

        first = max_overlap_lp([KET_ZERO, KET_PLUS], [Z_MEASUREMENT, X_MEASUREMENT])
        second = max_overlap_lp([KET_ZERO, KET_PLUS], [Z_MEASUREMENT, X_MEASUREMENT])
        assert first[0] == second[0]
        assert model_to_json(first[1]) == model_to_json(second[1])

    def test_ontic_count_pads_the_witness(self):
        optimum, witness = max_overlap_lp(
            [KET_ZERO, KET_PLUS], [Z_MEASUREMENT], ontic_count=6
        )
        assert optimum == pytest.approx(0.5, abs=1e-9)
        assert len(witness.space.labels) == 6
        assert validate(witness).passed

    def test_ontic_count_cannot_shrink(self):
        with pytest.raises(ValueError, match="below the pattern count"):
            max_overlap_lp([KET_ZERO, KET_PLUS], [Z_MEASUREMENT, X_MEASUREMENT], ontic_count=2)

    def test_input_validation(self):
        with pytest.raises(ValueError):
            max_overlap_lp([], [Z_MEASUREMENT])
        with pytest.raises(ValueError):
            max_overlap_lp([KET_ZERO], [Z_MEASUREMENT], objective_pair=(0, 3))
        with pytest.raises(ValueError):
            max_overlap_lp(
                [KET_ZERO, KET_PLUS], [Z_MEASUREMENT], state_ids=("a", "a")
            )
        with pytest.raises(ValueError):
            max_overlap_lp([KET_ZERO, PHI_PLUS], [Z_MEASUREMENT])

    def test_custom_ids_name_the_witness(self):
        _, witness = max_overlap_lp(
            [KET_ZERO, KET_PLUS],
            [Z_MEASUREMENT],
            state_ids=("ground", "diag"),
            measurement_ids=("spin_z",),
        )
        assert set(witness.preparations) == {"ground", "diag"}
        assert set(witness.measurements) == {"spin_z"}


class TestStochasticResponsesLemma:
    def test_single_measurement_instance(self):
        states = [KET_ZERO, KET_PLUS]
        measurements = [Z_MEASUREMENT]
        lp, _ = max_overlap_lp(states, measurements)
        stochastic = stochastic_grid_overlap(states, measurements)
        assert stochastic <= lp + 1e-9
        assert stochastic == pytest.approx(lp, abs=1e-9)

    def test_two_measurement_instance(self):
        states = [KET_ZERO, KET_PLUS]
        measurements = [Z_MEASUREMENT, X_MEASUREMENT]
        lp, _ = max_overlap_lp(states, measurements)
        stochastic = stochastic_grid_overlap(states, measurements)
        assert stochastic <= lp + 1e-9
        assert stochastic == pytest.approx(lp, abs=1e-9)


class TestBruteForce:
    def test_brackets_the_lp_optimum(self):
        lp, _ = max_overlap_lp([KET_ZERO, KET_PLUS], [Z_MEASUREMENT, X_MEASUREMENT])
        brute = brute_force_overlap([KET_ZERO, KET_PLUS], [Z_MEASUREMENT, X_MEASUREMENT])
        assert abs(lp - brute) <= 2e-3

    def test_orthogonal_pair_near_zero(self):
        brute = brute_force_overlap([KET_ZERO, KET_ONE], [Z_MEASUREMENT])
        assert brute <= 2e-3

    def test_size_guards(self):
        with pytest.raises(TooLargeError):
            brute_force_overlap([KET_ZERO] * 4, [Z_MEASUREMENT])
        with pytest.raises(ValueError):
            brute_force_overlap([KET_ZERO, KET_PLUS], [Z_MEASUREMENT], grid_resolution=1e-5)
        with pytest.raises(TooLargeError):
            brute_force_overlap(
                [KET_ZERO, KET_PLUS], [Z_MEASUREMENT, X_MEASUREMENT], node_cap=10
            )


class TestMonteCarlo:
    def test_deterministic_for_a_seed(self):
        a = chsh_monte_carlo(PHI_PLUS, CHSH_ZX_SETTING, 10_000, seed=7)
        b = chsh_monte_carlo(PHI_PLUS, CHSH_ZX_SETTING, 10_000, seed=7)
        assert a == b

    def test_deterministic_cells_have_zero_error(self):
        import numpy as np

        z = np.array([0.0, 0.0, 1.0])
        setting = ChshSetting(alice=(z, z), bob=(z, z))
        estimate, stderr = chsh_monte_carlo(
            KET_ZERO.tensor(KET_ZERO), setting, 5000
        )
        assert estimate == 2.0
        assert stderr == 0.0

    def test_maximally_entangled_hits_tsirelson(self):
        estimate, stderr = chsh_monte_carlo(PHI_PLUS, CHSH_ZX_SETTING, 100_000)
        assert abs(estimate - TSIRELSON) <= 3.0 * stderr

    def test_partially_entangled_hits_its_own_maximum(self):
        state = schmidt_pair_state(0.8)
        value, setting = chsh_optimal_value(state)
        estimate, stderr = chsh_monte_carlo(state, setting, 100_000)
        assert abs(estimate - value) <= 3.0 * stderr

    def test_error_scales_as_inverse_root_n(self):
        scaled = []
        for n in (1_000, 10_000, 100_000, 1_000_000):
            _, stderr = chsh_monte_carlo(PHI_PLUS, CHSH_ZX_SETTING, n)
            scaled.append(stderr * math.sqrt(n))
        assert max(scaled) / min(scaled) < 1.5

    def test_input_guards(self):
        with pytest.raises(ValueError):
            chsh_monte_carlo(PHI_PLUS, CHSH_ZX_SETTING, 100)
        with pytest.raises(ValueError):
            chsh_monte_carlo(KET_ZERO, CHSH_ZX_SETTING, 5000)
