"""Derivation-chain checks: algebraic steps, exact atomized arithmetic, and
the subsample-vs-population contrast."""

import math
from fractions import Fraction

import numpy as np
import pytest

from belllab import (
    CANONICAL_QUADRUPLE,
    ChshQuadruple,
    chsh,
    lhv_correlation,
    make_atomized,
    make_factorized_sign,
    random_atomized,
)
from belllab.hvmodels import FactorizedModel, TrialAtom, UniformContinuous, constant_atom
from belllab import verifier


def zero_model():
    return FactorizedModel(
        UniformContinuous(),
        lambda a, lam: np.zeros(np.shape(lam)),
        lambda b, lam: np.zeros(np.shape(lam)),
    )


# ---------------------------------------------------------------- bounds

def test_check_bounds_passes_for_sign_model():
    rec = verifier.check_bounds(
        make_factorized_sign(), [0.0, 0.3, 1.1], np.linspace(0, 3, 40)
    )
    assert rec.passed
    assert rec.value == 1.0
    assert rec.detail["violations"] == []


def test_check_bounds_flags_out_of_range_model():
    model = FactorizedModel(
        UniformContinuous(),
        lambda a, lam: np.full(np.shape(lam), 1.5),
        lambda b, lam: np.zeros(np.shape(lam)),
    )
    rec = verifier.check_bounds(model, [0.2], [0.7])
    assert not rec.passed
    assert len(rec.detail["violations"]) == 1
    assert rec.detail["violations"][0]["value"] == 1.5


def test_check_bounds_accepts_bounded_cosine_model():
    model = FactorizedModel(
        UniformContinuous(),
        lambda a, lam: np.cos(2.0 * (a - np.asarray(lam))),
        lambda b, lam: np.cos(2.0 * (b - np.asarray(lam))),
    )
    rec = verifier.check_bounds(model, [0.0, 0.9], np.linspace(0, 3, 25))
    assert rec.passed


def test_check_bounds_rejects_empty_grids():
    with pytest.raises(ValueError):
        verifier.check_bounds(make_factorized_sign(), [], [0.1])


# ---------------------------------------------------------------- identity

def test_zero_identity_simple_cases():
    assert verifier.check_zero_identity((1.0, 1.0), (1.0, 1.0)) == 0.0
    # 1*0.5*(-1)*0.3 - 1*0.3*(-1)*0.5 = 0
    assert verifier.check_zero_identity((1.0, -1.0), (0.5, 0.3)) == 0.0


def test_zero_identity_random_sweep():
    rec = verifier.zero_identity_sweep(100_000, seed=2024)
    assert rec.passed
    assert rec.value <= 1e-12


# ---------------------------------------------------------------- abs step

def test_abs_bound_step_canonical_both_signs():
    model = make_factorized_sign()
    for sign in (1, -1):
        rec = verifier.check_abs_bound_step(model, CANONICAL_QUADRUPLE, sign)
        assert rec.passed
        assert rec.detail["left"] <= rec.detail["right"] + 1e-9


def test_abs_bound_step_trivial_for_zero_model():
    rec = verifier.check_abs_bound_step(zero_model(), CANONICAL_QUADRUPLE, 1)
    assert rec.passed
    assert rec.detail["left"] == 0.0
    assert rec.detail["right"] == pytest.approx(2.0, abs=1e-12)


def test_abs_bound_step_random_quadruple_sweep():
    rec = verifier.abs_bound_step_sweep(make_factorized_sign(), 200, seed=99)
    assert rec.passed
    assert rec.value <= 1e-9


def test_abs_bound_step_rejects_bad_sign():
    with pytest.raises(ValueError):
        verifier.check_abs_bound_step(make_factorized_sign(), CANONICAL_QUADRUPLE, 2)


# ---------------------------------------------------------------- bell bound

def test_bell_inequality_sign_model_on_grid():
    rec = verifier.check_bell_inequality(make_factorized_sign())
    assert rec.passed
    assert rec.value == pytest.approx(2.0, abs=1e-9)


def test_bell_inequality_constant_models():
    const = FactorizedModel(
        UniformContinuous(),
        lambda a, lam: np.ones(np.shape(lam)),
        lambda b, lam: -np.ones(np.shape(lam)),
    )
    rec = verifier.check_bell_inequality(const, grid_step=math.pi / 4, points=64)
    assert rec.passed
    assert rec.value == pytest.approx(2.0, abs=1e-12)
    rec0 = verifier.check_bell_inequality(zero_model(), grid_step=math.pi / 4, points=64)
    assert rec0.value == 0.0


def test_bell_check_agrees_with_chsh_assembly():
    model = make_factorized_sign()
    rec = verifier.check_bell_inequality(model)
    q = rec.detail["attaining_quadruple"]
    quadruple = ChshQuadruple(q["a"], q["a_prime"], q["b"], q["b_prime"])
    direct = chsh(lhv_correlation(model), quadruple)
    assert abs(direct.abs_form - rec.value) <= 1e-9


# ---------------------------------------------------------------- atomized

def test_cross_term_vanishes_for_distinct_atoms():
    model = random_atomized(6, seed=4)
    q = CANONICAL_QUADRUPLE
    for n in range(6):
        for m in range(6):
            if n != m:
                val = verifier.cross_term_integral(
                    model, n, m, q.a, q.a_prime, q.b, q.b_prime
                )
                assert val == Fraction(0)


def test_cross_term_single_atom_unit_weight():
    model = make_atomized([constant_atom(0, 1, 1)])
    val = verifier.cross_term_integral(model, 0, 0, 0.0, 0.1, 0.2, 0.3)
    assert val == Fraction(1)


def test_cross_term_diagonal_weight_and_sign():
    # four atoms; atom 2's quadruple product is -1 at these settings
    a, ap, b, bp = 0.0, 0.8, 0.4, 1.2
    def flip_at_ap(theta):
        return -1 if abs(theta - ap) < 1e-9 else 1
    atoms = [
        constant_atom(0, 1, 1),
        constant_atom(1, 1, 1),
        TrialAtom(2, flip_at_ap, lambda t: 1),
        constant_atom(3, 1, 1),
    ]
    model = make_atomized(atoms)
    val = verifier.cross_term_integral(model, 2, 2, a, ap, b, bp)
    assert val == Fraction(-1, 4)


def test_cross_term_rejects_out_of_range_atoms():
    model = random_atomized(3, seed=1)
    with pytest.raises(IndexError):
        verifier.cross_term_integral(model, 0, 3, 0.0, 0.1, 0.2, 0.3)


def test_cross_terms_report_counts_pairs():
    rec = verifier.cross_terms_report(random_atomized(5, seed=8))
    assert rec.passed
    assert rec.inputs["cross_pairs"] == 20
    assert rec.value == 0.0


def test_degenerate_bound_holds_for_random_tables():
    quadruples = verifier.quadruple_grid(math.pi / 8)
    assert len(quadruples) == 8**4
    for n_atoms in (2, 5, 50):
        rec = verifier.check_degenerate_inequality(
            random_atomized(n_atoms, seed=31), quadruples
        )
        assert rec.passed
        assert rec.value <= 2.0


def test_degenerate_bound_single_uniform_atom_saturates():
    model = make_atomized([constant_atom(0, 1, 1)])
    rec = verifier.check_degenerate_inequality(
        model, [CANONICAL_QUADRUPLE]
    )
    assert rec.passed
    assert rec.value == 2.0
    row = rec.detail["per_quadruple"][0]
    assert row["degenerate_value"] == 2.0
    assert row["standard_value"] == 2.0


def test_degenerate_report_tracks_excess():
    grid = verifier.quadruple_grid(math.pi / 2)  # 16 quadruples, detail kept
    rec = verifier.check_degenerate_inequality(random_atomized(5, seed=31), grid)
    per = rec.detail["per_quadruple"]
    assert len(per) == 16
    want = max(r["excess"] for r in per)
    assert rec.detail["max_excess"] == pytest.approx(want, abs=1e-15)


def test_degenerate_rejects_empty_grid():
    with pytest.raises(ValueError):
        verifier.check_degenerate_inequality(random_atomized(2, seed=1), [])


# ---------------------------------------------------------------- the gap

def test_sampling_gap_demonstration():
    rec = verifier.check_sampling_gap(10_000, seed=2)
    assert rec.passed
    assert rec.value > 2.7  # near 2*sqrt(2), far above the population bound
    assert rec.detail["population_standard_value"] <= 2.0
    assert rec.detail["population_degenerate_value"] <= 2.0
    assert rec.detail["subsample_stderr"] < 0.03


def test_sampling_gap_rejects_bad_count():
    with pytest.raises(ValueError):
        verifier.check_sampling_gap(0, seed=1)
