"""Hidden-variable model families against quadrature and closed-form oracles.

Oracles: the sign model's correlation is the sawtooth -1 + 4|a-b|/pi on
|a-b| <= pi/2 (mirrored beyond); the conditional Malus kernel integrates to
E(a,b) = cos 2(a-b) exactly, because the B-side marginal cos^2(b-lam)
averages to 1/2 over a uniform lambda.
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from belllab import (
    AtomLambda,
    ContinuousLambda,
    DiscreteWeights,
    FactorizedModel,
    TrialAtom,
    UniformContinuous,
    atomized_correlation_exact,
    correlation_lhv,
    joint_prob_lhv,
    make_atomized,
    make_conditional_malus,
    make_factorized_sign,
    random_atomized,
    sample_lambda,
)
from belllab.hvmodels import (
    constant_atom,
    eval_over_lambdas,
    lambda_values,
    midpoint_grid,
)

SQRT_HALF = 0.7071067811865476


def sawtooth(delta):
    """Independent closed form for the sign model's correlation."""
    d = abs(delta) % math.pi
    d = min(d, math.pi - d)
    return -1.0 + 4.0 * d / math.pi


def cosine_model():
    """Fractional-outcome factorized model, E(a,b) = -cos 2(a-b) / 2."""
    return FactorizedModel(
        UniformContinuous(),
        lambda a, lam: np.cos(2.0 * (a - np.asarray(lam))),
        lambda b, lam: -np.cos(2.0 * (b - np.asarray(lam))),
    )


# ---------------------------------------------------------------- sampling

def test_uniform_lambda_mean_matches_law_of_large_numbers():
    rng = np.random.default_rng(101)
    lams = lambda_values(UniformContinuous(), rng, 100_000)
    assert np.all((lams >= 0.0) & (lams < math.pi))
    # 3 sigma band: 3 * (pi / sqrt(12)) / sqrt(1e5) = 0.0086
    assert abs(float(np.mean(lams)) - math.pi / 2) < 0.03


def test_sample_lambda_single_draws():
    rng = np.random.default_rng(5)
    hv = sample_lambda(UniformContinuous(), rng)
    assert isinstance(hv, ContinuousLambda)
    assert 0.0 <= hv.angle < math.pi
    assert sample_lambda(DiscreteWeights((1.0,)), rng) == AtomLambda(0)


def test_discrete_weights_frequencies():
    rng = np.random.default_rng(77)
    idx = lambda_values(DiscreteWeights((0.5, 0.5)), rng, 100_000)
    freq = float(np.mean(idx == 0))
    assert abs(freq - 0.5) < 0.005  # 3 sigma binomial band


def test_discrete_weights_validation():
    with pytest.raises(ValueError):
        DiscreteWeights((0.5, 0.4))
    with pytest.raises(ValueError):
        DiscreteWeights((1.5, -0.5))
    with pytest.raises(ValueError):
        DiscreteWeights(())


def test_atom_lambda_rejects_negative_index():
    with pytest.raises(ValueError):
        AtomLambda(-1)


# ---------------------------------------------------------------- sign model

def test_sign_model_perfect_anticorrelation_at_equal_settings():
    model = make_factorized_sign()
    for a in (0.0, 0.3, 1.2, 3.0):
        assert correlation_lhv(model, a, a) == pytest.approx(-1.0, abs=1e-9)


def test_sign_model_sawtooth_values():
    model = make_factorized_sign()
    assert correlation_lhv(model, 0.0, math.pi / 8) == pytest.approx(-0.5, abs=1e-9)
    assert correlation_lhv(model, 0.0, math.pi / 4) == pytest.approx(0.0, abs=1e-9)
    assert correlation_lhv(model, 0.0, math.pi / 2) == pytest.approx(1.0, abs=1e-9)
    # grid-aligned differences make the midpoint rule exact for the sawtooth
    for k in range(16):
        delta = k * math.pi / 16
        got = correlation_lhv(model, 0.0, delta, points=4096)
        assert got == pytest.approx(sawtooth(delta), abs=1e-12)


def test_sign_model_offset_does_not_change_correlation():
    base = make_factorized_sign()
    shifted = make_factorized_sign(0.31)
    for delta in (0.0, math.pi / 8, math.pi / 4):
        assert correlation_lhv(shifted, 0.0, delta) == pytest.approx(
            correlation_lhv(base, 0.0, delta), abs=1e-12
        )


def test_quadrature_convergence_on_aligned_grids():
    model = make_factorized_sign()
    for a, b in ((0.0, math.pi / 8), (math.pi / 4, 5 * math.pi / 8)):
        values = [correlation_lhv(model, a, b, points=n) for n in (2048, 4096, 8192)]
        assert max(values) - min(values) <= 1e-6


def test_quadrature_grid_floor():
    with pytest.raises(ValueError):
        correlation_lhv(make_factorized_sign(), 0.0, 0.1, points=8)
    with pytest.raises(ValueError):
        midpoint_grid(15)


# ---------------------------------------------------------------- conditional

def test_malus_joint_probability_closed_form():
    model = make_conditional_malus()
    rng = np.random.default_rng(13)
    for a, b in rng.random((20, 2)) * math.pi:
        want = 0.5 * math.cos(a - b) ** 2
        assert joint_prob_lhv(model, a, b, (1, 1)) == pytest.approx(want, abs=1e-12)


def test_malus_correlation_matches_quantum_curve():
    model = make_conditional_malus()
    deltas = np.arange(36) * math.pi / 36
    for delta in deltas:
        want = math.cos(2.0 * delta)
        assert correlation_lhv(model, 0.0, delta) == pytest.approx(want, abs=1e-9)


def test_malus_quadrature_convergence_anywhere():
    model = make_conditional_malus()
    rng = np.random.default_rng(29)
    for a, b in rng.random((5, 2)) * math.pi:
        values = [correlation_lhv(model, a, b, points=n) for n in (64, 128, 256)]
        assert max(values) - min(values) <= 1e-12  # smooth integrand, rule is exact


def test_malus_joint_probabilities_sum_to_one_pointwise():
    model = make_conditional_malus()
    rng = np.random.default_rng(31)
    lams = rng.random(50) * math.pi
    a, b = 0.4, 1.3
    p_b = eval_over_lambdas(model.prob_b, (b,), lams)
    p_plus = eval_over_lambdas(model.prob_a_given_b, (a, b, 1), lams)
    p_minus = eval_over_lambdas(model.prob_a_given_b, (a, b, -1), lams)
    assert np.all((p_b >= 0) & (p_b <= 1))
    assert np.all((p_plus >= 0) & (p_plus <= 1))
    total = (
        p_b * p_plus + p_b * (1 - p_plus)
        + (1 - p_b) * p_minus + (1 - p_b) * (1 - p_minus)
    )
    assert np.max(np.abs(total - 1.0)) <= 1e-12


def test_joint_probabilities_lie_in_unit_interval():
    rng = np.random.default_rng(37)
    for model in (make_factorized_sign(), make_conditional_malus(), cosine_model()):
        for a, b in rng.random((10, 2)) * math.pi:
            total = 0.0
            for outcome in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                p = joint_prob_lhv(model, a, b, outcome, points=512)
                assert -1e-12 <= p <= 1.0 + 1e-12
                total += p
            assert total == pytest.approx(1.0, abs=1e-9)


def test_malus_rejects_bad_conditioning_outcome():
    model = make_conditional_malus()
    with pytest.raises(ValueError):
        model.prob_a_given_b(0.1, 0.2, 0, np.zeros(4))


# ---------------------------------------------------------------- atomized

def test_make_atomized_validation():
    with pytest.raises(ValueError):
        make_atomized([])
    atoms = [constant_atom(0, 1, 1), constant_atom(0, -1, -1)]
    with pytest.raises(ValueError):
        make_atomized(atoms)
    with pytest.raises(ValueError):
        constant_atom(0, 2, 1)


def test_single_atom_model_is_deterministic():
    model = make_atomized([constant_atom(0, 1, 1)])
    for a, b in ((0.0, 0.0), (0.3, 2.2)):
        assert correlation_lhv(model, a, b) == 1.0
    down = make_atomized([constant_atom(0, 1, -1)])
    assert correlation_lhv(down, 0.9, 1.7) == -1.0


def test_opposite_atoms_cancel_exactly():
    model = make_atomized([constant_atom(0, 1, 1), constant_atom(1, 1, -1)])
    assert atomized_correlation_exact(model, 0.2, 0.9) == Fraction(0)


def test_atomized_correlation_is_reproducible_and_rational():
    model = random_atomized(7, seed=123)
    first = atomized_correlation_exact(model, 0.1, 0.5)
    assert isinstance(first, Fraction)
    assert first.denominator in (1, 7)
    for _ in range(3):
        assert atomized_correlation_exact(model, 0.1, 0.5) == first
    again = random_atomized(7, seed=123)
    assert atomized_correlation_exact(again, 0.1, 0.5) == first


def test_atom_tables_must_return_unit_outcomes():
    bad = make_atomized([TrialAtom(0, lambda a: 2, lambda a: 1)])
    with pytest.raises(ValueError):
        correlation_lhv(bad, 0.0, 0.0)


def test_random_atomized_rejects_bad_count():
    with pytest.raises(ValueError):
        random_atomized(0, seed=1)


# ---------------------------------------------------------------- generic

def test_eval_over_lambdas_accepts_scalar_only_callables():
    lams = np.array([0.1, 0.2, 0.3])
    vals = eval_over_lambdas(lambda a, lam: math.cos(a - lam), (0.5,), lams)
    assert vals == pytest.approx(np.cos(0.5 - lams), abs=1e-15)
    const = eval_over_lambdas(lambda a, lam: 1.5, (0.0,), lams)
    assert np.all(const == 1.5)


def test_discrete_factorized_model_exact_sum():
    # two equally weighted atoms with opposite B-side outcomes
    model = FactorizedModel(
        DiscreteWeights((0.5, 0.5)),
        lambda a, idx: np.ones_like(np.asarray(idx, dtype=float)),
        lambda b, idx: np.where(np.asarray(idx) == 0, 1.0, -1.0),
    )
    assert correlation_lhv(model, 0.3, 1.1) == pytest.approx(0.0, abs=1e-15)


def test_fractional_model_correlation_is_halved_cosine():
    model = cosine_model()
    for delta in (0.0, math.pi / 8, math.pi / 3):
        want = -0.5 * math.cos(2 * delta)
        assert correlation_lhv(model, 0.0, delta) == pytest.approx(want, abs=1e-9)


def test_factorized_models_respect_chsh_bound_on_fifteen_degree_grid():
    from belllab import lhv_correlation, maximize_chsh

    for model in (
        make_factorized_sign(),
        make_factorized_sign(math.pi / 12),
        cosine_model(),
    ):
        found = maximize_chsh(lhv_correlation(model), math.pi / 12)
        assert found.value <= 2.0 + 1e-9
