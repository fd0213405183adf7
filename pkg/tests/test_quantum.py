"""Born-rule predictions checked against closed-form polarization optics.

Oracles: for the singlet, P(+1,+1 | a, b) = sin^2(a-b)/2 and
E(a,b) = -cos 2(a-b); for the parallel pair, cos^2(a-b)/2 and +cos 2(a-b).
"""

import math

import numpy as np
import pytest

from belllab import (
    Angle,
    NullStateError,
    TwoPhotonState,
    basis_state,
    coincidence_prob,
    correlation_qm,
    is_product,
    make_parallel,
    make_singlet,
    marginal_expectations,
    normalize_angle,
    outcome_probabilities,
    superpose,
)

HALF_SIN_SQ_PI_8 = 0.07322330470336312  # sin^2(pi/8) / 2
COS_PI_4 = 0.7071067811865476


def random_state(rng):
    z = rng.normal(size=4) + 1j * rng.normal(size=4)
    z = z / np.linalg.norm(z)
    return TwoPhotonState(tuple(z))


# ---------------------------------------------------------------- angles

def test_angle_normalization_is_total_and_mod_pi():
    assert normalize_angle(0.0) == 0.0
    assert normalize_angle(math.pi) == 0.0
    assert math.isclose(normalize_angle(-0.5), math.pi - 0.5, rel_tol=0, abs_tol=1e-15)
    assert normalize_angle(-1e-18) == 0.0  # rounding may land on pi; must wrap
    for x in (-10 * math.pi, 7.5, 1e9, -1e9):
        r = normalize_angle(x)
        assert 0.0 <= r < math.pi


def test_angle_rejects_non_finite():
    with pytest.raises(ValueError):
        normalize_angle(math.nan)
    with pytest.raises(ValueError):
        Angle(math.inf)


def test_angle_degrees_round_trip():
    a = Angle.from_degrees(135.0)
    assert math.isclose(a.degrees, 135.0, rel_tol=0, abs_tol=1e-12)
    assert Angle.from_degrees(180.0).radians == 0.0


# ---------------------------------------------------------------- states

def test_singlet_is_normalized_and_antisymmetric():
    s = make_singlet()
    r = math.sqrt(0.5)
    assert s.amplitudes[0] == 0 and s.amplitudes[3] == 0
    assert s.amplitudes[1].real == pytest.approx(r, abs=1e-15)
    assert s.amplitudes[2].real == pytest.approx(-r, abs=1e-15)
    assert abs(sum(abs(c) ** 2 for c in s.amplitudes) - 1.0) <= 1e-12


def test_state_constructor_rejects_unnormalized():
    with pytest.raises(ValueError):
        TwoPhotonState((1.0, 1.0, 0.0, 0.0))


def test_basis_state_labels():
    assert basis_state("hv").amplitudes[1] == 1
    with pytest.raises(ValueError):
        basis_state("XY")


# ---------------------------------------------------------------- superpose

def test_superpose_idempotent_on_identical_states():
    hh = basis_state("HH")
    out = superpose(hh, hh, math.sqrt(0.5), math.sqrt(0.5))
    assert out.amplitudes[0] == pytest.approx(1.0, abs=1e-12)


def test_superpose_builds_singlet_from_basis_states():
    r = math.sqrt(0.5)
    out = superpose(basis_state("HV"), basis_state("VH"), r, -r)
    expected = make_singlet()
    for got, want in zip(out.amplitudes, expected.amplitudes):
        assert got == pytest.approx(want, abs=1e-12)


def test_superpose_normalizes_equal_weight_sum():
    out = superpose(basis_state("HH"), basis_state("VV"), 1.0, 1.0)
    r = math.sqrt(0.5)
    assert out.amplitudes[0] == pytest.approx(r, abs=1e-12)
    assert out.amplitudes[3] == pytest.approx(r, abs=1e-12)
    assert out.amplitudes[1] == 0 and out.amplitudes[2] == 0


def test_superpose_zero_norm_raises():
    hh = basis_state("HH")
    with pytest.raises(NullStateError):
        superpose(hh, hh, 1.0, -1.0)


def test_superpose_linearity_matches_unnormalized_born_rule():
    rng = np.random.default_rng(7)
    for _ in range(20):
        phi, chi = random_state(rng), random_state(rng)
        c1 = complex(rng.normal(), rng.normal())
        c2 = complex(rng.normal(), rng.normal())
        combo = c1 * np.array(phi.amplitudes) + c2 * np.array(chi.amplitudes)
        norm_sq = float(np.sum(np.abs(combo) ** 2))
        if norm_sq < 1e-6:
            continue
        state = superpose(phi, chi, c1, c2)
        a, b = rng.random() * math.pi, rng.random() * math.pi
        m = combo.reshape(2, 2)
        for sa, ea in ((1, (math.cos(a), math.sin(a))), (-1, (-math.sin(a), math.cos(a)))):
            for sb, eb in ((1, (math.cos(b), math.sin(b))), (-1, (-math.sin(b), math.cos(b)))):
                amp = np.asarray(ea) @ m @ np.asarray(eb)
                direct = abs(amp) ** 2 / norm_sq
                assert coincidence_prob(state, a, b, (sa, sb)) == pytest.approx(
                    direct, abs=1e-12
                )


# ---------------------------------------------------------------- Born rule

def test_singlet_coincidence_zero_at_equal_settings():
    s = make_singlet()
    for a in (0.0, 0.3, math.pi / 3, 2.9):
        assert coincidence_prob(s, a, a, (1, 1)) <= 1e-15


def test_singlet_coincidence_against_closed_form():
    s = make_singlet()
    assert coincidence_prob(s, 0.0, math.pi / 2, (1, 1)) == pytest.approx(0.5, abs=1e-12)
    assert coincidence_prob(s, 0.0, math.pi / 8, (1, 1)) == pytest.approx(
        HALF_SIN_SQ_PI_8, abs=1e-12
    )
    rng = np.random.default_rng(3)
    for a, b in rng.random((50, 2)) * math.pi:
        want = 0.5 * math.sin(a - b) ** 2
        assert coincidence_prob(s, a, b, (1, 1)) == pytest.approx(want, abs=1e-12)


def test_parallel_state_cross_outcome_vanishes_at_equal_settings():
    p = make_parallel()
    for a in (0.0, 0.7, 1.9):
        assert coincidence_prob(p, a, a, (1, -1)) <= 1e-15
        want = 0.5 * math.cos(a - 0.4) ** 2
        assert coincidence_prob(p, a, 0.4, (1, 1)) == pytest.approx(want, abs=1e-12)


def test_outcome_probabilities_sum_to_one_and_are_nonnegative():
    rng = np.random.default_rng(11)
    for _ in range(100):
        state = random_state(rng)
        a, b = rng.random() * math.pi, rng.random() * math.pi
        p = outcome_probabilities(state, a, b)
        assert np.all(p >= 0.0)
        assert abs(float(np.sum(p)) - 1.0) <= 1e-12


def test_coincidence_rejects_bad_outcome():
    with pytest.raises(ValueError):
        coincidence_prob(make_singlet(), 0.0, 0.0, (0, 1))


# ---------------------------------------------------------------- correlation

def test_singlet_correlation_closed_form():
    s = make_singlet()
    assert correlation_qm(s, 0.7, 0.7) == pytest.approx(-1.0, abs=1e-12)
    assert correlation_qm(s, 0.0, math.pi / 4) == pytest.approx(0.0, abs=1e-12)
    assert correlation_qm(s, 0.0, math.pi / 8) == pytest.approx(-COS_PI_4, abs=1e-12)


def test_correlation_bounded_for_random_states():
    rng = np.random.default_rng(19)
    for _ in range(200):
        state = random_state(rng)
        e = correlation_qm(state, rng.random() * math.pi, rng.random() * math.pi)
        assert -1.0 <= e <= 1.0


def test_singlet_rotational_invariance():
    s = make_singlet()
    base = correlation_qm(s, 0.2, 1.1)
    shifts = np.linspace(0.0, math.pi, 100)
    for shift in shifts:
        assert abs(correlation_qm(s, 0.2 + shift, 1.1 + shift) - base) <= 1e-12


# ---------------------------------------------------------------- product test

def test_is_product_on_basis_and_singlet():
    assert is_product(basis_state("HH")).product
    check = is_product(make_singlet())
    assert not check
    s1, s2 = check.coefficients
    assert s1 * s2 == pytest.approx(0.5, abs=1e-12)  # |det| of the singlet matrix


def test_is_product_detects_factorizable_superposition():
    state = superpose(basis_state("HH"), basis_state("HV"), 1.0, 1.0)
    assert is_product(state).product  # H (x) (H+V)/sqrt(2)


def test_product_states_factorize_correlation():
    rng = np.random.default_rng(23)
    for _ in range(50):
        u = rng.normal(size=2) + 1j * rng.normal(size=2)
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        u /= np.linalg.norm(u)
        v /= np.linalg.norm(v)
        state = TwoPhotonState(tuple(np.outer(u, v).ravel()))
        assert is_product(state).product
        a, b = rng.random() * math.pi, rng.random() * math.pi
        ea, eb = marginal_expectations(state, a, b)
        assert correlation_qm(state, a, b) == pytest.approx(ea * eb, abs=1e-10)
