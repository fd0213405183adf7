"""Exact quantum predictions for polarization-correlated photon pairs.

States live in the two-photon product basis, ordered (HH, HV, VH, VV), with H
the horizontal axis at 0 and V the vertical axis at 90 degrees. A polarizer at
angle a transmits along cos(a) H + sin(a) V; outcome +1 means the photon
passed, -1 that it was absorbed. Coincidence probabilities follow from the
Born rule, i.e. the squared magnitude of the state's projection onto the
chosen outcome directions.

Two standard sources are provided. The singlet (HV - VH)/sqrt(2) gives
coincidence probability sin^2(a-b)/2 for (+1,+1) and correlation
E(a,b) = -cos 2(a-b). The parallel-correlated pair (HH + VV)/sqrt(2) gives
cos^2(a-b)/2 and E(a,b) = +cos 2(a-b).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .angles import Angle, as_radians

__all__ = [
    "TwoPhotonState",
    "NullStateError",
    "ProductCheck",
    "basis_state",
    "make_singlet",
    "make_parallel",
    "superpose",
    "outcome_probabilities",
    "coincidence_prob",
    "correlation_qm",
    "marginal_expectations",
    "is_product",
]

NORM_TOL = 1e-12

BASIS_LABELS = ("HH", "HV", "VH", "VV")

#: Outcome pairs in the order used by outcome_probabilities.
OUTCOME_ORDER = ((1, 1), (1, -1), (-1, 1), (-1, -1))


class NullStateError(ValueError):
    """Raised when a linear combination of states has (numerically) zero norm."""


@dataclass(frozen=True)
class TwoPhotonState:
    """Four complex amplitudes over (HH, HV, VH, VV), normalized to 1."""

    amplitudes: tuple[complex, complex, complex, complex]

    def __post_init__(self) -> None:
        amps = tuple(complex(c) for c in self.amplitudes)
        if len(amps) != 4:
            raise ValueError("a two-photon state needs exactly 4 amplitudes")
        norm_sq = sum(abs(c) ** 2 for c in amps)
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized: |psi|^2 = {norm_sq!r}")
        object.__setattr__(self, "amplitudes", amps)

    def matrix(self) -> np.ndarray:
        """Amplitudes as a 2x2 matrix, rows photon 1 (H, V), columns photon 2."""
        return np.array(self.amplitudes, dtype=complex).reshape(2, 2)


def basis_state(label: str) -> TwoPhotonState:
    """Product basis state for a label in {HH, HV, VH, VV}."""
    try:
        i = BASIS_LABELS.index(label.upper())
    except ValueError:
        raise ValueError(f"unknown basis label {label!r}") from None
    amps = [0j, 0j, 0j, 0j]
    amps[i] = 1 + 0j
    return TwoPhotonState(tuple(amps))


def make_singlet() -> TwoPhotonState:
    """The anti-correlated pair (HV - VH)/sqrt(2)."""
    r = math.sqrt(0.5)
    return TwoPhotonState((0j, r + 0j, -r + 0j, 0j))


def make_parallel() -> TwoPhotonState:
    """The parallel-correlated pair (HH + VV)/sqrt(2)."""
    r = math.sqrt(0.5)
    return TwoPhotonState((r + 0j, 0j, 0j, r + 0j))


def superpose(
    first: TwoPhotonState,
    second: TwoPhotonState,
    c1: complex,
    c2: complex,
) -> TwoPhotonState:
    """Renormalized linear combination c1*first + c2*second.

    Raises NullStateError when the combination cancels to zero norm.
    """
    combo = [
        c1 * x + c2 * y for x, y in zip(first.amplitudes, second.amplitudes)
    ]
    norm = math.sqrt(sum(abs(c) ** 2 for c in combo))
    if norm <= 1e-12:
        raise NullStateError("superposition has zero norm; no state results")
    return TwoPhotonState(tuple(c / norm for c in combo))


def _pass_vector(angle: float, outcome: int) -> np.ndarray:
    """Measurement direction in the (H, V) basis for a +-1 outcome."""
    c, s = math.cos(angle), math.sin(angle)
    if outcome == 1:
        return np.array([c, s])
    if outcome == -1:
        return np.array([-s, c])
    raise ValueError(f"outcome must be +1 or -1, got {outcome!r}")


def outcome_probabilities(
    state: TwoPhotonState, a: Angle | float, b: Angle | float
) -> np.ndarray:
    """Born probabilities of the four outcome pairs, ordered per OUTCOME_ORDER."""
    ra, rb = as_radians(a), as_radians(b)
    m = state.matrix()
    probs = np.empty(4)
    for i, (sa, sb) in enumerate(OUTCOME_ORDER):
        amp = _pass_vector(ra, sa) @ m @ _pass_vector(rb, sb)
        probs[i] = abs(amp) ** 2
    return probs


def coincidence_prob(
    state: TwoPhotonState,
    a: Angle | float,
    b: Angle | float,
    outcome: tuple[int, int],
) -> float:
    """Probability of one joint outcome (sideA, sideB) at settings (a, b)."""
    try:
        i = OUTCOME_ORDER.index((outcome[0], outcome[1]))
    except ValueError:
        raise ValueError(f"outcome must be a pair of +-1, got {outcome!r}") from None
    return float(outcome_probabilities(state, a, b)[i])


def _clamp_unit(x: float) -> float:
    # probabilities carry last-ulp rounding; expectations must stay in [-1, 1]
    return max(-1.0, min(1.0, x))


def correlation_qm(
    state: TwoPhotonState, a: Angle | float, b: Angle | float
) -> float:
    """Expectation of the product of the two +-1 outcomes."""
    p = outcome_probabilities(state, a, b)
    return _clamp_unit(float(p[0] - p[1] - p[2] + p[3]))


def marginal_expectations(
    state: TwoPhotonState, a: Angle | float, b: Angle | float
) -> tuple[float, float]:
    """Single-side outcome expectations (E[A], E[B]) at settings (a, b)."""
    p = outcome_probabilities(state, a, b)
    return (
        _clamp_unit(float(p[0] + p[1] - p[2] - p[3])),
        _clamp_unit(float(p[0] - p[1] + p[2] - p[3])),
    )


@dataclass(frozen=True)
class ProductCheck:
    """Result of the product-state test, truthy iff the state factorizes."""

    product: bool
    coefficients: tuple[float, float]

    def __bool__(self) -> bool:
        return self.product


def is_product(state: TwoPhotonState, tol: float = 1e-12) -> ProductCheck:
    """Test whether the state factorizes into independent one-photon states.

    The 2x2 amplitude matrix of a product state has rank one, so its
    determinant (the product of the two Schmidt coefficients) vanishes.
    Returns the Schmidt coefficient pair along with the verdict.
    """
    m = state.matrix()
    s = np.linalg.svd(m, compute_uv=False)
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    return ProductCheck(bool(abs(det) <= tol), (float(s[0]), float(s[1])))
