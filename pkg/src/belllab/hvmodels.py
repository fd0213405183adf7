"""Local hidden-variable models of the photon-pair source and detectors.

Three model families cover the standard ways of writing the joint statistics
of a two-station polarization experiment in terms of a hidden variable lambda:

* FactorizedModel: E(a,b) = integral dlam rho(lam) A(a,lam) B(b,lam), with
  the A side blind to b and the B side blind to a. The built-in sign model
  A = sgn(cos 2(a-lam)), B = -sgn(cos 2(b-lam)) over uniform lambda yields the
  classic sawtooth correlation -1 + 4|a-b|/pi.
* ConditionalModel: joint probability integral dlam rho(lam) P(A|b,B,lam)
  P(B|lam), the conditional-probability (Bayes) decomposition. The built-in
  Malus-law kernel, P(B=+1|lam) = cos^2(b-lam) with the A side conditioned on
  B's registered outcome, reproduces E(a,b) = cos 2(a-b) exactly.
* AtomizedModel: a finite list of deterministic per-trial atoms, each with its
  own distinct lambda value and +-1 outcome tables. Weights are the exact
  rational 1/N, which keeps downstream identity checks exact.

Continuous-lambda correlations are computed by a composite midpoint rule on
[0, pi); atomized ones by exact integer accumulation.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from typing import Callable, Sequence, Union

import numpy as np

from .angles import Angle, as_radians, normalize_angle

__all__ = [
    "ContinuousLambda",
    "AtomLambda",
    "HiddenVariable",
    "UniformContinuous",
    "DiscreteWeights",
    "LambdaDistribution",
    "FactorizedModel",
    "ConditionalModel",
    "TrialAtom",
    "AtomizedModel",
    "sample_lambda",
    "make_factorized_sign",
    "make_conditional_malus",
    "make_atomized",
    "random_atomized",
    "constant_atom",
    "atom_outcomes",
    "correlation_lhv",
    "joint_prob_lhv",
    "atomized_correlation_exact",
    "DEFAULT_QUADRATURE_POINTS",
    "MIN_QUADRATURE_POINTS",
]

DEFAULT_QUADRATURE_POINTS = 4096
MIN_QUADRATURE_POINTS = 16

WEIGHT_TOL = 1e-12


# --------------------------------------------------------------------------
# hidden variables and their distributions

@dataclass(frozen=True)
class ContinuousLambda:
    """A shared polarization angle, reduced to [0, pi)."""

    angle: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "angle", normalize_angle(self.angle))

    @property
    def value(self) -> float:
        return self.angle


@dataclass(frozen=True)
class AtomLambda:
    """An index into a discrete set of hidden-variable values."""

    index: int

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError("atom index must be non-negative")

    @property
    def value(self) -> int:
        return self.index


HiddenVariable = Union[ContinuousLambda, AtomLambda]


@dataclass(frozen=True)
class UniformContinuous:
    """Uniform density 1/pi on [0, pi)."""


@dataclass(frozen=True)
class DiscreteWeights:
    """A normalized discrete distribution over atom indices."""

    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        w = tuple(float(x) for x in self.weights)
        if not w:
            raise ValueError("at least one weight is required")
        if any(x < 0.0 for x in w):
            raise ValueError("weights must be non-negative")
        total = sum(w)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights must sum to 1, got {total!r}")
        object.__setattr__(self, "weights", w)

    def cumulative(self) -> np.ndarray:
        return np.cumsum(np.asarray(self.weights))


LambdaDistribution = Union[UniformContinuous, DiscreteWeights]


def sample_lambda(dist: LambdaDistribution, rng: np.random.Generator) -> HiddenVariable:
    """Draw one hidden variable from a distribution using the given stream."""
    if isinstance(dist, UniformContinuous):
        return ContinuousLambda(rng.random() * np.pi)
    if isinstance(dist, DiscreteWeights):
        idx = int(np.searchsorted(dist.cumulative(), rng.random(), side="right"))
        return AtomLambda(min(idx, len(dist.weights) - 1))
    raise TypeError(f"unknown lambda distribution {dist!r}")


def lambda_values(dist: LambdaDistribution, rng: np.random.Generator, n: int) -> np.ndarray:
    """Vector of n raw lambda values (angles, or atom indices for discrete)."""
    u = rng.random(n)
    if isinstance(dist, UniformContinuous):
        return u * np.pi
    if isinstance(dist, DiscreteWeights):
        idx = np.searchsorted(dist.cumulative(), u, side="right")
        return np.minimum(idx, len(dist.weights) - 1)
    raise TypeError(f"unknown lambda distribution {dist!r}")


# --------------------------------------------------------------------------
# model families

@dataclass(frozen=True)
class FactorizedModel:
    """Outcome values A(a, lam), B(b, lam) in [-1, 1] with no cross talk.

    The callables receive the setting in radians and raw lambda values (a
    float array for continuous distributions, an index array for discrete
    ones); scalar-only callables are accepted and evaluated elementwise.
    """

    distribution: LambdaDistribution
    outcome_a: Callable
    outcome_b: Callable


@dataclass(frozen=True)
class ConditionalModel:
    """Conditional decomposition: P(B=+1 | b, lam) and P(A=+1 | a, b, B, lam)."""

    distribution: LambdaDistribution
    prob_b: Callable
    prob_a_given_b: Callable


@dataclass(frozen=True)
class TrialAtom:
    """One deterministic trial: a distinct lambda id plus +-1 outcome tables."""

    lambda_id: int
    outcome_a: Callable[[float], int]
    outcome_b: Callable[[float], int]


@dataclass(frozen=True)
class AtomizedModel:
    """Equal-weight collection of deterministic trial atoms."""

    atoms: tuple[TrialAtom, ...]

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    @property
    def weight(self) -> Fraction:
        return Fraction(1, len(self.atoms))


LhvModel = Union[FactorizedModel, ConditionalModel, AtomizedModel]


def _sign_pm1(x: np.ndarray) -> np.ndarray:
    # sgn with the measure-zero tie at 0 fixed to +1 for determinism
    return np.where(np.asarray(x) >= 0.0, 1.0, -1.0)


def make_factorized_sign(orientation_offset: Angle | float = 0.0) -> FactorizedModel:
    """Deterministic sign model over a uniform shared polarization angle.

    A(a, lam) = sgn(cos 2(a - lam)), B(b, lam) = -sgn(cos 2(b - lam)), so the
    two sides agree in sign exactly when both settings fall in the same
    half-wave sector around lam; the B-side flip makes E(a,a) = -1. The
    orientation offset rotates the reference frame of both detectors.
    """
    off = as_radians(orientation_offset)

    def outcome_a(a, lam):
        return _sign_pm1(np.cos(2.0 * (as_radians(a) - off - np.asarray(lam))))

    def outcome_b(b, lam):
        return -_sign_pm1(np.cos(2.0 * (as_radians(b) - off - np.asarray(lam))))

    return FactorizedModel(UniformContinuous(), outcome_a, outcome_b)


def make_conditional_malus() -> ConditionalModel:
    """Malus-law conditional kernel over a uniform shared polarization angle.

    The B station registers +1 with probability cos^2(b - lam). Conditioned on
    that registration, the A station sees a photon polarized along b (outcome
    +1 with probability cos^2(a - b)) or orthogonal to it (sin^2(a - b)).
    Integrating out lambda gives joint(+1,+1) = cos^2(a-b)/2 and
    E(a,b) = cos 2(a-b), the quantum curve of a parallel-correlated pair.
    """

    def prob_b(b, lam):
        return np.cos(as_radians(b) - np.asarray(lam)) ** 2

    def prob_a_given_b(a, b, side_b, lam):
        delta = as_radians(a) - as_radians(b)
        if side_b == 1:
            p = np.cos(delta) ** 2
        elif side_b == -1:
            p = np.sin(delta) ** 2
        else:
            raise ValueError(f"side_b must be +1 or -1, got {side_b!r}")
        return np.broadcast_to(p, np.shape(lam)) if np.ndim(lam) else p

    return ConditionalModel(UniformContinuous(), prob_b, prob_a_given_b)


def make_atomized(trials: Sequence[TrialAtom]) -> AtomizedModel:
    """Build an equal-weight atomized model from per-trial specs.

    Lambda ids must be pairwise distinct: every trial carries its own
    hidden-variable value.
    """
    atoms = tuple(trials)
    if not atoms:
        raise ValueError("an atomized model needs at least one trial")
    ids = [t.lambda_id for t in atoms]
    if len(set(ids)) != len(ids):
        raise ValueError("lambda ids must be distinct across trials")
    return AtomizedModel(atoms)


def _hashed_outcome(seed: int, atom: int, side: str, angle: float) -> int:
    key = f"{seed}:{atom}:{side}:{normalize_angle(angle)!r}".encode()
    return 1 if hashlib.sha256(key).digest()[0] % 2 == 0 else -1


def random_atomized(n_atoms: int, seed: int) -> AtomizedModel:
    """Atomized model with reproducible pseudo-random +-1 outcome tables."""
    if n_atoms < 1:
        raise ValueError("n_atoms must be positive")
    atoms = [
        TrialAtom(
            lambda_id=i,
            outcome_a=partial(_hashed_outcome, seed, i, "a"),
            outcome_b=partial(_hashed_outcome, seed, i, "b"),
        )
        for i in range(n_atoms)
    ]
    return make_atomized(atoms)


def _constant(value: int, _angle: float) -> int:
    return value


def constant_atom(lambda_id: int, side_a: int, side_b: int) -> TrialAtom:
    """Trial atom whose outcomes ignore the settings."""
    if side_a not in (1, -1) or side_b not in (1, -1):
        raise ValueError("atom outcomes must be +1 or -1")
    return TrialAtom(lambda_id, partial(_constant, side_a), partial(_constant, side_b))


def atom_outcomes(model: AtomizedModel, side: str, angle: Angle | float) -> np.ndarray:
    """Evaluate one side's outcome table at a setting, over all atoms."""
    r = as_radians(angle)
    if side == "a":
        vals = [t.outcome_a(r) for t in model.atoms]
    elif side == "b":
        vals = [t.outcome_b(r) for t in model.atoms]
    else:
        raise ValueError(f"side must be 'a' or 'b', got {side!r}")
    out = np.asarray(vals, dtype=np.int64)
    if not np.all(np.abs(out) == 1):
        raise ValueError("atom outcome tables must return exactly +1 or -1")
    return out


# --------------------------------------------------------------------------
# evaluation helpers

def eval_over_lambdas(fn: Callable, args: tuple, lams: np.ndarray) -> np.ndarray:
    """Evaluate fn(*args, lam) over a lambda vector, tolerating scalar-only fns."""
    try:
        vals = np.asarray(fn(*args, lams), dtype=float)
    except (TypeError, ValueError):
        return np.array([float(fn(*args, lam)) for lam in lams], dtype=float)
    if vals.shape == np.shape(lams):
        return vals
    if vals.ndim == 0:
        return np.full(np.shape(lams), float(vals))
    return np.array([float(fn(*args, lam)) for lam in lams], dtype=float)


def _check_probs(p: np.ndarray, what: str) -> np.ndarray:
    if np.any(p < -WEIGHT_TOL) or np.any(p > 1.0 + WEIGHT_TOL):
        raise ValueError(f"{what} outside [0, 1]: range "
                         f"[{float(np.min(p))!r}, {float(np.max(p))!r}]")
    return np.clip(p, 0.0, 1.0)


def midpoint_grid(points: int) -> np.ndarray:
    """Midpoints of a uniform partition of [0, pi)."""
    if points < MIN_QUADRATURE_POINTS:
        raise ValueError(
            f"quadrature grid must have at least {MIN_QUADRATURE_POINTS} points"
        )
    return (np.arange(points) + 0.5) * (np.pi / points)


def _conditional_product_mean(
    model: ConditionalModel, a: float, b: float, lams: np.ndarray
) -> np.ndarray:
    """E[A*B | lam] for each lambda, from the two conditional stages."""
    p_b = _check_probs(eval_over_lambdas(model.prob_b, (b,), lams), "P(B|lam)")
    p_plus = _check_probs(
        eval_over_lambdas(model.prob_a_given_b, (a, b, 1), lams), "P(A|B=+1)"
    )
    p_minus = _check_probs(
        eval_over_lambdas(model.prob_a_given_b, (a, b, -1), lams), "P(A|B=-1)"
    )
    # E[A|B=+1] = 2 p_plus - 1 and E[A|B=-1] = 2 p_minus - 1
    return p_b * (2.0 * p_plus - 1.0) - (1.0 - p_b) * (2.0 * p_minus - 1.0)


def atomized_correlation_exact(
    model: AtomizedModel, a: Angle | float, b: Angle | float
) -> Fraction:
    """Exact rational correlation (1/N) sum_n A_n(a) B_n(b)."""
    prod = atom_outcomes(model, "a", a) * atom_outcomes(model, "b", b)
    return Fraction(int(prod.sum()), model.n_atoms)


def correlation_lhv(
    model: LhvModel,
    a: Angle | float,
    b: Angle | float,
    points: int = DEFAULT_QUADRATURE_POINTS,
) -> float:
    """Deterministic correlation E(a,b) of a hidden-variable model.

    Continuous-lambda models use a composite midpoint rule with the given
    grid size; discrete and atomized models are summed exactly.
    """
    ra, rb = as_radians(a), as_radians(b)
    if isinstance(model, AtomizedModel):
        return float(atomized_correlation_exact(model, ra, rb))
    if isinstance(model, FactorizedModel):
        if isinstance(model.distribution, DiscreteWeights):
            idx = np.arange(len(model.distribution.weights))
            va = eval_over_lambdas(model.outcome_a, (ra,), idx)
            vb = eval_over_lambdas(model.outcome_b, (rb,), idx)
            return float(np.sum(np.asarray(model.distribution.weights) * va * vb))
        lams = midpoint_grid(points)
        va = eval_over_lambdas(model.outcome_a, (ra,), lams)
        vb = eval_over_lambdas(model.outcome_b, (rb,), lams)
        return float(np.mean(va * vb))
    if isinstance(model, ConditionalModel):
        if isinstance(model.distribution, DiscreteWeights):
            idx = np.arange(len(model.distribution.weights))
            vals = _conditional_product_mean(model, ra, rb, idx)
            return float(np.sum(np.asarray(model.distribution.weights) * vals))
        lams = midpoint_grid(points)
        return float(np.mean(_conditional_product_mean(model, ra, rb, lams)))
    raise TypeError(f"unknown model type {type(model).__name__}")


def joint_prob_lhv(
    model: LhvModel,
    a: Angle | float,
    b: Angle | float,
    outcome: tuple[int, int],
    points: int = DEFAULT_QUADRATURE_POINTS,
) -> float:
    """Joint probability of one (+-1, +-1) outcome pair under a model."""
    sa, sb = outcome
    if sa not in (1, -1) or sb not in (1, -1):
        raise ValueError(f"outcome must be a pair of +-1, got {outcome!r}")
    ra, rb = as_radians(a), as_radians(b)
    if isinstance(model, AtomizedModel):
        hits = (atom_outcomes(model, "a", ra) == sa) & (atom_outcomes(model, "b", rb) == sb)
        return float(Fraction(int(hits.sum()), model.n_atoms))
    if isinstance(model, FactorizedModel):
        if isinstance(model.distribution, DiscreteWeights):
            lams = np.arange(len(model.distribution.weights))
            weights = np.asarray(model.distribution.weights)
        else:
            lams = midpoint_grid(points)
            weights = np.full(len(lams), 1.0 / len(lams))
        va = eval_over_lambdas(model.outcome_a, (ra,), lams)
        vb = eval_over_lambdas(model.outcome_b, (rb,), lams)
        # independent Bernoulli signs with means va, vb at fixed lambda
        p = ((1.0 + sa * va) / 2.0) * ((1.0 + sb * vb) / 2.0)
        return float(np.sum(weights * p))
    if isinstance(model, ConditionalModel):
        if isinstance(model.distribution, DiscreteWeights):
            lams = np.arange(len(model.distribution.weights))
            weights = np.asarray(model.distribution.weights)
        else:
            lams = midpoint_grid(points)
            weights = np.full(len(lams), 1.0 / len(lams))
        p_b = _check_probs(eval_over_lambdas(model.prob_b, (rb,), lams), "P(B|lam)")
        p_b_side = p_b if sb == 1 else 1.0 - p_b
        p_a_plus = _check_probs(
            eval_over_lambdas(model.prob_a_given_b, (ra, rb, sb), lams), "P(A|B)"
        )
        p_a_side = p_a_plus if sa == 1 else 1.0 - p_a_plus
        return float(np.sum(weights * p_b_side * p_a_side))
    raise TypeError(f"unknown model type {type(model).__name__}")
