"""Monte Carlo trial engine, correlation estimates and the CHSH statistic.

Trial streams are reproducible: a run is defined by (seed, partition count),
each partition derives its own counter-based substream keyed on the seed, the
pair of settings and the partition index, and partitions are always reduced in
index order. The number of worker threads used to evaluate partitions is an
execution detail that never changes the results.

Two CHSH combinations are assembled from the four pair correlations: the
absolute form |E(a,b) - E(a,b')| + |E(a',b') + E(a',b)| and the signed sum
E(a,b) - E(a,b') + E(a',b) + E(a',b'). Factorized local models keep the
absolute form at or below 2; the quantum singlet reaches 2*sqrt(2).
"""

from __future__ import annotations

import hashlib
import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import hvmodels
from .angles import Angle, as_radians
from .backend import kernels
from .hvmodels import (
    AtomizedModel,
    AtomLambda,
    ConditionalModel,
    ContinuousLambda,
    DiscreteWeights,
    FactorizedModel,
    HiddenVariable,
    UniformContinuous,
)
from .quantum import TwoPhotonState, correlation_qm, outcome_probabilities

__all__ = [
    "TrialRecord",
    "OutcomeCounts",
    "CorrelationEstimate",
    "ChshQuadruple",
    "ChshResult",
    "ScanPoint",
    "MaximizeResult",
    "CANONICAL_QUADRUPLE",
    "run_trials",
    "simulate_tally",
    "estimate_correlation",
    "estimate_from_counts",
    "qm_correlation",
    "lhv_correlation",
    "mc_correlation",
    "chsh",
    "scan_correlation",
    "maximize_chsh",
]

MAX_GRID_QUADRUPLES = 10**8


@dataclass(frozen=True)
class TrialRecord:
    """One simulated coincidence event."""

    index: int
    a: float
    b: float
    lam: HiddenVariable | None
    side_a: int
    side_b: int


@dataclass(frozen=True)
class OutcomeCounts:
    """Tally of the four +-1 outcome pairs of a run at fixed settings."""

    pp: int
    pm: int
    mp: int
    mm: int

    @property
    def total(self) -> int:
        return self.pp + self.pm + self.mp + self.mm

    @property
    def product_total(self) -> int:
        return self.pp + self.mm - self.pm - self.mp


@dataclass(frozen=True)
class CorrelationEstimate:
    """Sample mean of +-1 outcome products with its standard error."""

    mean: float
    stderr: float
    count: int

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError("an estimate needs at least one trial")
        if abs(self.mean) > 1.0:
            raise ValueError(f"mean of +-1 products cannot exceed 1, got {self.mean!r}")


@dataclass(frozen=True)
class ChshQuadruple:
    """The four polarizer settings (a, a', b, b') of one CHSH statistic."""

    a: float
    a_prime: float
    b: float
    b_prime: float

    def __post_init__(self) -> None:
        for name in ("a", "a_prime", "b", "b_prime"):
            object.__setattr__(self, name, as_radians(getattr(self, name)))

    def pairs(self) -> tuple[tuple[float, float], ...]:
        """Setting pairs in the order (a,b), (a,b'), (a',b), (a',b')."""
        return (
            (self.a, self.b),
            (self.a, self.b_prime),
            (self.a_prime, self.b),
            (self.a_prime, self.b_prime),
        )


#: Settings at which the singlet's absolute CHSH form attains 2*sqrt(2).
CANONICAL_QUADRUPLE = ChshQuadruple(0.0, math.pi / 4, math.pi / 8, 3 * math.pi / 8)


@dataclass(frozen=True)
class ChshResult:
    quadruple: ChshQuadruple
    correlations: dict
    abs_form: float
    signed_form: float
    combined_stderr: float | None = None
    pair_stderrs: dict | None = None


@dataclass(frozen=True)
class ScanPoint:
    delta: float
    value: float
    stderr: float | None


@dataclass(frozen=True)
class MaximizeResult:
    quadruple: ChshQuadruple
    value: float
    grid_step: float
    grid_size: int


# --------------------------------------------------------------------------
# seeded streams

def _pair_key(a: float, b: float) -> tuple[int, ...]:
    """Stable 128-bit stream key for one pair of settings."""
    digest = hashlib.sha256(struct.pack("<dd", a, b)).digest()
    return struct.unpack("<4I", digest[:16])


def _pair_rng(seed: int, a: float, b: float, partition: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=_pair_key(a, b) + (partition,))
    return np.random.Generator(np.random.PCG64(ss))


def _partition_sizes(n: int, partitions: int) -> list[int]:
    base, extra = divmod(n, partitions)
    return [base + (1 if i < extra else 0) for i in range(partitions)]


# --------------------------------------------------------------------------
# trial generation

def _factorized_values(fn, angle: float, lams: np.ndarray, side: str) -> np.ndarray:
    vals = hvmodels.eval_over_lambdas(fn, (angle,), lams)
    if vals.size and float(np.max(np.abs(vals))) > 1.0 + 1e-9:
        raise ValueError(f"outcome {side} leaves [-1, 1]; not a valid local model")
    return np.clip(vals, -1.0, 1.0)


def _simulate_partition(model, a: float, b: float, n: int, rng: np.random.Generator):
    """Outcomes for one partition. Draw order per family is fixed for
    reproducibility: lambda first, then the A-side and B-side uniforms."""
    if isinstance(model, TwoPhotonState):
        p = outcome_probabilities(model, a, b)
        c1, c2, c3 = float(p[0]), float(p[0] + p[1]), float(p[0] + p[1] + p[2])
        a_out, b_out = kernels.four_outcome_pairs(c1, c2, c3, rng.random(n))
        return None, a_out, b_out
    if isinstance(model, FactorizedModel):
        lams = hvmodels.lambda_values(model.distribution, rng, n)
        u_a = rng.random(n)
        u_b = rng.random(n)
        va = _factorized_values(model.outcome_a, a, lams, "A")
        vb = _factorized_values(model.outcome_b, b, lams, "B")
        a_out = kernels.bernoulli_pm1((1.0 + va) / 2.0, u_a)
        b_out = kernels.bernoulli_pm1((1.0 + vb) / 2.0, u_b)
        return lams, a_out, b_out
    if isinstance(model, ConditionalModel):
        lams = hvmodels.lambda_values(model.distribution, rng, n)
        u_b = rng.random(n)
        u_a = rng.random(n)
        p_b = np.ascontiguousarray(
            hvmodels.eval_over_lambdas(model.prob_b, (b,), lams)
        )
        p_plus = np.ascontiguousarray(
            hvmodels.eval_over_lambdas(model.prob_a_given_b, (a, b, 1), lams)
        )
        p_minus = np.ascontiguousarray(
            hvmodels.eval_over_lambdas(model.prob_a_given_b, (a, b, -1), lams)
        )
        a_out, b_out = kernels.conditional_outcomes(p_b, u_b, p_plus, p_minus, u_a)
        return lams, a_out, b_out
    if isinstance(model, AtomizedModel):
        u = rng.random(n)
        idx = np.minimum((u * model.n_atoms).astype(np.int64), model.n_atoms - 1)
        table_a = hvmodels.atom_outcomes(model, "a", a).astype(np.int8)
        table_b = hvmodels.atom_outcomes(model, "b", b).astype(np.int8)
        return idx, table_a[idx], table_b[idx]
    raise TypeError(f"cannot simulate trials for {type(model).__name__}")


def simulate_outcomes(
    model,
    a: Angle | float,
    b: Angle | float,
    n: int,
    seed: int,
    partitions: int = 1,
    workers: int = 1,
):
    """Full outcome arrays (lambda values or None, A, B) for a seeded run."""
    if n < 1:
        raise ValueError("trial count must be at least 1")
    if partitions < 1:
        raise ValueError("partition count must be at least 1")
    ra, rb = as_radians(a), as_radians(b)
    sizes = _partition_sizes(n, partitions)

    def one(i: int):
        return _simulate_partition(model, ra, rb, sizes[i], _pair_rng(seed, ra, rb, i))

    live = [i for i in range(partitions) if sizes[i] > 0]
    if workers > 1 and len(live) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = dict(zip(live, pool.map(one, live)))
    else:
        parts = {i: one(i) for i in live}
    chunks = [parts[i] for i in sorted(parts)]  # reduce in partition order
    lam = None
    if chunks and chunks[0][0] is not None:
        lam = np.concatenate([c[0] for c in chunks])
    a_out = np.concatenate([c[1] for c in chunks])
    b_out = np.concatenate([c[2] for c in chunks])
    return lam, a_out, b_out


def _wrap_lambda(model, raw) -> HiddenVariable:
    if isinstance(model, AtomizedModel):
        return AtomLambda(int(raw))
    dist = model.distribution
    if isinstance(dist, UniformContinuous):
        return ContinuousLambda(float(raw))
    if isinstance(dist, DiscreteWeights):
        return AtomLambda(int(raw))
    raise TypeError(f"unknown lambda distribution {dist!r}")


def run_trials(
    model,
    a: Angle | float,
    b: Angle | float,
    n: int,
    seed: int,
    partitions: int = 1,
    workers: int = 1,
) -> list[TrialRecord]:
    """Materialized trial records for a seeded run at one pair of settings.

    Intended for modest n; use simulate_tally or mc_correlation when only the
    aggregate statistics of a large run are needed.
    """
    ra, rb = as_radians(a), as_radians(b)
    lam, a_out, b_out = simulate_outcomes(model, ra, rb, n, seed, partitions, workers)
    records = []
    for i in range(n):
        hv = None if lam is None else _wrap_lambda(model, lam[i])
        records.append(TrialRecord(i, ra, rb, hv, int(a_out[i]), int(b_out[i])))
    return records


def simulate_tally(
    model,
    a: Angle | float,
    b: Angle | float,
    n: int,
    seed: int,
    partitions: int = 1,
    workers: int = 1,
) -> OutcomeCounts:
    """Outcome-pair counts of a seeded run, without materializing records."""
    _, a_out, b_out = simulate_outcomes(model, a, b, n, seed, partitions, workers)
    pp, pm, mp, mm = kernels.pair_counts(a_out, b_out)
    return OutcomeCounts(pp, pm, mp, mm)


# --------------------------------------------------------------------------
# estimation

def _estimate(product_total: int, n: int) -> CorrelationEstimate:
    mean = product_total / n
    stderr = math.sqrt(max(1.0 - mean * mean, 0.0) / n)
    return CorrelationEstimate(mean, stderr, n)


def estimate_correlation(records: Sequence[TrialRecord]) -> CorrelationEstimate:
    """Correlation estimate from trial records taken at one pair of settings."""
    if not records:
        raise ValueError("cannot estimate a correlation from zero trials")
    a0, b0 = records[0].a, records[0].b
    if any(r.a != a0 or r.b != b0 for r in records):
        raise ValueError("records mix different settings; estimate them separately")
    total = sum(r.side_a * r.side_b for r in records)
    return _estimate(total, len(records))


def estimate_from_counts(counts: OutcomeCounts) -> CorrelationEstimate:
    if counts.total < 1:
        raise ValueError("cannot estimate a correlation from zero trials")
    return _estimate(counts.product_total, counts.total)


# --------------------------------------------------------------------------
# correlation providers

def qm_correlation(state: TwoPhotonState) -> Callable[[float, float], float]:
    """Exact Born-rule correlation of a two-photon state as a pair function."""
    return lambda a, b: correlation_qm(state, a, b)


def lhv_correlation(model, points: int = hvmodels.DEFAULT_QUADRATURE_POINTS):
    """Deterministic hidden-variable correlation as a pair function."""
    return lambda a, b: hvmodels.correlation_lhv(model, a, b, points=points)


def mc_correlation(
    model,
    n: int,
    seed: int,
    partitions: int = 1,
    workers: int = 1,
) -> Callable[[float, float], CorrelationEstimate]:
    """Monte Carlo estimator as a pair function returning CorrelationEstimate."""

    def estimate(a, b):
        return estimate_from_counts(
            simulate_tally(model, a, b, n, seed, partitions, workers)
        )

    return estimate


# --------------------------------------------------------------------------
# CHSH assembly

def _mean_and_stderr(value) -> tuple[float, float | None]:
    if isinstance(value, CorrelationEstimate):
        return value.mean, value.stderr
    return float(value), None


def chsh(correlation_fn: Callable, quadruple: ChshQuadruple) -> ChshResult:
    """Both CHSH combinations of the four pair correlations of a quadruple.

    correlation_fn may return plain floats or CorrelationEstimate values; in
    the latter case the standard errors are combined in quadrature.
    """
    names = ("ab", "ab_prime", "a_prime_b", "a_prime_b_prime")
    means = {}
    errs = {}
    for name, (sa, sb) in zip(names, quadruple.pairs()):
        mean, err = _mean_and_stderr(correlation_fn(sa, sb))
        means[name] = mean
        errs[name] = err
    abs_form = abs(means["ab"] - means["ab_prime"]) + abs(
        means["a_prime_b_prime"] + means["a_prime_b"]
    )
    signed_form = (
        means["ab"] - means["ab_prime"] + means["a_prime_b"] + means["a_prime_b_prime"]
    )
    have_errs = all(errs[name] is not None for name in names)
    combined = (
        math.sqrt(sum(errs[name] ** 2 for name in names)) if have_errs else None
    )
    return ChshResult(
        quadruple=quadruple,
        correlations=means,
        abs_form=abs_form,
        signed_form=signed_form,
        combined_stderr=combined,
        pair_stderrs=dict(errs) if have_errs else None,
    )


def scan_correlation(correlation_fn: Callable, deltas: Sequence[float]) -> list[ScanPoint]:
    """Correlation curve E(0, delta) over a grid of setting differences."""
    if len(deltas) == 0:
        raise ValueError("the delta grid must not be empty")
    points = []
    for delta in deltas:
        mean, err = _mean_and_stderr(correlation_fn(0.0, float(delta)))
        points.append(ScanPoint(float(delta), mean, err))
    return points


def maximize_chsh(
    correlation_fn: Callable,
    grid_step: float,
    max_quadruples: int = MAX_GRID_QUADRUPLES,
) -> MaximizeResult:
    """Exhaustive maximum of the absolute CHSH form over a setting grid.

    grid_step must divide pi evenly; all four settings range over the same
    grid. Ties are broken toward the lexicographically first (a, a', b, b').
    """
    step = float(grid_step)
    if step <= 0:
        raise ValueError("grid step must be positive")
    m = round(math.pi / step)
    if m < 1 or abs(m * step - math.pi) > 1e-9:
        raise ValueError(f"grid step {step!r} does not divide pi evenly")
    if m**4 > max_quadruples:
        raise ValueError(
            f"grid of {m}^4 quadruples exceeds the resource bound {max_quadruples}"
        )
    angles = np.arange(m) * step
    corr = np.empty((m, m))
    for i, sa in enumerate(angles):
        for j, sb in enumerate(angles):
            mean, _ = _mean_and_stderr(correlation_fn(float(sa), float(sb)))
            corr[i, j] = mean
    value, (ia, iap, ib, ibp) = kernels.max_abs_form(corr)
    quadruple = ChshQuadruple(
        float(angles[ia]), float(angles[iap]), float(angles[ib]), float(angles[ibp])
    )
    return MaximizeResult(quadruple, float(value), step, m)
