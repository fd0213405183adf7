"""belllab: a desk-scale simulation laboratory for EPR/Bell-test statistics.

Quantum two-photon polarization predictions, local hidden-variable model
families (factorized, conditional, atomized), a reproducible Monte Carlo
trial engine, machine checks of the CHSH derivation chain, and the coupled
harmonic oscillators whose normal modes started the whole story.
"""

from .angles import Angle, as_radians, normalize_angle
from .backend import BACKEND, COMPILED_AVAILABLE
from .estimator import (
    CANONICAL_QUADRUPLE,
    ChshQuadruple,
    ChshResult,
    CorrelationEstimate,
    MaximizeResult,
    OutcomeCounts,
    ScanPoint,
    TrialRecord,
    chsh,
    estimate_correlation,
    estimate_from_counts,
    lhv_correlation,
    maximize_chsh,
    mc_correlation,
    qm_correlation,
    run_trials,
    scan_correlation,
    simulate_tally,
)
from .hvmodels import (
    AtomizedModel,
    AtomLambda,
    ConditionalModel,
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
from .oscillator import (
    NormalModeState,
    OscillatorParams,
    PhaseState,
    QuantumLevel,
    Trajectory,
    energy_level,
    estimate_exchange_period,
    from_normal_modes,
    hamiltonian,
    hamiltonian_normal,
    integrate_classical,
    normal_frequencies,
    spectrum,
    to_normal_modes,
)
from .quantum import (
    NullStateError,
    ProductCheck,
    TwoPhotonState,
    basis_state,
    coincidence_prob,
    correlation_qm,
    is_product,
    make_parallel,
    make_singlet,
    marginal_expectations,
    outcome_probabilities,
    superpose,
)

__version__ = "0.1.0"
