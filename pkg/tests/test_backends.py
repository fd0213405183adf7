"""The compiled kernels and the numpy fallback must agree bit for bit."""

import math

import numpy as np
import pytest

import belllab
from belllab import _core_py
from belllab.backend import COMPILED_AVAILABLE, select_backend

compiled = pytest.importorskip("belllab._core") if COMPILED_AVAILABLE else None
needs_compiled = pytest.mark.skipif(
    not COMPILED_AVAILABLE, reason="compiled kernels not built"
)


def test_select_backend_python_always_available():
    mod, name = select_backend("python")
    assert mod is _core_py
    assert name == "python"


def test_select_backend_rejects_unknown_names():
    with pytest.raises(ValueError):
        select_backend("fortran")


def test_default_backend_is_reported():
    assert belllab.BACKEND in ("compiled", "python")


@needs_compiled
def test_threshold_kernels_bit_identical():
    rng = np.random.default_rng(55)
    n = 100_000
    x = rng.uniform(-1, 1, n)
    p, u = rng.random(n), rng.random(n)
    assert np.array_equal(compiled.signs_pm1(x), _core_py.signs_pm1(x))
    assert np.array_equal(compiled.bernoulli_pm1(p, u), _core_py.bernoulli_pm1(p, u))
    pb, ub, pp, pm, ua = (rng.random(n) for _ in range(5))
    a1, b1 = compiled.conditional_outcomes(pb, ub, pp, pm, ua)
    a2, b2 = _core_py.conditional_outcomes(pb, ub, pp, pm, ua)
    assert np.array_equal(a1, a2) and np.array_equal(b1, b2)
    qa1, qb1 = compiled.four_outcome_pairs(0.25, 0.5, 0.75, u)
    qa2, qb2 = _core_py.four_outcome_pairs(0.25, 0.5, 0.75, u)
    assert np.array_equal(qa1, qa2) and np.array_equal(qb1, qb2)
    assert compiled.pair_counts(a1, b1) == _core_py.pair_counts(a1, b1)
    assert compiled.product_sum(a1, b1) == _core_py.product_sum(a1, b1)


@needs_compiled
def test_threshold_boundaries_match():
    # exact threshold hits: u == p goes to -1, x == 0 goes to +1 on both paths
    p = np.array([0.5, 0.5, 1.0, 0.0])
    u = np.array([0.5, 0.49, 0.999999, 0.0])
    assert np.array_equal(compiled.bernoulli_pm1(p, u), _core_py.bernoulli_pm1(p, u))
    x = np.array([0.0, -0.0, 1e-300, -1e-300])
    assert np.array_equal(compiled.signs_pm1(x), _core_py.signs_pm1(x))
    assert compiled.signs_pm1(x)[0] == 1  # tie at zero is +1


@needs_compiled
def test_leapfrog_bit_identical():
    t1 = compiled.leapfrog_trajectory(1.3, 0.9, 0.07, 1.0, -0.2, 0.1, 0.0, 0.009, 20_000)
    t2 = _core_py.leapfrog_trajectory(1.3, 0.9, 0.07, 1.0, -0.2, 0.1, 0.0, 0.009, 20_000)
    for u1, u2 in zip(t1, t2):
        assert np.array_equal(u1, u2)


@needs_compiled
def test_max_abs_form_bit_identical():
    rng = np.random.default_rng(77)
    for m in (3, 8, 24):
        e = np.ascontiguousarray(rng.uniform(-1, 1, (m, m)))
        assert compiled.max_abs_form(e) == _core_py.max_abs_form(e)


@needs_compiled
def test_trial_streams_identical_across_backends(monkeypatch):
    from belllab import estimator

    model = belllab.make_conditional_malus()
    args = (model, 0.2, 0.9, 50_000)
    with_compiled = estimator.simulate_tally(*args, seed=5, partitions=3)
    monkeypatch.setattr(estimator, "kernels", _core_py)
    with_python = estimator.simulate_tally(*args, seed=5, partitions=3)
    assert with_compiled == with_python

    singlet = belllab.make_singlet()
    mc_py = estimator.mc_correlation(singlet, 100_000, seed=8)(0.0, math.pi / 8)
    monkeypatch.undo()
    mc_c = estimator.mc_correlation(singlet, 100_000, seed=8)(0.0, math.pi / 8)
    assert mc_py == mc_c
