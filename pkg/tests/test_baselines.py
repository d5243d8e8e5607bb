import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from fracsplit.baselines import (DinkelbachConfig, dinkelbach_run, dinkelbach_subproblem, divergence_harness,
                                 min_norm_dual, sart_run, subproblem_objective)
from fracsplit.core import objective_F
from fracsplit.problems import make_ct_instance, make_quadratic_over_abs, make_sharp_ratio


def test_sart_solves_consistent_system():
    rng = np.random.default_rng(0)
    P = rng.uniform(0.1, 1.0, size=(12, 5))
    x_true = rng.uniform(0.2, 0.8, size=5)
    x, res = sart_run(P, P @ x_true, np.zeros(5), 3000, history=True)
    assert_allclose(x, x_true, atol=1e-6)
    assert res[-1] < 1e-3 * res[0]
    assert res.size == 3001


def test_sart_respects_bounds_and_shapes():
    inst = make_ct_instance(16, 45)
    x = sart_run(inst.projector, inst.measurements * 10, np.zeros(256), 5)
    assert x.min() >= 0.0 and x.max() <= 1.0
    with pytest.raises(ValueError):
        sart_run(inst.projector, inst.measurements, np.zeros(10), 1)
    with pytest.raises(ValueError):
        sart_run(inst.projector, inst.measurements, np.zeros(256), 0)


def test_divergence_harness_cycles_exactly():
    trace = divergence_harness(10)
    xs = [it[0] for it in trace.iterates]
    assert_array_equal(xs[0], [0.0, 1.0])
    for k in range(1, 11):
        assert_array_equal(xs[k], [1.0, 0.0] if k % 2 else [0.0, 1.0])
        assert_array_equal(trace.iterates[k][1], [1.0, 1.0])
    assert_array_equal(trace.column("theta"), np.ones(10))
    assert_array_equal(min_norm_dual(np.array([2.0, 0.0, -1.0])), [1.0, 0.0, -1.0])
    with pytest.raises(ValueError):
        divergence_harness(1)


def test_dinkelbach_finds_one_dimensional_minimum():
    # min (x^2 + 1) / (|x| + 1) on [-1, 1] is 2 sqrt 2 - 2 at |x| = sqrt 2 - 1
    p = make_quadratic_over_abs()
    x, trace, rep = dinkelbach_run(p, DinkelbachConfig(tol=1e-12, value_tol=1e-14, inner_budget=2000),
                                   np.array([0.9]))
    assert_allclose(rep.objective, 2 * np.sqrt(2) - 2, atol=1e-9)
    assert_allclose(abs(x[0]), np.sqrt(2) - 1, atol=1e-4)
    assert trace.method == "dinkelbach"
    assert np.all(np.diff(trace.column("theta")) <= 1e-12)


def test_dinkelbach_subproblem_never_increases():
    p = make_sharp_ratio(20, 3, 4, seed=0)
    x0 = np.full(20, 0.05)
    c = objective_F(p, x0)
    x, vals = dinkelbach_subproblem(p, c, x0, budget=50, history=True)
    assert np.all(np.diff(vals) <= 0)
    assert_allclose(vals[-1], subproblem_objective(p, c, x))
    assert vals[0] == pytest.approx(0.0, abs=1e-12)


def test_dinkelbach_config_validation():
    with pytest.raises(ValueError, match="eta"):
        DinkelbachConfig(eta=1.0)
    with pytest.raises(ValueError):
        dinkelbach_run(make_quadratic_over_abs(), x0=np.array([3.0]))
