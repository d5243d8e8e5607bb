import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from fracsplit.core import Box, FractionalProblem, IdentityOperator, L1Norm, L2Norm, QuadraticForm, ZeroFunction
from fracsplit.problems import make_sharp_ratio, make_toy_recovery
from fracsplit.solvers import (FspsConfig, IterationTrace, SolverState, ThetaBacktrackExhausted, adaptive_fsps_run,
                               default_dual_start, delta_rule, descent_check, fenchel_check, fsps_run, fsps_step,
                               gamma_merit_check, merit_consistency_check, merit_gamma, merit_pi, nls_run,
                               nls_staged_run, psi, stopping_check, theta_monotone_check, window_decrease_check)
from fracsplit.solvers.trace import TRACE_COLUMNS

TOY_ADAPTIVE = dict(beta=1.0, nu=2.5, q=0.9999, theta0=0.8053, eps=1e-2, tol=1e-10, max_iter=2000)


# ---------------------------------------------------------------- config

def test_config_diagnostics_list_every_violation():
    diags = FspsConfig.diagnose({"beta": 2.5, "q": 1.0, "stop_rule": "often", "colour": 1})
    text = " ".join(diags)
    assert "(0, 2)" in text and "q=1.0" in text and "stop_rule" in text and "colour" in text
    with pytest.raises(ValueError):
        FspsConfig(beta=0.0)
    assert FspsConfig.diagnose({"beta": 1.9, "q": 0.5}) == []


def test_config_stages_override_fields():
    cfg = FspsConfig(nu=3.0, stages=[{"beta": 1.1, "max_iter": 50}, {"beta": 1.45}])
    first, second = cfg.stage_configs()
    assert (first.beta, first.max_iter, first.nu) == (1.1, 50, 3.0)
    assert second.beta == 1.45 and second.stages == []
    assert "stages[0]" in " ".join(FspsConfig.diagnose({"stages": [{"beta": 3.0}]}))
    assert FspsConfig().stage_configs()[0].beta == 1.0


def test_stopping_rules_hand_values():
    assert stopping_check([1.0, 0.0], [1.0, 0.1], 0.1, "prev")
    assert not stopping_check([1.0, 0.0], [1.0, 0.2], 0.1, "prev")
    # "next" divides by ||x_new|| = 0.5
    assert not stopping_check([0.5, 0.0], [0.5, 0.06], 0.1, "next")
    assert stopping_check([0.5, 0.0], [0.5, 0.04], 0.1, "next")
    assert stopping_check([0.0], [5.0], 0.1, "prev", k=11, max_iter=10)
    with pytest.raises(ValueError):
        stopping_check([0.0], [0.0], 0.1, "sometimes")


# ----------------------------------------------------------------- merit

def _quad_l1():
    # F(x) = (||x||_1 + x^T x + 1) / ||x|| over [-2, 2]^2
    return FractionalProblem(S=Box(-2.0, 2.0, dim=2), A=IdentityOperator(2), K=IdentityOperator(2), g=L1Norm(),
                             f=L2Norm(), h=QuadraticForm(1.0, 1.0))


def test_psi_hand_value():
    p = _quad_l1()
    x, z, u = np.array([1.0, -1.0]), np.array([0.5, -0.5]), np.array([0.0, 0.0])
    # <z, x> - g*(z) + h(x) + delta/2 ||x-u||^2 - gamma/2 ||z||^2 = 1 - 0 + 3 + 2 - 0.25
    assert_allclose(psi(p, x, z, u, delta=2.0, gamma=1.0), 5.75)
    assert_allclose(merit_pi(p, x, z, u, 2.0, 1.0), 5.75 / np.sqrt(2))
    assert psi(p, np.array([3.0, 0.0]), z, u, 2.0, 1.0) == np.inf
    assert psi(p, x, np.array([2.0, 0.0]), u, 2.0, 1.0) == -np.inf
    with pytest.raises(ValueError):
        psi(p, x, z, u, -1.0, 1.0)


@given(st.tuples(*[st.floats(-2, 2) for _ in range(6)]), st.floats(0.1, 10), st.floats(0.01, 1))
def test_gamma_merit_dominates_pi(vals, delta, gamma):
    # <Kx, y> - f*(y) <= f(Kx), so Gamma >= Pi whenever Psi > 0
    p = _quad_l1()
    x, u = np.array(vals[:2]), np.array(vals[2:4])
    z = np.clip(np.array(vals[4:]), -1, 1)
    if np.linalg.norm(x) < 1e-3:
        return
    y = np.array([0.6, 0.8]) if x @ [0.6, 0.8] > 0 else x / np.linalg.norm(x)
    val = psi(p, x, z, u, delta, gamma)
    if val > 0:
        assert merit_gamma(p, x, y, z, u, delta, gamma) >= merit_pi(p, x, z, u, delta, gamma) * (1 - 1e-12)


# ------------------------------------------------------------------ fsps

def test_fsps_step_updates():
    setup = make_toy_recovery()
    p = setup.problem
    st0 = SolverState(x=setup.x0, z=setup.z0, u=setup.u0, theta=setup.theta0, gamma=1.0, delta=10.0)
    new = fsps_step(p, st0, beta=0.5, gamma=1.0, delta=10.0)
    assert p.S.contains(new.x)
    assert_allclose(new.u, 0.5 * setup.u0 + 0.5 * new.x)
    assert_allclose(new.z, p.g.prox_conjugate(p.A.apply(new.x), 1.0))
    assert_allclose(new.theta * p.denominator(new.x), psi(p, new.x, new.z, new.u, 10.0, 1.0), rtol=1e-12)


def test_fsps_run_traces_and_csv(tmp_path):
    setup = make_toy_recovery()
    runs = []
    for _ in range(2):
        _, trace, rep = fsps_run(setup.problem, 1.0, setup.gamma_schedule, setup.delta_schedule, setup.theta0,
                                 setup.x0, setup.z0, setup.u0, max_iter=30, keep_iterates=True)
        path = tmp_path / f"t{len(runs)}.csv"
        trace.to_csv(path, timings=False)
        runs.append(path.read_bytes())
    assert runs[0] == runs[1]
    header = runs[0].decode().splitlines()[0].split(",")
    assert tuple(header) == TRACE_COLUMNS
    assert rep.reason == "max_iter" and rep.iterations == 30 and len(trace.iterates) == 31
    assert merit_consistency_check(trace, setup.problem) == []
    assert fenchel_check(trace, setup.problem) == []
    with pytest.raises(ValueError):
        fsps_run(setup.problem, 2.0, setup.gamma_schedule, setup.delta_schedule, 1.0, setup.x0, setup.z0)


def test_start_outside_set_is_rejected():
    setup = make_toy_recovery()
    with pytest.raises(ValueError):
        fsps_run(setup.problem, 1.0, setup.gamma_schedule, setup.delta_schedule, 1.0, np.array([5.0, 5.0]),
                 setup.z0)


def test_adaptive_toy_invariants():
    setup = make_toy_recovery()
    cfg = FspsConfig(**TOY_ADAPTIVE)
    _, trace, rep = adaptive_fsps_run(setup.problem, cfg, setup.x0, setup.z0, setup.u0, keep_iterates=True)
    assert rep.reason == "tolerance"
    assert np.all(trace.column("theta") > 0)
    assert theta_monotone_check(trace) == []
    assert descent_check(trace, setup.problem, cfg.nu, cfg.beta) == []
    assert gamma_merit_check(trace, setup.problem) == []
    assert fenchel_check(trace, setup.problem) == []
    assert trace.freeze_index() < len(trace)


def test_adaptive_sharp_ratio_invariants():
    p = make_sharp_ratio(30, 3, 5, seed=7)
    cfg = FspsConfig(beta=1.6, nu=20.0, q=0.995, eps=1.0, tol=1e-10, max_iter=300)
    _, trace, _ = adaptive_fsps_run(p, cfg, np.full(30, 1 / 30), keep_iterates=True)
    k0 = trace.freeze_index()
    assert k0 + 5 < len(trace)
    assert theta_monotone_check(trace) == []
    assert descent_check(trace, p, cfg.nu, cfg.beta) == []
    assert gamma_merit_check(trace, p) == []


def test_z_guard_shrinks_gamma():
    setup = make_toy_recovery()
    cfg = FspsConfig(**{**TOY_ADAPTIVE, "eps": 1e-9, "max_iter": 20})
    _, trace, _ = adaptive_fsps_run(setup.problem, cfg, setup.x0, setup.z0, setup.u0)
    assert all(r["flag"] == "z-guard" for r in trace.records)
    g = trace.gammas()
    assert np.all(g[1:] < g[:-1])


def test_theta_backtracking_exhaustion_carries_trace():
    # numerator ||x||_1 + ||x||^2 - 10 is negative near the start for every gamma
    p = FractionalProblem(S=Box(-1.0, 1.0, dim=2), A=IdentityOperator(2), K=IdentityOperator(2), g=L1Norm(),
                          f=L2Norm(), h=QuadraticForm(1.0, -10.0))
    cfg = FspsConfig(theta0=1.0, gamma_backtracks=5, max_iter=5)
    with pytest.raises(ThetaBacktrackExhausted, match="shift_numerator") as info:
        adaptive_fsps_run(p, cfg, np.array([0.5, 0.5]))
    assert isinstance(info.value.trace, IterationTrace)
    assert_allclose(info.value.state.x, [0.5, 0.5])
    with pytest.raises(ThetaBacktrackExhausted):
        nls_run(p, cfg, np.array([0.5, 0.5]))


def test_delta_rule_and_dual_start():
    setup = make_toy_recovery()
    p = setup.problem
    assert_allclose(delta_rule(p, 2.0, 0.5), 4.0 + p.L_h + 2 * p.A_norm ** 2 / 0.5)
    z = default_dual_start(p, setup.x0, 0.5)
    assert_allclose(z, p.g.prox_conjugate(p.A.apply(setup.x0) / 0.5, 2.0))


# ------------------------------------------------------------------- nls

def test_nls_line_search_window_and_fenchel():
    p = make_sharp_ratio(40, 4, 6, seed=3)
    cfg = FspsConfig(beta=1.6, nu=20.0, q=0.995, eps=1e-3, tol=1e-8, max_iter=200, memory=5, c=1e-4)
    x0 = np.full(40, 1 / 40)
    _, trace, rep = nls_run(p, cfg, x0, keep_iterates=True)
    assert rep.iterations == len(trace)
    F0 = (p.g.value(p.A.apply(x0)) + p.h_value(x0)) / p.denominator(x0)
    assert window_decrease_check(trace, cfg.memory, cfg.c, F0) == []
    assert fenchel_check(trace, p) == []
    assert np.all(trace.column("theta") > 0)


def test_nls_keeps_delta_unless_guard_fires():
    setup = make_toy_recovery()
    cfg = FspsConfig(beta=1.0, nu=2.5, q=0.99, eps=1e-2, tol=1e-12, max_iter=100, mu=0.5, eta=1.5)
    _, trace, _ = nls_run(setup.problem, cfg, setup.x0, keep_iterates=True)
    deltas = np.concatenate(([trace.records[0]["delta_eval"]], trace.column("delta")))
    for k, rec in enumerate(trace.records):
        if "z-guard" not in rec["flag"]:
            assert deltas[k + 1] == deltas[k]
        assert rec["step_delta"] >= cfg.mu * delta_rule(setup.problem, cfg.nu, rec["gamma_eval"]) * (1 - 1e-12)


def test_nls_staged_run_warm_starts():
    p = make_sharp_ratio(20, 3, 4, seed=1)
    cfg = FspsConfig(beta=1.6, nu=20.0, tol=1e-12, stages=[{"max_iter": 3}, {"max_iter": 4, "beta": 1.2}])
    state, traces, rep = nls_staged_run(p, cfg, np.full(20, 0.05), keep_iterates=True)
    assert [len(t) for t in traces] == [3, 4] or rep.reason == "tolerance"
    assert rep.iterations == sum(len(t) for t in traces)
    assert_allclose(traces[1].iterates[0][0], traces[0].iterates[-1][0])
    assert_allclose(state.x, traces[-1].iterates[-1][0])


def test_nls_rejects_zero_denominator_start():
    setup = make_toy_recovery()
    with pytest.raises(ValueError):
        nls_run(setup.problem, FspsConfig(), np.zeros(2))
