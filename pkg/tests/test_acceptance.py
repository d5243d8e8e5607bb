"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v`` or as a script with
``python3 tests/test_acceptance.py``. The lines are repeated in the pytest
terminal summary.
"""

import sys
import time

import numpy as np
import scipy.sparse as sp

from fracsplit.baselines import divergence_harness
from fracsplit.cli.config import SOLVER_DEFAULTS
from fracsplit.cli.experiments import ct_trial, sharp_ratio_trial, toy_sweep_trial
from fracsplit.core import (Box, FractionalProblem, IdentityOperator, L1Norm, L2Norm, LeastSquares, LinearFunction,
                            LinfDistance, MatrixOperator, Offset, QuadAugmented, StackedOperator, ZeroFunction,
                            adjoint_mismatch, objective_F, project_simplex)
from fracsplit.metrics import stat_residual, stat_residual_info
from fracsplit.problems import (TOY_BETAS, discrete_gradient, make_ct_instance, make_quadratic_over_abs,
                                make_sharp_ratio, make_toy_recovery, parallel_beam_projector)
from fracsplit.solvers import (FspsConfig, adaptive_fsps_run, descent_check, fenchel_check, fsps_run,
                               gamma_merit_check, nls_run, nls_staged_run, theta_monotone_check)
from oracles import fd_gradient, grid_prox, moreau_residual, simplex_sort_threshold

RESULTS = []

TOY_ADAPTIVE = dict(beta=1.0, nu=2.5, q=0.9999, theta0=0.8053, eps=1e-2, tol=1e-10, max_iter=5000)
SHARP_ADAPTIVE = dict(beta=1.6, nu=20.0, q=0.995, eps=1.0, tol=1e-10, max_iter=500)


def report(number, title, ok, detail):
    line = f"criterion {number} ({title}): {'PASS' if ok else 'FAIL'} | {detail}"
    RESULTS.append(line)
    print(line, flush=True)
    return ok


def test_criterion_1_toy_beta_study():
    t0 = time.perf_counter()
    summaries = [toy_sweep_trial(beta)[0] for beta in TOY_BETAS]
    elapsed = time.perf_counter() - t0
    its = {s["beta"]: s["iterations"] for s in summaries}
    converged = all(s["iterations"] is not None for s in summaries)
    ordered = converged and its[1.8] < its[1.0] < its[0.2]
    ok = converged and ordered and elapsed < 1.0
    detail = ", ".join(f"beta={b:g}: {its[b]}" for b in TOY_BETAS) + f"; {elapsed:.2f}s"
    assert report(1, "toy beta study", ok, detail), detail


def test_criterion_2_divergence_cycle():
    trace = divergence_harness(100)
    xs = [it[0] for it in trace.iterates]
    ys = [it[1] for it in trace.iterates[1:]]
    cycle = all(np.array_equal(xs[k], [1.0, 0.0] if k % 2 else [0.0, 1.0]) for k in range(1, 101))
    y_const = all(np.array_equal(y, [1.0, 1.0]) for y in ys)
    theta_one = bool(np.all(trace.column("theta") == 1.0))
    ok = len(trace) == 100 and cycle and y_const and theta_one
    detail = f"100 iterations, 2-cycle={cycle}, y=(1,1)={y_const}, theta=1={theta_one} (tolerance 0)"
    assert report(2, "divergence regression", ok, detail), detail


def _invariants(trace, problem, cfg):
    k0 = trace.freeze_index()
    viol = []
    if not np.all(trace.column("theta") > 0):
        viol.append("theta <= 0")
    viol += theta_monotone_check(trace, slack=1e-10)
    viol += descent_check(trace, problem, cfg.nu, cfg.beta, slack=1e-8)
    viol += gamma_merit_check(trace, problem, slack=1e-10)
    return viol, len(trace) - k0


def test_criterion_3_monotonicity_and_positivity():
    t0 = time.perf_counter()
    runs = []
    setup = make_toy_recovery()
    cfg = FspsConfig(**TOY_ADAPTIVE)
    _, trace, _ = adaptive_fsps_run(setup.problem, cfg, setup.x0, setup.z0, setup.u0, keep_iterates=True)
    runs.append(("toy",) + _invariants(trace, setup.problem, cfg))
    cfg = FspsConfig(**SHARP_ADAPTIVE)
    for seed in range(3):
        p = make_sharp_ratio(50, 5, 10, seed=seed)
        _, trace, _ = adaptive_fsps_run(p, cfg, np.full(50, 1 / 50), keep_iterates=True)
        runs.append((f"sharp seed {seed}",) + _invariants(trace, p, cfg))
    elapsed = time.perf_counter() - t0
    violations = [f"{name}: {v}" for name, viols, _ in runs for v in viols[:3]]
    nonvacuous = all(n > 1 for _, _, n in runs)
    ok = not violations and nonvacuous and elapsed < 10.0
    detail = ", ".join(f"{name}: {n} post-freeze iterations" for name, _, n in runs) + f"; {elapsed:.2f}s"
    if violations:
        detail += "; " + "; ".join(violations)
    assert report(3, "monotonicity/positivity", ok, detail), detail


def test_criterion_4_sharp_ratio_study():
    t0 = time.perf_counter()
    rows = []
    for seed in range(10):
        rows += sharp_ratio_trial(100, 5, 20, seed, solver_params=SOLVER_DEFAULTS["sharp-ratio"])
    elapsed = time.perf_counter() - t0
    nls = [r for r in rows if r["method"] == "nls"]
    dk = [r for r in rows if r["method"] == "dinkelbach"]
    feas = all(r["infeas"] <= 1e-6 and r["stat"] <= 1e-4 for r in nls)
    obj_n, obj_d = np.mean([r["obj"] for r in nls]), np.mean([r["obj"] for r in dk])
    cpu_n, cpu_d = np.mean([r["cpu"] for r in nls]), np.mean([r["cpu"] for r in dk])
    close = abs(obj_n - obj_d) <= 0.1 * obj_d
    ok = feas and close and cpu_n < cpu_d and elapsed < 120.0
    detail = (f"nls obj {obj_n:.4f} vs Dinkelbach {obj_d:.4f}; max infeas {max(r['infeas'] for r in nls):.1e}, "
              f"max stat {max(r['stat'] for r in nls):.1e}; cpu {cpu_n * 1e3:.2f} ms vs {cpu_d * 1e3:.2f} ms; "
              f"{elapsed:.1f}s")
    assert report(4, "sharp-ratio study", ok, detail), detail


def test_criterion_5_ct_study():
    t0 = time.perf_counter()
    res = {}
    for rg in (90, 120, 150):
        summ, _, _ = ct_trial(rg, 64, solver_params=SOLVER_DEFAULTS["ct"], sart_iterations=5000)
        res[rg] = {r["method"]: r for r in summ}
    elapsed = time.perf_counter() - t0
    beats = all(res[rg]["nls"]["ssim"] > res[rg]["sart"]["ssim"] for rg in res)
    ok = (beats and res[150]["nls"]["ssim"] >= 0.90 and res[150]["nls"]["rmse"] < res[90]["nls"]["rmse"]
          and elapsed < 300.0)
    detail = "; ".join(f"{rg} deg SSIM nls {res[rg]['nls']['ssim']:.5f} / SART {res[rg]['sart']['ssim']:.5f}, "
                       f"RMSE nls {res[rg]['nls']['rmse']:.2e}" for rg in res) + f"; {elapsed:.0f}s"
    assert report(5, "CT study", ok, detail), detail


def _prox_oracles(n, rng):
    return [ZeroFunction(), L1Norm(0.7), LinfDistance(rng.uniform(-1, 1, n)), L2Norm(),
            LinearFunction(rng.uniform(-1, 1, n), 0.3), Offset(L1Norm(1.5), 2.0), QuadAugmented(L1Norm(0.4), 0.5),
            QuadAugmented(LinfDistance(rng.uniform(-1, 1, n)), 0.1), QuadAugmented(L2Norm(), 2.0)]


def _solver_traces():
    out = []
    setup = make_toy_recovery()
    _, tr, _ = fsps_run(setup.problem, 1.0, setup.gamma_schedule, setup.delta_schedule, setup.theta0, setup.x0,
                        setup.z0, setup.u0, max_iter=200, keep_iterates=True)
    out.append(("toy fsps", tr, setup.problem))
    _, tr, _ = adaptive_fsps_run(setup.problem, FspsConfig(**TOY_ADAPTIVE), setup.x0, setup.z0, setup.u0,
                                 keep_iterates=True)
    out.append(("toy adaptive", tr, setup.problem))
    p = make_sharp_ratio(50, 5, 10, seed=0)
    _, tr, _ = adaptive_fsps_run(p, FspsConfig(**SHARP_ADAPTIVE), np.full(50, 0.02), keep_iterates=True)
    out.append(("sharp adaptive", tr, p))
    _, tr, _ = nls_run(p, FspsConfig(**SOLVER_DEFAULTS["sharp-ratio"]), np.full(50, 0.02), keep_iterates=True)
    out.append(("sharp nls", tr, p))
    inst = make_ct_instance(32, 120)
    x0 = np.clip(np.full(32 * 32, 0.3) + 0.01 * np.arange(32 * 32) / 1024, 0, 1)
    cfg = FspsConfig.from_dict({**SOLVER_DEFAULTS["ct"],
                                "stages": [dict(s, max_iter=40) for s in SOLVER_DEFAULTS["ct"]["stages"]]})
    _, trs, _ = nls_staged_run(inst.problem, cfg, x0, keep_iterates=True)
    out += [(f"ct nls stage {i + 1}", tr, inst.problem) for i, tr in enumerate(trs)]
    out.append(("gamma=0 harness", divergence_harness(100), None))
    return out


def test_criterion_6_oracle_equivalence():
    rng = np.random.default_rng(2024)
    fails = []
    # prox versus grid search, dimension <= 2, 100 cases
    worst_prox = 0.0
    for case in range(100):
        n = 1 + case % 2
        funs = _prox_oracles(n, rng)
        fun = funs[case % len(funs)]
        v, kappa = rng.uniform(-2, 2, n), rng.uniform(0.2, 2.0)
        err = float(np.max(np.abs(fun.prox(v, kappa) - grid_prox(fun.value, v, kappa))))
        worst_prox = max(worst_prox, err)
    if worst_prox > 2e-3:
        fails.append(f"prox grid error {worst_prox:.1e}")
    # Moreau identity, 100 random (v, kappa) per oracle
    worst_moreau = 0.0
    for idx in range(len(_prox_oracles(1, rng))):
        for _ in range(100):
            n = int(rng.integers(1, 8))
            fun = _prox_oracles(n, rng)[idx]
            v = rng.normal(size=n) * rng.uniform(0.1, 10)
            kappa = float(np.exp(rng.uniform(np.log(1e-3), np.log(1e3))))
            worst_moreau = max(worst_moreau, moreau_residual(fun, v, kappa) / (1 + np.linalg.norm(v)))
    if worst_moreau > 1e-10:
        fails.append(f"Moreau residual {worst_moreau:.1e}")
    # adjoints, 100 pairs per operator
    sharp = make_sharp_ratio(20, 3, 4, seed=0)
    ops = {"dense": MatrixOperator(rng.normal(size=(7, 5))),
           "sparse": MatrixOperator(sp.random(9, 6, density=0.4, random_state=3)),
           "identity": IdentityOperator(5), "gradient": discrete_gradient(16),
           "projector": parallel_beam_projector(16, range(0, 150, 5)),
           "stacked": StackedOperator([MatrixOperator(rng.normal(size=(3, 5))), IdentityOperator(5)]),
           "sharp K": sharp.K}
    worst_adj = 0.0
    for op in ops.values():
        for _ in range(100):
            x, y = rng.normal(size=op.shape[1]), rng.normal(size=op.shape[0])
            worst_adj = max(worst_adj, adjoint_mismatch(op, x, y))
    if worst_adj > 1e-10:
        fails.append(f"adjoint mismatch {worst_adj:.1e}")
    # simplex projection, 1000 points, exact agreement
    mismatches = 0
    for _ in range(1000):
        v = rng.normal(size=int(rng.integers(1, 40))) * rng.uniform(0.01, 100)
        mismatches += not np.array_equal(project_simplex(v), simplex_sort_threshold(v))
    if mismatches:
        fails.append(f"{mismatches} simplex mismatches")
    # Fenchel equality of the dual update along solver traces
    n_traces = 0
    for name, trace, problem in _solver_traces():
        if problem is None:
            # gamma = 0: the gap of the minimum-norm choice sign(Ax) is exactly zero
            gaps = [np.abs(it[0]).sum() - it[2] @ it[0] for it in trace.iterates[1:]]
            viol = [g for g in gaps if g > 1e-8]
        else:
            viol = fenchel_check(trace, problem, tol=1e-8)
        n_traces += 1
        if viol:
            fails.append(f"{name}: {viol[0]}")
    ok = not fails
    detail = (f"prox grid max err {worst_prox:.1e}, Moreau {worst_moreau:.1e}, adjoint {worst_adj:.1e}, "
              f"simplex mismatches {mismatches}/1000, Fenchel checked on {n_traces} traces")
    if fails:
        detail += "; " + "; ".join(fails)
    assert report(6, "oracle equivalence", ok, detail), detail


def test_criterion_7_stationarity_residual():
    at_zero = stat_residual(make_quadratic_over_abs(), np.array([0.0]))
    rng = np.random.default_rng(7)
    A, K = MatrixOperator(rng.normal(size=(3, 3))), MatrixOperator(rng.normal(size=(4, 3)))
    p = FractionalProblem(S=Box(-5.0, 5.0, dim=3), A=A, K=K, g=L2Norm(), f=L2Norm(),
                          h=LeastSquares(IdentityOperator(3), rng.normal(size=3)), shift=1.0)
    worst, all_exact = 0.0, True
    for _ in range(20):
        x = rng.uniform(-2, 2, 3)
        # interior of the box, Ax and Kx away from the kink of the norms
        assert np.linalg.norm(A.apply(x)) > 1e-3 and np.linalg.norm(K.apply(x)) > 1e-3
        oracle = np.linalg.norm(fd_gradient(lambda t: objective_F(p, t), x)) * p.denominator(x) ** 2
        val, exact = stat_residual_info(p, x)
        all_exact &= exact
        worst = max(worst, abs(val - oracle) / oracle)
    ok = at_zero <= 1e-12 and worst <= 1e-4 and all_exact
    detail = f"stat at 0 = {at_zero:.1e}; quotient-rule oracle max relative error {worst:.1e} over 20 points"
    assert report(7, "stationarity residual", ok, detail), detail


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted((k, v) for k, v in globals().items() if k.startswith("test_criterion_")):
        try:
            fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
