"""Experiment drivers. Each ``*_trial`` function is usable without the CLI;
``run_experiment`` adds the on-disk layout:

    <out>/<experiment>/<run>/{config.json, trace*.csv, summary.json, ...}
    <out>/<experiment>/aggregate.csv and figure PNGs
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from ..baselines.dinkelbach import DinkelbachConfig, dinkelbach_run
from ..baselines.divergence import divergence_harness
from ..baselines.sart import sart_run
from ..core.io import load_problem
from ..core.problem import objective_F
from ..core.sets import Simplex
from ..metrics import MetricReport, infeas, rerr, rmse, ssim, stat_residual_info
from ..problems.export import write_csv_vector, write_pgm, write_sinogram_csv
from ..problems.sharp_ratio import make_sharp_ratio
from ..problems.tomography import make_ct_instance
from ..problems.toy import make_toy_recovery
from ..solvers.config import FspsConfig
from ..solvers.fsps import adaptive_fsps_run, fsps_run
from ..solvers.nls import nls_run, nls_staged_run
from . import figures

__all__ = ["toy_sweep_trial", "sharp_ratio_trial", "ct_trial", "ct_start", "run_experiment", "write_csv"]


def write_csv(path, rows, columns):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore")
        w.writeheader()
        for r in rows:
            w.writerow({c: _cell(r.get(c)) for c in columns})


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_jsonable)


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    raise TypeError(f"cannot serialise {type(v)}")


def _log(quiet, msg):
    if not quiet:
        print(msg, flush=True)


# ----------------------------------------------------------------- toy sweep

def toy_sweep_trial(beta, method="fsps", rerr_tol=1e-6, max_iter=200000, solver_params=None):
    """Iterate until ``RErr < rerr_tol``; returns ``(summary, trace, rerr_curve)``."""
    setup = make_toy_recovery()
    p = setup.problem
    if method == "fsps":
        _, trace, rep = fsps_run(p, beta, setup.gamma_schedule, setup.delta_schedule, setup.theta0, setup.x0,
                                 setup.z0, setup.u0, max_iter=max_iter, keep_iterates=True,
                                 stop=lambda st, xp: rerr(st.x, p.x_true) < rerr_tol)
    else:
        params = dict(solver_params or {})
        params.update(beta=beta, max_iter=max_iter)
        _, trace, rep = adaptive_fsps_run(p, FspsConfig.from_dict(params), setup.x0, setup.z0, setup.u0,
                                          keep_iterates=True)
    curve = np.array([rerr(it[0], p.x_true) for it in trace.iterates])
    hit = np.flatnonzero(curve < rerr_tol)
    summary = {"method": method, "beta": beta, "iterations": int(hit[0]) if hit.size else None,
               "final_rerr": float(curve[-1]), "reason": rep.reason, "wall_time": rep.wall_time,
               "objective": rep.objective}
    return summary, trace, curve


def _toy_experiment(cfg, root, quiet):
    rows, curves, trajs = [], {}, {}
    for method in cfg.solvers:
        for beta in cfg.problem["betas"]:
            summary, trace, curve = toy_sweep_trial(beta, method, cfg.problem["rerr_tol"], cfg.problem["max_iter"],
                                                    cfg.solver_params)
            run_dir = os.path.join(root, f"{method}-beta{beta:g}")
            os.makedirs(run_dir, exist_ok=True)
            _write_json(os.path.join(run_dir, "config.json"), {**cfg.to_dict(), "beta": beta, "method": method})
            trace.to_csv(os.path.join(run_dir, "trace.csv"), method_column=True, timings=cfg.record_time)
            _write_json(os.path.join(run_dir, "summary.json"), summary)
            rows.append(summary)
            if method == cfg.solvers[0]:
                curves[beta] = curve
                trajs[beta] = np.array([it[0] for it in trace.iterates])
            _log(quiet, f"{method} beta={beta:g}: {summary['iterations']} iterations to RErr < "
                        f"{cfg.problem['rerr_tol']:g}")
    write_csv(os.path.join(root, "aggregate.csv"), rows, ["method", "beta", "iterations", "final_rerr", "wall_time"])
    figures.plot_toy_sweep(curves, trajs, os.path.join(root, "rerr_and_iterates.png"))
    return 0


# ------------------------------------------------------------------ diverge

def _diverge_experiment(cfg, root, quiet):
    iters = int(cfg.problem["iterations"])
    trace = divergence_harness(iters)
    xs = np.array([it[0] for it in trace.iterates])
    ys = np.array([it[1] for it in trace.iterates[1:]])
    odd, even = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    cycle = all(np.array_equal(xs[k], odd if k % 2 else even) for k in range(1, len(xs)))
    run_dir = os.path.join(root, "run")
    os.makedirs(run_dir, exist_ok=True)
    _write_json(os.path.join(run_dir, "config.json"), cfg.to_dict())
    trace.to_csv(os.path.join(run_dir, "trace.csv"), method_column=True, timings=cfg.record_time)
    summary = {"iterations": len(trace), "converged": False, "exact_two_cycle": bool(cycle),
               "y_constant": bool(np.all(ys == 1.0)), "theta_values": sorted(set(trace.column("theta").tolist())),
               "visits_(1,0)": int(sum(np.array_equal(x, odd) for x in xs[1:])),
               "visits_(0,1)": int(sum(np.array_equal(x, even) for x in xs[1:])),
               "note": "no convergence (expected)"}
    _write_json(os.path.join(run_dir, "summary.json"), summary)
    write_csv(os.path.join(root, "aggregate.csv"), [summary],
              ["iterations", "exact_two_cycle", "y_constant", "visits_(1,0)", "visits_(0,1)", "note"])
    figures.plot_cycle(xs, trace.column("theta"), os.path.join(root, "cycle.png"))
    _log(quiet, f"diverge: {len(trace)} iterations, exact 2-cycle={cycle}; no convergence (expected)")
    return 0


# -------------------------------------------------------------- sharp ratio

def _metrics(problem, x, report, simplex=True):
    stat, exact = stat_residual_info(problem, x)
    m = MetricReport(obj=objective_F(problem, x), infeas=infeas(x) if simplex else 0.0, stat=stat,
                     wall_time=report.wall_time, iterations=report.iterations)
    return {**m.to_dict(), "stat_exact": exact}


def sharp_ratio_trial(n, m1, m2, seed, methods=("nls", "dinkelbach"), solver_params=None, baseline_params=None,
                      s=0.01, run_dir=None, record_time=False):
    """Solve one random instance with each method from the uniform portfolio.

    Returns a list of summary dicts (obj, infeas, stat, cpu, iterations).
    """
    p = make_sharp_ratio(n, m1, m2, seed, s=s)
    x0 = np.full(n, 1.0 / n)
    params = dict(solver_params or {})
    params.setdefault("delta0", 2.0 * params.get("nu", 20.0) + p.L_h + 2.0 * p.A_norm ** 2)
    out = []
    for method in methods:
        if method == "dinkelbach":
            dk = {k: v for k, v in (baseline_params or {}).items() if k != "sart_iterations"}
            x, trace, rep = dinkelbach_run(p, DinkelbachConfig(**dk), x0)
        elif method == "nls":
            st, trace, rep = nls_run(p, FspsConfig.from_dict(params), x0)
            x = st.x
        else:
            st, trace, rep = adaptive_fsps_run(p, FspsConfig.from_dict(params), x0)
            x = st.x
        summary = {"n": n, "m1": m1, "m2": m2, "seed": seed, "method": method, "reason": rep.reason,
                   **_metrics(p, x, rep)}
        summary["cpu"] = rep.wall_time
        out.append(summary)
        if run_dir is not None:
            d = os.path.join(run_dir, method)
            os.makedirs(d, exist_ok=True)
            _write_json(os.path.join(d, "config.json"), {"n": n, "m1": m1, "m2": m2, "seed": seed, "s": s,
                                                          "method": method, "solver_params": params,
                                                          "baseline_params": baseline_params or {}})
            trace.to_csv(os.path.join(d, "trace.csv"), method_column=True, timings=record_time)
            _write_json(os.path.join(d, "summary.json"), summary)
    return out


def _sharp_task(args):
    return sharp_ratio_trial(*args)


def _mean_rows(rows, keys, group):
    out = []
    groups = {}
    for r in rows:
        groups.setdefault(tuple(r[g] for g in group), []).append(r)
    for gk, rs in groups.items():
        row = dict(zip(group, gk))
        row["trials"] = len(rs)
        for k in keys:
            row[k] = float(np.mean([r[k] for r in rs]))
        out.append(row)
    return out


def _sharp_experiment(cfg, root, quiet, threads):
    tasks = []
    for n, m1, m2 in cfg.problem["scenarios"]:
        for seed in cfg.trial_seeds():
            run_dir = os.path.join(root, f"{n}-{m1}-{m2}", f"seed{seed}")
            tasks.append((n, m1, m2, seed, tuple(cfg.solvers), cfg.solver_params, cfg.baseline_params,
                          cfg.problem["s"], run_dir, cfg.record_time))
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_sharp_task, tasks))
    else:
        results = [_sharp_task(t) for t in tasks]
    rows = [r for res in results for r in res]
    for r in rows:
        _log(quiet, f"({r['n']},{r['m1']},{r['m2']}) seed {r['seed']} {r['method']}: obj={r['obj']:.4f} "
                    f"infeas={r['infeas']:.1e} stat={r['stat']:.1e} cpu={r['cpu']:.3f}s")
    write_csv(os.path.join(root, "trials.csv"), rows,
              ["n", "m1", "m2", "seed", "method", "obj", "infeas", "stat", "cpu", "iterations", "reason"])
    agg = _mean_rows(rows, ["obj", "infeas", "stat", "cpu", "iterations"], ["n", "m1", "m2", "method"])
    write_csv(os.path.join(root, "aggregate.csv"), agg,
              ["n", "m1", "m2", "method", "trials", "obj", "infeas", "stat", "cpu", "iterations"])
    figures.plot_sharp_ratio(agg, os.path.join(root, "obj_cpu.png"))
    return 0


# ----------------------------------------------------------------------- CT

def ct_start(instance):
    """One SART sweep from the zero image (the zero image itself has ``f(Kx) = 0``)."""
    return sart_run(instance.projector, instance.measurements, np.zeros(instance.n_img ** 2), 1)


def ct_trial(range_deg, n_img=64, sigma=0.0, seed=0, methods=("nls", "sart"), solver_params=None,
             sart_iterations=5000, tau=0.1, s=0.1, detectors=None, run_dir=None, record_time=False):
    """Reconstruct the phantom from a limited-angle sinogram with each method.

    Returns ``(summaries, images, instance)``.
    """
    inst = make_ct_instance(n_img, range_deg, sigma, seed, tau=tau, s=s, detectors=detectors)
    p = inst.problem
    x0 = ct_start(inst)
    summaries, images = [], {}
    for method in methods:
        traces = []
        if method == "sart":
            import time
            t0 = time.perf_counter()
            x = sart_run(inst.projector, inst.measurements, np.zeros(n_img ** 2), sart_iterations)
            wall, iters, reason = time.perf_counter() - t0, sart_iterations, "iterations"
        else:
            cfg = FspsConfig.from_dict(dict(solver_params or {}))
            if method == "nls":
                st, traces, rep = nls_staged_run(p, cfg, x0)
            else:
                st, tr, rep = adaptive_fsps_run(p, cfg, x0)
                traces = [tr]
            x, wall, iters, reason = st.x, rep.wall_time, rep.iterations, rep.reason
        img = x.reshape(n_img, n_img)
        images[method] = img
        try:
            obj = objective_F(p, x)
        except ValueError:
            obj = float("nan")
        summaries.append({"range": range_deg, "sigma": sigma, "seed": seed, "method": method,
                          "ssim": ssim(img, inst.phantom), "rmse": rmse(img, inst.phantom), "obj": obj,
                          "iterations": iters, "cpu": wall, "reason": reason})
        if run_dir is not None:
            d = os.path.join(run_dir, method)
            os.makedirs(d, exist_ok=True)
            _write_json(os.path.join(d, "config.json"),
                        {"range": range_deg, "n_img": n_img, "sigma": sigma, "seed": seed, "method": method,
                         "solver_params": solver_params or {}, "sart_iterations": sart_iterations})
            for i, tr in enumerate(traces, start=1):
                tr.to_csv(os.path.join(d, f"trace_stage{i}.csv"), method_column=True, timings=record_time)
            _write_json(os.path.join(d, "summary.json"), summaries[-1])
            write_pgm(os.path.join(d, "recon.pgm"), img)
            write_csv_vector(os.path.join(d, "recon.csv"), img)
    if run_dir is not None:
        write_pgm(os.path.join(run_dir, "phantom.pgm"), inst.phantom)
        write_sinogram_csv(os.path.join(run_dir, "sinogram.csv"), inst.measurements, len(inst.angles_deg))
    return summaries, images, inst


def _ct_experiment(cfg, root, quiet):
    pr = cfg.problem
    rows, recons, phantom = [], {}, None
    sart_iters = int(cfg.baseline_params.get("sart_iterations", pr["sart_iterations"]))
    for rg in pr["ranges"]:
        for seed in cfg.trial_seeds():
            run_dir = os.path.join(root, f"range{rg:g}", f"seed{seed}")
            summ, imgs, inst = ct_trial(rg, pr["n_img"], pr["sigma"], seed, tuple(cfg.solvers), cfg.solver_params,
                                        sart_iters, pr["tau"], pr["s"], pr["detectors"], run_dir, cfg.record_time)
            rows.extend(summ)
            phantom = inst.phantom
            for m, img in imgs.items():
                recons.setdefault((rg, m), img)
            for r in summ:
                _log(quiet, f"ct {rg:g} deg seed {seed} {r['method']}: SSIM={r['ssim']:.4f} RMSE={r['rmse']:.3e} "
                            f"iterations={r['iterations']} cpu={r['cpu']:.1f}s")
    agg = _mean_rows(rows, ["ssim", "rmse", "iterations", "cpu"], ["range", "sigma", "method"])
    write_csv(os.path.join(root, "aggregate.csv"), agg,
              ["range", "sigma", "method", "trials", "ssim", "rmse", "iterations", "cpu"])
    figures.plot_ct(phantom, recons, os.path.join(root, "reconstructions.png"))
    return 0


# ------------------------------------------------------------------- custom

def _custom_experiment(cfg, root, quiet):
    p = load_problem(cfg.problem["file"])
    rows = []
    for seed in cfg.trial_seeds():
        if cfg.problem.get("x0") is not None:
            x0 = np.asarray(cfg.problem["x0"], dtype=float)
        else:
            x0 = p.S.project(np.random.default_rng(seed).uniform(0.0, 1.0, p.dim))
        for method in cfg.solvers:
            if method == "dinkelbach":
                x, trace, rep = dinkelbach_run(p, cfg.dinkelbach_config(), x0)
            elif method == "nls":
                st, trace, rep = nls_run(p, cfg.fsps_config(), x0)
                x = st.x
            else:
                st, trace, rep = adaptive_fsps_run(p, cfg.fsps_config(), x0)
                x = st.x
            summary = {"seed": seed, "method": method, "reason": rep.reason,
                       **_metrics(p, x, rep, simplex=isinstance(p.S, Simplex)), "cpu": rep.wall_time}
            if p.x_true is not None:
                summary["rerr"] = rerr(x, p.x_true)
            d = os.path.join(root, f"seed{seed}", method)
            os.makedirs(d, exist_ok=True)
            _write_json(os.path.join(d, "config.json"), cfg.to_dict())
            trace.to_csv(os.path.join(d, "trace.csv"), method_column=True, timings=cfg.record_time)
            _write_json(os.path.join(d, "summary.json"), summary)
            write_csv_vector(os.path.join(d, "x.csv"), x)
            rows.append(summary)
            _log(quiet, f"custom seed {seed} {method}: obj={summary['obj']:.6g} stat={summary['stat']:.2e}")
    agg = _mean_rows(rows, ["obj", "stat", "cpu", "iterations"], ["method"])
    write_csv(os.path.join(root, "aggregate.csv"), agg, ["method", "trials", "obj", "stat", "cpu", "iterations"])
    return 0


def run_experiment(cfg, quiet=False, threads=1):
    """Run a validated :class:`ExperimentConfig`; returns the exit status."""
    root = os.path.join(cfg.output, cfg.experiment)
    os.makedirs(root, exist_ok=True)
    _write_json(os.path.join(root, "config.json"), cfg.to_dict())
    if cfg.experiment == "toy-beta-sweep":
        return _toy_experiment(cfg, root, quiet)
    if cfg.experiment == "diverge":
        return _diverge_experiment(cfg, root, quiet)
    if cfg.experiment == "sharp-ratio":
        return _sharp_experiment(cfg, root, quiet, threads)
    if cfg.experiment == "ct":
        return _ct_experiment(cfg, root, quiet)
    return _custom_experiment(cfg, root, quiet)
