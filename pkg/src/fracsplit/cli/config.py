"""Experiment configuration files (JSON) and their validation.

Schema::

    {
      "experiment": "toy-beta-sweep" | "diverge" | "sharp-ratio" | "ct" | "custom",
      "solvers": ["nls", "dinkelbach", ...],   # optional, experiment default otherwise
      "problem": {...},                        # experiment-specific, see PROBLEM_DEFAULTS
      "solver_params": {...},                  # FspsConfig fields, may contain "stages"
      "baseline_params": {...},                # DinkelbachConfig fields and "sart_iterations"
      "seeds": [0, 1, ...],
      "trials": 10,                            # optional: seeds[0], seeds[0]+1, ...
      "output": "runs",
      "record_time": false                     # fill the time_s column of trace CSVs
    }
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field

from ..baselines.dinkelbach import DinkelbachConfig
from ..solvers.config import FspsConfig

__all__ = ["EXPERIMENTS", "SOLVERS", "ExperimentConfig", "ConfigError", "load_config", "validate_config",
           "diagnose_config", "default_config"]

EXPERIMENTS = {
    "toy-beta-sweep": "FSPS on the 2-D sparse recovery instance for several extrapolation parameters",
    "diverge": "gamma = 0 variant on the cycling instance (expected not to converge)",
    "sharp-ratio": "robust ratio on the simplex: FSPS-nls versus Dinkelbach",
    "ct": "limited-angle CT of the Shepp-Logan phantom: FSPS-nls versus SART",
    "custom": "any problem stored as JSON, solved by the selected solvers",
}
SOLVERS = ("fsps", "adaptive", "nls", "dinkelbach", "sart")

DEFAULT_SOLVERS = {
    "toy-beta-sweep": ["fsps"],
    "diverge": ["fsps"],
    "sharp-ratio": ["nls", "dinkelbach"],
    "ct": ["nls", "sart"],
    "custom": ["nls"],
}
ALLOWED_SOLVERS = {
    "toy-beta-sweep": {"fsps", "adaptive"},
    "diverge": {"fsps"},
    "sharp-ratio": {"adaptive", "nls", "dinkelbach"},
    "ct": {"adaptive", "nls", "sart"},
    "custom": {"adaptive", "nls", "dinkelbach"},
}

PROBLEM_DEFAULTS = {
    "toy-beta-sweep": {"betas": [0.2, 0.6, 1.0, 1.4, 1.8], "rerr_tol": 1e-6, "max_iter": 200000},
    "diverge": {"iterations": 100},
    "sharp-ratio": {"scenarios": [[100, 5, 20]], "s": 0.01},
    "ct": {"n_img": 64, "ranges": [90, 120, 150], "sigma": 0.0, "tau": 0.1, "s": 0.1, "detectors": None,
           "sart_iterations": 5000},
    "custom": {"file": None, "x0": None},
}

# parameter sets used when a config leaves solver_params empty
SOLVER_DEFAULTS = {
    "toy-beta-sweep": {"beta": 1.0, "nu": 2.5, "q": 0.9999, "theta0": 0.8053, "eps": 1e-2, "max_iter": 20000,
                       "tol": 1e-12},
    "diverge": {},
    "sharp-ratio": {"beta": 1.6, "nu": 20.0, "q": 0.995, "mu": 1e-3, "eta": 1.5, "c": 1e-4, "memory": 5,
                    "ls_trials": 250, "gamma_backtracks": 10000, "max_iter": 500, "eps": 1e-3, "tol": 1e-6,
                    "stop_rule": "next"},
    "ct": {"eps": 1.0, "tol": 1e-5, "stop_rule": "prev", "gamma_backtracks": 1000, "ls_trials": 250,
           "stages": [
               {"beta": 1.1, "nu": 1000.0, "mu": 0.4, "eta": 1.2, "q": 0.998, "memory": 5, "c": 2e-4,
                "max_iter": 50},
               {"beta": 1.45, "nu": 350.0, "mu": 0.4, "eta": 1.2, "q": 0.998, "memory": 5, "c": 2e-4,
                "max_iter": 3000},
           ]},
    "custom": {},
}

TOP_LEVEL = {"experiment", "solvers", "problem", "solver_params", "baseline_params", "seeds", "trials", "output",
             "record_time"}


class ConfigError(ValueError):
    def __init__(self, diagnostics):
        super().__init__("; ".join(diagnostics))
        self.diagnostics = list(diagnostics)


@dataclass
class ExperimentConfig:
    experiment: str
    solvers: list
    problem: dict
    solver_params: dict
    baseline_params: dict = field(default_factory=dict)
    seeds: list = field(default_factory=lambda: [0])
    trials: int | None = None
    output: str = "runs"
    record_time: bool = False

    def trial_seeds(self):
        if self.trials is None:
            return list(self.seeds)
        return [int(self.seeds[0]) + i for i in range(int(self.trials))]

    def fsps_config(self):
        return FspsConfig.from_dict(self.solver_params)

    def dinkelbach_config(self):
        params = {k: v for k, v in self.baseline_params.items() if k != "sart_iterations"}
        return DinkelbachConfig(**params)

    def to_dict(self):
        return {"experiment": self.experiment, "solvers": self.solvers, "problem": self.problem,
                "solver_params": self.solver_params, "baseline_params": self.baseline_params,
                "seeds": self.seeds, "trials": self.trials, "output": self.output, "record_time": self.record_time}


def default_config(experiment):
    """A complete configuration for ``experiment`` with the default parameters."""
    if experiment not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {experiment!r}")
    return {"experiment": experiment, "solvers": list(DEFAULT_SOLVERS[experiment]),
            "problem": copy.deepcopy(PROBLEM_DEFAULTS[experiment]),
            "solver_params": copy.deepcopy(SOLVER_DEFAULTS[experiment]), "baseline_params": {}, "seeds": [0]}


def diagnose_config(raw):
    """All problems with a parsed config mapping, as human-readable strings."""
    out = []
    if not isinstance(raw, dict):
        return ["top level must be a JSON object"]
    for key in sorted(set(raw) - TOP_LEVEL):
        out.append(f"unknown field {key!r}")
    exp = raw.get("experiment")
    if exp not in EXPERIMENTS:
        out.append(f"experiment: {exp!r} is not one of {sorted(EXPERIMENTS)}")
        return out
    solvers = raw.get("solvers", DEFAULT_SOLVERS[exp])
    if not isinstance(solvers, list) or not solvers:
        out.append("solvers: must be a nonempty list")
    else:
        for s in solvers:
            if s not in SOLVERS:
                out.append(f"solvers: unknown solver {s!r}")
            elif s not in ALLOWED_SOLVERS[exp]:
                out.append(f"solvers: {s!r} is not available for experiment {exp!r}")
    prob = raw.get("problem", {})
    if not isinstance(prob, dict):
        out.append("problem: must be an object")
    else:
        for key in sorted(set(prob) - set(PROBLEM_DEFAULTS[exp])):
            out.append(f"problem: unknown field {key!r} for experiment {exp!r}")
        if exp == "custom" and not prob.get("file"):
            out.append("problem.file: a problem JSON file is required for custom experiments")
    params = raw.get("solver_params", {})
    if not isinstance(params, dict):
        out.append("solver_params: must be an object")
    else:
        merged = {**SOLVER_DEFAULTS[exp], **params}
        out.extend(f"solver_params: {d}" for d in FspsConfig.diagnose(merged))
    base = raw.get("baseline_params", {})
    if not isinstance(base, dict):
        out.append("baseline_params: must be an object")
    else:
        dk = {k: v for k, v in base.items() if k != "sart_iterations"}
        try:
            DinkelbachConfig(**dk)
        except TypeError as exc:
            out.append(f"baseline_params: {exc}")
        except ValueError as exc:
            out.append(f"baseline_params: {exc}")
        if "sart_iterations" in base and not int(base["sart_iterations"]) >= 1:
            out.append("baseline_params.sart_iterations: must be >= 1")
    seeds = raw.get("seeds", [0])
    if not isinstance(seeds, list) or not seeds or not all(isinstance(s, int) for s in seeds):
        out.append("seeds: must be a nonempty list of integers")
    trials = raw.get("trials")
    if trials is not None and (not isinstance(trials, int) or trials < 1):
        out.append("trials: must be a positive integer")
    return out


def _parse(text, source):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"{source}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}"]) from None


def validate_config(path):
    """Diagnostics for the config file at ``path`` (empty list if valid)."""
    with open(path) as fh:
        text = fh.read()
    try:
        raw = _parse(text, path)
    except ConfigError as exc:
        return exc.diagnostics
    return diagnose_config(raw)


def load_config(path, seed=None, output=None):
    """Parse and validate a config file; raises :class:`ConfigError` with all diagnostics."""
    with open(path) as fh:
        raw = _parse(fh.read(), path)
    diags = diagnose_config(raw)
    if diags:
        raise ConfigError(diags)
    exp = raw["experiment"]
    cfg = ExperimentConfig(
        experiment=exp,
        solvers=list(raw.get("solvers", DEFAULT_SOLVERS[exp])),
        problem={**PROBLEM_DEFAULTS[exp], **raw.get("problem", {})},
        solver_params={**SOLVER_DEFAULTS[exp], **raw.get("solver_params", {})},
        baseline_params=dict(raw.get("baseline_params", {})),
        seeds=list(raw.get("seeds", [0])),
        trials=raw.get("trials"),
        output=raw.get("output", "runs"),
        record_time=bool(raw.get("record_time", False)),
    )
    if seed is not None:
        cfg.seeds, cfg.trials = [int(seed)], None
    if output is not None:
        cfg.output = output
    return cfg
