"""Solver parameters with range validation."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

__all__ = ["FspsConfig", "STOP_RULES"]

# "prev": ||x+ - x|| / max(eps, ||x||)   (CT experiments)
# "next": ||x+ - x|| / max(||x+||, eps) (robust-ratio experiments)
STOP_RULES = ("prev", "next")


@dataclass
class FspsConfig:
    """Parameters of the adaptive FSPS family.

    ``delta0`` and ``theta0`` default to ``2 nu + L + 2 ||A||^2 / gamma0`` and
    ``max(F(x0), 1e-8)``. The line-search fields (``mu``, ``eta``, ``c``,
    ``memory``, ``ls_trials``) are only read by the nonmonotone variant.
    ``stages`` is an optional list of dicts overriding fields per warm-started
    stage.
    """

    beta: float = 1.0
    nu: float = 1.0
    q: float = 0.995
    delta0: float | None = None
    theta0: float | None = None
    gamma0: float = 1.0
    eps: float = 1e-3
    max_iter: int = 500
    tol: float = 1e-6
    stop_rule: str = "next"
    gamma_backtracks: int = 10_000
    mu: float = 1e-3
    eta: float = 1.5
    c: float = 1e-4
    memory: int = 5
    ls_trials: int = 250
    stages: list = field(default_factory=list)

    def __post_init__(self):
        problems = self.diagnostics()
        if problems:
            raise ValueError("; ".join(problems))

    def diagnostics(self):
        """List every range violation without raising."""
        out = []
        if not 0 < self.beta < 2:
            out.append(f"beta={self.beta} must lie in the open interval (0, 2)")
        if not self.nu > 0:
            out.append(f"nu={self.nu} must be > 0")
        if not 0 < self.q < 1:
            out.append(f"q={self.q} must lie in the open interval (0, 1)")
        if self.delta0 is not None and not self.delta0 > 0:
            out.append(f"delta0={self.delta0} must be > 0")
        if self.theta0 is not None and not self.theta0 > 0:
            out.append(f"theta0={self.theta0} must be > 0")
        if not self.gamma0 > 0:
            out.append(f"gamma0={self.gamma0} must be > 0")
        if not self.eps > 0:
            out.append(f"eps={self.eps} must be > 0")
        if int(self.max_iter) < 1:
            out.append(f"max_iter={self.max_iter} must be >= 1")
        if not self.tol >= 0:
            out.append(f"tol={self.tol} must be >= 0")
        if self.stop_rule not in STOP_RULES:
            out.append(f"stop_rule={self.stop_rule!r} must be one of {STOP_RULES}")
        if int(self.gamma_backtracks) < 1:
            out.append(f"gamma_backtracks={self.gamma_backtracks} must be >= 1")
        if not 0 < self.mu < 1:
            out.append(f"mu={self.mu} must lie in the open interval (0, 1)")
        if not self.eta > 1:
            out.append(f"eta={self.eta} must be > 1")
        if not self.c > 0:
            out.append(f"c={self.c} must be > 0")
        if int(self.memory) < 0:
            out.append(f"memory={self.memory} must be >= 0")
        if int(self.ls_trials) < 1:
            out.append(f"ls_trials={self.ls_trials} must be >= 1")
        names = {f.name for f in dataclasses.fields(self)} - {"stages"}
        for i, stage in enumerate(self.stages):
            unknown = set(stage) - names
            if unknown:
                out.append(f"stages[{i}]: unknown fields {sorted(unknown)}")
                continue
            try:
                self.for_stage(i)
            except ValueError as exc:
                out.append(f"stages[{i}]: {exc}")
        return out

    @classmethod
    def diagnose(cls, mapping):
        """Diagnostics for a plain mapping of fields, without raising."""
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(mapping) - names)
        out = [f"unknown solver field {k!r}" for k in unknown]
        probe = object.__new__(cls)
        for f in dataclasses.fields(cls):
            default = f.default_factory() if f.default_factory is not dataclasses.MISSING else f.default
            setattr(probe, f.name, mapping.get(f.name, default))
        try:
            out.extend(probe.diagnostics())
        except (TypeError, ValueError) as exc:
            out.append(f"malformed solver parameters: {exc}")
        return out

    @classmethod
    def from_dict(cls, mapping):
        problems = cls.diagnose(mapping)
        if problems:
            raise ValueError("; ".join(problems))
        return cls(**mapping)

    def for_stage(self, i):
        """The configuration of stage ``i`` (without nested stages)."""
        return dataclasses.replace(self, stages=[], **self.stages[i])

    def stage_configs(self):
        if not self.stages:
            return [dataclasses.replace(self, stages=[])]
        return [self.for_stage(i) for i in range(len(self.stages))]

    def to_dict(self):
        return dataclasses.asdict(self)
