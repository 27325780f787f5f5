"""Nelder-Mead minimization for the variational parameters.

Backed by SciPy's non-adaptive Nelder-Mead (reflection 1, expansion 2,
contraction 0.5, shrink 0.5), driven from an explicit axis-aligned initial
simplex with absolute steps so that coordinates sitting at exactly 0 still
get explored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize as _scipy_minimize


class NonFiniteObjective(ArithmeticError):
    def __init__(self, x, value):
        self.x = np.array(x, dtype=float)
        self.value = value
        self.best_params = None
        self.best_value = math.inf
        self.evaluations = 0
        super().__init__(f"objective returned {value!r} at {self.x.tolist()}")


@dataclass(frozen=True)
class OptimizerConfig:
    x_tolerance: float = 1e-4
    f_tolerance: float = 1e-4
    max_evaluations: int | None = None  # None -> 200 * dimension
    initial_simplex_scale: float = 0.05
    restart: bool = False

    def __post_init__(self):
        for name in ("x_tolerance", "f_tolerance", "initial_simplex_scale"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_evaluations is not None and self.max_evaluations <= 0:
            raise ValueError("max_evaluations must be positive")

    def budget(self, dim: int) -> int:
        return self.max_evaluations if self.max_evaluations is not None else 200 * max(dim, 1)


@dataclass
class OptimizationResult:
    best_params: np.ndarray
    best_value: float
    evaluations: int
    converged: bool
    message: str = ""


class _Tracked:
    """Wraps the objective to count calls, remember the best point, and reject NaN/inf."""

    def __init__(self, fn):
        self.fn = fn
        self.calls = 0
        self.best_x = None
        self.best_f = math.inf

    def __call__(self, x):
        value = float(self.fn(x))
        self.calls += 1
        if not math.isfinite(value):
            raise NonFiniteObjective(x, value)
        if value < self.best_f:
            self.best_f = value
            self.best_x = np.array(x, dtype=float)
        return value


def _simplex(x0: np.ndarray, step: float) -> np.ndarray:
    return np.vstack([x0, x0 + step * np.eye(x0.size)])


def _run(tracked: _Tracked, x0: np.ndarray, step: float, config: OptimizerConfig, budget: int):
    return _scipy_minimize(
        tracked,
        x0,
        method="Nelder-Mead",
        options={
            "initial_simplex": _simplex(x0, step),
            "xatol": config.x_tolerance,
            "fatol": config.f_tolerance,
            "maxfev": budget,
            "maxiter": budget,
            "adaptive": False,
        },
    )


def minimize(
    objective: Callable[[np.ndarray], float],
    x0,
    config: OptimizerConfig | None = None,
) -> OptimizationResult:
    """Minimize ``objective`` from ``x0``.

    Raises ``NonFiniteObjective`` if the objective ever returns NaN or inf;
    the exception carries the best point seen before the abort.
    """
    config = config or OptimizerConfig()
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.size == 0:
        value = float(objective(x0))
        if not math.isfinite(value):
            raise NonFiniteObjective(x0, value)
        return OptimizationResult(x0, value, 1, True, "nothing to optimize")

    budget = config.budget(x0.size)
    tracked = _Tracked(objective)
    try:
        res = _run(tracked, x0, config.initial_simplex_scale, config, budget)
        if config.restart and tracked.calls < budget:
            res = _run(tracked, tracked.best_x, config.initial_simplex_scale / 2, config,
                       budget - tracked.calls)
    except NonFiniteObjective as exc:
        exc.best_params, exc.best_value, exc.evaluations = tracked.best_x, tracked.best_f, tracked.calls
        raise
    converged = bool(res.status == 0)
    message = str(res.message)
    return OptimizationResult(
        best_params=tracked.best_x,
        best_value=tracked.best_f,
        evaluations=tracked.calls,
        converged=converged,
        message=message,
    )
