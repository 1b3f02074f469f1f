"""Potential energy ``U(theta) = -(log EL(theta) + log prior(theta))``.

Priors are given on the log scale with additive constants dropped; the
normaliser of the posterior is never computed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .el import ELSolution, SolverSettings, grad_log_el, log_el
from .models import EstimatingModel, as_dataset

__all__ = [
    "Prior",
    "normal_prior",
    "flat_prior",
    "PosteriorEval",
    "evaluate_potential",
    "Posterior",
]


@dataclass(frozen=True)
class Prior:
    """Log prior density (up to a constant) and its gradient."""

    log_density: Callable[[np.ndarray], float]
    grad_log_density: Callable[[np.ndarray], np.ndarray]
    name: str = "custom"
    options: dict = field(default_factory=dict)


def normal_prior(mean=0.0, variance=1.0) -> Prior:
    """Independent normal prior; ``mean`` and ``variance`` may be scalars or
    per-coordinate sequences."""
    mean_arr = np.asarray(mean, dtype=float)
    var_arr = np.asarray(variance, dtype=float)
    if np.any(var_arr <= 0):
        raise ValueError("prior variance must be positive")

    def log_density(theta):
        r = np.asarray(theta, float) - mean_arr
        return float(-0.5 * np.sum(r * r / var_arr))

    def grad_log_density(theta):
        return -(np.asarray(theta, float) - mean_arr) / var_arr

    return Prior(
        log_density,
        grad_log_density,
        name="normal",
        options={"mean": mean_arr.tolist(), "variance": var_arr.tolist()},
    )


def flat_prior() -> Prior:
    return Prior(
        lambda theta: 0.0,
        lambda theta: np.zeros(np.shape(theta)),
        name="flat",
    )


@dataclass(frozen=True)
class PosteriorEval:
    potential: float
    grad_potential: np.ndarray | None
    feasible: bool
    el_solution: ELSolution | None


def evaluate_potential(
    model: EstimatingModel,
    prior: Prior,
    theta,
    data,
    settings: SolverSettings | None = None,
) -> PosteriorEval:
    """Potential energy and its gradient at ``theta``.

    Off the empirical likelihood support, or where the prior log-density is
    ``-inf``, the potential is ``+inf`` and no gradient is returned.
    """
    theta = np.asarray(theta, dtype=float)
    lp = prior.log_density(theta)
    if not np.isfinite(lp):
        return PosteriorEval(np.inf, None, False, None)
    value, sol = log_el(model, theta, data, settings)
    if not sol.feasible:
        return PosteriorEval(np.inf, None, False, sol)
    grad = -(grad_log_el(model, theta, data, sol) + np.asarray(prior.grad_log_density(theta), float))
    return PosteriorEval(-(value + lp), grad, True, sol)


class Posterior:
    """Bundles model, prior, data and solver settings into a callable
    ``theta -> PosteriorEval`` for the sampler."""

    def __init__(self, model: EstimatingModel, prior: Prior, data, settings: SolverSettings | None = None):
        self.model = model
        self.prior = prior
        self.data = as_dataset(data)
        self.settings = settings or SolverSettings()

    def __call__(self, theta) -> PosteriorEval:
        return evaluate_potential(self.model, self.prior, theta, self.data, self.settings)
