"""Estimating-function models.

A model maps a parameter vector ``theta`` (length ``d``) and one observation
``x`` (length ``p``) to ``q`` estimating equations ``g(theta, x)`` together
with their ``q x d`` Jacobian.  The solver works on whole datasets at once, so
every model exposes vectorised ``g_all`` / `jac_all` methods; the per-row
``g`` / ``grad_g`` methods are thin wrappers kept for user convenience.

No numerical differentiation fallback is provided.  Use
:func:`check_jacobian` to validate a hand-written Jacobian.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq
from scipy.special import expit

__all__ = [
    "DataError",
    "EstimatingModel",
    "MeanModel",
    "ConstrainedLogisticModel",
    "RowFunctionModel",
    "as_dataset",
    "mean_model",
    "constrained_logistic_model",
    "check_jacobian",
    "fertility_intercept",
    "synthetic_fertility_data",
    "SQUARE_DATA",
    "FERTILITY_RATE",
]

FERTILITY_RATE = 0.06179

# eight points on the boundary of the unit square [-1, 1]^2
SQUARE_DATA = np.array(
    [[1, 1], [1, 0], [1, -1], [0, -1], [-1, -1], [-1, 0], [-1, 1], [0, 1]],
    dtype=float,
)


class DataError(ValueError):
    """Raised for malformed datasets or model outputs."""


def as_dataset(data) -> np.ndarray:
    """Validate ``data`` and return it as a float ``(n, p)`` array.

    One-dimensional input is read as ``n`` scalar observations.
    """
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise DataError(f"data must be 2-D (n, p), got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DataError("data must contain at least one observation")
    if not np.all(np.isfinite(arr)):
        raise DataError("data contains non-finite entries")
    return arr


class EstimatingModel:
    """Base class for estimating-function models.

    Subclasses set ``d`` (parameter dimension) and ``q`` (number of
    equations) and implement :meth:`g_all` and :meth:`jac_all`.
    """

    d: int
    q: int
    name: str = "custom"

    def g_all(self, theta: np.ndarray, data: np.ndarray) -> np.ndarray:
        """Return the ``(n, q)`` matrix whose row ``i`` is ``g(theta, x_i)``."""
        raise NotImplementedError

    def jac_all(self, theta: np.ndarray, data: np.ndarray) -> np.ndarray:
        """Return the ``(n, q, d)`` stack of Jacobians ``dg_j / dtheta_k``."""
        raise NotImplementedError

    def g(self, theta, x) -> np.ndarray:
        return self.g_all(np.asarray(theta, float), np.atleast_2d(np.asarray(x, float)))[0]

    def grad_g(self, theta, x) -> np.ndarray:
        return self.jac_all(np.asarray(theta, float), np.atleast_2d(np.asarray(x, float)))[0]

    def options(self) -> dict:
        """Constructor options, echoed into run reports."""
        return {}


class MeanModel(EstimatingModel):
    """``g(theta, x) = theta - x``; the Jacobian is the identity."""

    name = "mean"

    def __init__(self, p: int):
        if p < 1:
            raise ValueError("dimension p must be >= 1")
        self.d = self.q = int(p)

    def g_all(self, theta, data):
        return np.asarray(theta, float)[None, :] - data

    def jac_all(self, theta, data):
        return np.broadcast_to(np.eye(self.d), (data.shape[0], self.d, self.d))

    def options(self):
        return {"p": self.d}


class ConstrainedLogisticModel(EstimatingModel):
    """Logistic regression of a binary ``y`` on a binary ``x`` with the
    marginal mean of ``y`` pinned to a known ``rate``.

    Data rows are ``(x, y)``.  With ``a = sigmoid(b0 + b1 x)``::

        g = (y - a, x (y - a), y - rate)

    The third equation carries no parameter dependence, so ``q = 3`` exceeds
    ``d = 2``.  Nothing enforces ``q <= d``; the boundary-divergence theory
    assumes it and may not cover this model.
    """

    name = "logistic-constrained"
    d = 2
    q = 3

    def __init__(self, rate: float = FERTILITY_RATE):
        if not 0.0 < rate < 1.0:
            raise ValueError("rate must lie in (0, 1)")
        self.rate = float(rate)

    def g_all(self, theta, data):
        x, y = data[:, 0], data[:, 1]
        # expit is overflow safe for any finite argument
        resid = y - expit(theta[0] + theta[1] * x)
        return np.column_stack([resid, x * resid, y - self.rate])

    def jac_all(self, theta, data):
        x = data[:, 0]
        a = expit(theta[0] + theta[1] * x)
        s = -a * (1.0 - a)
        jac = np.zeros((data.shape[0], 3, 2))
        jac[:, 0, 0] = s
        jac[:, 0, 1] = s * x
        jac[:, 1, 0] = s * x
        jac[:, 1, 1] = s * x * x
        return jac

    def options(self):
        return {"rate": self.rate}


@dataclass
class RowFunctionModel(EstimatingModel):
    """Wrap per-observation callables ``g(theta, x)`` and ``grad_g(theta, x)``.

    Convenient for prototyping; evaluation loops over rows in Python.
    """

    g_row: Callable[[np.ndarray, np.ndarray], np.ndarray]
    grad_g_row: Callable[[np.ndarray, np.ndarray], np.ndarray]
    d: int
    q: int
    name: str = "custom"

    def g_all(self, theta, data):
        return np.array([np.atleast_1d(self.g_row(theta, x)) for x in data], dtype=float)

    def jac_all(self, theta, data):
        return np.array(
            [np.reshape(self.grad_g_row(theta, x), (self.q, self.d)) for x in data],
            dtype=float,
        )


def mean_model(p: int) -> MeanModel:
    return MeanModel(p)


def constrained_logistic_model(rate: float = FERTILITY_RATE) -> ConstrainedLogisticModel:
    return ConstrainedLogisticModel(rate)


def check_jacobian(model: EstimatingModel, theta, data, h: float = 1e-6) -> float:
    """Largest relative discrepancy between ``model.jac_all`` and central
    differences of ``model.g_all`` at ``theta``.

    The relative error of each ``(i, j)`` Jacobian row is measured against
    ``max(|analytic row|, 1)``.
    """
    theta = np.asarray(theta, float)
    data = as_dataset(data)
    analytic = model.jac_all(theta, data)
    numeric = np.empty_like(analytic)
    for k in range(theta.size):
        step = np.zeros_like(theta)
        step[k] = h
        numeric[:, :, k] = (model.g_all(theta + step, data) - model.g_all(theta - step, data)) / (2 * h)
    err = np.linalg.norm(analytic - numeric, axis=2)
    scale = np.maximum(np.linalg.norm(analytic, axis=2), 1.0)
    return float(np.max(err / scale))


def fertility_intercept(beta1: float, x_rate: float, rate: float = FERTILITY_RATE) -> float:
    """Intercept ``b0`` giving marginal ``P(y = 1) = rate`` when
    ``x ~ Bernoulli(x_rate)`` and ``P(y = 1 | x) = sigmoid(b0 + b1 x)``."""

    def marginal(b0):
        return (1 - x_rate) * expit(b0) + x_rate * expit(b0 + beta1) - rate

    return brentq(marginal, -50.0, 50.0, xtol=1e-14)


def synthetic_fertility_data(n: int, beta, x_rate: float, seed=None) -> np.ndarray:
    """Draw ``n`` rows ``(x, y)`` with ``x ~ Bernoulli(x_rate)`` and
    ``y | x ~ Bernoulli(sigmoid(b0 + b1 x))``.

    Stands in for the fertility survey data, which is not public.
    """
    if n < 10:
        raise ValueError("n must be >= 10")
    if not 0.0 < x_rate < 1.0:
        raise ValueError("x_rate must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    x = (rng.random(n) < x_rate).astype(float)
    prob = expit(beta[0] + beta[1] * x)
    y = (rng.random(n) < prob).astype(float)
    return np.column_stack([x, y])
