"""Empirical likelihood at a fixed parameter value.

For estimating-equation values ``g_i = g(theta, x_i)`` the empirical
likelihood maximises ``sum(log w_i)`` over probability weights subject to
``sum(w_i g_i) = 0``.  The optimum has the form
``w_i = 1 / (n (1 + lam' g_i))`` where the multiplier ``lam`` solves
``sum(g_i / (1 + lam' g_i)) = 0``.

``lam`` is found by damped Newton on the convex dual
``f(lam) = -sum(logstar(1 + lam' g_i))``, where ``logstar`` is ``log`` above
``1/n`` and its second order Taylor extension below, so ``f`` is finite
everywhere.  There is no explicit convex hull test: when the origin is not
inside the hull of the ``g_i``, ``lam`` runs off to infinity and the solve is
reported infeasible.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .models import DataError, EstimatingModel, as_dataset

__all__ = [
    "SolverSettings",
    "ELSolution",
    "evaluate_g",
    "solve_lambda",
    "log_el",
    "grad_log_el",
]


@dataclass(frozen=True)
class SolverSettings:
    """Controls for the multiplier solve.

    tol : bound on ``||sum_i g_i / (1 + lam' g_i)||`` at convergence.
    max_iter : Newton iteration cap.
    lambda_cap : ``||lam||`` beyond which the problem is declared infeasible.
    """

    tol: float = 1e-8
    max_iter: int = 100
    lambda_cap: float = 1e10

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.lambda_cap > 0:
            raise ValueError("lambda_cap must be positive")


@dataclass(frozen=True)
class ELSolution:
    weights: np.ndarray | None
    lam: np.ndarray
    log_el: float
    feasible: bool
    iterations: int
    residual_norm: float

    @property
    def n(self) -> int:
        return 0 if self.weights is None else self.weights.size


def _logstar(z: np.ndarray, n: int):
    """Value, first and second derivative of the pseudo-logarithm."""
    lo = z < 1.0 / n
    if not lo.any():
        inv = 1.0 / z
        return np.log(z), inv, -inv * inv
    val = np.empty_like(z)
    d1 = np.empty_like(z)
    d2 = np.empty_like(z)
    hi = ~lo
    zh = z[hi]
    val[hi] = np.log(zh)
    d1[hi] = 1.0 / zh
    d2[hi] = -1.0 / (zh * zh)
    nz = n * z[lo]
    val[lo] = -np.log(n) - 1.5 + 2.0 * nz - 0.5 * nz * nz
    d1[lo] = 2.0 * n - n * nz
    d2[lo] = -float(n * n)
    return val, d1, d2


def evaluate_g(model: EstimatingModel, theta, data) -> np.ndarray:
    """Stack ``g(theta, x_i)`` into an ``(n, q)`` matrix, checking its shape
    and finiteness."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (model.d,):
        raise DataError(f"theta has shape {theta.shape}, model expects ({model.d},)")
    if not np.all(np.isfinite(theta)):
        raise DataError("theta contains non-finite entries")
    data = as_dataset(data)
    G = np.asarray(model.g_all(theta, data), dtype=float)
    if G.shape != (data.shape[0], model.q):
        raise DataError(f"model returned G of shape {G.shape}, expected ({data.shape[0]}, {model.q})")
    if not np.all(np.isfinite(G)):
        raise DataError("estimating function returned non-finite values")
    return G


def _infeasible(q: int, lam, iterations: int, residual: float) -> ELSolution:
    return ELSolution(
        weights=None,
        lam=np.asarray(lam, float) if lam is not None else np.full(q, np.nan),
        log_el=-np.inf,
        feasible=False,
        iterations=iterations,
        residual_norm=residual,
    )


def solve_lambda(G, settings: SolverSettings | None = None) -> ELSolution:
    """Solve for the Lagrange multiplier and optimal weights given the
    ``(n, q)`` matrix ``G`` of estimating-equation values.

    Returns an infeasible solution (``log_el = -inf``) when the multiplier
    diverges past ``settings.lambda_cap``, when ``max_iter`` is exhausted
    with the residual above ``settings.tol``, or when the converged weights
    are not all strictly positive.
    """
    settings = settings or SolverSettings()
    G = np.asarray(G, dtype=float)
    if G.ndim == 1:
        G = G[:, None]
    if not np.all(np.isfinite(G)):
        raise DataError("G contains non-finite entries")
    n, q = G.shape

    lam = np.zeros(q)
    z = np.ones(n)
    val, d1, d2 = _logstar(z, n)
    f = -val.sum()
    residual = np.inf
    converged = False
    it = 0
    for it in range(1, settings.max_iter + 1):
        grad = -G.T @ d1
        residual = float(np.linalg.norm(grad))
        hess = (G * (-d2)[:, None]).T @ G
        try:
            step = -np.linalg.solve(hess, grad)
            if not np.all(np.isfinite(step)):
                raise np.linalg.LinAlgError
        except np.linalg.LinAlgError:
            ridge = 1e-10 * max(np.trace(hess) / q, np.finfo(float).tiny)
            step = -np.linalg.lstsq(hess + ridge * np.eye(q), grad, rcond=None)[0]
        # f differences below this are rounding noise
        flat = 8 * np.finfo(float).eps * max(1.0, abs(f)) * n
        if residual <= settings.tol:
            # polishing: take full steps only while they halve the residual
            lam_new = lam + step
            z_new = 1.0 + G @ lam_new
            val_new, d1_new, d2_new = _logstar(z_new, n)
            f_new = -val_new.sum()
            if not (f_new <= f + flat and np.linalg.norm(G.T @ d1_new) < 0.5 * residual):
                converged = True
                break
        else:
            # step halving until the dual objective decreases
            t = 1.0
            for _ in range(60):
                lam_new = lam + t * step
                z_new = 1.0 + G @ lam_new
                val_new, d1_new, d2_new = _logstar(z_new, n)
                f_new = -val_new.sum()
                if f_new < f or (f_new <= f + flat and np.linalg.norm(G.T @ d1_new) < residual):
                    break
                t *= 0.5
            else:
                # no decrease at working precision
                break
        lam, z, f, d1, d2 = lam_new, z_new, f_new, d1_new, d2_new
        if np.linalg.norm(lam) > settings.lambda_cap:
            return _infeasible(q, lam, it, residual)
    else:
        grad = -G.T @ d1
        residual = float(np.linalg.norm(grad))
        converged = residual <= settings.tol

    if not converged or np.any(z * n < 1.0 - 1e-12):
        return _infeasible(q, lam, it, residual)
    weights = 1.0 / (n * z)
    # off the hull the dual is unbounded and its gradient fades as the weights
    # shrink; a genuine optimum has weights summing to one
    if not np.all(weights > 0) or abs(weights.sum() - 1.0) > 1e-6:
        return _infeasible(q, lam, it, residual)
    return ELSolution(
        weights=weights,
        lam=lam,
        log_el=float(np.sum(np.log(weights))),
        feasible=True,
        iterations=it,
        residual_norm=float(np.linalg.norm(weights @ G)),
    )


def log_el(model: EstimatingModel, theta, data, settings: SolverSettings | None = None):
    """Log empirical likelihood at ``theta``.

    Returns ``(value, solution)``; ``value`` is ``-inf`` off the support.
    """
    sol = solve_lambda(evaluate_g(model, theta, data), settings)
    return sol.log_el, sol


def grad_log_el(model: EstimatingModel, theta, data, solution: ELSolution) -> np.ndarray:
    """Gradient of the log empirical likelihood,
    ``-n sum_i w_i lam' dg(theta, x_i)``.

    Only the multiplier and weights enter; no derivative of the multiplier
    is needed.
    """
    if not solution.feasible:
        raise ValueError("gradient is undefined at an infeasible parameter value")
    data = as_dataset(data)
    jac = np.asarray(model.jac_all(np.asarray(theta, float), data), dtype=float)
    n = solution.weights.size
    return -n * np.einsum("i,j,ijk->k", solution.weights, solution.lam, jac)
