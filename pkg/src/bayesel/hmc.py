"""Hamiltonian Monte Carlo with leapfrog integration.

The potential is supplied as a callable ``theta -> (U, grad_U)``; ``U = inf``
marks a point outside the support.  Trajectories that step outside the
support are aborted and the proposal is rejected.  Momenta are drawn from
``N(0, p_variance * I)``.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .el import SolverSettings
from .models import EstimatingModel
from .posterior import Posterior, Prior

__all__ = [
    "InfeasibleStartError",
    "HMCConfig",
    "PhasePoint",
    "Trajectory",
    "LeapfrogResult",
    "Update",
    "ChainResult",
    "kinetic_energy",
    "leapfrog",
    "hmc_update",
    "sample",
    "run_chain",
]

Energy = Callable[[np.ndarray], "tuple[float, np.ndarray | None]"]


class InfeasibleStartError(ValueError):
    """The initial value lies outside the posterior support."""


@dataclass(frozen=True)
class HMCConfig:
    n_samples: int
    lf_steps: int
    epsilon: float | tuple
    p_variance: float = 1.0
    seed: int | None = None
    detailed: bool = False

    def __post_init__(self):
        if self.n_samples < 2:
            raise ValueError("n_samples must be >= 2")
        if self.lf_steps < 1:
            raise ValueError("lf_steps must be >= 1")
        if np.any(np.asarray(self.epsilon, float) <= 0):
            raise ValueError("epsilon must be positive")
        if not self.p_variance > 0:
            raise ValueError("p_variance must be positive")

    def as_dict(self) -> dict:
        out = asdict(self)
        eps = np.asarray(self.epsilon, float)
        out["epsilon"] = eps.tolist()
        return out


@dataclass(frozen=True)
class PhasePoint:
    theta: np.ndarray
    p: np.ndarray


@dataclass
class Trajectory:
    """Positions and momenta at whole leapfrog steps, starting point
    included.  An aborted trajectory ends at the offending position, whose
    momentum entry is NaN."""

    positions: list = field(default_factory=list)
    momenta: list = field(default_factory=list)

    def as_arrays(self):
        return np.array(self.positions), np.array(self.momenta)


@dataclass
class LeapfrogResult:
    end: PhasePoint | None
    potential: float
    grad: np.ndarray | None
    trajectory: Trajectory
    last_position: np.ndarray

    @property
    def aborted(self) -> bool:
        return self.end is None


@dataclass
class Update:
    next: np.ndarray
    proposed: np.ndarray
    accepted: bool
    trajectory: Trajectory
    potential: float
    grad: np.ndarray
    accept_prob: float


@dataclass
class ChainResult:
    samples: np.ndarray
    acceptance_rate: float
    proposed: np.ndarray
    acceptance: np.ndarray
    trajectories: list | None
    call: dict


def kinetic_energy(p, p_variance: float = 1.0) -> float:
    """``K(p) = p' M^{-1} p / 2`` for ``M = p_variance * I``."""
    p = np.asarray(p, float)
    return 0.5 * float(p @ p) / p_variance


def _feasible(U, grad) -> bool:
    return bool(np.isfinite(U)) and grad is not None and bool(np.all(np.isfinite(grad)))


def leapfrog(
    start: PhasePoint,
    energy: Energy,
    epsilon,
    lf_steps: int,
    p_variance: float = 1.0,
    record: bool = False,
    start_energy: tuple | None = None,
) -> LeapfrogResult:
    """Run ``lf_steps`` leapfrog steps from ``start``.

    Inner momentum half steps are fused into full steps.  If an intermediate
    position has infinite potential or a non-finite gradient the trajectory
    is aborted (``result.end is None``).
    """
    eps = np.asarray(epsilon, float)
    theta = np.array(start.theta, dtype=float)
    p = np.array(start.p, dtype=float)
    U, grad = start_energy if start_energy is not None else energy(theta)
    if not _feasible(U, grad):
        raise InfeasibleStartError("leapfrog started outside the support")

    traj = Trajectory()
    if record:
        traj.positions.append(theta.copy())
        traj.momenta.append(p.copy())

    with np.errstate(over="ignore", invalid="ignore"):
        p = p - 0.5 * eps * grad
        for step in range(lf_steps):
            theta = theta + eps * p / p_variance
            if not np.all(np.isfinite(theta)):
                return _aborted(traj, theta, record)
            U, grad = energy(theta)
            if not _feasible(U, grad):
                return _aborted(traj, theta, record)
            if step < lf_steps - 1:
                if record:
                    traj.positions.append(theta.copy())
                    traj.momenta.append(p - 0.5 * eps * grad)
                p = p - eps * grad
            else:
                p = p - 0.5 * eps * grad
                if record:
                    traj.positions.append(theta.copy())
                    traj.momenta.append(p.copy())
            if not np.all(np.isfinite(p)):
                return _aborted(traj, theta, record)
    return LeapfrogResult(PhasePoint(theta, p), float(U), grad, traj, theta)


def _aborted(traj: Trajectory, theta, record: bool) -> LeapfrogResult:
    if record:
        traj.positions.append(np.array(theta, float))
        traj.momenta.append(np.full(np.shape(theta), np.nan))
    return LeapfrogResult(None, np.inf, None, traj, np.array(theta, float))


def hmc_update(
    current,
    energy: Energy,
    config: HMCConfig,
    rng: np.random.Generator,
    current_energy: tuple | None = None,
) -> Update:
    """One HMC transition: fresh momentum, leapfrog, Metropolis test.

    Exactly one normal vector and one uniform are drawn per call, aborted or
    not, so the random stream does not depend on the trajectory outcome.
    """
    theta = np.asarray(current, float)
    U0, grad0 = current_energy if current_energy is not None else energy(theta)
    p0 = rng.standard_normal(theta.size) * np.sqrt(config.p_variance)
    u = rng.random()
    res = leapfrog(
        PhasePoint(theta, p0),
        energy,
        config.epsilon,
        config.lf_steps,
        config.p_variance,
        record=config.detailed,
        start_energy=(U0, grad0),
    )
    if res.aborted:
        return Update(theta, res.last_position, False, res.trajectory, U0, grad0, 0.0)
    # momentum flip makes the proposal symmetric; K is unchanged by it
    p_star = -res.end.p
    H0 = U0 + kinetic_energy(p0, config.p_variance)
    H1 = res.potential + kinetic_energy(p_star, config.p_variance)
    log_ratio = H0 - H1
    accept_prob = 1.0 if log_ratio >= 0 else float(np.exp(log_ratio))
    if u < accept_prob:
        return Update(res.end.theta, res.end.theta, True, res.trajectory, res.potential, res.grad, accept_prob)
    return Update(theta, res.end.theta, False, res.trajectory, U0, grad0, accept_prob)


def sample(initial, energy: Energy, config: HMCConfig, call: dict | None = None) -> ChainResult:
    """Run a chain of ``config.n_samples`` rows (the initial value is row 0)
    against an arbitrary potential."""
    theta = np.asarray(initial, dtype=float).copy()
    U, grad = energy(theta)
    if not _feasible(U, grad):
        raise InfeasibleStartError(
            f"initial value {theta.tolist()} lies outside the posterior support; "
            "choose a starting point inside it (for a mean model, near the sample mean)"
        )
    rng = np.random.default_rng(config.seed)
    n_up = config.n_samples - 1
    d = theta.size
    samples = np.empty((config.n_samples, d))
    proposed = np.empty((n_up, d))
    acceptance = np.zeros(n_up, dtype=bool)
    trajectories = [] if config.detailed else None
    samples[0] = theta
    state = (U, grad)
    for k in range(n_up):
        upd = hmc_update(theta, energy, config, rng, current_energy=state)
        theta = upd.next
        state = (upd.potential, upd.grad)
        samples[k + 1] = theta
        proposed[k] = upd.proposed
        acceptance[k] = upd.accepted
        if trajectories is not None:
            trajectories.append(upd.trajectory.as_arrays())
    return ChainResult(
        samples=samples,
        acceptance_rate=float(acceptance.mean()),
        proposed=proposed,
        acceptance=acceptance,
        trajectories=trajectories,
        call=dict(call or {}, **config.as_dict(), initial=np.asarray(initial, float).tolist()),
    )


def run_chain(
    initial,
    model: EstimatingModel,
    prior: Prior,
    data,
    config: HMCConfig,
    settings: SolverSettings | None = None,
) -> ChainResult:
    """Sample the empirical-likelihood posterior of ``model`` under ``prior``."""
    post = Posterior(model, prior, data, settings)

    def energy(theta):
        ev = post(theta)
        return ev.potential, ev.grad_potential

    call = {
        "model": model.name,
        "model_options": model.options(),
        "prior": prior.name,
        "prior_options": prior.options,
        "tol": post.settings.tol,
    }
    return sample(initial, energy, config, call=call)
