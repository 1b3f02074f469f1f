"""Bayesian empirical likelihood posteriors sampled with Hamiltonian Monte Carlo."""
from .diagnostics import ChainSummary, autocorrelation, effective_sample_size, summarize
from .el import ELSolution, SolverSettings, evaluate_g, grad_log_el, log_el, solve_lambda
from .hmc import (
    ChainResult,
    HMCConfig,
    InfeasibleStartError,
    PhasePoint,
    hmc_update,
    kinetic_energy,
    leapfrog,
    run_chain,
    sample,
)
from .models import (
    FERTILITY_RATE,
    SQUARE_DATA,
    DataError,
    EstimatingModel,
    RowFunctionModel,
    check_jacobian,
    constrained_logistic_model,
    fertility_intercept,
    mean_model,
    synthetic_fertility_data,
)
from .posterior import Posterior, PosteriorEval, Prior, evaluate_potential, flat_prior, normal_prior

__version__ = "0.1.0"
