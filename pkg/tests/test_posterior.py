import numpy as np
import pytest

from bayesel import Posterior, evaluate_potential, flat_prior, grad_log_el, log_el, normal_prior
from bayesel.posterior import Prior
from oracles import central_diff, rel_err


def test_potential_at_sample_mean(mean2, square):
    ev = evaluate_potential(mean2, normal_prior(0, 1), [0.0, 0.0], square)
    assert ev.feasible
    assert ev.potential == pytest.approx(8 * np.log(8), abs=1e-12)
    assert np.allclose(ev.grad_potential, 0.0)


def test_infeasible_potential(mean2, square):
    ev = evaluate_potential(mean2, normal_prior(0, 1), [1.5, 0.0], square)
    assert not ev.feasible and ev.potential == np.inf and ev.grad_potential is None


def test_flat_prior_gradient_is_negated_el_gradient(mean2, square):
    theta = np.array([0.3, -0.5])
    ev = evaluate_potential(mean2, flat_prior(), theta, square)
    _, sol = log_el(mean2, theta, square)
    assert np.array_equal(ev.grad_potential, -grad_log_el(mean2, theta, square, sol))
    assert ev.potential == -sol.log_el


def test_prior_minus_infinity_is_infeasible(mean2, square):
    half = Prior(lambda t: 0.0 if t[0] > 0 else -np.inf, lambda t: np.zeros(2))
    assert evaluate_potential(mean2, half, [-0.2, 0.0], square).potential == np.inf
    assert evaluate_potential(mean2, half, [0.2, 0.0], square).feasible


def test_normal_prior_gradient(rng):
    prior = normal_prior([1.0, -2.0], [0.5, 4.0])
    for theta in rng.normal(size=(20, 2)) * 3:
        fd = central_diff(prior.log_density, theta)
        assert rel_err(prior.grad_log_density(theta), fd) <= 1e-4


def test_potential_gradient_finite_differences(mean2, square, logistic, fertility_data, rng):
    post = Posterior(mean2, normal_prior(0, 1), square)
    for theta in rng.uniform(-0.9, 0.9, size=(20, 2)):
        fd = central_diff(lambda t: post(t).potential, theta)
        assert rel_err(post(theta).grad_potential, fd) <= 1e-4
    post = Posterior(logistic, normal_prior(0, 1e4), fertility_data)
    for theta in ([-3.2, 0.55], [-4.0, 2.3], [-3.5, 1.5]):
        fd = central_diff(lambda t: post(t).potential, theta)
        assert rel_err(post(theta).grad_potential, fd) <= 1e-4


def test_posterior_gradient_diverges_at_boundary(mean2, square):
    post = Posterior(mean2, normal_prior(0, 1), square)
    norms = [np.linalg.norm(post([1 - 2.0 ** -k, 0.3]).grad_potential) for k in range(4, 21)]
    assert np.all(np.diff(norms) > 0)
    assert norms[-1] > 1e6
