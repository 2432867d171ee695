import math

import numpy as np
import pytest

from chroma.exact import exact_moments
from chroma.graph import Graph, cycle
from chroma.solver import (
    fd_jacobian, full_lambda, jacobian, lipschitz_probe, psi, random_ball_lambdas, solve_lambda,
)


def test_psi_symmetry_and_closed_form():
    assert np.allclose(psi(cycle(6), 3, np.ones(3)), 2)
    assert psi(Graph.from_edges(1, []), 2, [2.0, 1.0]) == pytest.approx([2 / 3])
    assert np.allclose(psi(cycle(6), 3, [1.0, 1.0]), 2)


def test_full_lambda_validation():
    with pytest.raises(ValueError):
        full_lambda([1.0, -1.0], 3)
    with pytest.raises(ValueError):
        full_lambda([1.0], 3)


def test_psi_mcmc_agrees_with_exact():
    G, q = cycle(6), 5
    lam = np.array([1.2, 1.0, 1.0, 1.0, 1.0])
    mean, se = psi(G, q, lam, "mcmc", samples=100_000, T=500, seed=1)
    assert np.all(np.abs(mean - psi(G, q, lam)) <= 3 * se + 1e-12)


def test_psi_mcmc_requires_enough_colors():
    with pytest.raises(ValueError, match="2Δ"):
        psi(cycle(6), 3, [1.2, 1.0, 1.0], "mcmc", samples=10)


def test_jacobian_identities():
    G = cycle(5)
    assert np.allclose(jacobian(G, 4, np.ones(4)), exact_moments(G, 4, np.ones(4)).sigma)
    lam = np.array([1.1, 0.9, 1.05, 1.0])
    J = jacobian(G, 4, lam)
    F = fd_jacobian(G, 4, lam)
    assert np.allclose(J, F, rtol=1e-5, atol=1e-8)
    assert not np.allclose(J, J.T)
    J2 = jacobian(G, 4, [1.3, 1.3, 1.3, 1.0])
    assert np.allclose(J2, J2.T)


def test_solve_equitable_in_zero_iterations():
    res = solve_lambda(cycle(12), 3, [4, 4])
    assert res.converged and res.iterations == 0 and res.lam == [1.0, 1.0, 1.0]


def test_solve_infeasible_stalls_on_boundary():
    res = solve_lambda(cycle(6), 3, [6, 0])
    assert not res.converged and res.on_boundary
    assert res.status in ("stalled", "max-iterations")
    assert np.linalg.norm(np.log(res.lam)) <= math.log(1.2) * (1 + 1e-12)


def test_solve_far_target_reports_best_iterate():
    """(10, 8) on C24 needs λ ≈ (5.39, 1.69), far outside the 0.2 ball."""
    res = solve_lambda(cycle(24), 3, [10, 8], ball_radius=0.2)
    assert not res.converged and res.on_boundary and not res.inside_proven_radius
    wide = solve_lambda(cycle(24), 3, [10, 8], ball_radius=5.0)
    assert wide.converged and wide.residual <= 1e-6
    assert np.allclose(psi(cycle(24), 3, wide.lam), [10, 8], atol=1e-6)
    assert wide.lam[0] == pytest.approx(5.391, abs=1e-3)


def test_residual_decreases_per_step():
    G = cycle(12)
    target = psi(G, 3, [1.15, 0.9, 1.0])
    prev = math.inf
    for k in range(1, 6):
        res = solve_lambda(G, 3, target, max_newton_iters=k, tol=1e-14)
        assert res.residual < prev or res.converged
        prev = res.residual


def test_round_trip():
    G = cycle(12)
    for lam in random_ball_lambdas(3, 5, 0.2, seed=4):
        res = solve_lambda(G, 3, psi(G, 3, lam), tol=1e-10)
        assert res.converged
        assert np.abs(np.array(res.lam) - lam).max() <= 1e-6


def test_random_ball():
    lams = random_ball_lambdas(4, 200, 0.2, seed=0)
    assert (lams[:, -1] == 1).all()
    assert (np.linalg.norm(np.log(lams[:, :-1]), axis=1) <= math.log(1.2) + 1e-12).all()


def test_lipschitz_probe():
    G = cycle(12)
    p = lipschitz_probe(G, 3, 100, 0.1, seed=0)
    assert 0 < p.c_lower <= p.C_upper < math.inf
    # ΔΨ = Σ̄ Δθ with Σ̄ the path average of Σ, so c_lower·n sits near or above the smallest eigenvalue
    assert p.c_lower * 12 >= 0.9 * p.min_sigma_eig
    assert p.min_sigma_eig <= p.C_upper * 12 * 1.1
    assert p.C_upper * 12 <= p.max_jacobian_eig_over_n * 12 * 1.1
