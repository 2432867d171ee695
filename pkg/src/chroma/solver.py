"""The expectation map Ψ(λ) = E_λ[X_1..X_{q−1}] and its inversion.

λ_q is fixed to 1 throughout, so a fugacity is described either by its first
q−1 coordinates or by θ = ln λ_{1..q−1}. In θ-coordinates the Jacobian of Ψ
is exactly the covariance Σ, which is what Newton uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exact import exact_moments
from .glauber import class_vector, run_chains
from .graph import Graph
from .zero_probe import zero_free_radius


class SolverError(ValueError):
    pass


def full_lambda(lam, q: int) -> np.ndarray:
    lam = np.asarray(lam, float)
    if len(lam) == q - 1:
        lam = np.append(lam, 1.0)
    if len(lam) != q:
        raise ValueError(f"λ must have length {q - 1} or {q}")
    if np.any(lam <= 0):
        raise ValueError("λ must be strictly positive")
    return lam


def inside_proven_radius(lam, delta: int) -> bool:
    return bool(np.abs(np.asarray(lam, float) - 1).max() <= zero_free_radius(max(delta, 1)))


def psi(G: Graph, q: int, lam, estimator: str = "exact", samples: int = 100_000, T: int = 500, seed: int = 0):
    """Mean class sizes. ``estimator="mcmc"`` returns (mean, stderr) from Glauber samples."""
    lam = full_lambda(lam, q)
    if estimator == "exact":
        return exact_moments(G, q, lam).mu
    if estimator == "mcmc":
        return psi_mcmc(G, q, lam, samples, T, seed)
    raise ValueError(f"unknown estimator {estimator!r}")


def psi_mcmc(G: Graph, q: int, lam, samples: int, T: int, seed: int = 0):
    if q < 2 * G.max_degree + 1:
        raise ValueError(f"MCMC estimate needs q ≥ 2Δ+1 = {2 * G.max_degree + 1}")
    finals = run_chains(G, q, full_lambda(lam, q), T, samples, seed)
    X = np.stack([class_vector(c, q)[: q - 1] for c in finals]).astype(float)
    return X.mean(axis=0), X.std(axis=0, ddof=1) / math.sqrt(samples)


def jacobian(G: Graph, q: int, lam) -> np.ndarray:
    """dΨ/dλ = Σ · diag(λ_1..λ_{q−1})⁻¹."""
    lam = full_lambda(lam, q)
    return exact_moments(G, q, lam).sigma / lam[: q - 1][None, :]


def fd_jacobian(G: Graph, q: int, lam, h: float = 1e-4) -> np.ndarray:
    lam = full_lambda(lam, q)
    J = np.zeros((q - 1, q - 1))
    for k in range(q - 1):
        e = np.zeros(q)
        e[k] = h
        J[:, k] = (psi(G, q, lam + e) - psi(G, q, lam - e)) / (2 * h)
    return J


@dataclass
class SolveResult:
    lam: list
    achieved: list
    target: list
    residual: float
    iterations: int
    converged: bool
    inside_proven_radius: bool
    ball_radius: float
    on_boundary: bool
    status: str

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _project(theta: np.ndarray, rho: float) -> np.ndarray:
    r = np.linalg.norm(theta)
    return theta if r <= rho else theta * (rho / r)


def solve_lambda(G: Graph, q: int, target, ball_radius: float = 0.2, tol: float = 1e-9,
                 max_newton_iters: int = 50, max_halvings: int = 30) -> SolveResult:
    """Damped Newton for Ψ(λ) = target over the θ-ball ‖ln λ‖₂ ≤ ln(1 + ball_radius).

    Steps are δ = Σ⁻¹(target − Ψ), halved until the residual decreases and
    projected radially onto the ball. On failure the best iterate is returned.
    """
    target = np.asarray(target, float)
    if len(target) == q:
        target = target[: q - 1]
    if len(target) != q - 1:
        raise ValueError(f"target must have length {q - 1} or {q}")
    if np.any(target < 0) or target.sum() > G.n:
        raise ValueError("target must be non-negative with sum at most n")
    rho = math.log1p(ball_radius)

    def evaluate(theta):
        m = exact_moments(G, q, np.append(np.exp(theta), 1.0))
        return m.mu, m.sigma, float(np.linalg.norm(m.mu - target))

    theta = np.zeros(q - 1)
    mu, sigma, res = evaluate(theta)
    it = 0
    status = "converged"
    while res > tol:
        if it >= max_newton_iters:
            status = "max-iterations"
            break
        ev = np.linalg.eigvalsh(sigma)
        if ev.min() <= 1e-12 * max(ev.max(), 1e-300):
            raise SolverError("singular covariance")
        delta = np.linalg.solve(sigma, target - mu)
        step = 1.0
        for _ in range(max_halvings):
            cand = _project(theta + step * delta, rho)
            c_mu, c_sigma, c_res = evaluate(cand)
            if c_res < res:
                break
            step /= 2
        else:
            status = "stalled"
            break
        theta, mu, sigma, res = cand, c_mu, c_sigma, c_res
        it += 1
    lam = np.append(np.exp(theta), 1.0)
    return SolveResult(
        lam=lam.tolist(), achieved=mu.tolist(), target=target.tolist(), residual=res,
        iterations=it, converged=res <= tol, inside_proven_radius=inside_proven_radius(lam, G.max_degree),
        ball_radius=ball_radius, on_boundary=bool(np.linalg.norm(theta) >= rho * (1 - 1e-12)),
        status=status if res > tol else "converged",
    )


def random_ball_lambdas(q: int, count: int, ball_radius: float, seed: int = 0) -> np.ndarray:
    """λ with θ uniform in the ball ‖θ‖₂ ≤ ln(1 + ball_radius); λ_q = 1."""
    rng = np.random.default_rng(seed)
    d = q - 1
    dirs = rng.normal(size=(count, d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    r = math.log1p(ball_radius) * rng.random(count) ** (1 / d)
    return np.concatenate([np.exp(dirs * r[:, None]), np.ones((count, 1))], axis=1)


@dataclass
class LipschitzProbe:
    n_pairs: int
    C_upper: float
    c_lower: float
    max_jacobian_eig_over_n: float
    min_sigma_eig: float

    def to_json(self) -> dict:
        return dict(self.__dict__)


def lipschitz_probe(G: Graph, q: int, n_pairs: int, ball_radius: float = 0.1, seed: int = 0) -> LipschitzProbe:
    pts = random_ball_lambdas(q, 2 * n_pairs, ball_radius, seed)
    mus, eig_j, eig_s = [], [], []
    for lam in pts:
        m = exact_moments(G, q, lam)
        mus.append(m.mu)
        eig_s.append(np.linalg.eigvalsh(m.sigma).min())
        J = m.sigma / lam[: q - 1][None, :]
        eig_j.append(np.abs(np.linalg.eigvals(J)).max())
    C_up, c_lo = 0.0, math.inf
    n = G.n
    for a in range(n_pairs):
        la, lb = pts[2 * a], pts[2 * a + 1]
        dl = np.linalg.norm(la - lb)
        if dl == 0:
            continue
        dpsi = np.linalg.norm(mus[2 * a] - mus[2 * a + 1])
        C_up = max(C_up, dpsi / (n * dl))
        c_lo = min(c_lo, dpsi / (n * np.linalg.norm(np.log(la) - np.log(lb))))
    return LipschitzProbe(n_pairs, C_up, c_lo, max(eig_j) / n, float(min(eig_s)))
