"""Exact solvers: values, optimal values, soft values, occupancies, controllability.

Policy evaluation and occupancy measures go through direct dense linear solves
(the systems have at most S unknowns and (I - gamma*T) is strictly diagonally
dominant for gamma < 1), so they carry no iteration error. Only the two
fixed-point solvers iterate, via the kernels in :mod:`rewardlab._kernels`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConvergenceError
from .mdp import ActionSetPolicy, Mdp, RewardTable, StochasticPolicy, enumerate_action_tuples

DEFAULT_TOL = 1e-10
MAX_ITER = 10**6
TIE_TOL = 1e-8            # membership tolerance for optimal-action sets
CONTROL_ATOL = 1e-9       # entry-measure spread above which a state counts as controllable
CONTROL_ENUM_CAP = 4096   # controllability enumerates policies up to here
CONTROL_SAMPLES = 512     # random policies used beyond the cap


@dataclass(frozen=True)
class RewardVector:
    """Expected immediate reward per (s, a): r[s,a] = E_{S'~tau(s,a)}[R(s,a,S')]."""

    r: np.ndarray  # (S, A)

    @property
    def flat(self) -> np.ndarray:
        return self.r.reshape(-1)


@dataclass(frozen=True)
class ValueBundle:
    v: np.ndarray   # (S,)
    q: np.ndarray   # (S, A)
    j: float


@dataclass(frozen=True)
class OptimalBundle:
    q_star: np.ndarray      # (S, A)
    v_star: np.ndarray      # (S,)
    a_star: np.ndarray      # (S, A), <= 0
    opt_sets: ActionSetPolicy
    residual: float


@dataclass(frozen=True)
class SoftBundle:
    q_soft: np.ndarray  # (S, A)
    v_soft: np.ndarray  # (S,)
    alpha: float
    residual: float


@dataclass(frozen=True)
class OccupancyVector:
    """Discounted state-action visitation d[s,a]; sums to 1/(1-gamma)."""

    d: np.ndarray  # (S, A)

    @property
    def state_marginal(self) -> np.ndarray:
        return self.d.sum(axis=1)

    @property
    def flat(self) -> np.ndarray:
        return self.d.reshape(-1)


@dataclass(frozen=True)
class ControllableStates:
    """Set-like result of controllable_states; ``sampled`` flags the fallback path."""

    states: frozenset
    sampled: bool = False

    def __contains__(self, s) -> bool:
        return int(s) in self.states

    def __iter__(self):
        return iter(sorted(self.states))

    def __len__(self) -> int:
        return len(self.states)

    def __bool__(self) -> bool:
        return bool(self.states)


def reward_vector(r: RewardTable, mdp: Mdp) -> RewardVector:
    """Collapse R(s,a,s') to its tau-expectation per (s,a)."""
    return RewardVector(np.einsum("sap,sap->sa", mdp.transition, r.values))


def _policy_matrices(mdp: Mdp, r: RewardTable, probs: np.ndarray):
    t_pi = np.einsum("sa,sap->sp", probs, mdp.transition)
    rsa = np.einsum("sap,sap->sa", mdp.transition, r.values)
    r_pi = (probs * rsa).sum(axis=1)
    return t_pi, r_pi, rsa


def policy_evaluate(mdp: Mdp, r: RewardTable, pi: StochasticPolicy) -> ValueBundle:
    """Exact V^pi, Q^pi, and J via the (I - gamma*T^pi) linear system."""
    gamma = mdp.discount
    t_pi, r_pi, rsa = _policy_matrices(mdp, r, pi.probs)
    n = mdp.n_states
    v = np.linalg.solve(np.eye(n) - gamma * t_pi, r_pi)
    residual = np.abs(v - (r_pi + gamma * t_pi @ v)).max()
    if residual > 1e-10:
        raise ConvergenceError("policy evaluation residual too large", residual=residual)
    q = rsa + gamma * (mdp.transition @ v)
    return ValueBundle(v=v, q=q, j=float(mdp.initial @ v))


def optimal_values(
    mdp: Mdp,
    r: RewardTable,
    tol: float = DEFAULT_TOL,
    tie_tol: float = TIE_TOL,
    max_iter: int = MAX_ITER,
) -> OptimalBundle:
    """Value iteration to sup-norm residual tol, with tie-tolerant argmax sets."""
    gamma = mdp.discount
    rsa = np.einsum("sap,sap->sa", mdp.transition, r.values)
    v, iters = _kernels.value_iteration(mdp.transition, rsa, gamma, tol, max_iter)
    if iters < 0:
        q = rsa + gamma * (mdp.transition @ v)
        residual = float(np.abs(q.max(axis=1) - v).max())
        raise ConvergenceError(
            f"value iteration did not reach tol={tol} within {max_iter} iterations",
            residual=residual,
            iterations=max_iter,
        )
    q_star = rsa + gamma * (mdp.transition @ v)
    v_star = q_star.max(axis=1)
    residual = float(np.abs(v_star - v).max())
    a_star = q_star - v_star[:, None]
    opt_sets = ActionSetPolicy(
        tuple(frozenset(np.flatnonzero(a_star[s] >= -tie_tol).tolist()) for s in range(mdp.n_states))
    )
    return OptimalBundle(q_star=q_star, v_star=v_star, a_star=a_star, opt_sets=opt_sets, residual=residual)


def soft_optimal_values(
    mdp: Mdp,
    r: RewardTable,
    alpha: float,
    tol: float = DEFAULT_TOL,
    max_iter: int = MAX_ITER,
) -> SoftBundle:
    """Entropy-regularized value iteration: v(s) = alpha*log sum_a exp(q(s,a)/alpha)."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    gamma = mdp.discount
    rsa = np.einsum("sap,sap->sa", mdp.transition, r.values)
    v, iters = _kernels.soft_value_iteration(mdp.transition, rsa, gamma, alpha, tol, max_iter)
    if iters < 0:
        raise ConvergenceError(
            f"soft value iteration did not reach tol={tol} within {max_iter} iterations",
            iterations=max_iter,
        )
    q_soft = rsa + gamma * (mdp.transition @ v)
    m = q_soft.max(axis=1)
    v_soft = m + alpha * np.log(np.exp((q_soft - m[:, None]) / alpha).sum(axis=1))
    residual = float(np.abs(v_soft - v).max())
    return SoftBundle(q_soft=q_soft, v_soft=v_soft, alpha=float(alpha), residual=residual)


def occupancy(mdp: Mdp, pi: StochasticPolicy) -> OccupancyVector:
    """Solve w = mu0 + gamma*(T^pi)' w, then d[s,a] = w[s] * pi(a|s)."""
    gamma = mdp.discount
    t_pi = np.einsum("sa,sap->sp", pi.probs, mdp.transition)
    n = mdp.n_states
    w = np.linalg.solve(np.eye(n) - gamma * t_pi.T, mdp.initial)
    return OccupancyVector(w[:, None] * pi.probs)


def _state_weights_batch(mdp: Mdp, prob_batch: np.ndarray) -> np.ndarray:
    """w_pi for a (N, S, A) batch of policies, via batched linear solves."""
    gamma = mdp.discount
    n = mdp.n_states
    t = np.einsum("nsa,sap->nsp", prob_batch, mdp.transition)
    lhs = np.eye(n)[None, :, :] - gamma * np.swapaxes(t, 1, 2)
    rhs = np.broadcast_to(mdp.initial, (prob_batch.shape[0], n))
    return np.linalg.solve(lhs, rhs[:, :, None])[:, :, 0]


def evaluate_action_tuples(mdp: Mdp, rsa: np.ndarray, actions: np.ndarray) -> np.ndarray:
    """J for a (N, S) batch of deterministic policies, via batched solves."""
    gamma = mdp.discount
    n = mdp.n_states
    srange = np.arange(n)
    t = mdp.transition[srange[None, :], actions, :]          # (N, S, S)
    r_pi = rsa[srange[None, :], actions]                     # (N, S)
    lhs = np.eye(n)[None, :, :] - gamma * t
    v = np.linalg.solve(lhs, r_pi[:, :, None])[:, :, 0]
    return v @ mdp.initial


def evaluate_policy_batch(mdp: Mdp, rsa: np.ndarray, prob_batch: np.ndarray) -> np.ndarray:
    """J for a (N, S, A) batch of stochastic policies."""
    gamma = mdp.discount
    n = mdp.n_states
    t = np.einsum("nsa,sap->nsp", prob_batch, mdp.transition)
    r_pi = (prob_batch * rsa[None, :, :]).sum(axis=2)
    lhs = np.eye(n)[None, :, :] - gamma * t
    v = np.linalg.solve(lhs, r_pi[:, :, None])[:, :, 0]
    return v @ mdp.initial


def _one_hot_batch(actions: np.ndarray, n_actions: int) -> np.ndarray:
    n, s = actions.shape
    out = np.zeros((n, s, n_actions))
    out[np.arange(n)[:, None], np.arange(s)[None, :], actions] = 1.0
    return out


def controllable_states(
    mdp: Mdp,
    cap: int = CONTROL_ENUM_CAP,
    n_samples: int = CONTROL_SAMPLES,
    seed: int = 0,
    atol: float = CONTROL_ATOL,
) -> ControllableStates:
    """States whose discounted entry measure (the t>=1 part of w) varies with the policy.

    Enumerates all deterministic policies when A^S fits under ``cap``;
    otherwise falls back to seeded random policies and flags the result
    as sampled.
    """
    n_policies = mdp.n_actions**mdp.n_states
    if n_policies <= cap:
        actions = enumerate_action_tuples(mdp.n_states, mdp.n_actions, cap=cap)
        batch = _one_hot_batch(actions, mdp.n_actions)
        sampled = False
    else:
        rng = np.random.default_rng(seed)
        batch = rng.dirichlet(np.ones(mdp.n_actions), size=(n_samples, mdp.n_states))
        sampled = True
    w = _state_weights_batch(mdp, batch)
    entry = w - mdp.initial[None, :]  # the discounted entry sum starts at t=1
    spread = entry.max(axis=0) - entry.min(axis=0)
    states = frozenset(np.flatnonzero(spread > atol).tolist())
    return ControllableStates(states=states, sampled=sampled)


def truncation_bias(mdp: Mdp, r: RewardTable, horizon: int) -> float:
    """Upper bound on |J - E[truncated return]| for a rollout cut at ``horizon``."""
    rmax = float(np.abs(r.values).max())
    return mdp.discount**horizon * rmax / (1.0 - mdp.discount)


def mc_return(
    mdp: Mdp,
    r: RewardTable,
    pi: StochasticPolicy,
    horizon: int,
    n: int,
    seed: int,
) -> tuple[float, float]:
    """Monte-Carlo estimate of J from n truncated rollouts; deterministic in seed."""
    rng = np.random.default_rng(seed)
    gamma = mdp.discount
    cdf_pi = np.cumsum(pi.probs, axis=1)
    cdf_tau = np.cumsum(mdp.transition, axis=2)

    states = np.searchsorted(np.cumsum(mdp.initial), rng.random(n), side="right")
    states = np.minimum(states, mdp.n_states - 1)
    totals = np.zeros(n)
    disc = 1.0
    for _ in range(horizon):
        u = rng.random(n)
        acts = (u[:, None] > cdf_pi[states]).sum(axis=1)
        acts = np.minimum(acts, mdp.n_actions - 1)
        u = rng.random(n)
        nxt = (u[:, None] > cdf_tau[states, acts]).sum(axis=1)
        nxt = np.minimum(nxt, mdp.n_states - 1)
        totals += disc * r.values[states, acts, nxt]
        disc *= gamma
        states = nxt
    mean = float(totals.mean())
    stderr = float(totals.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return mean, stderr
