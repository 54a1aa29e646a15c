"""Behavioural models as maps from rewards to policies, plus their inversions.

Three standard families (softmax-of-Q*, entropy-regularized, optimal-set) and
a probe family of argmax-preserving full-support variants. The inversion
oracles construct, for a given policy, a reward under which the corresponding
model reproduces that policy exactly; they are what make the robustness
theorems checkable end to end.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CertificationError
from .mdp import ActionSetPolicy, Mdp, RewardTable, StochasticPolicy
from .solve import optimal_values, soft_optimal_values

ARGMAX_ATOL = 1e-12  # probability tie tolerance used when certifying argmax sets


def _softmax_rows(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - z.max(axis=1, keepdims=True))
    return e / e.sum(axis=1, keepdims=True)


def boltzmann_policy(mdp: Mdp, r: RewardTable, beta: float, tol: float = 1e-10) -> StochasticPolicy:
    """pi(a|s) proportional to exp(beta * Q*(s,a)); full support for any beta > 0."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    q_star = optimal_values(mdp, r, tol=tol).q_star
    return StochasticPolicy(_softmax_rows(beta * q_star))


def mce_policy(mdp: Mdp, r: RewardTable, alpha: float) -> StochasticPolicy:
    """The unique entropy-regularized optimum: softmax of the soft Q at weight alpha."""
    bundle = soft_optimal_values(mdp, r, alpha)
    return StochasticPolicy(_softmax_rows(bundle.q_soft / alpha))


def optimal_set_policy(mdp: Mdp, r: RewardTable) -> ActionSetPolicy:
    """Map each state to the set of all optimal actions."""
    return optimal_values(mdp, r).opt_sets


@dataclass(frozen=True)
class FVariantSpec:
    """Parameters for an argmax-preserving full-support policy generator.

    ``mixture``: lam-mixture of two softmax-of-Q* policies (temperatures
    beta1, beta2). ``tempered-rank``: probabilities proportional to
    exp(beta * A*) raised to the power p, renormalized.
    """

    variant: str
    lam: float | None = None
    beta1: float | None = None
    beta2: float | None = None
    beta: float | None = None
    p: float | None = None

    def __post_init__(self):
        if self.variant == "mixture":
            if not (self.lam is not None and 0 < self.lam < 1):
                raise ValueError("mixture requires lam in (0, 1)")
            if not (self.beta1 and self.beta1 > 0 and self.beta2 and self.beta2 > 0):
                raise ValueError("mixture requires positive beta1, beta2")
        elif self.variant == "tempered-rank":
            if not (self.beta and self.beta > 0 and self.p and self.p > 0):
                raise ValueError("tempered-rank requires positive beta and p")
        else:
            raise ValueError(f"unknown variant {self.variant!r}")


def _certify_argmax(probs: np.ndarray, opt_sets: ActionSetPolicy) -> None:
    if np.any(probs <= 0):
        raise CertificationError("generated policy is not full support")
    for s in range(probs.shape[0]):
        row = probs[s]
        argmax = frozenset(np.flatnonzero(row >= row.max() - ARGMAX_ATOL).tolist())
        if argmax != opt_sets[s]:
            raise CertificationError(
                f"argmax set at state {s} is {sorted(argmax)}, expected {sorted(opt_sets[s])}"
            )


def fvariant_policy(mdp: Mdp, r: RewardTable, spec: FVariantSpec) -> StochasticPolicy:
    """Synthesize a policy from the variant family and certify its membership.

    Certification (full support plus argmax sets matching the optimal-action
    sets) runs on every synthesis; it is cheap at these sizes and guards any
    future variant whose algebra is less obvious.
    """
    bundle = optimal_values(mdp, r)
    a_star = bundle.a_star
    if spec.variant == "mixture":
        probs = spec.lam * _softmax_rows(spec.beta1 * a_star) + (1 - spec.lam) * _softmax_rows(
            spec.beta2 * a_star
        )
    else:  # tempered-rank: exp(beta*A*)^p renormalized
        probs = _softmax_rows(spec.p * spec.beta * a_star)
    _certify_argmax(probs, bundle.opt_sets)
    return StochasticPolicy(probs)


def _require_positive(probs: np.ndarray) -> None:
    if np.any(probs <= 0):
        raise ValueError("policy must assign positive probability to every action")


def invert_boltzmann(pi: StochasticPolicy, beta: float, mdp: Mdp) -> RewardTable:
    """A reward whose softmax-of-Q* policy at temperature beta is exactly ``pi``.

    Q(s,a) = log(pi(a|s)) / beta is its own optimal Q-function for the reward
    R(s,a,s') = Q(s,a) - gamma * max_a' Q(s',a') (the one-step backup returns Q
    unchanged), so re-synthesizing reproduces pi up to solver tolerance. The
    per-state free constant is fixed to zero; any shift gives another valid
    preimage, which is exactly the shaping/redistribution ambiguity.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    _require_positive(pi.probs)
    q = np.log(pi.probs) / beta
    v = q.max(axis=1)
    vals = q[:, :, None] - mdp.discount * v[None, None, :]
    return RewardTable(np.broadcast_to(vals, (pi.n_states, pi.n_actions, pi.n_states)).copy())


def invert_mce(pi: StochasticPolicy, alpha: float) -> RewardTable:
    """A reward whose entropy-regularized optimum at weight alpha is exactly ``pi``.

    With R(s,a,.) = alpha * log(pi(a|s)), the soft values vanish identically
    (logsumexp of log-probabilities is zero), making the fixed point immediate.
    The output is SA-domain, so the preimage works in any environment sharing
    the state and action sets.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    _require_positive(pi.probs)
    return RewardTable.from_sa(alpha * np.log(pi.probs))


@dataclass(frozen=True)
class BehaviouralModel:
    """Serializable description of one reward-to-policy map."""

    kind: str  # "boltzmann" | "mce" | "optimal-set" | "fvariant"
    beta: float | None = None
    alpha: float | None = None
    spec: FVariantSpec | None = None

    def __post_init__(self):
        if self.kind == "boltzmann" and not (self.beta and self.beta > 0):
            raise ValueError("boltzmann model requires beta > 0")
        if self.kind == "mce" and not (self.alpha and self.alpha > 0):
            raise ValueError("mce model requires alpha > 0")
        if self.kind == "fvariant" and self.spec is None:
            raise ValueError("fvariant model requires a spec")
        if self.kind not in ("boltzmann", "mce", "optimal-set", "fvariant"):
            raise ValueError(f"unknown model kind {self.kind!r}")

    def policy(self, mdp: Mdp, r: RewardTable):
        if self.kind == "boltzmann":
            return boltzmann_policy(mdp, r, self.beta)
        if self.kind == "mce":
            return mce_policy(mdp, r, self.alpha)
        if self.kind == "optimal-set":
            return optimal_set_policy(mdp, r)
        return fvariant_policy(mdp, r, self.spec)
