"""Finite MDP, reward, and policy data model.

Conventions used throughout the package:

* transition tensors are indexed ``[s, a, s']`` and each ``[s, a, :]`` row is a
  probability vector;
* rewards are always stored as a full ``(S, A, S)`` tensor, with a ``domain``
  tag recording whether the function actually depends on ``s'`` or ``(a, s')``
  (restricted domains are kept as tags so transformations can check closure);
* all values are immutable after construction and all operations are pure.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterator

import numpy as np

from .errors import CapacityError, StructuralError

PROB_ATOL = 1e-9            # validation tolerance for probability vectors
TRIVIAL_ATOL = 1e-12        # tolerance for "all actions share a successor row"
FULL_SUPPORT_ATOL = 1e-12   # minimum entry for membership in the full-support set
DEFAULT_ENUM_CAP = 65536    # deterministic-policy enumeration cap

DOMAINS = ("sas", "sa", "s")


def _frozen_array(values, shape=None, name="array"):
    arr = np.array(values, dtype=float)
    if shape is not None and arr.shape != shape:
        raise StructuralError(f"{name}: expected shape {shape}, got {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Mdp:
    """A finite MDP without its reward: (S, A, tau, mu0, gamma).

    The reward is carried separately (see :class:`RewardTable`) because the
    whole point of the package is to vary it against a fixed environment.
    """

    transition: np.ndarray
    initial: np.ndarray
    discount: float
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        tau = np.array(self.transition, dtype=float)
        if tau.ndim != 3 or tau.shape[0] != tau.shape[2]:
            raise StructuralError(f"transition must be (S, A, S), got {tau.shape}")
        mu0 = _frozen_array(self.initial, (tau.shape[0],), "initial")
        if not (0.0 < float(self.discount) < 1.0):
            # The solvers all rely on the geometric series converging.
            raise StructuralError(f"discount must lie in (0, 1), got {self.discount}")
        tau.setflags(write=False)
        object.__setattr__(self, "transition", tau)
        object.__setattr__(self, "initial", mu0)
        object.__setattr__(self, "discount", float(self.discount))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n_states(self) -> int:
        return self.transition.shape[0]

    @property
    def n_actions(self) -> int:
        return self.transition.shape[1]

    def with_discount(self, gamma: float) -> "Mdp":
        return replace(self, discount=gamma)

    def with_transition(self, tau) -> "Mdp":
        return replace(self, transition=np.array(tau, dtype=float))


@dataclass(frozen=True)
class RewardTable:
    """An (S, A, S') reward tensor plus a domain-restriction tag.

    ``domain="sa"`` asserts the entries do not depend on s', ``domain="s"``
    that they depend on neither a nor s'. The tensor is stored fully broadcast
    either way, so solvers never need to branch on the tag.
    """

    values: np.ndarray
    domain: str = "sas"

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 3 or vals.shape[0] != vals.shape[2]:
            raise StructuralError(f"reward values must be (S, A, S), got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise StructuralError("reward values must be finite")
        if self.domain not in DOMAINS:
            raise StructuralError(f"domain must be one of {DOMAINS}, got {self.domain!r}")
        if self.domain == "sa" and not np.all(vals == vals[:, :, :1]):
            raise StructuralError("domain 'sa' requires values constant over s'")
        if self.domain == "s" and not np.all(vals == vals[:, :1, :1]):
            raise StructuralError("domain 's' requires values constant over (a, s')")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_sa(cls, table) -> "RewardTable":
        """Build an SA-domain reward from an (S, A) table."""
        arr = np.array(table, dtype=float)
        if arr.ndim != 2:
            raise StructuralError(f"expected (S, A) table, got shape {arr.shape}")
        return cls(np.repeat(arr[:, :, None], arr.shape[0], axis=2), domain="sa")

    @classmethod
    def from_state(cls, vec, n_actions: int) -> "RewardTable":
        """Build an S-domain reward from a per-state vector."""
        arr = np.array(vec, dtype=float)
        if arr.ndim != 1:
            raise StructuralError(f"expected (S,) vector, got shape {arr.shape}")
        n = arr.shape[0]
        return cls(np.broadcast_to(arr[:, None, None], (n, n_actions, n)).copy(), domain="s")

    @property
    def n_states(self) -> int:
        return self.values.shape[0]

    @property
    def n_actions(self) -> int:
        return self.values.shape[1]


def lift_reward(r: RewardTable) -> RewardTable:
    """Embed a restricted-domain reward into the full S x A x S' domain.

    The stored tensor is already broadcast, so lifting only rewrites the tag;
    the induced expected rewards are bitwise unchanged.
    """
    if r.domain == "sas":
        return RewardTable(r.values.copy(), domain="sas")
    return RewardTable(r.values, domain="sas")


@dataclass(frozen=True)
class StochasticPolicy:
    """Row-stochastic pi[s, a] table."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.ndim != 2:
            raise StructuralError(f"policy must be (S, A), got shape {p.shape}")
        if np.any(p < 0):
            raise StructuralError("policy probabilities must be non-negative")
        if np.max(np.abs(p.sum(axis=1) - 1.0)) > PROB_ATOL:
            raise StructuralError("policy rows must sum to 1")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def full_support(self) -> bool:
        """Membership in the set of policies taking every action with positive probability."""
        return bool(np.all(self.probs >= FULL_SUPPORT_ATOL))

    @property
    def n_states(self) -> int:
        return self.probs.shape[0]

    @property
    def n_actions(self) -> int:
        return self.probs.shape[1]

    @classmethod
    def deterministic(cls, actions, n_actions: int) -> "StochasticPolicy":
        acts = np.asarray(actions, dtype=int)
        p = np.zeros((acts.shape[0], n_actions))
        p[np.arange(acts.shape[0]), acts] = 1.0
        return cls(p)


@dataclass(frozen=True)
class ActionSetPolicy:
    """Per-state non-empty set of actions (the codomain of set-valued optimal policies)."""

    sets: tuple[frozenset, ...]

    def __post_init__(self):
        sets = tuple(frozenset(int(a) for a in s) for s in self.sets)
        if any(len(s) == 0 for s in sets):
            raise StructuralError("every per-state action set must be non-empty")
        object.__setattr__(self, "sets", sets)

    def __getitem__(self, s: int) -> frozenset:
        return self.sets[s]

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of validate_mdp: ok iff no rule was violated."""

    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def rule_ids(self) -> list[str]:
        return [v[0] for v in self.violations]


def _reachable_states(transition: np.ndarray, initial: np.ndarray) -> set[int]:
    # Fixed point of support expansion from supp(mu0); action probabilities
    # are irrelevant, only the support graph matters.
    support = transition > 0.0
    frontier = set(np.flatnonzero(initial > 0.0).tolist())
    reached = set(frontier)
    while frontier:
        nxt = set()
        for s in frontier:
            for sp in np.flatnonzero(support[s].any(axis=0)):
                if int(sp) not in reached:
                    nxt.add(int(sp))
        reached |= nxt
        frontier = nxt
    return reached


def validate_mdp(mdp: Mdp) -> ValidationReport:
    """Check probability invariants and reachability, reporting every violation.

    Violations are (rule-id, location, magnitude) triples. Shape problems are
    structural and already raise at construction time.
    """
    violations = []
    tau, mu0 = mdp.transition, mdp.initial
    if not np.all(np.isfinite(tau)):
        violations.append(("non-finite", "transition", float("nan")))
        return ValidationReport(tuple(violations))

    for s in range(mdp.n_states):
        for a in range(mdp.n_actions):
            row = tau[s, a]
            neg = row.min()
            if neg < 0:
                violations.append(("negative-entry", f"(s{s},a{a})", float(-neg)))
            gap = abs(row.sum() - 1.0)
            if gap > PROB_ATOL:
                violations.append(("row-sum", f"(s{s},a{a})", float(gap)))

    if mu0.min() < 0:
        violations.append(("mu0-negative", "mu0", float(-mu0.min())))
    gap = abs(mu0.sum() - 1.0)
    if gap > PROB_ATOL:
        violations.append(("mu0-sum", "mu0", float(gap)))

    if not violations:
        reached = _reachable_states(tau, mu0)
        for s in range(mdp.n_states):
            if s not in reached:
                violations.append(("unreachable-state", f"s{s}", 1.0))

    return ValidationReport(tuple(violations))


def is_trivial_transition(mdp: Mdp) -> bool:
    """True iff every state's actions share one successor distribution."""
    tau = mdp.transition
    diff = np.abs(tau[:, :, None, :] - tau[:, None, :, :]).max()
    return bool(diff <= TRIVIAL_ATOL)


def enumerate_deterministic_policies(
    mdp: Mdp, cap: int = DEFAULT_ENUM_CAP
) -> Iterator[StochasticPolicy]:
    """Yield all A^S one-hot policies in lexicographic (s0-major) order."""
    for actions in enumerate_action_tuples(mdp.n_states, mdp.n_actions, cap=cap):
        yield StochasticPolicy.deterministic(actions, mdp.n_actions)


def enumerate_action_tuples(
    n_states: int, n_actions: int, cap: int = DEFAULT_ENUM_CAP
) -> np.ndarray:
    """All deterministic action assignments as an (A^S, S) int array, s0-major."""
    count = n_actions**n_states
    if count > cap:
        raise CapacityError(
            f"{n_actions}^{n_states} = {count} deterministic policies exceeds cap {cap}"
        )
    idx = np.arange(count)
    cols = []
    for s in range(n_states):
        power = n_actions ** (n_states - 1 - s)
        cols.append((idx // power) % n_actions)
    return np.stack(cols, axis=1)
