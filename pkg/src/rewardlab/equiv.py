"""Deciders for reward equivalence relations, with certificates and oracles.

Three relations over rewards in a fixed environment:

* ``opt`` - same optimal-action sets in every state;
* ``ord`` - same ordering of all policies by J (decided by the linear
  scaling-plus-shaping certificate, which scales past brute force);
* ``jeq`` - identical J for every policy.

The ord/jeq deciders carry a standing cross-check: whenever the deterministic
policies fit under the enumeration cap, the verdict is compared against exact
brute-force J values. The brute-force battery includes a fixed set of seeded
stochastic probe policies in addition to the deterministic ones; rankings over
deterministic policies alone can coincide by chance between genuinely
inequivalent rewards on tiny MDPs, and the probes make that event vanish.
A mismatch raises InternalConsistencyError: it means a bug or a tolerance
breach, never bad user input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InternalConsistencyError
from .mdp import DEFAULT_ENUM_CAP, Mdp, RewardTable, enumerate_action_tuples
from .solve import evaluate_action_tuples, evaluate_policy_batch, optimal_values, reward_vector
from .transform import Decomposition, decompose_j, decompose_ord

TIE_ATOL = 1e-9          # |J_i - J_j| below this counts as a structural tie
STRICT_ATOL = 1e-6       # |J_i - J_j| above this counts as a confident ordering
JEQ_ORACLE_ATOL = 1e-8   # brute-force J agreement tolerance for jeq
CROSS_CHECK_CAP = 1024   # cross-check runs when A^S fits under this
N_PROBES = 32
_PROBE_SEED = 91171


@dataclass(frozen=True)
class EquivVerdict:
    equivalent: bool
    relation: str  # "opt" | "ord" | "jeq"
    certificate: Decomposition | None = None
    witness: dict | None = None


@dataclass(frozen=True)
class OrderSignature:
    """J of every deterministic policy (s0-major order) plus tie-grouped ranks."""

    j: np.ndarray
    groups: np.ndarray  # group index per policy, 0 = best, ties share a group

    def __len__(self) -> int:
        return self.j.shape[0]


def _tie_groups(j: np.ndarray, atol: float = TIE_ATOL) -> np.ndarray:
    order = np.argsort(-j, kind="stable")
    groups = np.empty(len(j), dtype=int)
    g = 0
    prev = None
    for rank, idx in enumerate(order):
        if prev is not None and prev - j[idx] > atol:
            g += 1
        groups[idx] = g
        prev = j[idx]
    return groups


def order_signature(r: RewardTable, mdp: Mdp, cap: int = DEFAULT_ENUM_CAP) -> OrderSignature:
    """Exact J per deterministic policy, via batched linear solves."""
    actions = enumerate_action_tuples(mdp.n_states, mdp.n_actions, cap=cap)
    rsa = reward_vector(r, mdp).r
    j = evaluate_action_tuples(mdp, rsa, actions)
    return OrderSignature(j=j, groups=_tie_groups(j))


def probe_policies(n_states: int, n_actions: int, count: int = N_PROBES) -> np.ndarray:
    """Fixed seeded battery of stochastic policies for the ordering cross-check."""
    rng = np.random.default_rng(np.random.SeedSequence([_PROBE_SEED, n_states, n_actions]))
    return rng.dirichlet(np.ones(n_actions), size=(count, n_states))


def _order_codes(j: np.ndarray) -> np.ndarray:
    """Pairwise comparison codes: 0 tie, +/-1 confident, 9 borderline."""
    scale = max(1.0, float(np.abs(j).max(initial=0.0)))
    d = j[:, None] - j[None, :]
    codes = np.full(d.shape, 9, dtype=int)
    codes[np.abs(d) <= TIE_ATOL * scale] = 0
    codes[d >= STRICT_ATOL * scale] = 1
    codes[d <= -STRICT_ATOL * scale] = -1
    return codes


def orderings_agree(j1: np.ndarray, j2: np.ndarray):
    """Whether two J vectors rank their (shared) index set identically.

    Comparisons falling between the tie and confidence thresholds are treated
    as compatible with anything, so tolerance dust never produces a verdict.
    Returns (agree, witness-pair-or-None).
    """
    c1, c2 = _order_codes(j1), _order_codes(j2)
    clash = (
        ((c1 == 1) & (c2 == -1))
        | ((c1 == -1) & (c2 == 1))
        | ((c1 == 0) & (np.abs(c2) == 1))
        | ((np.abs(c1) == 1) & (c2 == 0))
    )
    if not clash.any():
        return True, None
    i, k = np.argwhere(clash)[0]
    return False, (int(i), int(k))


def _brute_force_j(r: RewardTable, mdp: Mdp, cap: int) -> np.ndarray:
    det = order_signature(r, mdp, cap=cap).j
    probes = probe_policies(mdp.n_states, mdp.n_actions)
    rsa = reward_vector(r, mdp).r
    return np.concatenate([det, evaluate_policy_batch(mdp, rsa, probes)])


def _cross_check_feasible(mdp: Mdp, cap: int) -> bool:
    return mdp.n_actions**mdp.n_states <= cap


def opt_equivalent(r1: RewardTable, r2: RewardTable, mdp: Mdp) -> EquivVerdict:
    """Same optimal-action sets per state; witness is the first differing state."""
    opt1 = optimal_values(mdp, r1).opt_sets
    opt2 = optimal_values(mdp, r2).opt_sets
    for s in range(mdp.n_states):
        if opt1[s] != opt2[s]:
            witness = {"state": s, "opt1": sorted(opt1[s]), "opt2": sorted(opt2[s])}
            return EquivVerdict(equivalent=False, relation="opt", witness=witness)
    return EquivVerdict(equivalent=True, relation="opt")


def ord_equivalent(
    r1: RewardTable,
    r2: RewardTable,
    mdp: Mdp,
    cross_check_cap: int = CROSS_CHECK_CAP,
) -> EquivVerdict:
    """Same policy ordering, decided by the decomposition certificate."""
    cert = decompose_ord(r1, r2, mdp)
    equivalent = cert is not None
    witness = None
    if _cross_check_feasible(mdp, cross_check_cap):
        agree, pair = orderings_agree(_brute_force_j(r1, mdp, cross_check_cap),
                                      _brute_force_j(r2, mdp, cross_check_cap))
        if agree != equivalent:
            raise InternalConsistencyError(
                f"ord decider said {equivalent} but brute-force ordering agreement is {agree}"
            )
        if not equivalent:
            witness = {"kind": "policy-pair", "indices": list(pair)}
    elif not equivalent:
        witness = {"kind": "fit-residual", "note": "no scaling+shaping certificate exists"}
    return EquivVerdict(equivalent=equivalent, relation="ord", certificate=cert, witness=witness)


def j_equal(
    r1: RewardTable,
    r2: RewardTable,
    mdp: Mdp,
    cross_check_cap: int = CROSS_CHECK_CAP,
) -> EquivVerdict:
    """Identical J for every policy, decided by the constrained shaping fit."""
    cert = decompose_j(r1, r2, mdp)
    equivalent = cert is not None
    witness = None
    if _cross_check_feasible(mdp, cross_check_cap):
        j1 = order_signature(r1, mdp, cap=cross_check_cap).j
        j2 = order_signature(r2, mdp, cap=cross_check_cap).j
        scale = max(1.0, float(np.abs(j1).max(initial=0.0)))
        gaps = np.abs(j1 - j2)
        oracle_equal = bool(gaps.max(initial=0.0) <= JEQ_ORACLE_ATOL * scale)
        if oracle_equal != equivalent:
            raise InternalConsistencyError(
                f"jeq decider said {equivalent} but brute-force J agreement is {oracle_equal}"
            )
        if not equivalent:
            witness = {"kind": "policy", "index": int(np.argmax(gaps)), "j_gap": float(gaps.max())}
    elif not equivalent:
        witness = {"kind": "fit-residual", "note": "no zero-mean shaping fit exists"}
    return EquivVerdict(equivalent=equivalent, relation="jeq", certificate=cert, witness=witness)


def refines(p_labels, q_labels) -> bool:
    """True iff every P-class sits inside a single Q-class (P is at least as fine)."""
    p = list(p_labels)
    q = list(q_labels)
    if len(p) != len(q):
        raise ValueError(f"label sequences differ in length: {len(p)} vs {len(q)}")
    seen: dict = {}
    for pl, ql in zip(p, q):
        if pl in seen and seen[pl] != ql:
            return False
        seen[pl] = ql
    return True
