"""Randomized verification harness: generators, claim registry, counterexamples.

Every claim in the registry packages one robustness statement as a seeded,
self-checking experiment. Positive claims must pass every trial; existential
("not robust") claims must produce at least one verified counterexample within
their trial budget, and budget exhaustion is a suite failure, never a silent
pass. Trials draw their randomness from substreams keyed on (seed, trial
index), so reports are reproducible and trials could run in any order.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import documents
from .equiv import j_equal, opt_equivalent, ord_equivalent
from .errors import (
    CertificationError,
    ConvergenceError,
    GenerationError,
    InternalConsistencyError,
    UnknownClaimError,
)
from .mdp import (
    DEFAULT_ENUM_CAP,
    Mdp,
    RewardTable,
    StochasticPolicy,
    enumerate_action_tuples,
    is_trivial_transition,
    lift_reward,
    validate_mdp,
)
from .models import (
    FVariantSpec,
    boltzmann_policy,
    fvariant_policy,
    invert_boltzmann,
    invert_mce,
    mce_policy,
    optimal_set_policy,
)
from .solve import (
    _one_hot_batch,
    _state_weights_batch,
    controllable_states,
    evaluate_action_tuples,
    occupancy,
    optimal_values,
    reward_vector,
)
from .transform import (
    LinearScaling,
    PotentialFn,
    PotentialShaping,
    apply,
    decompose_ps_ls,
    sample_optimality_preserving,
    sample_potential_shaping,
    sample_s_redistribution,
    shaping_on_sa_domain,
)

GAP_FLOOR = 1e-4       # minimum optimal-advantage gap enforced on generated rewards
BOLTZ_MATCH_ATOL = 1e-10
DEFAULT_X_GRID = (1.0, 10.0, 100.0, 1000.0)
X_GRID_CAP = 1e9


def _substream(seed: int, *path: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), *[int(p) for p in path]]))


def _child_seeds(seed: int, *path: int, n: int = 1) -> list[int]:
    ss = np.random.SeedSequence([int(seed), *[int(p) for p in path]])
    return [int(x) for x in ss.generate_state(n, dtype=np.uint64)]


def random_mdp(
    n_states: int,
    n_actions: int,
    gamma: float,
    seed: int,
    sparsity: float = 0.0,
    max_tries: int = 100,
) -> Mdp:
    """Dirichlet-sampled MDP; reachability enforced by rejection."""
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        tau = np.zeros((n_states, n_actions, n_states))
        for s in range(n_states):
            for a in range(n_actions):
                if sparsity > 0:
                    keep = rng.random(n_states) >= sparsity
                    if not keep.any():
                        keep[rng.integers(n_states)] = True
                    support = np.flatnonzero(keep)
                else:
                    support = np.arange(n_states)
                tau[s, a, support] = rng.dirichlet(np.ones(support.size))
        mu0 = rng.dirichlet(np.ones(n_states))
        mdp = Mdp(transition=tau, initial=mu0, discount=gamma)
        if validate_mdp(mdp).ok:
            return mdp
    raise GenerationError(f"no valid MDP after {max_tries} tries (sparsity={sparsity})")


def random_policy(n_states: int, n_actions: int, seed: int) -> StochasticPolicy:
    rng = np.random.default_rng(seed)
    return StochasticPolicy(rng.dirichlet(np.ones(n_actions), size=n_states))


def advantage_gap(mdp: Mdp, r: RewardTable) -> float:
    """Smallest margin by which a non-optimal action loses, over all states."""
    a_star = optimal_values(mdp, r).a_star
    gaps = []
    for s in range(mdp.n_states):
        row = a_star[s]
        non_opt = row[row < row.max()]
        if non_opt.size:
            gaps.append(float(-non_opt.max()))
    return min(gaps) if gaps else np.inf


def random_reward(
    mdp: Mdp,
    domain: str = "sas",
    bounds: float = 1.0,
    seed: int = 0,
    gap_floor: float | None = GAP_FLOOR,
    j_floor: float | None = None,
    max_tries: int = 200,
) -> RewardTable:
    """Uniform reward in [-bounds, bounds] with rejection floors.

    ``gap_floor`` keeps optimal-action decisions far from the solver tie
    tolerance; ``j_floor`` additionally demands that some deterministic policy
    has |J| above the floor (rules out J-degenerate draws).
    """
    rng = np.random.default_rng(seed)
    n, k = mdp.n_states, mdp.n_actions
    for _ in range(max_tries):
        if domain == "sas":
            r = RewardTable(rng.uniform(-bounds, bounds, size=(n, k, n)))
        elif domain == "sa":
            r = RewardTable.from_sa(rng.uniform(-bounds, bounds, size=(n, k)))
        elif domain == "s":
            r = RewardTable.from_state(rng.uniform(-bounds, bounds, size=n), n_actions=k)
        else:
            raise ValueError(f"unknown domain {domain!r}")
        if gap_floor is not None and advantage_gap(mdp, r) < gap_floor:
            continue
        if j_floor is not None:
            actions = enumerate_action_tuples(n, k)
            j = evaluate_action_tuples(mdp, reward_vector(r, mdp).r, actions)
            if np.abs(j).max() < j_floor:
                continue
        return r
    raise GenerationError(f"no reward met the floors after {max_tries} tries")


@dataclass(frozen=True)
class ExperimentConfig:
    claim_id: str
    trials: int = 0  # 0 means "use the claim's default"
    seed: int = 0
    min_states: int = 2
    max_states: int = 5
    min_actions: int = 2
    max_actions: int = 3
    bounds: float = 1.0
    enum_cap: int = DEFAULT_ENUM_CAP
    params: dict = field(default_factory=dict)


@dataclass
class TrialReport:
    claim_id: str
    outcomes: list
    ok: bool
    first_counterexample: dict | None
    wall_clock_s: float
    config: dict

    @property
    def counts(self) -> dict:
        counts = {"pass": 0, "fail": 0, "skip": 0}
        for o in self.outcomes:
            counts[o["status"]] += 1
        return counts

    def to_doc(self) -> dict:
        return {
            "claim_id": self.claim_id,
            "ok": self.ok,
            "counts": self.counts,
            "outcomes": self.outcomes,
            "first_counterexample": self.first_counterexample,
            "wall_clock_s": self.wall_clock_s,
            "config": self.config,
        }


@dataclass(frozen=True)
class CounterexampleRecord:
    """A self-verifying misspecification witness.

    ``mdp_model`` is the environment the behavioural model assumed,
    ``mdp_true`` the one the policies are actually judged in. Replaying the
    deciders on the stored payload reproduces the recorded violation.
    """

    mdp_model: Mdp
    mdp_true: Mdp
    r1: RewardTable
    r2: RewardTable
    relation: str
    evidence: dict
    params: dict

    def verify(self) -> bool:
        verdict = opt_equivalent(self.r1, self.r2, self.mdp_true)
        if verdict.equivalent:
            return False
        kind = self.params.get("kind")
        if kind == "gamma":
            gap = _model_identity_gap(self.mdp_model, self.r1, self.r2, self.params["x"])
            return bool(gap <= BOLTZ_MATCH_ATOL)
        if kind == "tau":
            rv1 = reward_vector(self.r1, self.mdp_model).r
            rv2 = reward_vector(self.r2, self.mdp_model).r
            return bool(np.array_equal(rv1, rv2))
        return True

    def to_doc(self) -> dict:
        return {
            "mdp_model": documents.mdp_to_doc(self.mdp_model),
            "mdp_true": documents.mdp_to_doc(self.mdp_true),
            "r1": documents.reward_to_doc(self.r1),
            "r2": documents.reward_to_doc(self.r2),
            "relation": self.relation,
            "evidence": self.evidence,
            "params": self.params,
        }


def _model_identity_gap(mdp_model: Mdp, r1: RewardTable, r2: RewardTable, x: float) -> float:
    """L-infinity gap between the softmax-of-Q* policies of r1 and r2 under mdp_model.

    Shaping with weight x inflates Q* by O(|x|) while leaving advantages
    untouched, so the comparison temperature shrinks as 1/(1+|x|) and the
    solver tolerance tracks the reward magnitude; otherwise float rounding at
    large |x| would swamp an identity that holds exactly in real arithmetic.
    """
    beta = 1.0 / (1.0 + abs(x))
    rmax = max(float(np.abs(r1.values).max()), float(np.abs(r2.values).max()), 1.0)
    tol = max(1e-12, 32 * np.finfo(float).eps * rmax / (1.0 - mdp_model.discount))
    b1 = boltzmann_policy(mdp_model, r1, beta, tol=tol)
    b2 = boltzmann_policy(mdp_model, r2, beta, tol=tol)
    return float(np.abs(b1.probs - b2.probs).max())


def _entry_spread_by_state(mdp: Mdp, cap: int = 4096, seed: int = 0) -> np.ndarray:
    """Per-state spread of the discounted entry measure across policies."""
    n_policies = mdp.n_actions**mdp.n_states
    if n_policies <= cap:
        actions = enumerate_action_tuples(mdp.n_states, mdp.n_actions, cap=cap)
        batch = _one_hot_batch(actions, mdp.n_actions)
    else:
        rng = np.random.default_rng(seed)
        batch = rng.dirichlet(np.ones(mdp.n_actions), size=(512, mdp.n_states))
    w = _state_weights_batch(mdp, batch)
    entry = w - mdp.initial[None, :]
    return entry.max(axis=0) - entry.min(axis=0)


def _expanded_grid(x_grid) -> list[float]:
    grid = [float(x) for x in (x_grid if x_grid is not None else DEFAULT_X_GRID)]
    x = max(grid)
    while x * 10 <= X_GRID_CAP:
        x *= 10
        grid.append(x)
    return grid


def gamma_counterexample(
    mdp: Mdp,
    gamma1: float,
    gamma2: float,
    x_grid=None,
    seed: int = 0,
) -> CounterexampleRecord | None:
    """Shape under gamma1, evaluate under gamma2, and search for an optimality flip.

    The potential puts weight X on one controllable state; the induced J gap
    X * n(pi) * (gamma1 - gamma2) varies across policies through the entry
    measure n, so growing |X| eventually reorders them. Returns None when the
    transition function is trivial, when gamma1 == gamma2, or if the grid
    (after geometric expansion) never produces a flip.
    """
    for g in (gamma1, gamma2):
        if not (0.0 < g < 1.0):
            raise ValueError(f"discounts must lie in (0, 1), got {g}")
    if gamma1 == gamma2:
        return None
    if is_trivial_transition(mdp):
        return None

    mdp1 = mdp.with_discount(gamma1)
    mdp2 = mdp.with_discount(gamma2)
    spread = _entry_spread_by_state(mdp2, seed=seed)
    state = int(np.argmax(spread))
    if spread[state] <= 1e-9:
        return None

    r1 = random_reward(mdp2, bounds=1.0, seed=_child_seeds(seed, 1)[0], gap_floor=GAP_FLOOR)
    opt1 = optimal_values(mdp2, r1).opt_sets

    for x_abs in _expanded_grid(x_grid):
        for x in (x_abs, -x_abs):
            phi = np.zeros(mdp.n_states)
            phi[state] = x
            r2 = apply(PotentialShaping(PotentialFn(phi)), r1, mdp1)
            opt2 = optimal_values(mdp2, r2).opt_sets
            differing = [s for s in range(mdp.n_states) if opt1[s] != opt2[s]]
            if differing:
                record = CounterexampleRecord(
                    mdp_model=mdp1,
                    mdp_true=mdp2,
                    r1=r1,
                    r2=r2,
                    relation="opt",
                    evidence={
                        "state": differing[0],
                        "opt1": sorted(opt1[differing[0]]),
                        "opt2": sorted(opt2[differing[0]]),
                    },
                    params={
                        "kind": "gamma",
                        "x": x,
                        "shaped_state": state,
                        "gamma1": gamma1,
                        "gamma2": gamma2,
                        "p": float(mdp.initial[state]),
                    },
                )
                if record.verify():
                    return record
    return None


def tau_counterexample(mdp1: Mdp, tau2, seed: int = 0) -> CounterexampleRecord | None:
    """Redistribute rewards invisibly under tau1 so that optimality flips under tau2.

    Search directions lie in the kernel of the tau1-expectation: support pairs
    (p_j, -p_i) and entries where tau1 is zero but tau2 is not. Magnitudes are
    powers of two and the perturbed row of the base reward is zeroed first, so
    the tau1-expected rewards of r1 and r2 match bitwise. Returns None iff no
    kernel direction changes tau2-expectations (i.e. the rows coincide).
    """
    tau2 = np.array(tau2, dtype=float)
    if tau2.shape != mdp1.transition.shape:
        raise ValueError("tau2 must match the shape of mdp1's transition tensor")
    mdp2 = mdp1.with_transition(tau2)
    report = validate_mdp(mdp2)
    if not report.ok:
        raise ValueError(f"tau2 is not a valid transition function: {report.rule_ids()}")

    candidates = []  # (s, a, delta, |tau2-effect|)
    tau1 = mdp1.transition
    for s in range(mdp1.n_states):
        for a in range(mdp1.n_actions):
            p, q = tau1[s, a], tau2[s, a]
            if np.abs(p - q).max() <= 1e-12:
                continue
            for k in np.flatnonzero((p == 0.0) & (q > 0.0)):
                delta = np.zeros(mdp1.n_states)
                delta[k] = 1.0
                candidates.append((s, a, delta, float(q[k])))
            support = np.flatnonzero(p > 0.0)
            for ii in range(support.size):
                for jj in range(ii + 1, support.size):
                    i, j = int(support[ii]), int(support[jj])
                    effect = q[i] * p[j] - q[j] * p[i]
                    if abs(effect) > 1e-12:
                        delta = np.zeros(mdp1.n_states)
                        delta[i] = p[j]
                        delta[j] = -p[i]
                        candidates.append((s, a, delta, abs(effect)))
    if not candidates:
        return None

    base = random_reward(mdp2, bounds=1.0, seed=_child_seeds(seed, 2)[0], gap_floor=GAP_FLOOR)
    magnitudes = [float(2**k) for k in range(0, 31, 2)]
    for s, a, delta, _ in candidates:
        vals1 = base.values.copy()
        vals1[s, a, :] = 0.0
        r1 = RewardTable(vals1)
        opt1 = optimal_values(mdp2, r1).opt_sets
        for m in magnitudes:
            for sign in (1.0, -1.0):
                vals2 = vals1.copy()
                vals2[s, a, :] = sign * m * delta
                r2 = RewardTable(vals2)
                opt2 = optimal_values(mdp2, r2).opt_sets
                differing = [st for st in range(mdp1.n_states) if opt1[st] != opt2[st]]
                if differing:
                    record = CounterexampleRecord(
                        mdp_model=mdp1,
                        mdp_true=mdp2,
                        r1=r1,
                        r2=r2,
                        relation="opt",
                        evidence={
                            "state": differing[0],
                            "opt1": sorted(opt1[differing[0]]),
                            "opt2": sorted(opt2[differing[0]]),
                        },
                        params={"kind": "tau", "row": [s, a], "magnitude": sign * m},
                    )
                    if record.verify():
                        return record
    return None


# ---------------------------------------------------------------------------
# Claim registry
# ---------------------------------------------------------------------------

DEFAULT_TRIALS = {
    "ORD-CHAR": 200,
    "BOLTZ-OPT": 100,
    "BM-ORD": 100,
    "OPT-MODEL": 200,
    "MCE-ORD": 100,
    "LEM-GAMMA": 20,
    "LEM-TAU": 20,
    "MDP-MISSPEC": 8,
    "OCC-INJ": 100,
    "J-AMB": 100,
    "CONTROL": 200,
    "EX-SA-SHAPING": 100,
    "EX-TRANSFER": 10,
}


def _config_doc(config: ExperimentConfig, trials: int) -> dict:
    return {
        "claim_id": config.claim_id,
        "trials": trials,
        "seed": config.seed,
        "states": [config.min_states, config.max_states],
        "actions": [config.min_actions, config.max_actions],
        "bounds": config.bounds,
        "enum_cap": config.enum_cap,
        "params": config.params,
    }


def _n_trials(config: ExperimentConfig) -> int:
    return config.trials if config.trials > 0 else DEFAULT_TRIALS[config.claim_id]


def _draw_env(config: ExperimentConfig, trial: int, salt: int = 0) -> Mdp:
    rng = _substream(config.seed, trial, salt)
    n = int(rng.integers(config.min_states, config.max_states + 1))
    k = int(rng.integers(config.min_actions, config.max_actions + 1))
    gamma = config.params.get("gamma") or float(rng.uniform(0.4, 0.95))
    return random_mdp(n, k, gamma, _child_seeds(config.seed, trial, salt, 1)[0])


def _loguniform(rng, lo: float, hi: float) -> float:
    return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))


def oracle_opt_sets(mdp: Mdp, r: RewardTable, cap: int = DEFAULT_ENUM_CAP) -> tuple:
    """Optimal-action sets by brute force: union of argmax-J deterministic policies.

    Matches the argmax-of-Q* sets whenever every state is visited under every
    policy (full-support transition rows, as the generators here produce). On
    sparse transitions a J-optimal policy can behave arbitrarily at states it
    never reaches, which this enumeration cannot distinguish.
    """
    actions = enumerate_action_tuples(mdp.n_states, mdp.n_actions, cap=cap)
    j = evaluate_action_tuples(mdp, reward_vector(r, mdp).r, actions)
    best = j.max()
    tol = 1e-9 * max(1.0, abs(best))
    winners = actions[j >= best - tol]
    return tuple(frozenset(winners[:, s].tolist()) for s in range(mdp.n_states))


def _run_trials(config: ExperimentConfig, body) -> TrialReport:
    """Shared trial loop: body(trial) returns an outcome dict (status + diagnostics)."""
    trials = _n_trials(config)
    t0 = time.perf_counter()
    outcomes = []
    counterexample = None
    for i in range(trials):
        try:
            outcome = body(i)
        except (CertificationError, ConvergenceError, GenerationError, InternalConsistencyError) as exc:
            outcome = {"status": "fail", "error": f"{type(exc).__name__}: {exc}"}
        outcome["trial"] = i
        outcomes.append(outcome)
        if counterexample is None and outcome.get("counterexample") is not None:
            counterexample = outcome.pop("counterexample")
        else:
            outcome.pop("counterexample", None)
    ok = all(o["status"] != "fail" for o in outcomes)
    return TrialReport(
        claim_id=config.claim_id,
        outcomes=outcomes,
        ok=ok,
        first_counterexample=counterexample,
        wall_clock_s=time.perf_counter() - t0,
        config=_config_doc(config, trials),
    )


def _claim_ord_char(config: ExperimentConfig) -> TrialReport:
    """Round-trip construct/recover for the scaling+shaping+redistribution class."""

    def body(i):
        rng = _substream(config.seed, i, 10)
        mdp = _draw_env(config, i)
        seeds = _child_seeds(config.seed, i, 11, n=4)
        r1 = random_reward(mdp, bounds=config.bounds, seed=seeds[0])
        c = _loguniform(rng, 0.2, 5.0)
        cur = r1
        applied_order = [["ls", "ps", "sr"][k] for k in rng.permutation(3)]
        for step_kind in applied_order:
            if step_kind == "ls":
                spec = LinearScaling(c)
            elif step_kind == "ps":
                spec = sample_potential_shaping(mdp, config.bounds, False, seeds[1])
            else:
                spec = sample_s_redistribution(mdp, cur, config.bounds, seeds[2])
            cur = apply(spec, cur, mdp)
        verdict = ord_equivalent(r1, cur, mdp)
        cert = verdict.certificate
        pos_ok = (
            verdict.equivalent
            and cert.residual <= 1e-6
            and (cert.degenerate or abs(cert.c - c) <= 1e-6 * max(1.0, c))
        )
        # Negative control: an independent reward; decider and oracle must agree
        # (ord_equivalent raises InternalConsistencyError on any disagreement).
        r3 = random_reward(mdp, bounds=config.bounds, seed=seeds[3])
        neg_verdict = ord_equivalent(r1, r3, mdp)
        status = "pass" if pos_ok else "fail"
        return {
            "status": status,
            "order": applied_order,
            "c_true": c,
            "c_fit": cert.c if cert else None,
            "residual": cert.residual if cert else None,
            "negative_equivalent": neg_verdict.equivalent,
        }

    return _run_trials(config, body)


def _claim_boltz_opt(config: ExperimentConfig) -> TrialReport:
    """Softmax-of-Q* model vs argmax-preserving probes, plus the argmax-inverting probe."""
    from .models import _softmax_rows

    probe_budget = int(config.params.get("probe_budget", 1000))
    state = {"violation": None}

    def body(i):
        rng = _substream(config.seed, i, 20)
        mdp = _draw_env(config, i)
        seeds = _child_seeds(config.seed, i, 21, n=2)
        r2 = random_reward(mdp, bounds=config.bounds, seed=seeds[0])
        if i % 2 == 0:
            spec = FVariantSpec(
                variant="mixture",
                lam=float(rng.uniform(0.2, 0.8)),
                beta1=_loguniform(rng, 0.5, 5.0),
                beta2=_loguniform(rng, 0.5, 5.0),
            )
        else:
            spec = FVariantSpec(
                variant="tempered-rank",
                beta=_loguniform(rng, 0.5, 5.0),
                p=float(rng.uniform(0.5, 3.0)),
            )
        pi = fvariant_policy(mdp, r2, spec)
        beta = _loguniform(rng, 0.1, 10.0)
        r1 = invert_boltzmann(pi, beta, mdp)
        verdict = opt_equivalent(r1, r2, mdp)
        outcome = {"status": "pass" if verdict.equivalent else "fail", "variant": spec.variant}

        # Existential side: one argmax-inverting probe per trial until a
        # verified violation lands; never finding one fails the claim.
        if state["violation"] is None and i < probe_budget:
            q2 = optimal_values(mdp, r2).q_star
            neg_pi = StochasticPolicy(_softmax_rows(-beta * q2))
            r1_neg = invert_boltzmann(neg_pi, beta, mdp)
            neg_verdict = opt_equivalent(r1_neg, r2, mdp)
            if not neg_verdict.equivalent and oracle_opt_sets(mdp, r1_neg) != oracle_opt_sets(mdp, r2):
                state["violation"] = {
                    "claim": "BOLTZ-OPT",
                    "note": "argmax-inverting probe produced an optimality flip",
                    "witness": neg_verdict.witness,
                    "mdp": documents.mdp_to_doc(mdp),
                    "r1": documents.reward_to_doc(r1_neg),
                    "r2": documents.reward_to_doc(r2),
                }
                outcome["counterexample"] = state["violation"]
        if i == _n_trials(config) - 1 and state["violation"] is None:
            outcome["status"] = "fail"
            outcome["error"] = "no verified violation found within the probe budget"
        return outcome

    return _run_trials(config, body)


def _claim_bm_ord(config: ExperimentConfig) -> TrialReport:
    """Temperature misspecification preserves the policy ordering."""
    forced_b1 = config.params.get("beta1")
    forced_b2 = config.params.get("beta2")

    def body(i):
        rng = _substream(config.seed, i, 30)
        if forced_b1 is not None and forced_b2 is not None and forced_b1 == forced_b2:
            return {"status": "skip", "note": "not misspecified"}
        mdp = _draw_env(config, i)
        seeds = _child_seeds(config.seed, i, 31, n=1)
        r2 = random_reward(mdp, bounds=config.bounds, seed=seeds[0])
        beta2 = forced_b2 if forced_b2 is not None else _loguniform(rng, 0.1, 10.0)
        beta1 = forced_b1 if forced_b1 is not None else _loguniform(rng, 0.1, 10.0)
        while beta1 == beta2:
            beta1 = _loguniform(rng, 0.1, 10.0)
        pi = boltzmann_policy(mdp, r2, beta2)
        r1 = invert_boltzmann(pi, beta1, mdp)
        verdict = ord_equivalent(r1, r2, mdp)
        return {
            "status": "pass" if verdict.equivalent else "fail",
            "beta1": beta1,
            "beta2": beta2,
        }

    return _run_trials(config, body)


def _claim_mce_ord(config: ExperimentConfig) -> TrialReport:
    """Entropy-weight misspecification preserves the policy ordering."""
    from .solve import soft_optimal_values

    residual_bound = float(config.params.get("residual_bound", 1e-8))

    def body(i):
        rng = _substream(config.seed, i, 40)
        mdp = _draw_env(config, i)
        seeds = _child_seeds(config.seed, i, 41, n=1)
        r2 = random_reward(mdp, bounds=config.bounds, seed=seeds[0])
        alpha2 = _loguniform(rng, 0.1, 10.0)
        alpha1 = _loguniform(rng, 0.1, 10.0)
        while alpha1 == alpha2:
            alpha1 = _loguniform(rng, 0.1, 10.0)
        bundle = soft_optimal_values(mdp, r2, alpha2)
        if bundle.residual > residual_bound:
            return {"status": "fail", "error": f"soft residual {bundle.residual:.3e}"}
        pi = mce_policy(mdp, r2, alpha2)
        r1 = invert_mce(pi, alpha1)
        verdict = ord_equivalent(r1, r2, mdp)
        return {
            "status": "pass" if verdict.equivalent else "fail",
            "alpha1": alpha1,
            "alpha2": alpha2,
            "soft_residual": bundle.residual,
        }

    return _run_trials(config, body)


def _claim_opt_model(config: ExperimentConfig) -> TrialReport:
    """Optimal-set model: admissibility biconditional plus the class-swap violation."""
    state = {"violation": None}

    def body(i):
        mdp = _draw_env(config, i)
        seeds = _child_seeds(config.seed, i, 51, n=3)
        r1 = random_reward(mdp, bounds=config.bounds, seed=seeds[0])
        related = i % 2 == 0
        if related:
            op = sample_optimality_preserving(mdp, r1, config.bounds, seeds[1])
            r2 = apply(op, r1, mdp)
        else:
            r2 = random_reward(mdp, bounds=config.bounds, seed=seeds[2])
        decider = opt_equivalent(r1, r2, mdp).equivalent
        sets_equal = optimal_set_policy(mdp, r1) == optimal_set_policy(mdp, r2)
        oracle = oracle_opt_sets(mdp, r1) == oracle_opt_sets(mdp, r2)
        ok = decider == sets_equal == oracle and (decider or not related)
        outcome = {"status": "pass" if ok else "fail", "related": related, "equivalent": decider}

        # A map swapping two optimality classes witnesses non-robustness: it
        # sends r1 to the model output of r2 while the two are inequivalent.
        if state["violation"] is None and not decider:
            state["violation"] = {
                "claim": "OPT-MODEL",
                "note": "swapping the classes of r1 and r2 makes the learner land in the wrong class",
                "mdp": documents.mdp_to_doc(mdp),
                "r1": documents.reward_to_doc(r1),
                "r2": documents.reward_to_doc(r2),
                "opt1": [sorted(s) for s in oracle_opt_sets(mdp, r1)],
                "opt2": [sorted(s) for s in oracle_opt_sets(mdp, r2)],
            }
            outcome["counterexample"] = state["violation"]
        if i == _n_trials(config) - 1 and state["violation"] is None:
            outcome["status"] = "fail"
            outcome["error"] = "no class-swap violation found"
        return outcome

    return _run_trials(config, body)


def _claim_lem_gamma(config: ExperimentConfig) -> TrialReport:
    """Discount misspecification: counterexamples exist exactly when predicted."""
    pairs = [tuple(p) for p in config.params.get("gamma_pairs", [(0.5, 0.9), (0.9, 0.95)])]

    def body(i):
        mdp = _draw_env(config, i)
        records = []
        for pi_idx, (g1, g2) in enumerate(pairs):
            rec = gamma_counterexample(mdp, g1, g2, seed=_child_seeds(config.seed, i, 60 + pi_idx, 1)[0])
            if g1 == g2:
                # The statement's exclusion clause: no counterexample may exist.
                if rec is not None:
                    return {"status": "fail", "error": f"equal discounts {g1} produced a counterexample"}
                continue
            if rec is None or not rec.verify():
                return {"status": "fail", "error": f"no verified counterexample for {(g1, g2)}"}
            records.append(rec)
        uniform = np.full_like(mdp.transition, 1.0 / mdp.n_states)
        trivial = Mdp(transition=uniform, initial=mdp.initial, discount=mdp.discount)
        if gamma_counterexample(trivial, pairs[0][0], pairs[0][1], seed=config.seed) is not None:
            return {"status": "fail", "error": "trivial-transition control produced a counterexample"}
        if gamma_counterexample(mdp, pairs[0][0], pairs[0][0], seed=config.seed) is not None:
            return {"status": "fail", "error": "equal-discount control produced a counterexample"}
        outcome = {"status": "pass", "x_values": [r.params["x"] for r in records]}
        if records:
            outcome["counterexample"] = records[0].to_doc()
        return outcome

    return _run_trials(config, body)


def _claim_lem_tau(config: ExperimentConfig) -> TrialReport:
    """Transition misspecification: redistribution-invisible rewrites flip optimality."""

    def body(i):
        rng = _substream(config.seed, i, 70)
        mdp1 = _draw_env(config, i)
        tau2 = mdp1.transition.copy()
        n_rows = int(rng.integers(1, mdp1.n_states * mdp1.n_actions + 1))
        flat = rng.choice(mdp1.n_states * mdp1.n_actions, size=n_rows, replace=False)
        for f in flat:
            s, a = divmod(int(f), mdp1.n_actions)
            tau2[s, a] = rng.dirichlet(np.ones(mdp1.n_states))
        rec = tau_counterexample(mdp1, tau2, seed=_child_seeds(config.seed, i, 71, 1)[0])
        if rec is None or not rec.verify():
            return {"status": "fail", "error": "no verified counterexample for differing rows"}
        if tau_counterexample(mdp1, mdp1.transition, seed=config.seed) is not None:
            return {"status": "fail", "error": "identical-transition control produced a counterexample"}
        return {"status": "pass", "rows_changed": n_rows, "counterexample": rec.to_doc()}

    return _run_trials(config, body)


def _claim_mdp_misspec(config: ExperimentConfig) -> TrialReport:
    """Combined statement: both generators fire when allowed, never when excluded."""

    def body(i):
        mdp = _draw_env(config, i)
        seeds = _child_seeds(config.seed, i, 80, n=3)
        rng = _substream(config.seed, i, 81)
        rec_g = gamma_counterexample(mdp, 0.5, 0.9, seed=seeds[0])
        if rec_g is None or not rec_g.verify():
            return {"status": "fail", "error": "gamma generator failed on a non-trivial MDP"}
        tau2 = mdp.transition.copy()
        tau2[0, 0] = rng.dirichlet(np.ones(mdp.n_states))
        rec_t = tau_counterexample(mdp, tau2, seed=seeds[1])
        if rec_t is None or not rec_t.verify():
            return {"status": "fail", "error": "tau generator failed on differing rows"}
        uniform = np.full_like(mdp.transition, 1.0 / mdp.n_states)
        trivial = Mdp(transition=uniform, initial=mdp.initial, discount=mdp.discount)
        excluded = (
            gamma_counterexample(mdp, 0.7, 0.7, seed=seeds[2]) is None
            and gamma_counterexample(trivial, 0.5, 0.9, seed=seeds[2]) is None
            and tau_counterexample(mdp, mdp.transition, seed=seeds[2]) is None
        )
        if not excluded:
            return {"status": "fail", "error": "an excluded case produced a counterexample"}
        return {"status": "pass"}

    return _run_trials(config, body)


def _claim_occ_inj(config: ExperimentConfig) -> TrialReport:
    """Distinct full-support policies have distinct occupancy vectors."""

    def body(i):
        mdp = _draw_env(config, i)
        seeds = _child_seeds(config.seed, i, 90, n=8)
        pi1 = random_policy(mdp.n_states, mdp.n_actions, seeds[0])
        pi2 = random_policy(mdp.n_states, mdp.n_actions, seeds[1])
        k = 2
        while np.abs(pi1.probs - pi2.probs).max() < 1e-3:
            pi2 = random_policy(mdp.n_states, mdp.n_actions, seeds[k])
            k += 1
        d1, d2 = occupancy(mdp, pi1), occupancy(mdp, pi2)
        mass = 1.0 / (1.0 - mdp.discount)
        sums_ok = (
            abs(d1.d.sum() - mass) <= 1e-9 * max(1.0, mass)
            and abs(d2.d.sum() - mass) <= 1e-9 * max(1.0, mass)
        )
        gap = float(np.abs(d1.d - d2.d).max())
        ok = sums_ok and gap > 1e-9
        return {"status": "pass" if ok else "fail", "occupancy_gap": gap}

    return _run_trials(config, body)


def _claim_j_amb(config: ExperimentConfig) -> TrialReport:
    """J is blind to zero-mean shaping plus redistribution, and to nothing more."""

    def body(i):
        rng = _substream(config.seed, i, 100)
        mdp = _draw_env(config, i)
        seeds = _child_seeds(config.seed, i, 101, n=3)
        r1 = random_reward(mdp, bounds=config.bounds, seed=seeds[0], j_floor=1e-2)
        ps = sample_potential_shaping(mdp, config.bounds, True, seeds[1])
        shaped = apply(ps, r1, mdp)
        sr = sample_s_redistribution(mdp, shaped, config.bounds, seeds[2])
        r2 = apply(sr, shaped, mdp)
        if not j_equal(r1, r2, mdp).equivalent:
            return {"status": "fail", "error": "zero-mean shaping + redistribution changed J"}
        c = _loguniform(rng, 0.2, 5.0)
        while abs(c - 1.0) < 0.1:
            c = _loguniform(rng, 0.2, 5.0)
        r3 = apply(LinearScaling(c), r1, mdp)
        if j_equal(r1, r3, mdp).equivalent:
            return {"status": "fail", "error": f"scaling by {c} left J unchanged"}
        return {"status": "pass", "c": c}

    return _run_trials(config, body)


def _claim_control(config: ExperimentConfig) -> TrialReport:
    """Controllable states exist exactly when the transition function is non-trivial."""

    def body(i):
        mdp = _draw_env(config, i)
        if i % 4 == 3:
            uniform = np.full_like(mdp.transition, 1.0 / mdp.n_states)
            mdp = Mdp(transition=uniform, initial=mdp.initial, discount=mdp.discount)
        states = controllable_states(mdp)
        ok = bool(states) == (not is_trivial_transition(mdp))
        return {
            "status": "pass" if ok else "fail",
            "trivial": is_trivial_transition(mdp),
            "n_controllable": len(states),
        }

    return _run_trials(config, body)


def _claim_ex_sa_shaping(config: ExperimentConfig) -> TrialReport:
    """The composite shaping that stays inside the S x A domain preserves the ordering."""

    def body(i):
        rng = _substream(config.seed, i, 110)
        mdp = _draw_env(config, i)
        seeds = _child_seeds(config.seed, i, 111, n=1)
        r = random_reward(mdp, domain="sa", bounds=config.bounds, seed=seeds[0])
        phi = PotentialFn(rng.uniform(-config.bounds, config.bounds, size=mdp.n_states))
        shaped = shaping_on_sa_domain(phi, r, mdp)
        if shaped.domain != "sa":
            return {"status": "fail", "error": "output left the SA domain"}
        verdict = ord_equivalent(lift_reward(r), lift_reward(shaped), mdp)
        ok = verdict.equivalent and abs(verdict.certificate.c - 1.0) <= 1e-6
        return {"status": "pass" if ok else "fail"}

    return _run_trials(config, body)


def _claim_ex_transfer(config: ExperimentConfig) -> TrialReport:
    """The committed two-state pair: order-equivalent for every sampled transition
    function, yet inexpressible as scaling plus shaping alone."""
    r1, r2, n_states, n_actions = documents.load_transfer_pair()

    def body(i):
        rng = _substream(config.seed, i, 120)
        gamma = float(rng.uniform(0.3, 0.95))
        mdp = random_mdp(n_states, n_actions, gamma, _child_seeds(config.seed, i, 121, 1)[0])
        verdict = ord_equivalent(r1, r2, mdp)
        if not verdict.equivalent:
            return {"status": "fail", "error": "transfer pair not order-equivalent"}
        if decompose_ps_ls(r1, r2, gamma) is not None:
            return {"status": "fail", "error": "scaling+shaping-only fit unexpectedly succeeded"}
        return {"status": "pass", "gamma": gamma, "c_fit": verdict.certificate.c}

    return _run_trials(config, body)


CLAIMS = {
    "ORD-CHAR": _claim_ord_char,
    "BOLTZ-OPT": _claim_boltz_opt,
    "BM-ORD": _claim_bm_ord,
    "OPT-MODEL": _claim_opt_model,
    "MCE-ORD": _claim_mce_ord,
    "LEM-GAMMA": _claim_lem_gamma,
    "LEM-TAU": _claim_lem_tau,
    "MDP-MISSPEC": _claim_mdp_misspec,
    "OCC-INJ": _claim_occ_inj,
    "J-AMB": _claim_j_amb,
    "CONTROL": _claim_control,
    "EX-SA-SHAPING": _claim_ex_sa_shaping,
    "EX-TRANSFER": _claim_ex_transfer,
}

CLAIM_ORDER = list(CLAIMS)


def verify_claim(config: ExperimentConfig) -> TrialReport:
    """Run one registered claim; unknown ids raise UnknownClaimError."""
    if config.claim_id not in CLAIMS:
        raise UnknownClaimError(
            f"unknown claim {config.claim_id!r}; registered: {', '.join(CLAIM_ORDER)}"
        )
    return CLAIMS[config.claim_id](config)


def run_registry(seed: int, trials: int = 0, **config_kwargs) -> list[TrialReport]:
    """Run every registered claim at its default size with the given seed."""
    return [
        verify_claim(ExperimentConfig(claim_id=cid, trials=trials, seed=seed, **config_kwargs))
        for cid in CLAIM_ORDER
    ]
