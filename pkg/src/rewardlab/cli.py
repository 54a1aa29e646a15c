"""Command-line front end: validate, solve, equiv, transform, lab.

Exit codes follow a fixed contract: ``solve``/``validate``/``transform`` exit
2 on validation failure and 3 on solver non-convergence; ``equiv`` exits 0 for
equivalent, 1 for not equivalent, 2 and up for errors; ``lab`` exits 0 iff the
claim (or the whole registry) passes. Randomized subcommands require an
explicit seed; nothing is ever seeded from the clock. JSON is the stable
output surface; the text format is for humans and may change.
"""

from __future__ import annotations

import json
import sys

import click

from . import documents
from .equiv import j_equal, opt_equivalent, ord_equivalent
from .errors import (
    CapacityError,
    ConvergenceError,
    StructuralError,
    UnknownClaimError,
    ValidationFailure,
)
from .lab import ExperimentConfig, run_registry, verify_claim
from .models import boltzmann_policy, mce_policy
from .solve import optimal_values
from .transform import apply as apply_transform

_LOAD_ERRORS = (StructuralError, ValidationFailure, OSError, json.JSONDecodeError)


def _emit(doc, fmt: str, out, text_renderer) -> None:
    payload = documents.dumps(doc) if fmt == "json" else text_renderer(doc)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        click.echo(payload, nl=False)


def _solve_text(doc) -> str:
    lines = ["optimal values"]
    lines.append(f"  v_star: {doc['v_star']}")
    lines.append(f"  opt_sets: {doc['opt_sets']}")
    lines.append(f"  residual: {doc['residual']:.3e}")
    for key in ("boltzmann_policy", "mce_policy"):
        if key in doc:
            lines.append(f"  {key}: {doc[key]}")
    return "\n".join(lines) + "\n"


@click.group()
def main():
    """Tabular-MDP solvers, reward-equivalence deciders, and the claim registry."""


@main.command()
@click.argument("mdp_path", type=click.Path(exists=True))
@click.option("--reward", "reward_path", type=click.Path(exists=True), default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="text")
def validate(mdp_path, reward_path, fmt):
    """Validate an MDP document (and optionally a reward document against it)."""
    try:
        doc = documents.load_json(mdp_path)
        mdp = documents.mdp_from_doc(doc)
        if reward_path:
            documents.load_reward(reward_path, n_actions=mdp.n_actions)
    except ValidationFailure as exc:
        report = exc.report
        violations = [list(v) for v in report.violations] if report else []
        _emit({"ok": False, "violations": violations}, fmt, None,
              lambda d: "invalid:\n" + "\n".join(f"  {v}" for v in d["violations"]) + "\n")
        sys.exit(2)
    except _LOAD_ERRORS as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    _emit({"ok": True, "violations": []}, fmt, None, lambda d: "ok\n")


@main.command()
@click.argument("mdp_path", type=click.Path(exists=True))
@click.argument("reward_path", type=click.Path(exists=True))
@click.option("--tol", type=float, default=1e-10, show_default=True)
@click.option("--beta", type=float, default=None, help="also report the softmax-of-Q* policy")
@click.option("--alpha", type=float, default=None, help="also report the entropy-regularized policy")
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="text")
@click.option("--out", type=click.Path(), default=None)
def solve(mdp_path, reward_path, tol, beta, alpha, fmt, out):
    """Solve for optimal values, advantages, and optimal-action sets."""
    try:
        mdp = documents.load_mdp(mdp_path)
        r = documents.load_reward(reward_path, n_actions=mdp.n_actions)
    except _LOAD_ERRORS as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    try:
        bundle = optimal_values(mdp, r, tol=tol)
        doc = {
            "v_star": bundle.v_star.tolist(),
            "q_star": bundle.q_star.tolist(),
            "a_star": bundle.a_star.tolist(),
            "opt_sets": [sorted(s) for s in bundle.opt_sets],
            "residual": bundle.residual,
        }
        if beta is not None:
            doc["boltzmann_policy"] = boltzmann_policy(mdp, r, beta).probs.tolist()
        if alpha is not None:
            doc["mce_policy"] = mce_policy(mdp, r, alpha).probs.tolist()
    except ConvergenceError as exc:
        click.echo(f"solver did not converge: {exc}", err=True)
        sys.exit(3)
    _emit(doc, fmt, out, _solve_text)


@main.command()
@click.argument("mdp_path", type=click.Path(exists=True))
@click.argument("r1_path", type=click.Path(exists=True))
@click.argument("r2_path", type=click.Path(exists=True))
@click.option("--relation", type=click.Choice(["opt", "ord", "jeq"]), default="ord", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="text")
@click.option("--out", type=click.Path(), default=None)
def equiv(mdp_path, r1_path, r2_path, relation, fmt, out):
    """Decide whether two rewards are equivalent under the chosen relation."""
    try:
        mdp = documents.load_mdp(mdp_path)
        r1 = documents.load_reward(r1_path, n_actions=mdp.n_actions)
        r2 = documents.load_reward(r2_path, n_actions=mdp.n_actions)
    except _LOAD_ERRORS as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    try:
        decider = {"opt": opt_equivalent, "ord": ord_equivalent, "jeq": j_equal}[relation]
        verdict = decider(r1, r2, mdp)
    except (ConvergenceError, CapacityError) as exc:
        click.echo(f"solver error: {exc}", err=True)
        sys.exit(3)

    def text(doc):
        if doc["equivalent"]:
            line = f"equivalent ({doc['relation']})"
            if doc["certificate"]:
                line += f", certificate c={doc['certificate']['c']:.12g}"
            return line + "\n"
        return f"not equivalent ({doc['relation']}), witness: {doc['witness']}\n"

    _emit(documents.verdict_to_doc(verdict), fmt, out, text)
    sys.exit(0 if verdict.equivalent else 1)


@main.command()
@click.argument("mdp_path", type=click.Path(exists=True))
@click.argument("reward_path", type=click.Path(exists=True))
@click.argument("spec_path", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), default=None)
def transform(mdp_path, reward_path, spec_path, out):
    """Apply a transformation document to a reward and emit the result."""
    try:
        mdp = documents.load_mdp(mdp_path)
        r = documents.load_reward(reward_path, n_actions=mdp.n_actions)
        spec = documents.load_transform(spec_path)
    except _LOAD_ERRORS + (ValueError,) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    try:
        result = apply_transform(spec, r, mdp)
    except ConvergenceError as exc:
        click.echo(f"solver did not converge: {exc}", err=True)
        sys.exit(3)
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    _emit(documents.reward_to_doc(result), "json", out, lambda d: "")


@main.command()
@click.option("--claim", default=None, help="claim id, or 'all' for the whole registry")
@click.option("--seed", type=int, default=None, help="required here or in the config file")
@click.option("--trials", type=int, default=None, help="override the claim's default trial count")
@click.option("--gamma1", type=float, default=None)
@click.option("--gamma2", type=float, default=None)
@click.option("--tol", type=float, default=None)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="JSON file with the same keys; explicit flags override it")
@click.option("--out", type=click.Path(), default=None)
def lab(claim, seed, trials, gamma1, gamma2, tol, config_path, out):
    """Run registered theorem checks; exit 0 iff everything passes."""
    file_cfg = documents.load_json(config_path) if config_path else {}
    claim = claim if claim is not None else file_cfg.get("claim")
    seed = seed if seed is not None else file_cfg.get("seed")
    trials = trials if trials is not None else int(file_cfg.get("trials", 0))
    gamma1 = gamma1 if gamma1 is not None else file_cfg.get("gamma1")
    gamma2 = gamma2 if gamma2 is not None else file_cfg.get("gamma2")
    if claim is None:
        click.echo("error: --claim is required (flag or config file)", err=True)
        sys.exit(2)
    if seed is None:
        # No wall-clock seeding: randomized runs must be reproducible.
        click.echo("error: --seed is required (flag or config file)", err=True)
        sys.exit(2)
    seed = int(seed)
    params = dict(file_cfg.get("params", {}))
    if gamma1 is not None and gamma2 is not None:
        params["gamma_pairs"] = [[gamma1, gamma2]]
    if tol is not None:
        params["tol"] = tol
    try:
        if claim == "all":
            reports = run_registry(seed=seed, trials=trials, params=params)
        else:
            config = ExperimentConfig(claim_id=claim, trials=trials, seed=seed, params=params)
            reports = [verify_claim(config)]
    except UnknownClaimError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    doc = {
        "ok": all(rep.ok for rep in reports),
        "claims": {rep.claim_id: rep.to_doc() for rep in reports},
        "order": [rep.claim_id for rep in reports],
    }
    payload = documents.dumps(doc)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    for rep in reports:
        counts = rep.counts
        click.echo(
            f"{'PASS' if rep.ok else 'FAIL'} {rep.claim_id}: "
            f"{counts['pass']} pass, {counts['fail']} fail, {counts['skip']} skip "
            f"({rep.wall_clock_s:.2f}s)"
        )
    sys.exit(0 if doc["ok"] else 1)


if __name__ == "__main__":
    main()
