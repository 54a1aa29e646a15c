import json

import numpy as np
import pytest

from rewardlab import (
    Chain,
    ConstantShift,
    LinearScaling,
    OptimalityPreserving,
    PotentialFn,
    PotentialShaping,
    RewardTable,
    SuccessorRedistribution,
    j_equal,
    opt_equivalent,
)
from rewardlab import documents
from rewardlab.errors import StructuralError, ValidationFailure
from rewardlab.lab import random_mdp


class TestMdpDocuments:
    def test_round_trip(self, chain):
        doc = documents.mdp_to_doc(chain)
        back = documents.mdp_from_doc(doc)
        assert np.array_equal(back.transition, chain.transition)
        assert np.array_equal(back.initial, chain.initial)
        assert back.discount == chain.discount

    def test_labels_preserved(self):
        mdp = random_mdp(3, 2, 0.8, seed=1)
        doc = documents.mdp_to_doc(
            type(mdp)(mdp.transition, mdp.initial, mdp.discount, labels=("a", "b", "c"))
        )
        assert documents.mdp_from_doc(doc).labels == ("a", "b", "c")

    def test_loader_revalidates(self, chain):
        doc = documents.mdp_to_doc(chain)
        doc["transition"][0][0] = [0.5, 0.4]
        with pytest.raises(ValidationFailure) as err:
            documents.mdp_from_doc(doc)
        assert "row-sum" in err.value.report.rule_ids()

    def test_malformed_is_structural(self):
        with pytest.raises(StructuralError):
            documents.mdp_from_doc({"n_states": 2})
        with pytest.raises(StructuralError):
            documents.mdp_from_doc(
                {
                    "n_states": 3,  # declared size disagrees with the tensor
                    "n_actions": 2,
                    "gamma": 0.5,
                    "mu0": [1.0, 0.0],
                    "transition": [[[1.0, 0.0], [0.0, 1.0]], [[0.0, 1.0], [1.0, 0.0]]],
                }
            )

    def test_file_round_trip(self, tmp_path, chain):
        path = tmp_path / "mdp.json"
        documents.save_doc(documents.mdp_to_doc(chain), path)
        assert np.array_equal(documents.load_mdp(path).transition, chain.transition)


class TestRewardDocuments:
    def test_sas_round_trip(self, chain_reward):
        back = documents.reward_from_doc(documents.reward_to_doc(chain_reward))
        assert np.array_equal(back.values, chain_reward.values)
        assert back.domain == "sas"

    def test_sa_round_trip_compact(self):
        r = RewardTable.from_sa([[1.0, -0.5], [0.0, 2.0]])
        doc = documents.reward_to_doc(r)
        assert np.array(doc["values"]).shape == (2, 2)
        back = documents.reward_from_doc(doc)
        assert back.domain == "sa"
        assert np.array_equal(back.values, r.values)

    def test_state_domain_needs_n_actions(self):
        r = RewardTable.from_state([1.0, 2.0], n_actions=3)
        doc = documents.reward_to_doc(r)
        assert np.array(doc["values"]).shape == (2,)
        with pytest.raises(StructuralError):
            documents.reward_from_doc(doc)
        back = documents.reward_from_doc(doc, n_actions=3)
        assert np.array_equal(back.values, r.values)

    def test_unknown_domain(self):
        with pytest.raises(StructuralError):
            documents.reward_from_doc({"domain": "saq", "values": []})


class TestTransformDocuments:
    def test_all_kinds_round_trip(self, chain_reward):
        specs = [
            PotentialShaping(PotentialFn(np.array([0.1, -0.2]), zero_initial_expectation=True)),
            SuccessorRedistribution(chain_reward),
            LinearScaling(2.5),
            ConstantShift(-1.0),
            OptimalityPreserving(psi=np.array([1.0, 0.0]), slack=-np.ones((2, 2))),
        ]
        specs.append(Chain(tuple(specs[:3])))
        for spec in specs:
            doc = documents.transform_to_doc(spec)
            back = documents.transform_from_doc(json.loads(json.dumps(doc)))
            assert documents.transform_to_doc(back) == doc

    def test_unknown_kind(self):
        with pytest.raises(StructuralError):
            documents.transform_from_doc({"kind": "warp"})


class TestModelDocuments:
    def test_round_trips(self):
        from rewardlab import BehaviouralModel, FVariantSpec

        models = [
            BehaviouralModel(kind="boltzmann", beta=2.0),
            BehaviouralModel(kind="mce", alpha=0.3),
            BehaviouralModel(kind="optimal-set"),
            BehaviouralModel(
                kind="fvariant", spec=FVariantSpec(variant="mixture", lam=0.4, beta1=1.0, beta2=2.0)
            ),
        ]
        for model in models:
            doc = documents.model_to_doc(model)
            assert documents.model_to_doc(documents.model_from_doc(json.loads(json.dumps(doc)))) == doc

    def test_malformed(self):
        with pytest.raises(StructuralError):
            documents.model_from_doc({"kind": "boltzmann"})


class TestVerdictDocuments:
    def test_equivalent_with_certificate(self, chain, chain_reward):
        verdict = j_equal(chain_reward, chain_reward, chain)
        doc = documents.verdict_to_doc(verdict)
        assert doc["equivalent"] and doc["relation"] == "jeq"
        assert doc["certificate"]["c"] == 1.0

    def test_witness_serialized(self, chain, chain_reward):
        verdict = opt_equivalent(chain_reward, RewardTable(-chain_reward.values), chain)
        doc = documents.verdict_to_doc(verdict)
        assert not doc["equivalent"]
        assert doc["witness"]["state"] == 0


class TestTransferFixture:
    def test_quoted_values(self):
        r1, r2, n_states, n_actions = documents.load_transfer_pair()
        assert (n_states, n_actions) == (2, 2)
        assert r1.values[0, 0, 0] == 1.0
        assert r1.values[0, 0, 1] == 0.5
        assert r2.values[0, 0, 0] == 0.5
        assert r2.values[0, 0, 1] == 1.0


def test_dumps_is_lossless_for_doubles():
    awkward = {"a": 0.1 + 0.2, "b": 1.0 / 3.0, "c": 1e-300, "d": [np.pi]}
    again = json.loads(documents.dumps(awkward))
    assert again["a"] == awkward["a"]
    assert again["b"] == awkward["b"]
    assert again["c"] == awkward["c"]
    assert again["d"][0] == awkward["d"][0]


def test_dumps_stable_key_order():
    doc = {"zeta": 1, "alpha": {"q": 2, "b": 3}}
    assert documents.dumps(doc) == documents.dumps(json.loads(documents.dumps(doc)))
