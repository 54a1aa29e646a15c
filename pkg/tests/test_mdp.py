import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rewardlab import (
    Mdp,
    RewardTable,
    StochasticPolicy,
    enumerate_deterministic_policies,
    is_trivial_transition,
    lift_reward,
    reward_vector,
    validate_mdp,
)
from rewardlab.errors import CapacityError, StructuralError
from rewardlab.mdp import ActionSetPolicy

from conftest import make_chain


class TestValidateMdp:
    def test_chain_is_valid(self, chain):
        report = validate_mdp(chain)
        assert report.ok
        assert report.violations == ()

    def test_unreachable_state_reported(self, chain):
        # Redirect the only edge into s1 back to s0: s1 becomes unreachable.
        tau = chain.transition.copy()
        tau[0, 1] = [1.0, 0.0]
        broken = Mdp(transition=tau, initial=chain.initial, discount=0.5)
        report = validate_mdp(broken)
        assert not report.ok
        assert ("unreachable-state", "s1", 1.0) in report.violations

    def test_row_sum_violation(self, chain):
        tau = chain.transition.copy()
        tau[0, 0] = [0.5, 0.4]
        report = validate_mdp(Mdp(transition=tau, initial=chain.initial, discount=0.5))
        assert not report.ok
        rules = {(v[0], v[1]) for v in report.violations}
        assert ("row-sum", "(s0,a0)") in rules

    def test_negative_entry_and_mu0(self, chain):
        tau = chain.transition.copy()
        tau[1, 1] = [1.5, -0.5]
        report = validate_mdp(Mdp(transition=tau, initial=np.array([0.7, 0.2]), discount=0.5))
        assert "negative-entry" in report.rule_ids()
        assert "mu0-sum" in report.rule_ids()

    def test_shape_mismatch_is_structural(self):
        with pytest.raises(StructuralError):
            Mdp(transition=np.ones((2, 2)), initial=np.array([1.0, 0.0]), discount=0.5)
        with pytest.raises(StructuralError):
            Mdp(transition=np.ones((2, 2, 3)) / 3, initial=np.array([1.0, 0.0]), discount=0.5)

    def test_discount_range(self, chain):
        for gamma in (0.0, 1.0, 1.5, -0.2):
            with pytest.raises(StructuralError):
                Mdp(transition=chain.transition, initial=chain.initial, discount=gamma)

    def test_validated_inputs_are_immutable(self, chain):
        with pytest.raises(ValueError):
            chain.transition[0, 0, 0] = 0.0


class TestTrivialTransition:
    def test_chain_not_trivial(self, chain):
        assert not is_trivial_transition(chain)

    def test_single_action_is_trivial(self):
        tau = np.array([[[0.3, 0.7]], [[1.0, 0.0]]])
        mdp = Mdp(transition=tau, initial=np.array([0.5, 0.5]), discount=0.9)
        assert is_trivial_transition(mdp)

    def test_uniform_rows_trivial(self):
        mdp = Mdp(
            transition=np.full((3, 2, 3), 1 / 3), initial=np.full(3, 1 / 3), discount=0.9
        )
        assert is_trivial_transition(mdp)


class TestEnumerate:
    def test_chain_has_four_policies(self, chain):
        policies = list(enumerate_deterministic_policies(chain))
        assert len(policies) == 4
        # s0-major lexicographic order: (a0,a0), (a0,a1), (a1,a0), (a1,a1)
        actions = [tuple(np.argmax(p.probs, axis=1)) for p in policies]
        assert actions == [(0, 0), (0, 1), (1, 0), (1, 1)]

    def test_three_states_two_actions(self):
        tau = np.full((3, 2, 3), 1 / 3)
        mdp = Mdp(transition=tau, initial=np.full(3, 1 / 3), discount=0.5)
        assert len(list(enumerate_deterministic_policies(mdp))) == 8

    def test_cap_exceeded(self):
        tau = np.full((10, 5, 10), 0.1)
        mdp = Mdp(transition=tau, initial=np.full(10, 0.1), discount=0.5)
        with pytest.raises(CapacityError):
            list(enumerate_deterministic_policies(mdp))

    def test_policies_distinct_and_one_hot(self):
        tau = np.full((3, 3, 3), 1 / 3)
        mdp = Mdp(transition=tau, initial=np.full(3, 1 / 3), discount=0.5)
        policies = [p.probs for p in enumerate_deterministic_policies(mdp)]
        assert len({p.tobytes() for p in policies}) == 27
        for p in policies:
            assert set(np.unique(p)) == {0.0, 1.0}
            assert np.all(p.sum(axis=1) == 1.0)


class TestRewardTable:
    def test_lift_sa_broadcast(self):
        r = RewardTable.from_sa([[1.0, 0.0], [0.0, 2.0]])
        lifted = lift_reward(r)
        assert lifted.domain == "sas"
        assert np.all(lifted.values[0, 0, :] == 1.0)
        assert np.all(lifted.values[1, 1, :] == 2.0)

    def test_lift_state_broadcast(self):
        r = RewardTable.from_state([2.0, -1.0], n_actions=3)
        lifted = lift_reward(r)
        assert lifted.domain == "sas"
        assert np.all(lifted.values[0] == 2.0)
        assert np.all(lifted.values[1] == -1.0)

    def test_lift_sas_identity(self, chain_reward):
        lifted = lift_reward(chain_reward)
        assert lifted.domain == "sas"
        assert np.array_equal(lifted.values, chain_reward.values)

    def test_lift_preserves_reward_vector_bitwise(self, chain):
        r = RewardTable.from_sa([[0.3, -0.7], [1.1, 0.0]])
        before = reward_vector(r, chain).r
        after = reward_vector(lift_reward(r), chain).r
        assert np.array_equal(before, after)

    def test_domain_tag_enforced(self):
        vals = np.zeros((2, 2, 2))
        vals[0, 0, 1] = 1.0  # varies over s'
        with pytest.raises(StructuralError):
            RewardTable(vals, domain="sa")
        with pytest.raises(StructuralError):
            RewardTable(np.full((2, 2, 2), np.nan))

    def test_unknown_domain(self):
        with pytest.raises(StructuralError):
            RewardTable(np.zeros((2, 2, 2)), domain="qq")


class TestPolicies:
    def test_row_sums_checked(self):
        with pytest.raises(StructuralError):
            StochasticPolicy(np.array([[0.5, 0.4], [1.0, 0.0]]))
        with pytest.raises(StructuralError):
            StochasticPolicy(np.array([[1.2, -0.2], [1.0, 0.0]]))

    def test_full_support_flag(self):
        assert StochasticPolicy(np.array([[0.5, 0.5]])).full_support
        assert not StochasticPolicy(np.array([[1.0, 0.0]])).full_support

    def test_action_sets_must_be_nonempty(self):
        with pytest.raises(StructuralError):
            ActionSetPolicy((frozenset({0}), frozenset()))


@settings(max_examples=25, deadline=None)
@given(
    n_states=st.integers(2, 4),
    n_actions=st.integers(1, 3),
    seed=st.integers(0, 10_000),
)
def test_row_normalized_dense_tensors_validate(n_states, n_actions, seed):
    rng = np.random.default_rng(seed)
    tau = rng.random((n_states, n_actions, n_states)) + 0.05
    tau /= tau.sum(axis=2, keepdims=True)
    mu0 = rng.random(n_states) + 0.05
    mu0 /= mu0.sum()
    report = validate_mdp(Mdp(transition=tau, initial=mu0, discount=0.9))
    assert report.ok


def test_chain_matches_fixture_helper(chain):
    assert np.array_equal(make_chain().transition, chain.transition)
