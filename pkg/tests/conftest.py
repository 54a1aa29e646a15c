import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rewardlab import Mdp, RewardTable


def make_chain(gamma=0.5):
    """Two states, a0 = stay / a1 = switch, deterministic transitions, mu0 = (1, 0)."""
    tau = np.zeros((2, 2, 2))
    tau[0, 0, 0] = 1.0
    tau[0, 1, 1] = 1.0
    tau[1, 0, 1] = 1.0
    tau[1, 1, 0] = 1.0
    return Mdp(transition=tau, initial=np.array([1.0, 0.0]), discount=gamma)


def make_chain_reward():
    """R(s, a, s') = 1 iff s' = s1."""
    vals = np.zeros((2, 2, 2))
    vals[:, :, 1] = 1.0
    return RewardTable(vals)


@pytest.fixture
def chain():
    return make_chain()


@pytest.fixture
def chain_reward():
    return make_chain_reward()


@pytest.fixture
def chain_docs(tmp_path, chain, chain_reward):
    """CHAIN serialized to disk; returns (mdp_path, reward_path)."""
    from rewardlab import documents

    mdp_path = tmp_path / "chain_mdp.json"
    reward_path = tmp_path / "chain_reward.json"
    documents.save_doc(documents.mdp_to_doc(chain), mdp_path)
    documents.save_doc(documents.reward_to_doc(chain_reward), reward_path)
    return mdp_path, reward_path
