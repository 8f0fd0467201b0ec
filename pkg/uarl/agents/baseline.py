import numpy as np

from .base import Agent


class RandomAgent(Agent):
    """
    Baseline agent that picks actions uniformly at random.
    """

    def __init__(self, n_actions, seed=None):
        self.n_actions = n_actions
        self.rng = np.random.default_rng(seed)

    def select_action(self, state):
        return int(self.rng.integers(self.n_actions))
