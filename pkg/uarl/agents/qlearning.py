import csv
import logging

import numpy as np

from .base import Agent

logger = logging.getLogger(__name__)

#: Label of the header cell above the state labels in a saved table
CORNER_LABEL = "state\\action"


class QTable:
    """
    Tabular action-value estimates with epsilon-greedy action selection.
    """

    def __init__(
        self,
        n_states,
        n_actions,
        /,
        alpha=0.4,
        gamma=0.9,
        epsilon=0.1,
        seed=None,
        values=None,
    ):
        if not 0 < alpha <= 1:
            raise ValueError(f"alpha must be in (0, 1], got {alpha}")
        if not 0 <= gamma < 1:
            raise ValueError(f"gamma must be in [0, 1), got {gamma}")
        if not 0 <= epsilon <= 1:
            raise ValueError(f"epsilon must be in [0, 1], got {epsilon}")
        self.alpha = alpha
        self.gamma = gamma
        self.epsilon = epsilon
        self.rng = np.random.default_rng(seed)
        if values is None:
            self.values = np.zeros((n_states, n_actions))
        else:
            self.values = np.array(values, dtype=float)
            if self.values.shape != (n_states, n_actions):
                raise ValueError(
                    f"expected a {n_states}x{n_actions} table, "
                    f"got {self.values.shape}"
                )

    @property
    def n_states(self):
        return self.values.shape[0]

    @property
    def n_actions(self):
        return self.values.shape[1]

    def update(self, transition):
        """
        Applies the Q-learning update for the transition and returns the TD error.

        Terminal transitions do not bootstrap from the next state.
        """
        state, action = transition.state, transition.action
        target = transition.reward
        if not transition.terminal:
            target += self.gamma * self.values[transition.next_state].max()
        delta = target - self.values[state, action]
        self.values[state, action] += self.alpha * delta
        return delta

    def best_action(self, state):
        """
        Returns the action with the highest value, the lowest index on ties.
        """
        return int(np.argmax(self.values[state]))

    def select_action(self, state):
        """
        Returns a uniformly random action with probability epsilon and the best
        action otherwise.
        """
        if self.rng.random() < self.epsilon:
            return int(self.rng.integers(self.n_actions))
        return self.best_action(state)

    def greedy_policy(self):
        """
        Returns the best action for every state.
        """
        return tuple(int(action) for action in np.argmax(self.values, axis=1))

    def save(self, path, state_labels=None, action_labels=None):
        """
        Writes the table as CSV, one row per state and one column per action.
        """
        state_labels = state_labels or [str(s) for s in range(self.n_states)]
        action_labels = action_labels or [str(a) for a in range(self.n_actions)]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([CORNER_LABEL, *action_labels])
            for label, row in zip(state_labels, self.values):
                writer.writerow([label, *(repr(float(v)) for v in row)])
        logger.info("saved %dx%d Q-table to %s", self.n_states, self.n_actions, path)

    @classmethod
    def load(cls, path, **kwargs):
        """
        Reads a table written by save, returning (table, state labels, action labels).
        """
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or not rows[0] or rows[0][0] != CORNER_LABEL:
            raise ValueError(f"{path} is not a Q-table")
        if not all(rows[1:]):
            raise ValueError(f"{path} holds a blank row")
        action_labels = rows[0][1:]
        state_labels = [row[0] for row in rows[1:]]
        try:
            values = [[float(v) for v in row[1:]] for row in rows[1:]]
        except ValueError as exc:
            raise ValueError(f"{path} holds a non-numeric entry: {exc}")
        if any(len(row) != len(action_labels) for row in values):
            raise ValueError(f"{path} has rows of differing length")
        if not np.all(np.isfinite(values)):
            raise ValueError(f"{path} holds non-finite entries")
        table = cls(len(state_labels), len(action_labels), values=values, **kwargs)
        return table, state_labels, action_labels


class QLearningAgent(Agent):
    """
    Agent that learns a Q-table while acting epsilon-greedily on it.

    With learning disabled, the agent acts greedily and leaves the table untouched.
    """

    def __init__(self, table, learning=True):
        self.table = table
        self.learning = learning

    @property
    def n_actions(self):
        return self.table.n_actions

    def select_action(self, state):
        if self.learning:
            return self.table.select_action(state)
        return self.table.best_action(state)

    def observe(self, transition):
        if self.learning:
            self.table.update(transition)
