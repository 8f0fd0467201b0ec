import dataclasses
import logging

import numpy as np

logger = logging.getLogger(__name__)

#: Tolerance applied when checking that outcome probabilities sum to one
PROBABILITY_TOLERANCE = 1e-9


@dataclasses.dataclass(frozen=True)
class MdpOutcome:
    """
    One possible result of taking an action in a state.
    """

    probability: float
    next_state: int
    reward: float
    terminal: bool = False


class ExplicitMdp:
    """
    A finite MDP given by the distribution of outcomes of every (state, action).

    Terminal outcomes end the episode, so their next state is never bootstrapped.
    """

    def __init__(self, n_states, n_actions, outcomes):
        self.n_states = n_states
        self.n_actions = n_actions
        self._outcomes = {}
        #: Probability of continuing from (s, a) into s'
        self.transitions = np.zeros((n_states, n_actions, n_states))
        #: Probability that (s, a) ends the episode
        self.termination = np.zeros((n_states, n_actions))
        #: Expected immediate reward of (s, a)
        self.rewards = np.zeros((n_states, n_actions))
        for state in range(n_states):
            for action in range(n_actions):
                try:
                    distribution = tuple(outcomes[state, action])
                except KeyError:
                    raise ValueError(f"no outcomes for state {state}, action {action}")
                self._add(state, action, distribution)

    def _add(self, state, action, distribution):
        total = sum(outcome.probability for outcome in distribution)
        if abs(total - 1.0) > PROBABILITY_TOLERANCE:
            raise ValueError(
                f"outcome probabilities of state {state}, action {action} "
                f"sum to {total}"
            )
        for outcome in distribution:
            if not 0 <= outcome.next_state < self.n_states:
                raise ValueError(f"next state {outcome.next_state} out of range")
            self.rewards[state, action] += outcome.probability * outcome.reward
            if outcome.terminal:
                self.termination[state, action] += outcome.probability
            else:
                next_state = outcome.next_state
                self.transitions[state, action, next_state] += outcome.probability
        self._outcomes[state, action] = distribution

    def outcomes(self, state, action):
        """
        Returns the distribution of outcomes of taking the action in the state.
        """
        return self._outcomes[state, action]

    def q_values(self, values, gamma):
        """
        Returns the action values induced by the given state values.
        """
        return self.rewards + gamma * self.transitions @ values

    def policy_values(self, policy, gamma=1.0, tol=1e-10, max_iterations=100000):
        """
        Returns the expected return of following a stochastic policy, given as a
        states x actions array of action probabilities.
        """
        values = np.zeros(self.n_states)
        for _ in range(max_iterations):
            updated = (policy * self.q_values(values, gamma)).sum(axis=1)
            if np.max(np.abs(updated - values)) < tol:
                return updated
            values = updated
        return values


def value_iteration(mdp, gamma, tol=1e-9, max_iterations=100000):
    """
    Solves the MDP using Bellman optimality backups.

    Returns the state values and the greedy policy, ties going to the lowest
    action index.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    values = np.zeros(mdp.n_states)
    for iteration in range(1, max_iterations + 1):
        updated = mdp.q_values(values, gamma).max(axis=1)
        delta = np.max(np.abs(updated - values))
        values = updated
        if delta < tol:
            logger.debug("value iteration converged after %d sweeps", iteration)
            break
    else:
        logger.warning("value iteration stopped after %d sweeps", max_iterations)
    policy = np.argmax(mdp.q_values(values, gamma), axis=1)
    return values, policy


def optimal_q_values(mdp, gamma, tol=1e-9):
    """
    Returns the optimal action values of the MDP.
    """
    values, _ = value_iteration(mdp, gamma, tol)
    return mdp.q_values(values, gamma)
