import abc
import dataclasses


@dataclasses.dataclass(frozen=True)
class Transition:
    """
    One step of experience.
    """

    state: int
    action: int
    reward: float
    next_state: int
    terminal: bool


class Agent(abc.ABC):
    """
    Interface between an environment and a decision maker.

    The environment only ever calls these three methods, so any implementation can
    be plugged in without changing the environment.
    """

    #: The number of actions the agent chooses between
    n_actions: int

    def begin_episode(self):
        """
        Called at the start of every episode.
        """

    @abc.abstractmethod
    def select_action(self, state):
        """
        Returns the index of the action to take in the given state.
        """

    def observe(self, transition):
        """
        Called with the transition that resulted from the selected action.
        """


class PolicyAgent(Agent):
    """
    Agent that follows a fixed deterministic policy.
    """

    def __init__(self, policy, n_actions):
        self.policy = tuple(int(action) for action in policy)
        self.n_actions = n_actions
        if any(not 0 <= action < n_actions for action in self.policy):
            raise ValueError("policy selects actions outside the action space")

    def select_action(self, state):
        return self.policy[state]
