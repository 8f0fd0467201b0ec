from .base import Agent, PolicyAgent, Transition  # noqa: F401
from .baseline import RandomAgent  # noqa: F401
from .mdp import (  # noqa: F401
    ExplicitMdp,
    MdpOutcome,
    optimal_q_values,
    value_iteration,
)
from .qlearning import QLearningAgent, QTable  # noqa: F401
