import collections
import math

import numpy as np

from ..agents import ExplicitMdp, MdpOutcome  # noqa: TID252
from . import nodes
from .rewards import OUTCOME_REWARDS
from .simulator import MaterialColor, Phase, PlantSimulator, PlantState, Side

#: Grid sizes of the observation sensors, in node id order
SENSOR_SHAPE = tuple(len(nodes.MARKERS[n].values()) for n in nodes.OBSERVATION_SENSORS)
#: Grid sizes of the actuators, in node id order
ACTUATOR_SHAPE = tuple(len(nodes.MARKERS[n].values()) for n in nodes.ACTUATORS)


def observation_index(barrier, color):
    """
    Returns the flat observation index of the sensor readings.
    """
    return int(np.ravel_multi_index((barrier, color), SENSOR_SHAPE))


def action_index(rotate, direction):
    """
    Returns the flat action index of the actuator values.
    """
    return int(np.ravel_multi_index((rotate, direction), ACTUATOR_SHAPE))


def action_values(index):
    """
    Returns the (rotate, direction) actuator values of a flat action index.
    """
    return tuple(int(v) for v in np.unravel_index(index, ACTUATOR_SHAPE))


def build_mdp(stuck_timeout=10, green_side=Side.LEFT):
    """
    Builds the MDP of the plant over its observation states by running every action
    from every state of the simulator.

    The material color is hidden until the color station, so an observation stands
    for the equally likely plant states that produce it. Observations the plant
    never produces are absorbing with no reward.
    """
    simulator = PlantSimulator(
        nodes.build_plant_space(), 0, stuck_timeout=stuck_timeout, green_side=green_side
    )
    members = collections.defaultdict(list)
    for phase in (Phase.INBOUND, Phase.AT_COLOR_STATION, Phase.ON_TABLE):
        for color in MaterialColor:
            state = PlantState(phase, color)
            members[observation_index(*state.sensors)].append(state)
    n_states = math.prod(SENSOR_SHAPE)
    n_actions = math.prod(ACTUATOR_SHAPE)
    outcomes = {}
    for observation in range(n_states):
        states = members.get(observation)
        for action in range(n_actions):
            if not states:
                outcomes[observation, action] = [
                    MdpOutcome(1.0, observation, 0.0, True)
                ]
                continue
            distribution = collections.defaultdict(float)
            for state in states:
                simulator.restore(state)
                result = simulator.actuate(*action_values(action))
                if result.jammed:
                    result = simulator.tick(stuck_timeout)
                terminal = result.phase is Phase.TERMINAL
                reward = OUTCOME_REWARDS[result.outcome] if terminal else 0.0
                key = (observation_index(*result.sensors), reward, terminal)
                distribution[key] += 1 / len(states)
            outcomes[observation, action] = [
                MdpOutcome(probability, next_state, reward, terminal)
                for (next_state, reward, terminal), probability in distribution.items()
            ]
    return ExplicitMdp(n_states, n_actions, outcomes)
