from . import nodes
from .simulator import MaterialColor, Outcome, Side

#: The reward earned by each outcome of a run
OUTCOME_REWARDS = {
    Outcome.CORRECT: 5.0,
    Outcome.WRONG: -1.0,
    Outcome.DROPPED: -3.0,
    Outcome.STUCK: -5.0,
}


def default_reward_rules(green_side=Side.LEFT, server=0):
    """
    Returns the plant's reward table as reward rule configuration data.
    """
    green_side = Side(green_side)
    rules = []
    for side in Side:
        for color in MaterialColor:
            correct = (side is green_side) == (color is MaterialColor.GREEN)
            outcome = Outcome.CORRECT if correct else Outcome.WRONG
            rules.append((side.station, int(color), outcome))
    rules.append((nodes.LIGHT_GRID, 1, Outcome.DROPPED))
    rules.append((nodes.STUCK_DETECTED, 1, Outcome.STUCK))
    return [
        {
            "server": server,
            "node": str(node_id),
            "value": value,
            "reward": OUTCOME_REWARDS[outcome],
            "terminal": True,
            "outcome": outcome.value,
        }
        for node_id, value, outcome in rules
    ]
