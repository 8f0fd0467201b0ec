from . import nodes  # noqa: F401
from .mdp import (  # noqa: F401
    ACTUATOR_SHAPE,
    SENSOR_SHAPE,
    action_index,
    action_values,
    build_mdp,
    observation_index,
)
from .nodes import build_plant_space  # noqa: F401
from .rewards import OUTCOME_REWARDS, default_reward_rules  # noqa: F401
from .server import PlantServer, PlantSettings, serve_plant  # noqa: F401
from .simulator import (  # noqa: F401
    MaterialColor,
    Outcome,
    Phase,
    PlantSimulator,
    PlantState,
    Side,
)
