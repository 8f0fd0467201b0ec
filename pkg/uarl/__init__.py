from .address_space import AddressSpace, Node, NodeId, RLMarker, Value  # noqa: F401
from .agents import (  # noqa: F401
    Agent,
    PolicyAgent,
    QLearningAgent,
    QTable,
    RandomAgent,
    Transition,
)
from .client import AsyncSession, SyncSession  # noqa: F401
from .config import ConfigurationError, TrainConfig  # noqa: F401
from .endpoint import Endpoint  # noqa: F401
from .mapper import Environment, discover_spaces  # noqa: F401
from .server import Server, serve  # noqa: F401
