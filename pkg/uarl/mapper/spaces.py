import dataclasses
import logging
import math

import numpy as np

from ..address_space import DOUBLE_TOLERANCE, NodeId, Value, ValueType  # noqa: TID252
from .errors import EmptySpace, IncompleteCache, IndexOutOfRange, UnknownValue

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class NodeBinding:
    """
    A marked node of one server together with its grid of values.
    """

    #: Position of the node's server in the configured endpoint list
    server_index: int
    node: NodeId
    values: tuple[Value, ...]
    browse_name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise ValueError(f"binding for {self.node} has no values")

    @property
    def key(self):
        return self.server_index, self.node

    @property
    def label(self):
        return self.browse_name or str(self.node)

    def index_of(self, value):
        """
        Returns the position of the value in the grid.
        """
        for index, candidate in enumerate(self.values):
            if candidate.variant is not value.variant:
                continue
            if value.variant is ValueType.DOUBLE:
                if abs(candidate.data - value.data) <= DOUBLE_TOLERANCE:
                    return index
            elif candidate.data == value.data:
                return index
        raise UnknownValue(f"{value} is not on the grid of {self.label}")


class SpaceSpec:
    """
    An ordered product of node bindings.

    Flat indexes map to value tuples in mixed radix, with the first binding as the
    most significant digit.
    """

    def __init__(self, bindings):
        self.bindings = tuple(bindings)
        keys = [binding.key for binding in self.bindings]
        if len(set(keys)) != len(keys):
            raise ValueError("a node may only be bound once in a space")
        self.shape = tuple(len(binding.values) for binding in self.bindings)

    @property
    def size(self):
        return math.prod(self.shape) if self.bindings else 0

    def __len__(self):
        return self.size

    def __eq__(self, other):
        if not isinstance(other, SpaceSpec):
            return NotImplemented
        return self.bindings == other.bindings

    def __repr__(self):
        return f"SpaceSpec({self.size}: {self.describe()})"

    def describe(self):
        """
        Returns the product of the binding names, e.g. "RotateTable×BeltDirection".
        """
        return "×".join(binding.label for binding in self.bindings)

    def _check_index(self, index):
        if not 0 <= index < self.size:
            raise IndexOutOfRange(f"index {index} outside a space of size {self.size}")

    def index_to_values(self, index):
        """
        Returns the (server index, node, value) assignments for the flat index.
        """
        self._check_index(index)
        digits = np.unravel_index(index, self.shape)
        return tuple(
            (binding.server_index, binding.node, binding.values[int(digit)])
            for binding, digit in zip(self.bindings, digits)
        )

    def values_to_index(self, cache):
        """
        Returns the flat index for the values held in the cache, a mapping from
        (server index, node) to value.
        """
        if not self.bindings:
            raise IndexOutOfRange("an empty space has no indexes")
        digits = []
        for binding in self.bindings:
            try:
                value = cache[binding.key]
            except KeyError:
                raise IncompleteCache(f"no value cached for {binding.label}")
            digits.append(binding.index_of(value))
        return int(np.ravel_multi_index(digits, self.shape))

    def labels(self):
        """
        Returns a readable label for every flat index.
        """
        return [
            ";".join(
                f"{binding.label}={value.data}"
                for binding, (_, _, value) in zip(
                    self.bindings, self.index_to_values(index)
                )
            )
            for index in range(self.size)
        ]


def action_to_values(space, index):
    """
    Maps an action index onto the actuator values to write.
    """
    return space.index_to_values(index)


def values_to_state(space, cache):
    """
    Maps the cached sensor values onto a state index.
    """
    return space.values_to_index(cache)


def discover_spaces(catalogs):
    """
    Derives the action and observation spaces from the catalogs of the servers.

    Servers are visited in the given order and nodes in catalog order. Each marked
    node contributes its value grid to the action or observation space according
    to its marker kind.
    """
    actions, observations = [], []
    for server_index, catalog in enumerate(catalogs):
        for entry in catalog.marked():
            binding = NodeBinding(
                server_index, entry.node_id, entry.marker.values(), entry.browse_name
            )
            if entry.marker.kind.is_action:
                actions.append(binding)
            else:
                observations.append(binding)
    if not actions:
        raise EmptySpace("no action nodes found")
    if not observations:
        raise EmptySpace("no observation nodes found")
    action_space, observation_space = SpaceSpec(actions), SpaceSpec(observations)
    logger.info(
        "discovered action space %d (%s), observation space %d (%s)",
        action_space.size,
        action_space.describe(),
        observation_space.size,
        observation_space.describe(),
    )
    return action_space, observation_space
