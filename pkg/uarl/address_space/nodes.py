import dataclasses
import enum
import functools
import math
import re
import typing as t

from .errors import InvalidMarker, InvalidValue

#: Absolute tolerance used when comparing Double values against a marker grid
DOUBLE_TOLERANCE = 1e-9

INT32_MIN = -(2**31)
INT32_MAX = 2**31 - 1


class NodeClass(enum.IntEnum):
    """
    Enumeration of the supported node classes.
    """

    OBJECT = 0
    VARIABLE = 1
    METHOD = 2
    OBJECT_TYPE = 3
    PROPERTY = 4


class ReferenceType(enum.IntEnum):
    """
    Enumeration of the supported reference types.
    """

    ORGANIZES = 0
    HAS_COMPONENT = 1
    HAS_PROPERTY = 2
    HAS_TYPE_DEFINITION = 3

    @property
    def is_hierarchical(self):
        """
        Indicates if the reference is followed when walking the node tree.
        """
        return self is not ReferenceType.HAS_TYPE_DEFINITION


_NODE_ID_PATTERN = re.compile(r"^ns=(?P<ns>\d+);(?P<tag>[is])=(?P<identifier>.+)$")


@functools.total_ordering
@dataclasses.dataclass(frozen=True, eq=True)
class NodeId:
    """
    Identity of a node within an address space.

    Node ids order by namespace index, then numeric identifiers before text
    identifiers, then identifier.
    """

    #: The namespace index, an unsigned 16-bit integer
    namespace_index: int
    #: Either an unsigned 32-bit integer or a non-empty string
    identifier: int | str

    def __post_init__(self):
        if isinstance(self.namespace_index, bool) or not isinstance(
            self.namespace_index, int
        ):
            raise InvalidValue("namespace index must be an integer")
        if not 0 <= self.namespace_index <= 0xFFFF:
            raise InvalidValue(f"namespace index {self.namespace_index} out of range")
        if isinstance(self.identifier, str):
            if not self.identifier:
                raise InvalidValue("text identifiers must be non-empty")
        elif isinstance(self.identifier, int) and not isinstance(self.identifier, bool):
            if not 0 <= self.identifier <= 0xFFFFFFFF:
                raise InvalidValue(f"numeric identifier {self.identifier} out of range")
        else:
            raise InvalidValue("identifier must be an integer or a string")

    @property
    def is_numeric(self):
        return isinstance(self.identifier, int)

    def sort_key(self):
        return (self.namespace_index, 0 if self.is_numeric else 1, self.identifier)

    def __lt__(self, other):
        if not isinstance(other, NodeId):
            return NotImplemented
        return self.sort_key() < other.sort_key()

    def __str__(self):
        tag = "i" if self.is_numeric else "s"
        return f"ns={self.namespace_index};{tag}={self.identifier}"

    @classmethod
    def parse(cls, text):
        """
        Parses a node id from the text form "ns=<n>;i=<number>" or "ns=<n>;s=<text>".
        """
        match = _NODE_ID_PATTERN.match(text.strip())
        if not match:
            raise InvalidValue(f"'{text}' is not a valid node id")
        identifier = match["identifier"]
        if match["tag"] == "i":
            try:
                identifier = int(identifier)
            except ValueError:
                raise InvalidValue(f"'{text}' has a non-numeric identifier")
        return cls(int(match["ns"]), identifier)


#: The well-known id of the Objects folder
OBJECTS_FOLDER = NodeId(0, 85)
#: The well-known id of BaseDataVariableType
BASE_DATA_VARIABLE_TYPE = NodeId(0, 63)
#: The well-known id of BaseObjectType
BASE_OBJECT_TYPE = NodeId(0, 58)


class ValueType(enum.IntEnum):
    """
    Enumeration of the value variants, using their wire tags as values.
    """

    BOOL = 0
    INT32 = 1
    DOUBLE = 2
    TEXT = 3


@dataclasses.dataclass(frozen=True)
class Value:
    """
    A typed variable value.
    """

    variant: ValueType
    data: bool | int | float | str

    def __post_init__(self):
        variant = ValueType(self.variant)
        object.__setattr__(self, "variant", variant)
        data = self.data
        if variant is ValueType.BOOL:
            if not isinstance(data, bool):
                raise InvalidValue("Bool values require a bool")
        elif variant is ValueType.INT32:
            if isinstance(data, bool) or not isinstance(data, int):
                raise InvalidValue("Int32 values require an int")
            if not INT32_MIN <= data <= INT32_MAX:
                raise InvalidValue(f"{data} does not fit in Int32")
        elif variant is ValueType.DOUBLE:
            if isinstance(data, bool) or not isinstance(data, int | float):
                raise InvalidValue("Double values require a number")
            if not math.isfinite(data):
                raise InvalidValue("Double values must be finite")
            object.__setattr__(self, "data", float(data))
        elif not isinstance(data, str):
            raise InvalidValue("Text values require a str")

    @classmethod
    def boolean(cls, data):
        return cls(ValueType.BOOL, data)

    @classmethod
    def int32(cls, data):
        return cls(ValueType.INT32, data)

    @classmethod
    def double(cls, data):
        return cls(ValueType.DOUBLE, data)

    @classmethod
    def text(cls, data):
        return cls(ValueType.TEXT, data)

    @classmethod
    def infer(cls, data):
        """
        Returns a value whose variant is inferred from the Python type of the data.
        """
        if isinstance(data, Value):
            return data
        if isinstance(data, bool):
            return cls.boolean(data)
        if isinstance(data, int):
            return cls.int32(data)
        if isinstance(data, float):
            return cls.double(data)
        if isinstance(data, str):
            return cls.text(data)
        raise InvalidValue(f"cannot infer a value type for {data!r}")

    def __str__(self):
        return f"{self.variant.name.capitalize()}({self.data!r})"


class MarkerKind(enum.IntEnum):
    """
    The four marker object types that flag a variable for the RL setting.
    """

    INT_ACTION = 0
    DOUBLE_ACTION = 1
    INT_OBSERVATION = 2
    DOUBLE_OBSERVATION = 3

    @property
    def is_action(self):
        return self in (MarkerKind.INT_ACTION, MarkerKind.DOUBLE_ACTION)

    @property
    def is_observation(self):
        return not self.is_action

    @property
    def value_type(self):
        if self in (MarkerKind.INT_ACTION, MarkerKind.INT_OBSERVATION):
            return ValueType.INT32
        return ValueType.DOUBLE

    @property
    def type_name(self):
        """
        The browse name of the object type, e.g. "IntAction".
        """
        return "".join(part.capitalize() for part in self.name.split("_"))

    @property
    def property_name(self):
        """
        The browse name of the property node that carries the marker.
        """
        return "ActionNode" if self.is_action else "ObservationNode"


#: Node ids of the marker object types
MARKER_TYPE_IDS = {kind: NodeId(1, 100 + kind.value) for kind in MarkerKind}
MARKER_KINDS_BY_TYPE = {node_id: kind for kind, node_id in MARKER_TYPE_IDS.items()}


@dataclasses.dataclass(frozen=True)
class RLMarker:
    """
    Declares a variable as part of the action or observation space, with the finite
    grid of values it may take.
    """

    kind: MarkerKind
    minimum: int | float
    maximum: int | float
    step: int | float

    def __post_init__(self):
        object.__setattr__(self, "kind", MarkerKind(self.kind))
        bounds = (self.minimum, self.maximum, self.step)
        if self.kind.value_type is ValueType.INT32:
            if any(isinstance(b, bool) or not isinstance(b, int) for b in bounds):
                raise InvalidMarker("integer markers require integer bounds")
            if not all(INT32_MIN <= b <= INT32_MAX for b in bounds):
                raise InvalidMarker("integer marker bounds must fit in Int32")
        else:
            if any(
                isinstance(b, bool) or not isinstance(b, int | float) for b in bounds
            ):
                raise InvalidMarker("double markers require numeric bounds")
            if not all(math.isfinite(b) for b in bounds):
                raise InvalidMarker("double marker bounds must be finite")
            for name, bound in zip(("minimum", "maximum", "step"), bounds):
                object.__setattr__(self, name, float(bound))
        if self.minimum > self.maximum:
            raise InvalidMarker(f"min {self.minimum} exceeds max {self.maximum}")
        if self.step <= 0:
            raise InvalidMarker(f"step {self.step} must be positive")
        if (
            self.kind.value_type is ValueType.INT32
            and (self.maximum - self.minimum) % self.step != 0
        ):
            raise InvalidMarker("max - min must be a multiple of step for int markers")

    def values(self):
        """
        Returns the ascending grid min, min + step, ... up to and including max.
        """
        return enumerate_values(self)

    def contains(self, value):
        """
        Indicates if the given value lies in the marker's value set.
        """
        if value.variant is not self.kind.value_type:
            return False
        if self.kind.value_type is ValueType.INT32:
            return (
                self.minimum <= value.data <= self.maximum
                and (value.data - self.minimum) % self.step == 0
            )
        return any(abs(value.data - v.data) <= DOUBLE_TOLERANCE for v in self.values())

    def __str__(self):
        return (
            f"{self.kind.type_name}(min={self.minimum}, max={self.maximum}, "
            f"step={self.step})"
        )


def enumerate_values(marker):
    """
    Returns the value grid for the marker as a tuple of values.

    For double markers, the grid stops at the last term that does not exceed max
    by more than the tolerance, so ranges that are not a multiple of step are
    truncated.
    """
    if marker.kind.value_type is ValueType.INT32:
        return tuple(
            Value.int32(v)
            for v in range(marker.minimum, marker.maximum + 1, marker.step)
        )
    span = marker.maximum - marker.minimum + DOUBLE_TOLERANCE
    count = math.floor(span / marker.step)
    return tuple(
        Value.double(marker.minimum + k * marker.step) for k in range(count + 1)
    )


class Reference(t.NamedTuple):
    """
    A typed reference from one node to another.
    """

    reference_type: ReferenceType
    target: NodeId


@dataclasses.dataclass
class Node:
    """
    A node in an address space.
    """

    node_id: NodeId
    browse_name: str
    node_class: NodeClass
    type_definition: NodeId | None = None
    #: The current value, for Variables only
    value: Value | None = None
    references: list[Reference] = dataclasses.field(default_factory=list)
    #: The RL marker, for Variables only
    marker: RLMarker | None = None

    def __post_init__(self):
        self.node_class = NodeClass(self.node_class)
        if self.node_class is not NodeClass.VARIABLE:
            if self.value is not None or self.marker is not None:
                raise InvalidValue("only Variable nodes carry a value or a marker")
        elif self.value is None:
            raise InvalidValue("Variable nodes require a value")
        # Keep the type definition visible as a reference for browsing
        if self.type_definition is not None and not any(
            ref.reference_type is ReferenceType.HAS_TYPE_DEFINITION
            for ref in self.references
        ):
            self.references.append(
                Reference(ReferenceType.HAS_TYPE_DEFINITION, self.type_definition)
            )

    @classmethod
    def object(cls, node_id, browse_name, type_definition=None):
        return cls(node_id, browse_name, NodeClass.OBJECT, type_definition)

    @classmethod
    def variable(cls, node_id, browse_name, value, type_definition=None):
        return cls(node_id, browse_name, NodeClass.VARIABLE, type_definition, value)

    @classmethod
    def method(cls, node_id, browse_name):
        return cls(node_id, browse_name, NodeClass.METHOD)


@dataclasses.dataclass(frozen=True)
class BrowseEntry:
    """
    A reference as returned by browsing, together with a description of its target.
    """

    reference_type: ReferenceType
    target: NodeId
    browse_name: str
    node_class: NodeClass
    type_definition: NodeId | None = None
    #: Summary of the target's marker, if it carries one
    marker: RLMarker | None = None
