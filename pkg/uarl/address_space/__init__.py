from .errors import (  # noqa: F401
    AddressSpaceError,
    AlreadyMarked,
    DanglingReference,
    DuplicateNodeId,
    InvalidMarker,
    InvalidValue,
    NoSuchNode,
    NotAVariable,
    NotWritable,
    TypeMismatch,
    ValueOutOfRange,
)
from .nodes import (  # noqa: F401
    BASE_DATA_VARIABLE_TYPE,
    BASE_OBJECT_TYPE,
    DOUBLE_TOLERANCE,
    MARKER_KINDS_BY_TYPE,
    MARKER_TYPE_IDS,
    OBJECTS_FOLDER,
    BrowseEntry,
    MarkerKind,
    Node,
    NodeClass,
    NodeId,
    Reference,
    ReferenceType,
    RLMarker,
    Value,
    ValueType,
    enumerate_values,
)
from .space import AddressSpace  # noqa: F401
