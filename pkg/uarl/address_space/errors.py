class AddressSpaceError(Exception):
    """
    Base class for errors raised by address space operations.
    """


class InvalidValue(ValueError):  # noqa: N818
    """
    Raised when a value or node id cannot be constructed from the given data.
    """


class DuplicateNodeId(AddressSpaceError):  # noqa: N818
    """
    Raised when a node is added with an id that is already present.
    """


class DanglingReference(AddressSpaceError):  # noqa: N818
    """
    Raised when a reference targets a node that does not exist.
    """


class NoSuchNode(AddressSpaceError):  # noqa: N818
    """
    Raised when an operation names a node that does not exist.
    """


class NotAVariable(AddressSpaceError):  # noqa: N818
    """
    Raised when a value or marker operation targets a node that is not a Variable.
    """


class NotWritable(AddressSpaceError):  # noqa: N818
    """
    Raised when a write targets one of the min/max/step components of a marker.
    """


class AlreadyMarked(AddressSpaceError):  # noqa: N818
    """
    Raised when a marker is attached to a node that already carries one.
    """


class InvalidMarker(AddressSpaceError):  # noqa: N818
    """
    Raised when a marker violates its own invariants.
    """


class TypeMismatch(AddressSpaceError):  # noqa: N818
    """
    Raised when a value does not have the variant of the node it is written to.
    """


class ValueOutOfRange(AddressSpaceError):  # noqa: N818
    """
    Raised when a value lies outside the value set of the node's marker.
    """
