class MapperError(Exception):
    """
    Base class for errors raised by the mapper.
    """


class EmptySpace(MapperError):  # noqa: N818
    """
    Raised when the browsed servers expose no action or no observation nodes.
    """


class IndexOutOfRange(MapperError, IndexError):  # noqa: N818
    """
    Raised when a flat index lies outside a space.
    """


class IncompleteCache(MapperError):  # noqa: N818
    """
    Raised when there is no cached value for an observation node.
    """


class UnknownValue(MapperError):  # noqa: N818
    """
    Raised when an observed value is not on its node's value grid.
    """


class StepTimeout(MapperError):  # noqa: N818
    """
    Raised when no relevant sensor change arrives within the step timeout.
    """


class EpisodeNotActive(MapperError):  # noqa: N818
    """
    Raised when stepping without an active episode.
    """


class ActuationRejected(MapperError):  # noqa: N818
    """
    Raised when a server rejects an actuator write or a method call.
    """

    def __init__(self, message, status):
        super().__init__(message)
        self.status = status


class MissingMethod(MapperError):  # noqa: N818
    """
    Raised when a server does not expose a required method.
    """
