class NodeServerError(Exception):
    """
    Base class for node server errors.
    """


class BindFailure(NodeServerError):  # noqa: N818
    """
    Raised when the server cannot bind to its endpoint.
    """
