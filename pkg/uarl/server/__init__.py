from .errors import BindFailure, NodeServerError  # noqa: F401
from .handle import ServerHandle, serve  # noqa: F401
from .server import MethodHandler, Server, Session, Subscription  # noqa: F401
