from .catalog import Catalog, CatalogEntry  # noqa: F401
from .errors import (  # noqa: F401
    ClientError,
    ProtocolError,
    ServerError,
    TransportError,
)
from .session import (  # noqa: F401
    AsyncSession,
    BaseSession,
    Notification,
    SyncSession,
    next_notification,
)
