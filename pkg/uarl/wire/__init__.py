from .buffer import MAX_LIST_ENTRIES, MAX_PAYLOAD_BYTES  # noqa: F401
from .codec import HEADER_SIZE, MAGIC, decode, encode  # noqa: F401
from .errors import (  # noqa: F401
    BadMagic,
    BadUtf8,
    DecodeError,
    MalformedPayload,
    Oversize,
    TrailingBytes,
    Truncated,
    UnknownType,
    WireError,
)
from .framing import FrameReader, frame_reader  # noqa: F401
from .messages import (  # noqa: F401
    PROTOCOL_VERSION,
    BrowseReq,
    BrowseResp,
    CallReq,
    CallResp,
    Error,
    ErrorCode,
    Hello,
    HelloAck,
    Message,
    Notify,
    ReadReq,
    ReadResp,
    StatusCode,
    SubscribeReq,
    SubscribeResp,
    WriteReq,
    WriteResp,
)
