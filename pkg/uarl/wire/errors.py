class WireError(Exception):
    """
    Base class for errors raised while encoding or decoding frames.
    """


class Oversize(WireError):  # noqa: N818
    """
    Raised when a list, text or payload exceeds the limits of the frame format.
    """


class DecodeError(WireError):
    """
    Base class for errors raised when bytes cannot be decoded into a message.
    """


class BadMagic(DecodeError):  # noqa: N818
    """
    Raised when a frame does not start with the protocol magic.
    """


class UnknownType(DecodeError):  # noqa: N818
    """
    Raised when a frame header carries an undefined message type.
    """


class Truncated(DecodeError):  # noqa: N818
    """
    Raised when fewer bytes are available than the frame declares.
    """


class TrailingBytes(DecodeError):  # noqa: N818
    """
    Raised when bytes remain after a complete frame or payload.
    """


class BadUtf8(DecodeError):  # noqa: N818
    """
    Raised when a text field is not valid UTF-8.
    """


class MalformedPayload(DecodeError):  # noqa: N818
    """
    Raised when a payload contains an invalid tag, enum code or field value.
    """
