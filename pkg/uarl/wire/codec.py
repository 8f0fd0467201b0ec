import struct

from .buffer import MAX_PAYLOAD_BYTES, PayloadReader, PayloadWriter
from .errors import BadMagic, Oversize, TrailingBytes, Truncated, UnknownType
from .messages import Message

MAGIC = b"UABL"

#: magic, msg_type u8, request_id u32, payload_len u32
HEADER = struct.Struct("<4sBII")
HEADER_SIZE = HEADER.size


def encode(message, request_id=0):
    """
    Encodes the message as a complete frame with the given request id.
    """
    writer = PayloadWriter()
    message.encode_payload(writer)
    payload = writer.getvalue()
    if len(payload) > MAX_PAYLOAD_BYTES:
        raise Oversize(f"payload of {len(payload)} bytes exceeds {MAX_PAYLOAD_BYTES}")
    return HEADER.pack(MAGIC, message.TYPE, request_id, len(payload)) + payload


def check_magic(data):
    """
    Raises BadMagic if the available prefix of data cannot start a frame.
    """
    prefix = bytes(data[: len(MAGIC)])
    if prefix != MAGIC[: len(prefix)]:
        raise BadMagic(f"frame starts with {prefix.hex()}")


def decode_header(data):
    """
    Decodes a frame header, returning (message class, request id, payload length).
    """
    check_magic(data)
    if len(data) < HEADER_SIZE:
        raise Truncated(f"header needs {HEADER_SIZE} bytes, got {len(data)}")
    _, msg_type, request_id, payload_len = HEADER.unpack_from(data)
    try:
        message_cls = Message.registry[msg_type]
    except KeyError:
        raise UnknownType(f"unknown message type {msg_type:#04x}")
    if payload_len > MAX_PAYLOAD_BYTES:
        raise Oversize(f"declared payload of {payload_len} bytes exceeds the limit")
    return message_cls, request_id, payload_len


def decode(data):
    """
    Decodes exactly one frame, returning a (message, request id) tuple.
    """
    message_cls, request_id, payload_len = decode_header(data)
    available = len(data) - HEADER_SIZE
    if available < payload_len:
        raise Truncated(f"payload declares {payload_len} bytes, {available} available")
    if available > payload_len:
        raise TrailingBytes(f"{available - payload_len} bytes follow the frame")
    reader = PayloadReader(data[HEADER_SIZE:])
    message = message_cls.decode_payload(reader)
    if reader.remaining:
        raise TrailingBytes(f"{reader.remaining} bytes left in the payload")
    return message, request_id
