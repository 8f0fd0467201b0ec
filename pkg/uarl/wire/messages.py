import dataclasses
import enum
import typing as t

from ..address_space import BrowseEntry, NodeId, Value  # noqa: TID252

#: The protocol version exchanged in the handshake
PROTOCOL_VERSION = 1


class StatusCode(enum.IntEnum):
    """
    Status codes carried by WriteResp and CallResp.
    """

    GOOD = 0
    NO_SUCH_NODE = 1
    TYPE_MISMATCH = 2
    VALUE_OUT_OF_RANGE = 3
    FAULT = 4
    NOT_WRITABLE = 5


class ErrorCode(enum.IntEnum):
    """
    Codes carried by Error frames.
    """

    VERSION_MISMATCH = 1
    HANDSHAKE_REQUIRED = 2
    PROTOCOL_ERROR = 3
    NO_SUCH_NODE = 4
    UNSUPPORTED = 5


class Message:
    """
    Base class for protocol messages.

    Subclasses declare their type code using the ``TYPE`` class variable and
    implement the payload encoding.
    """

    TYPE: t.ClassVar[int]

    #: Message classes indexed by type code
    registry: t.ClassVar[dict[int, type["Message"]]] = {}

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        if cls.TYPE in Message.registry:
            raise TypeError(f"message type {cls.TYPE:#04x} is already registered")
        Message.registry[cls.TYPE] = cls

    def encode_payload(self, writer):
        raise NotImplementedError

    @classmethod
    def decode_payload(cls, reader):
        raise NotImplementedError


@dataclasses.dataclass(frozen=True)
class Hello(Message):
    TYPE: t.ClassVar[int] = 0x01

    version: int

    def encode_payload(self, writer):
        writer.u16(self.version)

    @classmethod
    def decode_payload(cls, reader):
        return cls(reader.u16())


@dataclasses.dataclass(frozen=True)
class HelloAck(Message):
    TYPE: t.ClassVar[int] = 0x02

    server_name: str

    def encode_payload(self, writer):
        writer.text(self.server_name)

    @classmethod
    def decode_payload(cls, reader):
        return cls(reader.text())


@dataclasses.dataclass(frozen=True)
class BrowseReq(Message):
    TYPE: t.ClassVar[int] = 0x10

    node: NodeId

    def encode_payload(self, writer):
        writer.node_id(self.node)

    @classmethod
    def decode_payload(cls, reader):
        return cls(reader.node_id())


@dataclasses.dataclass(frozen=True)
class BrowseResp(Message):
    TYPE: t.ClassVar[int] = 0x11

    entries: tuple[BrowseEntry, ...]

    def encode_payload(self, writer):
        writer.count(self.entries)
        for entry in self.entries:
            writer.browse_entry(entry)

    @classmethod
    def decode_payload(cls, reader):
        return cls(reader.items(reader.browse_entry))


@dataclasses.dataclass(frozen=True)
class ReadReq(Message):
    TYPE: t.ClassVar[int] = 0x12

    node: NodeId

    def encode_payload(self, writer):
        writer.node_id(self.node)

    @classmethod
    def decode_payload(cls, reader):
        return cls(reader.node_id())


@dataclasses.dataclass(frozen=True)
class ReadResp(Message):
    TYPE: t.ClassVar[int] = 0x13

    value: Value

    def encode_payload(self, writer):
        writer.value(self.value)

    @classmethod
    def decode_payload(cls, reader):
        return cls(reader.value())


@dataclasses.dataclass(frozen=True)
class WriteReq(Message):
    TYPE: t.ClassVar[int] = 0x14

    node: NodeId
    value: Value

    def encode_payload(self, writer):
        writer.node_id(self.node)
        writer.value(self.value)

    @classmethod
    def decode_payload(cls, reader):
        return cls(reader.node_id(), reader.value())


@dataclasses.dataclass(frozen=True)
class WriteResp(Message):
    TYPE: t.ClassVar[int] = 0x15

    status: int

    def encode_payload(self, writer):
        writer.u8(self.status)

    @classmethod
    def decode_payload(cls, reader):
        return cls(reader.u8())


@dataclasses.dataclass(frozen=True)
class CallReq(Message):
    TYPE: t.ClassVar[int] = 0x16

    method: NodeId
    args: tuple[Value, ...] = ()

    def encode_payload(self, writer):
        writer.node_id(self.method)
        writer.count(self.args)
        for arg in self.args:
            writer.value(arg)

    @classmethod
    def decode_payload(cls, reader):
        return cls(reader.node_id(), reader.items(reader.value))


@dataclasses.dataclass(frozen=True)
class CallResp(Message):
    TYPE: t.ClassVar[int] = 0x17

    status: int
    results: tuple[Value, ...] = ()

    def encode_payload(self, writer):
        writer.u8(self.status)
        writer.count(self.results)
        for result in self.results:
            writer.value(result)

    @classmethod
    def decode_payload(cls, reader):
        return cls(reader.u8(), reader.items(reader.value))


@dataclasses.dataclass(frozen=True)
class SubscribeReq(Message):
    TYPE: t.ClassVar[int] = 0x18

    nodes: tuple[NodeId, ...]

    def encode_payload(self, writer):
        writer.count(self.nodes)
        for node in self.nodes:
            writer.node_id(node)

    @classmethod
    def decode_payload(cls, reader):
        return cls(reader.items(reader.node_id))


@dataclasses.dataclass(frozen=True)
class SubscribeResp(Message):
    TYPE: t.ClassVar[int] = 0x19

    subscription_id: int

    def encode_payload(self, writer):
        writer.u32(self.subscription_id)

    @classmethod
    def decode_payload(cls, reader):
        return cls(reader.u32())


@dataclasses.dataclass(frozen=True)
class Notify(Message):
    TYPE: t.ClassVar[int] = 0x20

    subscription_id: int
    seq: int
    node: NodeId
    value: Value

    def encode_payload(self, writer):
        writer.u32(self.subscription_id)
        writer.u64(self.seq)
        writer.node_id(self.node)
        writer.value(self.value)

    @classmethod
    def decode_payload(cls, reader):
        return cls(reader.u32(), reader.u64(), reader.node_id(), reader.value())


@dataclasses.dataclass(frozen=True)
class Error(Message):
    TYPE: t.ClassVar[int] = 0x7F

    code: int
    text: str = ""

    def encode_payload(self, writer):
        writer.u16(self.code)
        writer.text(self.text)

    @classmethod
    def decode_payload(cls, reader):
        return cls(reader.u16(), reader.text())
