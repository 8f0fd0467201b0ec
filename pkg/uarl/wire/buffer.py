import struct

from ..address_space import (  # noqa: TID252
    BrowseEntry,
    InvalidMarker,
    InvalidValue,
    MarkerKind,
    NodeClass,
    NodeId,
    ReferenceType,
    RLMarker,
    Value,
    ValueType,
)
from .errors import BadUtf8, MalformedPayload, Oversize, Truncated

#: Lists are prefixed with an unsigned 16-bit count
MAX_LIST_ENTRIES = 0xFFFF
#: Upper bound for a single payload, which also bounds texts
MAX_PAYLOAD_BYTES = 16 * 1024 * 1024

NODE_ID_NUMERIC = 0
NODE_ID_TEXT = 1

_U8 = struct.Struct("<B")
_U16 = struct.Struct("<H")
_U32 = struct.Struct("<I")
_U64 = struct.Struct("<Q")
_I32 = struct.Struct("<i")
_F64 = struct.Struct("<d")


class PayloadWriter:
    """
    Accumulates the little-endian encoding of payload fields.
    """

    def __init__(self):
        self._buffer = bytearray()

    def getvalue(self):
        return bytes(self._buffer)

    def u8(self, value):
        self._buffer += _U8.pack(value)

    def u16(self, value):
        self._buffer += _U16.pack(value)

    def u32(self, value):
        self._buffer += _U32.pack(value)

    def u64(self, value):
        self._buffer += _U64.pack(value)

    def text(self, value):
        data = value.encode("utf-8")
        if len(data) > MAX_PAYLOAD_BYTES:
            raise Oversize(f"text of {len(data)} bytes exceeds the payload limit")
        self.u32(len(data))
        self._buffer += data

    def count(self, items):
        if len(items) > MAX_LIST_ENTRIES:
            raise Oversize(f"list of {len(items)} entries exceeds {MAX_LIST_ENTRIES}")
        self.u16(len(items))

    def node_id(self, node_id):
        self.u16(node_id.namespace_index)
        if node_id.is_numeric:
            self.u8(NODE_ID_NUMERIC)
            self.u32(node_id.identifier)
        else:
            self.u8(NODE_ID_TEXT)
            self.text(node_id.identifier)

    def value(self, value):
        self.u8(value.variant)
        if value.variant is ValueType.BOOL:
            self.u8(1 if value.data else 0)
        elif value.variant is ValueType.INT32:
            self._buffer += _I32.pack(value.data)
        elif value.variant is ValueType.DOUBLE:
            self._buffer += _F64.pack(value.data)
        else:
            self.text(value.data)

    def optional_node_id(self, node_id):
        if node_id is None:
            self.u8(0)
        else:
            self.u8(1)
            self.node_id(node_id)

    def marker(self, marker):
        if marker is None:
            self.u8(0)
            return
        self.u8(1)
        self.u8(marker.kind)
        variant = marker.kind.value_type
        for bound in (marker.minimum, marker.maximum, marker.step):
            self.value(Value(variant, bound))

    def browse_entry(self, entry):
        self.u8(entry.reference_type)
        self.node_id(entry.target)
        self.text(entry.browse_name)
        self.u8(entry.node_class)
        self.optional_node_id(entry.type_definition)
        self.marker(entry.marker)


class PayloadReader:
    """
    Reads little-endian payload fields from a byte sequence.
    """

    def __init__(self, data):
        self._data = memoryview(data)
        self._offset = 0

    @property
    def remaining(self):
        return len(self._data) - self._offset

    def _take(self, size):
        if self.remaining < size:
            raise Truncated(
                f"needed {size} bytes at offset {self._offset}, "
                f"only {self.remaining} available"
            )
        chunk = self._data[self._offset : self._offset + size]
        self._offset += size
        return chunk

    def _unpack(self, fmt):
        return fmt.unpack(self._take(fmt.size))[0]

    def u8(self):
        return self._unpack(_U8)

    def u16(self):
        return self._unpack(_U16)

    def u32(self):
        return self._unpack(_U32)

    def u64(self):
        return self._unpack(_U64)

    def _enum(self, enum_cls, code):
        try:
            return enum_cls(code)
        except ValueError:
            raise MalformedPayload(f"{code} is not a valid {enum_cls.__name__}")

    def text(self):
        size = self.u32()
        try:
            return bytes(self._take(size)).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise BadUtf8(str(exc))

    def node_id(self):
        namespace_index = self.u16()
        tag = self.u8()
        if tag == NODE_ID_NUMERIC:
            identifier = self.u32()
        elif tag == NODE_ID_TEXT:
            identifier = self.text()
        else:
            raise MalformedPayload(f"unknown node id tag {tag}")
        try:
            return NodeId(namespace_index, identifier)
        except InvalidValue as exc:
            raise MalformedPayload(str(exc))

    def value(self):
        variant = self._enum(ValueType, self.u8())
        if variant is ValueType.BOOL:
            flag = self.u8()
            if flag > 1:
                raise MalformedPayload(f"bool payload {flag} is not 0 or 1")
            data = bool(flag)
        elif variant is ValueType.INT32:
            data = self._unpack(_I32)
        elif variant is ValueType.DOUBLE:
            data = self._unpack(_F64)
        else:
            data = self.text()
        try:
            return Value(variant, data)
        except InvalidValue as exc:
            raise MalformedPayload(str(exc))

    def optional_node_id(self):
        return self.node_id() if self.u8() else None

    def marker(self):
        if not self.u8():
            return None
        kind = self._enum(MarkerKind, self.u8())
        bounds = [self.value() for _ in range(3)]
        if any(bound.variant is not kind.value_type for bound in bounds):
            raise MalformedPayload(f"marker bounds do not match {kind.type_name}")
        try:
            return RLMarker(kind, *(bound.data for bound in bounds))
        except InvalidMarker as exc:
            raise MalformedPayload(str(exc))

    def browse_entry(self):
        reference_type = self._enum(ReferenceType, self.u8())
        target = self.node_id()
        browse_name = self.text()
        node_class = self._enum(NodeClass, self.u8())
        type_definition = self.optional_node_id()
        marker = self.marker()
        return BrowseEntry(
            reference_type, target, browse_name, node_class, type_definition, marker
        )

    def items(self, read_item):
        return tuple(read_item() for _ in range(self.u16()))
