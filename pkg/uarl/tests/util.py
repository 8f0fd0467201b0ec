import contextlib
import socket

from uarl import wire
from uarl.address_space import (
    BASE_DATA_VARIABLE_TYPE,
    OBJECTS_FOLDER,
    AddressSpace,
    MarkerKind,
    Node,
    NodeClass,
    NodeId,
    ReferenceType,
    RLMarker,
    Value,
)
from uarl.server import MethodHandler

LOCALHOST = "127.0.0.1:0"

DEVICE = NodeId(2, 1)
COUNTER = NodeId(2, 2)
LEVEL = NodeId(2, 3)
LABEL = NodeId(2, 4)
ECHO = NodeId(2, 10)
FAIL = NodeId(2, 11)


def device_space(action_name="Counter", observation_name="Level"):
    """
    Returns a small address space with one action and one observation node.
    """
    space = AddressSpace.create()
    space.add_node(
        Node(BASE_DATA_VARIABLE_TYPE, "BaseDataVariableType", NodeClass.OBJECT_TYPE)
    )
    space.add_node(
        Node.object(DEVICE, "Device"), OBJECTS_FOLDER, ReferenceType.ORGANIZES
    )
    space.add_node(
        Node.variable(COUNTER, action_name, Value.int32(0), BASE_DATA_VARIABLE_TYPE),
        DEVICE,
    )
    space.add_node(Node.variable(LEVEL, observation_name, Value.double(0.0)), DEVICE)
    space.add_node(Node.variable(LABEL, "Label", Value.text("")), DEVICE)
    space.add_node(Node.method(ECHO, "Echo"), DEVICE)
    space.add_node(Node.method(FAIL, "Fail"), DEVICE)
    space.attach_marker(COUNTER, RLMarker(MarkerKind.INT_ACTION, 0, 1, 1))
    space.attach_marker(LEVEL, RLMarker(MarkerKind.DOUBLE_OBSERVATION, 0.0, 1.0, 0.5))
    return space


def _fail(args):
    raise RuntimeError("boom")


def device_methods():
    return (
        MethodHandler(ECHO, lambda args: (wire.StatusCode.GOOD, args)),
        MethodHandler(FAIL, _fail),
    )


@contextlib.contextmanager
def raw_connection(endpoint):
    """
    Opens a plain socket to the endpoint, for speaking the protocol by hand.
    """
    with socket.create_connection((endpoint.host, endpoint.port), timeout=5) as sock:
        yield sock


def exchange(sock, message, request_id=1):
    """
    Sends the message and returns every message received until the peer closes
    the connection or goes quiet.
    """
    sock.sendall(wire.encode(message, request_id))
    reader = wire.FrameReader()
    received = []
    sock.settimeout(1.0)
    try:
        while chunk := sock.recv(65536):
            received.extend(reader.feed(chunk))
    except TimeoutError:
        return received, False
    return received, True
