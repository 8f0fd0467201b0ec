import asyncio
import collections
import concurrent.futures
import contextlib
import dataclasses
import itertools
import logging
import queue
import socket
import threading

from .. import wire  # noqa: TID252
from ..address_space import (  # noqa: TID252
    MARKER_KINDS_BY_TYPE,
    OBJECTS_FOLDER,
    AddressSpaceError,
    BrowseEntry,
    NodeClass,
    NodeId,
    ReferenceType,
    RLMarker,
    Value,
)
from ..endpoint import Endpoint  # noqa: TID252
from ..flow import AsyncExecutor, Flowable, SyncExecutor, flow  # noqa: TID252
from .catalog import Catalog, CatalogEntry
from .errors import ClientError, ProtocolError, ServerError, TransportError

logger = logging.getLogger(__name__)

#: Bytes requested from the socket per read
READ_SIZE = 65536


@dataclasses.dataclass(frozen=True)
class Notification:
    """
    A value change pushed by a server.
    """

    #: Tag of the session that received the notification
    source: int
    subscription_id: int
    seq: int
    node: NodeId
    value: Value


def next_notification(notifications, timeout=None):
    """
    Pops the oldest notification from a session queue, waiting up to timeout seconds.

    Returns None on timeout and raises TransportError once the session has failed.
    """
    try:
        if timeout is not None and timeout <= 0:
            item = notifications.get_nowait()
        else:
            item = notifications.get(timeout=timeout)
    except queue.Empty:
        return None
    if isinstance(item, Exception):
        # Keep the failure in place for subsequent consumers
        notifications.put_nowait(item)
        raise item
    return item


def _status(code):
    try:
        return wire.StatusCode(code)
    except ValueError:
        return code


class BaseSession(Flowable):
    """
    Base class for sync and async client sessions.

    The protocol logic is written as flows, so it is shared by both variants. Each
    variant implements ``_request``, which sends a request and returns the response
    (or an awaitable of it), and runs a reader that hands responses to ``_dispatch``.
    """

    def __init__(self, endpoint, /, timeout=5.0, source=0):
        self.endpoint = Endpoint.parse(endpoint)
        self.timeout = timeout
        self.source = source
        self.server_name = None
        self._request_ids = itertools.count(1)
        self._pending = {}
        self._failure = None
        self._notifications = None

    def _request(self, message):
        raise NotImplementedError

    def _dispatch(self, message, request_id):
        if isinstance(message, wire.Notify):
            self._notifications.put_nowait(
                Notification(
                    self.source,
                    message.subscription_id,
                    message.seq,
                    message.node,
                    message.value,
                )
            )
            return
        future = self._pending.pop(request_id, None)
        if future is None:
            if isinstance(message, wire.Error):
                raise ServerError(message.code, message.text)
            raise ProtocolError(f"unsolicited {type(message).__name__} ({request_id})")
        if not future.done():
            future.set_result(message)

    def _failed(self, exc):
        """
        Records the failure of the connection, failing outstanding requests.
        """
        failure = exc if isinstance(exc, TransportError) else TransportError(str(exc))
        self._failure = failure
        pending, self._pending = self._pending, {}
        for future in pending.values():
            if not future.done():
                future.set_exception(failure)
        return failure

    def _expect(self, response, message_cls):
        if isinstance(response, wire.Error):
            raise ServerError(response.code, response.text)
        if not isinstance(response, message_cls):
            raise ProtocolError(
                f"expected {message_cls.__name__}, got {type(response).__name__}"
            )
        return response

    @flow
    def hello(self):
        """
        Performs the protocol handshake.
        """
        response = yield self._request(wire.Hello(wire.PROTOCOL_VERSION))
        self.server_name = self._expect(response, wire.HelloAck).server_name
        logger.info("connected to '%s' at %s", self.server_name, self.endpoint)
        return self.server_name

    @flow
    def browse(self, node):
        """
        Returns the browse entries for the node's references.
        """
        response = yield self._request(wire.BrowseReq(node))
        return self._expect(response, wire.BrowseResp).entries

    @flow
    def read(self, node):
        """
        Returns the current value of the node.
        """
        response = yield self._request(wire.ReadReq(node))
        return self._expect(response, wire.ReadResp).value

    @flow
    def write(self, node, value):
        """
        Writes the value to the node and returns the server's status code.
        """
        response = yield self._request(wire.WriteReq(node, value))
        return _status(self._expect(response, wire.WriteResp).status)

    @flow
    def call(self, method, args=()):
        """
        Calls the method and returns a (status, results) tuple.
        """
        response = yield self._request(wire.CallReq(method, tuple(args)))
        response = self._expect(response, wire.CallResp)
        return _status(response.status), response.results

    @flow
    def subscribe(self, nodes):
        """
        Subscribes to value changes of the nodes and returns the subscription id.
        """
        response = yield self._request(wire.SubscribeReq(tuple(nodes)))
        return self._expect(response, wire.SubscribeResp).subscription_id

    def _resolve_marker(self, descriptor, references):
        """
        Flow that resolves the marker of a variable from its marker property node.
        """
        for ref in references[descriptor.target]:
            kind = MARKER_KINDS_BY_TYPE.get(ref.type_definition)
            if ref.reference_type is not ReferenceType.HAS_PROPERTY or kind is None:
                continue
            bounds = {}
            for part in references.get(ref.target, ()):
                if part.browse_name in ("min", "max", "step"):
                    value = yield self.read(part.target)
                    bounds[part.browse_name] = value.data
            try:
                marker = RLMarker(kind, bounds["min"], bounds["max"], bounds["step"])
            except (KeyError, AddressSpaceError) as exc:
                raise ProtocolError(
                    f"malformed marker property on {descriptor.target}: {exc}"
                )
            if descriptor.marker is not None and descriptor.marker != marker:
                raise ProtocolError(
                    f"marker summary of {descriptor.target} disagrees with its property"
                )
            return marker
        if descriptor.marker is not None:
            raise ProtocolError(f"{descriptor.target} has no marker property")
        return None

    @flow
    def browse_all(self):
        """
        Walks the address space breadth-first from the Objects folder and returns a
        catalog of every reachable node with its resolved marker.
        """
        found = {
            OBJECTS_FOLDER: (
                None,
                BrowseEntry(
                    ReferenceType.ORGANIZES, OBJECTS_FOLDER, "Objects", NodeClass.OBJECT
                ),
            )
        }
        references = {}
        to_visit = collections.deque([OBJECTS_FOLDER])
        while to_visit:
            node_id = to_visit.popleft()
            references[node_id] = yield self.browse(node_id)
            for ref in references[node_id]:
                if ref.reference_type.is_hierarchical and ref.target not in found:
                    found[ref.target] = (node_id, ref)
                    to_visit.append(ref.target)
        entries = []
        for node_id, (parent, descriptor) in found.items():
            marker = None
            if descriptor.node_class is NodeClass.VARIABLE:
                marker = yield self._resolve_marker(descriptor, references)
            entries.append(
                CatalogEntry(
                    node_id,
                    descriptor.browse_name,
                    descriptor.node_class,
                    descriptor.type_definition,
                    marker,
                    parent,
                    tuple(references[node_id]),
                )
            )
        return Catalog(entries, OBJECTS_FOLDER)


class SyncSession(BaseSession):
    """
    Blocking client session.

    A background thread reads frames from the socket, resolving responses and
    queueing notifications. Sessions given the same notification queue share it,
    with each notification tagged by the session's source.
    """

    __flow_executor__ = SyncExecutor()

    def __init__(self, endpoint, /, timeout=5.0, source=0, notifications=None):
        super().__init__(endpoint, timeout, source)
        self._notifications = queue.Queue() if notifications is None else notifications
        self._lock = threading.Lock()
        self._socket = None
        self._reader = None
        self._closing = False

    @property
    def notifications(self):
        return self._notifications

    def open(self):
        """
        Connects to the server and performs the handshake.
        """
        address = (self.endpoint.host, self.endpoint.port)
        try:
            self._socket = socket.create_connection(address, timeout=self.timeout)
        except OSError as exc:
            raise TransportError(f"cannot connect to {self.endpoint}: {exc}") from exc
        self._socket.settimeout(None)
        self._socket.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        self._reader = threading.Thread(
            target=self._read_loop, name=f"uarl-session-{self.endpoint}", daemon=True
        )
        self._reader.start()
        try:
            self.hello()
        except BaseException:
            self.close()
            raise
        return self

    def _request(self, message):
        future = concurrent.futures.Future()
        with self._lock:
            if self._failure is not None:
                raise self._failure
            request_id = next(self._request_ids)
            self._pending[request_id] = future
            try:
                self._socket.sendall(wire.encode(message, request_id))
            except OSError as exc:
                self._pending.pop(request_id, None)
                raise TransportError(f"send to {self.endpoint} failed: {exc}") from exc
        try:
            return future.result(self.timeout)
        except concurrent.futures.TimeoutError:
            self._pending.pop(request_id, None)
            raise TransportError(
                f"no response to {type(message).__name__} within {self.timeout}s"
            )

    def _read_loop(self):
        frames = wire.FrameReader()
        try:
            while True:
                chunk = self._socket.recv(READ_SIZE)
                if not chunk:
                    raise TransportError(f"connection to {self.endpoint} closed")
                for message, request_id in frames.feed(chunk):
                    self._dispatch(message, request_id)
                frames.check()
        except (OSError, wire.WireError, ClientError) as exc:
            with self._lock:
                failure = self._failed(exc)
            if not self._closing:
                logger.warning("session %s failed: %s", self.endpoint, failure)
                self._notifications.put_nowait(failure)

    def await_notification(self, timeout=None):
        """
        Returns the oldest queued notification, or None if none arrives in time.
        """
        return next_notification(self._notifications, timeout)

    def close(self):
        self._closing = True
        if self._socket is not None:
            with contextlib.suppress(OSError):
                self._socket.shutdown(socket.SHUT_RDWR)
            self._socket.close()
        if self._reader is not None and self._reader is not threading.current_thread():
            self._reader.join(self.timeout)

    def __enter__(self):
        if self._socket is None:
            self.open()
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        self.close()


class AsyncSession(BaseSession):
    """
    Asyncio client session.
    """

    __flow_executor__ = AsyncExecutor()

    def __init__(self, endpoint, /, timeout=5.0, source=0):
        super().__init__(endpoint, timeout, source)
        self._notifications = asyncio.Queue()
        self._stream_reader = None
        self._stream_writer = None
        self._task = None

    async def open(self):
        try:
            self._stream_reader, self._stream_writer = await asyncio.wait_for(
                asyncio.open_connection(self.endpoint.host, self.endpoint.port),
                self.timeout,
            )
        except (OSError, asyncio.TimeoutError) as exc:
            raise TransportError(f"cannot connect to {self.endpoint}: {exc}") from exc
        self._task = asyncio.get_running_loop().create_task(self._read_loop())
        try:
            await self.hello()
        except BaseException:
            await self.close()
            raise
        return self

    async def _request(self, message):
        if self._failure is not None:
            raise self._failure
        request_id = next(self._request_ids)
        future = asyncio.get_running_loop().create_future()
        self._pending[request_id] = future
        try:
            self._stream_writer.write(wire.encode(message, request_id))
            await self._stream_writer.drain()
        except OSError as exc:
            self._pending.pop(request_id, None)
            raise TransportError(f"send to {self.endpoint} failed: {exc}") from exc
        try:
            return await asyncio.wait_for(future, self.timeout)
        except asyncio.TimeoutError:
            self._pending.pop(request_id, None)
            raise TransportError(
                f"no response to {type(message).__name__} within {self.timeout}s"
            )

    async def _read_loop(self):
        frames = wire.FrameReader()
        try:
            while True:
                chunk = await self._stream_reader.read(READ_SIZE)
                if not chunk:
                    raise TransportError(f"connection to {self.endpoint} closed")
                for message, request_id in frames.feed(chunk):
                    self._dispatch(message, request_id)
                frames.check()
        except (OSError, wire.WireError, ClientError) as exc:
            self._notifications.put_nowait(self._failed(exc))

    async def await_notification(self, timeout=None):
        """
        Returns the oldest queued notification, or None if none arrives in time.
        """
        try:
            item = await asyncio.wait_for(self._notifications.get(), timeout)
        except asyncio.TimeoutError:
            return None
        if isinstance(item, Exception):
            self._notifications.put_nowait(item)
            raise item
        return item

    async def close(self):
        if self._task is not None:
            self._task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await self._task
        if self._stream_writer is not None and not self._stream_writer.is_closing():
            self._stream_writer.close()
            with contextlib.suppress(ConnectionError):
                await self._stream_writer.wait_closed()

    async def __aenter__(self):
        if self._stream_writer is None:
            await self.open()
        return self

    async def __aexit__(self, exc_type, exc_value, traceback):
        await self.close()
