import asyncio
import contextlib
import dataclasses
import itertools
import logging
import typing as t

from .. import wire  # noqa: TID252
from ..address_space import (  # noqa: TID252
    NodeClass,
    NodeId,
    NoSuchNode,
    NotAVariable,
    NotWritable,
    TypeMismatch,
    Value,
    ValueOutOfRange,
)
from ..endpoint import Endpoint  # noqa: TID252
from .errors import BindFailure

logger = logging.getLogger(__name__)

StatusCode = wire.StatusCode
ErrorCode = wire.ErrorCode

#: Maps address space errors raised by a write onto WriteResp status codes
WRITE_STATUS = {
    NoSuchNode: StatusCode.NO_SUCH_NODE,
    NotAVariable: StatusCode.TYPE_MISMATCH,
    TypeMismatch: StatusCode.TYPE_MISMATCH,
    ValueOutOfRange: StatusCode.VALUE_OUT_OF_RANGE,
    NotWritable: StatusCode.NOT_WRITABLE,
}

#: Handlers receive the call arguments and return a (status, results) tuple
MethodCallable = t.Callable[[tuple[Value, ...]], tuple[int, tuple[Value, ...]]]
WriteHook = t.Callable[[NodeId, Value], None]


@dataclasses.dataclass(frozen=True)
class MethodHandler:
    """
    Binds a Method node to the callable that implements it.
    """

    method: NodeId
    handler: MethodCallable


@dataclasses.dataclass
class Subscription:
    """
    A set of nodes whose value changes are pushed to a session.
    """

    subscription_id: int
    session: "Session"
    nodes: frozenset[NodeId]
    next_seq: int = 1

    def notify(self, node, value):
        self.session.send(wire.Notify(self.subscription_id, self.next_seq, node, value))
        self.next_seq += 1


class Session:
    """
    Server side of a single client connection.
    """

    def __init__(self, server, reader, writer, session_id):
        self._server = server
        self._reader = reader
        self._writer = writer
        self.session_id = session_id
        self.peer = writer.get_extra_info("peername")
        self.established = False
        self.closing = False

    def send(self, message, request_id=0):
        if self._writer.is_closing():
            return
        self._writer.write(wire.encode(message, request_id))

    def _protocol_error(self, exc):
        logger.warning("session %s: framing error, closing: %s", self.session_id, exc)
        self.send(wire.Error(ErrorCode.PROTOCOL_ERROR, str(exc)))
        self.closing = True

    async def run(self):
        frames = wire.FrameReader()
        try:
            while not self.closing:
                chunk = await self._reader.read(65536)
                if not chunk:
                    break
                try:
                    messages = frames.feed(chunk)
                except wire.WireError as exc:
                    self._protocol_error(exc)
                    break
                for message, request_id in messages:
                    response = self._server.dispatch(self, message)
                    if response is not None:
                        self.send(response, request_id)
                    if self.closing:
                        break
                if not self.closing and frames.poisoned:
                    try:
                        frames.check()
                    except wire.WireError as exc:
                        self._protocol_error(exc)
                await self._writer.drain()
        except ConnectionError as exc:
            logger.info("session %s: connection lost: %s", self.session_id, exc)
        finally:
            await self.close()

    async def close(self):
        self._server.drop_session(self)
        if self._writer.is_closing():
            return
        self._writer.close()
        with contextlib.suppress(ConnectionError):
            await self._writer.wait_closed()
        logger.info("session %s: closed", self.session_id)


class Server:
    """
    Node server exposing an address space over the binary protocol.

    All request handling, change notification and periodic tasks run on the
    server's event loop, which is the single owner of the address space.
    """

    def __init__(self, space, methods=(), /, name="uarl", write_hooks=()):
        self.space = space
        self.name = name
        self._methods = {}
        for handler in methods:
            self.add_method(handler)
        self._write_hooks = list(write_hooks)
        self._subscriptions = {}
        self._subscription_ids = itertools.count(1)
        self._session_ids = itertools.count(1)
        self._sessions = set()
        self._periodic = []
        self._tasks = set()
        self._server = None
        space.add_change_listener(self._dispatch_change)

    def add_method(self, handler):
        node = self.space.get(handler.method)
        if node.node_class is not NodeClass.METHOD:
            raise ValueError(f"node {handler.method} is not a Method")
        self._methods[handler.method] = handler

    def add_write_hook(self, hook):
        self._write_hooks.append(hook)

    def schedule_interval(self, callback, interval):
        """
        Runs the callback on the server loop every interval seconds while serving.
        """
        self._periodic.append((callback, interval))
        if self._server is not None:
            self._start_periodic(callback, interval)

    def _start_periodic(self, callback, interval):
        task = asyncio.get_running_loop().create_task(
            self._run_periodic(callback, interval)
        )
        self._tasks.add(task)
        task.add_done_callback(self._tasks.discard)

    async def _run_periodic(self, callback, interval):
        while True:
            await asyncio.sleep(interval)
            try:
                callback()
            except Exception:
                logger.exception("periodic task %r failed", callback)

    @property
    def endpoint(self):
        """
        The endpoint the server is bound to.
        """
        if self._server is None:
            return None
        host, port = self._server.sockets[0].getsockname()[:2]
        return Endpoint(host, port)

    async def start(self, endpoint):
        endpoint = Endpoint.parse(endpoint)
        try:
            self._server = await asyncio.start_server(
                self._accept, endpoint.host, endpoint.port
            )
        except OSError as exc:
            raise BindFailure(f"cannot bind to {endpoint}: {exc}") from exc
        for callback, interval in self._periodic:
            self._start_periodic(callback, interval)
        logger.info("serving '%s' on %s", self.name, self.endpoint)

    async def serve_forever(self):
        await self._server.serve_forever()

    async def close(self):
        """
        Stops accepting connections and closes every session, flushing any pending
        notifications.
        """
        if self._server is None:
            return
        self._server.close()
        for task in list(self._tasks):
            task.cancel()
        for session in list(self._sessions):
            await session.close()
        await self._server.wait_closed()
        self._server = None

    async def _accept(self, reader, writer):
        session = Session(self, reader, writer, next(self._session_ids))
        self._sessions.add(session)
        logger.info("session %s: connected from %s", session.session_id, session.peer)
        await session.run()

    def drop_session(self, session):
        self._sessions.discard(session)
        for sub_id, sub in list(self._subscriptions.items()):
            if sub.session is session:
                del self._subscriptions[sub_id]

    def _dispatch_change(self, node, value):
        # Changes with no subscriber are dropped
        for sub in list(self._subscriptions.values()):
            if node in sub.nodes:
                sub.notify(node, value)

    def handle_write(self, node, value):
        """
        Writes the value and runs the write hooks, returning a status code.

        Notifications triggered by the write are queued before this returns, so they
        precede the WriteResp on every session.
        """
        try:
            self.space.set_value(node, value)
        except tuple(WRITE_STATUS) as exc:
            return WRITE_STATUS[type(exc)]
        for hook in self._write_hooks:
            try:
                hook(node, value)
            except Exception:
                logger.exception("write hook failed for %s", node)
                return StatusCode.FAULT
        return StatusCode.GOOD

    def handle_call(self, method, args):
        """
        Runs the handler registered for the method, returning (status, results).
        """
        try:
            handler = self._methods[method]
        except KeyError:
            return StatusCode.NO_SUCH_NODE, ()
        try:
            status, results = handler.handler(tuple(args))
        except Exception as exc:
            logger.warning("method %s faulted: %s", method, exc)
            return StatusCode.FAULT, (Value.text(str(exc) or type(exc).__name__),)
        return status, tuple(results)

    def _subscribe(self, session, nodes):
        for node in nodes:
            if self.space.get(node).node_class is not NodeClass.VARIABLE:
                raise NotAVariable(f"node {node} is not a Variable")
        sub = Subscription(next(self._subscription_ids), session, frozenset(nodes))
        self._subscriptions[sub.subscription_id] = sub
        return sub

    def dispatch(self, session, message):
        """
        Handles one request from the session, returning the response message.
        """
        if isinstance(message, wire.Hello):
            if message.version != wire.PROTOCOL_VERSION:
                session.closing = True
                return wire.Error(
                    ErrorCode.VERSION_MISMATCH,
                    f"unsupported protocol version {message.version}",
                )
            session.established = True
            return wire.HelloAck(self.name)
        if not session.established:
            session.closing = True
            return wire.Error(ErrorCode.HANDSHAKE_REQUIRED, "Hello expected")
        try:
            if isinstance(message, wire.BrowseReq):
                return wire.BrowseResp(tuple(self.space.browse(message.node)))
            elif isinstance(message, wire.ReadReq):
                return wire.ReadResp(self.space.read_value(message.node))
            elif isinstance(message, wire.WriteReq):
                return wire.WriteResp(self.handle_write(message.node, message.value))
            elif isinstance(message, wire.CallReq):
                return wire.CallResp(*self.handle_call(message.method, message.args))
            elif isinstance(message, wire.SubscribeReq):
                sub = self._subscribe(session, message.nodes)
                return wire.SubscribeResp(sub.subscription_id)
        except NoSuchNode as exc:
            return wire.Error(ErrorCode.NO_SUCH_NODE, str(exc))
        except NotAVariable as exc:
            return wire.Error(ErrorCode.UNSUPPORTED, str(exc))
        return wire.Error(
            ErrorCode.UNSUPPORTED, f"{type(message).__name__} is not a request"
        )
