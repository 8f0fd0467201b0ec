import unittest

from hypothesis import given, settings
from hypothesis import strategies as st

from uarl import wire
from uarl.address_space import NodeId, Value
from uarl.client import ServerError, SyncSession, TransportError
from uarl.server import BindFailure, serve

from .util import (
    COUNTER,
    DEVICE,
    ECHO,
    FAIL,
    LABEL,
    LEVEL,
    LOCALHOST,
    device_methods,
    device_space,
    exchange,
    raw_connection,
)

StatusCode = wire.StatusCode


class ServerTestCase(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.handle = serve(LOCALHOST, device_space(), device_methods(), name="device")

    @classmethod
    def tearDownClass(cls):
        cls.handle.stop()

    def session(self):
        session = SyncSession(self.handle.endpoint, timeout=5.0).open()
        self.addCleanup(session.close)
        return session


class HandshakeTest(ServerTestCase):
    def test_hello(self):
        self.assertEqual(self.session().server_name, "device")

    def test_version_mismatch(self):
        with raw_connection(self.handle.endpoint) as sock:
            received, closed = exchange(sock, wire.Hello(2))
        self.assertEqual(len(received), 1)
        message, request_id = received[0]
        self.assertIsInstance(message, wire.Error)
        self.assertEqual(message.code, wire.ErrorCode.VERSION_MISMATCH)
        self.assertEqual(request_id, 1)
        self.assertTrue(closed)

    def test_handshake_required(self):
        with raw_connection(self.handle.endpoint) as sock:
            received, closed = exchange(sock, wire.ReadReq(COUNTER))
        self.assertEqual(received[0][0].code, wire.ErrorCode.HANDSHAKE_REQUIRED)
        self.assertTrue(closed)

    def test_garbage(self):
        with raw_connection(self.handle.endpoint) as sock:
            sock.sendall(wire.encode(wire.Hello(1), 1) + b"not a frame")
            reader = wire.FrameReader()
            received = []
            while chunk := sock.recv(65536):
                received.extend(reader.feed(chunk))
        messages = [message for message, _ in received]
        self.assertEqual(messages[0], wire.HelloAck("device"))
        self.assertEqual(messages[-1].code, wire.ErrorCode.PROTOCOL_ERROR)

    def test_bind_failure(self):
        with self.assertRaises(BindFailure):
            serve(self.handle.endpoint, device_space())


class ServicesTest(ServerTestCase):
    def test_browse(self):
        entries = self.session().browse(DEVICE)
        self.assertEqual(
            [entry.browse_name for entry in entries],
            ["Counter", "Level", "Label", "Echo", "Fail"],
        )
        self.assertIsNotNone(entries[0].marker)

    def test_browse_unknown(self):
        with self.assertRaises(ServerError) as ctx:
            self.session().browse(NodeId(2, 999))
        self.assertEqual(ctx.exception.code, wire.ErrorCode.NO_SUCH_NODE)

    def test_read(self):
        self.assertEqual(self.session().read(LEVEL), Value.double(0.0))

    def test_write_statuses(self):
        session = self.session()
        cases = [
            (COUNTER, Value.int32(0), StatusCode.GOOD),
            (NodeId(2, 999), Value.int32(0), StatusCode.NO_SUCH_NODE),
            (COUNTER, Value.double(1.0), StatusCode.TYPE_MISMATCH),
            (DEVICE, Value.int32(0), StatusCode.TYPE_MISMATCH),
            (COUNTER, Value.int32(2), StatusCode.VALUE_OUT_OF_RANGE),
            (NodeId(2, "2.IntAction.min"), Value.int32(0), StatusCode.NOT_WRITABLE),
        ]
        for node, value, expected in cases:
            with self.subTest(node=node, value=value):
                self.assertEqual(session.write(node, value), expected)

    def test_call(self):
        session = self.session()
        args = (Value.int32(1), Value.text("x"))
        self.assertEqual(session.call(ECHO, args), (StatusCode.GOOD, args))
        self.assertEqual(session.call(NodeId(2, 999)), (StatusCode.NO_SUCH_NODE, ()))
        self.assertEqual(session.call(FAIL), (StatusCode.FAULT, (Value.text("boom"),)))

    def test_subscribe_method(self):
        with self.assertRaises(ServerError) as ctx:
            self.session().subscribe([ECHO])
        self.assertEqual(ctx.exception.code, wire.ErrorCode.UNSUPPORTED)


class SubscriptionTest(ServerTestCase):
    def test_fan_out(self):
        subscribers = [self.session(), self.session()]
        for subscriber in subscribers:
            subscriber.subscribe([LEVEL])
        self.session().write(LEVEL, Value.double(0.5))
        for subscriber in subscribers:
            notification = subscriber.await_notification(5)
            self.assertEqual(notification.node, LEVEL)
            self.assertEqual(notification.value, Value.double(0.5))
            self.assertEqual(notification.seq, 1)
            self.assertIsNone(subscriber.await_notification(0.1))
        self.session().write(LEVEL, Value.double(0.0))

    def test_notify_precedes_write_response(self):
        session = self.session()
        session.subscribe([LABEL])
        self.assertEqual(session.write(LABEL, Value.text("ordered")), StatusCode.GOOD)
        notification = session.await_notification(0)
        self.assertEqual(notification.value, Value.text("ordered"))

    def test_contiguous_sequence(self):
        session = self.session()
        subscription_id = session.subscribe([LABEL])
        count = 100
        for k in range(count):
            session.write(LABEL, Value.text(f"change {k}"))
        received = [session.await_notification(5) for _ in range(count)]
        self.assertEqual([n.seq for n in received], list(range(1, count + 1)))
        self.assertEqual(
            [n.value.data for n in received], [f"change {k}" for k in range(count)]
        )
        self.assertTrue(all(n.subscription_id == subscription_id for n in received))
        self.assertIsNone(session.await_notification(0.1))

    @settings(max_examples=20, deadline=None)
    @given(st.lists(st.integers(0, 1), max_size=30))
    def test_one_notify_per_change(self, sequence):
        session = SyncSession(self.handle.endpoint).open()
        try:
            current = session.read(COUNTER).data
            session.subscribe([COUNTER])
            changes = 0
            for data in sequence:
                session.write(COUNTER, Value.int32(data))
                changes += data != current
                current = data
            received = []
            while (notification := session.await_notification(0)) is not None:
                received.append(notification)
            self.assertEqual(len(received), changes)
            self.assertEqual([n.seq for n in received], list(range(1, changes + 1)))
        finally:
            session.close()


class ShutdownTest(unittest.TestCase):
    def test_stop_closes_sessions(self):
        handle = serve(LOCALHOST, device_space())
        session = SyncSession(handle.endpoint).open()
        self.addCleanup(session.close)
        session.subscribe([LEVEL])
        handle.call(handle.server.space.set_value, LEVEL, Value.double(1.0))
        handle.stop()
        self.assertEqual(session.await_notification(5).value, Value.double(1.0))
        with self.assertRaises(TransportError):
            session.await_notification(5)
        with self.assertRaises(TransportError):
            session.read(LEVEL)
