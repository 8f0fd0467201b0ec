import asyncio
import concurrent.futures
import logging
import threading

from .server import Server

logger = logging.getLogger(__name__)


class ServerHandle:
    """
    Runs a server on its own event loop in a background thread.

    Functions that touch the address space from other threads must go through
    ``call`` so that they run inside the server's serialization domain.
    """

    def __init__(self, server):
        self.server = server
        self._loop = asyncio.new_event_loop()
        self._thread = None
        self._stopped = None

    @property
    def endpoint(self):
        return self.server.endpoint

    def start(self, endpoint, timeout=10.0):
        """
        Starts serving on the given endpoint, raising BindFailure if it cannot bind.
        """
        ready = concurrent.futures.Future()
        self._thread = threading.Thread(
            target=self._run,
            args=(endpoint, ready),
            name=f"uarl-server-{self.server.name}",
            daemon=True,
        )
        self._thread.start()
        try:
            ready.result(timeout)
        except BaseException:
            self._thread.join(timeout)
            raise
        return self

    def _run(self, endpoint, ready):
        asyncio.set_event_loop(self._loop)
        try:
            self._loop.run_until_complete(self._main(endpoint, ready))
        finally:
            self._loop.close()

    async def _main(self, endpoint, ready):
        self._stopped = asyncio.Event()
        try:
            await self.server.start(endpoint)
        except Exception as exc:
            ready.set_exception(exc)
            return
        ready.set_result(self.server.endpoint)
        await self._stopped.wait()
        await self.server.close()

    def call(self, func, *args, timeout=10.0):
        """
        Runs func(*args) on the server loop and returns its result.
        """

        async def invoke():
            return func(*args)

        future = asyncio.run_coroutine_threadsafe(invoke(), self._loop)
        return future.result(timeout)

    def stop(self, timeout=10.0):
        """
        Gracefully stops the server, flushing pending notifications.
        """
        if self._thread is None or not self._thread.is_alive():
            return
        self._loop.call_soon_threadsafe(self._stopped.set)
        self._thread.join(timeout)
        logger.info("server '%s' stopped", self.server.name)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        self.stop()


def serve(endpoint, space, methods=(), /, **kwargs):
    """
    Starts a server for the address space on the endpoint and returns its handle.
    """
    return ServerHandle(Server(space, methods, **kwargs)).start(endpoint)
