import logging

from .codec import HEADER_SIZE, check_magic, decode, decode_header
from .errors import WireError

logger = logging.getLogger(__name__)


class FrameReader:
    """
    Incremental frame decoder for a byte stream.

    Chunks may split or coalesce frames arbitrarily. After the first framing error
    the reader is poisoned: messages decoded before the error are still returned,
    then ``check`` and every subsequent ``feed`` raise that error.
    """

    def __init__(self):
        self._buffer = bytearray()
        self._error = None

    @property
    def poisoned(self):
        return self._error is not None

    def check(self):
        """
        Raises the framing error if the reader is poisoned.
        """
        if self._error is not None:
            raise self._error

    def feed(self, chunk):
        """
        Adds the chunk to the buffer and returns the list of complete messages as
        (message, request id) tuples.
        """
        self.check()
        self._buffer += chunk
        messages = []
        try:
            while self._buffer:
                check_magic(self._buffer)
                if len(self._buffer) < HEADER_SIZE:
                    break
                _, _, payload_len = decode_header(self._buffer)
                frame_len = HEADER_SIZE + payload_len
                if len(self._buffer) < frame_len:
                    break
                frame = bytes(self._buffer[:frame_len])
                del self._buffer[:frame_len]
                messages.append(decode(frame))
        except WireError as exc:
            logger.debug("frame reader poisoned: %s", exc)
            self._error = exc
            self._buffer.clear()
            if not messages:
                raise
        return messages


def frame_reader(chunks):
    """
    Generator yielding (message, request id) tuples from an iterable of byte chunks.
    """
    reader = FrameReader()
    for chunk in chunks:
        yield from reader.feed(chunk)
        reader.check()
