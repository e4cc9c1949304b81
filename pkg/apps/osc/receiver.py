import logging
import threading
from collections import deque

from pythonosc.dispatcher import Dispatcher
from pythonosc.osc_server import BlockingOSCUDPServer

from .codec import decode_packet
from .exceptions import OscBindError, OscDecodeError

logger = logging.getLogger(__name__)

DEFAULT_PORT = 5005
DEFAULT_CAPACITY = 65536


class MessageQueue:
    """Bounded FIFO between the receiver thread and the engine loop; drops oldest on overflow."""

    def __init__(self, capacity=DEFAULT_CAPACITY):
        self.capacity = capacity
        self.dropped = 0
        self._items = deque(maxlen=capacity)
        self._lock = threading.Lock()

    def put_many(self, messages):
        messages = list(messages)
        with self._lock:
            overflow = len(self._items) + len(messages) - self.capacity
            if overflow > 0:
                self.dropped += overflow
                logger.warning("message queue full, dropped %d oldest", overflow)
            self._items.extend(messages)

    def put(self, message):
        self.put_many([message])

    def drain(self):
        with self._lock:
            items = list(self._items)
            self._items.clear()
        return items

    def __len__(self):
        with self._lock:
            return len(self._items)


class QueueingDispatcher(Dispatcher):
    """Hands whole datagrams to the game codec instead of per-address handlers."""

    def __init__(self, queue):
        super().__init__()
        self.queue = queue

    def call_handlers_for_packet(self, data, client_address):
        try:
            messages = decode_packet(data)
        except OscDecodeError as exc:
            logger.warning("dropping malformed datagram from %s: %s", client_address, exc)
            return []
        self.queue.put_many(messages)
        return []


class OscReceiver:
    def __init__(self, queue, host="127.0.0.1", port=DEFAULT_PORT):
        self.queue = queue
        self.host = host
        self.port = port
        self._server = None
        self._thread = None

    @property
    def address(self):
        if self._server is None:
            return (self.host, self.port)
        return self._server.server_address

    def start(self):
        try:
            self._server = BlockingOSCUDPServer((self.host, self.port), QueueingDispatcher(self.queue))
        except OSError as exc:
            raise OscBindError(f"cannot bind OSC receiver on {self.host}:{self.port}: {exc}") from exc
        self._thread = threading.Thread(
            target=self._server.serve_forever, name="osc-receiver", daemon=True
        )
        self._thread.start()
        logger.info("listening for game messages on %s:%d", *self.address[:2])
        return self

    def stop(self):
        if self._server is None:
            return
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=2)
        self._server = None
        self._thread = None
