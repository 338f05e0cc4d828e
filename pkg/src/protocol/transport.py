"""
Транспорт DataHost -> CSP. Внутрипроцессный канал и TCP используют одни и те же байты:
каждое сообщение сериализуется и записывается в журнал в обоих направлениях.
"""
import socket
import socketserver
import struct
import threading
from typing import Optional, Tuple

from tenacity import retry, retry_if_exception_type, stop_after_attempt, wait_exponential

from config.settings import Config
from src.protocol.messages import Message
from src.protocol.parties import CryptoServiceProvider, CspSession
from src.protocol.transcript import CSP, DATA_HOST, Transcript
from src.utils.errors import TransportError
from src.utils.logger import logger

_FRAME = struct.Struct('>I')
MAX_FRAME_BYTES = 1 << 30


class Channel:
    """Базовый канал: request() сериализует запрос, журналирует и декодирует ответ"""

    def __init__(self, transcript: Optional[Transcript] = None,
                 sender: str = DATA_HOST, receiver: str = CSP):
        self.transcript = transcript if transcript is not None else Transcript()
        self.sender = sender
        self.receiver = receiver

    def request(self, msg: Message) -> Message:
        data = msg.encode()
        self.transcript.record(self.sender, self.receiver, data)
        reply = self._exchange(data)
        self.transcript.record(self.receiver, self.sender, reply)
        return Message.decode(reply)

    def _exchange(self, data: bytes) -> bytes:
        raise NotImplementedError

    def close(self):
        pass

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.close()


class InProcessChannel(Channel):
    def __init__(self, csp: CryptoServiceProvider, transcript: Optional[Transcript] = None):
        super().__init__(transcript)
        self.session: CspSession = csp.open_session()

    def _exchange(self, data: bytes) -> bytes:
        return self.session.handle_bytes(data)


# --- TCP ---

def _recv_exact(sock: socket.socket, size: int) -> bytes:
    chunks, remaining = [], size
    while remaining:
        chunk = sock.recv(min(remaining, 1 << 20))
        if not chunk:
            raise TransportError("Соединение закрыто посреди сообщения")
        chunks.append(chunk)
        remaining -= len(chunk)
    return b''.join(chunks)


def send_frame(sock: socket.socket, data: bytes):
    sock.sendall(_FRAME.pack(len(data)) + data)


def recv_frame(sock: socket.socket) -> Optional[bytes]:
    """Кадр с 4-байтовой длиной; None при чистом закрытии соединения"""
    header = sock.recv(_FRAME.size)
    if not header:
        return None
    if len(header) < _FRAME.size:
        header += _recv_exact(sock, _FRAME.size - len(header))
    (size,) = _FRAME.unpack(header)
    if size > MAX_FRAME_BYTES:
        raise TransportError(f"Кадр {size} байт превышает предел")
    return _recv_exact(sock, size)


@retry(
    stop=stop_after_attempt(Config.PROTOCOL_CONFIG['connect_retries']),
    wait=wait_exponential(multiplier=0.1, min=0.1, max=2),
    retry=retry_if_exception_type(ConnectionError),
    reraise=True,
)
def _connect(host: str, port: int, timeout: float) -> socket.socket:
    return socket.create_connection((host, port), timeout=timeout)


class TcpChannel(Channel):
    def __init__(self, host: str, port: int, transcript: Optional[Transcript] = None,
                 timeout: Optional[float] = None):
        super().__init__(transcript)
        timeout = timeout or Config.PROTOCOL_CONFIG['socket_timeout']
        try:
            self._sock = _connect(host, port, timeout)
        except OSError as e:
            raise TransportError(f"Не удалось подключиться к CSP {host}:{port}: {e}") from e
        logger.info(f"🔌 Подключено к CSP {host}:{port}")

    def _exchange(self, data: bytes) -> bytes:
        try:
            send_frame(self._sock, data)
            reply = recv_frame(self._sock)
        except OSError as e:
            raise TransportError(f"Обмен с CSP прерван: {e}") from e
        if reply is None:
            raise TransportError("CSP закрыл соединение")
        return reply

    def close(self):
        try:
            self._sock.close()
        except OSError:
            pass


class _CspRequestHandler(socketserver.BaseRequestHandler):
    def handle(self):
        session = self.server.csp.open_session()
        while True:
            try:
                data = recv_frame(self.request)
            except (OSError, TransportError) as e:
                logger.warning(f"⚠️ CSP: соединение {self.client_address} прервано: {e}")
                return
            if data is None:
                return
            send_frame(self.request, session.handle_bytes(data))


class _ThreadingServer(socketserver.ThreadingTCPServer):
    daemon_threads = True
    allow_reuse_address = True


class CspServer:
    """CSP как TCP-сервис: отдельная сессия на каждое соединение"""

    def __init__(self, csp: CryptoServiceProvider, host: Optional[str] = None, port: Optional[int] = None):
        host = host or Config.PROTOCOL_CONFIG['host']
        port = Config.PROTOCOL_CONFIG['port'] if port is None else port
        self._server = _ThreadingServer((host, port), _CspRequestHandler)
        self._server.csp = csp
        self._thread: Optional[threading.Thread] = None

    @property
    def address(self) -> Tuple[str, int]:
        return self._server.server_address[:2]

    def start(self) -> "CspServer":
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        logger.info(f"🛰️ CSP слушает {self.address[0]}:{self.address[1]}")
        return self

    def serve_forever(self):
        logger.info(f"🛰️ CSP слушает {self.address[0]}:{self.address[1]}")
        self._server.serve_forever()

    def stop(self):
        if self._thread is not None:
            self._server.shutdown()
            self._thread.join(timeout=5)
            self._thread = None
        self._server.server_close()

    def __enter__(self):
        return self.start()

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.stop()
