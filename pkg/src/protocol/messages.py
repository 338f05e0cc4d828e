"""
Формат сообщений протокола.

Сообщение = 1 байт тега || 4 байта число элементов (big-endian) || элементы,
каждый элемент - массив байт с 4-байтовым префиксом длины.
Шифртексты передаются фиксированной ширины 2 * |n| (Ciphertext.to_bytes) без тега
и собственного префикса длины; элемент другой длины - WireFormatError.
Целые - минимальной длины, метки проводов - 17 байт.

Содержимое по типам:
    TUPLE_UPLOAD      owner_id, m, c, E(x_1..x_m), E(e_1..e_c)
    QUERY             E(q_1..q_m)
    SQUARE_REQ        E(y_j) = E(a_j - b_j + mu_j) для всех пар и измерений
    SQUARE_REPLY      E(y_j^2)
    KERNEL_REQ        E(d_i^2 + mu_i)
    KERNEL_ACK        число принятых значений
    CLASS_MASKED      B_i * E(класс_i), по c шифртекстов на кортеж
    CLASS_SCALED      (B_i * E(класс_i))^G_i, по c шифртекстов на кортеж
    GARBLED_CIRCUIT   c, ширина, free_xor, E(A_k + mu_k) x c, метки генератора, строки таблиц
    OT_BASE_INIT      A
    OT_BASE_CHOICE    B_1..B_kappa
    OT_BASE_PAYLOADS  kappa, (e0, e1) x kappa, столбцы u x kappa
    OT_EXT_PAYLOADS   (y0, y1) x (c * ширина)
    GARBLED_OUTPUT    выходные метки
    RESULT            индекс класса
    ERROR             текст ошибки (UTF-8)
"""
import struct
from dataclasses import dataclass
from enum import IntEnum
from typing import List, Sequence, Tuple

from src.crypto.encoding import bytes_to_int, int_to_bytes, pack_blobs, unpack_blobs
from src.crypto.paillier import Ciphertext, PublicKey
from src.utils.errors import ProtocolError, WireFormatError

_HEADER = struct.Struct('>BI')


class MessageKind(IntEnum):
    TUPLE_UPLOAD = 1
    QUERY = 2
    SQUARE_REQ = 3
    SQUARE_REPLY = 4
    KERNEL_REQ = 5
    KERNEL_ACK = 6
    CLASS_MASKED = 7
    CLASS_SCALED = 8
    GARBLED_CIRCUIT = 9
    OT_BASE_INIT = 10
    OT_BASE_CHOICE = 11
    OT_BASE_PAYLOADS = 12
    OT_EXT_PAYLOADS = 13
    GARBLED_OUTPUT = 14
    RESULT = 15
    ERROR = 16


@dataclass(frozen=True)
class Message:
    kind: MessageKind
    payloads: Tuple[bytes, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'kind', MessageKind(self.kind))
        object.__setattr__(self, 'payloads', tuple(bytes(p) for p in self.payloads))

    def encode(self) -> bytes:
        return _HEADER.pack(int(self.kind), len(self.payloads)) + pack_blobs(self.payloads)

    @classmethod
    def decode(cls, data: bytes) -> "Message":
        if len(data) < _HEADER.size:
            raise WireFormatError("Сообщение короче заголовка")
        tag, count = _HEADER.unpack_from(data)
        try:
            kind = MessageKind(tag)
        except ValueError:
            raise WireFormatError(f"Неизвестный тип сообщения {tag}")
        return cls(kind, tuple(unpack_blobs(data[_HEADER.size:], count)))

    def __len__(self):
        return len(self.payloads)

    def __repr__(self):
        return f"Message({self.kind.name}, {len(self.payloads)} items)"


# --- Вспомогательные преобразования ---

def ciphertexts_to_payloads(cts: Sequence[Ciphertext]) -> List[bytes]:
    return [c.to_bytes() for c in cts]


def payloads_to_ciphertexts(payloads: Sequence[bytes], pk: PublicKey) -> List[Ciphertext]:
    return [Ciphertext.from_bytes(p, pk) for p in payloads]


def int_payload(value: int) -> bytes:
    return int_to_bytes(value)


def payload_int(payload: bytes) -> int:
    return bytes_to_int(payload)


def error_message(text: str) -> Message:
    return Message(MessageKind.ERROR, (text.encode('utf-8'),))


def expect(msg: Message, kind: MessageKind, count: int = -1) -> Message:
    """Проверка типа (и числа элементов) ответа"""
    if msg.kind is MessageKind.ERROR:
        raise ProtocolError(f"Сторона вернула ошибку: {msg.payloads[0].decode('utf-8', 'replace')}")
    if msg.kind is not kind:
        raise WireFormatError(f"Ожидалось {kind.name}, получено {msg.kind.name}")
    if count >= 0 and len(msg.payloads) != count:
        raise WireFormatError(f"{kind.name}: ожидалось {count} элементов, получено {len(msg.payloads)}")
    return msg
