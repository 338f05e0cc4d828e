"""
Бинарный кодек больших целых.

Формат: 4-байтовая длина (big-endian) + минимальное big-endian представление.
Ноль кодируется пустым массивом. Используется paillier, garbled и protocol.
"""
import struct
from typing import Iterable, List, Tuple

from Crypto.Util.number import bytes_to_long, long_to_bytes

from src.utils.errors import WireFormatError

_LEN = struct.Struct('>I')


def int_to_bytes(value: int, width: int = 0) -> bytes:
    """Минимальное big-endian представление (или фиксированной ширины width)"""
    if value < 0:
        raise ValueError("Кодируются только неотрицательные целые")
    if width:
        if byte_length(value) > width:
            raise ValueError(f"Значение не помещается в {width} байт")
        return long_to_bytes(int(value), width)
    if value == 0:
        return b''
    return long_to_bytes(int(value))


def bytes_to_int(data: bytes) -> int:
    if not data:
        return 0
    return bytes_to_long(data)


def byte_length(value: int) -> int:
    return (int(value).bit_length() + 7) // 8


def pack_blob(blob: bytes) -> bytes:
    return _LEN.pack(len(blob)) + blob


def pack_int(value: int, width: int = 0) -> bytes:
    return pack_blob(int_to_bytes(value, width))


def pack_blobs(blobs: Iterable[bytes]) -> bytes:
    return b''.join(pack_blob(b) for b in blobs)


def unpack_blob(data: bytes, offset: int = 0) -> Tuple[bytes, int]:
    """Читает один length-prefixed массив, возвращает (blob, новое смещение)"""
    if offset + _LEN.size > len(data):
        raise WireFormatError(f"Обрезанный префикс длины на смещении {offset}")
    (length,) = _LEN.unpack_from(data, offset)
    start = offset + _LEN.size
    end = start + length
    if end > len(data):
        raise WireFormatError(f"Заявлено {length} байт, доступно {len(data) - start}")
    return data[start:end], end


def unpack_blobs(data: bytes, count: int = -1) -> List[bytes]:
    """Разбирает последовательность blob'ов; count=-1 читает до конца"""
    blobs = []
    offset = 0
    while offset < len(data) and (count < 0 or len(blobs) < count):
        blob, offset = unpack_blob(data, offset)
        blobs.append(blob)
    if count >= 0 and len(blobs) != count:
        raise WireFormatError(f"Ожидалось {count} элементов, прочитано {len(blobs)}")
    if offset != len(data):
        raise WireFormatError(f"Лишние {len(data) - offset} байт в конце сообщения")
    return blobs


def unpack_ints(data: bytes, count: int = -1) -> List[int]:
    return [bytes_to_int(b) for b in unpack_blobs(data, count)]
