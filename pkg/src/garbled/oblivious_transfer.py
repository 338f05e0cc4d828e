"""
Oblivious transfer 1-из-2.

* OtSender / OtReceiver - OT Чоу-Орланди над группой MODP 2048 (RFC 3526, группа 14).
  Один элемент A обслуживает пакет передач, ключи разводятся по индексу.
* OtExtensionSender / OtExtensionReceiver - расширение IKNP (полу-честная модель):
  128 базовых OT с обращенными ролями превращаются в N передач на хэшах.
* TrustedExchangeOT - НЕБЕЗОПАСНАЯ заглушка для быстрых тестов.
"""
import hashlib
import struct
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import gmpy2
import numpy as np

from src.crypto.encoding import bytes_to_int, int_to_bytes
from src.utils.errors import ObliviousTransferError
from src.utils.logger import logger
from src.utils.rng import RandomSource

MODP_2048_P = int(
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD1"
    "29024E088A67CC74020BBEA63B139B22514A08798E3404DD"
    "EF9519B3CD3A431B302B0A6DF25F14374FE1356D6D51C245"
    "E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3D"
    "C2007CB8A163BF0598DA48361C55D39A69163FA8FD24CF5F"
    "83655D23DCA3AD961C62F356208552BB9ED529077096966D"
    "670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9"
    "DE2BCBF6955817183995497CEA956AE515D2261898FA0510"
    "15728E5A8AACAA68FFFFFFFFFFFFFFFF",
    16,
)
MODP_2048_G = 2
GROUP_BYTES = 256
EXPONENT_BITS = 256
SEED_BYTES = 16


def _encode_element(x: int) -> bytes:
    return int_to_bytes(x, GROUP_BYTES)


def _decode_element(data: bytes) -> int:
    x = bytes_to_int(data)
    if len(data) != GROUP_BYTES or not 1 < x < MODP_2048_P - 1:
        raise ObliviousTransferError("Элемент группы вне допустимого диапазона")
    return x


def _pad(label: bytes, index: int, *parts: bytes, length: int) -> bytes:
    h = hashlib.shake_256(label + struct.pack('>I', index))
    for part in parts:
        h.update(part)
    return h.digest(length)


def _xor(a: bytes, b: bytes) -> bytes:
    return bytes(x ^ y for x, y in zip(a, b))


# --- OT Чоу-Орланди ---

class OtSender:
    """Отправитель: пары сообщений, одна секретная экспонента на пакет"""

    def __init__(self, rng: Optional[RandomSource] = None):
        rng = rng or RandomSource()
        self._a = rng.randrange(1, 1 << EXPONENT_BITS)
        self.A = int(gmpy2.powmod(MODP_2048_G, self._a, MODP_2048_P))

    def init_message(self) -> bytes:
        return _encode_element(self.A)

    def payloads(self, receiver_messages: Sequence[bytes],
                 pairs: Sequence[Tuple[bytes, bytes]]) -> List[Tuple[bytes, bytes]]:
        if len(receiver_messages) != len(pairs):
            raise ObliviousTransferError("Число выборов получателя не совпадает с числом пар")
        A_bytes = self.init_message()
        A_inv = gmpy2.invert(self.A, MODP_2048_P)
        out = []
        for i, (b_msg, (m0, m1)) in enumerate(zip(receiver_messages, pairs)):
            if len(m0) != len(m1):
                raise ObliviousTransferError("Сообщения пары разной длины")
            B = _decode_element(b_msg)
            k0 = gmpy2.powmod(B, self._a, MODP_2048_P)
            k1 = gmpy2.powmod(B * A_inv % MODP_2048_P, self._a, MODP_2048_P)
            e0 = _xor(m0, _pad(b'co-ot', i, A_bytes, b_msg, _encode_element(int(k0)), length=len(m0)))
            e1 = _xor(m1, _pad(b'co-ot', i, A_bytes, b_msg, _encode_element(int(k1)), length=len(m1)))
            out.append((e0, e1))
        return out


class OtReceiver:
    """Получатель: биты выбора, по одной экспоненте на передачу"""

    def __init__(self, choices: Sequence[int], rng: Optional[RandomSource] = None):
        rng = rng or RandomSource()
        if any(b not in (0, 1) for b in choices):
            raise ObliviousTransferError("Бит выбора должен быть 0 или 1")
        self.choices = [int(b) for b in choices]
        self._r = [rng.randrange(1, 1 << EXPONENT_BITS) for _ in self.choices]
        self._A_bytes: Optional[bytes] = None
        self._messages: List[bytes] = []

    def choose(self, sender_init: bytes) -> List[bytes]:
        A = _decode_element(sender_init)
        self._A_bytes = sender_init
        self._A = A
        self._messages = []
        for b, r in zip(self.choices, self._r):
            gr = gmpy2.powmod(MODP_2048_G, r, MODP_2048_P)
            B = gr if b == 0 else A * gr % MODP_2048_P
            self._messages.append(_encode_element(int(B)))
        return list(self._messages)

    def receive(self, encrypted: Sequence[Tuple[bytes, bytes]]) -> List[bytes]:
        if self._A_bytes is None:
            raise ObliviousTransferError("choose() не вызывался")
        if len(encrypted) != len(self.choices):
            raise ObliviousTransferError("Число зашифрованных пар не совпадает с числом выборов")
        out = []
        for i, ((e0, e1), b, r, b_msg) in enumerate(zip(encrypted, self.choices, self._r, self._messages)):
            k = _encode_element(int(gmpy2.powmod(self._A, r, MODP_2048_P)))
            e = e1 if b else e0
            out.append(_xor(e, _pad(b'co-ot', i, self._A_bytes, b_msg, k, length=len(e))))
        return out


@dataclass
class ObliviousTransferSession:
    """Открытые параметры группы и все переданные сообщения одной передачи"""
    group_p: int = MODP_2048_P
    group_g: int = MODP_2048_G
    messages: List[Tuple[str, str, bytes]] = field(default_factory=list)

    def record(self, sender: str, receiver: str, payload: bytes):
        self.messages.append((sender, receiver, payload))

    def sender_view(self) -> List[bytes]:
        """Все, что видит отправитель (сообщения получателя)"""
        return [p for s, _, p in self.messages if s == 'receiver']


def ot_transfer(m0: bytes, m1: bytes, b: int,
                sender_rng: Optional[RandomSource] = None,
                receiver_rng: Optional[RandomSource] = None) -> Tuple[bytes, ObliviousTransferSession]:
    """Одна передача 1-из-2: получатель узнает m_b"""
    if len(m0) != len(m1):
        raise ObliviousTransferError("Сообщения должны быть одинаковой длины")
    session = ObliviousTransferSession()
    sender = OtSender(sender_rng)
    receiver = OtReceiver([b], receiver_rng)

    init = sender.init_message()
    session.record('sender', 'receiver', init)
    choice = receiver.choose(init)
    session.record('receiver', 'sender', choice[0])
    (e0, e1), = sender.payloads(choice, [(m0, m1)])
    session.record('sender', 'receiver', e0 + e1)
    return receiver.receive([(e0, e1)])[0], session


# --- Расширение IKNP ---

def _prg(seed: bytes, n_bytes: int) -> np.ndarray:
    return np.frombuffer(hashlib.shake_256(b'iknp-prg' + seed).digest(n_bytes), dtype=np.uint8)


def _row_hash(j: int, row: bytes, length: int) -> bytes:
    return _pad(b'iknp-row', j, row, length=length)


class OtExtensionReceiver:
    """
    Получатель N передач (в протоколе это CSP с битами своих замаскированных сумм).
    В базовых OT выступает отправителем пар сидов.
    """

    def __init__(self, choices: Sequence[int], rng: Optional[RandomSource] = None,
                 security: int = 128):
        self.rng = rng or RandomSource()
        self.security = security
        self.choices = np.asarray(choices, dtype=np.uint8)
        if self.choices.size and self.choices.max() > 1:
            raise ObliviousTransferError("Биты выбора должны быть 0 или 1")
        self.n = len(self.choices)
        self._n_bytes = (self.n + 7) // 8
        self._seeds = [(self.rng.token_bytes(SEED_BYTES), self.rng.token_bytes(SEED_BYTES))
                       for _ in range(security)]
        self._base = OtSender(self.rng.spawn('iknp-base'))
        self._t_rows: Optional[np.ndarray] = None

    def base_init(self) -> bytes:
        return self._base.init_message()

    def base_payloads(self, base_choices: Sequence[bytes]) -> Tuple[List[Tuple[bytes, bytes]], List[bytes]]:
        """Зашифрованные сиды базовых OT и столбцы u^i = G(k0) ^ G(k1) ^ r"""
        if len(base_choices) != self.security:
            raise ObliviousTransferError(f"Ожидалось {self.security} базовых выборов")
        encrypted = self._base.payloads(base_choices, self._seeds)
        r_packed = np.packbits(self.choices, bitorder='little')
        t_cols, u_cols = [], []
        for k0, k1 in self._seeds:
            t = _prg(k0, self._n_bytes)
            u = t ^ _prg(k1, self._n_bytes) ^ r_packed
            t_cols.append(t)
            u_cols.append(u.tobytes())
        t_bits = np.unpackbits(np.stack(t_cols), axis=1, bitorder='little')[:, :self.n]
        self._t_rows = np.packbits(t_bits.T, axis=1, bitorder='little')
        return encrypted, u_cols

    def receive(self, masked_pairs: Sequence[Tuple[bytes, bytes]]) -> List[bytes]:
        if self._t_rows is None:
            raise ObliviousTransferError("base_payloads() не вызывался")
        if len(masked_pairs) != self.n:
            raise ObliviousTransferError(f"Ожидалось {self.n} пар, получено {len(masked_pairs)}")
        out = []
        for j, ((y0, y1), b) in enumerate(zip(masked_pairs, self.choices)):
            y = y1 if b else y0
            out.append(_xor(y, _row_hash(j, self._t_rows[j].tobytes(), len(y))))
        return out


class OtExtensionSender:
    """
    Отправитель N пар (в протоколе это DH с парами меток проводов).
    В базовых OT выступает получателем со случайным вектором s.
    """

    def __init__(self, n: int, rng: Optional[RandomSource] = None, security: int = 128):
        self.rng = rng or RandomSource()
        self.n = n
        self.security = security
        self._n_bytes = (n + 7) // 8
        self._s = np.array([self.rng.randbit() for _ in range(security)], dtype=np.uint8)
        self._base = OtReceiver(self._s.tolist(), self.rng.spawn('iknp-base'))

    def base_choose(self, base_init: bytes) -> List[bytes]:
        return self._base.choose(base_init)

    def extend(self, encrypted_seeds: Sequence[Tuple[bytes, bytes]], u_cols: Sequence[bytes],
               pairs: Sequence[Tuple[bytes, bytes]]) -> List[Tuple[bytes, bytes]]:
        if len(pairs) != self.n or len(u_cols) != self.security:
            raise ObliviousTransferError("Размеры расширения не совпадают")
        seeds = self._base.receive(encrypted_seeds)
        q_cols = []
        for s_i, seed, u in zip(self._s, seeds, u_cols):
            u = np.frombuffer(u, dtype=np.uint8)
            if u.size != self._n_bytes:
                raise ObliviousTransferError("Столбец u неверной длины")
            q = _prg(seed, self._n_bytes)
            q_cols.append(q ^ u if s_i else q)
        q_bits = np.unpackbits(np.stack(q_cols), axis=1, bitorder='little')[:, :self.n]
        q_rows = np.packbits(q_bits.T, axis=1, bitorder='little')
        s_packed = np.packbits(self._s, bitorder='little')

        out = []
        for j, (x0, x1) in enumerate(pairs):
            if len(x0) != len(x1):
                raise ObliviousTransferError("Сообщения пары разной длины")
            q = q_rows[j]
            y0 = _xor(x0, _row_hash(j, q.tobytes(), len(x0)))
            y1 = _xor(x1, _row_hash(j, (q ^ s_packed).tobytes(), len(x1)))
            out.append((y0, y1))
        return out


def extended_transfer(pairs: Sequence[Tuple[bytes, bytes]], choices: Sequence[int],
                      sender_rng: Optional[RandomSource] = None,
                      receiver_rng: Optional[RandomSource] = None,
                      security: int = 128) -> List[bytes]:
    """Пакет передач через IKNP в одном процессе"""
    receiver = OtExtensionReceiver(choices, receiver_rng, security)
    sender = OtExtensionSender(len(pairs), sender_rng, security)
    base_choices = sender.base_choose(receiver.base_init())
    encrypted_seeds, u_cols = receiver.base_payloads(base_choices)
    return receiver.receive(sender.extend(encrypted_seeds, u_cols, pairs))


class TrustedExchangeOT:
    """
    НЕБЕЗОПАСНО: отправитель видит выбор. Только для ускорения тестов,
    где проверяется не OT, а окружающая логика.
    """

    def __init__(self):
        logger.warning("⚠️ TrustedExchangeOT: используется небезопасная заглушка OT")

    @staticmethod
    def transfer(pairs: Sequence[Tuple[bytes, bytes]], choices: Sequence[int]) -> List[bytes]:
        if len(pairs) != len(choices):
            raise ObliviousTransferError("Число пар не совпадает с числом выборов")
        return [pair[int(b)] for pair, b in zip(pairs, choices)]
