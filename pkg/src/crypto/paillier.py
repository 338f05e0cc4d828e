"""
Криптосистема Paillier (g = n + 1) на gmpy2.

Шифрование: c = (1 + a*n) * r^n mod n^2.
Сложение открытых текстов = умножение шифртекстов,
умножение на скаляр = возведение шифртекста в степень.
"""
import hashlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Tuple

import gmpy2

from config.settings import Config
from src.crypto.encoding import (
    byte_length, bytes_to_int, int_to_bytes, pack_int, unpack_ints,
)
from src.utils.errors import (
    InvalidCiphertextError, KeyMismatchError, KeySizeError, PlaintextRangeError,
    WireFormatError,
)
from src.utils.logger import logger
from src.utils.rng import RandomSource, SeedLike

PUBLIC_KEY_TAG = 0x50    # 'P'
SECRET_KEY_TAG = 0x53    # 'S'


@dataclass(frozen=True)
class PublicKey:
    n: int
    key_bits: int

    @cached_property
    def g(self) -> int:
        return self.n + 1

    @cached_property
    def n_square(self) -> int:
        return self.n * self.n

    @cached_property
    def key_id(self) -> str:
        """Короткий идентификатор ключа: первые 8 байт SHA-256 от n"""
        return hashlib.sha256(int_to_bytes(self.n)).hexdigest()[:16]

    @cached_property
    def modulus_bytes(self) -> int:
        return byte_length(self.n)

    def __repr__(self):
        return f"PublicKey(bits={self.key_bits}, id={self.key_id})"

    # --- Знаковые значения: x -> x mod n, v >= n/2 трактуется как отрицательное ---

    def encode_signed(self, x: int) -> int:
        return x % self.n

    def decode_signed(self, v: int) -> int:
        return v - self.n if v >= self.n // 2 else v

    # --- Сериализация ---

    def serialize_modulus(self) -> bytes:
        return int_to_bytes(self.n)

    def to_bytes(self) -> bytes:
        return bytes([PUBLIC_KEY_TAG]) + pack_int(self.key_bits) + pack_int(self.n)

    @classmethod
    def from_bytes(cls, data: bytes) -> "PublicKey":
        if not data or data[0] != PUBLIC_KEY_TAG:
            raise WireFormatError("Ожидался тег публичного ключа")
        key_bits, n = unpack_ints(data[1:], 2)
        if n.bit_length() != key_bits:
            raise WireFormatError(f"Модуль имеет {n.bit_length()} бит, заявлено {key_bits}")
        return cls(n=n, key_bits=key_bits)


@dataclass(frozen=True)
class SecretKey:
    """Секретный ключ: простые p < q. Расшифрование через CRT"""
    public_key: PublicKey
    p: int = field(repr=False)
    q: int = field(repr=False)

    def __repr__(self):
        return f"SecretKey(id={self.public_key.key_id})"

    @cached_property
    def _crt(self) -> Tuple:
        p, q = gmpy2.mpz(self.p), gmpy2.mpz(self.q)
        g = gmpy2.mpz(self.public_key.g)
        p_square, q_square = p * p, q * q
        hp = gmpy2.invert((gmpy2.powmod(g, p - 1, p_square) - 1) // p, p)
        hq = gmpy2.invert((gmpy2.powmod(g, q - 1, q_square) - 1) // q, q)
        p_inverse = gmpy2.invert(p, q)
        return p, q, p_square, q_square, hp, hq, p_inverse

    def raw_decrypt(self, value: int) -> int:
        p, q, p_square, q_square, hp, hq, p_inverse = self._crt
        c = gmpy2.mpz(value)
        mp = ((gmpy2.powmod(c, p - 1, p_square) - 1) // p) * hp % p
        mq = ((gmpy2.powmod(c, q - 1, q_square) - 1) // q) * hq % q
        u = (mq - mp) * p_inverse % q
        return int(mp + u * p)

    def to_bytes(self) -> bytes:
        return (bytes([SECRET_KEY_TAG]) + pack_int(self.public_key.key_bits)
                + pack_int(self.p) + pack_int(self.q))

    @classmethod
    def from_bytes(cls, data: bytes) -> "SecretKey":
        if not data or data[0] != SECRET_KEY_TAG:
            raise WireFormatError("Ожидался тег секретного ключа")
        key_bits, p, q = unpack_ints(data[1:], 3)
        return _make_secret_key(p, q, key_bits)


@dataclass(frozen=True)
class Ciphertext:
    value: int
    public_key: PublicKey = field(repr=False)

    @property
    def key_id(self) -> str:
        return self.public_key.key_id

    def __repr__(self):
        return f"Ciphertext(key={self.key_id}, value={hex(self.value)[:18]}...)"

    def is_unit(self) -> bool:
        return 0 < self.value < self.public_key.n_square and gmpy2.gcd(self.value, self.public_key.n) == 1

    def to_bytes(self) -> bytes:
        """
        Фиксированная ширина 2 * длина модуля, без тега и префикса длины:
        ключ известен из контекста, длину задает рамка элемента сообщения.
        Ключи, в отличие от шифртекстов, сериализуются с тегом.
        """
        return int_to_bytes(self.value, 2 * self.public_key.modulus_bytes)

    @classmethod
    def from_bytes(cls, data: bytes, public_key: PublicKey) -> "Ciphertext":
        if len(data) != 2 * public_key.modulus_bytes:
            raise WireFormatError(
                f"Шифртекст длиной {len(data)} байт, ожидалось {2 * public_key.modulus_bytes}"
            )
        c = cls(bytes_to_int(data), public_key)
        if not c.is_unit():
            raise InvalidCiphertextError("Шифртекст не обратим по модулю n^2")
        return c


def _make_secret_key(p: int, q: int, key_bits: int) -> SecretKey:
    p, q = sorted((int(p), int(q)))
    return SecretKey(public_key=PublicKey(n=p * q, key_bits=key_bits), p=p, q=q)


def _generate_prime(bits: int, rng: RandomSource) -> int:
    """Простое ровно из bits бит со старшими двумя единичными битами"""
    while True:
        candidate = rng.randbits(bits) | (0b11 << (bits - 2)) | 1
        prime = int(gmpy2.next_prime(candidate))
        if prime.bit_length() == bits:
            return prime


def keygen(key_bits: int = None, seed: SeedLike = None,
           rng: Optional[RandomSource] = None) -> Tuple[PublicKey, SecretKey]:
    """
    Генерация пары ключей.
    seed задает детерминированный режим для тестов; иначе SystemRandom.
    """
    key_bits = Config.KEY_BITS if key_bits is None else key_bits
    if key_bits < Config.MIN_KEY_BITS or key_bits % 2:
        raise KeySizeError(
            f"Длина ключа {key_bits} недопустима: нужно четное число >= {Config.MIN_KEY_BITS}"
        )
    if rng is None:
        rng = RandomSource(seed)

    half = key_bits // 2
    logger.info(f"🔑 Генерация ключа Paillier ({key_bits} бит, {'seed' if rng.deterministic else 'secure'})...")
    p = _generate_prime(half, rng)
    q = _generate_prime(half, rng)
    while q == p:
        q = _generate_prime(half, rng)

    sk = _make_secret_key(p, q, key_bits)
    if sk.public_key.n.bit_length() != key_bits:
        raise KeySizeError(f"Модуль получился {sk.public_key.n.bit_length()} бит")
    logger.info(f"✅ Ключ готов: {sk.public_key.key_id}")
    return sk.public_key, sk


def _random_unit(pk: PublicKey, rng: RandomSource) -> int:
    while True:
        r = rng.randrange(1, pk.n)
        if gmpy2.gcd(r, pk.n) == 1:
            return r


def encrypt(pk: PublicKey, a: int, rng: Optional[RandomSource] = None) -> Ciphertext:
    if not 0 <= a < pk.n:
        raise PlaintextRangeError("Открытый текст должен лежать в [0, n)")
    rng = rng or RandomSource()
    r = _random_unit(pk, rng)
    n_square = pk.n_square
    # g^a = (1 + n)^a = 1 + a*n mod n^2
    value = (1 + a * pk.n) % n_square * gmpy2.powmod(r, pk.n, n_square) % n_square
    return Ciphertext(int(value), pk)


def encrypt_signed(pk: PublicKey, x: int, rng: Optional[RandomSource] = None) -> Ciphertext:
    return encrypt(pk, pk.encode_signed(x), rng)


def _check_key(sk_or_pk: PublicKey, c: Ciphertext):
    if c.public_key.n != sk_or_pk.n:
        raise KeyMismatchError(f"Шифртекст ключа {c.key_id}, ожидался {sk_or_pk.key_id}")


def decrypt(sk: SecretKey, c: Ciphertext) -> int:
    _check_key(sk.public_key, c)
    if not c.is_unit():
        raise InvalidCiphertextError("Шифртекст вне Z*_{n^2}")
    return sk.raw_decrypt(c.value)


def decrypt_signed(sk: SecretKey, c: Ciphertext) -> int:
    return sk.public_key.decode_signed(decrypt(sk, c))


def hom_add(c1: Ciphertext, c2: Ciphertext) -> Ciphertext:
    _check_key(c1.public_key, c2)
    pk = c1.public_key
    return Ciphertext(int(gmpy2.mpz(c1.value) * c2.value % pk.n_square), pk)


def hom_scale(c: Ciphertext, k: int) -> Ciphertext:
    """E(a)^k: открытый текст умножается на k mod n (отрицательные k допустимы)"""
    pk = c.public_key
    return Ciphertext(int(gmpy2.powmod(c.value, k % pk.n, pk.n_square)), pk)


def hom_neg(c: Ciphertext) -> Ciphertext:
    return hom_scale(c, -1)


def hom_sum(ciphertexts) -> Ciphertext:
    """Свертка hom_add по непустой последовательности"""
    it = iter(ciphertexts)
    total = next(it)
    for c in it:
        total = hom_add(total, c)
    return total
