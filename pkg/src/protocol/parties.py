"""
Стороны протокола: владельцы данных, запрашивающие, хранилище (DataHost) и CSP.

Секретный ключ есть только у CSP. DataHost никогда не расшифровывает,
CSP видит только замаскированные значения.
"""
import threading
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from src.classifier.dataset import DataTuple
from src.crypto.fixedpoint import FixedPointParams, masked_kernel, quantize_features
from src.crypto.paillier import (
    Ciphertext, PublicKey, SecretKey, decrypt, encrypt, hom_add, hom_scale,
)
from src.garbled.circuit import BooleanCircuit, build_argmax_circuit, int_to_bits
from src.garbled.garbler import GarbledCircuit, WireLabel, evaluate
from src.garbled.oblivious_transfer import OtExtensionReceiver
from src.protocol.messages import (
    Message, MessageKind, ciphertexts_to_payloads, error_message, int_payload,
    payload_int, payloads_to_ciphertexts,
)
from src.utils.errors import (
    DimensionMismatchError, KeyMismatchError, PrivateKdeError, ProtocolError, WireFormatError,
)
from src.utils.logger import logger
from src.utils.rng import RandomSource


@dataclass
class EncryptedTuple:
    enc_features: List[Ciphertext]
    enc_class: List[Ciphertext]
    owner_id: str

    @property
    def m(self) -> int:
        return len(self.enc_features)

    @property
    def c(self) -> int:
        return len(self.enc_class)

    def to_message(self) -> Message:
        payloads = [self.owner_id.encode('utf-8'), int_payload(self.m), int_payload(self.c)]
        payloads += ciphertexts_to_payloads(self.enc_features) + ciphertexts_to_payloads(self.enc_class)
        return Message(MessageKind.TUPLE_UPLOAD, payloads)

    @classmethod
    def from_message(cls, msg: Message, pk: PublicKey) -> "EncryptedTuple":
        if msg.kind is not MessageKind.TUPLE_UPLOAD or len(msg) < 3:
            raise WireFormatError("Ожидалось сообщение TUPLE_UPLOAD")
        m, c = payload_int(msg.payloads[1]), payload_int(msg.payloads[2])
        body = msg.payloads[3:]
        if len(body) != m + c:
            raise WireFormatError(f"TUPLE_UPLOAD: ожидалось {m + c} шифртекстов, получено {len(body)}")
        cts = payloads_to_ciphertexts(body, pk)
        return cls(cts[:m], cts[m:], msg.payloads[0].decode('utf-8'))


@dataclass
class MaskRecord:
    """
    Маски DataHost за один запрос. Никогда не сериализуются.
    square_masks (маски SquaredDist) сохраняются только в режиме аудита.
    """
    kernel_masks: List[int] = field(default_factory=list)
    gc_masks: List[int] = field(default_factory=list)
    square_masks: List[List[int]] = field(default_factory=list)


class DataOwner:
    def __init__(self, owner_id: str, pk: PublicKey, params: FixedPointParams,
                 rng: Optional[RandomSource] = None):
        self.owner_id = owner_id
        self.pk = pk
        self.params = params
        self.rng = rng or RandomSource()

    def submit_tuple(self, t: DataTuple, pk: Optional[PublicKey] = None) -> EncryptedTuple:
        """Квантование и шифрование признаков и базисного вектора класса"""
        pk = pk or self.pk
        if t.m != self.params.m:
            raise DimensionMismatchError(f"Кортеж размерности {t.m}, ожидалось {self.params.m}")
        if not 0 <= t.label < self.params.c:
            raise ValueError(f"Метка {t.label} вне [0, {self.params.c})")
        quantized = quantize_features(t.features, self.params)
        enc_features = [encrypt(pk, v, self.rng) for v in quantized]
        enc_class = [encrypt(pk, int(j == t.label), self.rng) for j in range(self.params.c)]
        return EncryptedTuple(enc_features, enc_class, self.owner_id)


class Querier:
    def __init__(self, pk: PublicKey, params: FixedPointParams, rng: Optional[RandomSource] = None):
        self.pk = pk
        self.params = params
        self.rng = rng or RandomSource()
        self.results: List[int] = []

    def encrypt_query(self, q: Sequence[float], pk: Optional[PublicKey] = None) -> List[Ciphertext]:
        pk = pk or self.pk
        if len(q) != self.params.m:
            raise DimensionMismatchError(f"Запрос размерности {len(q)}, ожидалось {self.params.m}")
        return [encrypt(pk, v, self.rng) for v in quantize_features(q, self.params)]

    def query_message(self, q: Sequence[float]) -> Message:
        return Message(MessageKind.QUERY, ciphertexts_to_payloads(self.encrypt_query(q)))

    def receive(self, msg: Message) -> int:
        if msg.kind is not MessageKind.RESULT or len(msg) != 1:
            raise WireFormatError("Ожидалось сообщение RESULT")
        label = payload_int(msg.payloads[0])
        self.results.append(label)
        return label


class DataHost:
    """Хранилище зашифрованных кортежей; ведет протокол со стороны DH"""

    def __init__(self, pk: PublicKey, params: FixedPointParams,
                 rng: Optional[RandomSource] = None, retain_masks: bool = False):
        self.pk = pk
        self.params = params
        self.rng = rng or RandomSource()
        self.retain_masks = retain_masks
        self.store: List[EncryptedTuple] = []
        self.mask_record: Optional[MaskRecord] = None

    def upload(self, et: EncryptedTuple):
        if et.m != self.params.m or et.c != self.params.c:
            raise DimensionMismatchError(
                f"Кортеж (m={et.m}, c={et.c}) не совпадает с параметрами (m={self.params.m}, c={self.params.c})"
            )
        for ct in et.enc_features + et.enc_class:
            if ct.public_key.n != self.pk.n:
                raise KeyMismatchError("Кортеж зашифрован чужим ключом")
        if len(self.store) >= self.params.max_tuples:
            raise ProtocolError(f"Хранилище заполнено ({self.params.max_tuples} кортежей)")
        self.store.append(et)
        logger.debug(f"DH: принят кортеж владельца {et.owner_id}, всего {len(self.store)}")

    def receive(self, msg: Message):
        """Входящие сообщения от владельцев данных и запрашивающих"""
        if msg.kind is MessageKind.TUPLE_UPLOAD:
            self.upload(EncryptedTuple.from_message(msg, self.pk))
            return None
        if msg.kind is MessageKind.QUERY:
            query = payloads_to_ciphertexts(msg.payloads, self.pk)
            if len(query) != self.params.m:
                raise DimensionMismatchError(f"Запрос из {len(query)} шифртекстов, ожидалось {self.params.m}")
            return query
        raise WireFormatError(f"DataHost не принимает {msg.kind.name}")

    def remove_owner(self, owner_id: str) -> int:
        """Удаление всех кортежей владельца (без перемаскирования)"""
        before = len(self.store)
        self.store = [et for et in self.store if et.owner_id != owner_id]
        removed = before - len(self.store)
        logger.info(f"🗑️ DH: удалено {removed} кортежей владельца {owner_id}")
        return removed


@dataclass(frozen=True)
class DecryptionEvent:
    """Что CSP расшифровал: этап, исходный шифртекст, открытый текст"""
    phase: str
    ciphertext: int
    plaintext: int


class CryptoServiceProvider:
    """
    Держатель секретного ключа. Обслуживает запросы DataHost через сессии;
    в режиме аудита журналирует все свои расшифрования.
    """

    def __init__(self, pk: PublicKey, sk: SecretKey, params: FixedPointParams,
                 rng: Optional[RandomSource] = None, ot_security: int = 128, audit: bool = False):
        if sk.public_key != pk:
            raise KeyMismatchError("Секретный ключ не соответствует публичному")
        self.pk = pk
        self._sk = sk
        self.params = params
        self.rng = rng or RandomSource()
        self.ot_security = ot_security
        self.audit = audit
        self.decryption_log: List[DecryptionEvent] = []
        self._lock = threading.Lock()
        self._sessions = 0
        self._circuits: Dict[Tuple[int, int], BooleanCircuit] = {}

    def open_session(self) -> "CspSession":
        with self._lock:
            self._sessions += 1
            index = self._sessions
        return CspSession(self, self.rng.spawn(f"csp-session-{index}"))

    def _decrypt(self, phase: str, ct: Ciphertext) -> int:
        value = decrypt(self._sk, ct)
        if self.audit:
            with self._lock:
                self.decryption_log.append(DecryptionEvent(phase, ct.value, value))
        return value

    def circuit(self, c: int, width: int) -> BooleanCircuit:
        key = (c, width)
        with self._lock:
            if key not in self._circuits:
                self._circuits[key] = build_argmax_circuit(c, width)
            return self._circuits[key]


class CspSession:
    """Состояние CSP в рамках одного соединения с DataHost"""

    def __init__(self, csp: CryptoServiceProvider, rng: RandomSource):
        self.csp = csp
        self.rng = rng
        self.kernel_values: List[int] = []
        self._gc: Optional[GarbledCircuit] = None
        self._generator_labels: List[WireLabel] = []
        self._ot: Optional[OtExtensionReceiver] = None
        self._handlers = {
            MessageKind.SQUARE_REQ: self._on_square,
            MessageKind.KERNEL_REQ: self._on_kernel,
            MessageKind.CLASS_MASKED: self._on_class_masked,
            MessageKind.GARBLED_CIRCUIT: self._on_garbled_circuit,
            MessageKind.OT_BASE_CHOICE: self._on_base_choice,
            MessageKind.OT_EXT_PAYLOADS: self._on_ext_payloads,
        }

    def handle_bytes(self, data: bytes) -> bytes:
        """Обработка запроса в сыром виде; ошибки возвращаются сообщением ERROR"""
        try:
            return self.handle(Message.decode(data)).encode()
        except PrivateKdeError as e:
            logger.error(f"❌ CSP: {type(e).__name__}: {e}")
            return error_message(f"{type(e).__name__}: {e}").encode()

    def handle(self, msg: Message) -> Message:
        handler = self._handlers.get(msg.kind)
        if handler is None:
            raise WireFormatError(f"CSP не принимает {msg.kind.name}")
        return handler(msg)

    @property
    def pk(self) -> PublicKey:
        return self.csp.pk

    # --- SquaredDist: возведение в квадрат замаскированных разностей ---

    def _on_square(self, msg: Message) -> Message:
        n = self.pk.n
        replies = []
        for ct in payloads_to_ciphertexts(msg.payloads, self.pk):
            y = self.csp._decrypt('square', ct)
            replies.append(encrypt(self.pk, y * y % n, self.rng))
        return Message(MessageKind.SQUARE_REPLY, ciphertexts_to_payloads(replies))

    # --- KernelValue: значения ядра от замаскированных расстояний ---

    def _on_kernel(self, msg: Message) -> Message:
        self.kernel_values = []
        for ct in payloads_to_ciphertexts(msg.payloads, self.pk):
            masked = self.csp._decrypt('kernel', ct)
            self.kernel_values.append(masked_kernel(masked, self.csp.params))
        vanished = sum(1 for g in self.kernel_values if g == 0)
        if vanished:
            logger.warning(f"⚠️ CSP: у {vanished} кортежей значение ядра обнулилось")
        return Message(MessageKind.KERNEL_ACK, [int_payload(len(self.kernel_values))])

    # --- Classify: w_i = v_i^G_i ---

    def _on_class_masked(self, msg: Message) -> Message:
        c = self.csp.params.c
        cts = payloads_to_ciphertexts(msg.payloads, self.pk)
        if len(cts) != c * len(self.kernel_values):
            raise ProtocolError(
                f"CLASS_MASKED: {len(cts)} шифртекстов на {len(self.kernel_values)} значений ядра"
            )
        scaled = []
        for i, g in enumerate(self.kernel_values):
            for ct in cts[i * c:(i + 1) * c]:
                # перерандомизация, чтобы DH не видел чистую степень своего шифртекста
                scaled.append(hom_add(hom_scale(ct, g), encrypt(self.pk, 0, self.rng)))
        return Message(MessageKind.CLASS_SCALED, ciphertexts_to_payloads(scaled))

    # --- Classify: garbled circuit и OT ---

    def _on_garbled_circuit(self, msg: Message) -> Message:
        if len(msg) < 3:
            raise WireFormatError("GARBLED_CIRCUIT: нет заголовка")
        c, width, free_xor = (payload_int(p) for p in msg.payloads[:3])
        if c != self.csp.params.c:
            raise ProtocolError(f"Схема на {c} классов, ожидалось {self.csp.params.c}")
        circuit = self.csp.circuit(c, width)
        body = msg.payloads[3:]
        n_gen = len(circuit.generator_inputs)
        if len(body) < c + n_gen:
            raise WireFormatError("GARBLED_CIRCUIT: обрезанное сообщение")

        choice_bits = []
        for ct in payloads_to_ciphertexts(body[:c], self.pk):
            value = self.csp._decrypt('gc', ct)
            if value >= (1 << width):
                raise ProtocolError("Замаскированная сумма не помещается в ширину схемы")
            choice_bits.extend(int_to_bits(value, width))

        self._generator_labels = [WireLabel.from_bytes(b) for b in body[c:c + n_gen]]
        self._gc = GarbledCircuit.from_table_blobs(circuit, body[c + n_gen:], bool(free_xor))
        self._ot = OtExtensionReceiver(choice_bits, self.rng.spawn('ot-ext'), self.csp.ot_security)
        return Message(MessageKind.OT_BASE_INIT, [self._ot.base_init()])

    def _on_base_choice(self, msg: Message) -> Message:
        if self._ot is None:
            raise ProtocolError("OT_BASE_CHOICE до GARBLED_CIRCUIT")
        encrypted, u_cols = self._ot.base_payloads(list(msg.payloads))
        payloads = [int_payload(len(encrypted))]
        payloads += [e for pair in encrypted for e in pair]
        payloads += u_cols
        return Message(MessageKind.OT_BASE_PAYLOADS, payloads)

    def _on_ext_payloads(self, msg: Message) -> Message:
        if self._ot is None or self._gc is None:
            raise ProtocolError("OT_EXT_PAYLOADS до GARBLED_CIRCUIT")
        if len(msg) % 2:
            raise WireFormatError("OT_EXT_PAYLOADS: нечетное число элементов")
        pairs = [(msg.payloads[i], msg.payloads[i + 1]) for i in range(0, len(msg), 2)]
        labels = [WireLabel.from_bytes(b) for b in self._ot.receive(pairs)]
        outputs = evaluate(self._gc, self._generator_labels, labels)
        self._gc, self._ot, self._generator_labels = None, None, []
        return Message(MessageKind.GARBLED_OUTPUT, [label.to_bytes() for label in outputs])
