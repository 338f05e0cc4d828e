"""
Гарблинг схем: point-and-permute, опциональный Free-XOR, бесплатные NOT.

Метка провода = 16-байтовый ключ + бит перестановки.
Строка таблицы гейта (va, vb):
    SHA-256(ka || pa || kb || pb || gate_id || row)[:25] XOR (метка выхода 17 байт || 8 нулевых байт)
Ненулевой хвост после расшифровки = неверные метки (GarbledEvaluationError).
"""
import hashlib
import struct
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from src.garbled.circuit import BooleanCircuit, GateKind
from src.utils.errors import GarbledCircuitError, GarbledEvaluationError
from src.utils.rng import RandomSource

KEY_BYTES = 16
LABEL_BYTES = KEY_BYTES + 1
TAG_BYTES = 8
ROW_BYTES = LABEL_BYTES + TAG_BYTES
_ZERO_TAG = bytes(TAG_BYTES)


@dataclass(frozen=True)
class WireLabel:
    key: bytes
    pbit: int

    def __post_init__(self):
        if len(self.key) != KEY_BYTES or self.pbit not in (0, 1):
            raise GarbledCircuitError("Некорректная метка провода")

    def to_bytes(self) -> bytes:
        return self.key + bytes([self.pbit])

    @classmethod
    def from_bytes(cls, data: bytes) -> "WireLabel":
        if len(data) != LABEL_BYTES or data[-1] > 1:
            raise GarbledEvaluationError("Метка провода повреждена")
        return cls(bytes(data[:KEY_BYTES]), data[-1])

    def __xor__(self, other: "WireLabel") -> "WireLabel":
        return WireLabel(bytes(a ^ b for a, b in zip(self.key, other.key)), self.pbit ^ other.pbit)

    def __repr__(self):
        return f"WireLabel({self.key.hex()[:8]}..,p={self.pbit})"


def _row_pad(la: WireLabel, lb: Optional[WireLabel], gate_id: int, row: int) -> bytes:
    h = hashlib.sha256()
    h.update(la.to_bytes())
    if lb is not None:
        h.update(lb.to_bytes())
    h.update(struct.pack('>IB', gate_id, row))
    return h.digest()[:ROW_BYTES]


def _xor_bytes(a: bytes, b: bytes) -> bytes:
    return bytes(x ^ y for x, y in zip(a, b))


def _label_digest(label: WireLabel) -> bytes:
    return hashlib.sha256(b'out' + label.to_bytes()).digest()


@dataclass
class GarbledCircuit:
    """
    Таблицы гейтов (4 переставленные строки на каждый гейт, требующий таблицы),
    топология и карта декодирования выходов (хэши выходных меток).
    """
    circuit: BooleanCircuit
    tables: Dict[int, List[bytes]]
    free_xor: bool
    decode_map: List[Tuple[bytes, bytes]] = field(default_factory=list)

    def table_blobs(self) -> List[bytes]:
        """Строки таблиц в порядке гейтов (формат передачи)"""
        return [row for gate_id in sorted(self.tables) for row in self.tables[gate_id]]

    @staticmethod
    def garbled_gate_ids(circuit: BooleanCircuit, free_xor: bool) -> List[int]:
        kinds = (GateKind.AND,) if free_xor else (GateKind.AND, GateKind.XOR)
        return [i for i, g in enumerate(circuit.gates) if g.kind in kinds]

    @classmethod
    def from_table_blobs(cls, circuit: BooleanCircuit, blobs: Sequence[bytes],
                         free_xor: bool) -> "GarbledCircuit":
        gate_ids = cls.garbled_gate_ids(circuit, free_xor)
        if len(blobs) != 4 * len(gate_ids):
            raise GarbledCircuitError(f"Получено {len(blobs)} строк, ожидалось {4 * len(gate_ids)}")
        if any(len(b) != ROW_BYTES for b in blobs):
            raise GarbledCircuitError("Строка таблицы неверной длины")
        tables = {gid: list(blobs[4 * i:4 * i + 4]) for i, gid in enumerate(gate_ids)}
        return cls(circuit=circuit, tables=tables, free_xor=free_xor)

    def for_evaluator(self) -> "GarbledCircuit":
        """Копия без карты декодирования"""
        return GarbledCircuit(self.circuit, self.tables, self.free_xor)


@dataclass
class GarblerSecrets:
    """Обе метки каждого провода. Остаются у генератора"""
    labels: Dict[int, Tuple[WireLabel, WireLabel]]

    def generator_labels(self, circuit: BooleanCircuit, bits: Sequence[int]) -> List[WireLabel]:
        if len(bits) != len(circuit.generator_inputs):
            raise GarbledCircuitError("Число битов генератора не совпадает со схемой")
        return [self.labels[w][int(b) & 1] for w, b in zip(circuit.generator_inputs, bits)]

    def evaluator_label_pairs(self, circuit: BooleanCircuit) -> List[Tuple[WireLabel, WireLabel]]:
        """Пары меток для oblivious transfer входов вычислителя"""
        return [self.labels[w] for w in circuit.evaluator_inputs]

    def output_pairs(self, circuit: BooleanCircuit) -> List[Tuple[WireLabel, WireLabel]]:
        return [self.labels[w] for w in circuit.outputs]


def _random_label(rng: RandomSource, pbit: Optional[int] = None) -> WireLabel:
    return WireLabel(rng.token_bytes(KEY_BYTES), rng.randbit() if pbit is None else pbit)


def garble(circuit: BooleanCircuit, rng: RandomSource,
           free_xor: bool = True) -> Tuple[GarbledCircuit, GarblerSecrets]:
    delta = _random_label(rng, pbit=1) if free_xor else None

    def fresh_pair() -> Tuple[WireLabel, WireLabel]:
        zero = _random_label(rng)
        if delta is not None:
            return zero, zero ^ delta
        one = _random_label(rng, pbit=zero.pbit ^ 1)
        return zero, one

    labels: Dict[int, Tuple[WireLabel, WireLabel]] = {}
    for w in circuit.generator_inputs + circuit.evaluator_inputs:
        labels[w] = fresh_pair()

    tables: Dict[int, List[bytes]] = {}
    for gate_id, gate in enumerate(circuit.gates):
        if gate.kind is GateKind.NOT:
            zero, one = labels[gate.inputs[0]]
            labels[gate.output] = (one, zero)
            continue
        a, b = (labels[w] for w in gate.inputs)
        if gate.kind is GateKind.XOR and free_xor:
            labels[gate.output] = (a[0] ^ b[0], a[0] ^ b[0] ^ delta)
            continue

        out = fresh_pair()
        labels[gate.output] = out
        rows: List[Optional[bytes]] = [None] * 4
        for va in (0, 1):
            for vb in (0, 1):
                la, lb = a[va], b[vb]
                row = 2 * la.pbit + lb.pbit
                v = (va & vb) if gate.kind is GateKind.AND else (va ^ vb)
                plain = out[v].to_bytes() + _ZERO_TAG
                rows[row] = _xor_bytes(_row_pad(la, lb, gate_id, row), plain)
        tables[gate_id] = rows

    for w, (zero, one) in labels.items():
        if zero == one:
            raise GarbledCircuitError(f"Метки провода {w} совпали")

    decode_map = [(_label_digest(labels[w][0]), _label_digest(labels[w][1])) for w in circuit.outputs]
    gc = GarbledCircuit(circuit=circuit, tables=tables, free_xor=free_xor, decode_map=decode_map)
    return gc, GarblerSecrets(labels=labels)


def evaluate(gc: GarbledCircuit, generator_labels: Sequence[WireLabel],
             evaluator_labels: Sequence[WireLabel]) -> List[WireLabel]:
    """Вычисление гарблированной схемы; возвращает метки выходных проводов"""
    circuit = gc.circuit
    if len(generator_labels) != len(circuit.generator_inputs) or \
            len(evaluator_labels) != len(circuit.evaluator_inputs):
        raise GarbledEvaluationError("Число входных меток не совпадает со схемой")

    active: Dict[int, WireLabel] = {}
    for w, label in zip(circuit.generator_inputs, generator_labels):
        active[w] = label
    for w, label in zip(circuit.evaluator_inputs, evaluator_labels):
        active[w] = label

    for gate_id, gate in enumerate(circuit.gates):
        if gate.kind is GateKind.NOT:
            active[gate.output] = active[gate.inputs[0]]
            continue
        la, lb = active[gate.inputs[0]], active[gate.inputs[1]]
        if gate.kind is GateKind.XOR and gc.free_xor:
            active[gate.output] = la ^ lb
            continue
        table = gc.tables.get(gate_id)
        if table is None:
            raise GarbledEvaluationError(f"Нет таблицы для гейта {gate_id}")
        row = 2 * la.pbit + lb.pbit
        plain = _xor_bytes(_row_pad(la, lb, gate_id, row), table[row])
        if plain[LABEL_BYTES:] != _ZERO_TAG:
            raise GarbledEvaluationError(f"Гейт {gate_id}: строка не расшифровалась (неверные метки)")
        active[gate.output] = WireLabel.from_bytes(plain[:LABEL_BYTES])

    return [active[w] for w in circuit.outputs]


def decode_output(gc: GarbledCircuit, labels: Sequence[WireLabel]) -> List[int]:
    """Перевод выходных меток в биты по карте декодирования (сторона генератора)"""
    if not gc.decode_map:
        raise GarbledCircuitError("Карта декодирования отсутствует")
    if len(labels) != len(gc.decode_map):
        raise GarbledEvaluationError("Число выходных меток не совпадает со схемой")
    bits = []
    for label, (h0, h1) in zip(labels, gc.decode_map):
        digest = _label_digest(label)
        if digest == h0:
            bits.append(0)
        elif digest == h1:
            bits.append(1)
        else:
            raise GarbledEvaluationError("Выходная метка не принадлежит схеме")
    return bits
