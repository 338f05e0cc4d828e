"""
Булевы схемы: гейты AND / XOR / NOT, построитель с символьными константами
и схема argmax по замаскированным суммам классов.

Все многобитные числа хранятся младшим битом вперед.
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Sequence, Tuple, Union

import numpy as np

from src.utils.errors import GarbledCircuitError


class GateKind(Enum):
    AND = "AND"
    XOR = "XOR"
    NOT = "NOT"


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    inputs: Tuple[int, ...]
    output: int


@dataclass
class BooleanCircuit:
    """
    Провода 0..n_wires-1. Входы генератора и вычислителя - отдельные группы.
    Каждый провод записывается ровно один раз, гейты упорядочены топологически.
    """
    n_wires: int
    gates: List[Gate]
    generator_inputs: List[int]
    evaluator_inputs: List[int]
    outputs: List[int]
    name: str = "circuit"

    def __post_init__(self):
        written = set(self.generator_inputs) | set(self.evaluator_inputs)
        if len(written) != len(self.generator_inputs) + len(self.evaluator_inputs):
            raise GarbledCircuitError("Входные провода повторяются")
        for gate in self.gates:
            if any(w not in written for w in gate.inputs):
                raise GarbledCircuitError(f"Гейт {gate} читает незаписанный провод")
            if gate.output in written:
                raise GarbledCircuitError(f"Провод {gate.output} записан повторно")
            written.add(gate.output)
        if any(w not in written for w in self.outputs):
            raise GarbledCircuitError("Выход схемы не вычисляется")

    @property
    def and_count(self) -> int:
        return sum(1 for g in self.gates if g.kind is GateKind.AND)

    def evaluate(self, gen_bits: Sequence[int], eval_bits: Sequence[int]) -> List[int]:
        """Вычисление на открытых битах"""
        if len(gen_bits) != len(self.generator_inputs) or len(eval_bits) != len(self.evaluator_inputs):
            raise GarbledCircuitError("Число входных битов не совпадает со схемой")
        values = [0] * self.n_wires
        for w, b in zip(self.generator_inputs, gen_bits):
            values[w] = int(b) & 1
        for w, b in zip(self.evaluator_inputs, eval_bits):
            values[w] = int(b) & 1
        for gate in self.gates:
            if gate.kind is GateKind.AND:
                values[gate.output] = values[gate.inputs[0]] & values[gate.inputs[1]]
            elif gate.kind is GateKind.XOR:
                values[gate.output] = values[gate.inputs[0]] ^ values[gate.inputs[1]]
            else:
                values[gate.output] = values[gate.inputs[0]] ^ 1
        return [values[w] for w in self.outputs]

    def evaluate_batch(self, gen_bits: np.ndarray, eval_bits: np.ndarray) -> np.ndarray:
        """Векторное вычисление: (N x n_gen), (N x n_eval) -> (N x n_out)"""
        gen_bits = np.asarray(gen_bits, dtype=bool)
        eval_bits = np.asarray(eval_bits, dtype=bool)
        if gen_bits.shape[0] != eval_bits.shape[0]:
            raise GarbledCircuitError("Пакеты входов разной длины")
        values = np.zeros((self.n_wires, gen_bits.shape[0]), dtype=bool)
        values[self.generator_inputs] = gen_bits.T
        values[self.evaluator_inputs] = eval_bits.T
        for gate in self.gates:
            if gate.kind is GateKind.AND:
                values[gate.output] = values[gate.inputs[0]] & values[gate.inputs[1]]
            elif gate.kind is GateKind.XOR:
                values[gate.output] = values[gate.inputs[0]] ^ values[gate.inputs[1]]
            else:
                values[gate.output] = ~values[gate.inputs[0]]
        return values[self.outputs].T


class Const:
    """Символьная константа построителя"""
    __slots__ = ('value',)

    def __init__(self, value: int):
        self.value = value & 1

    def __repr__(self):
        return f"Const({self.value})"


ZERO, ONE = Const(0), Const(1)
Bit = Union[int, Const]


class CircuitBuilder:
    """
    Построитель схем. Операции с константами упрощаются сразу,
    поэтому мультиплексор с постоянными индексами не порождает лишних гейтов.
    """

    def __init__(self, name: str = "circuit"):
        self.name = name
        self.n_wires = 0
        self.gates: List[Gate] = []
        self.generator_inputs: List[int] = []
        self.evaluator_inputs: List[int] = []

    def _new_wire(self) -> int:
        w = self.n_wires
        self.n_wires += 1
        return w

    def generator_input(self, n: int) -> List[int]:
        wires = [self._new_wire() for _ in range(n)]
        self.generator_inputs.extend(wires)
        return wires

    def evaluator_input(self, n: int) -> List[int]:
        wires = [self._new_wire() for _ in range(n)]
        self.evaluator_inputs.extend(wires)
        return wires

    def _gate(self, kind: GateKind, *inputs: int) -> int:
        out = self._new_wire()
        self.gates.append(Gate(kind, tuple(inputs), out))
        return out

    # --- Базовые вентили ---

    def not_(self, a: Bit) -> Bit:
        if isinstance(a, Const):
            return Const(a.value ^ 1)
        return self._gate(GateKind.NOT, a)

    def xor(self, a: Bit, b: Bit) -> Bit:
        if isinstance(a, Const) and isinstance(b, Const):
            return Const(a.value ^ b.value)
        if isinstance(a, Const):
            a, b = b, a
        if isinstance(b, Const):
            return a if b.value == 0 else self.not_(a)
        return self._gate(GateKind.XOR, a, b)

    def and_(self, a: Bit, b: Bit) -> Bit:
        if isinstance(a, Const) and isinstance(b, Const):
            return Const(a.value & b.value)
        if isinstance(a, Const):
            a, b = b, a
        if isinstance(b, Const):
            return a if b.value == 1 else ZERO
        return self._gate(GateKind.AND, a, b)

    def mux(self, s: Bit, x: Bit, y: Bit) -> Bit:
        """s ? x : y  ==  y ^ (s & (x ^ y))"""
        return self.xor(y, self.and_(s, self.xor(x, y)))

    # --- Арифметика ---

    def subtract(self, a: Sequence[Bit], b: Sequence[Bit]) -> Tuple[List[Bit], Bit]:
        """a - b по модулю 2^L и заем из старшего разряда (1 <=> a < b)"""
        if len(a) != len(b):
            raise GarbledCircuitError("Операнды вычитания разной ширины")
        diff, borrow = [], ZERO
        for ai, bi in zip(a, b):
            a_br = self.xor(ai, borrow)
            diff.append(self.xor(a_br, bi))
            # bout = (~(a ^ br) & (b ^ br)) ^ br
            borrow = self.xor(self.and_(self.not_(a_br), self.xor(bi, borrow)), borrow)
        return diff, borrow

    def less_than(self, a: Sequence[Bit], b: Sequence[Bit]) -> Bit:
        """1, если a < b (беззнаково): только цепочка заемов"""
        borrow = ZERO
        for ai, bi in zip(a, b):
            a_br = self.xor(ai, borrow)
            borrow = self.xor(self.and_(self.not_(a_br), self.xor(bi, borrow)), borrow)
        return borrow

    def mux_word(self, s: Bit, x: Sequence[Bit], y: Sequence[Bit]) -> List[Bit]:
        return [self.mux(s, xi, yi) for xi, yi in zip(x, y)]

    # --- Завершение ---

    def _materialize(self, bit: Bit) -> int:
        if not isinstance(bit, Const):
            return bit
        anchor = (self.generator_inputs + self.evaluator_inputs)[0]
        zero = self._gate(GateKind.XOR, anchor, anchor)
        return zero if bit.value == 0 else self._gate(GateKind.NOT, zero)

    def build(self, outputs: Sequence[Bit]) -> BooleanCircuit:
        wires = [self._materialize(b) for b in outputs]
        return BooleanCircuit(
            n_wires=self.n_wires, gates=list(self.gates),
            generator_inputs=list(self.generator_inputs),
            evaluator_inputs=list(self.evaluator_inputs),
            outputs=wires, name=self.name,
        )


# --- Кодирование чисел ---

def int_to_bits(x: int, width: int) -> List[int]:
    if x < 0 or x >= (1 << width):
        raise ValueError(f"{x} не помещается в {width} бит")
    return [(x >> i) & 1 for i in range(width)]


def bits_to_int(bits: Sequence[int]) -> int:
    return sum(int(b) << i for i, b in enumerate(bits))


def index_bits(c: int) -> int:
    return max(1, math.ceil(math.log2(c)))


# --- Схема argmax ---

def build_argmax_circuit(c: int, width: int) -> BooleanCircuit:
    """
    Вход вычислителя: in_k (c чисел по width бит), вход генератора: mu_k.
    u_k = in_k - mu_k mod 2^width; выход - индекс максимума u_k
    (index_bits(c) бит), при равенстве - наименьший индекс.
    Турнирное дерево: правый кандидат побеждает только при строгом превосходстве.
    """
    if c < 2 or width < 1:
        raise GarbledCircuitError(f"Нужно c >= 2 и width >= 1 (c={c}, width={width})")
    builder = CircuitBuilder(name=f"argmax_c{c}_w{width}")
    ins = [builder.evaluator_input(width) for _ in range(c)]
    mus = [builder.generator_input(width) for _ in range(c)]
    n_idx = index_bits(c)

    candidates = []
    for k in range(c):
        u_k, _ = builder.subtract(ins[k], mus[k])
        idx = [Const(b) for b in int_to_bits(k, n_idx)]
        candidates.append((u_k, idx))

    while len(candidates) > 1:
        next_round = []
        for i in range(0, len(candidates) - 1, 2):
            (left, left_idx), (right, right_idx) = candidates[i], candidates[i + 1]
            right_wins = builder.less_than(left, right)
            next_round.append((builder.mux_word(right_wins, right, left),
                               builder.mux_word(right_wins, right_idx, left_idx)))
        if len(candidates) % 2:
            next_round.append(candidates[-1])
        candidates = next_round

    return builder.build(candidates[0][1])


def argmax_inputs(in_values: Sequence[int], mu_values: Sequence[int], width: int) -> Tuple[List[int], List[int]]:
    """Раскладка чисел в биты (gen_bits, eval_bits) для build_argmax_circuit"""
    eval_bits = [b for v in in_values for b in int_to_bits(v, width)]
    gen_bits = [b for v in mu_values for b in int_to_bits(v, width)]
    return gen_bits, eval_bits


def argmax_reference(in_values: Sequence[int], mu_values: Sequence[int], width: int) -> int:
    """Открытый эталон: argmax (in_k - mu_k) mod 2^width, наименьший индекс при равенстве"""
    u = [(a - m) % (1 << width) for a, m in zip(in_values, mu_values)]
    return u.index(max(u))
