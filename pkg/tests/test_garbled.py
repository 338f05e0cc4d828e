import itertools
import random

import numpy as np
import pytest

from src.garbled.circuit import (
    BooleanCircuit, CircuitBuilder, Gate, GateKind, argmax_inputs, argmax_reference,
    bits_to_int, build_argmax_circuit, index_bits, int_to_bits,
)
from src.garbled.garbler import GarbledCircuit, WireLabel, decode_output, evaluate, garble
from src.utils.errors import GarbledCircuitError, GarbledEvaluationError
from src.utils.rng import RandomSource


def _run_garbled(c, width, ins, mus, free_xor, seed=1):
    circuit = build_argmax_circuit(c, width)
    gc, secrets = garble(circuit, RandomSource(seed), free_xor=free_xor)
    gen_bits, eval_bits = argmax_inputs(ins, mus, width)
    gen_labels = secrets.generator_labels(circuit, gen_bits)
    eval_labels = [pair[b] for pair, b in zip(secrets.evaluator_label_pairs(circuit), eval_bits)]
    out = evaluate(gc.for_evaluator(), gen_labels, eval_labels)
    return bits_to_int(decode_output(gc, out))


def test_bit_helpers():
    assert int_to_bits(6, 4) == [0, 1, 1, 0]
    assert bits_to_int([0, 1, 1, 0]) == 6
    assert index_bits(2) == 1
    assert index_bits(3) == 2
    assert index_bits(10) == 4
    with pytest.raises(ValueError):
        int_to_bits(16, 4)


def test_circuit_rejects_unwritten_wire():
    with pytest.raises(GarbledCircuitError):
        BooleanCircuit(n_wires=3, gates=[Gate(GateKind.AND, (0, 2), 1)],
                       generator_inputs=[0], evaluator_inputs=[], outputs=[1])


def test_builder_less_than():
    b = CircuitBuilder("lt")
    x = b.generator_input(4)
    y = b.evaluator_input(4)
    circuit = b.build([b.less_than(x, y)])
    for a in range(16):
        for v in range(16):
            assert circuit.evaluate(int_to_bits(a, 4), int_to_bits(v, 4)) == [int(a < v)]


def test_argmax_requires_two_classes():
    with pytest.raises(GarbledCircuitError):
        build_argmax_circuit(1, 8)


@pytest.mark.parametrize("c", [2, 3, 4, 5])
def test_plain_argmax_matches_reference(c):
    width = 8
    circuit = build_argmax_circuit(c, width)
    gen = random.Random(c)
    for _ in range(100):
        ins = [gen.randrange(1 << width) for _ in range(c)]
        mus = [gen.randrange(1 << width) for _ in range(c)]
        gen_bits, eval_bits = argmax_inputs(ins, mus, width)
        assert bits_to_int(circuit.evaluate(gen_bits, eval_bits)) == argmax_reference(ins, mus, width)


def test_ties_pick_smallest_index():
    circuit = build_argmax_circuit(3, 6)
    gen_bits, eval_bits = argmax_inputs([9, 12, 12], [0, 3, 3], 6)
    assert bits_to_int(circuit.evaluate(gen_bits, eval_bits)) == 0


def _exhaustive_check(c, width, seed):
    """Все наборы in_k при случайных масках; для width <= 2 - все пары (in, mu)"""
    circuit = build_argmax_circuit(c, width)
    gen = random.Random(seed)
    values = range(1 << width)
    rows = []
    for ins in itertools.product(values, repeat=c):
        if width <= 2:
            mu_sets = list(itertools.product(values, repeat=c))
        else:
            mu_sets = [[gen.randrange(1 << width) for _ in range(c)]]
        rows.extend((list(ins), list(mus)) for mus in mu_sets)
    gen_rows, eval_rows = zip(*(argmax_inputs(ins, mus, width) for ins, mus in rows))
    out = circuit.evaluate_batch(np.array(gen_rows), np.array(eval_rows))
    got = [bits_to_int(row) for row in out]
    assert got == [argmax_reference(ins, mus, width) for ins, mus in rows]


@pytest.mark.parametrize("width", range(1, 7))
def test_argmax_exhaustive_two_classes(width):
    _exhaustive_check(2, width, seed=width)


@pytest.mark.parametrize("width", range(1, 5))
def test_argmax_exhaustive_three_classes(width):
    _exhaustive_check(3, width, seed=10 + width)


@pytest.mark.parametrize("free_xor", [True, False])
def test_garbled_argmax_exhaustive_small(free_xor):
    width, c = 2, 2
    values = range(1 << width)
    for trial, (ins, mus) in enumerate(itertools.product(itertools.product(values, repeat=c),
                                                         itertools.product(values, repeat=c))):
        assert _run_garbled(c, width, ins, mus, free_xor, seed=trial) == argmax_reference(ins, mus, width)


@pytest.mark.parametrize("free_xor", [True, False])
def test_garbled_argmax_wide_inputs(free_xor):
    c, width = 4, 64
    gen = random.Random(64)
    for trial in range(8):
        ins = [gen.randrange(1 << width) for _ in range(c)]
        mus = [gen.randrange(1 << width) for _ in range(c)]
        assert _run_garbled(c, width, ins, mus, free_xor, seed=trial) == argmax_reference(ins, mus, width)


@pytest.mark.parametrize("free_xor", [True, False])
@pytest.mark.parametrize("u,expected", [
    ([7, 7], 0),
    ([3, 3, 3], 0),
    ([1, 9, 9], 1),
    ([5, 9, 9, 3], 1),
    ([1, 2, 7, 7], 2),
    ([4, 4, 4, 4], 0),
    ([0, 0, 0, 6], 3),
])
def test_garbled_ties_pick_smallest_index(u, expected, free_xor):
    width = 8
    gen = random.Random(len(u) * 31 + expected)
    mus = [gen.randrange(1 << width) for _ in u]
    ins = [(v + mu) % (1 << width) for v, mu in zip(u, mus)]
    assert argmax_reference(ins, mus, width) == expected
    assert _run_garbled(len(u), width, ins, mus, free_xor, seed=expected) == expected


def test_evaluate_batch_agrees():
    width, c = 6, 3
    circuit = build_argmax_circuit(c, width)
    gen = random.Random(7)
    rows_gen, rows_eval, expected = [], [], []
    for _ in range(64):
        ins = [gen.randrange(1 << width) for _ in range(c)]
        mus = [gen.randrange(1 << width) for _ in range(c)]
        g, e = argmax_inputs(ins, mus, width)
        rows_gen.append(g)
        rows_eval.append(e)
        expected.append(circuit.evaluate(g, e))
    batch = circuit.evaluate_batch(np.array(rows_gen), np.array(rows_eval))
    assert batch.astype(int).tolist() == expected


@pytest.mark.parametrize("free_xor", [True, False])
@pytest.mark.parametrize("c", [2, 3, 4])
def test_garbled_argmax_matches_reference(c, free_xor):
    width = 10
    gen = random.Random(100 + c)
    for trial in range(20):
        ins = [gen.randrange(1 << width) for _ in range(c)]
        mus = [gen.randrange(1 << width) for _ in range(c)]
        got = _run_garbled(c, width, ins, mus, free_xor, seed=trial)
        assert got == argmax_reference(ins, mus, width)


def test_free_xor_needs_fewer_tables():
    circuit = build_argmax_circuit(3, 8)
    with_free, _ = garble(circuit, RandomSource(1), free_xor=True)
    without, _ = garble(circuit, RandomSource(1), free_xor=False)
    assert len(with_free.tables) == circuit.and_count
    assert len(without.tables) > len(with_free.tables)


def test_tables_survive_transfer():
    circuit = build_argmax_circuit(2, 8)
    gc, secrets = garble(circuit, RandomSource(3))
    received = GarbledCircuit.from_table_blobs(circuit, gc.table_blobs(), free_xor=True)
    assert received.decode_map == []
    gen_bits, eval_bits = argmax_inputs([200, 10], [5, 5], 8)
    out = evaluate(received,
                   secrets.generator_labels(circuit, gen_bits),
                   [p[b] for p, b in zip(secrets.evaluator_label_pairs(circuit), eval_bits)])
    assert bits_to_int(decode_output(gc, out)) == 0
    with pytest.raises(GarbledCircuitError):
        GarbledCircuit.from_table_blobs(circuit, gc.table_blobs()[:-1], free_xor=True)


def test_foreign_output_label_rejected():
    circuit = build_argmax_circuit(2, 4)
    gc, _ = garble(circuit, RandomSource(4))
    stranger = WireLabel(bytes([7]) * 16, 1)
    with pytest.raises(GarbledEvaluationError):
        decode_output(gc, [stranger] * len(circuit.outputs))
