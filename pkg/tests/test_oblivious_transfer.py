import numpy as np
import pytest
from scipy import stats

from src.garbled.oblivious_transfer import (
    OtReceiver, OtSender, TrustedExchangeOT, extended_transfer, ot_transfer,
)
from src.utils.errors import ObliviousTransferError
from src.utils.rng import RandomSource


@pytest.mark.parametrize("b", [0, 1])
def test_single_transfer_returns_chosen_message(b):
    m0, m1 = b'zero-message-xxx', b'one--message-yyy'
    got, session = ot_transfer(m0, m1, b, RandomSource('s'), RandomSource('r'))
    assert got == (m0, m1)[b]
    # отправитель видит ровно одно сообщение получателя - элемент группы
    view = session.sender_view()
    assert len(view) == 1 and len(view[0]) == 256


def test_length_mismatch_rejected():
    with pytest.raises(ObliviousTransferError):
        ot_transfer(b'a', b'bb', 0)


def test_invalid_choice_bit():
    with pytest.raises(ObliviousTransferError):
        OtReceiver([2])


def test_batched_base_ot():
    pairs = [(bytes([i]) * 17, bytes([i + 100]) * 17) for i in range(8)]
    choices = [0, 1, 1, 0, 1, 0, 0, 1]
    sender = OtSender(RandomSource(1))
    receiver = OtReceiver(choices, RandomSource(2))
    encrypted = sender.payloads(receiver.choose(sender.init_message()), pairs)
    assert receiver.receive(encrypted) == [p[b] for p, b in zip(pairs, choices)]


def test_receiver_message_independent_of_choice():
    """Младшие байты сообщения получателя равномерны при любом бите выбора"""
    samples = {0: [], 1: []}
    for i in range(160):
        b = i % 2
        _, session = ot_transfer(b'\x00' * 4, b'\xff' * 4, b,
                                 RandomSource(f's{i}'), RandomSource(f'r{i}'))
        samples[b].append(session.sender_view()[0][-1] & 0x0F)
    table = np.array([np.bincount(samples[b], minlength=16) for b in (0, 1)])
    table = table[:, table.sum(axis=0) > 0]
    _, p_value, _, _ = stats.chi2_contingency(table)
    assert p_value > 1e-4


def test_extended_transfer_many_pairs():
    rng = RandomSource(9)
    n = 300
    pairs = [(rng.token_bytes(17), rng.token_bytes(17)) for _ in range(n)]
    choices = [rng.randbit() for _ in range(n)]
    got = extended_transfer(pairs, choices, RandomSource('snd'), RandomSource('rcv'))
    assert got == [p[b] for p, b in zip(pairs, choices)]


def test_extended_transfer_non_multiple_of_eight():
    pairs = [(b'A' * 5, b'B' * 5)] * 13
    choices = [1, 0] * 6 + [1]
    got = extended_transfer(pairs, choices, RandomSource(1), RandomSource(2))
    assert got == [b'B' * 5 if c else b'A' * 5 for c in choices]


def test_trusted_exchange_stub():
    ot = TrustedExchangeOT()
    assert ot.transfer([(b'a', b'b'), (b'c', b'd')], [1, 0]) == [b'b', b'c']
    with pytest.raises(ObliviousTransferError):
        ot.transfer([(b'a', b'b')], [0, 1])
