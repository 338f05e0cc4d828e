"""
Протокол со стороны DataHost: квадраты расстояний, значения ядра, классификация.

Аргумент csp - канал к CSP (см. transport.Channel): request(Message) -> Message.
DataHost хранит все маски у себя и никогда ничего не расшифровывает.
"""
import time
from typing import List, Optional, Sequence, Tuple

from config.settings import Config
from src.classifier.dataset import DataTuple
from src.crypto.fixedpoint import FixedPointParams, correction_factor
from src.crypto.paillier import Ciphertext, PublicKey, encrypt, hom_add, hom_neg, hom_scale, hom_sum
from src.garbled.circuit import bits_to_int, build_argmax_circuit, int_to_bits
from src.garbled.garbler import decode_output, garble, WireLabel
from src.garbled.oblivious_transfer import OtExtensionSender
from src.protocol.matrix import hom_matvec, random_invertible_matrix
from src.protocol.messages import (
    Message, MessageKind, ciphertexts_to_payloads, expect, int_payload, payload_int,
    payloads_to_ciphertexts,
)
from src.protocol.parties import DataHost, DataOwner, EncryptedTuple, MaskRecord
from src.utils.errors import DimensionMismatchError, KeyMismatchError, ProtocolError, WireFormatError
from src.utils.logger import logger

CiphertextPair = Tuple[Sequence[Ciphertext], Sequence[Ciphertext]]


def submit_tuple(owner: DataOwner, t: DataTuple, pk: Optional[PublicKey] = None) -> EncryptedTuple:
    return owner.submit_tuple(t, pk)


def _check_pair(pk: PublicKey, ea: Sequence[Ciphertext], eb: Sequence[Ciphertext]):
    if len(ea) != len(eb):
        raise DimensionMismatchError(f"Векторы разной размерности: {len(ea)} и {len(eb)}")
    for ct in list(ea) + list(eb):
        if ct.public_key.n != pk.n:
            raise KeyMismatchError("Шифртекст под чужим ключом")


# --- SquaredDist ---

def squared_dists(dh: DataHost, csp, pairs: Sequence[CiphertextPair]) -> List[Ciphertext]:
    """
    E(||a - b||^2) для пакета пар одним обменом SQUARE_REQ/SQUARE_REPLY.
    Маски mu_j равномерны на всем Z_n.
    """
    pk, n = dh.pk, dh.pk.n
    diffs, masks, requests = [], [], []
    for ea, eb in pairs:
        _check_pair(pk, ea, eb)
        row_diffs, row_masks = [], []
        for a, b in zip(ea, eb):
            x = hom_add(a, hom_neg(b))
            mu = dh.rng.randbelow(n)
            requests.append(hom_add(x, encrypt(pk, mu, dh.rng)))
            row_diffs.append(x)
            row_masks.append(mu)
        diffs.append(row_diffs)
        masks.append(row_masks)
    if not requests:
        return [encrypt(pk, 0, dh.rng) for _ in pairs]

    reply = expect(csp.request(Message(MessageKind.SQUARE_REQ, ciphertexts_to_payloads(requests))),
                   MessageKind.SQUARE_REPLY, len(requests))
    squares = payloads_to_ciphertexts(reply.payloads, pk)

    if dh.retain_masks and dh.mask_record is not None:
        dh.mask_record.square_masks.extend(masks)

    results, pos = [], 0
    for row_diffs, row_masks in zip(diffs, masks):
        terms = []
        for x, mu in zip(row_diffs, row_masks):
            # (x + mu)^2 - 2 mu x - mu^2 = x^2
            w = squares[pos]
            pos += 1
            z = hom_add(hom_add(w, hom_scale(x, -2 * mu)), encrypt(pk, (-mu * mu) % n, dh.rng))
            terms.append(z)
        results.append(hom_sum(terms) if terms else encrypt(pk, 0, dh.rng))
    return results


def squared_dist(dh: DataHost, csp, ea: Sequence[Ciphertext], eb: Sequence[Ciphertext]) -> Ciphertext:
    return squared_dists(dh, csp, [(ea, eb)])[0]


# --- KernelValue ---

def kernel_values(dh: DataHost, csp, query: Sequence[Ciphertext],
                  store: Sequence[EncryptedTuple], params: FixedPointParams) -> MaskRecord:
    """
    CSP получает d_i^2 + mu_i (mu_i из [0, B)) и хранит G_i у себя в сессии.
    Возвращает маски DataHost.
    """
    if not store:
        raise ProtocolError("Хранилище пусто")
    if len(query) != params.m:
        raise DimensionMismatchError(f"Запрос размерности {len(query)}, ожидалось {params.m}")

    record = MaskRecord()
    dh.mask_record = record
    dists = squared_dists(dh, csp, [(query, et.enc_features) for et in store])

    masked = []
    for s in dists:
        mu = dh.rng.randbelow(params.mask_bound)
        record.kernel_masks.append(mu)
        masked.append(hom_add(s, encrypt(dh.pk, mu, dh.rng)))

    reply = expect(csp.request(Message(MessageKind.KERNEL_REQ, ciphertexts_to_payloads(masked))),
                   MessageKind.KERNEL_ACK, 1)
    if payload_int(reply.payloads[0]) != len(store):
        raise ProtocolError("CSP подтвердил не все значения ядра")
    return record


# --- Classify ---

def _class_sums(dh: DataHost, csp, store: Sequence[EncryptedTuple], record: MaskRecord,
                params: FixedPointParams) -> List[Ciphertext]:
    """E(A_k) = sum_i G_i * corr(mu_i) * [класс_i = k]"""
    pk, c = dh.pk, params.c
    inverses, masked = [], []
    for et in store:
        matrix, inverse = random_invertible_matrix(c, pk.n, dh.rng)
        inverses.append(inverse)
        masked.extend(hom_matvec(matrix, et.enc_class))

    reply = expect(csp.request(Message(MessageKind.CLASS_MASKED, ciphertexts_to_payloads(masked))),
                   MessageKind.CLASS_SCALED, len(masked))
    scaled = payloads_to_ciphertexts(reply.payloads, pk)

    sums: List[Optional[Ciphertext]] = [None] * c
    for i, (inverse, mu) in enumerate(zip(inverses, record.kernel_masks)):
        corr = correction_factor(mu, params)
        unmasked = hom_matvec(inverse, scaled[i * c:(i + 1) * c])
        for k, ct in enumerate(unmasked):
            term = hom_scale(ct, corr)
            sums[k] = term if sums[k] is None else hom_add(sums[k], term)
    return sums


def _garbled_argmax(dh: DataHost, csp, sums: Sequence[Ciphertext], record: MaskRecord,
                    params: FixedPointParams, free_xor: bool, ot_security: int) -> int:
    """Маскирование сумм, garbled circuit argmax, OT и декодирование"""
    pk, c = dh.pk, params.c
    width = params.gc_width
    gc_masks = [dh.rng.randbits(params.gc_mask_bits) for _ in range(c)]
    record.gc_masks = gc_masks
    masked_sums = [hom_add(s, encrypt(pk, mu, dh.rng)) for s, mu in zip(sums, gc_masks)]

    circuit = build_argmax_circuit(c, width)
    gc, secrets = garble(circuit, dh.rng.spawn('garble'), free_xor=free_xor)
    gen_bits = [b for mu in gc_masks for b in int_to_bits(mu, width)]
    gen_labels = secrets.generator_labels(circuit, gen_bits)

    payloads = [int_payload(c), int_payload(width), int_payload(int(free_xor))]
    payloads += ciphertexts_to_payloads(masked_sums)
    payloads += [label.to_bytes() for label in gen_labels]
    payloads += gc.table_blobs()
    init = expect(csp.request(Message(MessageKind.GARBLED_CIRCUIT, payloads)), MessageKind.OT_BASE_INIT, 1)

    pairs = [(l0.to_bytes(), l1.to_bytes()) for l0, l1 in secrets.evaluator_label_pairs(circuit)]
    sender = OtExtensionSender(len(pairs), dh.rng.spawn('ot-ext'), ot_security)
    choice = Message(MessageKind.OT_BASE_CHOICE, sender.base_choose(init.payloads[0]))
    base = expect(csp.request(choice), MessageKind.OT_BASE_PAYLOADS)
    kappa = payload_int(base.payloads[0]) if len(base) else -1
    if kappa != ot_security or len(base) != 1 + 3 * kappa:
        raise WireFormatError("OT_BASE_PAYLOADS: неверный размер")
    flat = base.payloads[1:1 + 2 * kappa]
    encrypted_seeds = [(flat[i], flat[i + 1]) for i in range(0, len(flat), 2)]
    u_cols = list(base.payloads[1 + 2 * kappa:])

    masked_pairs = sender.extend(encrypted_seeds, u_cols, pairs)
    ext = Message(MessageKind.OT_EXT_PAYLOADS, [y for pair in masked_pairs for y in pair])
    output = expect(csp.request(ext), MessageKind.GARBLED_OUTPUT, len(circuit.outputs))

    bits = decode_output(gc, [WireLabel.from_bytes(b) for b in output.payloads])
    index = bits_to_int(bits)
    if index >= c:
        raise ProtocolError(f"Схема вернула индекс {index} при c={c}")
    return index


def classify(dh: DataHost, csp, query: Sequence[Ciphertext], store: Sequence[EncryptedTuple],
             params: FixedPointParams, free_xor: bool = True,
             ot_security: Optional[int] = None) -> int:
    """Предсказание класса для зашифрованного запроса. Индекс класса узнает DataHost"""
    if params.c < 2:
        raise ProtocolError("Классификация требует c >= 2")
    params.check_modulus(dh.pk.n)
    ot_security = ot_security or Config.PROTOCOL_CONFIG['ot_security_bits']

    started = time.perf_counter()
    record = kernel_values(dh, csp, query, store, params)
    sums = _class_sums(dh, csp, store, record, params)
    label = _garbled_argmax(dh, csp, sums, record, params, free_xor, ot_security)
    logger.info(f"🎯 Класс {label} ({len(store)} кортежей, {time.perf_counter() - started:.2f} с)")
    return label
