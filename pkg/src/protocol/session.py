"""
Сквозной прогон протокола: владельцы данных -> DataHost <-> CSP -> запрашивающий.
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from config.settings import Config
from src.classifier.dataset import Dataset
from src.crypto.fixedpoint import FixedPointParams
from src.crypto.paillier import PublicKey, SecretKey, keygen
from src.protocol.algorithms import classify
from src.protocol.messages import Message, MessageKind, int_payload
from src.protocol.parties import CryptoServiceProvider, DataHost, DataOwner, Querier
from src.protocol.transcript import DATA_HOST, DATA_OWNER, QUERIER, Transcript
from src.protocol.transport import Channel, CspServer, InProcessChannel, TcpChannel
from src.utils.errors import ProtocolError
from src.utils.logger import logger
from src.utils.rng import RandomSource, SeedLike


@dataclass
class SessionConfig:
    dataset: Optional[Dataset] = None
    query: Optional[Sequence[float]] = None
    params: Optional[FixedPointParams] = None
    key_bits: Optional[int] = None
    seed: SeedLike = None
    transport: Optional[str] = None
    keys: Optional[Tuple[PublicKey, SecretKey]] = None
    free_xor: bool = True
    owners: int = 1
    audit: bool = False
    sigma: Optional[float] = None
    ot_security: Optional[int] = None


class ProtocolSession:
    """Все четыре стороны и канал DH -> CSP в одном объекте"""

    def __init__(self, config: SessionConfig, m: Optional[int] = None, c: Optional[int] = None):
        self.config = config
        self.rng = RandomSource(config.seed)
        self.transcript = Transcript()

        if config.keys is not None:
            self.pk, sk = config.keys
        else:
            self.pk, sk = keygen(config.key_bits, rng=self.rng.spawn('keygen'))

        self.params = config.params or self._default_params(config, m, c)
        self.params.check_modulus(self.pk.n)
        ot_security = config.ot_security or Config.PROTOCOL_CONFIG['ot_security_bits']
        self.ot_security = ot_security

        self.data_host = DataHost(self.pk, self.params, self.rng.spawn('data-host'), retain_masks=config.audit)
        self.csp = CryptoServiceProvider(self.pk, sk, self.params, self.rng.spawn('csp'),
                                         ot_security=ot_security, audit=config.audit)
        self.querier = Querier(self.pk, self.params, self.rng.spawn('querier'))
        self.owners: List[DataOwner] = [
            DataOwner(f"owner-{i}", self.pk, self.params, self.rng.spawn(f'owner-{i}'))
            for i in range(max(1, config.owners))
        ]

        self._server: Optional[CspServer] = None
        self.channel = self._open_channel(config.transport or Config.PROTOCOL_CONFIG['transport'])

    def _default_params(self, config: SessionConfig, m: Optional[int], c: Optional[int]) -> FixedPointParams:
        if config.dataset is not None:
            m, c = config.dataset.m, config.dataset.c
        if m is None or c is None:
            raise ProtocolError("Нужны params либо набор данных для определения m и c")
        overrides = {} if config.sigma is None else {'sigma': config.sigma}
        return FixedPointParams.for_key(self.pk.key_bits, m, c, **overrides)

    def _open_channel(self, transport: str) -> Channel:
        if transport == 'inprocess':
            return InProcessChannel(self.csp, self.transcript)
        if transport == 'tcp':
            self._server = CspServer(self.csp).start()
            host, port = self._server.address
            return TcpChannel(host, port, self.transcript)
        raise ProtocolError(f"Неизвестный транспорт: {transport}")

    # --- Этапы ---

    def outsource(self, dataset: Dataset) -> int:
        """Загрузка набора данных; кортежи распределяются между владельцами по кругу"""
        if dataset.m != self.params.m or dataset.c != self.params.c:
            raise ProtocolError("Размерности набора данных не совпадают с параметрами")
        for i, t in enumerate(dataset.tuples):
            owner = self.owners[i % len(self.owners)]
            data = owner.submit_tuple(t).to_message().encode()
            self.transcript.record(DATA_OWNER, DATA_HOST, data)
            self.data_host.receive(Message.decode(data))
        logger.info(f"📤 Загружено {len(dataset)} кортежей от {len(self.owners)} владельцев")
        return len(self.data_host.store)

    def query(self, q: Sequence[float]) -> int:
        data = self.querier.query_message(q).encode()
        self.transcript.record(QUERIER, DATA_HOST, data)
        enc_query = self.data_host.receive(Message.decode(data))

        label = classify(self.data_host, self.channel, enc_query, self.data_host.store, self.params,
                         free_xor=self.config.free_xor, ot_security=self.ot_security)

        result = Message(MessageKind.RESULT, [int_payload(label)]).encode()
        self.transcript.record(DATA_HOST, QUERIER, result)
        return self.querier.receive(Message.decode(result))

    def remove_owner(self, owner_id: str) -> int:
        return self.data_host.remove_owner(owner_id)

    def close(self):
        self.channel.close()
        if self._server is not None:
            self._server.stop()
            self._server = None

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.close()


def run_session(config: SessionConfig) -> Tuple[int, Transcript]:
    """Загрузка config.dataset и один запрос config.query"""
    if config.dataset is None or config.query is None:
        raise ProtocolError("Для прогона нужны dataset и query")
    with ProtocolSession(config) as session:
        session.outsource(config.dataset)
        label = session.query(config.query)
    return label, session.transcript
