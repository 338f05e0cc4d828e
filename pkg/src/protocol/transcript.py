"""
Журнал сообщений протокола: (отправитель, получатель, тип, байты).
Только добавление; используется аудитом утечек.
"""
import hashlib
import threading
from dataclasses import dataclass
from typing import Iterator, List

import pandas as pd

from src.protocol.messages import Message, MessageKind

DATA_OWNER = "DataOwner"
QUERIER = "Querier"
DATA_HOST = "DataHost"
CSP = "CSP"


@dataclass(frozen=True)
class TranscriptEntry:
    sender: str
    receiver: str
    kind: MessageKind
    payload: bytes

    def message(self) -> Message:
        return Message.decode(self.payload)


class Transcript:
    def __init__(self):
        self._entries: List[TranscriptEntry] = []
        self._lock = threading.Lock()

    def record(self, sender: str, receiver: str, data: bytes) -> TranscriptEntry:
        kind = MessageKind(data[0])
        entry = TranscriptEntry(sender, receiver, kind, bytes(data))
        with self._lock:
            self._entries.append(entry)
        return entry

    def __len__(self):
        return len(self._entries)

    def __iter__(self) -> Iterator[TranscriptEntry]:
        return iter(list(self._entries))

    @property
    def entries(self) -> List[TranscriptEntry]:
        return list(self._entries)

    def visible_to(self, party: str) -> List[TranscriptEntry]:
        return [e for e in self._entries if e.receiver == party]

    def of_kind(self, kind: MessageKind) -> List[TranscriptEntry]:
        return [e for e in self._entries if e.kind is kind]

    def to_bytes(self) -> bytes:
        """Каноническая сериализация для сравнения прогонов"""
        parts = []
        for e in self._entries:
            header = f"{e.sender}>{e.receiver}:".encode('ascii')
            parts.append(len(header).to_bytes(2, 'big') + header
                         + len(e.payload).to_bytes(4, 'big') + e.payload)
        return b''.join(parts)

    def digest(self) -> str:
        return hashlib.sha256(self.to_bytes()).hexdigest()

    def summary(self) -> pd.DataFrame:
        """Сводка: число сообщений и байт по направлению и типу"""
        if not self._entries:
            return pd.DataFrame(columns=['sender', 'receiver', 'kind', 'messages', 'bytes'])
        df = pd.DataFrame([
            {'sender': e.sender, 'receiver': e.receiver, 'kind': e.kind.name, 'bytes': len(e.payload)}
            for e in self._entries
        ])
        return (df.groupby(['sender', 'receiver', 'kind'], sort=False)
                  .agg(messages=('bytes', 'size'), bytes=('bytes', 'sum'))
                  .reset_index())
