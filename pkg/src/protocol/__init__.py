"""
Протокол классификации на аутсорсинге: стороны, сообщения, транспорт, сессии
"""

from .algorithms import classify, kernel_values, squared_dist, squared_dists, submit_tuple
from .matrix import random_invertible_matrix
from .parties import CryptoServiceProvider, DataHost, DataOwner, EncryptedTuple, MaskRecord, Querier
from .session import ProtocolSession, SessionConfig, run_session
from .transcript import Transcript

__all__ = [
    'classify', 'kernel_values', 'squared_dist', 'squared_dists', 'submit_tuple',
    'random_invertible_matrix',
    'CryptoServiceProvider', 'DataHost', 'DataOwner', 'EncryptedTuple', 'MaskRecord', 'Querier',
    'ProtocolSession', 'SessionConfig', 'run_session', 'Transcript',
]
