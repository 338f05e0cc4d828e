"""
Атаки на обучение расстояний против точного k-NN и их неудача против KDE
"""

from .distance_search import (
    AttackResult, attack_distance_1nn, attack_plaintext_distance, attack_recover_tuple,
    reduce_knn_to_1nn, reduce_majority_to_1nn,
)
from .geometry import triangulate
from .oracle import KdeOracle, KnnOracle, OracleMode, ScoreLeakingKde
from .score_channel import attack_score_channel, recover_inserted_tuple

__all__ = [
    'AttackResult', 'attack_distance_1nn', 'attack_plaintext_distance', 'attack_recover_tuple',
    'reduce_knn_to_1nn', 'reduce_majority_to_1nn', 'triangulate',
    'KdeOracle', 'KnnOracle', 'OracleMode', 'ScoreLeakingKde',
    'attack_score_channel', 'recover_inserted_tuple',
]
