"""
Криптографический слой: Paillier, фиксированная точка, кодек больших целых
"""

from .paillier import (
    Ciphertext, PublicKey, SecretKey,
    keygen, encrypt, decrypt, hom_add, hom_scale, hom_neg,
)
from .fixedpoint import FixedPointParams, quantize_feature, quantize_kernel, correction_factor

__all__ = [
    'Ciphertext', 'PublicKey', 'SecretKey',
    'keygen', 'encrypt', 'decrypt', 'hom_add', 'hom_scale', 'hom_neg',
    'FixedPointParams', 'quantize_feature', 'quantize_kernel', 'correction_factor',
]
