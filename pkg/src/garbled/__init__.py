"""
Garbled circuits и oblivious transfer для защищенного argmax
"""

from .circuit import BooleanCircuit, CircuitBuilder, build_argmax_circuit
from .garbler import GarbledCircuit, WireLabel, garble, evaluate, decode_output
from .oblivious_transfer import ot_transfer, OtExtensionSender, OtExtensionReceiver, TrustedExchangeOT

__all__ = [
    'BooleanCircuit', 'CircuitBuilder', 'build_argmax_circuit',
    'GarbledCircuit', 'WireLabel', 'garble', 'evaluate', 'decode_output',
    'ot_transfer', 'OtExtensionSender', 'OtExtensionReceiver', 'TrustedExchangeOT',
]
