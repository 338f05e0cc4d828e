"""
Дифференциальная приватность оценок KDE
"""

from .dp import DpParams, dp_classify, laplace_noise, laplace_perturb, sensitivity

__all__ = ['DpParams', 'dp_classify', 'laplace_noise', 'laplace_perturb', 'sensitivity']
