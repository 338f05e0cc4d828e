"""
Фиксированная точка: мост между вещественным гауссовым ядром и арифметикой по модулю n.

Обозначения:
    S = 2^s          масштаб признаков, D_max = m * S^2
    2^F, 2^F'        масштабы ядра и поправочного множителя
    B                граница масок алгоритма KernelValue (по умолчанию D_max)
    K~(t)            (1 / (sigma * sqrt(2*pi))) * exp(-t / (2 * sigma^2 * S^2))

Все экспоненты считаются в mpfr с точностью max(F, F') + 128 бит,
округление везде half-away-from-zero.
"""
from dataclasses import asdict, dataclass
from functools import cached_property
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Union

import gmpy2
import numpy as np

from config.settings import Config
from src.utils.errors import FeatureRangeError, HeadroomError, MaskRangeError, PrecisionError
from src.utils.logger import logger

Real = Union[float, int, Fraction, "gmpy2.mpfr"]

# Запас относительной точности после снятия маски
PRECISION_MARGIN_BITS = 64


def _ratio(x: Real) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    num, den = x.as_integer_ratio()
    return Fraction(int(num), int(den))


def round_half_away(x: Real) -> int:
    """Точное округление рационального значения x, половины от нуля"""
    r = _ratio(x)
    num, den = r.numerator, r.denominator
    if num >= 0:
        return (2 * num + den) // (2 * den)
    return -((-2 * num + den) // (2 * den))


def ceil_exact(x: Real) -> int:
    r = _ratio(x)
    return -(-r.numerator // r.denominator)


def quantize_kernel(g: Real, frac_bits: int) -> int:
    """round(g * 2^F) без промежуточного underflow (g задается точно)"""
    if g <= 0:
        raise ValueError("Значение ядра должно быть > 0")
    return round_half_away(_ratio(g) * (1 << frac_bits))


@dataclass(frozen=True)
class FixedPointParams:
    """
    Параметры квантования. Все три проверки (точность, маска, запас по модулю)
    выполняются при создании; нарушение = исключение.
    """
    m: int
    c: int
    feature_bits: int = 12          # s
    kernel_bits: int = 1024         # F
    correction_bits: int = 1024     # F'
    lambda_gc: int = 40
    mask_bound: Optional[int] = None   # B; None -> D_max
    max_tuples: int = 2 ** 20       # n_max
    sigma: float = 0.25
    key_bits: Optional[int] = None

    def __post_init__(self):
        if self.m < 1 or self.c < 1:
            raise ValueError(f"Нужно m >= 1 и c >= 1 (m={self.m}, c={self.c})")
        if self.sigma <= 0:
            raise ValueError("sigma должна быть > 0")
        if self.feature_bits < 1 or self.max_tuples < 1 or self.lambda_gc < 0:
            raise ValueError("Недопустимые параметры квантования")
        if self.mask_bound is None:
            object.__setattr__(self, 'mask_bound', self.max_sq_dist)
        if self.mask_bound < 1:
            raise MaskRangeError("Граница маски B должна быть >= 1")
        self._check_precision()
        if self.key_bits is not None:
            # n содержит ровно key_bits бит, худший случай n = 2^(key_bits-1)
            self.check_modulus(1 << (self.key_bits - 1))

    # --- Конструкторы ---

    @classmethod
    def for_key(cls, key_bits: int, m: int, c: int, **overrides) -> "FixedPointParams":
        """Параметры из Config.FIXED_POINT с переопределениями"""
        defaults = Config.FIXED_POINT
        values = {
            'feature_bits': defaults['feature_bits'],
            'kernel_bits': defaults['kernel_bits'],
            'correction_bits': defaults['correction_bits'],
            'lambda_gc': defaults['lambda_gc'],
            'max_tuples': defaults['max_tuples'],
            'sigma': defaults['sigma'],
        }
        values.update(overrides)
        return cls(m=m, c=c, key_bits=key_bits, **values)

    def to_dict(self) -> Dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict) -> "FixedPointParams":
        return cls(**data)

    # --- Производные величины ---

    @property
    def feature_scale(self) -> int:
        return 1 << self.feature_bits

    @property
    def max_sq_dist(self) -> int:
        return self.m * self.feature_scale ** 2

    @property
    def working_precision(self) -> int:
        return max(self.kernel_bits, self.correction_bits) + 128

    def _context(self):
        return gmpy2.context(precision=self.working_precision)

    def _mp(self, x):
        return gmpy2.mpfr(x, self.working_precision)

    def _exponent_scale(self, ctx):
        """2 * sigma^2 * S^2"""
        sigma = self._mp(self.sigma)
        return ctx.mul(ctx.mul(self._mp(2), ctx.mul(sigma, sigma)), self._mp(self.feature_scale ** 2))

    def _peak(self, ctx):
        """1 / (sigma * sqrt(2*pi))"""
        pi = gmpy2.const_pi(precision=self.working_precision)
        root = ctx.sqrt(ctx.mul(self._mp(2), pi))
        return ctx.div(self._mp(1), ctx.mul(self._mp(self.sigma), root))

    def kernel_value(self, t: int):
        """K~(t) в расширенной точности (mpfr)"""
        ctx = self._context()
        exponent = ctx.div(self._mp(-int(t)), self._exponent_scale(ctx))
        return ctx.mul(self._peak(ctx), ctx.exp(exponent))

    def scaled_kernel(self, t: int):
        """2^(F+F') * K~(t): эталон для проверки снятия маски"""
        ctx = self._context()
        return ctx.mul(self.kernel_value(t), self._mp(1 << (self.kernel_bits + self.correction_bits)))

    def _exp_mask_factor(self, mu: int):
        ctx = self._context()
        return ctx.exp(ctx.div(self._mp(int(mu)), self._exponent_scale(ctx)))

    @cached_property
    def max_term_bound(self) -> int:
        """Верхняя граница одного слагаемого G_i * correction_factor(mu_i)"""
        ctx = self._context()
        peak = self._peak(ctx)
        kernel_max = ceil_exact(ctx.mul(peak, self._mp(1 << self.kernel_bits))) + 1
        corr_max = ceil_exact(ctx.mul(self._exp_mask_factor(self.mask_bound),
                                      self._mp(1 << self.correction_bits))) + 1
        return kernel_max * corr_max

    @cached_property
    def max_sum_bound(self) -> int:
        return self.max_tuples * self.max_term_bound

    @property
    def gc_mask_bits(self) -> int:
        """L: ширина масок garbled circuit"""
        return self.max_sum_bound.bit_length() + self.lambda_gc

    @property
    def gc_width(self) -> int:
        """Разрядность входов схемы: in_k = A_k + mu_k < 2^(L+1)"""
        return self.gc_mask_bits + 1

    # --- Проверки ---

    def required_kernel_bits(self) -> int:
        ctx = self._context()
        log2e = ctx.div(self._mp(1), ctx.log(self._mp(2)))
        ratio = ctx.div(self._mp(self.max_sq_dist + self.mask_bound), self._exponent_scale(ctx))
        return ceil_exact(ctx.mul(ratio, log2e)) + PRECISION_MARGIN_BITS

    def _check_precision(self):
        required = self.required_kernel_bits()
        if self.kernel_bits < required:
            raise PrecisionError(
                f"F={self.kernel_bits} мало: для m={self.m}, sigma={self.sigma}, "
                f"B={self.mask_bound} нужно F >= {required}"
            )
        if self.correction_bits < PRECISION_MARGIN_BITS:
            raise PrecisionError(f"F'={self.correction_bits} < {PRECISION_MARGIN_BITS}")

    def check_modulus(self, n: int):
        """Запас по модулю: суммы с GC-масками не должны заворачиваться по n"""
        exp_factor = ceil_exact(self._exp_mask_factor(self.mask_bound))
        nominal = (self.max_tuples << (self.kernel_bits + self.correction_bits + self.lambda_gc)) * exp_factor
        if 2 * nominal >= n:
            raise HeadroomError(
                f"n_max * 2^(F+F') * ceil(e^(B/2s^2S^2)) * 2^lambda ~ 2^{nominal.bit_length()} "
                f"не меньше n/2 (n ~ 2^{int(n).bit_length()})"
            )
        if 2 * (self.max_sum_bound << self.lambda_gc) >= n or self.gc_width >= int(n).bit_length():
            raise HeadroomError(
                f"Суммы ядер (~2^{self.max_sum_bound.bit_length()}) с масками {self.gc_mask_bits} бит "
                f"не помещаются в модуль ~2^{int(n).bit_length()}"
            )


# --- Операции ---

def quantize_feature(x: float, params: FixedPointParams) -> int:
    if not 0.0 <= x <= 1.0:
        raise FeatureRangeError(f"Признак {x} вне [0, 1]")
    return round_half_away(Fraction(x) * params.feature_scale)


def quantize_features(features: Sequence[float], params: FixedPointParams) -> List[int]:
    values = np.asarray(features, dtype=float)
    if values.size and (np.any(values < 0.0) or np.any(values > 1.0) or not np.all(np.isfinite(values))):
        raise FeatureRangeError("Признаки должны лежать в [0, 1]")
    return [quantize_feature(float(v), params) for v in values]


def dequantize_feature(v: int, params: FixedPointParams) -> float:
    return v / params.feature_scale


def masked_kernel(masked_sq_dist: int, params: FixedPointParams) -> int:
    """
    G_i = quantize_kernel(K~(d^2 + mu)). Вычисляется CSP по замаскированному расстоянию.
    0 означает исчезнувшее влияние кортежа.
    """
    g = params.kernel_value(masked_sq_dist)
    if g == 0:
        return 0
    value = quantize_kernel(g, params.kernel_bits)
    if value == 0:
        logger.debug("Значение ядра обнулилось при квантовании")
    return value


def correction_factor(mu: int, params: FixedPointParams) -> int:
    """round(e^(mu / (2 sigma^2 S^2)) * 2^F')"""
    if not 0 <= mu < params.mask_bound:
        raise MaskRangeError(f"Маска вне [0, {params.mask_bound})")
    factor = params._exp_mask_factor(mu)
    return round_half_away(_ratio(factor) * (1 << params.correction_bits))
