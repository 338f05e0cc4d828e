from fractions import Fraction

import gmpy2
import pytest

from src.crypto.fixedpoint import (
    FixedPointParams, ceil_exact, correction_factor, dequantize_feature, masked_kernel,
    quantize_feature, quantize_features, quantize_kernel, round_half_away,
)
from src.utils.errors import FeatureRangeError, HeadroomError, MaskRangeError, PrecisionError
from tests.conftest import reduced_params


def test_round_half_away():
    assert round_half_away(Fraction(5, 2)) == 3
    assert round_half_away(Fraction(-5, 2)) == -3
    assert round_half_away(2.4) == 2
    assert round_half_away(0) == 0
    assert ceil_exact(Fraction(7, 3)) == 3
    assert ceil_exact(4) == 4


def test_quantize_feature_bounds(params):
    assert quantize_feature(0.0, params) == 0
    assert quantize_feature(1.0, params) == params.feature_scale
    assert quantize_feature(0.125, params) == 32
    assert dequantize_feature(32, params) == 0.125
    with pytest.raises(FeatureRangeError):
        quantize_feature(1.01, params)
    with pytest.raises(FeatureRangeError):
        quantize_features([0.5, -0.1], params)


def test_quantize_kernel_rejects_nonpositive():
    assert quantize_kernel(Fraction(1, 4), 8) == 64
    with pytest.raises(ValueError):
        quantize_kernel(0, 8)


def test_defaults_fit_production_key():
    p = FixedPointParams.for_key(3072, m=2, c=2)
    assert p.kernel_bits >= p.required_kernel_bits()
    assert p.gc_width < 3072


def test_defaults_do_not_fit_short_key():
    with pytest.raises(HeadroomError):
        FixedPointParams.for_key(1024, m=2, c=2)


def test_reduced_params_fit_short_key(params):
    params.check_modulus(1 << 1023)
    assert params.mask_bound == params.max_sq_dist == 2 * 256 ** 2


def test_precision_error_for_narrow_kernel():
    with pytest.raises(PrecisionError):
        reduced_params(sigma=0.01)


def test_precision_error_for_high_dimension():
    with pytest.raises(PrecisionError):
        FixedPointParams(m=784, c=10, sigma=0.25)


def test_correction_factor_mask_range(params):
    assert correction_factor(0, params) == 1 << params.correction_bits
    with pytest.raises(MaskRangeError):
        correction_factor(params.mask_bound, params)
    with pytest.raises(MaskRangeError):
        correction_factor(-1, params)


@pytest.mark.parametrize("d2,mu", [(0, 0), (1000, 777), (2 * 256 ** 2, 2 * 256 ** 2 - 1), (12345, 54321)])
def test_mask_removal_accuracy(params, d2, mu):
    unmasked = masked_kernel(d2 + mu, params) * correction_factor(mu, params)
    reference = params.scaled_kernel(d2)
    rel = abs(gmpy2.mpfr(unmasked, params.working_precision) - reference) / reference
    assert rel < gmpy2.mpfr(2) ** -60


def test_term_bound_covers_worst_case(params):
    mu = params.mask_bound - 1
    term = masked_kernel(mu, params) * correction_factor(mu, params)
    assert term <= params.max_term_bound


def test_dict_roundtrip(params):
    assert FixedPointParams.from_dict(params.to_dict()) == params
