import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qsv.errors import PoleError
from qsv.scalar import DOUBLE, PrecisionContext, approx_equal, gamma, shifted_factorial

EXT = PrecisionContext.extended(40)


@pytest.mark.parametrize("z, expected", [(1, 1), (5, 24), (0.5, math.sqrt(math.pi))])
def test_gamma_values(z, expected):
    assert abs(gamma(z) - expected) <= 1e-14 * abs(expected)


def test_gamma_complex_matches_mpmath():
    rng = np.random.default_rng(3)
    for _ in range(50):
        z = complex(rng.uniform(-4.5, 10), rng.uniform(-5, 5))
        ref = complex(mpmath.gamma(z))
        assert abs(gamma(z) - ref) <= 1e-12 * abs(ref)


def test_gamma_extended_digits():
    v = gamma(EXT.num("0.5"), EXT)
    assert abs(v - EXT.mp.sqrt(EXT.mp.pi)) < mpmath.mpf(10) ** -38


@pytest.mark.parametrize("z", [0, -1, -7, 0j])
def test_gamma_poles(z):
    with pytest.raises(PoleError):
        gamma(z)


def test_gamma_recurrence():
    rng = np.random.default_rng(11)
    for _ in range(100):
        z = complex(rng.uniform(0.1, 10), rng.uniform(-3, 3))
        ok, _ = approx_equal(gamma(z + 1), z * gamma(z), 100 * DOUBLE.rel_tol)
        assert ok


def test_shifted_factorial_examples():
    assert shifted_factorial(3.7, 0) == 1
    assert shifted_factorial(1, 4) == 24
    assert abs(shifted_factorial(2.5, 3) - 39.375) < 1e-13


@given(st.floats(-5, 5), st.integers(0, 8), st.integers(0, 8))
def test_shifted_factorial_splits(alpha, m, n):
    lhs = shifted_factorial(alpha, m + n)
    rhs = shifted_factorial(alpha, m) * shifted_factorial(alpha + m, n)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


def test_approx_equal_examples():
    assert approx_equal(1, 1, 1e-9) == (True, 0.0)
    ok, err = approx_equal(1, 1 + 2e-9, 1e-9)
    assert not ok and err == pytest.approx(2e-9, rel=1e-6)
    assert approx_equal(0, 1e-320, 1e-9)[0]


@given(st.complex_numbers(max_magnitude=1e6), st.complex_numbers(max_magnitude=1e6))
def test_approx_equal_symmetric(a, b):
    assert approx_equal(a, b, 1e-9) == approx_equal(b, a, 1e-9)


def test_context_validation():
    with pytest.raises(ValueError):
        PrecisionContext(rel_tol=0)
    with pytest.raises(ValueError):
        PrecisionContext.extended(20)


def test_context_reads_decimal_strings():
    assert EXT.num("0.1") != 0.1
    assert abs(EXT.num("0.1") * 10 - 1) < mpmath.mpf(10) ** -39
    assert DOUBLE.num("0.25") == 0.25
