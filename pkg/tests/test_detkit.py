import itertools

import numpy as np
import pytest

from qsv.detkit import det, detcor_lhs, detcor_rhs, lemma_det_lhs, lemma_det_rhs, vandermonde
from qsv.errors import ZeroXError
from qsv.harness import sample_lemma_args
from qsv.scalar import PrecisionContext, approx_equal

EXT = PrecisionContext.extended(30)


def cofactor(m):
    if len(m) == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * cofactor([row[:j] + row[j + 1:] for row in m[1:]]) for j in range(len(m)))


def test_det_small():
    assert det(np.eye(3)) == pytest.approx(1)
    assert det([[2, 3], [5, 7]]) == pytest.approx(2 * 7 - 3 * 5)
    assert det([[1, 2], [2, 4]]) == 0


@pytest.mark.parametrize("r", [1, 2, 3])
def test_det_matches_cofactor(r):
    rng = np.random.default_rng(r)
    m = (rng.normal(size=(r, r)) + 1j * rng.normal(size=(r, r))).tolist()
    assert det(m) == pytest.approx(cofactor(m), rel=1e-13)


def test_vandermonde_determinant():
    rng = np.random.default_rng(0)
    u = rng.normal(size=4)
    m = [[ui ** (4 - j) for j in range(1, 5)] for ui in u]
    assert det(m) == pytest.approx(vandermonde(u), rel=1e-12)


def _lemma_draw(rng, r):
    return sample_lemma_args(r, rng)


def test_lemma_r1_and_example():
    assert lemma_det_lhs([0.4], 0.3, 0.7, 0.2, 0.5) == pytest.approx(1)
    assert lemma_det_rhs([0.4], 0.3, 0.7, 0.2, 0.5) == pytest.approx(1)
    args = ([0.4, 0.9], 0.3, 0.7, 0.2, 0.5)
    assert lemma_det_lhs(*args) == pytest.approx(lemma_det_rhs(*args), rel=1e-12)


def test_lemma_equal_rows_vanish():
    assert abs(lemma_det_lhs([0.6, 0.6], 0.3, 0.7, 0.2, 0.5)) < 1e-15
    assert lemma_det_rhs([0.6, 0.6], 0.3, 0.7, 0.2, 0.5) == 0


def test_lemma_c_zero_cross_factor():
    X, A, B, q = [0.3, 0.8, 1.1], 0.4, 0.6, 0.5

    def poch(z, k):
        return np.prod([1 - z * q**j for j in range(k)])

    expected = (0.8 - 0.3) * (1.1 - 0.3) * (1.1 - 0.8) * A**3 * q
    for i, x in enumerate(X, start=1):
        expected *= poch(B / A, i - 1) / poch(B * x, 2)
    assert lemma_det_rhs(X, A, B, 0.0, q) == pytest.approx(expected, rel=1e-14)
    assert lemma_det_lhs(X, A, B, 0.0, q) == pytest.approx(expected, rel=1e-12)


def test_lemma_random_draws():
    rng = np.random.default_rng(42)
    for r in range(1, 6):
        for _ in range(100):
            args = _lemma_draw(rng, r)
            assert approx_equal(lemma_det_lhs(*args), lemma_det_rhs(*args), 1e-9)[0]


def test_lemma_clustered_points_extended():
    # clustered real X: double loses ~1e-3 here, the identity itself holds
    args = ([0.4, 0.45, 0.52, 0.57, 0.63], 0.2, 0.25, 0.35, 0.5)
    assert approx_equal(lemma_det_lhs(*args, EXT), lemma_det_rhs(*args, EXT), 1e-15, EXT)[0]


def test_lemma_antisymmetry():
    rng = np.random.default_rng(1)
    X, A, B, C, q = _lemma_draw(rng, 3)
    Y = [X[1], X[0], X[2]]
    assert lemma_det_lhs(Y, A, B, C, q) == pytest.approx(-lemma_det_lhs(X, A, B, C, q), rel=1e-12)
    assert lemma_det_rhs(Y, A, B, C, q) == pytest.approx(-lemma_det_rhs(X, A, B, C, q), rel=1e-12)


def test_lemma_zero_x():
    with pytest.raises(ZeroXError):
        lemma_det_rhs([0.0, 0.5], 0.3, 0.7, 0.2, 0.5)


def test_detcor():
    assert detcor_lhs([0.4], 1.5, 0.7) == pytest.approx(1)
    assert detcor_lhs([0.2, 0.9], 1.5, 0.7) == pytest.approx(detcor_rhs([0.2, 0.9], 1.5, 0.7), rel=1e-13)
    rng = np.random.default_rng(6)
    for r in range(1, 6):
        for _ in range(50):
            a, b = rng.uniform(0.5, 3, 2)
            x = list(rng.uniform(0, 3, r))
            assert approx_equal(detcor_lhs(x, a, b, EXT), detcor_rhs(x, a, b, EXT), 1e-10, EXT)[0]


def test_detcor_double_separated():
    rng = np.random.default_rng(7)
    for r in range(1, 5):
        for _ in range(50):
            a, b = rng.uniform(0.5, 3, 2)
            x = list(np.arange(r) * 0.7 + rng.uniform(0, 0.3, r))
            assert approx_equal(detcor_lhs(x, a, b), detcor_rhs(x, a, b), 1e-10)[0]


def test_detcor_is_q_limit_of_lemma():
    q, a, b = 0.99, 1.5, 0.7
    x = [0.2, 0.9, 1.6]
    X = [q**v for v in x]
    lem = lemma_det_lhs(X, q**a, q ** (a + b), 0.0, q)
    # each row (q^{a+x_i}; q)_{r-j} / (q^{a+b+x_i}; q)_{r-j} tends to the shifted-factorial ratio
    assert lem.real == pytest.approx(detcor_lhs(x, a, b), rel=20 * (1 - q))
