"""Precision context, Gamma function, shifted factorials and approximate equality.

Every evaluator in the package takes a :class:`PrecisionContext`.  In
``double`` mode numbers are Python ``complex`` (arrays are ``complex128``);
in ``extended`` mode they are ``mpc`` values from a private mpmath context,
so several extended contexts with different digit counts can coexist.
"""
from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import PoleError

DOUBLE_EPS = np.finfo(float).eps
# multiple of eps used in rounding-error budgets of sums and products
ROUNDING_FACTOR = 32


@functools.lru_cache(maxsize=None)
def _mp_context(digits: int) -> mpmath.MPContext:
    mp = mpmath.MPContext()
    mp.dps = digits
    return mp


@dataclass(frozen=True)
class PrecisionContext:
    """Numeric field and tolerances.

    ``rel_tol`` is the default verification tolerance, ``abs_floor`` the
    magnitude below which values count as exact zeros in relative
    comparisons, and ``tail_tol`` the truncation target for infinite
    products and series.
    """

    mode: str = "double"
    digits: int = 30
    rel_tol: float = 1e-9
    abs_floor: float = 1e-300
    tail_tol: float = 1e-17

    def __post_init__(self):
        if self.mode not in ("double", "extended"):
            raise ValueError(f"unknown precision mode {self.mode!r}")
        if self.rel_tol <= 0:
            raise ValueError("rel_tol must be positive")
        if self.mode == "extended" and self.digits < 30:
            raise ValueError("extended precision needs at least 30 digits")

    @classmethod
    def extended(cls, digits: int = 30, **kwargs) -> "PrecisionContext":
        return cls(mode="extended", digits=digits, **kwargs)

    @property
    def is_extended(self) -> bool:
        return self.mode == "extended"

    @property
    def mp(self) -> mpmath.MPContext:
        return _mp_context(self.digits)

    @property
    def eps(self) -> float:
        return 10.0 ** (-self.digits) if self.is_extended else DOUBLE_EPS

    def num(self, value):
        """Convert ``value`` (number or decimal string) into the context field."""
        if self.is_extended:
            if isinstance(value, tuple):
                return self.mp.mpc(*value)
            return self.mp.mpc(value)
        if isinstance(value, tuple):
            return complex(float(value[0]), float(value[1]))
        if isinstance(value, str):
            return complex(value.replace(" ", ""))
        if isinstance(value, mpmath.mpc):
            return complex(float(value.real), float(value.imag))
        return complex(value)

    def real(self, value):
        if self.is_extended:
            return self.mp.mpf(value)
        return float(value)

    def array(self, values) -> np.ndarray:
        if self.is_extended:
            return np.array([self.num(v) for v in values], dtype=object)
        return np.asarray(values, dtype=complex)

    def sqrt(self, value):
        return self.mp.sqrt(value) if self.is_extended else cmath.sqrt(value)

    def isfinite(self, value) -> bool:
        if self.is_extended:
            return self.mp.isfinite(value.real) and self.mp.isfinite(value.imag)
        return cmath.isfinite(value)


DOUBLE = PrecisionContext()

# Lanczos approximation, g = 7, nine coefficients (relative error ~1e-15).
_LANCZOS_G = 7
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _lanczos_gamma(z: complex) -> complex:
    if z.real < 0.5:
        return cmath.pi / (cmath.sin(cmath.pi * z) * _lanczos_gamma(1 - z))
    z -= 1
    acc = _LANCZOS_COEF[0]
    for i, coef in enumerate(_LANCZOS_COEF[1:], start=1):
        acc += coef / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2 * math.pi) * t ** (z + 0.5) * cmath.exp(-t) * acc


def _is_pole(z, floor: float) -> bool:
    re, im = float(z.real), float(z.imag)
    if re > 0.5 or abs(im) > floor:
        return False
    return abs(re - round(re)) <= floor


def gamma(z, ctx: PrecisionContext = DOUBLE):
    """Gamma function in the context field.

    Double mode uses the Lanczos approximation with reflection for
    ``Re(z) < 0.5`` and ``math.gamma`` for real arguments; extended mode
    defers to mpmath at the context's digit count.
    """
    z = ctx.num(z)
    if _is_pole(z, ctx.abs_floor):
        raise PoleError(f"Gamma has a pole at {z}")
    if ctx.is_extended:
        return ctx.mp.gamma(z)
    if z.imag == 0.0:
        return complex(math.gamma(z.real))
    return _lanczos_gamma(z)


def shifted_factorial(alpha, k: int, ctx: PrecisionContext = DOUBLE):
    """Rising factorial (alpha)_k as a direct product."""
    if k < 0:
        raise ValueError("shifted_factorial needs k >= 0")
    alpha = ctx.num(alpha)
    out = ctx.num(1)
    for j in range(k):
        out *= alpha + j
    return out


def approx_equal(a, b, tol: float, ctx: PrecisionContext = DOUBLE):
    """Relative comparison guarded by ``ctx.abs_floor``.

    Returns ``(ok, achieved_error)`` with
    ``achieved_error = |a - b| / max(|a|, |b|, abs_floor)``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    diff = abs(a - b)
    scale = max(abs(a), abs(b), ctx.abs_floor)
    err = float(diff / scale)
    return err <= tol, err
