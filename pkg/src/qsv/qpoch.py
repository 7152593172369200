"""q-shifted factorials: finite (any integer index), infinite and condensed.

Infinite products are truncated per call at a depth chosen from ``|a|`` and
``|q|``, and return a certified bound on the relative truncation error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import PoleError
from .scalar import DOUBLE, PrecisionContext

INF = math.inf


@dataclass(frozen=True)
class QBase:
    """The base ``q`` (``0 < |q| < 1``) and its default truncation depth."""

    q: complex
    tail_tol: float = 1e-17
    default_depth: int = field(init=False)

    def __post_init__(self):
        mod = abs(self.q)
        if not 0 < mod < 1:
            raise ValueError(f"need 0 < |q| < 1, got |q| = {float(mod)}")
        depth = math.ceil(math.log(self.tail_tol) / math.log(float(mod)))
        object.__setattr__(self, "default_depth", max(depth, 1))

    @property
    def modulus(self) -> float:
        return float(abs(self.q))

    def depth_for(self, scale: float, tail_tol: float | None = None) -> int:
        """Smallest K with ``scale * |q|**K < tail_tol`` (and at least 1)."""
        tol = self.tail_tol if tail_tol is None else tail_tol
        if scale <= tol:
            return 1
        return max(1, math.ceil(math.log(tol / scale) / math.log(self.modulus)))


@dataclass(frozen=True)
class QPochResult:
    value: complex
    err_bound: float = 0.0

    def __mul__(self, other: "QPochResult") -> "QPochResult":
        return QPochResult(self.value * other.value, self.err_bound + other.err_bound)

    def __truediv__(self, other: "QPochResult") -> "QPochResult":
        return QPochResult(self.value / other.value, self.err_bound + other.err_bound)


def as_base(base, ctx: PrecisionContext = DOUBLE) -> QBase:
    if isinstance(base, QBase):
        return base
    return QBase(ctx.num(base), tail_tol=ctx.tail_tol)


def snap_tolerance(ctx: PrecisionContext) -> float:
    return ctx.rel_tol * 1e-3


def negative_power_index(a, q, tol: float):
    """Return ``n >= 0`` if ``a`` equals ``q**-n`` to relative ``tol``, else None."""
    mod_a = float(abs(a))
    if mod_a < 1 - tol or mod_a == 0:
        return None
    n = round(-math.log(mod_a) / math.log(float(abs(q))))
    if n < 0:
        return None
    if abs(a * q**n - 1) <= tol * max(1, n):
        return n
    return None


def finite_qpoch(a, base, k: int, ctx: PrecisionContext = DOUBLE) -> QPochResult:
    """(a;q)_k for any integer k; negative k via the reciprocal product."""
    base = as_base(base, ctx)
    q = ctx.num(base.q)
    a = ctx.num(a)
    one = ctx.num(1)
    if k >= 0:
        n = negative_power_index(a, q, snap_tolerance(ctx))
        if n is not None and k > n:
            return QPochResult(0 * one, 0.0)
        out = one
        term = a
        for _ in range(k):
            out *= 1 - term
            term *= q
        return QPochResult(out, 0.0)
    floor = ctx.abs_floor * max(1.0, float(abs(a)))
    den = one
    qinv = 1 / q
    term = a * qinv
    for j in range(1, -k + 1):
        fac = 1 - term
        if abs(fac) < floor:
            raise PoleError(f"(a;q)_{k}: factor 1 - a q^-{j} vanishes for a = {a}")
        den *= fac
        term *= qinv
    return QPochResult(one / den, 0.0)


def infinite_qpoch(a, base, tail_tol: float | None = None, ctx: PrecisionContext = DOUBLE) -> QPochResult:
    """(a;q)_inf truncated where ``|a||q|^K < min(1/2, tail_tol)``.

    The returned ``err_bound`` is ``2|a||q|^K / (1 - |q|)``, which dominates
    the relative error of the omitted tail.
    """
    base = as_base(base, ctx)
    tol = ctx.tail_tol if tail_tol is None else tail_tol
    if tol <= 0:
        raise ValueError("tail_tol must be positive")
    q = ctx.num(base.q)
    a = ctx.num(a)
    one = ctx.num(1)
    mod_a = float(abs(a))
    if mod_a == 0:
        return QPochResult(one, 0.0)
    if negative_power_index(a, q, snap_tolerance(ctx)) is not None:
        return QPochResult(0 * one, 0.0)
    depth = base.depth_for(mod_a, min(0.5, tol))
    out = one
    term = a
    for _ in range(depth):
        out *= 1 - term
        term *= q
    err = 2 * mod_a * base.modulus**depth / (1 - base.modulus)
    return QPochResult(out, err)


def multi_qpoch(params: Sequence, base, k=INF, ctx: PrecisionContext = DOUBLE,
                tail_tol: float | None = None) -> QPochResult:
    """Condensed product (a_1, ..., a_m; q)_k; ``k`` may be ``math.inf``."""
    out = QPochResult(ctx.num(1), 0.0)
    for a in params:
        if k == INF:
            out = out * infinite_qpoch(a, base, tail_tol, ctx)
        else:
            out = out * finite_qpoch(a, base, int(k), ctx)
    return out


def qpoch_ratio(num: Sequence, den: Sequence, base, k=INF, ctx: PrecisionContext = DOUBLE,
                tail_tol: float | None = None) -> QPochResult:
    """(num;q)_k / (den;q)_k, raising PoleError when the denominator vanishes."""
    top = multi_qpoch(num, base, k, ctx, tail_tol)
    bottom = multi_qpoch(den, base, k, ctx, tail_tol)
    if abs(bottom.value) <= ctx.abs_floor:
        raise PoleError(f"denominator product vanishes for parameters {list(den)}")
    return top / bottom


# -- array helpers used by the lattice evaluators ------------------------------

def qpowers(q, count: int, ctx: PrecisionContext = DOUBLE) -> np.ndarray:
    """Array ``[q**0, ..., q**(count-1)]`` in the context field."""
    if ctx.is_extended:
        q = ctx.num(q)
        return np.array([q**j for j in range(count)], dtype=object)
    return complex(q) ** np.arange(count)


def qpoch_seq(a, q, depth: int, ctx: PrecisionContext = DOUBLE) -> np.ndarray:
    """Array of (a;q)_k for k = 0..depth, exactly zero past a termination."""
    a = ctx.num(a)
    factors = 1 - a * qpowers(q, depth, ctx)
    n = negative_power_index(a, ctx.num(q), snap_tolerance(ctx))
    if n is not None and n < depth:
        factors[n] = 0
    one = ctx.array([1])
    if depth == 0:
        return one
    return np.concatenate([one, np.multiply.accumulate(factors)])


def _is_q_geometric(z: np.ndarray, q, ctx: PrecisionContext) -> bool:
    """True for 1-D arrays with z[k+1] == z[k] * q to working precision."""
    if np.ndim(z) != 1 or len(z) < 3:
        return False
    tol = 1e-12 if not ctx.is_extended else 10.0 ** (6 - ctx.digits)
    prev = z[:-1]
    return bool(np.all(np.abs(z[1:] - prev * q) <= tol * np.abs(prev)))


def qpoch_inf_vec(z: np.ndarray, q, ctx: PrecisionContext = DOUBLE, tail_tol: float | None = None):
    """Elementwise (z;q)_inf for an array of arguments.

    Returns ``(values, err_bound)`` where ``err_bound`` bounds the relative
    truncation error of every entry.  Lattice arguments ``z_k = z_0 q^k``
    (the Jackson-integral case) are done by the backward recurrence
    ``(z_k;q)_inf = (1 - z_k) (z_{k+1};q)_inf`` from a single product at the
    last point, which uses multiplications only.
    """
    tol = ctx.tail_tol if tail_tol is None else tail_tol
    q = ctx.num(q)
    modq = float(abs(q))
    if np.size(z) and _is_q_geometric(z, q, ctx):
        last, err = qpoch_inf_vec(z[-1:], q, ctx, tol)
        head = np.multiply.accumulate((1 - z[:-1])[::-1])[::-1]
        return np.concatenate([head * last[0], last]), err
    scale = float(np.max(np.abs(z))) if np.size(z) else 0.0
    if scale == 0.0:
        return np.ones_like(z), 0.0
    bound = min(0.5, tol)
    depth = 1 if scale <= bound else max(1, math.ceil(math.log(bound / scale) / math.log(modq)))
    out = np.ones_like(z)
    term = z
    for _ in range(depth):
        out = out * (1 - term)
        term = term * q
    return out, 2 * scale * modq**depth / (1 - modq)
