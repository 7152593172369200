"""Basic hypergeometric series and the classical one-variable summations.

Very-well-poised series are summed through the factor
``(1 - a q^{2k}) / (1 - a)``, so no square root of the special parameter
is ever formed.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import NonConvergent, PoleError
from .qpoch import QBase, as_base, negative_power_index, qpoch_ratio, snap_tolerance
from .scalar import DOUBLE, ROUNDING_FACTOR, PrecisionContext

DEFAULT_MAX_TERMS = 20000


@dataclass(frozen=True)
class SeriesSpec:
    upper: tuple
    lower: tuple
    z: complex
    base: QBase

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple(self.upper))
        object.__setattr__(self, "lower", tuple(self.lower))
        if len(self.upper) != len(self.lower) + 1:
            raise ValueError("an s-phi-(s-1) series needs one more upper than lower parameter")


@dataclass(frozen=True)
class VWPSpec:
    """Very-well-poised series with special parameter ``special``.

    ``params`` are the free upper parameters ``b, c, d, ...``; the matching
    lower parameters ``special*q/b, ...`` are formed internally.
    """

    special: complex
    params: tuple
    z: complex
    base: QBase

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))


@dataclass(frozen=True)
class SeriesFlags:
    balanced: bool
    well_poised: bool
    very_well_poised: bool


def termination_index(upper: Sequence, q, ctx: PrecisionContext = DOUBLE):
    """Smallest n such that some upper parameter equals q^-n, else None."""
    found = [negative_power_index(ctx.num(a), q, snap_tolerance(ctx)) for a in upper]
    found = [n for n in found if n is not None]
    return min(found) if found else None


def _check_lower(lower, q, limit, ctx):
    for b in lower:
        n = negative_power_index(ctx.num(b), q, snap_tolerance(ctx))
        if n is not None and (limit is None or n < limit):
            raise PoleError(f"lower parameter {b} equals q^-{n}")


def _sum_terms(ratio, first, n_stop, max_terms, tail_tol, ctx, weight=None):
    """Shared term-recurrence loop.

    ``ratio(k)`` gives term_{k+1}/term_k of the Pochhammer part; ``weight(k)``
    is an optional extra per-term factor that is not folded into the
    recurrence.  Returns ``(sum, err_bound)``; the bound is the geometric tail
    estimate plus a rounding term proportional to the summed magnitudes, so
    heavy cancellation shows up in the budget.
    """
    term = first
    total = term * (weight(0) if weight else 1)
    mass = float(abs(total))
    if n_stop is not None:
        for k in range(n_stop):
            term = term * ratio(k)
            contrib = term * (weight(k + 1) if weight else 1)
            total += contrib
            mass += float(abs(contrib))
        return total, ROUNDING_FACTOR * ctx.eps * mass
    small = 0
    prev = abs(total)
    for k in range(max_terms):
        term = term * ratio(k)
        contrib = term * (weight(k + 1) if weight else 1)
        total += contrib
        size = abs(contrib)
        mass += float(size)
        if size <= tail_tol * abs(total):
            small += 1
            if small >= 3:
                rho = float(size / prev) if prev else 0.0
                if rho >= 1:
                    rho = 0.5
                return total, float(size) * rho / (1 - rho) + ROUNDING_FACTOR * ctx.eps * mass
        else:
            small = 0
        prev = size
    raise NonConvergent(f"series did not converge within {max_terms} terms")


def eval_phi(spec: SeriesSpec, max_terms: int = DEFAULT_MAX_TERMS, tail_tol: float | None = None,
             ctx: PrecisionContext = DOUBLE):
    """Sum an s-phi-(s-1) series by term recurrence; returns (value, err_bound)."""
    tol = ctx.tail_tol if tail_tol is None else tail_tol
    q = ctx.num(spec.base.q)
    z = ctx.num(spec.z)
    upper = [ctx.num(a) for a in spec.upper]
    lower = [ctx.num(b) for b in spec.lower]
    n_stop = termination_index(upper, q, ctx)
    _check_lower(lower, q, n_stop, ctx)
    if n_stop is None and abs(z) >= 1:
        raise NonConvergent(f"nonterminating series needs |z| < 1, got {abs(z)}")
    if z == 0:
        return ctx.num(1), 0.0

    def ratio(k):
        qk = q**k
        num = z
        den = 1 - qk * q
        for a in upper:
            num *= 1 - a * qk
        for b in lower:
            den *= 1 - b * qk
        return num / den

    return _sum_terms(ratio, ctx.num(1), n_stop, max_terms, tol, ctx)


def classify(spec: SeriesSpec, base=None, ctx: PrecisionContext = DOUBLE) -> SeriesFlags:
    base = spec.base if base is None else as_base(base, ctx)
    q = ctx.num(base.q)
    tol = ctx.rel_tol
    upper = [ctx.num(a) for a in spec.upper]
    lower = [ctx.num(b) for b in spec.lower]
    z = ctx.num(spec.z)

    def close(u, v):
        return abs(u - v) <= tol * max(abs(u), abs(v), ctx.abs_floor)

    prod_up = ctx.num(1)
    for a in upper:
        prod_up *= a
    prod_low = ctx.num(1)
    for b in lower:
        prod_low *= b
    balanced = close(prod_low, prod_up * q) and close(z, q)

    target = upper[0] * q
    well = all(close(a * b, target) for a, b in zip(upper[1:], lower))
    very = False
    if well and len(upper) >= 3:
        # a_2 = -a_3 = q sqrt(a_1) for one of the two square-root branches
        very = close(upper[1] ** 2, q * q * upper[0]) and close(upper[2], -upper[1])
    return SeriesFlags(balanced, well, very)


def eval_vwp87(spec: VWPSpec, max_terms: int = DEFAULT_MAX_TERMS, tail_tol: float | None = None,
               ctx: PrecisionContext = DOUBLE):
    """Very-well-poised series in the special parameter, argument ``spec.z``."""
    tol = ctx.tail_tol if tail_tol is None else tail_tol
    q = ctx.num(spec.base.q)
    a = ctx.num(spec.special)
    z = ctx.num(spec.z)
    if abs(1 - a) <= ctx.abs_floor:
        raise PoleError("very-well-poised series needs special parameter != 1")
    params = [ctx.num(p) for p in spec.params]
    if any(abs(p) <= ctx.abs_floor for p in params):
        raise PoleError("zero parameter gives an infinite lower parameter")
    lower = [a * q / p for p in params]
    upper = [a] + params
    n_stop = termination_index(upper, q, ctx)
    _check_lower(lower, q, n_stop, ctx)
    if n_stop is None and abs(z) >= 1:
        raise NonConvergent(f"nonterminating series needs |z| < 1, got {abs(z)}")

    def ratio(k):
        qk = q**k
        num = z
        den = 1 - qk * q
        for u in upper:
            num *= 1 - u * qk
        for b in lower:
            den *= 1 - b * qk
        return num / den

    def weight(k):
        return (1 - a * q ** (2 * k)) / (1 - a)

    return _sum_terms(ratio, ctx.num(1), n_stop, max_terms, tol, ctx, weight)


def _vwp(special, params, base, ctx):
    base = as_base(base, ctx)
    return eval_vwp87(VWPSpec(special, params, base.q, base), ctx=ctx)


def _product(num, den, base, ctx):
    res = qpoch_ratio(num, den, base, ctx=ctx)
    return res.value, (res.err_bound + ROUNDING_FACTOR * ctx.eps) * abs(res.value)


def bailey_nt87_lhs(a, b, c, d, e, f, base, ctx: PrecisionContext = DOUBLE):
    """Two very-well-poised 8phi7 series of Bailey's nonterminating summation.

    Assumes ``a**2 * q == b*c*d*e*f``; the caller constructs ``f``.
    """
    base = as_base(base, ctx)
    q = ctx.num(base.q)
    a, b, c, d, e, f = (ctx.num(v) for v in (a, b, c, d, e, f))
    first, err1 = _vwp(a, (b, c, d, e, f), base, ctx)
    pre, err_pre = _product(
        (a * q, c, d, e, f, b / a, b * q / c, b * q / d, b * q / e, b * q / f),
        (a / b, a * q / c, a * q / d, a * q / e, a * q / f, b * c / a, b * d / a, b * e / a, b * f / a,
         b * b * q / a),
        base, ctx)
    if pre == 0:
        return first, err1
    second, err2 = _vwp(b * b / a, (b, b * c / a, b * d / a, b * e / a, b * f / a), base, ctx)
    value = first + pre * second
    return value, err1 + abs(pre) * err2 + err_pre * abs(second)


def bailey_nt87_rhs(a, b, c, d, e, f, base, ctx: PrecisionContext = DOUBLE):
    base = as_base(base, ctx)
    q = ctx.num(base.q)
    a, b, c, d, e, f = (ctx.num(v) for v in (a, b, c, d, e, f))
    return _product(
        (a * q, b / a, a * q / (c * d), a * q / (c * e), a * q / (c * f), a * q / (d * e), a * q / (d * f),
         a * q / (e * f)),
        (a * q / c, a * q / d, a * q / e, a * q / f, b * c / a, b * d / a, b * e / a, b * f / a),
        base, ctx)


def jackson_87_lhs(a, b, c, d, n: int, base, ctx: PrecisionContext = DOUBLE):
    """Terminating very-well-poised balanced 8phi7 (n + 1 terms)."""
    base = as_base(base, ctx)
    q = ctx.num(base.q)
    a, b, c, d = (ctx.num(v) for v in (a, b, c, d))
    e = a * a * q ** (1 + n) / (b * c * d)
    f = q ** (-n)
    return _vwp(a, (b, c, d, e, f), base, ctx)


def jackson_87_rhs(a, b, c, d, n: int, base, ctx: PrecisionContext = DOUBLE):
    base = as_base(base, ctx)
    q = ctx.num(base.q)
    a, b, c, d = (ctx.num(v) for v in (a, b, c, d))
    res = qpoch_ratio((a * q, a * q / (b * c), a * q / (b * d), a * q / (c * d)),
                      (a * q / b, a * q / c, a * q / d, a * q / (b * c * d)), base, n, ctx)
    return res.value, ROUNDING_FACTOR * ctx.eps * abs(res.value)
