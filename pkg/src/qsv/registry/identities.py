"""Left- and right-hand side evaluators for every registered identity.

Each evaluator takes a resolved :class:`ParamRecord` (numbers already in
the context field), a :class:`TruncationPlan` or ``None`` for the default
depth, and a :class:`PrecisionContext`; it returns ``(value, err_bound)``
with an absolute error budget covering truncation and a rounding estimate.

Multiple sums are indexed by subsets ``S`` of ``{0..r-1}``: axes in ``S``
carry the lattice ``a x_i q^k`` (the lower q-integration endpoint) and the
others ``b q^k``.
"""
from __future__ import annotations

import itertools
from math import comb

import numpy as np

from ..detkit import det
from ..qhyper import (SeriesSpec, bailey_nt87_lhs, bailey_nt87_rhs, eval_phi, jackson_87_lhs,
                      jackson_87_rhs)
from ..qintegral import (PairIntegrand, TruncationPlan, lattice_error, mqint_ab, pair_lattice_sum, qint_ab,
                         quad_box)
from ..qpoch import QBase, qpoch_inf_vec, qpoch_ratio, qpoch_seq, qpowers
from ..scalar import ROUNDING_FACTOR, gamma

PRODUCT_ROUNDING = 64


def base_of(p, ctx) -> QBase:
    return QBase(p.q, tail_tol=ctx.tail_tol)


def _prod(num, den, base, ctx, k=None):
    """(num;q)_k / (den;q)_k with an absolute error (k=None means infinity)."""
    if k is None:
        res = qpoch_ratio(num, den, base, ctx=ctx)
    else:
        res = qpoch_ratio(num, den, base, k, ctx)
    value = res.value
    return value, (res.err_bound + PRODUCT_ROUNDING * ctx.eps) * float(abs(value))


def _inf_ratio_vec(num, den, q, ctx):
    out = 1
    for z in num:
        out = out * qpoch_inf_vec(z, q, ctx)[0]
    for z in den:
        out = out / qpoch_inf_vec(z, q, ctx)[0]
    return out


def _fin_ratio_seq(num, den, q, depth, ctx):
    out = 1
    for u in num:
        out = out * qpoch_seq(u, q, depth, ctx)
    for v in den:
        out = out / qpoch_seq(v, q, depth, ctx)
    return out


def _series_depth(base: QBase, params, plan) -> int:
    if plan is not None:
        return plan.depth
    scale = max([1.0] + [float(abs(v)) for v in params])
    return base.depth_for(scale)


def _plan(base: QBase, plan, scale=1.0) -> TruncationPlan:
    return plan if plan is not None else TruncationPlan.for_base(base, scale)


def _masks(r):
    return itertools.product((True, False), repeat=r)


def _lattice_series(axis, pair, r, depth, ctx):
    """Sum prod_i axis[i][k_i] * prod_{i<j} pair[i, j][k_i, k_j] over the box."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return pair_lattice_sum(axis, pair, ctx)


def _vandermonde_pair(i, j, ti, tj):
    return ti - tj


def _outer(u, v):
    return u[:, None], v[None, :]


# -- classical one-variable identities ----------------------------------------

def qbinomial_lhs(p, plan, ctx):
    base = base_of(p, ctx)
    return eval_phi(SeriesSpec((p.a,), (), p.z, base), ctx=ctx)


def qbinomial_rhs(p, plan, ctx):
    return _prod((p.a * p.z,), (p.z,), base_of(p, ctx), ctx)


def bailey_lhs(p, plan, ctx):
    return bailey_nt87_lhs(p.a, p.b, p.c, p.d, p.e, p.f, base_of(p, ctx), ctx)


def bailey_rhs(p, plan, ctx):
    return bailey_nt87_rhs(p.a, p.b, p.c, p.d, p.e, p.f, base_of(p, ctx), ctx)


def jackson_lhs(p, plan, ctx):
    return jackson_87_lhs(p.a, p.b, p.c, p.d, p.N, base_of(p, ctx), ctx)


def jackson_rhs(p, plan, ctx):
    return jackson_87_rhs(p.a, p.b, p.c, p.d, p.N, base_of(p, ctx), ctx)


def int87_integrand(p, ctx):
    """The one-variable q-integrand, written with the pair +-sqrt(a)."""
    q, a, b, c, d, e, f = p.q, p.a, p.b, p.c, p.d, p.e, p.f
    s = ctx.sqrt(a)

    def integrand(t):
        return _inf_ratio_vec(
            [q * t / a, q * t / b, t / s, -t / s, q * t / c, q * t / d, q * t / e, q * t / f],
            [t, b * t / a, q * t / s, -q * t / s, c * t / a, d * t / a, e * t / a, f * t / a], q, ctx)

    return integrand


def int87_lhs(p, plan, ctx):
    base = base_of(p, ctx)
    return qint_ab(int87_integrand(p, ctx), p.a, p.b, base, _plan(base, plan), ctx)


def int87_rhs(p, plan, ctx):
    q, a, b, c, d, e, f = p.q, p.a, p.b, p.c, p.d, p.e, p.f
    value, err = _prod(
        (q, a / b, b * q / a, a * q / (c * d), a * q / (c * e), a * q / (c * f), a * q / (d * e),
         a * q / (d * f), a * q / (e * f)),
        (b, c, d, e, f, b * c / a, b * d / a, b * e / a, b * f / a), base_of(p, ctx), ctx)
    pre = b * (1 - q)
    return pre * value, float(abs(pre)) * err


def int32_integrand(p, ctx):
    q, a, b, c, d, e, f = p.q, p.a, p.b, p.c, p.d, p.e, p.f

    def integrand(t):
        return _inf_ratio_vec([q * t / a, q * t / b, c * t], [d * t, e * t, f * t], q, ctx)

    return integrand


def int32_lhs(p, plan, ctx):
    """One-variable q-integral behind the nonterminating 3phi2 sum (c = abdef)."""
    base = base_of(p, ctx)
    return qint_ab(int32_integrand(p, ctx), p.a, p.b, base, _plan(base, plan), ctx)


def int32_rhs(p, plan, ctx):
    q, a, b, c, d, e, f = p.q, p.a, p.b, p.c, p.d, p.e, p.f
    value, err = _prod((q, a / b, b * q / a, c / d, c / e, c / f),
                       (a * d, a * e, a * f, b * d, b * e, b * f), base_of(p, ctx), ctx)
    pre = b * (1 - q)
    return pre * value, float(abs(pre)) * err


# -- C_r q-integral and its 8phi7 expansion -----------------------------------

def cn_int87_integrand(p, ctx) -> PairIntegrand:
    q, a, b, c, d, e, f, x, r = p.q, p.a, p.b, p.c, p.d, p.e, p.f, p.x, p.r

    def axis(i, t):
        xi = x[i]
        return (1 - t * t / a) * _inf_ratio_vec(
            [q * t / (a * xi), q * t / b, q * t / c, q * t / d, q * t / e, q * t * xi / f],
            [t * xi, b * t / a, c * t / a, d * t / a, e * t / a, f * t / (a * xi)], q, ctx)

    def pair(i, j, ti, tj):
        return (ti - tj) * (1 - ti * tj / a)

    return PairIntegrand(r, axis, pair)


def cn_int87_lhs(p, plan, ctx):
    base = base_of(p, ctx)
    lows = [p.a * xi for xi in p.x]
    with np.errstate(divide="ignore", invalid="ignore"):
        return mqint_ab(cn_int87_integrand(p, ctx), lows, [p.b] * p.r, base, _plan(base, plan), ctx)


def cn_int87_rhs(p, plan, ctx):
    q, a, b, c, d, e, f, x, r = p.q, p.a, p.b, p.c, p.d, p.e, p.f, p.x, p.r
    base = base_of(p, ctx)
    pre = a ** comb(r, 2) * b**r * (1 - q) ** r
    for i in range(r):
        for j in range(i + 1, r):
            pre *= (x[i] - x[j]) * (1 - a * x[i] * x[j] / f)
    num, den = [], []
    for i, xi in enumerate(x, start=1):
        num += [q, a * xi / b, b * q / (a * xi), a * q ** (2 - i) / (c * d), a * q ** (2 - i) / (c * e),
                a * xi * q / (c * f), a * q ** (2 - i) / (d * e), a * xi * q / (d * f), a * xi * q / (e * f)]
        den += [b * xi, c * xi, d * xi, e * xi, f, b * c * q ** (i - 1) / a, b * d * q ** (i - 1) / a,
                b * e * q ** (i - 1) / a, b * f / (a * xi)]
    value, err = _prod(num, den, base, ctx)
    return pre * value, float(abs(pre)) * err


def _cn_nt87_axis(p, i, in_s, depth, ctx):
    q, a, b, c, d, e, f = p.q, p.a, p.b, p.c, p.d, p.e, p.f
    xi = p.x[i]
    qk = qpowers(q, depth + 1, ctx)
    if in_s:
        lam = a * xi * xi
        poch = _fin_ratio_seq([lam, b * xi, c * xi, d * xi, e * xi, f],
                              [q, a * xi * q / b, a * xi * q / c, a * xi * q / d, a * xi * q / e, lam * q / f],
                              q, depth, ctx)
    else:
        lam = b * b / a
        poch = _fin_ratio_seq([lam, b * xi, b * c / a, b * d / a, b * e / a, b * f / (a * xi)],
                              [q, b * q / (a * xi), b * q / c, b * q / d, b * q / e, b * xi * q / f],
                              q, depth, ctx)
    return (1 - lam * qk * qk) / (1 - lam) * poch * qk


def _cn_nt87_prefactor(p, i, base, ctx):
    q, a, b, c, d, e, f = p.q, p.a, p.b, p.c, p.d, p.e, p.f
    xi = p.x[i]
    return _prod(
        [a * xi * xi * q, c * xi, d * xi, e * xi, f, b / (a * xi), b * q / c, b * q / d, b * q / e, b * xi * q / f],
        [a * xi / b, a * xi * q / c, a * xi * q / d, a * xi * q / e, a * xi * xi * q / f,
         b * b * q / a, b * c / a, b * d / a, b * e / a, b * f / (a * xi)], base, ctx)


def cn_nt87_lhs(p, plan, ctx, mixed_xx=False):
    """Sum over subsets of r-fold very-well-poised series.

    ``mixed_xx=True`` uses ``(1 - b x_i x_j q^{k_i+k_j})`` for the mixed
    pairs instead of the correct ``(1 - b x_i q^{k_i+k_j})``; it exists only
    to show that the variant fails.
    """
    q, a, b, x, r = p.q, p.a, p.b, p.x, p.r
    base = base_of(p, ctx)
    params = [p.a, p.b, p.c, p.d, p.e, p.f, b * b / a] + [a * v * v for v in x]
    depth = _series_depth(base, params, plan)
    qk = qpowers(q, depth + 1, ctx)
    total, err = 0, 0.0
    for mask in _masks(r):
        m = mask.count(False)
        pre = (b / a) ** comb(m, 2)
        pre_err = 0.0
        for i in range(r):
            if not mask[i]:
                val, e_ = _cn_nt87_prefactor(p, i, base, ctx)
                pre_err = pre_err * float(abs(val)) + float(abs(pre)) * e_
                pre *= val
        if pre == 0:
            continue
        axis = [_cn_nt87_axis(p, i, mask[i], depth, ctx) for i in range(r)]
        pair = {}
        for i in range(r):
            for j in range(i + 1, r):
                norm = (x[i] - x[j]) * (1 - a * x[i] * x[j])
                ki, kj = _outer(qk, qk)
                if mask[i] and mask[j]:
                    arr = (x[i] * ki - x[j] * kj) * (1 - a * x[i] * x[j] * ki * kj) / norm
                elif not mask[i] and not mask[j]:
                    arr = (ki - kj) * (1 - b * b * ki * kj / a) / norm
                else:
                    s_, n_ = (i, j) if mask[i] else (j, i)
                    ks, kn = (ki, kj) if mask[i] else (kj, ki)
                    xx = x[s_] * x[n_] if mixed_xx else x[s_]
                    arr = (x[s_] * ks - b * kn / a) * (1 - b * xx * ks * kn) / ((x[s_] - x[n_]) * (1 - a * x[s_] * x[n_]))
                pair[i, j] = arr
        value, shells, mass = _lattice_series(axis, pair, r, depth, ctx)
        total += pre * value
        err += float(abs(pre)) * lattice_error(shells, mass, base, ctx) + pre_err * float(abs(value))
    return total, err


def cn_nt87_rhs(p, plan, ctx):
    q, a, b, c, d, e, f, x, r = p.q, p.a, p.b, p.c, p.d, p.e, p.f, p.x, p.r
    pre = 1
    for i in range(r):
        for j in range(i + 1, r):
            pre *= (1 - a * x[i] * x[j] / f) / (1 - a * x[i] * x[j])
    num, den = [], []
    for i, xi in enumerate(x, start=1):
        num += [a * xi * xi * q, b / (a * xi), a * q ** (2 - i) / (c * d), a * q ** (2 - i) / (c * e),
                a * xi * q / (c * f), a * q ** (2 - i) / (d * e), a * xi * q / (d * f), a * xi * q / (e * f)]
        den += [a * xi * q / c, a * xi * q / d, a * xi * q / e, a * xi * xi * q / f,
                b * c * q ** (i - 1) / a, b * d * q ** (i - 1) / a, b * e * q ** (i - 1) / a, b * f / (a * xi)]
    value, err = _prod(num, den, base_of(p, ctx), ctx)
    return pre * value, float(abs(pre)) * err


def expansion_divisor(p, ctx):
    """Factor relating the q-integral to the normalised 8phi7 multiple sum."""
    q, a, b, c, d, e, f, x, r = p.q, p.a, p.b, p.c, p.d, p.e, p.f, p.x, p.r
    out = (-1) ** r * a ** comb(r + 1, 2) * (1 - q) ** r
    for xi in x:
        out *= xi
    for i in range(r):
        for j in range(i + 1, r):
            out *= (x[i] - x[j]) * (1 - a * x[i] * x[j])
    num, den = [], []
    for xi in x:
        num += [q, a * xi * q / b, a * xi * q / c, a * xi * q / d, a * xi * q / e, a * xi * xi * q / f]
        den += [a * xi * xi * q, b * xi, c * xi, d * xi, e * xi, f]
    value, err = _prod(num, den, base_of(p, ctx), ctx)
    return out * value, float(abs(out)) * err


def cn_expansion_sum(p, plan, ctx):
    """The explicit 2**r-fold sum of the C_r q-integral, with the
    ``(-1)**chi(i > j)`` sign on mixed pairs (kept un-normalised)."""
    q, a, b, c, d, e, f, x, r = p.q, p.a, p.b, p.c, p.d, p.e, p.f, p.x, p.r
    base = base_of(p, ctx)
    depth = _plan(base, plan).depth
    qk = qpowers(q, depth + 1, ctx)
    total, err = 0, 0.0
    for mask in _masks(r):
        s = mask.count(True)
        m = r - s
        pre = (-1) ** s * a**s * b**m * (1 - q) ** r * a ** comb(s, 2) * b ** comb(m, 2)
        for i in range(r):
            if mask[i]:
                pre *= x[i]
        axis = []
        for i in range(r):
            xi = x[i]
            if mask[i]:
                t = a * xi * qk
                num = [q * qk, a * xi * q * qk / b, a * xi * q * qk / c, a * xi * q * qk / d, a * xi * q * qk / e,
                       a * xi * xi * q * qk / f]
                den = [a * xi * xi * qk, b * xi * qk, c * xi * qk, d * xi * qk, e * xi * qk, f * qk]
                diag = 1 - a * xi * xi * qk * qk
            else:
                num = [b * q * qk / (a * xi), q * qk, b * q * qk / c, b * q * qk / d, b * q * qk / e,
                       b * xi * q * qk / f]
                den = [b * xi * qk, b * b * qk / a, b * c * qk / a, b * d * qk / a, b * e * qk / a,
                       b * f * qk / (a * xi)]
                diag = 1 - b * b * qk * qk / a
            axis.append(diag * _inf_ratio_vec(num, den, q, ctx) * qk)
        pair = {}
        for i in range(r):
            for j in range(i + 1, r):
                ki, kj = _outer(qk, qk)
                if mask[i] and mask[j]:
                    arr = (x[i] * ki - x[j] * kj) * (1 - a * x[i] * x[j] * ki * kj)
                elif not mask[i] and not mask[j]:
                    arr = (ki - kj) * (1 - b * b * ki * kj / a)
                elif mask[i]:
                    arr = (a * x[i] * ki - b * kj) * (1 - b * x[i] * ki * kj)
                else:
                    # i not in S, j in S: the pair enters with the sign (-1)**chi(j > i)
                    arr = -(a * x[j] * kj - b * ki) * (1 - b * x[j] * ki * kj)
                pair[i, j] = arr
        value, shells, mass = _lattice_series(axis, pair, r, depth, ctx)
        total += pre * value
        err += float(abs(pre)) * lattice_error(shells, mass, base, ctx)
    return total, err


# -- terminating C_r 8phi7 ----------------------------------------------------

def cn_jackson_lhs(p, plan, ctx):
    q, a, b, c, d, x, r, N = p.q, p.a, p.b, p.c, p.d, p.x, p.r, p.N
    qk = qpowers(q, N + 1, ctx)
    axis = []
    for xi in x:
        lam = a * xi * xi
        poch = _fin_ratio_seq(
            [lam, b * xi, c * xi, d * xi, a * a * xi * q ** (2 - r + N) / (b * c * d), q ** (-N)],
            [q, a * xi * q / b, a * xi * q / c, a * xi * q / d, b * c * d * xi * q ** (r - 1 - N) / a,
             lam * q ** (1 + N)], q, N, ctx)
        axis.append((1 - lam * qk * qk) / (1 - lam) * poch * qk)
    pair = {}
    for i in range(r):
        for j in range(i + 1, r):
            ki, kj = _outer(qk, qk)
            pair[i, j] = ((x[i] * ki - x[j] * kj) * (1 - a * x[i] * x[j] * ki * kj)
                          / ((x[i] - x[j]) * (1 - a * x[i] * x[j])))
    value, _, mass = _lattice_series(axis, pair, r, N, ctx)
    return value, ROUNDING_FACTOR * ctx.eps * mass


def cn_jackson_rhs(p, plan, ctx):
    q, a, b, c, d, x, r, N = p.q, p.a, p.b, p.c, p.d, p.x, p.r, p.N
    pre = 1
    for i in range(r):
        for j in range(i + 1, r):
            pre *= (1 - a * x[i] * x[j] * q**N) / (1 - a * x[i] * x[j])
    num, den = [], []
    for i, xi in enumerate(x, start=1):
        num += [a * xi * xi * q, a * q ** (2 - i) / (b * c), a * q ** (2 - i) / (b * d), a * q ** (2 - i) / (c * d)]
        den += [a * q ** (2 - r) / (b * c * d * xi), a * xi * q / d, a * xi * q / c, a * xi * q / b]
    value, err = _prod(num, den, base_of(p, ctx), ctx, k=N)
    return pre * value, float(abs(pre)) * err


# -- C_r / A_r 3phi2-type q-integrals and sums ---------------------------------

def cn_int32_integrand(p, ctx) -> PairIntegrand:
    q, a, b, c, d, e, f, x, r = p.q, p.a, p.b, p.c, p.d, p.e, p.f, p.x, p.r

    def axis(i, t):
        return _inf_ratio_vec([q * t / (a * x[i]), q * t / b, c * t], [d * t, e * t, f * t / x[i]], q, ctx)

    return PairIntegrand(r, axis, _vandermonde_pair)


def cn_int32_lhs(p, plan, ctx):
    base = base_of(p, ctx)
    lows = [p.a * xi for xi in p.x]
    with np.errstate(divide="ignore", invalid="ignore"):
        return mqint_ab(cn_int32_integrand(p, ctx), lows, [p.b] * p.r, base, _plan(base, plan), ctx)


def cn_int32_rhs(p, plan, ctx):
    q, a, b, c, d, e, f, x, r = p.q, p.a, p.b, p.c, p.d, p.e, p.f, p.x, p.r
    pre = a ** comb(r, 2) * b**r * (1 - q) ** r
    for i in range(r):
        for j in range(i + 1, r):
            pre *= x[i] - x[j]
    num, den = [], []
    for i, xi in enumerate(x, start=1):
        num += [q, a * xi / b, b * q / (a * xi), c * q ** (1 - i) / d, c * q ** (1 - i) / e, c * xi / f]
        den += [a * d * xi, a * e * xi, a * f, b * d * q ** (i - 1), b * e * q ** (i - 1), b * f / xi]
    value, err = _prod(num, den, base_of(p, ctx), ctx)
    return pre * value, float(abs(pre)) * err


def ar_nt32_lhs(p, plan, ctx, mixed_shift=-1):
    """A_r nonterminating 3phi2 sum over subsets.

    The mixed pair factor is ``(e x_i q^{k_i + mixed_shift} - q^{k_j})``;
    only ``mixed_shift = -1`` gives a valid identity.
    """
    q, a, b, c, e, f, x, r = p.q, p.a, p.b, p.c, p.e, p.f, p.x, p.r
    base = base_of(p, ctx)
    params = [a, b, c, e, f, q / e] + [e * v for v in x] + [f * v for v in x] + [q * q / (e * v) for v in x]
    depth = _series_depth(base, params, plan)
    qk = qpowers(q, depth + 1, ctx)
    total, err = 0, 0.0
    for mask in _masks(r):
        s = mask.count(True)
        pre = (q / e) ** (comb(r, 2) - comb(s, 2))
        num, den = [], []
        for i in range(r):
            if not mask[i]:
                xi = x[i]
                num += [a * xi, b * xi, c, q / (e * xi), f * q / e]
                den += [a * q / e, b * q / e, c * q / (e * xi), e * xi / q, f * xi]
        val, pre_err = _prod(num, den, base, ctx)
        pre_err *= float(abs(pre))
        pre *= val
        if pre == 0:
            continue
        axis = []
        for i in range(r):
            xi = x[i]
            if mask[i]:
                poch = _fin_ratio_seq([a * xi, b * xi, c], [q, e * xi, f * xi], q, depth, ctx)
            else:
                poch = _fin_ratio_seq([a * q / e, b * q / e, c * q / (e * xi)],
                                      [q, q * q / (e * xi), f * q / e], q, depth, ctx)
            axis.append(poch * qk)
        pair = {}
        for i in range(r):
            for j in range(i + 1, r):
                ki, kj = _outer(qk, qk)
                if mask[i] and mask[j]:
                    arr = (x[i] * ki - x[j] * kj) / (x[i] - x[j])
                elif not mask[i] and not mask[j]:
                    arr = (ki - kj) / (x[i] - x[j])
                else:
                    s_, n_ = (i, j) if mask[i] else (j, i)
                    ks, kn = (ki, kj) if mask[i] else (kj, ki)
                    arr = (e * x[s_] * ks * q**mixed_shift - kn) / (x[s_] - x[n_])
                pair[i, j] = arr
        value, shells, mass = _lattice_series(axis, pair, r, depth, ctx)
        total += pre * value
        err += float(abs(pre)) * lattice_error(shells, mass, base, ctx) + pre_err * float(abs(value))
    return total, err


def ar_nt32_rhs(p, plan, ctx):
    q, a, b, c, e, f, x = p.q, p.a, p.b, p.c, p.e, p.f, p.x
    num, den = [], []
    for i, xi in enumerate(x, start=1):
        num += [q / (e * xi), f * q ** (1 - i) / a, f * q ** (1 - i) / b, f * xi / c]
        den += [a * q**i / e, b * q**i / e, c * q / (e * xi), f * xi]
    return _prod(num, den, base_of(p, ctx), ctx)


def ar_pfaff_lhs(p, plan, ctx, extra_cx=False):
    """A_r terminating q-Pfaff-Saalschutz sum (``extra_cx`` adds a spurious
    ``(c x_i;q)_k`` numerator factor, for demonstration only)."""
    q, a, b, c, x, r, N = p.q, p.a, p.b, p.c, p.x, p.r, p.N
    qk = qpowers(q, N + 1, ctx)
    axis = []
    for xi in x:
        upper = [a * xi, b * xi, q ** (-N)] + ([c * xi] if extra_cx else [])
        poch = _fin_ratio_seq(upper, [q, c * xi, a * b * xi * q ** (r - N) / c], q, N, ctx)
        axis.append(poch * qk)
    pair = {}
    for i in range(r):
        for j in range(i + 1, r):
            ki, kj = _outer(qk, qk)
            pair[i, j] = (x[i] * ki - x[j] * kj) / (x[i] - x[j])
    value, _, mass = _lattice_series(axis, pair, r, N, ctx)
    return value, ROUNDING_FACTOR * ctx.eps * mass


def ar_pfaff_rhs(p, plan, ctx):
    q, a, b, c, x, r, N = p.q, p.a, p.b, p.c, p.x, p.r, p.N
    num, den = [], []
    for i, xi in enumerate(x, start=1):
        num += [c * q ** (1 - i) / a, c * q ** (1 - i) / b]
        den += [c * xi, c * q ** (1 - r) / (a * b * xi)]
    return _prod(num, den, base_of(p, ctx), ctx, k=N)


def andrews_askey_integrand(p, ctx) -> PairIntegrand:
    q, a, b, c, d, x, r = p.q, p.a, p.b, p.c, p.d, p.x, p.r

    def axis(i, t):
        return _inf_ratio_vec([-q * t / (a * x[i]), q * t / b], [-c * t / a, d * t / b], q, ctx)

    return PairIntegrand(r, axis, _vandermonde_pair)


def andrews_askey_lhs(p, plan, ctx):
    base = base_of(p, ctx)
    lows = [-p.a * xi for xi in p.x]
    with np.errstate(divide="ignore", invalid="ignore"):
        return mqint_ab(andrews_askey_integrand(p, ctx), lows, [p.b] * p.r, base, _plan(base, plan), ctx)


def andrews_askey_rhs(p, plan, ctx):
    q, a, b, c, d, x, r = p.q, p.a, p.b, p.c, p.d, p.x, p.r
    pre = (-a) ** comb(r, 2) * b**r * (1 - q) ** r
    for i in range(r):
        for j in range(i + 1, r):
            pre *= x[i] - x[j]
    num, den = [], []
    for i, xi in enumerate(x, start=1):
        num += [q, -a * xi / b, -b * q / (a * xi), c * d * q ** (r - 1) * xi]
        den += [c * xi, -a * d * xi / b, -b * c * q ** (i - 1) / a, d * q ** (i - 1)]
    value, err = _prod(num, den, base_of(p, ctx), ctx)
    return pre * value, float(abs(pre)) * err


# -- real beta integrals -------------------------------------------------------

QUAD_NODES = 48


def _real(v):
    return float(v.real)


def mbeta_det_lhs(p, plan, ctx):
    """Determinant of one-dimensional Euler beta integrals."""
    a, b, r = p.a, p.b, p.r
    x = p.x
    rows = []
    for xi in x:
        rows.append([gamma(a + xi + r - j, ctx) * gamma(b, ctx) / gamma(a + b + xi + r - j, ctx)
                     for j in range(1, r + 1)])
    value = det(rows, ctx)
    return value, PRODUCT_ROUNDING * r * r * ctx.eps * float(abs(value))


def mbeta_quad_lhs(p, plan=None, ctx=None, nodes: int = QUAD_NODES):
    """Direct r-fold quadrature of the Vandermonde-weighted beta integrand."""
    a, b, r = _real(p.a), _real(p.b), p.r
    x = [_real(v) for v in p.x]

    def integrand(*args):
        u, _, w = args[:r], args[r:2 * r], args[2 * r:]
        val = 1.0
        for i in range(r):
            val = val * u[i] ** (a - 1 + x[i]) * w[i] ** (b - 1)
        for i in range(r):
            for j in range(i + 1, r):
                val = val * (u[i] - u[j])
        return val

    value, err = quad_box(integrand, [0.0] * r, [1.0] * r, nodes, offsets=True)
    return complex(value), err


def mbeta_rhs(p, plan, ctx):
    a, b, x, r = p.a, p.b, p.x, p.r
    out = ctx.num(1)
    for i in range(r):
        for j in range(i + 1, r):
            out *= x[i] - x[j]
    for i, xi in enumerate(x, start=1):
        out *= gamma(a + xi, ctx) * gamma(b + i - 1, ctx) / gamma(a + b + xi + r - 1, ctx)
    return out, PRODUCT_ROUNDING * r * ctx.eps * float(abs(out))


def beta_limit_lhs(p, plan=None, ctx=None, nodes: int = QUAD_NODES):
    a, b, c, d, r = _real(p.a), _real(p.b), _real(p.c), _real(p.d), p.r
    x = [_real(v) for v in p.x]

    def integrand(*args):
        # t, t + c and d - t for each axis
        t, lo, hi = args[:r], args[r:2 * r], args[2 * r:]
        val = 1.0
        for i in range(r):
            val = val * (lo[i] / c) ** (a - 1 + x[i]) * (hi[i] / d) ** (b - 1)
        for i in range(r):
            for j in range(i + 1, r):
                val = val * (t[i] - t[j])
        return val

    value, err = quad_box(integrand, [-c] * r, [d] * r, nodes, offsets=True)
    return complex(value), err


def beta_limit_rhs(p, plan, ctx, literal_denominator=False):
    """Closed form of the real multiple beta integral over ``[-c, d]**r``.

    The Gamma denominator is ``Gamma(a + b + x_i + r - 1)``; the variant
    ``Gamma(b + r + x_i)`` (``literal_denominator=True``) is kept to show it
    fails already at r = 1.
    """
    a, b, c, d, x, r = p.a, p.b, p.c, p.d, p.x, p.r
    out = ctx.num(1)
    for i in range(r):
        for j in range(i + 1, r):
            out *= x[i] - x[j]
    sx = sum(x)
    for i, xi in enumerate(x, start=1):
        den_arg = (a + b + r - a + xi) if literal_denominator else (a + b + xi + r - 1)
        out *= gamma(a + xi, ctx) * gamma(b + i - 1, ctx) / gamma(den_arg, ctx)
    out *= c ** (r * (1 - a) - sx) * d ** (r * (1 - b)) * (c + d) ** (r * (a + b - 1) + comb(r, 2) + sx)
    return out, PRODUCT_ROUNDING * r * ctx.eps * float(abs(out))
