"""Determinants: a pivoted elimination routine, both sides of the
q-determinant lemma, and its q -> 1 shifted-factorial form.
"""
from __future__ import annotations

from math import comb
from typing import Sequence

from .errors import PoleError, ZeroXError
from .qpoch import as_base, finite_qpoch
from .scalar import DOUBLE, PrecisionContext, shifted_factorial


def det(m: Sequence[Sequence], ctx: PrecisionContext = DOUBLE):
    """Determinant by Gaussian elimination with partial pivoting by modulus."""
    rows = [[ctx.num(v) for v in row] for row in m]
    r = len(rows)
    if r == 0 or any(len(row) != r for row in rows):
        raise ValueError("det needs a non-empty square matrix")
    out = ctx.num(1)
    for col in range(r):
        piv = max(range(col, r), key=lambda i: abs(rows[i][col]))
        if rows[piv][col] == 0:
            return 0 * out
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
            out = -out
        pivot = rows[col][col]
        out *= pivot
        for i in range(col + 1, r):
            factor = rows[i][col] / pivot
            if factor != 0:
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[col])]
    return out


def _ipow(z, n: int, ctx):
    # integer power by repeated multiplication, branch-free for complex z
    out = ctx.num(1)
    for _ in range(n):
        out *= z
    return out


def lemma_det_lhs(X: Sequence, A, B, C, base, ctx: PrecisionContext = DOUBLE):
    """det_{i,j} (A X_i, A C / X_i; q)_{r-j} / (B X_i, B C / X_i; q)_{r-j}."""
    base = as_base(base, ctx)
    X = [ctx.num(v) for v in X]
    A, B, C = ctx.num(A), ctx.num(B), ctx.num(C)
    if any(abs(x) <= ctx.abs_floor for x in X):
        raise ZeroXError("X_i must be nonzero")
    r = len(X)
    matrix = []
    for i, x in enumerate(X):
        row = []
        for j in range(1, r + 1):
            k = r - j
            num = finite_qpoch(A * x, base, k, ctx).value * finite_qpoch(A * C / x, base, k, ctx).value
            den = finite_qpoch(B * x, base, k, ctx).value * finite_qpoch(B * C / x, base, k, ctx).value
            if abs(den) <= ctx.abs_floor:
                raise PoleError(f"lemma matrix entry ({i + 1},{j}) has a vanishing denominator")
            row.append(num / den)
        matrix.append(row)
    return det(matrix, ctx)


def lemma_det_rhs(X: Sequence, A, B, C, base, ctx: PrecisionContext = DOUBLE):
    """Closed-form product side of the q-determinant lemma."""
    base = as_base(base, ctx)
    q = ctx.num(base.q)
    X = [ctx.num(v) for v in X]
    A, B, C = ctx.num(A), ctx.num(B), ctx.num(C)
    if any(abs(x) <= ctx.abs_floor for x in X):
        raise ZeroXError("X_i must be nonzero")
    r = len(X)
    out = _ipow(A, comb(r, 2), ctx) * _ipow(q, comb(r, 3), ctx)
    for i in range(r):
        for j in range(i + 1, r):
            out *= (X[j] - X[i]) * (1 - C / (X[i] * X[j]))
    for idx, x in enumerate(X, start=1):
        num = finite_qpoch(B / A, base, idx - 1, ctx).value
        num *= finite_qpoch(A * B * C * _ipow(q, 2 * r - 2 * idx, ctx), base, idx - 1, ctx).value
        den = finite_qpoch(B * x, base, r - 1, ctx).value * finite_qpoch(B * C / x, base, r - 1, ctx).value
        if abs(den) <= ctx.abs_floor:
            raise PoleError(f"(B X_{idx}, B C / X_{idx}; q)_{r - 1} vanishes")
        out *= num / den
    return out


def detcor_lhs(x: Sequence[float], a: float, b: float, ctx: PrecisionContext = DOUBLE):
    """det_{i,j} (a + x_i)_{r-j} / (a + b + x_i)_{r-j} with rising factorials."""
    r = len(x)
    x, a, b = [ctx.num(v) for v in x], ctx.num(a), ctx.num(b)
    matrix = []
    for i, xi in enumerate(x):
        row = []
        for j in range(1, r + 1):
            den = shifted_factorial(a + b + xi, r - j, ctx)
            if abs(den) <= ctx.abs_floor:
                raise PoleError(f"(a + b + x_{i + 1})_{r - j} vanishes")
            row.append(shifted_factorial(a + xi, r - j, ctx) / den)
        matrix.append(row)
    return det(matrix, ctx)


def detcor_rhs(x: Sequence[float], a: float, b: float, ctx: PrecisionContext = DOUBLE):
    r = len(x)
    x, a, b = [ctx.num(v) for v in x], ctx.num(a), ctx.num(b)
    out = ctx.num(1)
    for i in range(r):
        for j in range(i + 1, r):
            out *= x[i] - x[j]
    for i, xi in enumerate(x, start=1):
        den = shifted_factorial(a + b + xi, r - 1, ctx)
        if abs(den) <= ctx.abs_floor:
            raise PoleError(f"(a + b + x_{i})_{r - 1} vanishes")
        out *= shifted_factorial(b, i - 1, ctx) / den
    return out


def vandermonde(u: Sequence, ctx: PrecisionContext = DOUBLE):
    """prod_{i<j} (u_i - u_j), the value of det(u_i^{r-j})."""
    out = ctx.num(1)
    for i in range(len(u)):
        for j in range(i + 1, len(u)):
            out *= ctx.num(u[i]) - ctx.num(u[j])
    return out
