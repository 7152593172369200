"""Jackson q-integrals (single, box, and general boxes via the subset sum)
and a small Gauss-Legendre quadrature for real integrals.

Integrands are vectorised: an r-variate integrand is called once with
``r`` open-mesh arrays (axis ``i`` has shape ``(1, ..., K+1, ..., 1)``),
so any per-axis factor is evaluated on ``K+1`` points only and pair
factors on ``(K+1)**2`` points, then broadcast.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import gmpy2
import numpy as np

from .errors import IntegrandError, RankTooLarge
from .qpoch import QBase, as_base, qpowers
from .scalar import DOUBLE, ROUNDING_FACTOR, PrecisionContext

MAX_RANK = 4
# lattice cells evaluated per integrand call before the outer axis is chunked
_CHUNK_CELLS = 2_000_000


@dataclass(frozen=True)
class TruncationPlan:
    depth: int
    tail_tol: float = 1e-17

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("truncation depth must be >= 1")
        if self.tail_tol <= 0:
            raise ValueError("tail_tol must be positive")

    @classmethod
    def for_base(cls, base: QBase, scale: float = 1.0) -> "TruncationPlan":
        return cls(base.depth_for(max(scale, 1.0)), base.tail_tol)

    def doubled(self) -> "TruncationPlan":
        return TruncationPlan(2 * self.depth, self.tail_tol)


def _open_mesh(arrays):
    r = len(arrays)
    out = []
    for i, arr in enumerate(arrays):
        shape = [1] * r
        shape[i] = len(arr)
        out.append(arr.reshape(shape))
    return out


def _finite(values, ctx) -> np.ndarray:
    if ctx.is_extended:
        mp = ctx.mp
        flat = [mp.isfinite(v.real) and mp.isfinite(v.imag) for v in np.ravel(values)]
        return np.array(flat, dtype=bool).reshape(np.shape(values))
    return np.isfinite(values)


def lattice_sum(term: Callable, r: int, depth: int, ctx: PrecisionContext = DOUBLE,
                points: Sequence[np.ndarray] | None = None):
    """Sum ``term`` over the box ``{0..depth}**r``.

    ``term`` receives ``r`` open-mesh integer index arrays and returns the
    broadcast array of terms.  Returns ``(total, shells, mass)`` where
    ``shells[i]`` is the sum of ``|term|`` over the face ``k_i = depth``
    (the input of the geometric tail estimate) and ``mass`` the sum of all
    ``|term|`` (the input of the rounding estimate).
    """
    n = depth + 1
    idx = np.arange(n)
    total = 0
    shells = [0.0] * r
    mass = 0.0
    rows = max(1, _CHUNK_CELLS // max(1, n ** (r - 1)))
    for start in range(0, n, rows):
        block = idx[start:start + rows]
        mesh = _open_mesh([block] + [idx] * (r - 1))
        vals = np.broadcast_to(term(*mesh), tuple(len(m) for m in [block] + [idx] * (r - 1)))
        bad = ~_finite(vals, ctx)
        if bad.any():
            where = tuple(int(v) for v in np.argwhere(bad)[0])
            where = (where[0] + start,) + where[1:]
            point = None if points is None else tuple(points[i][k] for i, k in enumerate(where))
            raise IntegrandError(f"non-finite term at lattice index {where}", point=point)
        total = total + vals.sum()
        mags = np.abs(vals)
        mass += float(np.sum(mags))
        if block[-1] == depth:
            shells[0] += float(np.sum(mags[-1]))
        for i in range(1, r):
            shells[i] += float(np.sum(np.take(mags, -1, axis=i)))
    return total, shells, mass


def lattice_error(shells, mass, base: QBase, ctx: PrecisionContext) -> float:
    """Geometric tail estimate from the outer shells plus a rounding term."""
    rho = base.modulus
    return sum(shells) * rho / (1 - rho) + ROUNDING_FACTOR * ctx.eps * mass


# -- structured lattices: per-axis factors times pairwise factors -------------------
# The C_r / A_r summands have the form prod_i A_i[k_i] * prod_{i<j} P_ij[k_i, k_j].
# For r <= 3 the lattice sum contracts to matrix products, O(K**r) operations
# without materialising the full lattice; magnitudes for the error budget are
# carried along in float64.  Extended contexts contract with gmpy2 numbers,
# which are an order of magnitude faster than mpmath objects.

def _gmp_prec(ctx) -> int:
    return ctx.mp.prec + 16


def _mpf_to_gmp(x):
    sign, man, exp, _ = x._mpf_
    if not man:
        return gmpy2.mpfr(0)
    v = gmpy2.mul_2exp(gmpy2.mpfr(man), exp)
    return -v if sign else v


def _to_gmp(arr):
    conv = np.frompyfunc(lambda z: gmpy2.mpc(_mpf_to_gmp(z.real), _mpf_to_gmp(z.imag)), 1, 1)
    return conv(arr)


def _from_gmp(z, ctx):
    mp = ctx.mp

    def part(v):
        man, exp = v.as_mantissa_exp()
        return mp.mpf((int(man), int(exp)))

    return mp.mpc(part(z.real), part(z.imag))


def _contract(axis, pair):
    r = len(axis)
    if r == 1:
        return axis[0].sum()
    if r == 2:
        return axis[0] @ (pair[0, 1] @ axis[1])
    if r == 3:
        w = (pair[0, 2] * axis[2][None, :]) @ pair[1, 2].T
        return axis[0] @ ((pair[0, 1] * w) @ axis[1])
    # peel the last axis: its pair columns fold into the remaining axes
    last = r - 1
    rest = {key: v for key, v in pair.items() if last not in key}
    total = 0
    for k, weight in enumerate(axis[last]):
        folded = [axis[i] * pair[i, last][:, k] for i in range(last)]
        total = total + weight * _contract(folded, rest)
    return total


def _check_finite(arrays, ctx, what):
    for key, arr in arrays:
        bad = ~_finite(arr, ctx)
        if bad.any():
            where = tuple(int(v) for v in np.argwhere(bad)[0])
            raise IntegrandError(f"non-finite {what} factor {key} at index {where}", point=(key, where))


def pair_lattice_sum(axis: Sequence[np.ndarray], pair: dict, ctx: PrecisionContext = DOUBLE):
    """Sum ``prod_i axis[i][k_i] * prod_{i<j} pair[i, j][k_i, k_j]`` over
    ``{0..K}**r``.

    Same return contract as :func:`lattice_sum`.  The sum is contracted as
    matrix products (ranks up to 3) with further axes peeled off one index
    at a time.
    """
    r = len(axis)
    depth = len(axis[0]) - 1
    _check_finite(enumerate(axis), ctx, "axis")
    _check_finite(pair.items(), ctx, "pair")
    mag_axis = [np.abs(a).astype(float) for a in axis]
    mag_pair = {key: np.abs(v).astype(float) for key, v in pair.items()}
    mass = float(_contract(mag_axis, mag_pair))
    shells = []
    for i in range(r):
        face = [m if j != i else np.where(np.arange(depth + 1) == depth, m, 0.0) for j, m in enumerate(mag_axis)]
        shells.append(float(_contract(face, mag_pair)))
    if ctx.is_extended:
        with gmpy2.context(precision=_gmp_prec(ctx)):
            total = _contract([_to_gmp(a) for a in axis], {k: _to_gmp(v) for k, v in pair.items()})
            total = _from_gmp(gmpy2.mpc(total), ctx)
    else:
        total = _contract(axis, pair)
    return total, shells, mass


class PairIntegrand:
    """Integrand ``prod_i g_i(t_i) * prod_{i<j} h(i, j, t_i, t_j)``.

    ``axis(i, t)`` and ``pair(i, j, ti, tj)`` are vectorised; ``pair`` is
    called with a column ``ti`` and a row ``tj``.  Instances are ordinary
    callables too, evaluating on broadcast open-mesh arrays.
    """

    def __init__(self, r: int, axis: Callable, pair: Callable | None = None):
        self.r = r
        self.axis = axis
        self.pair = pair

    def __call__(self, *t):
        out = 1
        for i in range(self.r):
            out = out * self.axis(i, t[i])
        if self.pair is not None:
            for i in range(self.r):
                for j in range(i + 1, self.r):
                    out = out * self.pair(i, j, t[i], t[j])
        return out


def _mqint_box_pairs(f: PairIntegrand, points, qk, ctx):
    r = len(points)
    axis = [f.axis(i, points[i]) * qk for i in range(r)]
    pair = {}
    if f.pair is not None:
        for i in range(r):
            for j in range(i + 1, r):
                pair[i, j] = f.pair(i, j, points[i][:, None], points[j][None, :])
    else:
        one = np.ones((len(qk), len(qk)), dtype=object if ctx.is_extended else complex)
        if ctx.is_extended:
            one[:] = ctx.num(1)
        pair = {(i, j): one for i in range(r) for j in range(i + 1, r)}
    try:
        return pair_lattice_sum(axis, pair, ctx)
    except IntegrandError as exc:
        key, where = exc.point
        if isinstance(key, int):
            point = points[key][where[0]]
        else:
            point = (points[key[0]][where[0]], points[key[1]][where[1]])
        raise IntegrandError(str(exc), point=point) from None


def mqint_box(f: Callable, a: Sequence, base, plan: TruncationPlan, ctx: PrecisionContext = DOUBLE,
              max_rank: int = MAX_RANK):
    """Multiple q-integral over ``[0, a_1] x ... x [0, a_r]``.

    Returns ``(value, err_bound)``.
    """
    base = as_base(base, ctx)
    r = len(a)
    if r > max_rank:
        raise RankTooLarge(f"rank {r} exceeds the configured maximum {max_rank}")
    q = ctx.num(base.q)
    K = plan.depth
    qk = qpowers(q, K + 1, ctx)
    corners = [ctx.num(v) for v in a]
    points = [c * qk for c in corners]

    if isinstance(f, PairIntegrand) and r <= 3:
        total, shells, mass = _mqint_box_pairs(f, points, qk, ctx)
    else:
        def term(*ks):
            value = f(*(points[i][k] for i, k in enumerate(ks)))
            weight = qk[ks[0]]
            for k in ks[1:]:
                weight = weight * qk[k]
            return value * weight

        total, shells, mass = lattice_sum(term, r, K, ctx, points)
    pre = (1 - q) ** r
    for c in corners:
        pre *= c
    return pre * total, float(abs(pre)) * lattice_error(shells, mass, base, ctx)


def qint_0a(f: Callable, a, base, plan: TruncationPlan, ctx: PrecisionContext = DOUBLE):
    """Jackson integral of ``f`` over ``[0, a]``."""
    return mqint_box(f, [a], base, plan, ctx)


def qint_ab(f: Callable, a, b, base, plan: TruncationPlan, ctx: PrecisionContext = DOUBLE):
    """Jackson integral over ``[a, b]`` as the difference of two [0, .] integrals."""
    upper, err_u = qint_0a(f, b, base, plan, ctx)
    lower, err_l = qint_0a(f, a, base, plan, ctx)
    return upper - lower, err_u + err_l


def mqint_ab(f: Callable, a: Sequence, b: Sequence, base, plan: TruncationPlan,
             ctx: PrecisionContext = DOUBLE, max_rank: int = MAX_RANK):
    """Multiple q-integral over ``prod [a_i, b_i]`` via the 2**r subset sum.

    The subset ``S`` takes the lower endpoint on the axes it contains and
    carries the sign ``(-1)**|S|``.
    """
    r = len(a)
    if len(b) != r:
        raise ValueError("lower and upper bound vectors differ in length")
    if r > max_rank:
        raise RankTooLarge(f"rank {r} exceeds the configured maximum {max_rank}")
    total = 0
    err = 0.0
    for mask in itertools.product((False, True), repeat=r):
        if any(m and a[i] == 0 for i, m in enumerate(mask)):
            continue
        corners = [a[i] if m else b[i] for i, m in enumerate(mask)]
        value, e = mqint_box(f, corners, base, plan, ctx, max_rank)
        total = total - value if sum(mask) % 2 else total + value
        err += e
    return total, err


# -- real quadrature for the q -> 1 checks -------------------------------------

_CLUSTER_POWER = 6


def _cluster_rule(nodes: int):
    """Gauss-Legendre nodes on [0, 1] pushed to the endpoints.

    The map ``u = s^p / (s^p + (1-s)^p)`` flattens algebraic endpoint
    singularities such as ``u**alpha (1-u)**beta`` with ``alpha, beta > -1``.
    Returns ``(u, 1 - u, weights)``; the complement is formed directly so it
    keeps full relative accuracy near ``u = 1``.
    """
    x, w = np.polynomial.legendre.leggauss(nodes)
    s = 0.5 * (x + 1)
    w = 0.5 * w
    p = _CLUSTER_POWER
    sp, tp = s**p, (1 - s) ** p
    den = sp + tp
    du = p * (s ** (p - 1) * tp + sp * (1 - s) ** (p - 1)) / den**2
    return sp / den, tp / den, w * du


def _quad_fixed(f, lows, highs, nodes, offsets):
    r = len(lows)
    u, v, w = _cluster_rule(nodes)
    widths = [hi - lo for lo, hi in zip(lows, highs)]
    axes = [lo + h * u for lo, h in zip(lows, widths)]
    args = _open_mesh(axes)
    if offsets:
        args += _open_mesh([h * u for h in widths]) + _open_mesh([h * v for h in widths])
    vals = np.asarray(f(*args), dtype=float)
    vals = np.broadcast_to(vals, (nodes,) * r)
    for i in reversed(range(r)):
        vals = vals @ (widths[i] * w)
    return float(vals)


def quad_box(f: Callable, lows: Sequence[float], highs: Sequence[float], nodes: int = 48, offsets: bool = False):
    """Tensor-product quadrature over a box with ``2 * nodes`` points per axis.

    The error estimate compares the rules with ``nodes // 2``, ``nodes`` and
    ``2 * nodes`` points: with differences ``e1 > e2`` the convergence is
    taken as geometric and the estimate is ``e2**2 / e1``, otherwise ``e2``.

    With ``offsets=True`` the integrand is called as ``f(*t, *(t - low), *(high - t))``
    where the distances to both endpoints are computed without cancellation.
    """
    rough = _quad_fixed(f, lows, highs, max(2, nodes // 2), offsets)
    coarse = _quad_fixed(f, lows, highs, nodes, offsets)
    fine = _quad_fixed(f, lows, highs, 2 * nodes, offsets)
    e1, e2 = abs(coarse - rough), abs(fine - coarse)
    est = e2 * e2 / e1 if e1 > e2 else e2
    return fine, max(est, 16 * float(np.finfo(float).eps) * abs(fine))


def quad_real(f: Callable, a: float, b: float, nodes: int = 48, offsets: bool = False):
    """Fixed-node Gauss-Legendre quadrature of a vectorised real function."""
    return quad_box(f, [a], [b], nodes, offsets)


__all__ = [
    "TruncationPlan", "lattice_sum", "pair_lattice_sum", "PairIntegrand", "lattice_error", "mqint_box", "mqint_ab", "qint_0a", "qint_ab", "quad_real",
    "quad_box", "MAX_RANK",
]
