"""Identity catalogue: descriptors, constraint resolution, the pole-distance
domain policy, and single-case verification."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from .. import __version__
from ..errors import DomainViolation, NonConvergent, QSeriesError, RankTooLarge
from ..qintegral import TruncationPlan
from ..qpoch import QBase
from ..scalar import DOUBLE, PrecisionContext, approx_equal
from . import identities as I
from .records import ParamRecord

IDENTITY_IDS = (
    "BAILEY_87NT", "JACKSON_87", "INT87", "MBETA", "CN_INT87", "CN_NT87", "CN_JACKSON", "CN_INT32",
    "AR_NT32", "AR_PFAFF", "ANDREWS_ASKEY", "BETA_LIMIT", "QBINOMIAL",
)

DELTA_POLE = 0.05
DEPENDENT_CAP = 40.0
# (digits, tail tolerance): the last rung keeps the full 64-digit tail for
# the rare draws whose terms cancel by more than ~1e30
ESCALATION_LADDER = ((32, 1e-27), (64, 1e-40), (64, 1e-59))
# a comparison whose budget-derived tolerance exceeds this certifies nothing
TOL_CEILING = 1e-6

PASS, FAIL, DOMAIN_REJECTED, NONCONVERGENT = "PASS", "FAIL", "DOMAIN_REJECTED", "NONCONVERGENT"


# -- pole lists ------------------------------------------------------------------
# Each entry is (label, z, count): the factors 1 - z q^j for 0 <= j < count
# (count None: all j) must stay DELTA_POLE away from zero.  count 0 marks a
# plain scalar factor z.


def _pairs(p, fn):
    out = []
    for i in range(p.r):
        for j in range(i + 1, p.r):
            out += fn(i, j)
    return out


def _cn87_poles(p):
    q, a, b, c, d, e, f, x = p.q, p.a, p.b, p.c, p.d, p.e, p.f, p.x
    out = [("1-b^2/a", 1 - b * b / a, 0)]
    for i, xi in enumerate(x, start=1):
        args = {
            "a x^2": a * xi * xi, "b x": b * xi, "c x": c * xi, "d x": d * xi, "e x": e * xi, "f": f,
            "a x/b": a * xi / b, "b q/(a x)": b * q / (a * xi), "a x q/c": a * xi * q / c,
            "a x q/d": a * xi * q / d, "a x q/e": a * xi * q / e, "a x^2 q/f": a * xi * xi * q / f,
            "b^2/a": b * b / a, "b c/a": b * c / a, "b d/a": b * d / a, "b e/a": b * e / a,
            "b f/(a x)": b * f / (a * xi), "b q/c": b * q / c, "b q/d": b * q / d, "b q/e": b * q / e,
            "b x q/f": b * xi * q / f, "b c q^(i-1)/a": b * c * q ** (i - 1) / a,
            "b d q^(i-1)/a": b * d * q ** (i - 1) / a, "b e q^(i-1)/a": b * e * q ** (i - 1) / a,
        }
        out += [(f"{k} [i={i}]", v, None) for k, v in args.items()]
        out.append((f"1-a x^2 [i={i}]", 1 - a * xi * xi, 0))
    out += _pairs(p, lambda i, j: [(f"x{i + 1}-x{j + 1}", x[i] - x[j], 0),
                                   (f"1-a x{i + 1} x{j + 1}", 1 - a * x[i] * x[j], 0),
                                   (f"1-a x{i + 1} x{j + 1}/f", 1 - a * x[i] * x[j] / f, 0)])
    return out


def _cn_jackson_poles(p):
    q, a, b, c, d, x, r, N = p.q, p.a, p.b, p.c, p.d, p.x, p.r, p.N
    out = []
    for i, xi in enumerate(x, start=1):
        args = {
            "a x q/b": a * xi * q / b, "a x q/c": a * xi * q / c, "a x q/d": a * xi * q / d,
            "b c d x q^(r-1-N)/a": b * c * d * xi * q ** (r - 1 - N) / a, "a x^2 q^(1+N)": a * xi * xi * q ** (1 + N),
            "a q^(2-r)/(b c d x)": a * q ** (2 - r) / (b * c * d * xi),
        }
        out += [(f"{k} [i={i}]", v, N) for k, v in args.items()]
        out.append((f"1-a x^2 [i={i}]", 1 - a * xi * xi, 0))
    out += _pairs(p, lambda i, j: [(f"x{i + 1}-x{j + 1}", x[i] - x[j], 0),
                                   (f"1-a x{i + 1} x{j + 1}", 1 - a * x[i] * x[j], 0)])
    return out


def _cn_int32_poles(p):
    q, a, b, c, d, e, f, x = p.q, p.a, p.b, p.c, p.d, p.e, p.f, p.x
    out = []
    for i, xi in enumerate(x, start=1):
        args = {
            "a d x": a * d * xi, "a e x": a * e * xi, "a f": a * f, "b d q^(i-1)": b * d * q ** (i - 1),
            "b e q^(i-1)": b * e * q ** (i - 1), "b f/x": b * f / xi, "b d": b * d, "b e": b * e,
            "a x/b": a * xi / b, "b q/(a x)": b * q / (a * xi),
        }
        out += [(f"{k} [i={i}]", v, None) for k, v in args.items()]
    out += _pairs(p, lambda i, j: [(f"x{i + 1}-x{j + 1}", x[i] - x[j], 0)])
    return out


def _ar_nt32_poles(p):
    q, a, b, c, e, f, x = p.q, p.a, p.b, p.c, p.e, p.f, p.x
    out = []
    for i, xi in enumerate(x, start=1):
        args = {
            "a q/e": a * q / e, "b q/e": b * q / e, "c q/(e x)": c * q / (e * xi), "e x/q": e * xi / q,
            "f x": f * xi, "e x": e * xi, "q^2/(e x)": q * q / (e * xi), "f q/e": f * q / e,
            "a q^i/e": a * q**i / e, "b q^i/e": b * q**i / e,
        }
        out += [(f"{k} [i={i}]", v, None) for k, v in args.items()]
    out += _pairs(p, lambda i, j: [(f"x{i + 1}-x{j + 1}", x[i] - x[j], 0)])
    return out


def _ar_pfaff_poles(p):
    q, a, b, c, x, r, N = p.q, p.a, p.b, p.c, p.x, p.r, p.N
    out = []
    for i, xi in enumerate(x, start=1):
        args = {"c x": c * xi, "a b x q^(r-N)/c": a * b * xi * q ** (r - N) / c,
                "c q^(1-r)/(a b x)": c * q ** (1 - r) / (a * b * xi)}
        out += [(f"{k} [i={i}]", v, N) for k, v in args.items()]
    out += _pairs(p, lambda i, j: [(f"x{i + 1}-x{j + 1}", x[i] - x[j], 0)])
    return out


def _andrews_askey_poles(p):
    q, a, b, c, d, x = p.q, p.a, p.b, p.c, p.d, p.x
    out = []
    for i, xi in enumerate(x, start=1):
        args = {"c x": c * xi, "-a d x/b": -a * d * xi / b, "-b c q^(i-1)/a": -b * c * q ** (i - 1) / a,
                "d q^(i-1)": d * q ** (i - 1), "-b c/a": -b * c / a, "d": d,
                "-a x/b": -a * xi / b, "-b q/(a x)": -b * q / (a * xi)}
        out += [(f"{k} [i={i}]", v, None) for k, v in args.items()]
    out += _pairs(p, lambda i, j: [(f"x{i + 1}-x{j + 1}", x[i] - x[j], 0)])
    return out


def _qbinomial_poles(p):
    return [("z", p.z, None), ("1-|z|", 1 - abs(p.z), 0)]


def _beta_poles(p):
    out = [("b", p.b, 0)]
    for i, xi in enumerate(p.x, start=1):
        out.append((f"a+x [i={i}]", p.a + xi, 0))
    out += _pairs(p, lambda i, j: [(f"x{i + 1}-x{j + 1}", p.x[i] - p.x[j], 0)])
    return out


# -- dependent parameters --------------------------------------------------------

def _f_cn87(p):
    return p.a * p.a * p.q ** (2 - p.r) / (p.b * p.c * p.d * p.e)


def _c_cn32(p):
    return p.a * p.b * p.d * p.e * p.f * p.q ** (p.r - 1)


def _f_ar32(p):
    return p.a * p.b * p.c * p.q**p.r / p.e


@dataclass(frozen=True)
class IdentityDescriptor:
    id: str
    free_params: tuple
    lhs: Callable
    rhs: Callable
    poles: Callable
    max_r: int
    dependent: Optional[tuple] = None  # (name, formula)
    uses_x: bool = True
    terminating: bool = False
    n_range: tuple = (0, 0)
    kind: str = "sum"  # sum | qint | real
    fixed_r: Optional[int] = None
    real_ranges: dict = field(default_factory=dict)
    description: str = ""
    # False when the left side is a double-only quadrature (more digits cannot help)
    escalates: bool = True
    # reading adopted where a displayed factor is ambiguous; copied into reports
    note: str = ""


_Q_RANGE = (0.1, 0.6)

DESCRIPTORS = {
    d.id: d for d in [
        IdentityDescriptor("QBINOMIAL", ("a", "z"), I.qbinomial_lhs, I.qbinomial_rhs, _qbinomial_poles,
                           max_r=1, uses_x=False, fixed_r=1,
                           description="q-binomial theorem 1phi0(a;-;q,z) = (az;q)_inf/(z;q)_inf"),
        IdentityDescriptor("BAILEY_87NT", ("a", "b", "c", "d", "e"), I.bailey_lhs, I.bailey_rhs,
                           lambda p: _cn87_poles(p.with_values(x=(1.0,))), max_r=1, uses_x=False, fixed_r=1,
                           dependent=("f", lambda p: p.a * p.a * p.q / (p.b * p.c * p.d * p.e)),
                           description="nonterminating very-well-poised 8phi7 summation (a^2 q = bcdef)"),
        IdentityDescriptor("JACKSON_87", ("a", "b", "c", "d"), I.jackson_lhs, I.jackson_rhs,
                           lambda p: _cn_jackson_poles(p.with_values(x=(1.0,))), max_r=1, uses_x=False,
                           fixed_r=1, terminating=True, n_range=(0, 8),
                           description="terminating balanced very-well-poised 8phi7 summation"),
        IdentityDescriptor("INT87", ("a", "b", "c", "d", "e"), I.int87_lhs, I.int87_rhs,
                           lambda p: _cn87_poles(p.with_values(x=(1.0,))), max_r=1, uses_x=False, fixed_r=1,
                           dependent=("f", lambda p: p.a * p.a * p.q / (p.b * p.c * p.d * p.e)), kind="qint",
                           description="q-integral form of the nonterminating 8phi7 summation"),
        IdentityDescriptor("MBETA", ("a", "b"), I.mbeta_det_lhs, I.mbeta_rhs, _beta_poles, max_r=4, kind="real",
                           real_ranges={"a": (0.5, 3.0), "b": (0.5, 3.0), "x": (0.0, 3.0), "sep": 0.3},
                           description="multidimensional beta integral with Vandermonde weight"),
        IdentityDescriptor("CN_INT87", ("a", "b", "c", "d", "e"), I.cn_int87_lhs, I.cn_int87_rhs, _cn87_poles,
                           max_r=3, dependent=("f", _f_cn87), kind="qint",
                           description="C_r multiple q-integral extending the 8phi7 q-integral"),
        IdentityDescriptor("CN_NT87", ("a", "b", "c", "d", "e"), I.cn_nt87_lhs, I.cn_nt87_rhs, _cn87_poles,
                           max_r=4, dependent=("f", _f_cn87),
                           description="C_r nonterminating 8phi7 summation (sum over subsets)"),
        IdentityDescriptor("CN_JACKSON", ("a", "b", "c", "d"), I.cn_jackson_lhs, I.cn_jackson_rhs,
                           _cn_jackson_poles, max_r=4, terminating=True, n_range=(0, 5),
                           description="C_r terminating 8phi7 summation"),
        IdentityDescriptor("CN_INT32", ("a", "b", "d", "e", "f"), I.cn_int32_lhs, I.cn_int32_rhs, _cn_int32_poles,
                           max_r=3, dependent=("c", _c_cn32), kind="qint",
                           description="multiple q-integral of 3phi2 type (c = abdef q^(r-1))"),
        IdentityDescriptor("AR_NT32", ("a", "b", "c", "e"), I.ar_nt32_lhs, I.ar_nt32_rhs, _ar_nt32_poles,
                           max_r=4, dependent=("f", _f_ar32),
                           description="A_r nonterminating q-Pfaff-Saalschutz summation (ef = abc q^r)"),
        IdentityDescriptor("AR_PFAFF", ("a", "b", "c"), I.ar_pfaff_lhs, I.ar_pfaff_rhs, _ar_pfaff_poles,
                           max_r=4, terminating=True, n_range=(0, 5),
                           description="A_r terminating q-Pfaff-Saalschutz summation"),
        IdentityDescriptor("ANDREWS_ASKEY", ("a", "b", "c", "d"), I.andrews_askey_lhs, I.andrews_askey_rhs,
                           _andrews_askey_poles, max_r=3, kind="qint",
                           description="multiple Andrews-Askey q-integral"),
        IdentityDescriptor("BETA_LIMIT", ("a", "b", "c", "d"), I.beta_limit_lhs, I.beta_limit_rhs, _beta_poles,
                           max_r=2, kind="real",
                           real_ranges={"a": (0.5, 3.0), "b": (0.5, 3.0), "c": (0.5, 2.0), "d": (0.5, 2.0),
                                        "x": (0.0, 3.0), "sep": 0.3}, escalates=False,
                           note="denominator Gamma(a+b+x_i+r-1), matched to the Euler beta value at r = 1",
                           description="real multiple beta integral over [-c, d]^r (q -> 1 limit)"),
    ]
}


def descriptor(identity: str) -> IdentityDescriptor:
    try:
        return DESCRIPTORS[identity]
    except KeyError:
        raise ValueError(f"unknown identity {identity!r}; expected one of {', '.join(IDENTITY_IDS)}") from None


# -- resolution and domain policy -----------------------------------------------------

def pole_distance(z, count, q) -> float:
    """min over j of |1 - z q^j| (j < count, or all j when count is None)."""
    if count == 0:
        return float(abs(z))
    best = float("inf")
    j = 0
    zq = z
    while count is None or j < count:
        best = min(best, float(abs(1 - zq)))
        if count is None and abs(zq) < 0.5:
            break
        zq = zq * q
        j += 1
    return best


def domain_violations(identity: str, p: ParamRecord, delta: float = DELTA_POLE) -> list:
    desc = descriptor(identity)
    bad = []
    for label, z, count in desc.poles(p):
        if desc.kind == "real":
            dist = float(z.real) if label in ("b",) or label.startswith("a+x") else float(abs(z))
        else:
            dist = pole_distance(z, count, p.q)
        if dist < delta:
            bad.append((label, dist))
    if desc.dependent is not None and desc.kind != "real":
        name = desc.dependent[0]
        mod = float(abs(getattr(p, name)))
        if mod > DEPENDENT_CAP:
            bad.append((f"|{name}| > {DEPENDENT_CAP}", mod))
    return bad


def resolve(identity: str, partial: ParamRecord, delta: float = DELTA_POLE, check: bool = True) -> ParamRecord:
    """Fill in the dependent parameter and apply the domain policy."""
    desc = descriptor(identity)
    if desc.fixed_r is not None and partial.r != desc.fixed_r:
        raise ValueError(f"{identity} is a one-variable identity (r = 1)")
    missing = [n for n in desc.free_params if getattr(partial, n) is None]
    if missing:
        raise ValueError(f"{identity} needs free parameters {missing}")
    if desc.uses_x and len(partial.x) != partial.r:
        raise ValueError(f"{identity} needs x of length r = {partial.r}")
    if desc.terminating and (partial.N is None or partial.N < 0):
        raise ValueError(f"{identity} needs a termination index N >= 0")
    p = partial
    if desc.dependent is not None:
        name, formula = desc.dependent
        if getattr(p, name) is not None:
            raise ValueError(f"dependent parameter {name} of {identity} must be left unset")
        p = p.with_values(**{name: formula(p)})
    if check:
        bad = domain_violations(identity, p, delta)
        if bad:
            raise DomainViolation(bad)
    return p


def in_context(identity: str, p: ParamRecord, ctx: PrecisionContext) -> ParamRecord:
    """Convert to ``ctx`` and recompute the dependent parameter in that field,
    so the constraint holds to the working precision rather than to the
    precision the record was created in."""
    desc = descriptor(identity)
    pc = p.in_context(ctx)
    if desc.dependent is not None:
        name, formula = desc.dependent
        pc = pc.with_values(**{name: formula(pc)})
    return pc


def default_plan(identity: str, p: ParamRecord, ctx: PrecisionContext = DOUBLE) -> Optional[TruncationPlan]:
    desc = descriptor(identity)
    if desc.kind != "qint":
        return None
    return TruncationPlan.for_base(QBase(p.q, tail_tol=ctx.tail_tol))


def eval_side(identity: str, side: str, p: ParamRecord, plan=None, ctx: PrecisionContext = DOUBLE, **options):
    """Evaluate one side; ``options`` are passed to the evaluator (variants)."""
    desc = descriptor(identity)
    if p.r > desc.max_r:
        raise RankTooLarge(f"{identity} supports r <= {desc.max_r}")
    fn = {"LHS": desc.lhs, "RHS": desc.rhs}[side.upper()]
    try:
        return fn(in_context(identity, p, ctx), plan, ctx, **options)
    except QSeriesError as exc:
        exc.args = (f"{identity} {side}: {exc.args[0] if exc.args else exc}",) + exc.args[1:]
        raise


# -- reports ------------------------------------------------------------------------

@dataclass
class VerificationReport:
    identity: str
    r: int
    status: str
    lhs: complex = None
    rhs: complex = None
    err_lhs: float = None
    err_rhs: float = None
    achieved: float = None
    tol: float = None
    params: ParamRecord = None
    depth: Optional[int] = None
    precision: str = "double"
    duration_ms: float = 0.0
    message: str = ""
    seed: Optional[int] = None
    draw: Optional[int] = None
    version: str = __version__

    @property
    def ok(self) -> bool:
        return self.status in (PASS, DOMAIN_REJECTED)


def _scale(lhs, rhs, ctx) -> float:
    return max(float(abs(lhs)), float(abs(rhs)), ctx.abs_floor)


def compare(lhs, err_l, rhs, err_r, ctx: PrecisionContext = DOUBLE):
    """Return ``(ok, achieved_rel_err, tol)`` with the budget-aware tolerance."""
    scale = _scale(lhs, rhs, ctx)
    tol = max(ctx.rel_tol, 10 * (err_l + err_r) / scale)
    ok, achieved = approx_equal(lhs, rhs, tol, ctx)
    return ok, float(achieved), tol


def _verify_once(identity, p, plan, ctx, perturb, resolved, options) -> VerificationReport:
    start = time.perf_counter()
    precision = "extended" if ctx.is_extended else "double"
    report = VerificationReport(identity, p.r, FAIL, params=p, precision=precision)
    try:
        if not resolved:
            p = resolve(identity, p)
            report.params = p
        else:
            bad = domain_violations(identity, p)
            if bad:
                raise DomainViolation(bad)
        if plan is None:
            plan = default_plan(identity, p, ctx)
        report.depth = plan.depth if plan is not None else p.N
        lhs, err_l = eval_side(identity, "LHS", p, plan, ctx, **options)
        rhs, err_r = eval_side(identity, "RHS", p, plan, ctx)
        if perturb:
            rhs = rhs * (1 + perturb)
        ok, achieved, tol = compare(lhs, err_l, rhs, err_r, ctx)
        report.lhs, report.rhs, report.err_lhs, report.err_rhs = lhs, rhs, err_l, err_r
        report.achieved, report.tol = achieved, tol
        report.status = PASS if ok else FAIL
        if ok and tol > TOL_CEILING:
            report.status = FAIL
            report.message = f"uncertified: error budget allows rel err {tol:.3g}"
        elif descriptor(identity).note:
            report.message = descriptor(identity).note
    except DomainViolation as exc:
        report.status = DOMAIN_REJECTED
        report.message = "; ".join(f"{lab} ({dist:.3g})" for lab, dist in exc.factors)
    except NonConvergent as exc:
        report.status = NONCONVERGENT
        report.message = str(exc)
    except (QSeriesError, ZeroDivisionError, ValueError, OverflowError, FloatingPointError) as exc:
        report.status = FAIL
        report.message = f"{type(exc).__name__}: {exc}"
    report.duration_ms = (time.perf_counter() - start) * 1e3
    return report


def extended_for(ctx: PrecisionContext, digits: int = ESCALATION_LADDER[0][0],
                 tail_tol: Optional[float] = None) -> PrecisionContext:
    """The Extended context used when a Double case is escalated."""
    if tail_tol is None:
        tail_tol = 10.0 ** (5 - min(digits, 45))
    return PrecisionContext.extended(digits, rel_tol=ctx.rel_tol, abs_floor=ctx.abs_floor,
                                     tail_tol=min(ctx.tail_tol, tail_tol))


def needs_escalation(report: VerificationReport, ctx: PrecisionContext) -> bool:
    """FAIL, or PASS only because the error budget widened the tolerance."""
    if report.status == FAIL and not report.message.startswith(("DomainViolation", "RankTooLarge")):
        return True
    return report.status == PASS and report.tol is not None and report.tol > ctx.rel_tol


def verify(identity: str, p: ParamRecord, plan=None, ctx: PrecisionContext = DOUBLE, perturb: float = 0.0,
           resolved: bool = True, escalate: bool = False, **options) -> VerificationReport:
    """Evaluate both sides and compare; never raises for domain or series errors.

    ``perturb`` multiplies the right-hand side by ``1 + perturb`` (detector
    self-test).  With ``escalate``, a Double case that fails, or that could
    only pass because its error budget exceeded ``ctx.rel_tol``, is redone
    in Extended precision, climbing ``ESCALATION_LADDER`` while the same
    holds; the last result is final.
    """
    report = _verify_once(identity, p, plan, ctx, perturb, resolved, options)
    if not (escalate and descriptor(identity).escalates and not ctx.is_extended):
        return report
    first, prev_ctx = report, ctx
    for digits, tail in ESCALATION_LADDER:
        if not needs_escalation(report, prev_ctx):
            break
        ext = extended_for(ctx, digits, tail)
        plan_ext = None if plan is None else TruncationPlan.for_base(QBase(p.q, tail_tol=ext.tail_tol))
        spent = report.duration_ms
        report = _verify_once(identity, first.params, plan_ext, ext, perturb, True, options)
        report.duration_ms += spent
        prev_ctx = ext
    if report is not first:
        note = f"escalated from double ({first.status}, achieved {first.achieved:.3g}, tol {first.tol:.3g})" \
            if first.achieved is not None else f"escalated from double ({first.status})"
        report.message = f"{note}; {report.message}" if report.message else note
    return report


def _cross_once(p: ParamRecord, plan, ctx: PrecisionContext) -> VerificationReport:
    start = time.perf_counter()
    report = VerificationReport("CN_INT87", p.r, FAIL, params=p, precision="extended" if ctx.is_extended else "double")
    try:
        bad = domain_violations("CN_INT87", p)
        if bad:
            raise DomainViolation(bad)
        if plan is None:
            plan = default_plan("CN_INT87", p, ctx)
        report.depth = plan.depth
        pc = in_context("CN_INT87", p, ctx)
        direct, err_d = I.cn_int87_lhs(pc, plan, ctx)
        series, err_s = I.cn_nt87_lhs(pc, None, ctx)
        div, err_div = I.expansion_divisor(pc, ctx)
        via_series = series * div
        err_v = float(abs(div)) * err_s + err_div * float(abs(series))
        explicit, err_e = I.cn_expansion_sum(pc, plan, ctx)
        ok1, ach1, tol1 = compare(direct, err_d, via_series, err_v, ctx)
        ok2, ach2, tol2 = compare(direct, err_d, explicit, err_e, ctx)
        report.lhs, report.rhs, report.err_lhs, report.err_rhs = direct, via_series, err_d, err_v
        report.achieved, report.tol = max(ach1, ach2), max(tol1, tol2)
        report.status = PASS if (ok1 and ok2) else FAIL
        report.message = f"explicit expansion rel err {ach2:.3g}"
        if report.status == PASS and report.tol > TOL_CEILING:
            report.status = FAIL
            report.message = f"uncertified: error budget allows rel err {report.tol:.3g}"
    except DomainViolation as exc:
        report.status = DOMAIN_REJECTED
        report.message = "; ".join(f"{lab} ({dist:.3g})" for lab, dist in exc.factors)
    except NonConvergent as exc:
        report.status = NONCONVERGENT
        report.message = str(exc)
    except (QSeriesError, ZeroDivisionError, ValueError, OverflowError) as exc:
        report.message = f"{type(exc).__name__}: {exc}"
    report.duration_ms = (time.perf_counter() - start) * 1e3
    return report


def cross_check_expansion(p: ParamRecord, plan=None, ctx: PrecisionContext = DOUBLE,
                          escalate: bool = False) -> VerificationReport:
    """CN_INT87's left side two ways: the subset q-integral directly, and the
    normalised subset series (CN_NT87's left side) times the divisor.  The
    explicit un-normalised subset expansion is evaluated as a third route and
    must agree as well.  ``escalate`` climbs the same precision ladder as
    :func:`verify`."""
    report = _cross_once(p, plan, ctx)
    if not escalate or ctx.is_extended:
        return report
    first = report
    for digits, tail in ESCALATION_LADDER:
        if not needs_escalation(report, ctx if report is first else ext):
            break
        ext = extended_for(ctx, digits, tail)
        plan_ext = None if plan is None else TruncationPlan.for_base(QBase(p.q, tail_tol=ext.tail_tol))
        spent = report.duration_ms
        report = _cross_once(p, plan_ext, ext)
        report.duration_ms += spent
    if report is not first:
        report.message = f"escalated from double ({first.status}); {report.message}"
    return report
