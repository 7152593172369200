import mpmath
import numpy as np
import pytest

from qsv.errors import DomainViolation, RankTooLarge
from qsv.harness import SamplingPolicy, case_rng, sample_params
from qsv.registry import (DESCRIPTORS, IDENTITY_IDS, ParamRecord, cross_check_expansion, descriptor,
                          domain_violations, eval_side, resolve, verify)
from qsv.registry import identities as I
from qsv.registry.registry import DOMAIN_REJECTED, FAIL, PASS, extended_for
from qsv.scalar import DOUBLE, PrecisionContext, approx_equal

EXT = extended_for(DOUBLE)


def draw(identity, r, k, seed=3):
    return sample_params(identity, r, case_rng(seed, identity, r, k), SamplingPolicy())[0]


def rel(u, v):
    return float(abs(u - v) / max(abs(u), abs(v)))


def side(identity, which, p, budget=1e-11):
    """One side in double, redone in 32 digits when cancellation has eaten
    the double result (relative error budget above ``budget``)."""
    value, err = eval_side(identity, which, p)
    if err > budget * abs(value):
        value, err = eval_side(identity, which, p, ctx=EXT)
    return complex(value)


# -- resolution -----------------------------------------------------------------

def test_all_ids_registered():
    assert set(IDENTITY_IDS) == set(DESCRIPTORS)
    assert len(IDENTITY_IDS) == 13


def test_resolve_cn_int87_r1_is_one_variable_constraint():
    p = resolve("CN_INT87", ParamRecord(q=0.5, r=1, a=0.3, b=0.4, c=0.25, d=0.35, e=0.45, x=(0.9,)), check=False)
    assert p.f == pytest.approx(0.3**2 * 0.5 / (0.4 * 0.25 * 0.35 * 0.45))


def test_resolve_ar_nt32():
    p = resolve("AR_NT32", ParamRecord(q=0.5, r=3, a=0.3, b=0.4, c=0.25, e=0.45, x=(0.5, 0.8, 1.1)), check=False)
    assert p.f == pytest.approx(0.3 * 0.4 * 0.25 * 0.5**3 / 0.45)


def test_resolve_jackson_has_no_dependent():
    p = ParamRecord(q=0.5, a=0.3, b=0.4, c=0.25, d=0.35, N=3)
    assert resolve("JACKSON_87", p) == p


def test_resolve_rejects_set_dependent_and_missing_free():
    with pytest.raises(ValueError):
        resolve("BAILEY_87NT", ParamRecord(q=0.5, a=0.3, b=0.4, c=0.25, d=0.35, e=0.45, f=1.0))
    with pytest.raises(ValueError):
        resolve("BAILEY_87NT", ParamRecord(q=0.5, a=0.3, b=0.4))


def test_rank_too_large():
    p = draw("CN_INT32", 1, 0).with_values(r=4, x=(0.3, 0.6, 0.9, 1.2))
    with pytest.raises(RankTooLarge):
        eval_side("CN_INT32", "LHS", p)
    assert verify("CN_INT32", p).status == FAIL


def test_domain_rejected():
    # b = a puts (a/b;q)_inf on a zero
    p = ParamRecord(q=0.5, a=0.3, b=0.3, c=0.25, d=0.35, e=0.45)
    with pytest.raises(DomainViolation):
        resolve("INT87", p)
    assert verify("INT87", p, resolved=False).status == DOMAIN_REJECTED


def test_degenerate_cn_int87_example():
    p = ParamRecord(q=0.5, r=2, a=0.1, b=0.2, c=0.25, d=0.3, e=0.35, x=(1.0, 0.6))
    full = resolve("CN_INT87", p, check=False)
    # b q / (a x_1) = 1 zeroes the right side
    assert abs(eval_side("CN_INT87", "RHS", full)[0]) == 0
    labels = [lab for lab, _ in domain_violations("CN_INT87", full)]
    assert labels
    assert verify("CN_INT87", p, resolved=False).status == DOMAIN_REJECTED


def test_beta_limit_report_records_reading():
    p = resolve("BETA_LIMIT", ParamRecord(q=0.5, a=1.2, b=1.5, c=0.7, d=1.1, x=(0.4,)))
    rep = verify("BETA_LIMIT", p)
    assert rep.status == PASS
    assert "Gamma(a+b+x_i+r-1)" in rep.message


# -- single evaluations -------------------------------------------------------------

@pytest.mark.parametrize("r", [1, 2, 3])
def test_cn_jackson_n0(r):
    p = ParamRecord(q=0.5, r=r, a=0.3, b=0.4, c=0.25, d=0.35, x=(0.9, 0.5, 0.7)[:r], N=0)
    assert eval_side("CN_JACKSON", "LHS", p)[0] == pytest.approx(1)
    assert eval_side("CN_JACKSON", "RHS", p)[0] == pytest.approx(1)


def test_jackson_n3():
    for k in range(5):
        p = draw("JACKSON_87", 1, k).with_values(N=3)
        rep = verify("JACKSON_87", p, resolved=False)
        assert rep.status == PASS and rep.achieved <= rep.tol
        # the finite sum cancels up to ~1e4 in double; 32 digits settle it
        rep = verify("JACKSON_87", p, ctx=EXT, resolved=False)
        assert rep.status == PASS and rep.achieved <= 1e-12


def test_corrupted_rhs_fails():
    for ident in ("BAILEY_87NT", "CN_JACKSON", "MBETA"):
        p = draw(ident, 1 if ident == "BAILEY_87NT" else 2, 0)
        assert verify(ident, p, escalate=True).status == PASS
        assert verify(ident, p, perturb=1e-3, escalate=True).status == FAIL


def test_escalation_improves_certification():
    pj = ParamRecord(q=0.5, r=2, a=0.3, b=0.4, c=0.25, d=0.35, x=(0.9, 0.5), N=4)
    plain = verify("CN_JACKSON", pj)
    assert plain.status == FAIL and plain.message.startswith("uncertified")
    esc = verify("CN_JACKSON", pj, escalate=True)
    assert esc.status == PASS and esc.precision == "extended"
    assert esc.achieved < plain.achieved and esc.tol < plain.tol
    assert esc.message.startswith("escalated from double")


def test_escalation_leaves_clean_pass_alone():
    rep = verify("JACKSON_87", ParamRecord(q=0.5, a=0.3, b=0.4, c=0.25, d=0.35, N=2), resolved=False, escalate=True)
    assert rep.status == PASS and rep.precision == "double"


# -- reductions to one variable -------------------------------------------------------

@pytest.mark.parametrize("multi,single", [("CN_INT87", "INT87"), ("CN_NT87", "BAILEY_87NT"),
                                          ("CN_JACKSON", "JACKSON_87")])
def test_r1_reduction(multi, single):
    for k in range(10):
        p = draw(single, 1, k)
        pm = p.with_values(x=(1.0,))
        if single == "JACKSON_87":
            pm = pm.with_values(N=min(p.N, 5))
            p = p.with_values(N=pm.N)
        for which in ("LHS", "RHS"):
            assert rel(side(multi, which, pm), side(single, which, p)) <= 1e-9, (multi, which, k)


def test_cn_int32_r1_reduction():
    for k in range(10):
        p = draw("CN_INT32", 1, k)
        x = p.x[0]
        single = p.with_values(a=p.a * x, f=p.f / x)
        u = side("CN_INT32", "LHS", p)
        v = I.int32_lhs(single.in_context(DOUBLE), None, DOUBLE)[0]
        w = I.int32_rhs(single.in_context(DOUBLE), None, DOUBLE)[0]
        assert rel(u, v) <= 1e-9 and rel(v, w) <= 1e-9


def test_ar_pfaff_r1_is_q_pfaff_saalschutz():
    mpmath.mp.dps = 30
    for k in range(10):
        p = draw("AR_PFAFF", 1, k)
        q, a, b, c, N = (mpmath.mpf(float(v.real)) for v in (p.q, p.a * p.x[0], p.b * p.x[0], p.c * p.x[0],
                                                                complex(p.N)))
        N = int(N)
        # direct terminating 3phi2 and the classical product, in mpmath
        lhs = mpmath.fsum(mpmath.qp(a, q, k_) * mpmath.qp(b, q, k_) * mpmath.qp(q**-N, q, k_) * q**k_
                          / (mpmath.qp(q, q, k_) * mpmath.qp(c, q, k_) * mpmath.qp(a * b * q ** (1 - N) / c, q, k_))
                          for k_ in range(N + 1))
        rhs = (mpmath.qp(c / a, q, N) * mpmath.qp(c / b, q, N)
               / (mpmath.qp(c, q, N) * mpmath.qp(c / (a * b), q, N)))
        assert rel(complex(lhs), complex(rhs)) < 1e-20
        ours = side("AR_PFAFF", "LHS", p)
        assert rel(ours, complex(lhs)) <= 1e-9
    mpmath.mp.dps = 15


# -- specialisation and expansion ---------------------------------------------------

@pytest.mark.parametrize("N", [0, 1, 2, 3, 4])
def test_cn_nt87_specialises_to_cn_jackson(N):
    q, a, b, c, d, x, r = 0.5, 0.3, 0.4, 0.25, 0.35, (0.9, 0.5), 2
    qe = EXT.num(q)
    f = qe ** (-N)
    e = EXT.num(a) ** 2 * qe ** (2 - r) / (EXT.num(b) * EXT.num(c) * EXT.num(d) * f)
    p = ParamRecord(q=q, r=r, a=a, b=b, c=c, d=d, x=x).in_context(EXT).with_values(e=e, f=f)
    nt_l, nt_r = I.cn_nt87_lhs(p, None, EXT)[0], I.cn_nt87_rhs(p, None, EXT)[0]
    pj = ParamRecord(q=q, r=r, a=a, b=b, c=c, d=d, x=x, N=N)
    jl, jr = eval_side("CN_JACKSON", "LHS", pj, ctx=EXT)[0], eval_side("CN_JACKSON", "RHS", pj, ctx=EXT)[0]
    for u, v in ((nt_l, jl), (nt_r, jr), (jl, jr)):
        assert approx_equal(u, v, 1e-15, EXT)[0]


def test_cross_check_expansion_r1_matches_int87():
    p = draw("INT87", 1, 0)
    rep = cross_check_expansion(p.with_values(x=(1.0,)))
    assert rep.status == PASS
    assert rel(rep.lhs, eval_side("INT87", "LHS", p)[0]) <= 1e-9


def test_cross_check_expansion_r2():
    plain = cross_check_expansion(draw("CN_INT87", 2, 2))
    # heavy cancellation: double alone cannot certify this draw
    assert plain.status == FAIL and plain.message.startswith("uncertified")
    rep = cross_check_expansion(draw("CN_INT87", 2, 2), escalate=True)
    assert rep.status == PASS and rep.achieved <= 1e-7, rep.message


# -- alternative readings fail --------------------------------------------------------

def _variant_gap(identity, r, side_fn, **opt):
    p = draw(identity, r, 1)
    good = verify(identity, p, escalate=True)
    assert good.status == PASS
    bad = side_fn(p.in_context(DOUBLE), None, DOUBLE, **opt)[0]
    return rel(bad, good.rhs)


def test_mixed_xx_variant_fails():
    assert _variant_gap("CN_NT87", 2, I.cn_nt87_lhs, mixed_xx=True) > 1e-4


def test_mixed_shift_variant_fails():
    assert _variant_gap("AR_NT32", 2, I.ar_nt32_lhs, mixed_shift=1) > 1e-4


def test_extra_cx_variant_fails():
    p = draw("AR_PFAFF", 2, 1)
    while p.N == 0:
        p = p.with_values(N=2)
    good = eval_side("AR_PFAFF", "RHS", p)[0]
    bad = I.ar_pfaff_lhs(p.in_context(DOUBLE), None, DOUBLE, extra_cx=True)[0]
    assert rel(bad, good) > 1e-4


def test_literal_beta_denominator_fails():
    p = resolve("BETA_LIMIT", ParamRecord(q=0.5, a=1.2, b=1.5, c=0.7, d=1.1, x=(0.4,)))
    lhs = eval_side("BETA_LIMIT", "LHS", p)[0]
    assert rel(lhs, eval_side("BETA_LIMIT", "RHS", p)[0]) <= 1e-8
    assert rel(lhs, I.beta_limit_rhs(p.in_context(DOUBLE), None, DOUBLE, literal_denominator=True)[0]) > 1e-2


def test_beta_limit_matches_euler_beta():
    a, b, c, d, x = 1.2, 1.5, 0.7, 1.1, 0.4
    p = resolve("BETA_LIMIT", ParamRecord(q=0.5, a=a, b=b, c=c, d=d, x=(x,)))
    # t = (c + d) u - c maps [-c, d] onto [0, 1]
    euler = (c + d) ** (a + b + x - 1) / (c ** (a - 1 + x) * d ** (b - 1)) * mpmath.beta(a + x, b)
    assert rel(eval_side("BETA_LIMIT", "RHS", p)[0], complex(euler)) <= 1e-12


@pytest.mark.parametrize("r", [1, 2])
def test_mbeta_paths_agree(r):
    p = draw("MBETA", r, 0)
    det_v = eval_side("MBETA", "LHS", p)[0]
    quad_v, quad_err = I.mbeta_quad_lhs(p.in_context(DOUBLE), None, DOUBLE)
    assert rel(det_v, quad_v) <= 1e-6
    assert rel(det_v, eval_side("MBETA", "RHS", p)[0]) <= 1e-9


def test_descriptor_lookup():
    assert descriptor("CN_NT87").dependent[0] == "f"
    assert descriptor("CN_INT32").dependent[0] == "c"
    with pytest.raises(ValueError):
        descriptor("NOPE")
