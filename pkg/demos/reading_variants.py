"""Ambiguous factors: the adopted reading passes, the alternative does not.

Run: python3 demos/reading_variants.py
"""
from qsv.harness import SamplingPolicy, case_rng, sample_params
from qsv.registry import ParamRecord, eval_side, resolve
from qsv.registry import identities as I
from qsv.registry.registry import in_context
from qsv.scalar import PrecisionContext

# 40 digits, so cancellation in the sums cannot blur the comparison
CTX = PrecisionContext.extended(40, tail_tol=1e-35)


def gap(u, v):
    return float(abs(u - v) / max(abs(u), abs(v)))


def draw(ident, r):
    p = sample_params(ident, r, case_rng(11, ident, r, 0), SamplingPolicy())[0]
    return in_context(ident, p, CTX)


p = draw("CN_NT87", 2)
rhs = I.cn_nt87_rhs(p, None, CTX)[0]
print("CN_NT87 mixed pair factor")
print(f"  (1 - b x_i q^(k_i+k_j))      {gap(I.cn_nt87_lhs(p, None, CTX)[0], rhs):.1e}")
print(f"  (1 - b x_i x_j q^(k_i+k_j))  {gap(I.cn_nt87_lhs(p, None, CTX, mixed_xx=True)[0], rhs):.1e}")

p = draw("AR_NT32", 2)
rhs = I.ar_nt32_rhs(p, None, CTX)[0]
print("AR_NT32 mixed pair factor")
print(f"  e x_i q^(k_i - 1) - q^k_j    {gap(I.ar_nt32_lhs(p, None, CTX)[0], rhs):.1e}")
print(f"  e x_i q^(k_i + 1) - q^k_j    {gap(I.ar_nt32_lhs(p, None, CTX, mixed_shift=1)[0], rhs):.1e}")

p = draw("AR_PFAFF", 2).with_values(N=3)
rhs = I.ar_pfaff_rhs(p, None, CTX)[0]
print("AR_PFAFF numerator")
print(f"  (a x_i, b x_i, q^-N)         {gap(I.ar_pfaff_lhs(p, None, CTX)[0], rhs):.1e}")
print(f"  with an extra (c x_i)        {gap(I.ar_pfaff_lhs(p, None, CTX, extra_cx=True)[0], rhs):.1e}")

p = resolve("BETA_LIMIT", ParamRecord(q=0.5, a=1.2, b=1.5, c=0.7, d=1.1, x=(0.4,)))
lhs = eval_side("BETA_LIMIT", "LHS", p)[0]
p = in_context("BETA_LIMIT", p, CTX)
print("BETA_LIMIT gamma denominator (quadrature on the left)")
print(f"  Gamma(a + b + x_i + r - 1)   {gap(lhs, I.beta_limit_rhs(p, None, CTX)[0]):.1e}")
print(f"  Gamma(b + r + x_i)           {gap(lhs, I.beta_limit_rhs(p, None, CTX, literal_denominator=True)[0]):.1e}")
