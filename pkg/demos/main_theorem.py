"""The C_r q-integral evaluation at r = 2 and r = 3, checked three ways.

Run: python3 demos/main_theorem.py   (under a minute on one core)
"""
from qsv.harness import SamplingPolicy, case_rng, sample_params
from qsv.registry import cross_check_expansion, verify


def line(rep):
    return (f"{rep.status:<5} {rep.precision:<8} achieved {rep.achieved:.2e}  tol {rep.tol:.1e}  "
            f"{rep.duration_ms / 1e3:6.1f} s  {rep.message}")


for r, draws in ((2, 3), (3, 1)):
    print(f"r = {r}")
    for k in range(draws):
        p, rejected = sample_params("CN_INT87", r, case_rng(7, "CN_INT87", r, k), SamplingPolicy())
        print(f"  draw {k} ({rejected} rejected draws before it), f = {p.f:.4f}")
        # double first; anything it cannot certify is redone with 32 and 64 digits
        print("    integral = product:   ", line(verify("CN_INT87", p, escalate=True)))
        print("    integral = subset sum:", line(cross_check_expansion(p, escalate=True)))
