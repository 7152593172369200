"""Both sides of the q-determinant lemma, and why sampling matters.

Run: python3 demos/determinant_lemma.py
"""
import numpy as np

from qsv.detkit import lemma_det_lhs, lemma_det_rhs
from qsv.harness import sample_lemma_args
from qsv.scalar import PrecisionContext, approx_equal

EXT = PrecisionContext.extended(40)


def show(label, args, ctx=None):
    kw = {} if ctx is None else {"ctx": ctx}
    lhs, rhs = lemma_det_lhs(*args, **kw), lemma_det_rhs(*args, **kw)
    err = approx_equal(lhs, rhs, 1, **kw)[1]
    print(f"{label:<34} |det| = {float(abs(lhs)):.3e}   rel err {err:.2e}")


rng = np.random.default_rng(1)
print("well spread X (the sampler used by the acceptance suite)")
for r in range(1, 6):
    show(f"  r={r}", sample_lemma_args(r, rng))

# clustered real points: the determinant is tiny next to its entries
clustered = ([0.4, 0.45, 0.52, 0.57, 0.63], 0.2, 0.25, 0.35, 0.5)
print("clustered X, r=5")
show("  double", clustered)
show("  40 digits", clustered, EXT)
