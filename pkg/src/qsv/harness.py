"""Batch runner and ``verify`` command line.

Draws seeded random parameter records per identity, verifies each case,
writes one JSONL line per case and prints a summary table.  Exit codes:
0 all cases pass, 1 some identity case failed, 2 operational error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .errors import DomainViolation, SamplingExhausted
from .qintegral import TruncationPlan
from .registry import DESCRIPTORS, IDENTITY_IDS, ParamRecord, descriptor, resolve, verify
from .registry.records import complex_json, dec
from .registry.registry import DELTA_POLE, FAIL, NONCONVERGENT, PASS, DOMAIN_REJECTED, VerificationReport
from .scalar import DOUBLE, PrecisionContext

MAX_REJECTIONS = 200
SELFTEST_PERTURBATION = 1e-3
EXTENDED_DIGITS = 32
EXHAUSTED = "SAMPLING_EXHAUSTED"


@dataclass(frozen=True)
class SamplingPolicy:
    q_range: tuple = (0.3, 0.7)
    param_range: tuple = (0.1, 0.6)
    x_range: tuple = (0.3, 1.2)
    x_sep: float = 0.05
    delta_pole: float = DELTA_POLE
    max_rejections: int = MAX_REJECTIONS
    complex_mode: bool = False


@dataclass(frozen=True)
class RunConfig:
    identities: tuple = ("all",)
    r_values: tuple = (1,)
    samples: int = 25
    seed: int = 0
    q_range: tuple = (0.3, 0.7)
    tol: Optional[float] = None
    depth: Optional[int] = None
    precision: str = "double"
    escalate: bool = True
    complex_mode: bool = False
    out: Optional[str] = None
    selftest_negative: bool = False
    workers: Optional[int] = None

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.precision not in ("double", "extended"):
            raise ValueError("precision is 'double' or 'extended'")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    def identity_list(self) -> list:
        if any(i == "all" for i in self.identities):
            return list(IDENTITY_IDS)
        for ident in self.identities:
            descriptor(ident)
        return list(self.identities)

    def context(self) -> PrecisionContext:
        rel_tol = self.tol if self.tol is not None else DOUBLE.rel_tol
        if self.precision == "extended":
            return PrecisionContext.extended(EXTENDED_DIGITS, rel_tol=rel_tol,
                                             tail_tol=10.0 ** (5 - EXTENDED_DIGITS))
        return PrecisionContext(rel_tol=rel_tol)

    def policy(self) -> SamplingPolicy:
        return SamplingPolicy(q_range=tuple(self.q_range), complex_mode=self.complex_mode)


# -- sampling -----------------------------------------------------------------------

def case_rng(seed: int, identity: str, r: int, draw: int) -> np.random.Generator:
    """Independent stream per case, so results do not depend on scheduling."""
    return np.random.default_rng([seed, IDENTITY_IDS.index(identity), r, draw])


def _draw_scalar(rng, lo, hi, complex_mode):
    mod = rng.uniform(lo, hi)
    if not complex_mode:
        return float(mod)
    return complex(mod * np.exp(1j * rng.uniform(-math.pi / 4, math.pi / 4)))


def _draw_x(rng, r, lo, hi, sep, complex_mode):
    for _ in range(1000):
        x = [_draw_scalar(rng, lo, hi, complex_mode) for _ in range(r)]
        if all(abs(x[i] - x[j]) >= sep for i in range(r) for j in range(i + 1, r)):
            return tuple(x)
    raise SamplingExhausted(f"no x vector with separation {sep} in [{lo}, {hi}]")


def sample_params(identity: str, r: int, rng: np.random.Generator, policy: SamplingPolicy = SamplingPolicy()):
    """Rejection-sample a resolved record; returns ``(record, rejections)``."""
    desc = descriptor(identity)
    ranges = desc.real_ranges or {}
    # the real beta integrals take real exponents only
    cplx = policy.complex_mode and desc.kind != "real"
    rejections = 0
    last = None
    while rejections <= policy.max_rejections:
        q = _draw_scalar(rng, *policy.q_range, cplx)
        kw = {}
        for name in desc.free_params:
            lo, hi = ranges.get(name, policy.param_range)
            kw[name] = _draw_scalar(rng, lo, hi, cplx)
        if desc.uses_x:
            lo, hi = ranges.get("x", policy.x_range)
            kw["x"] = _draw_x(rng, r, lo, hi, ranges.get("sep", policy.x_sep), cplx)
        if desc.terminating:
            kw["N"] = int(rng.integers(desc.n_range[0], desc.n_range[1] + 1))
        try:
            return resolve(identity, ParamRecord(q=q, r=r, **kw), policy.delta_pole), rejections
        except DomainViolation as exc:
            last = exc
            rejections += 1
    raise SamplingExhausted(f"{identity} r={r}: {policy.max_rejections} rejections, last: {last}")


def sample_lemma_args(r: int, rng: np.random.Generator):
    """Draw ``(X, A, B, C, q)`` for the determinant lemma.

    X sits near the unit circle at jittered, roughly equally spaced angles
    and |A| is order one: clustered X or small A make the lemma matrix
    ill-conditioned far beyond what double precision can resolve.
    """
    angles = 2 * np.pi * (np.arange(r) + rng.uniform(-0.25, 0.25, r)) / r + rng.uniform(0, 2 * np.pi)
    X = rng.uniform(0.6, 1.4, r) * np.exp(1j * angles)
    A = rng.uniform(0.6, 1.2) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    B, C = (rng.uniform(0.1, 0.6) * np.exp(1j * rng.uniform(0, 2 * np.pi)) for _ in range(2))
    return [complex(v) for v in X], complex(A), complex(B), complex(C), float(rng.uniform(0.5, 0.8))


# -- serialisation ------------------------------------------------------------------

def _num(value):
    return None if value is None else dec(value)


def _cnum(value):
    return None if value is None else complex_json(value)


def report_line(report: VerificationReport, settings: dict, rejections: int = 0) -> dict:
    """The JSONL object for one case, keys in fixed order."""
    return {
        "identity": report.identity,
        "r": report.r,
        "seed": report.seed,
        "draw": report.draw,
        "status": report.status,
        "lhs": _cnum(report.lhs),
        "rhs": _cnum(report.rhs),
        "err_lhs": _num(report.err_lhs),
        "err_rhs": _num(report.err_rhs),
        "achieved": _num(report.achieved),
        "tol": _num(report.tol),
        "precision": report.precision,
        "depth": report.depth,
        "rejections": rejections,
        "params": report.params.to_json() if report.params is not None else None,
        "settings": settings,
        "message": report.message,
        "version": report.version,
        "duration_ms": round(report.duration_ms, 3),
    }


def dumps(line: dict) -> str:
    return json.dumps(line, ensure_ascii=False, separators=(", ", ": "))


def _settings(config: RunConfig) -> dict:
    return {"rel_tol": config.tol, "depth": config.depth, "precision": config.precision,
            "escalate": config.escalate, "perturb": SELFTEST_PERTURBATION if config.selftest_negative else 0.0}


# -- execution ----------------------------------------------------------------------

def run_case(identity: str, p: ParamRecord, settings: dict) -> VerificationReport:
    """Verify one resolved record under the echoed run settings."""
    rel_tol = settings.get("rel_tol") or DOUBLE.rel_tol
    if settings.get("precision") == "extended":
        ctx = PrecisionContext.extended(EXTENDED_DIGITS, rel_tol=rel_tol, tail_tol=10.0 ** (5 - EXTENDED_DIGITS))
    else:
        ctx = PrecisionContext(rel_tol=rel_tol)
    plan = None
    if settings.get("depth") and descriptor(identity).kind == "qint":
        plan = TruncationPlan(int(settings["depth"]), ctx.tail_tol)
    return verify(identity, p, plan, ctx, perturb=settings.get("perturb", 0.0), escalate=settings.get("escalate", False))


def _case_job(job):
    identity, r, seed, draw, policy, settings = job
    try:
        p, rejections = sample_params(identity, r, case_rng(seed, identity, r, draw), policy)
    except SamplingExhausted as exc:
        rep = VerificationReport(identity, r, EXHAUSTED, message=str(exc), seed=seed, draw=draw)
        return report_line(rep, settings, policy.max_rejections)
    rep = run_case(identity, p, settings)
    rep.seed, rep.draw = seed, draw
    return report_line(rep, settings, rejections)


def max_r_cap() -> Optional[int]:
    raw = os.environ.get("QSV_MAX_R")
    return int(raw) if raw else None


def plan_cases(config: RunConfig):
    """Yield ``(identity, r, runnable)``; unsupported ranks are not runnable."""
    cap = max_r_cap()
    for ident in config.identity_list():
        desc = DESCRIPTORS[ident]
        for r in config.r_values:
            ok = r <= desc.max_r and (desc.fixed_r is None or r == desc.fixed_r) and (cap is None or r <= cap)
            yield ident, r, ok


@dataclass
class Tally:
    counts: dict = field(default_factory=lambda: {PASS: 0, FAIL: 0, DOMAIN_REJECTED: 0, NONCONVERGENT: 0, EXHAUSTED: 0})
    rejections: int = 0
    max_err: float = 0.0

    def add(self, line):
        self.counts[line["status"]] = self.counts.get(line["status"], 0) + 1
        self.rejections += line["rejections"]
        if line["achieved"] is not None:
            self.max_err = max(self.max_err, float(line["achieved"]))


def summary_table(tallies: dict, skipped: list) -> str:
    rows = [f"{'identity':<15}{'r':>3}{'pass':>6}{'fail':>6}{'noconv':>8}{'rejected':>10}{'max err':>11}"]
    for (ident, r), t in tallies.items():
        c = t.counts
        rows.append(f"{ident:<15}{r:>3}{c[PASS]:>6}{c[FAIL] + c[EXHAUSTED]:>6}{c[NONCONVERGENT]:>8}"
                    f"{t.rejections + c[DOMAIN_REJECTED]:>10}{t.max_err:>11.2e}")
    for ident, r in skipped:
        rows.append(f"{ident:<15}{r:>3}  skipped (rank not supported)")
    return "\n".join(rows)


def run(config: RunConfig, stream=None) -> int:
    """Execute every case of ``config``; returns the exit code."""
    stream = sys.stdout if stream is None else stream
    settings = _settings(config)
    policy = config.policy()
    jobs, skipped = [], []
    for ident, r, ok in plan_cases(config):
        if not ok:
            skipped.append((ident, r))
            continue
        jobs.extend((ident, r, config.seed, draw, policy, settings) for draw in range(config.samples))
    try:
        sink = open(config.out, "w", encoding="utf-8") if config.out else None
    except OSError as exc:
        print(f"verify: cannot open output: {exc}", file=sys.stderr)
        return 2
    workers = config.workers if config.workers else (os.cpu_count() or 1)
    pool = None
    if workers > 1 and len(jobs) > 1:
        pool = ProcessPoolExecutor(max_workers=min(workers, len(jobs)))
        # map keeps submission order, so the sink sees draws in sequence
        results = pool.map(_case_job, jobs, chunksize=1)
    else:
        results = map(_case_job, jobs)
    tallies = {}
    try:
        for line in results:
            tallies.setdefault((line["identity"], line["r"]), Tally()).add(line)
            if sink is not None:
                sink.write(dumps(line) + "\n")
                sink.flush()
    except OSError as exc:
        print(f"verify: write failed: {exc}", file=sys.stderr)
        return 2
    finally:
        if pool is not None:
            pool.shutdown()
        if sink is not None:
            sink.close()
    print(summary_table(tallies, skipped), file=stream)
    statuses = {s for t in tallies.values() for s, n in t.counts.items() if n}
    if EXHAUSTED in statuses:
        print("verify: some configurations could not be sampled", file=sys.stderr)
        return 2
    return 1 if statuses & {FAIL, NONCONVERGENT} else 0


def replay(line: str, stream=None) -> int:
    """Re-run the single case recorded in a JSONL line."""
    stream = sys.stdout if stream is None else stream
    obj = json.loads(line)
    p = ParamRecord.from_json(obj["params"])
    rep = run_case(obj["identity"], p, obj.get("settings") or {})
    rep.seed, rep.draw = obj.get("seed"), obj.get("draw")
    out = report_line(rep, obj.get("settings") or {}, obj.get("rejections", 0))
    print(dumps(out), file=stream)
    return 0 if rep.status in (PASS, DOMAIN_REJECTED) else 1


# -- command line -------------------------------------------------------------------

def _r_list(text: str) -> tuple:
    return tuple(int(v) for v in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="verify", description="Numerically verify q-series identities.")
    ap.add_argument("--identity", default="all", help="identity id, comma list, or 'all'")
    ap.add_argument("--r", type=_r_list, default=(1,), help="rank (comma list allowed)")
    ap.add_argument("--samples", type=int, default=25)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--tol", type=float, default=None, help="relative tolerance override")
    ap.add_argument("--depth", type=int, default=None, help="q-integral truncation depth override")
    ap.add_argument("--precision", choices=("double", "extended"), default="double")
    ap.add_argument("--escalate", dest="escalate", action="store_true", default=True,
                    help="retry doubtful double cases in extended precision (default)")
    ap.add_argument("--no-escalate", dest="escalate", action="store_false")
    ap.add_argument("--complex", dest="complex_mode", action="store_true", help="sample complex parameters")
    ap.add_argument("--out", default=None, help="JSONL output path")
    ap.add_argument("--replay", default=None, metavar="JSONL_LINE", help="re-run one recorded case")
    ap.add_argument("--selftest-negative", action="store_true", help="perturb every right-hand side by 1e-3")
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--version", action="version", version=__version__)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.replay is not None:
            return replay(args.replay)
        config = RunConfig(identities=tuple(args.identity.split(",")), r_values=args.r, samples=args.samples,
                           seed=args.seed, tol=args.tol, depth=args.depth, precision=args.precision,
                           escalate=args.escalate, complex_mode=args.complex_mode, out=args.out,
                           selftest_negative=args.selftest_negative, workers=args.workers)
        return run(config)
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        print(f"verify: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
