import json

import pytest

from qsv.goldens import (CASES_PER_RANK, GoldenCase, check_goldens, freeze_goldens, golden_case, load_corpus,
                         supported_ranks)
from qsv.harness import main
from qsv.registry import IDENTITY_IDS, ParamRecord, resolve


@pytest.fixture(scope="module")
def corpus():
    return load_corpus()


def test_empty_corpus_passes():
    res = check_goldens([])
    assert res.ok and res.checked == 0


def test_corpus_covers_every_identity_and_rank(corpus):
    for ident in IDENTITY_IDS:
        for r in supported_ranks(ident):
            n = sum(1 for c in corpus if c.identity == ident and c.params.r == r)
            assert n >= CASES_PER_RANK, (ident, r)


def test_round_trip(corpus):
    case = corpus[0]
    again = GoldenCase.from_json(json.loads(json.dumps(case.to_json())))
    assert again.value == case.value and again.params == case.params and again.err == case.err


def test_double_cases_recheck(corpus):
    res = check_goldens(corpus, select=lambda c: c.precision == "double")
    assert res.checked > 0
    assert res.ok, res.mismatches


def test_double_cases_recheck_at_doubled_depth(corpus):
    res = check_goldens(corpus, depth_factor=2, select=lambda c: c.precision == "double")
    assert res.ok, res.mismatches


@pytest.mark.slow
def test_extended_cases_recheck(corpus):
    res = check_goldens(corpus, select=lambda c: c.precision == "extended")
    assert res.ok, res.mismatches


def test_corrupted_golden_detected(corpus):
    case = next(c for c in corpus if c.identity == "BAILEY_87NT")
    bad = GoldenCase(case.identity, case.params, case.value * (1 + 1e-6), case.err, case.precision)
    res = check_goldens([bad])
    assert not res.ok and res.mismatches[0][0] == "BAILEY_87NT"


def test_freeze_from_run_output(tmp_path):
    out = tmp_path / "run.jsonl"
    assert main(["--identity", "QBINOMIAL,JACKSON_87", "--samples", "2", "--seed", "4", "--out", str(out),
                 "--workers", "1"]) == 0
    gold = tmp_path / "g.jsonl"
    cases = freeze_goldens(out, gold)
    assert len(cases) == 4
    assert check_goldens(str(gold)).ok


def test_golden_err_covers_depth_change():
    p = resolve("INT87", ParamRecord(q=0.5, a=0.3, b=0.45, c=0.25, d=0.35, e=0.4))
    case = golden_case("INT87", p)
    assert case.err > 0 and case.oracle == "lattice depth doubling"
