import json
from pathlib import Path

import pytest

from semnav.bench import (
    BenchCase,
    compare_outputs,
    emit_csv,
    emit_markdown,
    run_suite,
    comparison_cases,
)
from semnav.reasoner import ReasonerResult

GOLDEN = json.loads((Path(__file__).parent / "data" / "comparison_golden.json").read_text())


def result(answers, chains=None, backend="relational"):
    chains = chains if chains is not None else [()] * len(answers)
    return ReasonerResult(tuple(answers), tuple(tuple(c) for c in chains), backend)


@pytest.fixture(scope="module")
def report(ref_kb, relational, ontology):
    return run_suite(comparison_cases(repetitions=3), ref_kb, [relational, ontology])


def test_case_validation():
    with pytest.raises(ValueError):
        BenchCase("all_utilities", (), repetitions=0)
    assert BenchCase("all_utilities", (), repetitions=1).repetitions == 1


def test_compare_outputs_order_insensitive():
    a = result(["playstation", "television", "computer"])
    b = result(["computer", "playstation", "television"], backend="ontology")
    assert compare_outputs(a, b)
    assert compare_outputs(b, a)


def test_compare_outputs_detects_difference():
    assert not compare_outputs(result(["office"]), result(["office", "living_room"]))
    assert compare_outputs(result([]), result([]))


def test_compare_outputs_chain_sensitive():
    a = result(["kitchen"], [("refrigerator",)])
    b = result(["kitchen"], [()])
    assert not compare_outputs(a, b)


def test_suite_all_equal(report):
    assert len(report.results) == 13
    assert report.all_equal
    for case_result in report.results:
        for run in case_result.runs.values():
            assert run.mean_ns > 0
            assert run.runs == 3


def test_suite_matches_golden(report):
    by_method = {r.case.method: r for r in report.results}
    assert len(GOLDEN) == 13
    for row in GOLDEN:
        case_result = by_method[row["method"]]
        assert list(case_result.case.inputs) == row["inputs"]
        want = {(a, frozenset(c)) for a, c in zip(row["answers"], row["chains"])}
        for run in case_result.runs.values():
            assert run.result.pairs() == want, row["method"]


def test_verdicts_reproducible(ref_kb, relational, ontology):
    first = run_suite(comparison_cases(repetitions=1), ref_kb, [relational, ontology])
    second = run_suite(comparison_cases(repetitions=1), ref_kb, [relational, ontology])
    assert [r.outputs_equal for r in first.results] == \
        [r.outputs_equal for r in second.results]
    assert all(r.outputs_equal for r in first.results)


def test_error_cases_compare_by_kind(ref_kb, relational, ontology):
    cases = [BenchCase("room_class_of", ("room9",), repetitions=1)]
    report = run_suite(cases, ref_kb, [relational, ontology])
    assert report.results[0].outputs_equal
    for run in report.results[0].runs.values():
        assert run.error_kind == "UnknownEntity"


def test_csv_shape(report):
    lines = emit_csv(report).splitlines()
    assert lines[0] == "method,input,backend,mean_ns,runs,output_digest,outputs_equal"
    assert len(lines) == 1 + 26  # 13 cases x 2 backends
    assert all(line.count(",") == 6 for line in lines)


def test_csv_empty_report(ref_kb):
    report = run_suite([], ref_kb, [])
    assert emit_csv(report).splitlines() == [
        "method,input,backend,mean_ns,runs,output_digest,outputs_equal"]


def test_markdown_shape(report):
    lines = emit_markdown(report).splitlines()
    body = [line for line in lines if line.startswith("| ") and "Method" not in line]
    assert len(body) == 13
    text = "\n".join(lines)
    assert "faster than" in text
    assert "Suite mean per query" in text
    assert "All outputs equal: yes." in text


def test_digests_stable(report):
    for case_result in report.results:
        digests = {run.digest for run in case_result.runs.values()}
        assert len(digests) == 1  # equal outputs hash identically


class BrokenBackend:
    """Answers every query with garbage; must trip the equality verdicts."""

    backend_id = "broken"

    def run_method(self, method, inputs=()):
        return result(["wrong_answer"], backend="broken")


def test_broken_backend_flagged(ref_kb, relational):
    report = run_suite(comparison_cases(repetitions=1), ref_kb, [relational, BrokenBackend()])
    assert not report.all_equal
    assert all(not r.outputs_equal for r in report.results)
    assert "All outputs equal: NO." in emit_markdown(report)
    assert emit_csv(report).count("false") == 26
