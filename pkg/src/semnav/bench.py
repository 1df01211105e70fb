"""Benchmark harness: run every reasoner method on both backends, check
that the outputs agree (order-insensitively), and report mean latencies.

Timing covers the in-process call boundary for both backends, on a
monotonic nanosecond clock, averaged over the requested repetitions after
one untimed warm-up call.  Timed runs are strictly sequential.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass
from datetime import datetime, timezone

from .kb import KnowledgeBase
from .reasoner import Reasoner, ReasonerError, ReasonerResult, compare_results

DEFAULT_REPETITIONS = 100


@dataclass(frozen=True)
class BenchCase:
    method: str
    inputs: tuple[str, ...] = ()
    repetitions: int = DEFAULT_REPETITIONS

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")

    def input_label(self) -> str:
        return " ".join(self.inputs)


@dataclass(frozen=True)
class BackendRun:
    backend_id: str
    mean_ns: float
    runs: int
    digest: str
    result: ReasonerResult | None
    error_kind: str | None

    @property
    def ok(self) -> bool:
        return self.error_kind is None


@dataclass(frozen=True)
class CaseResult:
    case: BenchCase
    runs: dict[str, BackendRun]
    outputs_equal: bool


@dataclass(frozen=True)
class BenchReport:
    results: tuple[CaseResult, ...]
    kb_digest: str
    timestamp: str
    boundary: str = "in-process call"

    @property
    def all_equal(self) -> bool:
        return all(r.outputs_equal for r in self.results)

    def backend_ids(self) -> list[str]:
        return list(self.results[0].runs) if self.results else []

    def mean_of_means(self, backend_id: str) -> float:
        runs = [r.runs[backend_id].mean_ns for r in self.results]
        return sum(runs) / len(runs) if runs else 0.0


def comparison_cases(repetitions: int = DEFAULT_REPETITIONS) -> list[BenchCase]:
    """The fixture suite: one case per comparison-table row, reference KB inputs."""
    rows = [
        ("label_rooms_by_objects", ("computer",)),
        ("room_class_of", ("room2",)),
        ("room_classes_containing", ("chair",)),
        ("related_objects", ("soft_drink",)),
        ("objects_with_utility", ("work",)),
        ("objects_with_meaning", ("funny",)),
        ("probable_locations", ("soft_drink",)),
        ("physical_rooms_of_class", ("office",)),
        ("object_classes_in_physical_room", ("room1",)),
        ("physical_objects_of_class", ("chair",)),
        ("class_of_physical_object", ("chair1",)),
        ("all_object_classes", ()),
        ("all_utilities", ()),
    ]
    return [BenchCase(method, inputs, repetitions) for method, inputs in rows]


def _error_digest(kind: str) -> str:
    return hashlib.sha256(f"error:{kind}".encode()).hexdigest()


def _run_case(case: BenchCase, backend: Reasoner) -> BackendRun:
    result: ReasonerResult | None = None
    error_kind: str | None = None
    try:
        result = backend.run_method(case.method, case.inputs)  # warm-up, untimed
    except ReasonerError as exc:
        error_kind = exc.kind
    total = 0
    for _ in range(case.repetitions):
        t0 = time.perf_counter_ns()
        try:
            backend.run_method(case.method, case.inputs)
        except ReasonerError:
            pass
        total += time.perf_counter_ns() - t0
    digest = result.canonical_digest() if result is not None else _error_digest(error_kind)
    return BackendRun(
        backend_id=backend.backend_id,
        mean_ns=total / case.repetitions,
        runs=case.repetitions,
        digest=digest,
        result=result,
        error_kind=error_kind,
    )


def compare_outputs(a: ReasonerResult, b: ReasonerResult) -> bool:
    return compare_results(a, b)


def _runs_equal(a: BackendRun, b: BackendRun) -> bool:
    if a.ok and b.ok:
        return compare_outputs(a.result, b.result)
    return a.error_kind == b.error_kind


def run_suite(cases, kb: KnowledgeBase, backends) -> BenchReport:
    results = []
    for case in cases:
        runs = {backend.backend_id: _run_case(case, backend) for backend in backends}
        run_list = list(runs.values())
        equal = all(_runs_equal(run_list[0], other) for other in run_list[1:])
        results.append(CaseResult(case, runs, equal))
    return BenchReport(
        results=tuple(results),
        kb_digest=kb.digest(),
        timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
    )


def emit_csv(report: BenchReport) -> str:
    lines = ["method,input,backend,mean_ns,runs,output_digest,outputs_equal"]
    for case_result in report.results:
        for backend_id, run in case_result.runs.items():
            lines.append(",".join([
                case_result.case.method,
                case_result.case.input_label(),
                backend_id,
                str(int(round(run.mean_ns))),
                str(run.runs),
                run.digest,
                str(case_result.outputs_equal).lower(),
            ]))
    return "\n".join(lines) + "\n"


def _render_output(run: BackendRun) -> str:
    if not run.ok:
        return f"error: {run.error_kind}"
    parts = []
    for answer, chain in zip(run.result.answers, run.result.chains):
        parts.append(f"{answer} (via {', '.join(chain)})" if chain else answer)
    return "; ".join(parts) if parts else "(none)"


def emit_markdown(report: BenchReport) -> str:
    backends = report.backend_ids()
    header = ["Method", "Input"]
    header += [f"Output ({b})" for b in backends]
    header += [f"Mean time ({b})" for b in backends]
    header += ["Equal"]
    lines = [
        "| " + " | ".join(header) + " |",
        "|" + "|".join(["---"] * len(header)) + "|",
    ]
    for case_result in report.results:
        row = [case_result.case.method, case_result.case.input_label() or "--"]
        row += [_render_output(case_result.runs[b]) for b in backends]
        row += [f"{case_result.runs[b].mean_ns / 1e6:.3f} ms" for b in backends]
        row += ["yes" if case_result.outputs_equal else "NO"]
        lines.append("| " + " | ".join(row) + " |")
    lines.append("")
    lines.append(f"KB digest: `{report.kb_digest}`; run at {report.timestamp}; "
                 f"timing boundary: {report.boundary}.")
    if len(backends) == 2 and report.results:
        a, b = backends
        mean_a, mean_b = report.mean_of_means(a), report.mean_of_means(b)
        lines.append(f"Suite mean per query: {a} {mean_a / 1e6:.3f} ms, "
                     f"{b} {mean_b / 1e6:.3f} ms.")
        if mean_a > 0 and mean_b > 0:
            faster, slower = (a, b) if mean_a <= mean_b else (b, a)
            ratio = max(mean_a, mean_b) / min(mean_a, mean_b)
            lines.append(f"{faster} is {ratio:.2f}x faster than {slower} on this run.")
    lines.append(f"All outputs equal: {'yes' if report.all_equal else 'NO'}.")
    return "\n".join(lines) + "\n"
