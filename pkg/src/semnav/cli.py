"""Command-line front door: validate, query, bench, repl, serve.

Exit codes: 0 success, 1 load/config failure, 2 reasoner error,
3 cross-backend mismatch.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import bench as bench_mod
from . import fixtures, planner, simworld
from .kb import KbError, KnowledgeBase, canon, load_kb
from .ontology import OntologyReasoner
from .reasoner import METHODS, METHODS_BY_NAME, Reasoner, ReasonerError, compare_results
from .relational import RelationalReasoner

EXIT_OK = 0
EXIT_LOAD = 1
EXIT_REASONER = 2
EXIT_DIFFER = 3


@dataclass
class AppConfig:
    conceptual: str | None = None
    physical: str | None = None
    world: str | None = None
    backend: str = "relational"
    listen: str = "127.0.0.1:8765"
    repetitions: int = bench_mod.DEFAULT_REPETITIONS

    def load_kb(self) -> KnowledgeBase:
        conceptual = (Path(self.conceptual).read_text(encoding="utf-8")
                      if self.conceptual else fixtures.reference_conceptual_text())
        physical = (Path(self.physical).read_text(encoding="utf-8")
                    if self.physical else fixtures.reference_physical_text())
        return load_kb(conceptual, physical)

    def load_world(self, kb: KnowledgeBase) -> simworld.GridWorld:
        text = (Path(self.world).read_text(encoding="utf-8")
                if self.world else fixtures.reference_world_text())
        return simworld.load_world(text, kb)


def make_backend(name: str, kb: KnowledgeBase) -> Reasoner:
    if name == "relational":
        return RelationalReasoner(kb)
    if name == "ontology":
        return OntologyReasoner(kb)
    raise ValueError(f"unknown backend {name!r}")


def _add_kb_options(parser: argparse.ArgumentParser, world: bool = False) -> None:
    parser.add_argument("--conceptual", help="conceptual KB file (.skb); bundled reference if omitted")
    parser.add_argument("--physical", help="physical KB file (.pkb); bundled reference if omitted")
    if world:
        parser.add_argument("--world", help="grid world file (.world); bundled reference if omitted")


def _render_result(result, kb: KnowledgeBase) -> list[str]:
    lines = []
    for answer, chain in zip(result.answers, result.chains):
        suffix = f" (via {', '.join(chain)})" if chain else ""
        lines.append(f"{answer}{suffix}")
    return lines or ["(no answers)"]


def cmd_validate(args) -> int:
    config = AppConfig(conceptual=args.conceptual, physical=args.physical, world=args.world)
    try:
        kb = config.load_kb()
    except (KbError, OSError, ValueError) as exc:
        print(f"invalid knowledge base: {exc}", file=sys.stderr)
        return EXIT_LOAD
    print(f"conceptual: {len(kb.room_classes)} room classes, {len(kb.object_classes)} object classes, "
          f"{len(kb.utilities)} utilities, {len(kb.meanings)} meanings, "
          f"{len(kb.characteristics)} characteristics")
    print(f"physical: {len(kb.physical_rooms)} rooms, {len(kb.physical_objects)} objects")
    if args.world:
        try:
            world = config.load_world(kb)
        except (simworld.WorldError, OSError) as exc:
            print(f"invalid world: {exc}", file=sys.stderr)
            return EXIT_LOAD
        print(f"world: {world.width}x{world.height}, {len(world.regions)} rooms, robot at {world.robot}")
    print("ok")
    return EXIT_OK


def cmd_query(args) -> int:
    config = AppConfig(conceptual=args.conceptual, physical=args.physical, backend=args.backend)
    method = args.method
    if method not in METHODS_BY_NAME:
        known = ", ".join(sorted(METHODS_BY_NAME))
        print(f"unknown method {method!r}; known methods: {known}", file=sys.stderr)
        return EXIT_LOAD
    try:
        kb = config.load_kb()
        inputs = tuple(canon(i) for i in args.inputs)
    except (KbError, OSError, ValueError) as exc:
        print(f"load failure: {exc}", file=sys.stderr)
        return EXIT_LOAD

    names = ["relational", "ontology"] if config.backend == "both" else [config.backend]
    results = {}
    for name in names:
        try:
            results[name] = make_backend(name, kb).run_method(method, inputs)
        except ReasonerError as exc:
            print(f"{name}: {exc}", file=sys.stderr)
            return EXIT_REASONER
    if len(results) == 1:
        for line in _render_result(next(iter(results.values())), kb):
            print(line)
        return EXIT_OK
    for name, result in results.items():
        print(f"[{name}]")
        for line in _render_result(result, kb):
            print(f"  {line}")
    equal = compare_results(results["relational"], results["ontology"])
    print("EQUAL" if equal else "DIFFER")
    return EXIT_OK if equal else EXIT_DIFFER


def cmd_bench(args) -> int:
    config = AppConfig(conceptual=args.conceptual, physical=args.physical,
                       repetitions=args.reps)
    try:
        kb = config.load_kb()
        cases = bench_mod.comparison_cases(config.repetitions)
        backends = [make_backend("relational", kb), make_backend("ontology", kb)]
    except (KbError, OSError, ValueError) as exc:
        print(f"load failure: {exc}", file=sys.stderr)
        return EXIT_LOAD
    report = bench_mod.run_suite(cases, kb, backends)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "bench_report.csv"
    md_path = out_dir / "bench_report.md"
    csv_path.write_text(bench_mod.emit_csv(report), encoding="utf-8")
    md_path.write_text(bench_mod.emit_markdown(report), encoding="utf-8")
    print(bench_mod.emit_markdown(report))
    print(f"wrote {csv_path} and {md_path}")
    if not report.all_equal:
        print("backends disagree", file=sys.stderr)
        return EXIT_DIFFER
    return EXIT_OK


def _print_unrealizable(session: planner.PlanSession) -> None:
    for chain, reason in session.unrealizable:
        crumb = " -> ".join(h.entity for h in chain)
        print(f"  unrealizable: {crumb} ({reason})")


def cmd_repl(args) -> int:
    config = AppConfig(conceptual=args.conceptual, physical=args.physical,
                       world=args.world, backend=args.backend)
    try:
        kb = config.load_kb()
        world = config.load_world(kb)
        backend = make_backend(config.backend, kb)
    except (KbError, simworld.WorldError, OSError, ValueError) as exc:
        print(f"load failure: {exc}", file=sys.stderr)
        return EXIT_LOAD

    print(f"semantic navigation repl ({config.backend} backend); "
          "enter a goal, then y to go / n for another option / q to quit")
    while True:
        try:
            request = input("goal> ").strip()
        except EOFError:
            return EXIT_OK
        if not request:
            continue
        if request == "q":
            return EXIT_OK
        try:
            session = planner.resolve(request, kb, backend)
        except (ReasonerError, planner.PlannerError) as exc:
            print(f"cannot plan: {exc}")
            continue
        while True:
            proposal = session.next_proposal()
            if proposal is None:
                print("no more possibilities")
                _print_unrealizable(session)
                break
            room_class = kb.physical_rooms[proposal.destination]
            print(f"proposal {proposal.ordinal}: go to {proposal.destination} ({room_class})")
            print(f"  chain: {proposal.breadcrumb()}")
            try:
                answer = input("accept? [y/n/q] ").strip().lower()
            except EOFError:
                return EXIT_OK
            if answer == "q":
                return EXIT_OK
            if answer == "y":
                session.accept(proposal.ordinal)
                try:
                    path = simworld.plan_path(world, proposal.destination)
                    simworld.execute(world, path)
                except simworld.WorldError as exc:
                    print(f"cannot move: {exc}")
                    break
                arrived = world.room_at(world.robot)
                arrived_class = kb.physical_rooms.get(arrived, "?") if arrived else "?"
                print(f"arrived at {arrived} ({arrived_class}) after {len(path) - 1} steps, "
                      f"robot at {world.robot}")
                break
            session.reject(proposal.ordinal)


def cmd_serve(args) -> int:
    from .service import serve  # deferred: keeps CLI import light

    listen = args.listen or os.environ.get("SEMNAV_LISTEN") or "127.0.0.1:8765"
    config = AppConfig(conceptual=args.conceptual, physical=args.physical,
                       world=args.world, listen=listen)
    try:
        kb = config.load_kb()
        world = config.load_world(kb)
    except (KbError, simworld.WorldError, OSError, ValueError) as exc:
        print(f"load failure: {exc}", file=sys.stderr)
        return EXIT_LOAD
    host, _, port = listen.rpartition(":")
    try:
        serve(kb, world, host or "127.0.0.1", int(port), static_dir=args.static)
    except ValueError:
        print(f"bad listen address {listen!r}, expected host:port", file=sys.stderr)
        return EXIT_LOAD
    except OSError as exc:
        print(f"cannot listen on {listen}: {exc}", file=sys.stderr)
        return EXIT_LOAD
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="semnav",
                                     description="Semantic navigation knowledge engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="lint KB and world files")
    _add_kb_options(p_validate, world=True)
    p_validate.set_defaults(func=cmd_validate)

    p_query = sub.add_parser("query", help="run one reasoner method")
    _add_kb_options(p_query)
    p_query.add_argument("--backend", choices=["relational", "ontology", "both"],
                         default="relational")
    p_query.add_argument("method", help="one of: " + ", ".join(m.name for m in METHODS))
    p_query.add_argument("inputs", nargs="*")
    p_query.set_defaults(func=cmd_query)

    p_bench = sub.add_parser("bench", help="compare both backends on the fixture suite")
    _add_kb_options(p_bench)
    p_bench.add_argument("--reps", type=int, default=bench_mod.DEFAULT_REPETITIONS,
                         help="timed repetitions per case (default 100)")
    p_bench.add_argument("--out-dir", default="bench_out")
    p_bench.set_defaults(func=cmd_bench)

    p_repl = sub.add_parser("repl", help="interactive navigation loop")
    _add_kb_options(p_repl, world=True)
    p_repl.add_argument("--backend", choices=["relational", "ontology"], default="relational")
    p_repl.set_defaults(func=cmd_repl)

    p_serve = sub.add_parser("serve", help="serve the JSON API for the console")
    _add_kb_options(p_serve, world=True)
    p_serve.add_argument("--listen", help="host:port (default 127.0.0.1:8765, "
                                          "or SEMNAV_LISTEN)")
    p_serve.add_argument("--static", help="directory of console assets to serve at /")
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
