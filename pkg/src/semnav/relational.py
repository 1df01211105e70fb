"""Relational reasoner backend.

The knowledge base is materialized as one table per concept plus one join
table per many-to-many relation; every reasoner method runs a fixed
pipeline of relational operators (select, project, join, union, distinct,
sort) over those tables.  Containment chains are resolved by iterating
joins to a fixed point bounded by the containment depth.
"""

from __future__ import annotations

from dataclasses import dataclass

from .kb import KnowledgeBase
from .reasoner import (
    BACKEND_RELATIONAL,
    EmptyInput,
    Reasoner,
    ReasonerResult,
    UnknownEntity,
    WrongKind,
)


@dataclass(frozen=True)
class Table:
    name: str
    columns: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(f"row arity {len(row)} != {len(self.columns)} in {self.name}")

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        lines += [",".join(row) for row in sorted(self.rows)]
        return "\n".join(lines) + "\n"


# --- query plan nodes -------------------------------------------------------

@dataclass(frozen=True)
class Scan:
    table: str


@dataclass(frozen=True)
class Select:
    source: "Plan"
    column: str
    value: str


@dataclass(frozen=True)
class Project:
    source: "Plan"
    columns: tuple[str, ...]


@dataclass(frozen=True)
class Join:
    left: "Plan"
    right: "Plan"
    on: tuple[tuple[str, str], ...]  # (left column, right column) pairs


@dataclass(frozen=True)
class Union:
    sources: tuple["Plan", ...]


@dataclass(frozen=True)
class Distinct:
    source: "Plan"


@dataclass(frozen=True)
class Sort:
    source: "Plan"
    columns: tuple[str, ...]


Plan = Scan | Select | Project | Join | Union | Distinct | Sort


class TableSet:
    """The loaded tables plus hash indexes for constant lookups."""

    def __init__(self, tables: dict[str, Table]):
        self.tables = tables
        self._indexes: dict[tuple[str, str], dict[str, list[tuple[str, ...]]]] = {}

    @classmethod
    def from_kb(cls, kb: KnowledgeBase) -> "TableSet":
        def entity_table(name: str, values) -> Table:
            return Table(name, ("name",), tuple((v,) for v in sorted(values)))

        rel = kb.relations
        tables = {
            "room_class": entity_table("room_class", kb.room_classes),
            "object_class": entity_table("object_class", kb.object_classes),
            "utility": entity_table("utility", kb.utilities),
            "meaning": entity_table("meaning", kb.meanings),
            "characteristic": entity_table("characteristic", kb.characteristics),
            "physical_room": Table(
                "physical_room", ("id", "room_class"),
                tuple(sorted(kb.physical_rooms.items())),
            ),
            "physical_object": Table(
                "physical_object", ("id", "object_class", "room_id"),
                tuple(sorted((o.id, o.class_of, o.located_in) for o in kb.physical_objects.values())),
            ),
            "room_contains": Table("room_contains", ("room_class", "object_class"),
                                   tuple(sorted(rel.room_contains))),
            "object_contains": Table("object_contains", ("container", "containee"),
                                     tuple(sorted(rel.object_contains))),
            "has_utility": Table("has_utility", ("object_class", "utility"),
                                 tuple(sorted(rel.has_utility))),
            "utility_means": Table("utility_means", ("utility", "meaning"),
                                   tuple(sorted(rel.utility_means))),
            # canonical pair order; symmetric closure is applied at query time
            "used_with": Table("used_with", ("first", "second"),
                               tuple(sorted(rel.used_with))),
            "has_characteristic": Table("has_characteristic", ("object_class", "characteristic"),
                                        tuple(sorted(rel.has_characteristic))),
        }
        return cls(tables)

    def index(self, table: str, column: str) -> dict[str, list[tuple[str, ...]]]:
        key = (table, column)
        if key not in self._indexes:
            tbl = self.tables[table]
            pos = tbl.columns.index(column)
            idx: dict[str, list[tuple[str, ...]]] = {}
            for row in tbl.rows:
                idx.setdefault(row[pos], []).append(row)
            self._indexes[key] = idx
        return self._indexes[key]

    def dump_csv(self) -> dict[str, str]:
        return {name: tbl.to_csv() for name, tbl in sorted(self.tables.items())}


def evaluate(plan: Plan, tables: TableSet) -> Table:
    """Evaluate a plan; side-effect free, tables are never modified."""
    if isinstance(plan, Scan):
        return tables.tables[plan.table]
    if isinstance(plan, Select):
        # Selecting a constant straight off a base table uses the hash index.
        if isinstance(plan.source, Scan):
            rows = tuple(tables.index(plan.source.table, plan.column).get(plan.value, ()))
            base = tables.tables[plan.source.table]
            return Table("select", base.columns, rows)
        src = evaluate(plan.source, tables)
        pos = src.columns.index(plan.column)
        return Table("select", src.columns, tuple(r for r in src.rows if r[pos] == plan.value))
    if isinstance(plan, Project):
        src = evaluate(plan.source, tables)
        idxs = [src.columns.index(c) for c in plan.columns]
        return Table("project", plan.columns, tuple(tuple(r[i] for i in idxs) for r in src.rows))
    if isinstance(plan, Join):
        left = evaluate(plan.left, tables)
        right = evaluate(plan.right, tables)
        lpos = [left.columns.index(l) for l, _ in plan.on]
        rpos = [right.columns.index(r) for _, r in plan.on]
        keep = [i for i, c in enumerate(right.columns) if c not in {r for _, r in plan.on}]
        out_cols = left.columns + tuple(right.columns[i] for i in keep)
        assert len(set(out_cols)) == len(out_cols), f"column clash in join: {out_cols}"
        buckets: dict[tuple[str, ...], list[tuple[str, ...]]] = {}
        for row in right.rows:
            buckets.setdefault(tuple(row[i] for i in rpos), []).append(row)
        rows = []
        for lrow in left.rows:
            for rrow in buckets.get(tuple(lrow[i] for i in lpos), ()):
                rows.append(lrow + tuple(rrow[i] for i in keep))
        return Table("join", out_cols, tuple(rows))
    if isinstance(plan, Union):
        # positional union: arity must match, first source names the columns
        parts = [evaluate(s, tables) for s in plan.sources]
        cols = parts[0].columns
        for p in parts[1:]:
            if len(p.columns) != len(cols):
                raise ValueError(f"union arity mismatch: {p.columns} vs {cols}")
        return Table("union", cols, tuple(r for p in parts for r in p.rows))
    if isinstance(plan, Distinct):
        src = evaluate(plan.source, tables)
        return Table("distinct", src.columns, tuple(dict.fromkeys(src.rows)))
    if isinstance(plan, Sort):
        src = evaluate(plan.source, tables)
        idxs = [src.columns.index(c) for c in plan.columns]
        return Table("sort", src.columns,
                     tuple(sorted(src.rows, key=lambda r: tuple(r[i] for i in idxs))))
    raise TypeError(f"not a plan node: {plan!r}")


def _column(table: Table, column: str) -> list[str]:
    pos = table.columns.index(column)
    return [row[pos] for row in table.rows]


class RelationalReasoner(Reasoner):
    backend_id = BACKEND_RELATIONAL

    def __init__(self, kb: KnowledgeBase):
        self.kb = kb
        self.tables = TableSet.from_kb(kb)

    # -- input validation ----------------------------------------------------

    _ENTITY_TABLES = ("room_class", "object_class", "utility", "meaning",
                      "characteristic", "physical_room", "physical_object")

    def _check(self, kind: str, name: str) -> str:
        """Entity lookup through the loaded tables themselves."""
        if name in self.tables.index(kind, "name" if kind not in ("physical_room", "physical_object") else "id"):
            return name
        for other in self._ENTITY_TABLES:
            if other == kind:
                continue
            col = "id" if other in ("physical_room", "physical_object") else "name"
            if name in self.tables.index(other, col):
                raise WrongKind(name, f"declared as {other}, expected {kind}")
        raise UnknownEntity(name)

    # -- containment closure (iterated join, bounded by containment depth) ---

    def _ancestor_paths(self, obj: str) -> list[tuple[str, tuple[str, ...]]]:
        """All (ancestor, container path) pairs reachable upward from obj.

        The path lists the traversed containers in order, ending at the
        ancestor itself; obj appears with the empty path.
        """
        contains_idx = self.tables.index("object_contains", "containee")
        frontier: list[tuple[str, tuple[str, ...]]] = [(obj, ())]
        out: list[tuple[str, tuple[str, ...]]] = [(obj, ())]
        while frontier:
            nxt: list[tuple[str, tuple[str, ...]]] = []
            for entity, path in frontier:
                for row in contains_idx.get(entity, ()):
                    container = row[0]
                    step = (container, path + (container,))
                    nxt.append(step)
                    out.append(step)
            frontier = nxt
        return out

    @staticmethod
    def _best_chains(candidates) -> dict[str, tuple[str, ...]]:
        """Keep the minimal (length, lexicographic) chain per answer."""
        best: dict[str, tuple[str, ...]] = {}
        for answer, chain in candidates:
            chain = tuple(chain)
            if answer not in best or (len(chain), chain) < (len(best[answer]), best[answer]):
                best[answer] = chain
        return best

    # -- reasoner methods ------------------------------------------------------

    def label_rooms_by_objects(self, objects) -> ReasonerResult:
        objects = tuple(objects)
        if not objects:
            raise EmptyInput("objects", "no objects given")
        matched: dict[str, set[str]] = {}  # room -> matched objects
        for obj in dict.fromkeys(objects):
            self._check("object_class", obj)
            plan = Project(Select(Scan("room_contains"), "object_class", obj), ("room_class",))
            for room in _column(evaluate(plan, self.tables), "room_class"):
                matched.setdefault(room, set()).add(obj)
        wanted = set(objects)
        full = sorted(room for room, objs in matched.items() if objs == wanted)
        if full:
            return self._result(full)
        ranked = sorted(matched, key=lambda room: (-len(matched[room]), room))
        return self._result(ranked)

    def room_class_of(self, room: str) -> ReasonerResult:
        self._check("physical_room", room)
        plan = Project(Select(Scan("physical_room"), "id", room), ("room_class",))
        return self._result(_column(evaluate(plan, self.tables), "room_class"))

    def room_classes_containing(self, obj: str) -> ReasonerResult:
        self._check("object_class", obj)
        plan = Sort(Distinct(Project(
            Select(Scan("room_contains"), "object_class", obj), ("room_class",))), ("room_class",))
        return self._result(_column(evaluate(plan, self.tables), "room_class"))

    def related_objects(self, obj: str) -> ReasonerResult:
        self._check("object_class", obj)
        branches = (
            (Project(Select(Scan("used_with"), "first", obj), ("second",)), "used_with"),
            (Project(Select(Scan("used_with"), "second", obj), ("first",)), "used_with"),
            (Project(Select(Scan("object_contains"), "containee", obj), ("container",)), "container"),
            (Project(Select(Scan("object_contains"), "container", obj), ("containee",)), "containee"),
        )
        candidates = []
        for plan, tag in branches:
            table = evaluate(plan, self.tables)
            candidates += [(row[0], (tag,)) for row in table.rows]
        best = self._best_chains(candidates)
        answers = sorted(best)
        return self._result(answers, [best[a] for a in answers])

    def objects_with_utility(self, utility: str) -> ReasonerResult:
        self._check("utility", utility)
        plan = Sort(Distinct(Project(
            Select(Scan("has_utility"), "utility", utility), ("object_class",))), ("object_class",))
        return self._result(_column(evaluate(plan, self.tables), "object_class"))

    def objects_with_meaning(self, meaning: str) -> ReasonerResult:
        self._check("meaning", meaning)
        plan = Project(
            Join(Scan("has_utility"),
                 Select(Scan("utility_means"), "meaning", meaning),
                 (("utility", "utility"),)),
            ("object_class", "utility"),
        )
        pairs = evaluate(plan, self.tables).rows
        best = self._best_chains((obj, (utility,)) for obj, utility in pairs)
        answers = sorted(best)
        return self._result(answers, [best[a] for a in answers])

    def probable_locations(self, obj: str) -> ReasonerResult:
        self._check("object_class", obj)
        room_idx = self.tables.index("room_contains", "object_class")
        candidates = []
        for ancestor, path in self._ancestor_paths(obj):
            for row in room_idx.get(ancestor, ()):
                candidates.append((row[0], path))
        best = self._best_chains(candidates)
        answers = sorted(best, key=lambda room: (len(best[room]) > 0, room))
        return self._result(answers, [best[a] for a in answers])

    def physical_rooms_of_class(self, room_class: str) -> ReasonerResult:
        self._check("room_class", room_class)
        plan = Sort(Project(Select(Scan("physical_room"), "room_class", room_class), ("id",)), ("id",))
        return self._result(_column(evaluate(plan, self.tables), "id"))

    def object_classes_in_physical_room(self, room: str) -> ReasonerResult:
        self._check("physical_room", room)
        plan = Sort(Distinct(Project(
            Select(Scan("physical_object"), "room_id", room), ("object_class",))), ("object_class",))
        return self._result(_column(evaluate(plan, self.tables), "object_class"))

    def physical_objects_of_class(self, obj: str) -> ReasonerResult:
        self._check("object_class", obj)
        plan = Sort(Project(Select(Scan("physical_object"), "object_class", obj), ("id",)), ("id",))
        return self._result(_column(evaluate(plan, self.tables), "id"))

    def class_of_physical_object(self, obj: str) -> ReasonerResult:
        self._check("physical_object", obj)
        plan = Project(Select(Scan("physical_object"), "id", obj), ("object_class",))
        return self._result(_column(evaluate(plan, self.tables), "object_class"))

    def all_object_classes(self) -> ReasonerResult:
        plan = Sort(Project(Scan("object_class"), ("name",)), ("name",))
        return self._result(_column(evaluate(plan, self.tables), "name"))

    def all_utilities(self) -> ReasonerResult:
        plan = Sort(Project(Scan("utility"), ("name",)), ("name",))
        return self._result(_column(evaluate(plan, self.tables), "name"))

    def characteristics_of(self, obj: str) -> ReasonerResult:
        self._check("object_class", obj)
        char_idx = self.tables.index("has_characteristic", "object_class")
        candidates = []
        for ancestor, path in self._ancestor_paths(obj):
            for row in char_idx.get(ancestor, ()):
                candidates.append((row[1], path))
        best = self._best_chains(candidates)
        answers = sorted(best)
        return self._result(answers, [best[a] for a in answers])

    def utilities_with_meaning(self, meaning: str) -> ReasonerResult:
        self._check("meaning", meaning)
        plan = Sort(Distinct(Project(
            Select(Scan("utility_means"), "meaning", meaning), ("utility",))), ("utility",))
        return self._result(_column(evaluate(plan, self.tables), "utility"))
