"""Ontology reasoner backend.

The knowledge base becomes a class tree rooted at ``thing`` plus property
triples held in two partitions (conceptual and physical).  Queries are
goals resolved by backward chaining over the stored facts and a small
built-in rule set, with per-query memoization; explanation chains fall out
of the proof as each rule fires.
"""

from __future__ import annotations

from dataclasses import dataclass

from .kb import KnowledgeBase
from .reasoner import (
    BACKEND_ONTOLOGY,
    EmptyInput,
    Reasoner,
    ReasonerResult,
    UnknownEntity,
    WrongKind,
)

ROOT = "thing"
KIND_NODES = ("characteristic", "meaning", "object", "room", "utility")

STORED_PREDICATES = ("contains", "has_utility", "means", "used_with",
                     "has_characteristic", "instance_of", "located_in")
CONCEPTUAL_PREDICATES = frozenset(
    {"contains", "has_utility", "means", "used_with", "has_characteristic"})


class UnboundGoal(Exception):
    """Raised for an all-variable goal whose enumeration would outgrow the store."""


@dataclass(frozen=True)
class Triple:
    subject: str
    predicate: str
    object: str


class ClassTree:
    """The is-a tree: ``thing`` at the root, one node per concept."""

    def __init__(self):
        self.parent: dict[str, str | None] = {ROOT: None}
        for kind in KIND_NODES:
            self.parent[kind] = ROOT

    def add_class(self, name: str, parent: str) -> None:
        if name in self.parent:
            raise ValueError(f"class {name!r} already in tree")
        if parent not in self.parent:
            raise ValueError(f"unknown parent class {parent!r}")
        self.parent[name] = parent

    def ancestors(self, name: str):
        """Proper ancestors, nearest first."""
        node = self.parent.get(name)
        while node is not None:
            yield node
            node = self.parent.get(node)

    def is_a(self, name: str, ancestor: str) -> bool:
        return ancestor in self.ancestors(name)

    def descendants(self, name: str) -> set[str]:
        out: set[str] = set()
        for node in self.parent:
            if node != name and self.is_a(node, name):
                out.add(node)
        return out

    def kind_of(self, name: str) -> str | None:
        """The first-level node a concept hangs under, if any."""
        if name not in self.parent or name == ROOT or name in KIND_NODES:
            return None
        for anc in self.ancestors(name):
            if anc in KIND_NODES:
                return anc
        return None


def _var(term: str) -> bool:
    return term.startswith("?")


@dataclass(frozen=True)
class Rule:
    """head <- body, plus how a fired rule contributes to the answer chain.

    Chain tokens: "$x" substitutes the binding of variable ?x, "@sub"
    splices the chain of the rule's derived body goal, anything else is a
    literal tag.
    """

    name: str
    head: tuple[str, str, str]
    body: tuple[tuple[str, str, str], ...]
    chain: tuple[str, ...] = ()


RULES: tuple[Rule, ...] = (
    Rule("room_direct", ("direct_room", "?o", "?r"),
         (("contains", "?r", "?o"), ("is_a", "?r", "room"))),
    Rule("location_direct", ("located_at", "?o", "?r"),
         (("direct_room", "?o", "?r"),), ("@sub",)),
    Rule("location_via_container", ("located_at", "?o", "?r"),
         (("contains", "?c", "?o"), ("is_a", "?c", "object"), ("located_at", "?c", "?r")),
         ("$c", "@sub")),
    Rule("char_asserted", ("has_char", "?o", "?k"),
         (("has_characteristic", "?o", "?k"),)),
    Rule("char_inherited", ("has_char", "?o", "?k"),
         (("contains", "?p", "?o"), ("is_a", "?p", "object"), ("has_char", "?p", "?k")),
         ("$p", "@sub")),
    Rule("meaning_via_utility", ("object_means", "?o", "?m"),
         (("has_utility", "?o", "?u"), ("means", "?u", "?m")), ("$u",)),
    Rule("related_partner", ("related", "?o", "?x"),
         (("used_with", "?o", "?x"),), ("used_with",)),
    Rule("related_partner_flip", ("related", "?o", "?x"),
         (("used_with", "?x", "?o"),), ("used_with",)),
    Rule("related_container", ("related", "?o", "?x"),
         (("contains", "?x", "?o"), ("is_a", "?x", "object")), ("container",)),
    Rule("related_containee", ("related", "?o", "?x"),
         (("contains", "?o", "?x"),), ("containee",)),
    Rule("room_inventory", ("class_in_room", "?r", "?c"),
         (("located_in", "?x", "?r"), ("instance_of", "?x", "?c"))),
)

DERIVED_PREDICATES = frozenset(r.head[0] for r in RULES)
_RULES_BY_HEAD: dict[str, list[Rule]] = {}
for _rule in RULES:
    _RULES_BY_HEAD.setdefault(_rule.head[0], []).append(_rule)


class TripleStore:
    """Immutable fact store split into conceptual and physical partitions."""

    def __init__(self, conceptual: tuple[Triple, ...], physical: tuple[Triple, ...],
                 tree: ClassTree, instance_kind: dict[str, str]):
        self.conceptual = conceptual
        self.physical = physical
        self.tree = tree
        self.instance_kind = instance_kind
        self._by_subject: dict[tuple[str, str], list[Triple]] = {}
        self._by_object: dict[tuple[str, str], list[Triple]] = {}
        self._by_pred: dict[str, list[Triple]] = {}
        for t in conceptual + physical:
            self._by_subject.setdefault((t.predicate, t.subject), []).append(t)
            self._by_object.setdefault((t.predicate, t.object), []).append(t)
            self._by_pred.setdefault(t.predicate, []).append(t)

    def __len__(self) -> int:
        return len(self.conceptual) + len(self.physical)

    @property
    def entity_count(self) -> int:
        return len(self.tree.parent) - 1 - len(KIND_NODES) + len(self.instance_kind)

    def facts(self, pred: str, subject: str | None, obj: str | None) -> list[Triple]:
        if subject is not None:
            rows = self._by_subject.get((pred, subject), ())
            return [t for t in rows if obj is None or t.object == obj]
        if obj is not None:
            return list(self._by_object.get((pred, obj), ()))
        return list(self._by_pred.get(pred, ()))

    @classmethod
    def from_kb(cls, kb: KnowledgeBase) -> "TripleStore":
        tree = ClassTree()
        for kind, names in (("room", kb.room_classes), ("object", kb.object_classes),
                            ("utility", kb.utilities), ("meaning", kb.meanings),
                            ("characteristic", kb.characteristics)):
            for name in sorted(names):
                tree.add_class(name, kind)
        rel = kb.relations
        conceptual = []
        # room_contains and object_contains both load as `contains`; the
        # rules recover the distinction through the class tree.
        for a, b in sorted(rel.room_contains | rel.object_contains):
            conceptual.append(Triple(a, "contains", b))
        for a, b in sorted(rel.has_utility):
            conceptual.append(Triple(a, "has_utility", b))
        for a, b in sorted(rel.utility_means):
            conceptual.append(Triple(a, "means", b))
        for a, b in sorted(rel.used_with):
            conceptual.append(Triple(a, "used_with", b))
        for a, b in sorted(rel.has_characteristic):
            conceptual.append(Triple(a, "has_characteristic", b))
        physical = []
        instance_kind: dict[str, str] = {}
        for rid, cls_name in sorted(kb.physical_rooms.items()):
            physical.append(Triple(rid, "instance_of", cls_name))
            instance_kind[rid] = "physical_room"
        for obj in sorted(kb.physical_objects.values(), key=lambda o: o.id):
            physical.append(Triple(obj.id, "instance_of", obj.class_of))
            physical.append(Triple(obj.id, "located_in", obj.located_in))
            instance_kind[obj.id] = "physical_object"
        return cls(tuple(conceptual), tuple(physical), tree, instance_kind)

    def dump(self) -> str:
        lines = sorted(f"{t.subject} {t.predicate} {t.object}"
                       for t in self.conceptual + self.physical)
        return "\n".join(lines) + "\n"


class Solver:
    """Backward chaining with per-query memo tables.

    ``solve`` returns every distinct (subject, object) instantiation of the
    goal, each mapped to its best explanation chain (shortest, then
    lexicographic, among all derivations).
    """

    def __init__(self, store: TripleStore):
        self.store = store
        self._memo: dict[tuple, dict[tuple[str, str], tuple[str, ...]]] = {}
        self._cycle_hits = 0

    def solve(self, pred: str, subject: str | None = None,
              obj: str | None = None) -> dict[tuple[str, str], tuple[str, ...]]:
        if pred in DERIVED_PREDICATES and subject is None and obj is None:
            if self.store.entity_count ** 2 > len(self.store):
                raise UnboundGoal(f"{pred} with no bound argument")
        return self._solve(pred, subject, obj, frozenset())

    def _solve(self, pred, subject, obj, active):
        key = (pred, subject, obj)
        if key in self._memo:
            return self._memo[key]
        if pred == "is_a":
            results = self._solve_is_a(subject, obj)
            self._memo[key] = results
            return results
        if pred not in DERIVED_PREDICATES:
            results = {(t.subject, t.object): ()
                       for t in self.store.facts(pred, subject, obj)}
            self._memo[key] = results
            return results
        if key in active:
            self._cycle_hits += 1
            return {}
        active = active | {key}
        hits_before = self._cycle_hits
        results: dict[tuple[str, str], tuple[str, ...]] = {}
        for rule in _RULES_BY_HEAD[pred]:
            _, head_s, head_o = rule.head
            env: dict[str, str] = {}
            if subject is not None:
                env[head_s] = subject
            if obj is not None:
                if env.get(head_o, obj) != obj:
                    continue
                env[head_o] = obj
            for binding, sub in self._solve_body(rule.body, env, active):
                answer = (binding[head_s], binding[head_o])
                chain = self._build_chain(rule.chain, binding, sub)
                cur = results.get(answer)
                if cur is None or (len(chain), chain) < (len(cur), cur):
                    results[answer] = chain
        # Memoizing under an in-progress recursion hit could freeze an
        # incomplete answer set; only cyclic (invalid) data gets there.
        if self._cycle_hits == hits_before:
            self._memo[key] = results
        return results

    def _solve_body(self, body, env, active):
        states: list[tuple[dict[str, str], tuple[str, ...]]] = [(env, ())]
        for pred, a, b in body:
            nxt = []
            for env0, sub in states:
                ga = env0.get(a) if _var(a) else a
                gb = env0.get(b) if _var(b) else b
                for (vs, vo), chain in self._solve(pred, ga, gb, active).items():
                    if _var(a) and _var(b) and a == b and vs != vo:
                        continue
                    env1 = dict(env0)
                    if _var(a):
                        env1[a] = vs
                    if _var(b):
                        env1[b] = vo
                    nxt.append((env1, chain if pred in DERIVED_PREDICATES else sub))
            states = nxt
            if not states:
                break
        return states

    def _solve_is_a(self, subject, obj):
        tree = self.store.tree
        if subject is not None and obj is not None:
            return {(subject, obj): ()} if tree.is_a(subject, obj) else {}
        if subject is not None:
            return {(subject, anc): () for anc in tree.ancestors(subject)}
        if obj is not None:
            return {(node, obj): () for node in tree.descendants(obj)}
        return {(node, anc): ()
                for node in tree.parent for anc in tree.ancestors(node)}

    @staticmethod
    def _build_chain(spec, binding, sub):
        chain: list[str] = []
        for token in spec:
            if token == "@sub":
                chain.extend(sub)
            elif token.startswith("$"):
                chain.append(binding["?" + token[1:]])
            else:
                chain.append(token)
        return tuple(chain)


class OntologyReasoner(Reasoner):
    backend_id = BACKEND_ONTOLOGY

    def __init__(self, kb: KnowledgeBase):
        self.kb = kb
        self.store = TripleStore.from_kb(kb)

    def _solver(self) -> Solver:
        # fresh memo per query; concurrent queries stay independent
        return Solver(self.store)

    def _check(self, kind: str, name: str) -> str:
        tree_kind = self.store.tree.kind_of(name)
        conceptual = {"room_class": "room", "object_class": "object", "utility": "utility",
                      "meaning": "meaning", "characteristic": "characteristic"}
        namespaces = []
        if tree_kind is not None:
            namespaces.append({v: k for k, v in conceptual.items()}[tree_kind])
        if name in self.store.instance_kind:
            namespaces.append(self.store.instance_kind[name])
        if kind in namespaces:
            return name
        if namespaces:
            raise WrongKind(name, f"declared as {namespaces[0]}, expected {kind}")
        raise UnknownEntity(name)

    @staticmethod
    def _sorted(solutions: dict[tuple[str, str], tuple[str, ...]], position: int):
        by_answer = {ans[position]: chain for ans, chain in solutions.items()}
        answers = sorted(by_answer)
        return answers, [by_answer[a] for a in answers]

    # -- reasoner methods ------------------------------------------------------

    def label_rooms_by_objects(self, objects) -> ReasonerResult:
        objects = tuple(objects)
        if not objects:
            raise EmptyInput("objects", "no objects given")
        solver = self._solver()
        matched: dict[str, set[str]] = {}
        for obj in dict.fromkeys(objects):
            self._check("object_class", obj)
            for (_, room) in solver.solve("direct_room", obj, None):
                matched.setdefault(room, set()).add(obj)
        wanted = set(objects)
        full = sorted(room for room, objs in matched.items() if objs == wanted)
        if full:
            return self._result(full)
        return self._result(sorted(matched, key=lambda room: (-len(matched[room]), room)))

    def room_class_of(self, room: str) -> ReasonerResult:
        self._check("physical_room", room)
        answers, _ = self._sorted(self._solver().solve("instance_of", room, None), 1)
        return self._result(answers)

    def room_classes_containing(self, obj: str) -> ReasonerResult:
        self._check("object_class", obj)
        answers, _ = self._sorted(self._solver().solve("direct_room", obj, None), 1)
        return self._result(answers)

    def related_objects(self, obj: str) -> ReasonerResult:
        self._check("object_class", obj)
        answers, chains = self._sorted(self._solver().solve("related", obj, None), 1)
        return self._result(answers, chains)

    def objects_with_utility(self, utility: str) -> ReasonerResult:
        self._check("utility", utility)
        answers, _ = self._sorted(self._solver().solve("has_utility", None, utility), 0)
        return self._result(answers)

    def objects_with_meaning(self, meaning: str) -> ReasonerResult:
        self._check("meaning", meaning)
        answers, chains = self._sorted(self._solver().solve("object_means", None, meaning), 0)
        return self._result(answers, chains)

    def probable_locations(self, obj: str) -> ReasonerResult:
        self._check("object_class", obj)
        solutions = self._solver().solve("located_at", obj, None)
        by_room = {room: chain for (_, room), chain in solutions.items()}
        answers = sorted(by_room, key=lambda room: (len(by_room[room]) > 0, room))
        return self._result(answers, [by_room[a] for a in answers])

    def physical_rooms_of_class(self, room_class: str) -> ReasonerResult:
        self._check("room_class", room_class)
        answers, _ = self._sorted(self._solver().solve("instance_of", None, room_class), 0)
        return self._result(answers)

    def object_classes_in_physical_room(self, room: str) -> ReasonerResult:
        self._check("physical_room", room)
        answers, _ = self._sorted(self._solver().solve("class_in_room", room, None), 1)
        return self._result(answers)

    def physical_objects_of_class(self, obj: str) -> ReasonerResult:
        self._check("object_class", obj)
        answers, _ = self._sorted(self._solver().solve("instance_of", None, obj), 0)
        return self._result(answers)

    def class_of_physical_object(self, obj: str) -> ReasonerResult:
        self._check("physical_object", obj)
        answers, _ = self._sorted(self._solver().solve("instance_of", obj, None), 1)
        return self._result(answers)

    def all_object_classes(self) -> ReasonerResult:
        return self._result(sorted(self.store.tree.descendants("object")))

    def all_utilities(self) -> ReasonerResult:
        return self._result(sorted(self.store.tree.descendants("utility")))

    def characteristics_of(self, obj: str) -> ReasonerResult:
        self._check("object_class", obj)
        answers, chains = self._sorted(self._solver().solve("has_char", obj, None), 1)
        return self._result(answers, chains)

    def utilities_with_meaning(self, meaning: str) -> ReasonerResult:
        self._check("meaning", meaning)
        answers, _ = self._sorted(self._solver().solve("means", None, meaning), 0)
        return self._result(answers)
