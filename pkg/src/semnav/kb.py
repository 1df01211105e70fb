"""Knowledge base model: entity names, KB documents, parsing and validation.

Knowledge is split into two plain-text documents: a conceptual document
(classes and their relations) and a physical document (concrete room and
object instances).  Both parse into intermediate documents which
``build_kb`` validates into an immutable ``KnowledgeBase`` shared by every
reasoner backend.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field

_CANONICAL_RE = re.compile(r"[a-z0-9_]+\Z")

# Conceptual declaration keywords, in canonical serialization order.
CONCEPT_KINDS = ("room_class", "object_class", "utility", "meaning", "characteristic")

# Relation keyword -> (subject kind, object kind).
RELATION_KINDS = {
    "room_contains": ("room_class", "object_class"),
    "object_contains": ("object_class", "object_class"),
    "has_utility": ("object_class", "utility"),
    "utility_means": ("utility", "meaning"),
    "used_with": ("object_class", "object_class"),
    "has_characteristic": ("object_class", "characteristic"),
}

PHYSICAL_KINDS = ("physical_room", "physical_object")

ALL_NAMESPACES = CONCEPT_KINDS + PHYSICAL_KINDS


class KbError(Exception):
    """Base class for knowledge base loading errors."""


class KbSyntaxError(KbError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class DuplicateDeclaration(KbError):
    def __init__(self, name: str, line_no: int = 0):
        super().__init__(f"duplicate declaration of {name!r}")
        self.name = name
        self.line_no = line_no


class UnknownReference(KbError):
    def __init__(self, name: str, site: str):
        super().__init__(f"unknown reference {name!r} at {site}")
        self.name = name
        self.site = site


class ContainmentCycle(KbError):
    def __init__(self, path: list[str]):
        super().__init__("containment cycle: " + " -> ".join(path))
        self.path = list(path)


class CrossNamespaceCollision(KbError):
    def __init__(self, name: str, namespaces: tuple[str, ...] = ()):
        super().__init__(f"name {name!r} declared in several namespaces {namespaces}")
        self.name = name
        self.namespaces = namespaces


class InvalidRelation(KbError):
    def __init__(self, kind: str, reason: str):
        super().__init__(f"invalid {kind} relation: {reason}")
        self.kind = kind
        self.reason = reason


def canon(raw: str) -> str:
    """Canonical identifier token: lowercase, whitespace folded to '_'.

    'Soft drink', 'soft_drink' and 'SOFT_DRINK' all map to 'soft_drink'.
    Raises ValueError when the result is empty or contains characters
    outside [a-z0-9_].
    """
    token = "_".join(raw.strip().lower().split())
    if not _CANONICAL_RE.match(token):
        raise ValueError(f"cannot canonicalize name {raw!r}")
    return token


@dataclass(frozen=True, eq=False)
class EntityName:
    """A name with its canonical token and the display form seen on input."""

    canonical: str
    display: str

    @classmethod
    def of(cls, raw: str) -> "EntityName":
        return cls(canon(raw), raw.strip())

    def __eq__(self, other: object) -> bool:
        if isinstance(other, EntityName):
            return self.canonical == other.canonical
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.canonical)

    def __str__(self) -> str:
        return self.canonical


@dataclass(frozen=True)
class Declaration:
    kind: str
    name: EntityName
    line_no: int


@dataclass(frozen=True)
class RelationAssertion:
    kind: str
    args: tuple[EntityName, ...]
    line_no: int


@dataclass(frozen=True)
class ConceptualDocument:
    declarations: tuple[Declaration, ...]
    relations: tuple[RelationAssertion, ...]

    def canonical_form(self) -> tuple[frozenset, frozenset]:
        decls = frozenset((d.kind, d.name.canonical) for d in self.declarations)
        rels = frozenset(
            (r.kind, tuple(a.canonical for a in r.args)) for r in self.relations
        )
        return decls, rels


@dataclass(frozen=True)
class PhysicalRoomDecl:
    id: EntityName
    class_of: EntityName
    line_no: int


@dataclass(frozen=True)
class PhysicalObjectDecl:
    id: EntityName
    class_of: EntityName
    located_in: EntityName
    line_no: int


@dataclass(frozen=True)
class PhysicalDocument:
    rooms: tuple[PhysicalRoomDecl, ...]
    objects: tuple[PhysicalObjectDecl, ...]

    def canonical_form(self) -> frozenset:
        rooms = frozenset(("physical_room", r.id.canonical, r.class_of.canonical) for r in self.rooms)
        objs = frozenset(
            ("physical_object", o.id.canonical, o.class_of.canonical, o.located_in.canonical)
            for o in self.objects
        )
        return rooms | objs


def _content_lines(text: str):
    """Yield (line_no, tokens) for every non-blank, non-comment line."""
    for line_no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        yield line_no, body.split()


def _name(token: str, line_no: int) -> EntityName:
    try:
        return EntityName.of(token)
    except ValueError as exc:
        raise KbSyntaxError(line_no, str(exc)) from exc


def parse_conceptual_document(text: str) -> ConceptualDocument:
    """Parse a conceptual KB document (.skb)."""
    declarations: list[Declaration] = []
    relations: list[RelationAssertion] = []
    declared: set[tuple[str, str]] = set()
    for line_no, tokens in _content_lines(text):
        keyword, args = tokens[0], tokens[1:]
        if keyword in CONCEPT_KINDS:
            if len(args) != 1:
                raise KbSyntaxError(line_no, f"{keyword} takes 1 name, got {len(args)}")
            name = _name(args[0], line_no)
            if (keyword, name.canonical) in declared:
                raise DuplicateDeclaration(name.canonical, line_no)
            declared.add((keyword, name.canonical))
            declarations.append(Declaration(keyword, name, line_no))
        elif keyword in RELATION_KINDS:
            if len(args) != 2:
                raise KbSyntaxError(line_no, f"{keyword} takes 2 names, got {len(args)}")
            pair = tuple(_name(a, line_no) for a in args)
            relations.append(RelationAssertion(keyword, pair, line_no))
        else:
            raise KbSyntaxError(line_no, f"unknown statement {keyword!r}")
    return ConceptualDocument(tuple(declarations), tuple(relations))


def parse_physical_document(text: str) -> PhysicalDocument:
    """Parse a physical KB document (.pkb)."""
    rooms: list[PhysicalRoomDecl] = []
    objects: list[PhysicalObjectDecl] = []
    ids: set[str] = set()
    for line_no, tokens in _content_lines(text):
        keyword, args = tokens[0], tokens[1:]
        if keyword == "physical_room":
            if len(args) != 2:
                raise KbSyntaxError(line_no, f"physical_room takes 2 names, got {len(args)}")
            rid, cls = (_name(a, line_no) for a in args)
            if rid.canonical in ids:
                raise DuplicateDeclaration(rid.canonical, line_no)
            ids.add(rid.canonical)
            rooms.append(PhysicalRoomDecl(rid, cls, line_no))
        elif keyword == "physical_object":
            if len(args) != 3:
                raise KbSyntaxError(line_no, f"physical_object takes 3 names, got {len(args)}")
            oid, cls, room = (_name(a, line_no) for a in args)
            if oid.canonical in ids:
                raise DuplicateDeclaration(oid.canonical, line_no)
            ids.add(oid.canonical)
            objects.append(PhysicalObjectDecl(oid, cls, room, line_no))
        else:
            raise KbSyntaxError(line_no, f"unknown statement {keyword!r}")
    return PhysicalDocument(tuple(rooms), tuple(objects))


def serialize_conceptual(doc: ConceptualDocument) -> str:
    """Canonical text form: declarations by kind then name, relations sorted."""
    by_kind: dict[str, list[EntityName]] = {k: [] for k in CONCEPT_KINDS}
    for d in doc.declarations:
        by_kind[d.kind].append(d.name)
    lines: list[str] = []
    for kind in CONCEPT_KINDS:
        for name in sorted(by_kind[kind], key=lambda n: n.canonical):
            lines.append(f"{kind} {name.display}")
    for rel in sorted(doc.relations, key=lambda r: (r.kind, tuple(a.canonical for a in r.args))):
        lines.append(f"{rel.kind} {rel.args[0].display} {rel.args[1].display}")
    return "\n".join(lines) + "\n"


def serialize_physical(doc: PhysicalDocument) -> str:
    lines = [
        f"physical_room {r.id.display} {r.class_of.display}"
        for r in sorted(doc.rooms, key=lambda r: r.id.canonical)
    ]
    lines += [
        f"physical_object {o.id.display} {o.class_of.display} {o.located_in.display}"
        for o in sorted(doc.objects, key=lambda o: o.id.canonical)
    ]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ConceptualRelations:
    room_contains: frozenset[tuple[str, str]]
    object_contains: frozenset[tuple[str, str]]
    has_utility: frozenset[tuple[str, str]]
    utility_means: frozenset[tuple[str, str]]
    used_with: frozenset[tuple[str, str]]  # stored in sorted pair order
    has_characteristic: frozenset[tuple[str, str]]


@dataclass(frozen=True)
class PhysicalObject:
    id: str
    class_of: str
    located_in: str


# Names the ontology backend reserves for its built-in class tree; a
# conceptual entity with one of these names could not be represented in
# both backends, so the shared model rejects it up front.
RESERVED_CLASS_NAMES = frozenset({"thing", "characteristic", "meaning", "object", "room", "utility"})


@dataclass(frozen=True)
class KnowledgeBase:
    """Validated, immutable knowledge: reasoning never mutates it."""

    room_classes: frozenset[str]
    object_classes: frozenset[str]
    utilities: frozenset[str]
    meanings: frozenset[str]
    characteristics: frozenset[str]
    relations: ConceptualRelations
    physical_rooms: dict[str, str]  # id -> room class
    physical_objects: dict[str, PhysicalObject]
    display: dict[str, str] = field(repr=False, default_factory=dict)

    def entities_of(self, kind: str) -> frozenset[str]:
        return {
            "room_class": self.room_classes,
            "object_class": self.object_classes,
            "utility": self.utilities,
            "meaning": self.meanings,
            "characteristic": self.characteristics,
            "physical_room": frozenset(self.physical_rooms),
            "physical_object": frozenset(self.physical_objects),
        }[kind]

    def namespaces_of(self, name: str) -> tuple[str, ...]:
        """Every namespace in which ``name`` is declared."""
        return tuple(ns for ns in ALL_NAMESPACES if name in self.entities_of(ns))

    def display_of(self, name: str) -> str:
        return self.display.get(name, name)

    def digest(self) -> str:
        """Stable content hash, used as benchmark metadata."""
        parts = [
            ",".join(sorted(self.room_classes)),
            ",".join(sorted(self.object_classes)),
            ",".join(sorted(self.utilities)),
            ",".join(sorted(self.meanings)),
            ",".join(sorted(self.characteristics)),
        ]
        rel = self.relations
        for rel_set in (rel.room_contains, rel.object_contains, rel.has_utility,
                        rel.utility_means, rel.used_with, rel.has_characteristic):
            parts.append(",".join(f"{a}>{b}" for a, b in sorted(rel_set)))
        parts.append(",".join(f"{i}:{c}" for i, c in sorted(self.physical_rooms.items())))
        parts.append(",".join(f"{o.id}:{o.class_of}@{o.located_in}"
                              for o in sorted(self.physical_objects.values(), key=lambda o: o.id)))
        return hashlib.sha256("|".join(parts).encode()).hexdigest()


def _check_containment_acyclic(edges: set[tuple[str, str]]) -> None:
    children: dict[str, list[str]] = {}
    for container, containee in edges:
        children.setdefault(container, []).append(containee)
    state: dict[str, int] = {}  # 1 = on stack, 2 = done

    def visit(node: str, stack: list[str]) -> None:
        state[node] = 1
        stack.append(node)
        for nxt in children.get(node, ()):
            if state.get(nxt) == 1:
                raise ContainmentCycle(stack[stack.index(nxt):] + [nxt])
            if state.get(nxt) != 2:
                visit(nxt, stack)
        stack.pop()
        state[node] = 2

    for start in list(children):
        if state.get(start) != 2:
            visit(start, [])


def build_kb(conceptual: ConceptualDocument, physical: PhysicalDocument) -> KnowledgeBase:
    """Validate both documents into an immutable KnowledgeBase."""
    sets: dict[str, set[str]] = {k: set() for k in CONCEPT_KINDS}
    display: dict[str, str] = {}
    namespace_of: dict[str, str] = {}
    for decl in conceptual.declarations:
        name = decl.name.canonical
        if name in RESERVED_CLASS_NAMES:
            raise CrossNamespaceCollision(name, (decl.kind, "builtin class tree"))
        prior = namespace_of.get(name)
        if prior is not None and prior != decl.kind:
            raise CrossNamespaceCollision(name, (prior, decl.kind))
        namespace_of[name] = decl.kind
        sets[decl.kind].add(name)
        display.setdefault(name, decl.name.display)

    def require(name: EntityName, kind: str, site: str) -> str:
        if name.canonical not in sets[kind]:
            raise UnknownReference(name.canonical, site)
        return name.canonical

    rel_sets: dict[str, set[tuple[str, str]]] = {k: set() for k in RELATION_KINDS}
    for rel in conceptual.relations:
        want_a, want_b = RELATION_KINDS[rel.kind]
        site = f"{rel.kind} (line {rel.line_no})"
        a = require(rel.args[0], want_a, site)
        b = require(rel.args[1], want_b, site)
        if rel.kind == "used_with":
            if a == b:
                raise InvalidRelation("used_with", f"{a} related to itself")
            a, b = sorted((a, b))
        if rel.kind == "object_contains" and a == b:
            raise ContainmentCycle([a, a])
        rel_sets[rel.kind].add((a, b))

    _check_containment_acyclic(rel_sets["object_contains"])

    physical_rooms: dict[str, str] = {}
    for room in physical.rooms:
        site = f"physical_room {room.id.canonical} (line {room.line_no})"
        cls = require(room.class_of, "room_class", site)
        physical_rooms[room.id.canonical] = cls
        display.setdefault(room.id.canonical, room.id.display)

    physical_objects: dict[str, PhysicalObject] = {}
    for obj in physical.objects:
        site = f"physical_object {obj.id.canonical} (line {obj.line_no})"
        cls = require(obj.class_of, "object_class", site)
        if obj.located_in.canonical not in physical_rooms:
            raise UnknownReference(obj.located_in.canonical, site)
        physical_objects[obj.id.canonical] = PhysicalObject(
            obj.id.canonical, cls, obj.located_in.canonical
        )
        display.setdefault(obj.id.canonical, obj.id.display)

    return KnowledgeBase(
        room_classes=frozenset(sets["room_class"]),
        object_classes=frozenset(sets["object_class"]),
        utilities=frozenset(sets["utility"]),
        meanings=frozenset(sets["meaning"]),
        characteristics=frozenset(sets["characteristic"]),
        relations=ConceptualRelations(**{k: frozenset(v) for k, v in rel_sets.items()}),
        physical_rooms=physical_rooms,
        physical_objects=physical_objects,
        display=display,
    )


def load_kb(conceptual_text: str, physical_text: str) -> KnowledgeBase:
    return build_kb(
        parse_conceptual_document(conceptual_text),
        parse_physical_document(physical_text),
    )
