"""Goal planner: turns a semantic request into destination proposals.

The planner chains reasoner answers breadth-first from the requested
concept down to physical rooms, yielding one proposal per distinct
destination.  Rejecting a proposal excludes its destination and advances
to the next alternative until the possibilities are exhausted.  Chains
that stop at a room class with no physical instance are kept aside as
unrealizable, so the caller can explain why an answer produced no
destination.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .kb import KnowledgeBase, canon
from .reasoner import Reasoner, UnknownEntity

HOP_REQUEST = "request"
HOP_MEANING_UTILITY = "meaning->utility"
HOP_UTILITY_OBJECT = "utility->object"
HOP_CHARACTERISTIC_OBJECT = "characteristic->object"
HOP_OBJECT_CONTAINER = "object->container"
HOP_OBJECT_ROOM_CLASS = "object->room_class"
HOP_ROOM_CLASS_PHYSICAL = "room_class->physical_room"
HOP_LOCATED_IN = "located_in"


class PlannerError(Exception):
    pass


class AmbiguousRequest(PlannerError):
    def __init__(self, name: str, namespaces: tuple[str, ...]):
        super().__init__(f"{name!r} exists in several namespaces: {', '.join(namespaces)}")
        self.name = name
        self.namespaces = namespaces


class UnknownOrdinal(PlannerError):
    def __init__(self, ordinal: int):
        super().__init__(f"no emitted proposal with ordinal {ordinal}")
        self.ordinal = ordinal


@dataclass(frozen=True)
class Hop:
    entity: str
    kind: str


@dataclass(frozen=True)
class Proposal:
    destination: str
    chain: tuple[Hop, ...]
    ordinal: int

    def breadcrumb(self) -> str:
        return " -> ".join(h.entity for h in self.chain)


@dataclass
class PlanSession:
    """One request's proposal queue, advanced by rejection."""

    request: str
    kind: str
    pending: deque[Proposal]
    unrealizable: tuple[tuple[tuple[Hop, ...], str], ...]
    emitted: dict[int, Proposal] = field(default_factory=dict)
    rejected: set[str] = field(default_factory=set)
    accepted: set[int] = field(default_factory=set)

    def next_proposal(self) -> Proposal | None:
        """The next proposal whose destination is still allowed; None when exhausted."""
        while self.pending:
            proposal = self.pending.popleft()
            if proposal.destination in self.rejected:
                continue
            self.emitted[proposal.ordinal] = proposal
            return proposal
        return None

    def reject(self, ordinal: int) -> None:
        if ordinal not in self.emitted or ordinal in self.accepted:
            raise UnknownOrdinal(ordinal)
        self.rejected.add(self.emitted[ordinal].destination)

    def accept(self, ordinal: int) -> Proposal:
        if ordinal not in self.emitted or ordinal in self.accepted:
            raise UnknownOrdinal(ordinal)
        self.accepted.add(ordinal)
        return self.emitted[ordinal]


def resolve(request: str, kb: KnowledgeBase, reasoner: Reasoner) -> PlanSession:
    """Expand a request into the full ordered queue of destination proposals."""
    try:
        name = canon(request)
    except ValueError as exc:
        raise UnknownEntity(request, str(exc)) from exc
    namespaces = kb.namespaces_of(name)
    if not namespaces:
        raise UnknownEntity(name)
    if len(namespaces) > 1:
        raise AmbiguousRequest(name, namespaces)
    kind = namespaces[0]

    start = (Hop(name, HOP_REQUEST),)
    frontier: deque[tuple[str, str, tuple[Hop, ...]]] = deque([(kind, name, start)])
    proposals: list[Proposal] = []
    seen: set[str] = set()
    unrealizable: list[tuple[tuple[Hop, ...], str]] = []

    while frontier:
        node_kind, entity, chain = frontier.popleft()
        if node_kind == "meaning":
            for utility in reasoner.utilities_with_meaning(entity).answers:
                frontier.append(("utility", utility,
                                 chain + (Hop(utility, HOP_MEANING_UTILITY),)))
        elif node_kind == "utility":
            for obj in reasoner.objects_with_utility(entity).answers:
                frontier.append(("object_class", obj,
                                 chain + (Hop(obj, HOP_UTILITY_OBJECT),)))
        elif node_kind == "characteristic":
            for obj in reasoner.all_object_classes().answers:
                if entity in reasoner.characteristics_of(obj).answers:
                    frontier.append(("object_class", obj,
                                     chain + (Hop(obj, HOP_CHARACTERISTIC_OBJECT),)))
        elif node_kind == "object_class":
            locations = reasoner.probable_locations(entity)
            for room_class, via in zip(locations.answers, locations.chains):
                hops = tuple(Hop(c, HOP_OBJECT_CONTAINER) for c in via)
                hops += (Hop(room_class, HOP_OBJECT_ROOM_CLASS),)
                frontier.append(("room_class", room_class, chain + hops))
        elif node_kind == "room_class":
            rooms = reasoner.physical_rooms_of_class(entity).answers
            if not rooms:
                unrealizable.append((chain, f"no physical room of class {entity}"))
            for room in rooms:
                frontier.append(("physical_room", room,
                                 chain + (Hop(room, HOP_ROOM_CLASS_PHYSICAL),)))
        elif node_kind == "physical_object":
            room = kb.physical_objects[entity].located_in
            frontier.append(("physical_room", room, chain + (Hop(room, HOP_LOCATED_IN),)))
        elif node_kind == "physical_room":
            if entity not in seen:
                seen.add(entity)
                proposals.append(Proposal(entity, chain, len(proposals)))
        else:
            raise AssertionError(f"unexpected node kind {node_kind}")

    return PlanSession(name, kind, deque(proposals), tuple(unrealizable))
