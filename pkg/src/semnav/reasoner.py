"""Backend-independent reasoner contract.

Every backend answers the same query methods over a shared immutable
KnowledgeBase and returns a ``ReasonerResult``: an ordered answer list plus
one explanation chain per answer.  Order within one backend is
deterministic, but cross-backend equality is defined purely on sets.
"""

from __future__ import annotations

import hashlib
import json
from abc import ABC, abstractmethod
from dataclasses import dataclass

BACKEND_RELATIONAL = "relational"
BACKEND_ONTOLOGY = "ontology"


class ReasonerError(Exception):
    kind = "ReasonerError"

    def __init__(self, subject: str, detail: str = ""):
        msg = f"{self.kind}: {subject}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.subject = subject
        self.detail = detail


class UnknownEntity(ReasonerError):
    kind = "UnknownEntity"


class WrongKind(ReasonerError):
    kind = "WrongKind"


class EmptyInput(ReasonerError):
    kind = "EmptyInput"


@dataclass(frozen=True)
class ReasonerResult:
    answers: tuple[str, ...]
    chains: tuple[tuple[str, ...], ...]
    backend_id: str

    def __post_init__(self):
        if len(self.answers) != len(set(self.answers)):
            raise ValueError(f"duplicate answers: {self.answers}")
        if len(self.chains) != len(self.answers):
            raise ValueError("chains and answers length mismatch")

    def pairs(self) -> frozenset[tuple[str, frozenset[str]]]:
        """Order-insensitive view used for cross-backend comparison."""
        return frozenset(
            (a, frozenset(c)) for a, c in zip(self.answers, self.chains)
        )

    def canonical_digest(self) -> str:
        payload = sorted([a, sorted(set(c))] for a, c in zip(self.answers, self.chains))
        return hashlib.sha256(json.dumps(payload).encode()).hexdigest()


def compare_results(a: ReasonerResult, b: ReasonerResult) -> bool:
    """True iff answer sets and per-answer chain sets match; order ignored."""
    return a.pairs() == b.pairs()


@dataclass(frozen=True)
class MethodSpec:
    name: str
    input_kind: str  # one of INPUT_KINDS
    description: str


INPUT_KINDS = (
    "object_class_set",
    "object_class",
    "room_class",
    "utility",
    "meaning",
    "physical_room",
    "physical_object",
    "none",
)

METHODS: tuple[MethodSpec, ...] = (
    MethodSpec("label_rooms_by_objects", "object_class_set",
               "Room classes that contain all the given objects, or the best partial matches."),
    MethodSpec("room_class_of", "physical_room",
               "Conceptual class of a physical room."),
    MethodSpec("room_classes_containing", "object_class",
               "Room classes with a direct containment edge to the object."),
    MethodSpec("related_objects", "object_class",
               "Objects used with, containing, or contained by the object."),
    MethodSpec("objects_with_utility", "utility",
               "Object classes that serve the utility."),
    MethodSpec("objects_with_meaning", "meaning",
               "Object classes whose use carries the meaning."),
    MethodSpec("probable_locations", "object_class",
               "Room classes where the object is probably found, following containment upward."),
    MethodSpec("physical_rooms_of_class", "room_class",
               "Physical rooms of the given room class."),
    MethodSpec("object_classes_in_physical_room", "physical_room",
               "Classes of the objects located in the physical room."),
    MethodSpec("physical_objects_of_class", "object_class",
               "Physical objects of the given object class."),
    MethodSpec("class_of_physical_object", "physical_object",
               "Conceptual class of a physical object."),
    MethodSpec("all_object_classes", "none",
               "Every declared object class."),
    MethodSpec("all_utilities", "none",
               "Every declared utility."),
    MethodSpec("characteristics_of", "object_class",
               "Asserted characteristics plus those inherited from containers."),
)

METHODS_BY_NAME = {m.name: m for m in METHODS}


class Reasoner(ABC):
    """Common surface of both reasoner backends; all methods are pure."""

    backend_id: str

    @abstractmethod
    def label_rooms_by_objects(self, objects) -> ReasonerResult: ...

    @abstractmethod
    def room_class_of(self, room: str) -> ReasonerResult: ...

    @abstractmethod
    def room_classes_containing(self, obj: str) -> ReasonerResult: ...

    @abstractmethod
    def related_objects(self, obj: str) -> ReasonerResult: ...

    @abstractmethod
    def objects_with_utility(self, utility: str) -> ReasonerResult: ...

    @abstractmethod
    def objects_with_meaning(self, meaning: str) -> ReasonerResult: ...

    @abstractmethod
    def probable_locations(self, obj: str) -> ReasonerResult: ...

    @abstractmethod
    def physical_rooms_of_class(self, room_class: str) -> ReasonerResult: ...

    @abstractmethod
    def object_classes_in_physical_room(self, room: str) -> ReasonerResult: ...

    @abstractmethod
    def physical_objects_of_class(self, obj: str) -> ReasonerResult: ...

    @abstractmethod
    def class_of_physical_object(self, obj: str) -> ReasonerResult: ...

    @abstractmethod
    def all_object_classes(self) -> ReasonerResult: ...

    @abstractmethod
    def all_utilities(self) -> ReasonerResult: ...

    @abstractmethod
    def characteristics_of(self, obj: str) -> ReasonerResult: ...

    @abstractmethod
    def utilities_with_meaning(self, meaning: str) -> ReasonerResult:
        """Utilities carrying the meaning (planner expansion support)."""

    def run_method(self, method: str, inputs=()) -> ReasonerResult:
        """Dispatch a method by name with positional inputs."""
        spec = METHODS_BY_NAME.get(method)
        if spec is None:
            raise ValueError(f"unknown reasoner method {method!r}")
        if spec.input_kind == "none":
            return getattr(self, method)()
        if spec.input_kind == "object_class_set":
            return self.label_rooms_by_objects(tuple(inputs))
        if len(inputs) != 1:
            raise ValueError(f"{method} takes exactly one input, got {len(inputs)}")
        return getattr(self, method)(inputs[0])

    def _result(self, answers, chains=None) -> ReasonerResult:
        answers = tuple(answers)
        if chains is None:
            chains = tuple(() for _ in answers)
        return ReasonerResult(answers, tuple(tuple(c) for c in chains), self.backend_id)
