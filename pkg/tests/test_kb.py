import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semnav import fixtures
from semnav.kb import (
    ContainmentCycle,
    CrossNamespaceCollision,
    DuplicateDeclaration,
    EntityName,
    InvalidRelation,
    KbSyntaxError,
    UnknownReference,
    build_kb,
    canon,
    load_kb,
    parse_conceptual_document,
    parse_physical_document,
    serialize_conceptual,
    serialize_physical,
)

EMPTY_PHYSICAL = parse_physical_document("")


# --- canonicalization ---------------------------------------------------------

def test_canon_basic():
    assert canon("Soft drink") == "soft_drink"
    assert canon("soft_drink") == "soft_drink"
    assert canon("SOFT_DRINK") == "soft_drink"
    assert canon("  Living  Room ") == "living_room"


def test_canon_rejects_bad_tokens():
    for bad in ("", "   ", "café", "a-b", "a.b"):
        with pytest.raises(ValueError):
            canon(bad)


@given(st.text(alphabet="abcdefXYZ_0189 ", min_size=1).filter(lambda s: s.strip()))
def test_canon_idempotent(raw):
    token = canon(raw)
    assert canon(token) == token


def test_entity_name_equality_is_canonical():
    assert EntityName.of("Soft drink") == EntityName.of("SOFT_DRINK")
    assert len({EntityName.of("Soft drink"), EntityName.of("soft_drink")}) == 1


# --- parsing --------------------------------------------------------------------

def test_parse_minimal_conceptual():
    doc = parse_conceptual_document("object_class Computer\nutility Work\nhas_utility Computer Work")
    assert len(doc.declarations) == 2
    assert len(doc.relations) == 1


def test_parse_arity_error():
    with pytest.raises(KbSyntaxError) as err:
        parse_conceptual_document("has_utility Computer")
    assert err.value.line_no == 1


def test_parse_unknown_statement():
    with pytest.raises(KbSyntaxError):
        parse_conceptual_document("frobnicate X Y")


def test_parse_duplicate_declaration():
    with pytest.raises(DuplicateDeclaration):
        parse_conceptual_document("utility Work\nutility Work")


def test_parse_comments_and_blanks_ignored():
    doc = parse_conceptual_document("# header\n\nutility Work  # trailing\n")
    assert len(doc.declarations) == 1


def test_reference_conceptual_counts():
    doc = parse_conceptual_document(fixtures.reference_conceptual_text())
    by_kind = {}
    for d in doc.declarations:
        by_kind[d.kind] = by_kind.get(d.kind, 0) + 1
    assert by_kind == {"room_class": 3, "object_class": 8, "utility": 4,
                       "meaning": 2, "characteristic": 1}
    # frozen from the hand-count oracle over the reference document
    assert len(doc.relations) == 20


def test_reference_physical_counts():
    doc = parse_physical_document(fixtures.reference_physical_text())
    assert len(doc.rooms) == 2
    assert len(doc.objects) == 3


def test_parse_empty_physical():
    doc = parse_physical_document("")
    assert doc.rooms == () and doc.objects == ()


def test_parse_physical_missing_room_arg():
    with pytest.raises(KbSyntaxError):
        parse_physical_document("physical_object Chair1 Chair")


def test_parse_physical_duplicate_id_across_kinds():
    with pytest.raises(DuplicateDeclaration):
        parse_physical_document("physical_room X Office\nphysical_object X Chair X")


# --- build validation -------------------------------------------------------------

def test_reference_kb_builds(ref_kb):
    assert len(ref_kb.object_classes) == 8
    assert len(ref_kb.utilities) == 4
    assert ref_kb.physical_rooms == {"room1": "office", "room2": "kitchen"}


def test_unknown_reference_in_relation():
    doc = parse_conceptual_document("object_class A\nhas_utility A Work")
    with pytest.raises(UnknownReference) as err:
        build_kb(doc, EMPTY_PHYSICAL)
    assert err.value.name == "work"


def test_unknown_physical_class():
    conceptual = parse_conceptual_document("room_class Office")
    physical = parse_physical_document("physical_room R1 Office\nphysical_object O1 Ghost R1")
    with pytest.raises(UnknownReference):
        build_kb(conceptual, physical)


def test_containment_cycle_two_nodes():
    doc = parse_conceptual_document(
        "object_class A\nobject_class B\nobject_contains A B\nobject_contains B A")
    with pytest.raises(ContainmentCycle) as err:
        build_kb(doc, EMPTY_PHYSICAL)
    assert err.value.path in (["a", "b", "a"], ["b", "a", "b"])


def test_containment_self_loop():
    doc = parse_conceptual_document("object_class A\nobject_contains A A")
    with pytest.raises(ContainmentCycle):
        build_kb(doc, EMPTY_PHYSICAL)


def test_cross_namespace_collision():
    doc = parse_conceptual_document("object_class Thingy\nutility Thingy")
    with pytest.raises(CrossNamespaceCollision):
        build_kb(doc, EMPTY_PHYSICAL)


def test_reserved_class_name_rejected():
    doc = parse_conceptual_document("object_class Room")
    with pytest.raises(CrossNamespaceCollision):
        build_kb(doc, EMPTY_PHYSICAL)


def test_used_with_self_rejected():
    doc = parse_conceptual_document("object_class A\nused_with A A")
    with pytest.raises(InvalidRelation):
        build_kb(doc, EMPTY_PHYSICAL)


def test_name_matching_across_case_and_spaces(ref_kb):
    assert canon("Soft drink") in ref_kb.object_classes
    assert canon("SOFT_DRINK") in ref_kb.object_classes


def test_kb_namespaces_of(ref_kb):
    assert ref_kb.namespaces_of("chair") == ("object_class",)
    assert ref_kb.namespaces_of("room1") == ("physical_room",)
    assert ref_kb.namespaces_of("nope") == ()


# --- properties ----------------------------------------------------------------

_name = st.text(alphabet="abcdeXY_07", min_size=1, max_size=8)


@st.composite
def conceptual_docs(draw):
    kinds = ("room_class", "object_class", "utility", "meaning", "characteristic")
    decls = draw(st.lists(st.tuples(st.sampled_from(kinds), _name), max_size=12))
    seen = set()
    lines = []
    for kind, name in decls:
        key = (kind, canon(name))
        if key in seen:
            continue
        seen.add(key)
        lines.append(f"{kind} {name}")
    rel_kinds = ("room_contains", "object_contains", "has_utility",
                 "utility_means", "used_with", "has_characteristic")
    rels = draw(st.lists(st.tuples(st.sampled_from(rel_kinds), _name, _name), max_size=8))
    lines += [f"{kind} {a} {b}" for kind, a, b in rels]
    return "\n".join(lines)


@given(conceptual_docs())
@settings(max_examples=60)
def test_conceptual_round_trip(text):
    doc = parse_conceptual_document(text)
    again = parse_conceptual_document(serialize_conceptual(doc))
    assert again.canonical_form() == doc.canonical_form()


def test_physical_round_trip():
    doc = parse_physical_document(fixtures.reference_physical_text())
    again = parse_physical_document(serialize_physical(doc))
    assert again.canonical_form() == doc.canonical_form()


def test_every_used_declaration_is_load_bearing():
    """Deleting any declaration referenced by a relation must fail the build."""
    text = fixtures.reference_conceptual_text()
    doc = parse_conceptual_document(text)
    used = {name.canonical for rel in doc.relations for name in rel.args}
    lines = [line for line in text.splitlines()]
    removed = 0
    for i, line in enumerate(lines):
        tokens = line.split("#", 1)[0].split()
        if len(tokens) == 2 and tokens[0] in ("room_class", "object_class", "utility",
                                              "meaning", "characteristic"):
            if canon(tokens[1]) not in used:
                continue
            removed += 1
            mutated = "\n".join(lines[:i] + lines[i + 1:])
            with pytest.raises(UnknownReference):
                load_kb(mutated, fixtures.reference_physical_text())
    assert removed >= 15  # most reference declarations are load-bearing


@given(st.integers(2, 7), st.data())
@settings(max_examples=40)
def test_containment_random_dag_and_back_edge(n, data):
    edges = data.draw(st.lists(
        st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] < e[1]),
        min_size=1, max_size=10, unique=True))
    lines = [f"object_class o{i}" for i in range(n)]
    lines += [f"object_contains o{a} o{b}" for a, b in edges]
    kb = load_kb("\n".join(lines), "")
    assert len(kb.relations.object_contains) == len(set(edges))
    # closing any edge backwards creates a cycle
    a, b = data.draw(st.sampled_from(edges))
    with pytest.raises(ContainmentCycle):
        load_kb("\n".join(lines + [f"object_contains o{b} o{a}"]), "")
