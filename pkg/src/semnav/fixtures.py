"""Bundled reference knowledge base and world, used as CLI defaults."""

from __future__ import annotations

from importlib import resources

from .kb import KnowledgeBase, load_kb


def _read(name: str) -> str:
    return resources.files("semnav").joinpath("data", name).read_text(encoding="utf-8")


def reference_conceptual_text() -> str:
    return _read("home.skb")


def reference_physical_text() -> str:
    return _read("home.pkb")


def reference_world_text() -> str:
    return _read("home.world")


def reference_kb() -> KnowledgeBase:
    return load_kb(reference_conceptual_text(), reference_physical_text())
