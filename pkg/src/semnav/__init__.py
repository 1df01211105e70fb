"""Dual-backend semantic knowledge engine for indoor robot navigation."""

from .kb import KnowledgeBase, build_kb, canon, load_kb
from .ontology import OntologyReasoner
from .planner import PlanSession, Proposal, resolve
from .reasoner import Reasoner, ReasonerResult, compare_results
from .relational import RelationalReasoner
from .simworld import GridWorld, execute, load_world, plan_path

__all__ = [
    "KnowledgeBase", "build_kb", "canon", "load_kb",
    "OntologyReasoner", "RelationalReasoner",
    "Reasoner", "ReasonerResult", "compare_results",
    "PlanSession", "Proposal", "resolve",
    "GridWorld", "execute", "load_world", "plan_path",
]
