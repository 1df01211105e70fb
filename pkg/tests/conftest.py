import pytest

from semnav import fixtures
from semnav.ontology import OntologyReasoner
from semnav.relational import RelationalReasoner
from semnav.simworld import load_world


@pytest.fixture(scope="session")
def ref_kb():
    return fixtures.reference_kb()


@pytest.fixture(scope="session")
def relational(ref_kb):
    return RelationalReasoner(ref_kb)


@pytest.fixture(scope="session")
def ontology(ref_kb):
    return OntologyReasoner(ref_kb)


@pytest.fixture(scope="session", params=["relational", "ontology"])
def backend(request, relational, ontology):
    return {"relational": relational, "ontology": ontology}[request.param]


@pytest.fixture()
def ref_world(ref_kb):
    return load_world(fixtures.reference_world_text(), ref_kb)
