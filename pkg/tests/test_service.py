import json
import threading
import urllib.error
import urllib.request

import pytest

from semnav import fixtures
from semnav.service import make_server
from semnav.simworld import load_world


@pytest.fixture()
def server(ref_kb):
    world = load_world(fixtures.reference_world_text(), ref_kb)
    srv = make_server(ref_kb, world, "127.0.0.1", 0)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{srv.server_address[1]}"
    srv.shutdown()


def get(base, path):
    with urllib.request.urlopen(base + path) as response:
        return json.loads(response.read())


def post(base, path, payload):
    request = urllib.request.Request(base + path, data=json.dumps(payload).encode(),
                                     headers={"Content-Type": "application/json"})
    with urllib.request.urlopen(request) as response:
        return json.loads(response.read())


def error_of(fn):
    with pytest.raises(urllib.error.HTTPError) as err:
        fn()
    return err.value.code, json.loads(err.value.read())


def test_state(server):
    state = get(server, "/api/state")
    assert state["width"] == 15 and state["height"] == 6
    assert state["robot"] == [7, 3]
    assert set(state["rooms"]) == {"room1", "room2"}
    assert state["rows"][0] == "#" * 15
    assert [3, 3] in state["regions"]["room1"]


def test_methods_descriptor(server):
    methods = get(server, "/api/kb/methods")["methods"]
    assert len(methods) == 14
    names = {m["name"] for m in methods}
    assert "probable_locations" in names and "characteristics_of" in names
    assert all(set(m) == {"name", "input", "description"} for m in methods)


def test_query_single(server):
    got = get(server, "/api/kb/query?method=probable_locations&input=soft_drink&backend=relational")
    assert got == {"backend": "relational", "answers": ["kitchen"], "chains": [["refrigerator"]]}


def test_query_both(server):
    got = get(server, "/api/kb/query?method=objects_with_meaning&input=funny&backend=both")
    assert got["equal"] is True
    assert set(got["relational"]["answers"]) == {"computer", "playstation", "television"}


def test_query_set_input(server):
    got = get(server, "/api/kb/query?method=label_rooms_by_objects&input=chair,computer")
    assert got["answers"] == ["office"]


def test_query_unknown_entity_404(server):
    code, payload = error_of(lambda: get(server, "/api/kb/query?method=room_class_of&input=room9"))
    assert code == 404
    assert payload["error"]["kind"] == "UnknownEntity"
    assert payload["error"]["subject"] == "room9"


def test_query_wrong_kind_400(server):
    code, payload = error_of(lambda: get(server, "/api/kb/query?method=probable_locations&input=kitchen"))
    assert code == 400
    assert payload["error"]["kind"] == "WrongKind"


def test_goal_accept_flow(server):
    goal = post(server, "/api/goal", {"request": "work"})
    assert goal["proposal"]["destination"] == "room1"
    chain = goal["proposal"]["chain"]
    assert [h["entity"] for h in chain] == ["work", "computer", "office", "room1"]
    accepted = post(server, f"/api/session/{goal['session']}/accept", {"ordinal": 0})
    assert accepted["arrived"] == "room1"
    assert accepted["arrived_class"] == "office"
    assert accepted["trajectory"][0] == [7, 3]
    assert accepted["robot"] == accepted["trajectory"][-1]
    assert get(server, "/api/state")["robot"] == accepted["robot"]


def test_goal_reject_flow(server):
    goal = post(server, "/api/goal", {"request": "funny"})
    rejected = post(server, f"/api/session/{goal['session']}/reject", {"ordinal": 0})
    assert rejected["exhausted"] is True
    assert len(rejected["unrealizable"]) == 2
    reasons = {u["reason"] for u in rejected["unrealizable"]}
    assert all("living_room" in r for r in reasons)


def test_goal_unknown_entity(server):
    code, payload = error_of(lambda: post(server, "/api/goal", {"request": "xyzzy"}))
    assert code == 404
    assert payload["error"]["kind"] == "UnknownEntity"


def test_unknown_session_404(server):
    code, payload = error_of(lambda: post(server, "/api/session/nope/reject", {"ordinal": 0}))
    assert code == 404
    assert payload["error"]["kind"] == "UnknownSession"


def test_bad_ordinal_400(server):
    goal = post(server, "/api/goal", {"request": "work"})
    code, payload = error_of(
        lambda: post(server, f"/api/session/{goal['session']}/reject", {"ordinal": 9}))
    assert code == 400
    assert payload["error"]["kind"] == "UnknownOrdinal"


def test_bench_endpoint(server):
    report = get(server, "/api/bench?reps=1")
    assert report["all_equal"] is True
    assert len(report["cases"]) == 13
    first = report["cases"][0]
    assert set(first["backends"]) == {"relational", "ontology"}
    assert all(run["mean_ns"] > 0 for run in first["backends"].values())


def test_reasoner_endpoints_are_stateless(server):
    before = get(server, "/api/state")["robot"]
    get(server, "/api/kb/query?method=all_utilities&backend=both")
    get(server, "/api/kb/methods")
    assert get(server, "/api/state")["robot"] == before


def test_repl_and_service_equal_sequences(server, ref_kb):
    """Same request script yields the same proposal stream as the planner."""
    from semnav import planner
    from semnav.relational import RelationalReasoner

    session = planner.resolve("funny", ref_kb, RelationalReasoner(ref_kb))
    local = []
    while (proposal := session.next_proposal()) is not None:
        local.append(proposal.destination)
    remote = []
    goal = post(server, "/api/goal", {"request": "funny"})
    while "proposal" in goal:
        remote.append(goal["proposal"]["destination"])
        goal = post(server, f"/api/session/{goal['session']}/reject",
                    {"ordinal": goal["proposal"]["ordinal"]})
    assert remote == local
