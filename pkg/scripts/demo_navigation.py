#!/usr/bin/env python3
"""Replay the two navigation scenarios and draw the robot's route.

Usage: python scripts/demo_navigation.py [--backend relational|ontology]
"""

import argparse

from semnav import fixtures, planner, simworld
from semnav.ontology import OntologyReasoner
from semnav.relational import RelationalReasoner


def render(world, path):
    marks = dict.fromkeys(path, "+")
    marks[path[0]] = "S"
    marks[path[-1]] = "R"
    rows = []
    for y in range(world.height):
        row = ""
        for x in range(world.width):
            cell = (x, y)
            if cell in marks:
                row += marks[cell]
            elif cell in world.walls:
                row += "#"
            else:
                row += world.room_at(cell)[-1] if world.room_at(cell) else "."
        rows.append(row)
    return "\n".join(rows)


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--backend", choices=["relational", "ontology"], default="relational")
    args = parser.parse_args()

    kb = fixtures.reference_kb()
    backend = (RelationalReasoner if args.backend == "relational" else OntologyReasoner)(kb)
    world = simworld.load_world(fixtures.reference_world_text(), kb)

    for request in ("work", "soft drink"):
        session = planner.resolve(request, kb, backend)
        proposal = session.next_proposal()
        print(f"request {request!r}: {proposal.breadcrumb()}")
        path = simworld.plan_path(world, proposal.destination)
        simworld.execute(world, path)
        arrived = world.room_at(world.robot)
        print(f"arrived at {arrived} ({kb.physical_rooms[arrived]}) in {len(path) - 1} steps")
        print(render(world, path))
        print()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
