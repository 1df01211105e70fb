"""Deterministic grid world: labeled room regions, robot pose, shortest paths.

World files have a header (``room`` and ``anchor`` lines), a blank line,
then the grid: ``#`` wall, ``.`` free corridor, ``@`` the robot start,
and one letter per room region.  Coordinates are 0-based, x rightward,
y downward.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .kb import KnowledgeBase

Cell = tuple[int, int]

# Tie-break order for equal-length paths: Up < Down < Left < Right.
MOVES: tuple[Cell, ...] = ((0, -1), (0, 1), (-1, 0), (1, 0))


class WorldError(Exception):
    pass


class WorldSyntaxError(WorldError):
    pass


class UnknownRoomLabel(WorldError):
    pass


class UnreachableAnchor(WorldError):
    pass


class MissingRobotStart(WorldError):
    pass


class NoPath(WorldError):
    pass


class InvalidTrajectory(WorldError):
    pass


@dataclass
class GridWorld:
    width: int
    height: int
    walls: frozenset[Cell]
    regions: dict[str, frozenset[Cell]]
    anchors: dict[str, Cell]
    robot: Cell
    _room_by_cell: dict[Cell, str] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._room_by_cell:
            for room, cells in self.regions.items():
                for cell in cells:
                    self._room_by_cell[cell] = room

    def in_bounds(self, cell: Cell) -> bool:
        x, y = cell
        return 0 <= x < self.width and 0 <= y < self.height

    def is_free(self, cell: Cell) -> bool:
        return self.in_bounds(cell) and cell not in self.walls

    def room_at(self, cell: Cell) -> str | None:
        return self._room_by_cell.get(cell)

    def occupancy_rows(self) -> list[str]:
        """Walls as '#', everything walkable as '.'."""
        return ["".join("#" if (x, y) in self.walls else "."
                        for x in range(self.width))
                for y in range(self.height)]


def load_world(text: str, kb: KnowledgeBase) -> GridWorld:
    # Header and grid are separated by the first blank line.
    lines = text.splitlines()
    try:
        split = next(i for i, line in enumerate(lines) if not line.strip())
    except StopIteration:
        raise WorldSyntaxError("no blank line between header and grid") from None

    label_to_room: dict[str, str] = {}
    anchor_decls: dict[str, Cell] = {}
    for i, raw in enumerate(lines[:split]):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        if parts[0] == "room":
            if len(parts) != 3:
                raise WorldSyntaxError(f"line {i + 1}: room takes <label> <id>")
            label, room_id = parts[1], parts[2].lower()
            if len(label) != 1 or not label.isalpha():
                raise WorldSyntaxError(f"line {i + 1}: label must be one letter")
            if room_id not in kb.physical_rooms:
                raise UnknownRoomLabel(f"room id {room_id!r} not declared in the KB")
            label_to_room[label] = room_id
        elif parts[0] == "anchor":
            if len(parts) != 4:
                raise WorldSyntaxError(f"line {i + 1}: anchor takes <label> <x> <y>")
            try:
                anchor_decls[parts[1]] = (int(parts[2]), int(parts[3]))
            except ValueError as exc:
                raise WorldSyntaxError(f"line {i + 1}: bad coordinates") from exc
        else:
            raise WorldSyntaxError(f"line {i + 1}: unknown header statement {parts[0]!r}")

    rows = [line for line in lines[split:] if line.strip()]
    if not rows:
        raise WorldSyntaxError("no grid found")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise WorldSyntaxError("grid rows must have equal length")
    height = len(rows)

    walls: set[Cell] = set()
    region_cells: dict[str, set[Cell]] = {label: set() for label in label_to_room}
    robot: Cell | None = None
    for y, row in enumerate(rows):
        for x, ch in enumerate(row):
            if ch == "#":
                walls.add((x, y))
            elif ch == ".":
                continue
            elif ch == "@":
                if robot is not None:
                    raise WorldSyntaxError("more than one robot start")
                robot = (x, y)
            elif ch in label_to_room:
                region_cells[ch].add((x, y))
            else:
                raise UnknownRoomLabel(f"grid label {ch!r} has no room declaration")
    if robot is None:
        raise MissingRobotStart("no '@' cell in grid")

    regions: dict[str, frozenset[Cell]] = {}
    anchors: dict[str, Cell] = {}
    for label, room_id in label_to_room.items():
        if label not in anchor_decls:
            raise WorldSyntaxError(f"room {label!r} has no anchor line")
        anchor = anchor_decls[label]
        if anchor not in region_cells[label]:
            raise WorldSyntaxError(f"anchor for {label!r} lies outside its region")
        regions[room_id] = frozenset(region_cells[label])
        anchors[room_id] = anchor
    for label in anchor_decls:
        if label not in label_to_room:
            raise UnknownRoomLabel(f"anchor label {label!r} has no room declaration")

    world = GridWorld(width, height, frozenset(walls), regions, anchors, robot)
    anchor_list = sorted(anchors.values())
    if anchor_list:
        reachable = _bfs_distances(world, anchor_list[0])
        for room_id, anchor in anchors.items():
            if anchor not in reachable:
                raise UnreachableAnchor(f"anchor of {room_id} is sealed off")
    return world


def _bfs_distances(world: GridWorld, start: Cell) -> dict[Cell, int]:
    dist = {start: 0}
    queue = deque([start])
    while queue:
        cell = queue.popleft()
        x, y = cell
        for dx, dy in MOVES:
            nxt = (x + dx, y + dy)
            if world.is_free(nxt) and nxt not in dist:
                dist[nxt] = dist[cell] + 1
                queue.append(nxt)
    return dist


def plan_path(world: GridWorld, goal: str) -> list[Cell]:
    """Shortest 4-connected path from the robot to the goal room's anchor.

    Among equal-length paths, the lexicographically smallest move sequence
    wins (Up < Down < Left < Right): walk greedily downhill on the
    distance-to-anchor field, trying moves in that fixed order.
    """
    if goal not in world.anchors:
        raise NoPath(f"room {goal!r} has no anchor")
    anchor = world.anchors[goal]
    dist = _bfs_distances(world, anchor)
    if world.robot not in dist:
        raise NoPath(f"no route from {world.robot} to {anchor}")
    path = [world.robot]
    cell = world.robot
    while cell != anchor:
        x, y = cell
        for dx, dy in MOVES:
            nxt = (x + dx, y + dy)
            if dist.get(nxt, -1) == dist[cell] - 1:
                cell = nxt
                break
        path.append(cell)
    return path


def execute(world: GridWorld, trajectory: list[Cell]) -> GridWorld:
    """Move the robot along a trajectory planned from its current cell."""
    if not trajectory or trajectory[0] != world.robot:
        raise InvalidTrajectory("trajectory does not start at the robot cell")
    for prev, nxt in zip(trajectory, trajectory[1:]):
        if abs(prev[0] - nxt[0]) + abs(prev[1] - nxt[1]) != 1:
            raise InvalidTrajectory(f"cells {prev} and {nxt} are not adjacent")
    for cell in trajectory:
        if not world.is_free(cell):
            raise InvalidTrajectory(f"cell {cell} is not free")
    world.robot = trajectory[-1]
    return world
