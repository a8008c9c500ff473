"""Grid maps, search problems and the 8-connected grid graph.

Cells are addressed as ``(x, y)`` tuples at the API boundary, with ``y`` the
row index counted from the top.  Internally the search code works on the
row-major cell index ``y * width + x``.
"""
from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

SQRT2 = math.sqrt(2.0)

PASSABLE_CHARS = frozenset(".G")

# clockwise from north; y grows downward
_DIRECTIONS = (
    (0, -1), (1, -1), (1, 0), (1, 1),
    (0, 1), (-1, 1), (-1, 0), (-1, -1),
)

Cell = tuple  # (x, y)


class MapFormatError(ValueError):
    pass


class MalformedHeader(MapFormatError):
    pass


class DimensionMismatch(MapFormatError):
    pass


class ScenarioError(ValueError):
    pass


class MalformedEntry(ScenarioError):
    pass


class OutOfBounds(ScenarioError):
    pass


class BlockedEndpoint(ScenarioError):
    pass


class InsufficientCells(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GridMap:
    """Immutable occupancy grid.

    ``cells`` holds one passability flag per cell in row-major order.
    """

    width: int
    height: int
    cells: tuple
    id: str = "map"
    # adjacency[i] = ((j, cost), ...), clockwise from north
    adjacency: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise DimensionMismatch(f"map dimensions must be positive, got {self.width}x{self.height}")
        cells = tuple(bool(c) for c in self.cells)
        if len(cells) != self.width * self.height:
            raise DimensionMismatch(
                f"expected {self.width * self.height} cells, got {len(cells)}")
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "adjacency", self._build_adjacency())

    def _build_adjacency(self) -> tuple:
        w, h, cells = self.width, self.height, self.cells
        adj = []
        for idx in range(w * h):
            if not cells[idx]:
                adj.append(())
                continue
            x, y = idx % w, idx // w
            out = []
            for dx, dy in _DIRECTIONS:
                nx, ny = x + dx, y + dy
                if not (0 <= nx < w and 0 <= ny < h) or not cells[ny * w + nx]:
                    continue
                if dx and dy:
                    # no corner cutting
                    if not (cells[y * w + nx] and cells[ny * w + x]):
                        continue
                    out.append((ny * w + nx, SQRT2))
                else:
                    out.append((ny * w + nx, 1.0))
            adj.append(tuple(out))
        return tuple(adj)

    def __eq__(self, other):
        if not isinstance(other, GridMap):
            return NotImplemented
        return (self.width, self.height, self.cells, self.id) == (
            other.width, other.height, other.cells, other.id)

    def __hash__(self):
        return hash((self.width, self.height, self.cells, self.id))

    def index(self, cell: Cell) -> int:
        x, y = cell
        return y * self.width + x

    def cell(self, index: int) -> Cell:
        return (index % self.width, index // self.width)

    def in_bounds(self, cell: Cell) -> bool:
        x, y = cell
        return 0 <= x < self.width and 0 <= y < self.height

    def passable(self, cell: Cell) -> bool:
        return self.in_bounds(cell) and self.cells[self.index(cell)]

    def passable_cells(self) -> list:
        return [self.cell(i) for i, ok in enumerate(self.cells) if ok]

    @property
    def num_passable(self) -> int:
        return sum(self.cells)


@dataclass(frozen=True)
class SearchProblem:
    map: GridMap
    start: Cell
    goal: Cell
    optimal_cost: Optional[float] = None

    def with_optimal_cost(self, cost: float) -> "SearchProblem":
        return SearchProblem(self.map, self.start, self.goal, cost)


def neighbors(grid: GridMap, s: Cell) -> list:
    """Passable neighbors of ``s`` with their edge costs, clockwise from north."""
    return [(grid.cell(j), c) for j, c in grid.adjacency[grid.index(s)]]


def octile_h0(a: Cell, b: Cell) -> float:
    dx = abs(a[0] - b[0])
    dy = abs(a[1] - b[1])
    return SQRT2 * min(dx, dy) + abs(dx - dy)


# -- map files -------------------------------------------------------------

def _split_lines(text: str) -> list:
    lines = text.split("\n")
    return [ln[:-1] if ln.endswith("\r") else ln for ln in lines]


def parse_map(text: str, map_id: str = "map") -> GridMap:
    """Parse a map in the ``type octile`` grid format."""
    lines = _split_lines(text)
    if len(lines) < 4:
        raise MalformedHeader("map file has fewer than 4 header lines")

    def header_value(line_no: int, key: str) -> int:
        parts = lines[line_no].split()
        if len(parts) != 2 or parts[0] != key:
            raise MalformedHeader(f"line {line_no + 1}: expected '{key} <int>', got {lines[line_no]!r}")
        try:
            value = int(parts[1])
        except ValueError:
            raise MalformedHeader(f"line {line_no + 1}: {key} is not an integer") from None
        if value < 1:
            raise MalformedHeader(f"line {line_no + 1}: {key} must be positive")
        return value

    if lines[0].split() != ["type", "octile"]:
        raise MalformedHeader(f"line 1: expected 'type octile', got {lines[0]!r}")
    height = header_value(1, "height")
    width = header_value(2, "width")
    if lines[3].strip() != "map":
        raise MalformedHeader(f"line 4: expected 'map', got {lines[3]!r}")

    body = lines[4:]
    while body and body[-1] == "":
        body.pop()
    if len(body) != height:
        raise DimensionMismatch(f"declared height {height}, found {len(body)} rows")
    cells = []
    for r, row in enumerate(body):
        if row != row.rstrip():
            raise DimensionMismatch(f"row {r}: trailing whitespace")
        if len(row) != width:
            raise DimensionMismatch(f"row {r}: declared width {width}, found {len(row)}")
        cells.extend(ch in PASSABLE_CHARS for ch in row)
    return GridMap(width, height, tuple(cells), map_id)


def serialize_map(grid: GridMap) -> str:
    rows = []
    for y in range(grid.height):
        row = grid.cells[y * grid.width:(y + 1) * grid.width]
        rows.append("".join("." if ok else "@" for ok in row))
    header = f"type octile\nheight {grid.height}\nwidth {grid.width}\nmap\n"
    return header + "\n".join(rows) + "\n"


def load_map(path) -> GridMap:
    from pathlib import Path

    path = Path(path)
    return parse_map(path.read_text(encoding="utf-8"), map_id=path.name)


# -- scenario files --------------------------------------------------------

# stated optimal lengths are usually printed with 8 decimals
_SCN_SLACK = 1e-6


def parse_scenario(text: str, grid: GridMap) -> list:
    """Parse a ``version 1`` scenario file into problems on ``grid``.

    Columns: bucket, map, map width, map height, start x, start y,
    goal x, goal y, optimal length.  Lines starting with ``#`` are comments.
    """
    lines = _split_lines(text)
    if not lines or not lines[0].startswith("version"):
        raise MalformedEntry("line 1: expected 'version <n>'")
    problems = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 9:
            raise MalformedEntry(f"line {line_no}: expected 9 columns, got {len(parts)}")
        try:
            sx, sy, gx, gy = (int(v) for v in parts[4:8])
            opt = float(parts[8])
        except ValueError:
            raise MalformedEntry(f"line {line_no}: non-numeric coordinate or length") from None
        start, goal = (sx, sy), (gx, gy)
        for name, c in (("start", start), ("goal", goal)):
            if not grid.in_bounds(c):
                raise OutOfBounds(f"line {line_no}: {name} {c} outside {grid.width}x{grid.height}")
            if not grid.passable(c):
                raise BlockedEndpoint(f"line {line_no}: {name} {c} is blocked")
        if not math.isfinite(opt) or opt < octile_h0(start, goal) - _SCN_SLACK:
            raise MalformedEntry(
                f"line {line_no}: optimal length {opt} below octile distance {octile_h0(start, goal)}")
        problems.append(SearchProblem(grid, start, goal, opt))
    return problems


def serialize_scenario(problems: Iterable[SearchProblem], comments: Iterable[str] = ()) -> str:
    out = ["version 1"]
    out.extend(f"# {c}" for c in comments)
    for p in problems:
        if p.optimal_cost is None:
            raise ValueError("scenario entries need a resolved optimal cost")
        bucket = int(p.optimal_cost // 4)
        out.append("\t".join([
            str(bucket), p.map.id, str(p.map.width), str(p.map.height),
            str(p.start[0]), str(p.start[1]), str(p.goal[0]), str(p.goal[1]),
            repr(float(p.optimal_cost)),
        ]))
    return "\n".join(out) + "\n"


# -- generation ------------------------------------------------------------

def components(grid: GridMap) -> list:
    """Connected-component label per cell index (-1 for blocked cells)."""
    label = [-1] * (grid.width * grid.height)
    current = 0
    for i, ok in enumerate(grid.cells):
        if not ok or label[i] >= 0:
            continue
        label[i] = current
        queue = deque([i])
        while queue:
            u = queue.popleft()
            for v, _ in grid.adjacency[u]:
                if label[v] < 0:
                    label[v] = current
                    queue.append(v)
        current += 1
    return label


def random_problems(grid: GridMap, n: int, seed: int) -> list:
    """``n`` seeded problems with distinct, mutually reachable endpoints."""
    passable = [i for i, ok in enumerate(grid.cells) if ok]
    if len(passable) < 2:
        raise InsufficientCells(f"map {grid.id!r} has {len(passable)} passable cells")
    label = components(grid)
    sizes = {}
    for i in passable:
        sizes[label[i]] = sizes.get(label[i], 0) + 1
    if max(sizes.values()) < 2:
        raise InsufficientCells(f"map {grid.id!r} has no two connected passable cells")

    rng = random.Random(seed)
    problems = []
    while len(problems) < n:
        s = rng.choice(passable)
        g = rng.choice(passable)
        if s == g or label[s] != label[g]:
            continue
        problems.append(SearchProblem(grid, grid.cell(s), grid.cell(g)))
    return problems


def random_obstacle_map(width: int, height: int, density: float, seed: int,
                        map_id: Optional[str] = None) -> GridMap:
    """Map with each cell independently blocked with probability ``density``."""
    rng = random.Random(seed)
    cells = tuple(rng.random() >= density for _ in range(width * height))
    return GridMap(width, height, cells, map_id or f"random{width}x{height}_{seed}")


def open_map(width: int, height: int, map_id: str = "open") -> GridMap:
    return GridMap(width, height, (True,) * (width * height), map_id)
