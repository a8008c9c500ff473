"""Real-time heuristic search over the building-block gene space.

One run interleaves four steps until the agent stands on the goal: generate a
local search space (LSS) around the agent, pick the frontier state with the
least ``g + h``, back up heuristic values over the LSS with a Dijkstra-style
sweep, and walk the tree pointers to the chosen frontier state.

All functions here address cells by row-major index (see ``GridMap.index``).
"""
from __future__ import annotations

import enum
import heapq
import logging
import math
import sys
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from .gene import Gene, Lop, Method
from .grid import SQRT2, GridMap, SearchProblem, octile_h0

log = logging.getLogger(__name__)

INF = math.inf
H_MAX = sys.float_info.max


class Status(str, enum.Enum):
    SOLVED = "Solved"
    CUTOFF = "CutOff"
    STUCK = "Stuck"
    CYCLE_ABORTED = "CycleAborted"


class CycleDetected(RuntimeError):
    def __init__(self, cycle: list):
        super().__init__(f"tree pointers form a cycle: {cycle}")
        self.cycle = cycle


class RepairFailed(RuntimeError):
    pass


class InternalInconsistency(RuntimeError):
    pass


@dataclass
class AgentState:
    grid: GridMap
    goal: int
    current: int
    h0: list
    h: list
    g: dict = field(default_factory=dict)
    tree: dict = field(default_factory=dict)
    visit_count: dict = field(default_factory=dict)
    distance_traveled: float = 0.0
    t: int = 0
    steps: int = 0

    @classmethod
    def for_problem(cls, problem: SearchProblem) -> "AgentState":
        grid = problem.map
        goal_cell = problem.goal
        h0 = [octile_h0(grid.cell(i), goal_cell) for i in range(grid.width * grid.height)]
        start = grid.index(problem.start)
        return cls(grid=grid, goal=grid.index(goal_cell), current=start,
                   h0=h0, h=list(h0), visit_count={start: 1})


@dataclass
class LssResult:
    open: dict  # frontier cell -> g
    closed: set
    expansions: int


@dataclass
class RunResult:
    status: Status
    travel_cost: float
    distinct_visited: int
    total_visits: int
    steps: int
    episodes: int
    expansions: int = 0
    wall_time: float = 0.0

    @property
    def solved(self) -> bool:
        return self.status is Status.SOLVED


@dataclass
class EpisodeTrace:
    """Handed to ``solve``'s observer after each completed episode."""

    state: AgentState
    lss: LssResult
    target: int
    h_before: dict  # h over closed and open cells before the backup
    path: list


def select_next_expansion(candidates, g, h, method: Method) -> int:
    """Ties go to the larger g, then to the smaller cell index."""
    if method is Method.GREEDY:
        return min(candidates, key=lambda s: (h[s], -g[s], s))
    return min(candidates, key=lambda s: (h[s] + g[s], -g[s], s))


def da_filter(open_cells, h, h0, th: float) -> list:
    """Drop cells whose heuristic has risen by ``th`` or more over its initial value.

    Falls back to the unfiltered frontier when every cell would be dropped.
    """
    kept = [s for s in open_cells if h[s] - h0[s] < th]
    return kept if kept else list(open_cells)


def best_frontier(open_g: dict, h) -> int:
    return min(open_g, key=lambda s: (h[s] + open_g[s], -open_g[s], s))


def generate_lss(state: AgentState, gene: Gene, strict: bool = False) -> LssResult:
    """Expand up to ``gene.lookahead`` cells around the agent.

    Stops early once the goal's g no longer exceeds the least f on the
    frontier, or when the frontier empties.  With ``strict`` the episode
    asserts its structural invariants as it goes.
    """
    adj = state.grid.adjacency
    h, h0 = state.h, state.h0
    tree = state.tree
    goal = state.goal
    root = state.current
    g = {root: 0.0}
    open_cells = {root}
    closed = set()
    expansions = 0
    while open_cells:
        if gene.da:
            candidates = da_filter(open_cells, h, h0, gene.th)
        else:
            candidates = open_cells
        s = select_next_expansion(candidates, g, h, gene.method)
        if strict:
            lone = len(open_cells) == 1
            improvable = any(g.get(n, INF) > g[s] + c for n, c in adj[s])
        open_cells.discard(s)
        closed.add(s)
        expansions += 1
        gs = g[s]
        for n, c in adj[s]:
            ng = gs + c
            if ng < g.get(n, INF):
                g[n] = ng
                tree[n] = s
                # reopening keeps Open and Closed disjoint
                closed.discard(n)
                open_cells.add(n)
        if strict:
            assert not (open_cells & closed), "open and closed overlap"
            assert expansions <= gene.lookahead, "expansion budget exceeded"
            if lone and improvable:
                assert open_cells, "frontier emptied despite an improvable neighbor"
        if expansions >= gene.lookahead or not open_cells:
            break
        if not g.get(goal, INF) > min(g[x] + h[x] for x in open_cells):
            break
    state.g = g
    if strict:
        for s in closed:
            assert s == root or s in tree, f"closed cell {s} has no tree parent"
    return LssResult({s: g[s] for s in open_cells}, closed, expansions)


def update_heuristics(lss: LssResult, state: AgentState, gene: Gene) -> None:
    """Dijkstra-style backup of h over the closed cells of ``lss``.

    Seeds are the frontier cells (and the goal, if it was expanded), whose h
    stays fixed.  Cells are extracted smallest-h first for ``lop=min`` and
    largest-finite-h first for ``lop=max``.
    """
    h = state.h
    adj = state.grid.adjacency
    w = gene.w
    sign = 1.0 if gene.lop is Lop.MIN else -1.0
    closed = set(lss.closed)
    heap = [(sign * h[s], s) for s in lss.open]
    if state.goal in closed:
        closed.discard(state.goal)
        heap.append((0.0, state.goal))
    for s in closed:
        h[s] = INF
    heapq.heapify(heap)
    done = set()
    while closed:
        if not heap:
            raise InternalInconsistency(f"{len(closed)} closed cells unreachable from the frontier")
        key, s = heapq.heappop(heap)
        if s in done or key != sign * h[s]:
            continue
        done.add(s)
        closed.discard(s)
        hs = h[s]
        for n, c in adj[s]:
            if n not in closed:
                continue
            backup = w * (c + hs)
            if backup > H_MAX:
                # compounding weights can overflow; saturate so the sweep still reaches every cell
                backup = H_MAX
            # weighted comparison keeps learning monotone for w > 1
            if h[n] > backup:
                h[n] = backup
                heapq.heappush(heap, (sign * backup, n))


def _step_cost(grid: GridMap, a: int, b: int) -> float:
    w = grid.width
    return SQRT2 if (a % w != b % w and a // w != b // w) else 1.0


def move_to_best_frontier(state: AgentState, target: int) -> tuple:
    """Walk tree pointers from the agent to ``target``.

    Returns ``(entered_cells, cost)``.  The agent stops early if it passes
    through the goal.  Raises ``CycleDetected`` (no movement applied) when the
    pointer walk loops, and ``RepairFailed`` when no pointer chain can reach
    the agent.
    """
    grid = state.grid
    tree = state.tree
    cur = state.current
    nbrs = grid.adjacency[cur]
    if not any(tree.get(n) == cur for n, _ in nbrs):
        for n, _ in nbrs:
            if n in tree:
                tree[n] = cur
                break
        else:
            raise RepairFailed(f"no neighbor of cell {cur} is in the tree")

    backward = [target]
    seen = {target}
    s = target
    while s != cur:
        p = tree.get(s)
        if p is None:
            raise RepairFailed(f"tree walk from {target} broke at cell {s}")
        if p in seen:
            raise CycleDetected(backward[backward.index(p):] + [p])
        seen.add(p)
        backward.append(p)
        s = p

    entered = []
    cost = 0.0
    prev = cur
    for cell in reversed(backward[:-1]):
        c = _step_cost(grid, prev, cell)
        cost += c
        state.distance_traveled += c
        state.visit_count[cell] = state.visit_count.get(cell, 0) + 1
        state.steps += 1
        entered.append(cell)
        prev = cell
        if cell == state.goal:
            break
    state.current = prev
    return entered, cost


def solve(problem: SearchProblem, gene: Gene, cutoff: float = 1000.0,
          hstar: Optional[float] = None,
          on_episode: Optional[Callable[[EpisodeTrace], None]] = None,
          strict: bool = False) -> RunResult:
    """Run one agent from ``problem.start`` until it reaches the goal or gives up.

    The run is cut off once travel exceeds ``cutoff * hstar``; ``hstar``
    defaults to ``problem.optimal_cost``.
    """
    t0 = time.perf_counter()
    if problem.start == problem.goal:
        return RunResult(Status.SOLVED, 0.0, 1, 1, 0, 0, 0, time.perf_counter() - t0)
    if hstar is None:
        hstar = problem.optimal_cost
    if hstar is None or not hstar > 0:
        raise ValueError("solve needs a positive optimal cost for the cutoff bound")
    bound = cutoff * hstar

    state = AgentState.for_problem(problem)
    status = None
    expansions = 0
    while status is None:
        lss = generate_lss(state, gene, strict=strict)
        expansions += lss.expansions
        state.t += 1
        if lss.open:
            target = best_frontier(lss.open, state.h)
        elif state.goal in lss.closed:
            # the whole component was expanded, goal included
            target = state.goal
        else:
            status = Status.STUCK
            break
        h_before = None
        if on_episode is not None:
            h = state.h
            h_before = {s: h[s] for s in lss.closed}
            h_before.update((s, h[s]) for s in lss.open)
        update_heuristics(lss, state, gene)
        try:
            path, _ = move_to_best_frontier(state, target)
        except CycleDetected as exc:
            log.warning("episode %d of %s -> %s: %s; open=%s closed=%s",
                        state.t, problem.start, problem.goal, exc,
                        sorted(lss.open), sorted(lss.closed))
            status = Status.CYCLE_ABORTED
            break
        except RepairFailed as exc:
            log.warning("episode %d: %s", state.t, exc)
            status = Status.STUCK
            break
        if on_episode is not None:
            on_episode(EpisodeTrace(state, lss, target, h_before, path))
        if state.current == state.goal:
            status = Status.SOLVED
        elif state.distance_traveled > bound:
            status = Status.CUTOFF

    return RunResult(
        status=status,
        travel_cost=state.distance_traveled,
        distinct_visited=len(state.visit_count),
        total_visits=sum(state.visit_count.values()),
        steps=state.steps,
        episodes=state.t,
        expansions=expansions,
        wall_time=time.perf_counter() - t0,
    )
