"""Ground-truth path costs and per-run performance metrics."""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .grid import SQRT2, SearchProblem
from .search import RunResult, Status

UNREACHABLE = math.inf


class EmptyInput(ValueError):
    pass


def optimal_cost(problem: SearchProblem) -> float:
    """Exact shortest-path cost, or ``UNREACHABLE``.

    Costs are carried as (cardinal, diagonal) step counts so that equal-cost
    paths always produce the same float, ``cardinal + diagonal * sqrt(2)``.
    """
    grid = problem.map
    start, goal = grid.index(problem.start), grid.index(problem.goal)
    if start == goal:
        return 0.0
    width = grid.width
    gx, gy = problem.goal
    adj = grid.adjacency

    def h(i):
        dx, dy = abs(i % width - gx), abs(i // width - gy)
        return (dx - dy) + dy * SQRT2 if dx > dy else (dy - dx) + dx * SQRT2

    counts = {start: (0, 0)}
    g = {start: 0.0}
    heap = [(h(start), 0.0, start)]
    while heap:
        _, gs, s = heapq.heappop(heap)
        if gs > g[s]:
            continue
        if s == goal:
            card, diag = counts[s]
            return card + diag * SQRT2
        card, diag = counts[s]
        for n, c in adj[s]:
            nc, nd = (card + 1, diag) if c == 1.0 else (card, diag + 1)
            ng = nc + nd * SQRT2
            if ng < g.get(n, UNREACHABLE):
                counts[n] = (nc, nd)
                g[n] = ng
                heapq.heappush(heap, (ng + h(n), ng, n))
    return UNREACHABLE


def resolve_optimal(problems: Iterable[SearchProblem]) -> list:
    """Fill in missing optimal costs with the offline solver."""
    return [p if p.optimal_cost is not None else p.with_optimal_cost(optimal_cost(p))
            for p in problems]


@dataclass(frozen=True)
class ProblemMetrics:
    problem_id: int
    status: str
    alpha: float
    tau: float
    travel_cost: float
    hstar: float
    steps: int
    episodes: int

    @property
    def solved(self) -> bool:
        return self.status == Status.SOLVED.value


def suboptimality(result: RunResult, hstar: float, cutoff: float) -> float:
    if result.status is not Status.SOLVED:
        return float(cutoff)
    if hstar == 0:
        return 1.0
    return result.travel_cost / hstar


def scrubbing(result: RunResult) -> float:
    """Mean number of visits per distinct cell the agent occupied."""
    return result.total_visits / result.distinct_visited


def problem_metrics(problem_id: int, result: RunResult, hstar: float, cutoff: float) -> ProblemMetrics:
    return ProblemMetrics(
        problem_id=problem_id,
        status=result.status.value,
        alpha=suboptimality(result, hstar, cutoff),
        tau=scrubbing(result),
        travel_cost=result.travel_cost,
        hstar=hstar,
        steps=result.steps,
        episodes=result.episodes,
    )


@dataclass(frozen=True)
class Summary:
    n: int
    mean_alpha: float
    mean_tau: float
    solve_rate: float
    p50_alpha: float
    p95_alpha: float
    p50_tau: float
    p95_tau: float


def _mean(values) -> float:
    # fsum is exactly rounded, hence independent of input order
    return math.fsum(values) / len(values)


def aggregate(metrics: list) -> Summary:
    if not metrics:
        raise EmptyInput("cannot aggregate an empty metrics list")
    alphas = sorted(m.alpha for m in metrics)
    taus = sorted(m.tau for m in metrics)
    p50a, p95a = np.percentile(alphas, [50, 95])
    p50t, p95t = np.percentile(taus, [50, 95])
    return Summary(
        n=len(metrics),
        mean_alpha=_mean(alphas),
        mean_tau=_mean(taus),
        solve_rate=sum(m.solved for m in metrics) / len(metrics),
        p50_alpha=float(p50a),
        p95_alpha=float(p95a),
        p50_tau=float(p50t),
        p95_tau=float(p95t),
    )
