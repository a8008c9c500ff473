import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import grid_from_rows
from oracles import brute_force_costs, map_rows
from rtsearch.gene import Gene
from rtsearch.grid import SearchProblem, open_map, random_obstacle_map
from rtsearch.metrics import (UNREACHABLE, EmptyInput, ProblemMetrics, aggregate,
                              optimal_cost, scrubbing, suboptimality)
from rtsearch.search import RunResult, Status, solve


def run(status, travel=0.0, distinct=1, total=1):
    return RunResult(status, travel, distinct, total, total - 1, 1)


def test_optimal_cost_identity():
    assert optimal_cost(SearchProblem(open_map(3, 3), (1, 1), (1, 1))) == 0.0


def test_optimal_cost_corridor():
    assert optimal_cost(SearchProblem(grid_from_rows("...."), (0, 0), (3, 0))) == 3.0


def test_optimal_cost_unreachable():
    assert optimal_cost(SearchProblem(grid_from_rows(".@."), (0, 0), (2, 0))) == UNREACHABLE


def test_no_corner_cutting_in_oracle_cost():
    grid = grid_from_rows(".@", "..")
    # the diagonal (0,0)->(1,1) would cut the blocked corner
    assert optimal_cost(SearchProblem(grid, (0, 0), (1, 1))) == 2.0


def test_ten_by_ten_matches_brute_force():
    grid = random_obstacle_map(10, 10, 0.25, 17)
    rows = map_rows(grid)
    cells = grid.passable_cells()
    rng = random.Random(3)
    for source in rng.sample(cells, 10):
        truth = brute_force_costs(rows, source)
        for target in cells:
            cost = optimal_cost(SearchProblem(grid, source, target))
            assert cost == truth.get(target, UNREACHABLE)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.integers(1, 12), st.floats(0.0, 0.45), st.integers(0, 10**6))
def test_oracle_equivalence_property(w, h, density, seed):
    grid = random_obstacle_map(w, h, density, seed)
    cells = grid.passable_cells()
    if not cells:
        return
    rng = random.Random(seed)
    source = rng.choice(cells)
    truth = brute_force_costs(map_rows(grid), source)
    for target in rng.sample(cells, min(8, len(cells))):
        assert optimal_cost(SearchProblem(grid, source, target)) == truth.get(target, UNREACHABLE)


def test_suboptimality_values():
    assert suboptimality(run(Status.SOLVED, 7.5), 7.5, 1000) == 1.0
    assert suboptimality(run(Status.SOLVED, 15.0), 7.5, 1000) == 2.0
    assert suboptimality(run(Status.CUTOFF, 9000.0), 7.5, 1000) == 1000.0
    assert suboptimality(run(Status.STUCK), 7.5, 1000) == 1000.0
    assert suboptimality(run(Status.SOLVED), 0.0, 1000) == 1.0


def test_scrubbing_values():
    assert scrubbing(run(Status.SOLVED, distinct=5, total=5)) == 1.0
    # ten cells, one of them entered three times
    assert scrubbing(run(Status.SOLVED, distinct=10, total=12)) == pytest.approx(1.2)


def test_full_lookahead_on_open_map_does_not_scrub():
    grid = open_map(8, 8)
    problem = SearchProblem(grid, (0, 0), (7, 3))
    result = solve(problem, Gene(lookahead=64), hstar=optimal_cost(problem))
    assert scrubbing(result) == 1.0


def pm(alpha, tau=1.0, status="Solved", pid=0):
    return ProblemMetrics(pid, status, alpha, tau, alpha, 1.0, 1, 1)


def test_aggregate_single():
    s = aggregate([pm(1.5, 1.25)])
    assert s.n == 1
    assert s.mean_alpha == s.p50_alpha == s.p95_alpha == 1.5
    assert s.mean_tau == s.p50_tau == s.p95_tau == 1.25
    assert s.solve_rate == 1.0


def test_aggregate_mean():
    assert aggregate([pm(1.0), pm(3.0)]).mean_alpha == 2.0


def test_aggregate_solve_rate():
    assert aggregate([pm(1.0), pm(1000.0, status="CutOff")]).solve_rate == 0.5


def test_aggregate_empty():
    with pytest.raises(EmptyInput):
        aggregate([])


@given(st.lists(st.tuples(st.floats(1.0, 1000.0), st.floats(1.0, 5.0)), min_size=1, max_size=30),
       st.randoms())
def test_aggregate_is_permutation_invariant(values, rnd):
    metrics = [pm(a, t, pid=i) for i, (a, t) in enumerate(values)]
    shuffled = list(metrics)
    rnd.shuffle(shuffled)
    assert aggregate(metrics) == aggregate(shuffled)
