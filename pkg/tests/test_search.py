
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import grid_from_rows
from rtsearch.gene import Gene, Lop, Method
from rtsearch.grid import SQRT2, SearchProblem, open_map, random_obstacle_map, random_problems
from rtsearch.metrics import optimal_cost
from rtsearch.search import (AgentState, CycleDetected, LssResult, RepairFailed, Status,
                             da_filter, generate_lss, move_to_best_frontier,
                             select_next_expansion, solve, update_heuristics)

ASTAR_FULL = Gene(w=1.0, lop=Lop.MIN, da=False, lookahead=10, method=Method.ASTAR)


def state_for(grid, start, goal):
    return AgentState.for_problem(SearchProblem(grid, start, goal))


def test_start_equals_goal():
    grid = open_map(3, 3)
    result = solve(SearchProblem(grid, (1, 1), (1, 1)), ASTAR_FULL)
    assert result.status is Status.SOLVED
    assert result.travel_cost == 0.0
    assert result.steps == 0


def test_corridor_is_solved_optimally():
    grid = grid_from_rows("....")
    problem = SearchProblem(grid, (0, 0), (3, 0))
    hstar = optimal_cost(problem)
    assert hstar == 3.0
    result = solve(problem, ASTAR_FULL, hstar=hstar)
    assert result.status is Status.SOLVED
    assert result.travel_cost == 3.0
    assert result.travel_cost / hstar == 1.0


def test_walled_pocket_gets_stuck(walled_pocket_map):
    problem = SearchProblem(walled_pocket_map, (1, 1), (6, 3))
    for _ in range(2):
        result = solve(problem, ASTAR_FULL, hstar=5.0)
        assert result.status is Status.STUCK
        assert result.steps == 0


def test_open_block_is_solved(open_block_map):
    for goal in [(0, 0), (2, 1), (2, 2), (1, 0)]:
        result = solve(SearchProblem(open_block_map, (1, 1), goal), ASTAR_FULL, hstar=1.0)
        assert result.status is Status.SOLVED


def test_lss_single_expansion():
    grid = open_map(5, 5)
    state = state_for(grid, (2, 2), (4, 4))
    lss = generate_lss(state, ASTAR_FULL.with_(lookahead=1))
    assert lss.closed == {grid.index((2, 2))}
    assert lss.expansions == 1
    expected = {grid.index((2 + dx, 2 + dy)): (SQRT2 if dx and dy else 1.0)
                for dx in (-1, 0, 1) for dy in (-1, 0, 1) if dx or dy}
    assert lss.open == expected


def test_lss_stops_when_goal_is_adjacent():
    grid = open_map(3, 3)
    state = state_for(grid, (1, 1), (2, 1))
    lss = generate_lss(state, ASTAR_FULL.with_(lookahead=80))
    # hand trace: after expanding the center, g(goal) = 1 = least f on the frontier
    assert lss.expansions == 1
    assert grid.index((2, 1)) in lss.open


def test_da_excludes_raised_neighbor():
    grid = open_map(5, 5)
    east = grid.index((3, 2))
    gene = ASTAR_FULL.with_(lookahead=2)

    plain = state_for(grid, (2, 2), (4, 2))
    plain.h[east] += 2e-6
    assert east in generate_lss(plain, gene).closed

    avoid = state_for(grid, (2, 2), (4, 2))
    avoid.h[east] += 2e-6
    lss = generate_lss(avoid, gene.with_(da=True))
    assert east not in lss.closed
    assert east in lss.open


def test_select_next_expansion():
    g = {"a": 1.0, "b": 3.0}
    h = {"a": 5.0, "b": 4.0}
    assert select_next_expansion(["a", "b"], g, h, Method.GREEDY) == "b"
    assert select_next_expansion(["a", "b"], g, h, Method.ASTAR) == "a"


def test_select_tie_prefers_larger_g_then_index():
    g = {0: 1.0, 1: 2.0, 2: 2.0}
    h = {0: 3.0, 1: 2.0, 2: 2.0}
    assert select_next_expansion([0, 1, 2], g, h, Method.ASTAR) == 1
    assert select_next_expansion([2, 0], g, h, Method.ASTAR) == 2


def test_da_filter():
    h0 = [1.0, 2.0, 3.0]
    assert sorted(da_filter([0, 1, 2], list(h0), h0, 1e-6)) == [0, 1, 2]
    raised = [1.0, 2.0 + 2e-6, 3.0]
    assert sorted(da_filter([0, 1, 2], raised, h0, 1e-6)) == [0, 2]
    all_raised = [v + 1 for v in h0]
    assert sorted(da_filter([0, 1, 2], all_raised, h0, 1e-6)) == [0, 1, 2]


def test_da_run_terminates_on_depression():
    # a cul-de-sac facing the goal makes a heuristic depression
    grid = grid_from_rows(
        "..........",
        "..@@@@@@..",
        "..@....@..",
        "..@....@..",
        "..@....@..",
        "......@@..",
        "..........",
    )
    problem = SearchProblem(grid, (4, 3), (4, 0))
    hstar = optimal_cost(problem)
    for method in Method:
        gene = Gene(w=1.0, lop=Lop.MIN, da=True, lookahead=2, method=method)
        result = solve(problem, gene, hstar=hstar, strict=True)
        assert result.status is Status.SOLVED


def _backup_fixture(w):
    grid = grid_from_rows("....")
    state = state_for(grid, (1, 0), (3, 0))
    state.h[0], state.h[2] = 4.0, 6.0
    lss = LssResult(open={0: 1.0, 2: 1.0}, closed={1}, expansions=1)
    update_heuristics(lss, state, Gene(w=w, lookahead=1))
    return state.h[1]


def test_update_single_backup():
    assert _backup_fixture(1.0) == 5.0


def test_update_weighted_backup():
    assert _backup_fixture(2.0) == 10.0


def test_update_keeps_goal_at_zero():
    grid = grid_from_rows("....")
    state = state_for(grid, (2, 0), (3, 0))
    lss = LssResult(open={1: 1.0}, closed={2, 3}, expansions=2)
    update_heuristics(lss, state, Gene(w=2.0, lookahead=2))
    assert state.h[3] == 0.0
    assert state.h[2] == 2.0


def _corridor_state():
    grid = grid_from_rows(".....")
    return grid, state_for(grid, (0, 0), (4, 0))


def test_move_one_edge():
    grid, state = _corridor_state()
    state.tree[1] = 0
    path, cost = move_to_best_frontier(state, 1)
    assert path == [1] and cost == 1.0
    assert state.current == 1


def test_move_three_edges():
    grid, state = _corridor_state()
    state.tree.update({1: 0, 2: 1, 3: 2})
    path, cost = move_to_best_frontier(state, 3)
    assert cost == 3.0
    assert path == [1, 2, 3]
    assert [state.visit_count.get(i, 0) for i in range(5)] == [1, 1, 1, 1, 0]
    assert state.distance_traveled == 3.0


def test_move_detects_cycle_without_moving():
    grid = open_map(4, 4)
    state = state_for(grid, (0, 0), (3, 3))
    x, y, z = grid.index((2, 2)), grid.index((2, 3)), grid.index((3, 2))
    state.tree.update({grid.index((1, 0)): 0, x: y, y: z, z: x})
    with pytest.raises(CycleDetected) as info:
        move_to_best_frontier(state, x)
    assert set(info.value.cycle) == {x, y, z}
    assert state.current == 0 and state.distance_traveled == 0.0
    assert state.visit_count == {0: 1}


def test_move_repairs_missing_current():
    grid, state = _corridor_state()
    state.current = 1
    # the pointer from cell 2 back to the agent was overwritten
    state.tree.update({2: 3, 3: 4})
    path, cost = move_to_best_frontier(state, 2)
    assert state.tree[2] == 1
    assert path == [2] and cost == 1.0
    assert state.current == 2


def test_move_repair_points_first_tree_neighbor_at_agent():
    grid, state = _corridor_state()
    state.current = 2
    state.tree.update({3: 4, 1: 0})
    # neither neighbor points at cell 2; the north-first scan hits east (3) first
    path, cost = move_to_best_frontier(state, 3)
    assert state.tree[3] == 2
    assert path == [3] and cost == 1.0


def test_move_repair_failure():
    grid, state = _corridor_state()
    with pytest.raises(RepairFailed):
        move_to_best_frontier(state, 1)


def test_run_counts_visits():
    grid = random_obstacle_map(15, 15, 0.25, 3)
    for p in random_problems(grid, 30, 1):
        hstar = optimal_cost(p)
        result = solve(p, Gene(w=1.5, da=True, lookahead=3), hstar=hstar)
        assert result.status is Status.SOLVED
        assert result.total_visits == result.steps + 1
        assert result.total_visits >= result.distinct_visited


def test_cutoff_status():
    grid = open_map(10, 1)
    problem = SearchProblem(grid, (0, 0), (9, 0))
    result = solve(problem, Gene(lookahead=1), cutoff=0.5, hstar=9.0)
    assert result.status is Status.CUTOFF
    assert result.travel_cost > 4.5


def test_open_exhausted_with_goal_expanded():
    # greedy lookahead expands the whole component, goal included
    grid = grid_from_rows("....@", "@@..@")
    problem = SearchProblem(grid, (0, 0), (3, 1))
    result = solve(problem, Gene(lop=Lop.MAX, method=Method.GREEDY, lookahead=50), hstar=optimal_cost(problem))
    assert result.status is Status.SOLVED


@st.composite
def grid_problems(draw, max_side=12):
    grid = random_obstacle_map(draw(st.integers(2, max_side)), draw(st.integers(2, max_side)),
                               draw(st.floats(0.0, 0.4)), draw(st.integers(0, 10**6)))
    try:
        problem = random_problems(grid, 1, draw(st.integers(0, 10**6)))[0]
    except ValueError:
        problem = None
    return problem


@settings(max_examples=80, deadline=None)
@given(grid_problems())
def test_full_lookahead_is_optimal(problem):
    if problem is None:
        return
    hstar = optimal_cost(problem)
    n = problem.map.num_passable
    result = solve(problem, Gene(lookahead=n), hstar=hstar)
    assert result.status is Status.SOLVED
    assert abs(result.travel_cost - hstar) <= 1e-9
    assert result.total_visits == result.distinct_visited


genes = st.builds(
    Gene,
    w=st.one_of(st.just(1.0), st.floats(1.0, 3.0)),
    lop=st.sampled_from(list(Lop)),
    da=st.booleans(),
    lookahead=st.integers(1, 80),
    method=st.sampled_from(list(Method)),
)


@settings(max_examples=150, deadline=None)
@given(grid_problems(20), genes)
def test_episode_invariants(problem, gene):
    if problem is None:
        return

    def check(trace):
        lss = trace.lss
        assert lss.expansions <= gene.lookahead
        assert not (set(lss.open) & lss.closed)
        state = trace.state
        assert state.h[state.goal] == 0.0
        if gene.lop is Lop.MIN:
            for s, before in trace.h_before.items():
                assert state.h[s] >= before - 1e-9

    result = solve(problem, gene, hstar=optimal_cost(problem), on_episode=check, strict=True)
    assert result.status in (Status.SOLVED, Status.CUTOFF)
