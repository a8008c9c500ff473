"""Real-time heuristic search with building blocks, plus simulated evolution over them."""
from .gene import Gene, Lop, Method, format_gene, parse_gene
from .grid import GridMap, SearchProblem, load_map, octile_h0, parse_map, random_problems
from .metrics import aggregate, optimal_cost, scrubbing, suboptimality
from .search import RunResult, Status, solve

__all__ = [
    "Gene", "Lop", "Method", "format_gene", "parse_gene",
    "GridMap", "SearchProblem", "load_map", "octile_h0", "parse_map", "random_problems",
    "aggregate", "optimal_cost", "scrubbing", "suboptimality",
    "RunResult", "Status", "solve",
]
