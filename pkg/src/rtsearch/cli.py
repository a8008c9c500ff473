"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 runtime failure.
"""
from __future__ import annotations

import argparse
import logging
import os
import shlex
import sys
from pathlib import Path

from . import harness
from .evolution import EvolutionConfig, GeneRanges, evolve
from .gene import GeneParseError, GeneRangeError, parse_gene
from .grid import (MapFormatError, ScenarioError, SearchProblem, load_map, parse_scenario,
                   random_problems, serialize_scenario)
from .metrics import UNREACHABLE, aggregate, optimal_cost, resolve_optimal

log = logging.getLogger("rtsearch")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _cell(text: str) -> tuple:
    try:
        x, y = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y, got {text!r}") from None
    return (x, y)


def _int_list(text: str) -> list:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _env_seed() -> int:
    raw = os.environ.get("RTS_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"RTS_SEED must be an integer, got {raw!r}") from None


def _add_problem_source(p: argparse.ArgumentParser, points: bool = True):
    p.add_argument("--map", required=True, help="map file")
    p.add_argument("--scenario", help="scenario file")
    if points:
        p.add_argument("--start", type=_cell, help="start cell x,y")
        p.add_argument("--goal", type=_cell, help="goal cell x,y")
    p.add_argument("--count", type=int, help="number of random problems")
    p.add_argument("--seed", type=int, help="seed (falls back to RTS_SEED, then 0)")


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--cutoff", type=float, default=1000.0, help="suboptimality cutoff")
    p.add_argument("--jobs", type=int, default=harness.default_jobs(), help="worker processes")
    p.add_argument("--out", help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rtsearch", description="Real-time heuristic search building-block experiments.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="run one gene on a problem set")
    _add_problem_source(p)
    p.add_argument("--gene", required=True)
    p.add_argument("--unchecked", action="store_true", help="skip gene range checks")
    _add_common(p)

    p = sub.add_parser("sweep", help="sweep one block over a problem set")
    _add_problem_source(p)
    p.add_argument("--gene", required=True, help="base gene")
    p.add_argument("--block", default="lookahead", choices=["lookahead"])
    p.add_argument("--values", type=_int_list, required=True)
    p.add_argument("--unchecked", action="store_true")
    _add_common(p)

    p = sub.add_parser("evolve", help="simulated evolution over the gene space")
    _add_problem_source(p, points=False)
    p.add_argument("--population", type=int, default=16)
    p.add_argument("--generations", type=int, default=10)
    p.add_argument("--elite", type=int, default=1)
    p.add_argument("--mutation-rate", type=float, default=0.2)
    _add_common(p)

    p = sub.add_parser("oracle", help="optimal costs for a problem set")
    _add_problem_source(p)
    p.add_argument("--out")

    p = sub.add_parser("gen-problems", help="write a seeded random suite as a scenario file")
    p.add_argument("--map", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    return parser


def _seed(args) -> int:
    return args.seed if args.seed is not None else _env_seed()


def _load_problems(args) -> list:
    grid = load_map(args.map)
    points = getattr(args, "start", None) is not None or getattr(args, "goal", None) is not None
    sources = sum([args.scenario is not None, points, args.count is not None])
    if sources != 1:
        raise UsageError("give exactly one problem source: --scenario, --start/--goal, or --count")
    if args.scenario:
        return parse_scenario(Path(args.scenario).read_text(encoding="utf-8"), grid)
    if points:
        if args.start is None or args.goal is None:
            raise UsageError("--start and --goal must be given together")
        for flag, c in (("--start", args.start), ("--goal", args.goal)):
            if not grid.passable(c):
                raise UsageError(f"{flag} {c} is not a passable cell of {args.map}")
        return [SearchProblem(grid, args.start, args.goal)]
    if args.count < 0:
        raise UsageError("--count must be non-negative")
    return random_problems(grid, args.count, _seed(args))


def _gene(args):
    try:
        return parse_gene(args.gene, checked=not args.unchecked)
    except (GeneParseError, GeneRangeError) as exc:
        raise UsageError(f"--gene: {exc}") from None


def _emit(text: str, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _meta(argv, args) -> dict:
    return {"invocation": "rtsearch " + shlex.join(argv), "seed": _seed(args)}


def _unreachable(problems) -> list:
    return [i for i, p in enumerate(problems) if p.optimal_cost == UNREACHABLE]


def cmd_solve(args, argv):
    gene = _gene(args)
    problems = resolve_optimal(_load_problems(args))
    bad = _unreachable(problems)
    if bad:
        raise UsageError(f"problems {bad} have no path from start to goal")
    rows = harness.run_suite(gene, problems, args.cutoff, args.jobs)
    _emit(harness.dumps(rows, "suite", _meta(argv, args)), args.out)
    if rows:
        s = aggregate(rows)
        log.info("mean alpha %.6g, mean tau %.6g, solved %.1f%%", s.mean_alpha, s.mean_tau, 100 * s.solve_rate)


def cmd_sweep(args, argv):
    gene = _gene(args)
    problems = resolve_optimal(_load_problems(args))
    if not problems:
        raise UsageError("sweep needs at least one problem")
    if _unreachable(problems):
        raise UsageError("suite contains unreachable problems")
    if not args.values:
        raise UsageError("--values is empty")
    try:
        spec = harness.SweepSpec(gene, args.values, problems, args.cutoff, args.block)
    except ValueError as exc:
        raise UsageError(f"--values: {exc}") from None
    rows = harness.sweep_lookahead(spec, args.jobs)
    _emit(harness.dumps(rows, "sweep", _meta(argv, args)), args.out)


def cmd_evolve(args, argv):
    problems = resolve_optimal(_load_problems(args))
    if not problems:
        raise UsageError("evolve needs at least one problem")
    if _unreachable(problems):
        raise UsageError("suite contains unreachable problems")
    try:
        config = EvolutionConfig(
            population_size=args.population, generations=args.generations,
            problems_per_agent=len(problems), cutoff=args.cutoff, seed=_seed(args),
            elite_count=args.elite, mutation_rate=args.mutation_rate)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = evolve(config, GeneRanges(), problems, jobs=args.jobs)
    _emit(result.to_jsonl(meta=_meta(argv, args)), args.out)
    log.info("best gene %s, fitness %.6g", result.best.gene.notation(), result.best.fitness)


def cmd_oracle(args, argv):
    problems = _load_problems(args)
    lines = [f"# {k}: {v}" for k, v in _meta(argv, args).items()]
    lines.append("problem_id,start_x,start_y,goal_x,goal_y,optimal_cost")
    for i, p in enumerate(problems):
        cost = optimal_cost(p)
        lines.append(f"{i},{p.start[0]},{p.start[1]},{p.goal[0]},{p.goal[1]},"
                     + ("unreachable" if cost == UNREACHABLE else repr(cost)))
    _emit("\n".join(lines) + "\n", args.out)


def cmd_gen_problems(args, argv):
    grid = load_map(args.map)
    if args.count < 0:
        raise UsageError("--count must be non-negative")
    problems = resolve_optimal(random_problems(grid, args.count, _seed(args)))
    meta = _meta(argv, args)
    _emit(serialize_scenario(problems, [f"{k}: {v}" for k, v in meta.items()]), args.out)


COMMANDS = {
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "evolve": cmd_evolve,
    "oracle": cmd_oracle,
    "gen-problems": cmd_gen_problems,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args, argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"rtsearch: error: {exc}", file=sys.stderr)
        return 1
    except (MapFormatError, ScenarioError, OSError, ValueError, RuntimeError) as exc:
        print(f"rtsearch: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
