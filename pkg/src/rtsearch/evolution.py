"""Simulated evolution over the gene space.

Genes are handled as coded vectors (w, da, lop, lookahead, method) where the
discrete blocks use integer codes: da 1=off/2=on, lop 1=min/2=max,
method 1=A*/2=Greedy.  Fitness is the mean suboptimality over a fixed suite,
lower is better.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .gene import Gene, Lop, Method, format_gene
from .harness import run_suite
from .metrics import aggregate, resolve_optimal

BLOCKS = ("w", "da", "lop", "lookahead", "method")
_INTEGER_BLOCKS = ("da", "lop", "lookahead", "method")


@dataclass(frozen=True)
class GeneRanges:
    w: tuple = (1.0, 3.0)
    da: tuple = (1, 2)
    lop: tuple = (1, 2)
    lookahead: tuple = (2, 80)
    method: tuple = (1, 2)

    def __post_init__(self):
        for block in BLOCKS:
            lo, hi = getattr(self, block)
            if lo > hi:
                raise ValueError(f"{block} range has min {lo} > max {hi}")

    def contains(self, gene: Gene) -> bool:
        coded = encode(gene)
        return all(getattr(self, b)[0] <= coded[b] <= getattr(self, b)[1] for b in BLOCKS)


@dataclass(frozen=True)
class MutationScale:
    w: float = 0.25
    da: float = 1.0
    lop: float = 1.0
    lookahead: float = 10.0
    method: float = 1.0


@dataclass(frozen=True)
class EvolutionConfig:
    population_size: int = 16
    generations: int = 10
    problems_per_agent: int = 50
    cutoff: float = 1000.0
    seed: int = 0
    elite_count: int = 1
    mutation_rate: float = 0.2
    mutation_scale: MutationScale = field(default_factory=MutationScale)

    def __post_init__(self):
        if self.population_size < 1 or self.generations < 1:
            raise ValueError("population_size and generations must be positive")
        if not 0 <= self.elite_count < self.population_size:
            raise ValueError("elite_count must be below population_size")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("mutation_rate must be a probability")


def encode(gene: Gene) -> dict:
    return {
        "w": gene.w,
        "da": 2 if gene.da else 1,
        "lop": 1 if gene.lop is Lop.MIN else 2,
        "lookahead": gene.lookahead,
        "method": 1 if gene.method is Method.ASTAR else 2,
    }


def decode(coded: dict, template: Optional[Gene] = None) -> Gene:
    base = template or Gene()
    return base.with_(
        w=float(coded["w"]),
        da=coded["da"] == 2,
        lop=Lop.MIN if coded["lop"] == 1 else Lop.MAX,
        lookahead=int(coded["lookahead"]),
        method=Method.ASTAR if coded["method"] == 1 else Method.GREEDY,
    )


def _clamp(v, lo, hi):
    return lo if v < lo else hi if v > hi else v


def random_gene(ranges: GeneRanges, rng: random.Random) -> Gene:
    coded = {"w": rng.uniform(*ranges.w)}
    for block in _INTEGER_BLOCKS:
        lo, hi = getattr(ranges, block)
        coded[block] = int(_clamp(round(rng.uniform(lo, hi)), lo, hi))
    return decode(coded)


def crossover(a: Gene, b: Gene, rng: random.Random) -> Gene:
    ca, cb = encode(a), encode(b)
    child = {block: (ca if rng.random() < 0.5 else cb)[block] for block in BLOCKS}
    return decode(child, template=a)


def mutate(gene: Gene, ranges: GeneRanges, rate: float, scale: MutationScale,
           rng: random.Random) -> Gene:
    coded = encode(gene)
    for block in BLOCKS:
        if rng.random() >= rate:
            continue
        lo, hi = getattr(ranges, block)
        step = getattr(scale, block)
        value = coded[block] + rng.uniform(-step, step)
        if block in _INTEGER_BLOCKS:
            value = int(round(value))
        coded[block] = _clamp(value, lo, hi)
    return decode(coded, template=gene)


@dataclass(frozen=True)
class GeneRecord:
    generation: int
    rank: int
    gene: Gene
    fitness: float
    mean_tau: float
    solve_rate: float

    def to_json(self, seed: int) -> str:
        coded = encode(self.gene)
        return json.dumps({
            "generation": self.generation,
            "rank": self.rank,
            "gene": format_gene(self.gene),
            "w": self.gene.w,
            "lop": self.gene.lop.value,
            "da": self.gene.da,
            "lookahead": self.gene.lookahead,
            "method": self.gene.method.value,
            "codes": [coded[b] for b in BLOCKS[1:]],
            "fitness": self.fitness,
            "mean_tau": self.mean_tau,
            "solve_rate": self.solve_rate,
            "seed": seed,
        }, ensure_ascii=False)


@dataclass
class EvolutionLog:
    seed: int
    generations: list = field(default_factory=list)  # list of ranked GeneRecord lists
    best_so_far: list = field(default_factory=list)

    @property
    def best(self) -> GeneRecord:
        return min((r for gen in self.generations for r in gen), key=lambda r: (r.fitness, r.generation, r.rank))

    def records(self):
        for gen in self.generations:
            yield from gen

    def to_jsonl(self, meta: Optional[dict] = None) -> str:
        lines = []
        if meta is not None:
            lines.append(json.dumps({"meta": meta}, ensure_ascii=False, sort_keys=True))
        lines.extend(r.to_json(self.seed) for r in self.records())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "EvolutionLog":
        from .gene import parse_gene

        log = None
        by_gen = {}
        for line in text.splitlines():
            if not line.strip():
                continue
            obj = json.loads(line)
            if "meta" in obj:
                continue
            if log is None:
                log = cls(seed=obj["seed"])
            gene = parse_gene(obj["gene"], checked=False)
            rec = GeneRecord(obj["generation"], obj["rank"], gene, obj["fitness"],
                             obj["mean_tau"], obj["solve_rate"])
            by_gen.setdefault(rec.generation, []).append(rec)
        if log is None:
            raise ValueError("log holds no gene records")
        best = math.inf
        for gen in sorted(by_gen):
            log.generations.append(by_gen[gen])
            best = min(best, min(r.fitness for r in by_gen[gen]))
            log.best_so_far.append(best)
        return log


class FitnessCache:
    """Memoizes suite evaluations; runs are deterministic per gene."""

    def __init__(self, problems: Sequence, cutoff: float, jobs: int = 1):
        self.problems = resolve_optimal(problems)
        self.cutoff = cutoff
        self.jobs = jobs
        self._cache = {}

    def __call__(self, gene: Gene) -> tuple:
        if gene not in self._cache:
            summary = aggregate(run_suite(gene, self.problems, self.cutoff, self.jobs))
            self._cache[gene] = (summary.mean_alpha, summary.mean_tau, summary.solve_rate)
        return self._cache[gene]


def fitness(gene: Gene, problems: Sequence, cutoff: float = 1000.0, jobs: int = 1) -> float:
    """Mean suboptimality over ``problems``; unsolved runs count as ``cutoff``."""
    if not problems:
        raise ValueError("fitness needs at least one problem")
    return FitnessCache(problems, cutoff, jobs)(gene)[0]


def _select_parent(ranked: list, rng: random.Random) -> Gene:
    weights = [1.0 / r.fitness for r in ranked]
    return rng.choices(ranked, weights=weights, k=1)[0].gene


def evolve(config: EvolutionConfig, ranges: GeneRanges, problems: Sequence,
           jobs: int = 1) -> EvolutionLog:
    if len(problems) < config.problems_per_agent:
        raise ValueError(f"need {config.problems_per_agent} problems, got {len(problems)}")
    evaluate = FitnessCache(list(problems)[:config.problems_per_agent], config.cutoff, jobs)
    rng = random.Random(config.seed)
    log = EvolutionLog(seed=config.seed)

    population = [random_gene(ranges, rng) for _ in range(config.population_size)]
    ranked = []
    best = math.inf
    for generation in range(config.generations):
        if generation > 0:
            offspring = []
            for _ in range(config.population_size - config.elite_count):
                a = _select_parent(ranked, rng)
                b = _select_parent(ranked, rng)
                child = crossover(a, b, rng)
                offspring.append(mutate(child, ranges, config.mutation_rate,
                                        config.mutation_scale, rng))
            population = [r.gene for r in ranked[:config.elite_count]] + offspring
        scored = [(evaluate(g), i, g) for i, g in enumerate(population)]
        scored.sort(key=lambda item: (item[0][0], item[1]))
        ranked = [GeneRecord(generation, rank, g, fit, tau, rate)
                  for rank, ((fit, tau, rate), _, g) in enumerate(scored)]
        log.generations.append(ranked)
        best = min(best, ranked[0].fitness)
        log.best_so_far.append(best)
    return log
