"""Batch experiments: suite evaluation, block sweeps and CSV persistence."""
from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .gene import Gene
from .grid import SearchProblem
from .metrics import ProblemMetrics, aggregate, problem_metrics, resolve_optimal
from .search import solve


class SchemaMismatch(ValueError):
    pass


class IoFailure(OSError):
    pass


SUITE_COLUMNS = ("problem_id", "status", "alpha", "tau", "travel_cost", "hstar", "steps", "episodes")
SWEEP_COLUMNS = ("lookahead", "mean_alpha", "mean_tau", "solve_rate", "n")


@dataclass(frozen=True)
class SweepRow:
    lookahead: int
    mean_alpha: float
    mean_tau: float
    solve_rate: float
    n: int


@dataclass(frozen=True)
class SweepSpec:
    base: Gene
    values: Sequence
    problems: Sequence[SearchProblem]
    cutoff: float = 1000.0
    block: str = "lookahead"

    def __post_init__(self):
        if not self.problems:
            raise ValueError("sweep needs a non-empty problem suite")
        if self.block != "lookahead":
            raise ValueError(f"only the lookahead block can be swept, got {self.block!r}")
        for v in self.values:
            if int(v) != v or v < 1:
                raise ValueError(f"invalid lookahead value {v!r}")


def _run_one(args) -> ProblemMetrics:
    idx, problem, gene, cutoff = args
    result = solve(problem, gene, cutoff=cutoff, hstar=problem.optimal_cost)
    return problem_metrics(idx, result, problem.optimal_cost, cutoff)


def default_jobs() -> int:
    return os.cpu_count() or 1


def run_suite(gene: Gene, problems: Sequence[SearchProblem], cutoff: float = 1000.0,
              jobs: int = 1) -> list:
    """One ``ProblemMetrics`` per problem, in input order, for any ``jobs``."""
    problems = resolve_optimal(problems)
    tasks = [(i, p, gene, cutoff) for i, p in enumerate(problems)]
    if jobs <= 1 or len(tasks) < 2:
        return [_run_one(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map preserves submission order
        return list(pool.map(_run_one, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


def sweep_lookahead(spec: SweepSpec, jobs: int = 1) -> list:
    problems = resolve_optimal(spec.problems)
    rows = []
    for value in spec.values:
        summary = aggregate(run_suite(spec.base.with_(lookahead=int(value)), problems, spec.cutoff, jobs))
        rows.append(SweepRow(int(value), summary.mean_alpha, summary.mean_tau,
                             summary.solve_rate, summary.n))
    return rows


# -- persistence -----------------------------------------------------------

_KINDS = {
    SUITE_COLUMNS: ProblemMetrics,
    SWEEP_COLUMNS: SweepRow,
}


def _format(value) -> str:
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def _columns_for(rows, kind: Optional[str]) -> tuple:
    if kind == "suite":
        return SUITE_COLUMNS
    if kind == "sweep":
        return SWEEP_COLUMNS
    if rows:
        if isinstance(rows[0], ProblemMetrics):
            return SUITE_COLUMNS
        if isinstance(rows[0], SweepRow):
            return SWEEP_COLUMNS
    raise ValueError("cannot infer the table kind; pass kind='suite' or kind='sweep'")


def dumps(rows: Iterable, kind: Optional[str] = None, meta: Optional[dict] = None) -> str:
    rows = list(rows)
    columns = _columns_for(rows, kind)
    buf = io.StringIO()
    for key, value in (meta or {}).items():
        buf.write(f"# {key}: {value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_format(getattr(row, c)) for c in columns])
    return buf.getvalue()


def persist(rows: Iterable, path, kind: Optional[str] = None, meta: Optional[dict] = None) -> None:
    """Write a suite or sweep table as CSV; ``meta`` lines are ``#`` comments."""
    text = dumps(rows, kind, meta)
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def loads(text: str) -> list:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    reader = csv.reader(lines)
    try:
        header = tuple(next(reader))
    except StopIteration:
        raise SchemaMismatch("file has no header row") from None
    cls = _KINDS.get(header)
    if cls is None:
        raise SchemaMismatch(f"unrecognised columns {header}")
    types = {f.name: f.type for f in fields(cls)}
    rows = []
    for line_no, values in enumerate(reader, start=2):
        if len(values) != len(header):
            raise SchemaMismatch(f"row {line_no}: expected {len(header)} fields, got {len(values)}")
        kwargs = {}
        for name, raw in zip(header, values):
            t = types[name]
            try:
                kwargs[name] = int(raw) if t in ("int", int) else float(raw) if t in ("float", float) else raw
            except ValueError:
                raise SchemaMismatch(f"row {line_no}: bad {name} value {raw!r}") from None
        rows.append(cls(**kwargs))
    return rows


def load(path) -> list:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    return loads(text)


def read_meta(path) -> dict:
    meta = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.startswith("#"):
            break
        key, _, value = line[1:].strip().partition(": ")
        meta[key] = value
    return meta
