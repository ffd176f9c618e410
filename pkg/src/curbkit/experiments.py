"""Batch runs over generated games, written as CSV.

Sizes follow the usual convention ``n = rows + cols``; random and covariant
instances are square ``n/2 x n/2`` games.  Constructed families ignore
``sizes`` and report their own ``n``.
"""
from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable

import numpy as np

from .curb import all_minimal_curb, one_minimal_curb, smallest_minimal_curb
from .game import Game
from .generators import GeneratorSpec

DISTRIBUTION_FIELDS = ("game_id", "family", "n", "smallest_curb_size", "lfp_calls", "wall_time")
RUNTIME_FIELDS = ("game_id", "family", "n", "algorithm", "wall_time", "lfp_calls")
ALGORITHMS = ("all_mc", "one_mc", "small_mc")
SAMPLED = ("random", "covariant")


class ExperimentError(RuntimeError):
    def __init__(self, game_id: int, cause: BaseException):
        super().__init__(f"instance {game_id}: {cause}")
        self.game_id = game_id


@dataclass(frozen=True)
class ExperimentSpec:
    generator: GeneratorSpec
    instance_count: int
    sizes: tuple[int, ...] = ()
    algorithms: tuple[str, ...] = ALGORITHMS
    rng_seed: int = 0
    output: str | None = None
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(self.sizes))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        if self.instance_count < 1:
            raise ValueError("instance_count must be at least 1")
        if self.generator.family in SAMPLED:
            if not self.sizes:
                raise ValueError("sampled families need at least one size")
            if any(n < 2 or n % 2 for n in self.sizes):
                raise ValueError("sizes must be even (square n/2 x n/2 games)")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown or not self.algorithms:
            raise ValueError(f"algorithms must be drawn from {ALGORITHMS}")


def _instances(spec: ExperimentSpec):
    sizes = spec.sizes if spec.generator.family in SAMPLED else (None,)
    for pos, n in enumerate(sizes):
        for i in range(spec.instance_count):
            game_id = pos * spec.instance_count + i
            key = [spec.rng_seed, n or 0, i]
            gen = spec.generator
            if n is not None:
                gen = replace(gen, rows=n // 2, cols=n // 2)
            yield game_id, gen, key


def _build(gen: GeneratorSpec, key) -> Game:
    return gen.build(np.random.default_rng(np.random.SeedSequence(key)))


def _run(name: str, game: Game, key):
    if name == "all_mc":
        reports = all_minimal_curb(game)
        return min(r.size for r in reports), reports[0].lfp_calls
    if name == "one_mc":
        report = one_minimal_curb(game, np.random.default_rng(np.random.SeedSequence(key + [1])))
    else:
        report = smallest_minimal_curb(game)
    return report.size, report.lfp_calls


def _distribution_task(args):
    game_id, gen, key = args
    try:
        game = _build(gen, key)
        start = time.perf_counter()
        size, calls = _run("small_mc", game, key)
        elapsed = time.perf_counter() - start
    except Exception as exc:
        raise ExperimentError(game_id, exc) from exc
    return {
        "game_id": game_id,
        "family": gen.family,
        "n": game.size,
        "smallest_curb_size": size,
        "lfp_calls": calls,
        "wall_time": f"{elapsed:.6f}",
    }


def _runtime_task(args):
    game_id, gen, key, algorithms = args
    try:
        game = _build(gen, key)
        rows = []
        for name in algorithms:
            start = time.perf_counter()
            _, calls = _run(name, game, key)
            elapsed = time.perf_counter() - start
            rows.append({
                "game_id": game_id,
                "family": gen.family,
                "n": game.size,
                "algorithm": name,
                "wall_time": f"{elapsed:.6f}",
                "lfp_calls": calls,
            })
    except Exception as exc:
        raise ExperimentError(game_id, exc) from exc
    return rows


def _map(func, tasks, workers: int):
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(func, tasks))
    return [func(t) for t in tasks]


def run_distribution_experiment(spec: ExperimentSpec) -> list[dict]:
    """Smallest minimal CURB size (and cost) for every generated instance."""
    rows = _map(_distribution_task, list(_instances(spec)), spec.workers)
    rows.sort(key=lambda r: r["game_id"])
    if spec.output:
        write_csv(rows, DISTRIBUTION_FIELDS, spec.output)
    return rows


def run_runtime_experiment(spec: ExperimentSpec) -> list[dict]:
    """Wall time and LFP calls of each requested algorithm on every instance."""
    tasks = [(gid, gen, key, spec.algorithms) for gid, gen, key in _instances(spec)]
    rows = [r for batch in _map(_runtime_task, tasks, spec.workers) for r in batch]
    rows.sort(key=lambda r: (r["game_id"], ALGORITHMS.index(r["algorithm"])))
    if spec.output:
        write_csv(rows, RUNTIME_FIELDS, spec.output)
    return rows


def format_csv(rows: Iterable[dict], fields: tuple[str, ...]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields)
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def write_csv(rows: Iterable[dict], fields: tuple[str, ...], path) -> None:
    Path(path).write_text(format_csv(rows, fields), newline="")


def histogram(rows: Iterable[dict], column: str = "smallest_curb_size") -> dict[int, int]:
    counts: dict[int, int] = {}
    for r in rows:
        v = int(r[column])
        counts[v] = counts.get(v, 0) + 1
    return dict(sorted(counts.items()))
