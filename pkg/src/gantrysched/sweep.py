"""Parameter sweeps: grid construction, batched runs, and summary statistics."""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .classical import GaParams, run_classical
from .fitness import ScoreTable
from .model import ConfigError, ProblemSpec
from .quantum import run_quantum
from .rng import derive_seed

SWEEP_PARAMS = ("r_s", "r_c", "r_m", "r_r")

ALGORITHMS = {"classical": run_classical, "quantum": run_quantum}

_VALUE_TOL = 1e-9


@dataclass(frozen=True)
class SweepAxis:
    """Inclusive arithmetic sequence of ratio values around a center."""

    center: float
    half_width: float
    step: float

    def __post_init__(self) -> None:
        if self.step <= 0:
            raise ConfigError(f"axis step must be positive, got {self.step!r}")
        if self.half_width < 0:
            raise ConfigError(f"axis half_width must be non-negative, got {self.half_width!r}")

    def values(self) -> list[float]:
        """Axis values rounded to two decimals, lowest first."""
        count = math.floor(2 * self.half_width / self.step + _VALUE_TOL) + 1
        values = [round(self.center - self.half_width + k * self.step, 2) for k in range(count)]
        for value in values:
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"axis value {value} falls outside [0, 1]")
        return values


@dataclass(frozen=True)
class SweepGrid:
    """Base parameters plus the axes to vary (any of r_s, r_c, r_m, r_r)."""

    base: GaParams
    axes: Mapping[str, SweepAxis]

    def __post_init__(self) -> None:
        unknown = set(self.axes) - set(SWEEP_PARAMS)
        if unknown:
            raise ConfigError(f"unknown sweep parameters: {sorted(unknown)}")
        if not self.axes:
            raise ConfigError("a sweep grid needs at least one axis")


@dataclass(frozen=True)
class SweepRecord:
    """One grid point's parameters and run outcome."""

    r_s: float
    r_c: float
    r_m: float
    r_r: float
    algorithm: str
    seed: int
    best_fitness: float
    run_seconds: float
    error: str | None = None


@dataclass(frozen=True)
class Stats:
    """Population statistics of one column of values."""

    count: int
    mean: float
    maximum: float
    minimum: float
    std: float


@dataclass(frozen=True)
class SweepSummary:
    """Fitness and time statistics overall and over the top-k points."""

    fitness: Stats
    run_time: Stats
    top_fitness: Stats
    top_run_time: Stats
    k: int


def build_grid(grid: SweepGrid) -> list[GaParams]:
    """Expand a grid into one GaParams per point (Cartesian product).

    Axes vary in the fixed order r_s, r_c, r_m, r_r with the last axis
    fastest, so point indices are stable for a given grid.
    """
    names = [name for name in SWEEP_PARAMS if name in grid.axes]
    value_lists = [grid.axes[name].values() for name in names]
    points = [grid.base]
    for name, values in zip(names, value_lists):
        points = [
            dataclasses.replace(point, **{name: value})
            for point in points
            for value in values
        ]
    if not points:
        raise ConfigError("sweep grid is empty")
    return points


def run_sweep(
    spec: ProblemSpec,
    points: Sequence[GaParams],
    table: ScoreTable | None,
    algorithm: str,
    master_seed: int,
    *,
    threads: int = 1,
    collect_errors: bool = False,
) -> list[SweepRecord]:
    """Run every grid point with a seed derived from the master seed.

    Points run independently (optionally in parallel); fitness results are
    reproducible for a given master seed while wall times are not.  With
    ``collect_errors`` a failing point becomes a record with its ``error``
    set instead of aborting the sweep.
    """
    if not points:
        raise ConfigError("no sweep points to run")
    if algorithm not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {algorithm!r}")
    runner = ALGORITHMS[algorithm]

    def run_point(item: tuple[int, GaParams]) -> SweepRecord:
        index, point = item
        seed = derive_seed(master_seed, index)
        point = dataclasses.replace(point, seed=seed)
        fields = dict(
            r_s=point.r_s, r_c=point.r_c, r_m=point.r_m, r_r=point.r_r,
            algorithm=algorithm, seed=seed,
        )
        try:
            result = runner(spec, point, table)
        except Exception as err:  # noqa: BLE001 - point outcome is reported
            if not collect_errors:
                raise ConfigError(f"sweep point {index} ({point}) failed: {err}") from err
            return SweepRecord(
                **fields, best_fitness=math.nan, run_seconds=math.nan, error=str(err)
            )
        return SweepRecord(
            **fields,
            best_fitness=result.best_breakdown.total,
            run_seconds=result.elapsed,
        )

    items = list(enumerate(points))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(run_point, items))
    return [run_point(item) for item in items]


def filter_records(
    records: Sequence[SweepRecord], exclude: Mapping[str, Sequence[float]]
) -> tuple[list[SweepRecord], int]:
    """Drop records whose parameters match any excluded value.

    Returns the surviving records and the number removed.
    """
    unknown = set(exclude) - set(SWEEP_PARAMS)
    if unknown:
        raise ConfigError(f"unknown exclusion parameters: {sorted(unknown)}")

    def excluded(record: SweepRecord) -> bool:
        for name, values in exclude.items():
            actual = getattr(record, name)
            if any(abs(actual - value) <= _VALUE_TOL for value in values):
                return True
        return False

    kept = [record for record in records if not excluded(record)]
    return kept, len(records) - len(kept)


def _stats(values: Sequence[float]) -> Stats:
    arr = np.asarray(values, dtype=np.float64)
    return Stats(
        count=int(arr.size),
        mean=float(arr.mean()),
        maximum=float(arr.max()),
        minimum=float(arr.min()),
        std=float(arr.std()),  # population standard deviation
    )


def summarize(records: Sequence[SweepRecord], k: int = 10) -> SweepSummary:
    """Fitness and run-time statistics overall and over the k best points.

    The result depends only on the multiset of records, not their order:
    ties at the top-k boundary are broken by comparing record contents.
    """
    if not records:
        raise ConfigError("cannot summarize an empty record set")
    if any(record.error is not None for record in records):
        raise ConfigError("cannot summarize failed runs; filter them out first")
    ranked = sorted(
        records,
        key=lambda r: (-r.best_fitness, r.run_seconds, r.r_s, r.r_c, r.r_m, r.r_r, r.seed),
    )
    top = ranked[: min(k, len(ranked))]
    return SweepSummary(
        fitness=_stats([r.best_fitness for r in records]),
        run_time=_stats([r.run_seconds for r in records]),
        top_fitness=_stats([r.best_fitness for r in top]),
        top_run_time=_stats([r.run_seconds for r in top]),
        k=k,
    )
