"""Classical genetic algorithm: selection, crossover, mutation, repair, loop.

The generation loop is deterministic for a given seed.  Every randomized
unit of work draws from its own substream (see :mod:`gantrysched.rng`), so
results do not depend on the worker count used to evaluate or mutate
chromosomes.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from time import perf_counter
from typing import Callable, Sequence

import numpy as np

from .fitness import FitnessBreakdown, ScoreTable, evaluate_breakdown
from .model import (
    N_STATUSES,
    VACANT,
    Chromosome,
    ConfigError,
    GantryStatus,
    ProblemSpec,
    cycle_status_pattern,
    random_chromosome,
    status_duration,
)
from .rng import (
    PHASE_INIT,
    PHASE_MUTATE_A,
    PHASE_MUTATE_B,
    PHASE_MUTATE_PICK_A,
    PHASE_MUTATE_PICK_B,
    PHASE_PAIRING,
    PHASE_REPAIR_PICK,
    SEED_MAX,
    substream,
)

# Ratio-times-count arithmetic uses a tiny slack so that decimal ratios such
# as 0.29 * 100 floor to the intended integer despite binary rounding.
_FLOOR_EPS = 1e-9


def _floor_count(value: float) -> int:
    return math.floor(value + _FLOOR_EPS)


@dataclass(frozen=True)
class GaParams:
    """Run parameters shared by both algorithm variants."""

    r_s: float  # surviving ratio
    r_c: float  # crossover ratio
    r_m: float  # mutation ratio
    r_r: float  # repair ratio
    n_ini: int  # initial population size
    n_max: int  # population cap applied at selection
    g_max: int  # number of generations
    seed: int

    def __post_init__(self) -> None:
        for name in ("r_s", "r_c", "r_m", "r_r"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {value!r}")
        if self.n_ini < 2:
            raise ConfigError(f"n_ini must be at least 2, got {self.n_ini!r}")
        if self.n_max < 2:
            raise ConfigError(f"n_max must be at least 2, got {self.n_max!r}")
        if self.g_max < 0:
            raise ConfigError(f"g_max must be non-negative, got {self.g_max!r}")
        if not 0 <= self.seed < SEED_MAX:
            raise ConfigError(f"seed must be in [0, 2**64), got {self.seed!r}")


@dataclass(frozen=True)
class GenerationRecord:
    """Best fitness and population size at one evaluation point."""

    generation: int
    best_fitness: float
    population: int


@dataclass(frozen=True)
class RunResult:
    """Outcome of one run: per-generation records and the best schedule seen."""

    records: tuple[GenerationRecord, ...]
    best_schedule: Chromosome
    best_breakdown: FitnessBreakdown
    elapsed: float = field(compare=False)


def select(
    pairs: Sequence[tuple], r_s: float, n_max: int
) -> list[tuple]:
    """Keep the top slice of (chromosome, fitness) pairs by fitness.

    The slice size is min(n_max, max(2, floor(r_s * len(pairs)))), ties are
    broken toward the lower original index, and the survivors come back in
    descending fitness order.
    """
    n = len(pairs)
    if n == 0:
        raise ValueError("cannot select from an empty population")
    k = min(n_max, max(2, _floor_count(r_s * n)))
    k = min(k, n)
    order = sorted(range(n), key=lambda i: (-pairs[i][1], i))
    return [pairs[i] for i in order[:k]]


def single_point_crossover(
    a: Chromosome, b: Chromosome, point: int
) -> tuple[Chromosome, Chromosome]:
    """Swap cell tails at a cut point in the track-major flattening."""
    if a.statuses.shape != b.statuses.shape:
        raise ValueError("parents must have identical shape")
    n_cells = a.n_cells
    if not 1 <= point <= n_cells - 1:
        raise ValueError(f"crossover point must lie in [1, {n_cells - 1}], got {point}")
    shape = a.statuses.shape
    sa, sb = a.statuses.reshape(-1), b.statuses.reshape(-1)
    pa, pb = a.patients.reshape(-1), b.patients.reshape(-1)
    child1 = Chromosome(
        np.concatenate((sa[:point], sb[point:])).reshape(shape),
        np.concatenate((pa[:point], pb[point:])).reshape(shape),
    )
    child2 = Chromosome(
        np.concatenate((sb[:point], sa[point:])).reshape(shape),
        np.concatenate((pb[:point], pa[point:])).reshape(shape),
    )
    return child1, child2


def _paired_crossover(pop, r_c, rng, cross, n_cells):
    """Append children of floor(r_c * N / 2) disjoint random parent pairs."""
    n = len(pop)
    n_pairs = _floor_count(r_c * n / 2)
    out = list(pop)
    if n_pairs == 0 or n_cells < 2:
        return out
    chosen = rng.permutation(n)[: 2 * n_pairs]
    points = rng.integers(1, n_cells, size=n_pairs)
    for k in range(n_pairs):
        a = pop[int(chosen[2 * k])]
        b = pop[int(chosen[2 * k + 1])]
        out.extend(cross(a, b, int(points[k])))
    return out


def crossover_step(
    pop: Sequence[Chromosome], r_c: float, rng: np.random.Generator
) -> list[Chromosome]:
    """Pair off chromosomes at random and append their crossover children."""
    n_cells = pop[0].n_cells if pop else 0
    return _paired_crossover(pop, r_c, rng, single_point_crossover, n_cells)


def mutate_patient_ids(
    chrom: Chromosome, spec: ProblemSpec, rng: np.random.Generator
) -> Chromosome:
    """Rewrite the patient of one busy cell and of its whole same-status run."""
    flat = int(rng.integers(0, chrom.n_cells))
    g, t = divmod(flat, chrom.n_t)
    if chrom.statuses[g, t] == GantryStatus.IDLE:
        busy = np.flatnonzero(chrom.statuses.reshape(-1) != GantryStatus.IDLE)
        if busy.size == 0:
            return chrom
        flat = int(busy[int(rng.integers(0, busy.size))])
        g, t = divmod(flat, chrom.n_t)
    new_id = int(rng.integers(0, spec.n_p))
    row = chrom.statuses[g]
    status = row[t]
    left = t
    while left > 0 and row[left - 1] == status:
        left -= 1
    right = t
    while right + 1 < chrom.n_t and row[right + 1] == status:
        right += 1
    patients = chrom.patients.copy()
    patients[g, left : right + 1] = new_id
    return Chromosome(chrom.statuses, patients)


def mutate_statuses(
    chrom: Chromosome, spec: ProblemSpec, rng: np.random.Generator
) -> Chromosome:
    """Stamp a random status over its nominal duration from a random cell."""
    flat = int(rng.integers(0, chrom.n_cells))
    g, t = divmod(flat, chrom.n_t)
    status = int(rng.integers(0, N_STATUSES))
    span = min(status_duration(status), chrom.n_t - t)
    if status == GantryStatus.IDLE:
        patient = VACANT
    else:
        incumbent = int(chrom.patients[g, t])
        patient = incumbent if incumbent != VACANT else int(rng.integers(0, spec.n_p))
    statuses = chrom.statuses.copy()
    patients = chrom.patients.copy()
    statuses[g, t : t + span] = status
    patients[g, t : t + span] = patient
    return Chromosome(statuses, patients)


def repair_chromosome(
    chrom: Chromosome, spec: ProblemSpec, already_treated: Sequence[int] = ()
) -> Chromosome:
    """Rebuild every track as a conflict-free sequence of complete episodes.

    Walking each gantry left to right, the planner places one full working
    cycle per patient, separated by single idle slots when room allows so
    that the cycle transitions stay intact.  The patient of a new episode is
    the incumbent cell's id when that patient is still untreated, otherwise
    the lowest-index untreated patient; when nobody is left the track stays
    idle.  Gantries are rebuilt in index order, so earlier gantries win any
    contention for patients.  The result has no duration violations,
    conflicts, interruptions, or duplicate treatments.
    """
    treated = set(int(p) for p in already_treated)
    n_g, n_t = spec.n_g, spec.n_t
    cycle = cycle_status_pattern()
    span = cycle.size
    out_stat = np.zeros((n_g, n_t), dtype=np.int8)
    out_pat = np.full((n_g, n_t), VACANT, dtype=np.int32)
    for g in range(n_g):
        t = 0
        while t < n_t:
            if t > 0 and out_stat[g, t - 1] == GantryStatus.IDLE:
                start = t
            elif t + 1 + span <= n_t:
                start = t + 1  # leave an idle separator ahead of the episode
            else:
                start = t
            if start + span > n_t:
                break  # remaining slots stay idle
            patient = _pick_patient(chrom, g, start, treated, spec.n_p)
            if patient is None:
                break
            out_stat[g, start : start + span] = cycle
            out_pat[g, start : start + span] = patient
            treated.add(patient)
            t = start + span
    return Chromosome(out_stat, out_pat, n_p=spec.n_p)


def _pick_patient(chrom, g, start, treated, n_p):
    if chrom.statuses[g, start] != GantryStatus.IDLE:
        incumbent = int(chrom.patients[g, start])
        if incumbent not in treated:
            return incumbent
    for p in range(n_p):
        if p not in treated:
            return p
    return None


class _Pool:
    """Order-preserving map over an optional thread pool."""

    def __init__(self, threads: int):
        self._executor = (
            ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
        )

    def map(self, fn, items):
        if self._executor is None:
            return [fn(item) for item in items]
        return list(self._executor.map(fn, items))

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown()


def _evolve(
    params: GaParams,
    table: ScoreTable,
    threads: int,
    fresh: Callable[[int], object],
    evaluate: Callable[[object, int, int], tuple[float, Chromosome]],
    crossover_pop: Callable,
    mutators: Sequence[tuple[int, Callable[[object, int, int], object]]],
    repair: Callable[[object, int, int], object],
) -> RunResult:
    """Generation loop shared by the classical and quantum variants."""
    started = perf_counter()
    seed = params.seed
    pool = _Pool(threads)
    try:
        pop = pool.map(fresh, range(params.n_ini))
        records: list[GenerationRecord] = []
        best_total: float | None = None
        best_schedule: Chromosome | None = None
        for gen in range(params.g_max + 1):
            evals = pool.map(lambda i: evaluate(pop[i], gen, i), range(len(pop)))
            totals = [total for total, _ in evals]
            best_idx = int(np.argmax(totals))
            records.append(GenerationRecord(gen, totals[best_idx], len(pop)))
            if best_total is None or totals[best_idx] > best_total:
                best_total = totals[best_idx]
                best_schedule = evals[best_idx][1]
            if gen == params.g_max:
                break

            survivors = select(list(zip(pop, totals)), params.r_s, params.n_max)
            pop = [chrom for chrom, _ in survivors]
            pop = crossover_pop(pop, params.r_c, substream(seed, gen, PHASE_PAIRING, 0))

            for pick_phase, mutate in mutators:
                n_mut = _floor_count(params.r_m * len(pop))
                if n_mut:
                    picked = substream(seed, gen, pick_phase, 0).choice(
                        len(pop), size=n_mut, replace=False
                    )
                    picked = [int(i) for i in picked]
                    mutated = pool.map(lambda i, g=gen: mutate(pop[i], g, i), picked)
                    for i, chrom in zip(picked, mutated):
                        pop[i] = chrom

            n_rep = _floor_count(params.r_r * len(pop))
            if n_rep:
                picked = substream(seed, gen, PHASE_REPAIR_PICK, 0).choice(
                    len(pop), size=n_rep, replace=False
                )
                picked = [int(i) for i in picked]
                repaired = pool.map(lambda i, g=gen: repair(pop[i], g, i), picked)
                for i, chrom in zip(picked, repaired):
                    pop[i] = chrom
    finally:
        pool.close()
    breakdown = evaluate_breakdown(best_schedule, table)
    return RunResult(
        records=tuple(records),
        best_schedule=best_schedule,
        best_breakdown=breakdown,
        elapsed=perf_counter() - started,
    )


def run_classical(
    spec: ProblemSpec,
    params: GaParams,
    table: ScoreTable | None = None,
    *,
    threads: int = 1,
) -> RunResult:
    """Run the classical genetic algorithm; bit-reproducible per seed."""
    if table is None:
        table = ScoreTable()
    seed = params.seed

    def fresh(i: int) -> Chromosome:
        return random_chromosome(spec, substream(seed, 0, PHASE_INIT, i))

    def evaluate(chrom: Chromosome, gen: int, i: int) -> tuple[float, Chromosome]:
        return evaluate_breakdown(chrom, table).total, chrom

    mutators = (
        (
            PHASE_MUTATE_PICK_A,
            lambda c, gen, i: mutate_patient_ids(
                c, spec, substream(seed, gen, PHASE_MUTATE_A, i)
            ),
        ),
        (
            PHASE_MUTATE_PICK_B,
            lambda c, gen, i: mutate_statuses(
                c, spec, substream(seed, gen, PHASE_MUTATE_B, i)
            ),
        ),
    )

    def repair(chrom: Chromosome, gen: int, i: int) -> Chromosome:
        return repair_chromosome(chrom, spec)

    return _evolve(
        params, table, threads, fresh, evaluate, crossover_step, mutators, repair
    )
