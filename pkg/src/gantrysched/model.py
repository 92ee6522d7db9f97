"""Scheduling domain model: gantry statuses, daily schedules, runs, episodes.

A daily schedule covers ``n_g`` treatment gantries over ``n_t`` one-minute
time slots.  Each slot records the gantry status and, unless the gantry is
idle, the patient occupying it.  A treatment follows a fixed status cycle;
its working portion (ready through disposal) spans 26 consecutive minutes,
so a schedule can only contain a finished treatment when ``n_t >= 26``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Iterator, Sequence

import numpy as np

VACANT = -1  # patient field value while a gantry is idle


class ConfigError(ValueError):
    """Invalid problem, parameter, or configuration input."""


class GantryStatus(IntEnum):
    """Operational state of a gantry, numbered along the treatment cycle."""

    IDLE = 0
    READY = 1
    WAIT_PATIENT = 2
    ADJUST_TARGET = 3
    WAIT_CONTROL = 4
    WAIT_ACCELERATOR = 5
    IRRADIATE = 6
    DISPOSE = 7


N_STATUSES = 8

# Minutes each status lasts, indexed by status value.
STATUS_DURATIONS = np.array([1, 1, 3, 15, 1, 1, 1, 4], dtype=np.int64)

# Slots from READY through the final DISPOSE minute of one treatment.
WORK_CYCLE_SLOTS = int(STATUS_DURATIONS[1:].sum())


def status_duration(status: GantryStatus | int) -> int:
    """Return the nominal duration of a status in slots."""
    return int(STATUS_DURATIONS[int(status)])


def expected_next(status: GantryStatus | int) -> GantryStatus:
    """Return the status that follows in the closed treatment cycle."""
    return GantryStatus((int(status) + 1) % N_STATUSES)


def cycle_status_pattern() -> np.ndarray:
    """The 26-slot status sequence of one complete working cycle."""
    return np.repeat(np.arange(1, N_STATUSES, dtype=np.int8), STATUS_DURATIONS[1:])


@dataclass(frozen=True)
class ProblemSpec:
    """Size of a scheduling problem: gantries, patients, and time slots."""

    n_g: int
    n_p: int
    n_t: int

    def __post_init__(self) -> None:
        for name in ("n_g", "n_p", "n_t"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")

    @property
    def n_cells(self) -> int:
        return self.n_g * self.n_t

    @property
    def fits_complete_episode(self) -> bool:
        return self.n_t >= WORK_CYCLE_SLOTS


@dataclass(frozen=True)
class SlotCell:
    """One slot of one gantry: a status plus the patient present, if any."""

    status: GantryStatus
    patient: int | None = None

    def __post_init__(self) -> None:
        if self.status == GantryStatus.IDLE:
            if self.patient is not None:
                raise ValueError("idle cells must be vacant")
        elif self.patient is None or self.patient < 0:
            raise ValueError("non-idle cells must hold a patient id")


@dataclass(frozen=True)
class Run:
    """Maximal block of consecutive slots sharing one status and patient."""

    status: GantryStatus
    patient: int | None
    start: int
    length: int


@dataclass(frozen=True)
class Episode:
    """Maximal same-patient working segment on one gantry.

    ``complete`` is true exactly when the segment consists of the seven
    working statuses in cycle order, each at its nominal duration, which
    makes the segment span 26 slots.
    """

    patient: int
    gantry: int
    start: int
    end: int  # inclusive
    complete: bool


class Track:
    """Read-only view of one gantry's slot sequence."""

    __slots__ = ("statuses", "patients")

    def __init__(self, statuses: np.ndarray, patients: np.ndarray):
        self.statuses = statuses
        self.patients = patients

    @classmethod
    def from_cells(cls, cells: Iterable[SlotCell]) -> "Track":
        cells = list(cells)
        statuses = np.array([int(c.status) for c in cells], dtype=np.int8)
        patients = np.array(
            [VACANT if c.patient is None else c.patient for c in cells], dtype=np.int32
        )
        statuses.setflags(write=False)
        patients.setflags(write=False)
        return cls(statuses, patients)

    def __len__(self) -> int:
        return int(self.statuses.size)

    def __getitem__(self, t: int) -> SlotCell:
        status = GantryStatus(int(self.statuses[t]))
        patient = int(self.patients[t])
        return SlotCell(status, None if patient == VACANT else patient)

    def __iter__(self) -> Iterator[SlotCell]:
        for t in range(len(self)):
            yield self[t]


class Chromosome:
    """A full daily schedule held as per-gantry status and patient arrays.

    Instances are immutable value objects: the backing arrays are read-only
    and all operations produce new chromosomes.  ``patients`` is ``VACANT``
    wherever the status is idle and a valid patient id everywhere else.
    """

    __slots__ = ("statuses", "patients")

    def __init__(self, statuses, patients, *, n_p: int | None = None):
        statuses = np.array(statuses, dtype=np.int8)
        patients = np.array(patients, dtype=np.int32)
        if statuses.ndim != 2 or statuses.shape != patients.shape:
            raise ValueError("statuses and patients must be equal-shape 2-d arrays")
        if statuses.size == 0:
            raise ValueError("a chromosome needs at least one gantry and one slot")
        if statuses.min() < 0 or statuses.max() >= N_STATUSES:
            raise ValueError("status values must lie in [0, 8)")
        idle = statuses == GantryStatus.IDLE
        if not np.all(patients[idle] == VACANT):
            raise ValueError("idle cells must be vacant")
        busy_patients = patients[~idle]
        if busy_patients.size and busy_patients.min() < 0:
            raise ValueError("non-idle cells must hold a patient id")
        if n_p is not None and busy_patients.size and busy_patients.max() >= n_p:
            raise ValueError(f"patient ids must lie in [0, {n_p})")
        statuses.setflags(write=False)
        patients.setflags(write=False)
        self.statuses = statuses
        self.patients = patients

    @classmethod
    def from_cells(cls, rows: Sequence[Sequence[SlotCell]]) -> "Chromosome":
        statuses = [[int(c.status) for c in row] for row in rows]
        patients = [
            [VACANT if c.patient is None else c.patient for c in row] for row in rows
        ]
        return cls(statuses, patients)

    @property
    def n_g(self) -> int:
        return int(self.statuses.shape[0])

    @property
    def n_t(self) -> int:
        return int(self.statuses.shape[1])

    @property
    def n_cells(self) -> int:
        return self.statuses.size

    @property
    def tracks(self) -> tuple[Track, ...]:
        return tuple(Track(self.statuses[g], self.patients[g]) for g in range(self.n_g))

    def cell(self, g: int, t: int) -> SlotCell:
        return Track(self.statuses[g], self.patients[g])[t]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Chromosome):
            return NotImplemented
        return np.array_equal(self.statuses, other.statuses) and np.array_equal(
            self.patients, other.patients
        )

    __hash__ = None  # array-backed equality; instances are not hashable

    def __repr__(self) -> str:
        return f"Chromosome(n_g={self.n_g}, n_t={self.n_t})"


def _as_track(track) -> Track:
    if isinstance(track, Track):
        return track
    return Track.from_cells(track)


def _run_bounds(statuses: np.ndarray, patients: np.ndarray):
    """Run-length encode one track.

    Returns (starts, lengths, run_statuses, run_patients) as arrays; a run
    boundary falls wherever the status or the patient changes.
    """
    n = statuses.size
    change = (statuses[1:] != statuses[:-1]) | (patients[1:] != patients[:-1])
    starts = np.concatenate(([0], np.flatnonzero(change) + 1))
    ends = np.concatenate((starts[1:], [n]))
    return starts, ends - starts, statuses[starts], patients[starts]


def parse_runs(track) -> list[Run]:
    """Partition a track into maximal same-status, same-patient runs."""
    track = _as_track(track)
    starts, lengths, run_stat, run_pat = _run_bounds(track.statuses, track.patients)
    runs = []
    for start, length, status, patient in zip(starts, lengths, run_stat, run_pat):
        runs.append(
            Run(
                status=GantryStatus(int(status)),
                patient=None if patient == VACANT else int(patient),
                start=int(start),
                length=int(length),
            )
        )
    return runs


def parse_episodes(track, gantry: int) -> list[Episode]:
    """Extract one episode per maximal same-patient working segment."""
    track = _as_track(track)
    runs = parse_runs(track)
    pattern_runs = [
        (GantryStatus(s), status_duration(s)) for s in range(1, N_STATUSES)
    ]
    episodes: list[Episode] = []
    i = 0
    while i < len(runs):
        run = runs[i]
        if run.status == GantryStatus.IDLE:
            i += 1
            continue
        j = i
        while (
            j + 1 < len(runs)
            and runs[j + 1].status != GantryStatus.IDLE
            and runs[j + 1].patient == run.patient
        ):
            j += 1
        segment = runs[i : j + 1]
        start = segment[0].start
        end = segment[-1].start + segment[-1].length - 1
        complete = [(r.status, r.length) for r in segment] == pattern_runs
        episodes.append(
            Episode(
                patient=run.patient,
                gantry=gantry,
                start=start,
                end=end,
                complete=complete,
            )
        )
        i = j + 1
    return episodes


def random_chromosome(spec: ProblemSpec, rng: np.random.Generator) -> Chromosome:
    """Draw a schedule with uniform statuses and uniform patients when busy."""
    statuses = rng.integers(0, N_STATUSES, size=(spec.n_g, spec.n_t), dtype=np.int8)
    patients = rng.integers(0, spec.n_p, size=(spec.n_g, spec.n_t), dtype=np.int32)
    patients[statuses == GantryStatus.IDLE] = VACANT
    return Chromosome(statuses, patients, n_p=spec.n_p)
