"""Shared fixtures and hand-built schedule helpers."""

from __future__ import annotations

import pytest

from gantrysched import Chromosome, ProblemSpec

# One complete treatment, slot by slot: ready through the last disposal minute.
CYCLE_SLOTS = [1] + [2] * 3 + [3] * 15 + [4] + [5] + [6] + [7] * 4


def idle_rows(n_t: int) -> tuple[list[int], list[int]]:
    return [0] * n_t, [-1] * n_t


def rows_with_cycle(n_t: int, patient: int, start: int) -> tuple[list[int], list[int]]:
    """One track holding a single complete treatment, idle elsewhere."""
    statuses, patients = idle_rows(n_t)
    statuses[start : start + len(CYCLE_SLOTS)] = CYCLE_SLOTS
    patients[start : start + len(CYCLE_SLOTS)] = [patient] * len(CYCLE_SLOTS)
    return statuses, patients


def perfect_chromosome(n_g: int = 1, n_t: int = 28, start: int = 1, patients=None) -> Chromosome:
    """Every track holds one complete treatment framed by idle slots."""
    if patients is None:
        patients = list(range(n_g))
    rows = [rows_with_cycle(n_t, patients[g], start) for g in range(n_g)]
    return Chromosome([r[0] for r in rows], [r[1] for r in rows])


@pytest.fixture
def small_spec() -> ProblemSpec:
    return ProblemSpec(n_g=2, n_p=3, n_t=20)


@pytest.fixture
def medium_spec() -> ProblemSpec:
    return ProblemSpec(n_g=3, n_p=12, n_t=108)
