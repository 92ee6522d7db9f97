"""Fitness evaluator tests: frozen hand cases, oracle agreement, invariants."""

from __future__ import annotations

import numpy as np
import pytest

from gantrysched import (
    Chromosome,
    ConfigError,
    FitnessBreakdown,
    ScoreTable,
    evaluate_breakdown,
    random_chromosome,
    weighted_total,
)
from gantrysched.rng import substream

from brute_fitness import brute_breakdown
from conftest import idle_rows, perfect_chromosome


def assert_matches_oracle(chrom: Chromosome, table: ScoreTable | None = None):
    got = evaluate_breakdown(chrom, table)
    want = brute_breakdown(chrom.statuses, chrom.patients)
    assert got.counts() == {k: v for k, v in want.items() if k != "total"}
    if table is None:
        assert got.total == want["total"]


class TestScoreTable:
    def test_defaults(self):
        table = ScoreTable()
        assert table.conflict == 20.0
        assert table.duplicate_treatment == 28.0
        assert table.time_per_slot == 1.5
        assert table.consecutive_run == 3.0

    def test_rejects_negative_weight(self):
        with pytest.raises(ConfigError):
            ScoreTable(interruption=-1.0)

    def test_weighted_total(self):
        counts = dict.fromkeys(
            (
                "conflicts",
                "duration_violations",
                "duplicate_treatments",
                "interruptions",
                "busy_slots",
                "consecutive_runs",
                "ordered_transitions",
                "completed_therapies",
            ),
            0,
        )
        counts.update(consecutive_runs=2, busy_slots=4, conflicts=1)
        assert weighted_total(counts, ScoreTable()) == 2 * 3.0 - 4 * 1.5 - 1 * 20.0


class TestFrozenCases:
    def test_single_perfect_treatment(self):
        """One complete treatment framed by idle slots scores 162."""
        got = evaluate_breakdown(perfect_chromosome(n_g=1, n_t=28, start=1))
        assert got.consecutive_runs == 7
        assert got.ordered_transitions == 8
        assert got.completed_therapies == 1
        assert got.busy_slots == 26
        assert got.duration_violations == 0
        assert got.interruptions == 0
        assert got.conflicts == 0
        assert got.duplicate_treatments == 0
        assert got.total == 162.0

    def test_duplicated_track_is_penalized(self):
        """The same treatment on two gantries conflicts in every busy slot."""
        chrom = perfect_chromosome(n_g=2, n_t=28, start=1, patients=[0, 0])
        got = evaluate_breakdown(chrom)
        assert got.conflicts == 26
        assert got.duplicate_treatments == 1
        assert got.completed_therapies == 2
        assert got.total == -224.0

    def test_all_idle_scores_zero(self):
        statuses, patients = idle_rows(30)
        got = evaluate_breakdown(Chromosome([statuses] * 3, [patients] * 3))
        assert got == FitnessBreakdown(0, 0, 0, 0, 0, 0, 0, 0, 0.0)


class TestEventSemantics:
    def test_interruption_needs_busy_neighbors(self):
        """A patient change across an idle gap is not an interruption."""
        chrom = Chromosome([[1, 0, 1]], [[0, -1, 1]])
        assert evaluate_breakdown(chrom).interruptions == 0

    def test_interruption_on_mid_cycle_handover(self):
        chrom = Chromosome([[6, 1]], [[0, 1]])
        assert evaluate_breakdown(chrom).interruptions == 1

    def test_no_interruption_after_disposal(self):
        """A handover right after the disposal run ends is allowed."""
        chrom = Chromosome([[7, 7, 7, 7, 1]], [[0, 0, 0, 0, 1]])
        got = evaluate_breakdown(chrom)
        assert got.interruptions == 0
        assert got.consecutive_runs == 2  # both runs at nominal duration

    def test_interruption_inside_disposal(self):
        """A patient change inside a disposal block still ends that run."""
        chrom = Chromosome([[7, 7, 7, 7]], [[0, 0, 1, 1]])
        got = evaluate_breakdown(chrom)
        assert got.interruptions == 0  # slot 1 closes the first disposal run
        assert got.duration_violations == 2

    def test_transition_requires_same_patient_between_working_runs(self):
        same = Chromosome([[6, 7]], [[0, 0]])
        different = Chromosome([[6, 7]], [[0, 1]])
        assert evaluate_breakdown(same).ordered_transitions == 1
        assert evaluate_breakdown(different).ordered_transitions == 0

    def test_transitions_through_idle_ignore_patients(self):
        chrom = Chromosome([[7, 0, 1]], [[0, -1, 1]])
        assert evaluate_breakdown(chrom).ordered_transitions == 2

    def test_conflict_counts_slots_not_pairs(self):
        chrom = Chromosome(
            [[1, 1], [2, 2], [0, 3]],
            [[0, 0], [0, 0], [-1, 0]],
        )
        # slot 0: one busy pair; slot 1: all three gantries hold patient 0
        assert evaluate_breakdown(chrom).conflicts == 4

    def test_embedded_cycle_is_not_complete(self):
        """A perfect cycle glued to extra busy slots of the same patient."""
        statuses = [1] + [1] + [2] * 3 + [3] * 15 + [4] + [5] + [6] + [7] * 4
        patients = [0] * len(statuses)
        got = evaluate_breakdown(Chromosome([statuses], [patients]))
        assert got.completed_therapies == 0
        # leading double-ready run breaks the nominal duration as well
        assert got.duration_violations == 1

    def test_duplicates_count_repeat_completions(self):
        chrom = perfect_chromosome(n_g=3, n_t=28, start=1, patients=[4, 4, 4])
        got = evaluate_breakdown(chrom)
        assert got.completed_therapies == 3
        assert got.duplicate_treatments == 2


class TestOracleAgreement:
    def test_random_small_schedules(self, small_spec):
        rng = substream(2024, 0, 0, 0)
        for _ in range(300):
            assert_matches_oracle(random_chromosome(small_spec, rng))

    def test_random_medium_schedules(self, medium_spec):
        rng = substream(2025, 0, 0, 0)
        for _ in range(30):
            assert_matches_oracle(random_chromosome(medium_spec, rng))

    def test_hand_cases(self):
        assert_matches_oracle(perfect_chromosome(n_g=2, n_t=30, start=2, patients=[0, 0]))
        assert_matches_oracle(Chromosome([[7, 7, 7, 7, 1]], [[0, 0, 0, 0, 1]]))
        assert_matches_oracle(Chromosome([[3] * 6], [[1] * 6]))


class TestInvariants:
    def test_gantry_order_is_irrelevant(self, small_spec):
        rng = substream(5, 0, 0, 0)
        for _ in range(50):
            chrom = random_chromosome(small_spec, rng)
            flipped = Chromosome(chrom.statuses[::-1], chrom.patients[::-1])
            assert evaluate_breakdown(chrom) == evaluate_breakdown(flipped)

    def test_idle_padding_after_idle_tail_changes_nothing(self, small_spec):
        """Extending a trailing idle run never changes any count.

        Padding is only neutral when the track already ends idle: gluing
        idle slots to a busy tail can mint a disposal-to-idle transition.
        """
        rng = substream(6, 0, 0, 0)
        pad_s = np.zeros((small_spec.n_g, 5), dtype=np.int8)
        pad_p = np.full((small_spec.n_g, 5), -1, dtype=np.int32)
        for _ in range(50):
            chrom = random_chromosome(small_spec, rng)
            statuses = chrom.statuses.copy()
            patients = chrom.patients.copy()
            statuses[:, -1] = 0
            patients[:, -1] = -1
            base = Chromosome(statuses, patients)
            padded = Chromosome(
                np.hstack([base.statuses, pad_s]), np.hstack([base.patients, pad_p])
            )
            assert evaluate_breakdown(padded) == evaluate_breakdown(base)

    def test_padding_a_disposal_tail_adds_one_transition(self):
        chrom = Chromosome([[7, 7, 7, 7]], [[2, 2, 2, 2]])
        padded = Chromosome([[7, 7, 7, 7, 0]], [[2, 2, 2, 2, -1]])
        before = evaluate_breakdown(chrom)
        after = evaluate_breakdown(padded)
        assert after.ordered_transitions == before.ordered_transitions + 1

    def test_total_is_linear_in_weights(self, small_spec):
        rng = substream(8, 0, 0, 0)
        table = ScoreTable(conflict=1.0, time_per_slot=0.0, consecutive_run=7.0)
        for _ in range(20):
            chrom = random_chromosome(small_spec, rng)
            got = evaluate_breakdown(chrom, table)
            assert got.total == weighted_total(got.counts(), table)
