"""Shared constructions for the test suite."""

import random

from musinger.experiment import TrialRecord
from musinger.melodies import MelodyId
from musinger.model import Condition, Onset, RhythmPattern

TEST_RANDOM_SEED = 20260825

# Count tables that reproduce the published two-decimal confusion cells
# when divided by 24 (8 participants x 3 reps per row).
TABLE_ONE_COUNTS = (
    (23, 1, 0, 0),
    (0, 24, 0, 0),
    (0, 1, 23, 0),
    (0, 0, 0, 24),
)
TABLE_ONE_CELLS = (
    ("0.96", "0.04", "0.00", "0.00"),
    ("0.00", "1.00", "0.00", "0.00"),
    ("0.00", "0.04", "0.96", "0.00"),
    ("0.00", "0.00", "0.00", "1.00"),
)
TABLE_TWO_COUNTS = (
    (23, 0, 1, 0),
    (0, 22, 2, 0),
    (1, 3, 20, 0),
    (0, 0, 0, 24),
)
TABLE_TWO_CELLS = (
    ("0.96", "0.00", "0.04", "0.00"),
    ("0.00", "0.92", "0.08", "0.00"),
    ("0.04", "0.13", "0.83", "0.00"),
    ("0.00", "0.00", "0.00", "1.00"),
)


def records_from_counts(counts, condition, participants=8, reps=3):
    """Expand a 4x4 confusion count table into per-trial records.

    Each row must sum to participants*reps. Answers are dealt out to
    participants in a fixed order, so the construction is deterministic
    and the resulting log reproduces the table exactly.
    """
    melodies = list(MelodyId)
    records = []
    for row, presented in enumerate(melodies):
        answers = []
        for col, answered in enumerate(melodies):
            answers.extend([answered] * counts[row][col])
        if len(answers) != participants * reps:
            raise ValueError(f"row {presented} sums to {len(answers)}")
        for p in range(participants):
            for r in range(reps):
                records.append(TrialRecord(
                    participant=f"P{p + 1}",
                    condition=condition,
                    trial_index=row * reps + r,
                    presented=presented,
                    answered=answers[p * reps + r],
                ))
    return records


def paper_style_records():
    """Both conditions' reconstructed logs concatenated."""
    return (records_from_counts(TABLE_ONE_COUNTS, Condition.NO_NOISE)
            + records_from_counts(TABLE_TWO_COUNTS, Condition.WHITE_NOISE))


def jittered_pattern(pattern, rng: random.Random, spread_ms=10.0,
                     offset_ms=0.0):
    """Copy of a pattern with onset times perturbed uniformly."""
    onsets = []
    for onset in sorted(pattern.onsets, key=lambda o: (o.time_ms, o.channel)):
        time_ms = onset.time_ms + offset_ms + rng.uniform(-spread_ms,
                                                          spread_ms)
        onsets.append(Onset(time_ms=max(0.0, time_ms), channel=onset.channel,
                            duration_ms=onset.duration_ms,
                            intensity=onset.intensity))
    onsets.sort(key=lambda o: (o.time_ms, o.channel))
    return RhythmPattern(onsets=tuple(onsets))
