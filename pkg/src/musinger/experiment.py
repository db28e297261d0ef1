"""Blind-trial sessions and the trial-log format.

A session presents a shuffled plan of melodies through a presenter
callback and collects one answer per trial from an answer source that
never sees the presented id. The answer source may be the machine
classifier or a remote human; returning None marks a timeout and the
trial is excluded from the log.
"""

from __future__ import annotations

import csv
import logging
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .melodies import MelodyId
from .model import Condition, RhythmPattern

log = logging.getLogger(__name__)

DEFAULT_REPS = 3  # presentations per melody per condition

# presenter renders one melody and returns what the subject perceived;
# the answer source maps that observation (plus the trial index) to an id
Presenter = Callable[[MelodyId], object]
AnswerSource = Callable[[object, int], "MelodyId | None"]


@dataclass(frozen=True)
class TrialRecord:
    participant: str
    condition: Condition
    trial_index: int  # 0-based, unique per (participant, condition)
    presented: MelodyId
    answered: MelodyId

    @property
    def correct(self) -> bool:
        return self.presented is self.answered


def build_session_plan(melodies: Sequence[MelodyId] | None = None,
                       reps: int = DEFAULT_REPS, seed: int = 0) -> list[MelodyId]:
    """Seeded uniform shuffle of {each melody x reps}; 12 trials at defaults."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    plan = [m for m in (melodies if melodies is not None else list(MelodyId))
            for _ in range(reps)]
    random.Random(seed).shuffle(plan)
    return plan


def run_session(plan: Sequence[MelodyId], condition: Condition,
                presenter: Presenter, answer_source: AnswerSource,
                participant: str = "P1") -> list[TrialRecord]:
    """One record per answered trial, in presentation order.

    The observation handed to the answer source is scrubbed of any
    melody id, keeping the trial blind.
    """
    records = []
    for index, melody in enumerate(plan):
        observation = presenter(melody)
        if isinstance(observation, RhythmPattern) and observation.melody_id:
            observation = RhythmPattern(onsets=observation.onsets)
        answered = answer_source(observation, index)
        if answered is None:
            log.warning("participant %s trial %d: no answer before timeout, "
                        "trial excluded", participant, index)
            continue
        records.append(TrialRecord(participant=participant, condition=condition,
                                   trial_index=index, presented=melody,
                                   answered=answered))
    return records


TRIAL_LOG_COLUMNS = ("participant", "condition", "trial_index",
                     "presented", "answered")


def check_trial_records(records: Iterable[TrialRecord]):
    """Enforce trial_index uniqueness per (participant, condition)."""
    seen = set()
    for rec in records:
        key = (rec.participant, rec.condition, rec.trial_index)
        if key in seen:
            raise ValueError(f"duplicate trial_index {rec.trial_index} for "
                             f"{rec.participant}/{rec.condition.value}")
        seen.add(key)


def write_trial_log(path, records: Sequence[TrialRecord]):
    check_trial_records(records)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRIAL_LOG_COLUMNS)
        for rec in records:
            writer.writerow([rec.participant, rec.condition.value,
                             rec.trial_index, rec.presented.value,
                             rec.answered.value])


def read_trial_log(path) -> list[TrialRecord]:
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != TRIAL_LOG_COLUMNS:
            raise ValueError(f"bad trial-log header: {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(TRIAL_LOG_COLUMNS):
                raise ValueError(f"line {lineno}: expected "
                                 f"{len(TRIAL_LOG_COLUMNS)} fields, got {len(row)}")
            try:
                records.append(TrialRecord(
                    participant=row[0].strip(),
                    condition=Condition.parse(row[1]),
                    trial_index=int(row[2]),
                    presented=MelodyId.parse(row[3]),
                    answered=MelodyId.parse(row[4])))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
    check_trial_records(records)
    return records


def scores_by_melody(records: Iterable[TrialRecord],
                     condition: Condition) -> list[list[float]]:
    """Per-melody lists of per-subject accuracy, ordered by participant.

    The per-subject score is the proportion of correct answers among
    that subject's presentations of the melody; with 3 reps the values
    fall in {0, 1/3, 2/3, 1}.
    """
    tally: dict[tuple[str, MelodyId], list[int]] = {}
    participants: list[str] = []
    for rec in records:
        if rec.condition is not condition:
            continue
        if rec.participant not in participants:
            participants.append(rec.participant)
        cell = tally.setdefault((rec.participant, rec.presented), [0, 0])
        cell[0] += rec.correct
        cell[1] += 1
    groups = []
    for melody in MelodyId:
        group = []
        for participant in participants:
            cell = tally.get((participant, melody))
            if cell is not None:
                group.append(cell[0] / cell[1])
        groups.append(group)
    return groups


def scores_by_cell(records: Iterable[TrialRecord],
                   ) -> dict[tuple[str, MelodyId, Condition], float]:
    """Accuracy per (participant, melody, condition) cell for two-factor tests."""
    tally: dict[tuple[str, MelodyId, Condition], list[int]] = {}
    for rec in records:
        cell = tally.setdefault((rec.participant, rec.presented, rec.condition),
                                [0, 0])
        cell[0] += rec.correct
        cell[1] += 1
    return {key: hits / total for key, (hits, total) in tally.items()}
