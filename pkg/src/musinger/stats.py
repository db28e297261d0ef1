"""Recognition statistics: confusion matrices, accuracy, and ANOVA.

Inputs are per-trial records or per-subject accuracy scores; outputs
carry their degrees-of-freedom convention in a label so reports never
leave the design ambiguous. p-values come from the regularized
incomplete beta function evaluated by continued fraction, so the
package needs no statistical dependency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .melodies import MelodyId
from .model import Condition


class EmptyData(ValueError):
    """Operation needs at least one record or score."""


class MissingCells(ValueError):
    """Balanced-table analysis got an incomplete table."""

    def __init__(self, cells: list[tuple]):
        self.cells = cells

        def label(part):
            return str(getattr(part, "value", part))

        shown = ", ".join("(" + ", ".join(map(label, cell)) + ")"
                          for cell in cells[:6])
        more = "" if len(cells) <= 6 else f" and {len(cells) - 6} more"
        super().__init__(f"missing cells: {shown}{more}")


class DomainError(ValueError):
    """Argument outside the mathematical domain."""


_IDS = tuple(MelodyId)


@dataclass(frozen=True)
class ConfusionMatrix:
    """Row-normalized presented-vs-answered proportions plus raw counts."""

    counts: tuple[tuple[int, ...], ...]  # rows presented, columns answered

    def __post_init__(self):
        n = len(_IDS)
        if len(self.counts) != n or any(len(r) != n for r in self.counts):
            raise ValueError(f"counts must be {n}x{n}")
        if any(c < 0 for row in self.counts for c in row):
            raise ValueError("counts must be non-negative")

    @property
    def proportions(self) -> tuple[tuple[float, ...], ...]:
        rows = []
        for row in self.counts:
            total = sum(row)
            rows.append(tuple(c / total if total else 0.0 for c in row))
        return tuple(rows)

    def row(self, presented: MelodyId) -> tuple[float, ...]:
        return self.proportions[_IDS.index(presented)]

    def cell(self, presented: MelodyId, answered: MelodyId) -> float:
        return self.row(presented)[_IDS.index(answered)]

    @property
    def diagonal(self) -> tuple[float, ...]:
        return tuple(self.proportions[i][i] for i in range(len(_IDS)))


def confusion_matrix(records: Iterable) -> ConfusionMatrix:
    """Tally (presented, answered) pairs from trial records."""
    counts = [[0] * len(_IDS) for _ in _IDS]
    total = 0
    for rec in records:
        counts[_IDS.index(rec.presented)][_IDS.index(rec.answered)] += 1
        total += 1
    if total == 0:
        raise EmptyData("no trial records")
    return ConfusionMatrix(tuple(tuple(r) for r in counts))


def overall_accuracy(records: Iterable) -> float:
    correct = total = 0
    for rec in records:
        total += 1
        correct += rec.presented is rec.answered
    if total == 0:
        raise EmptyData("no trial records")
    return correct / total


@dataclass(frozen=True)
class AnovaResult:
    F: float
    df_between: int
    df_error: int
    p: float
    alpha: float = 0.05
    label: str = "between-groups one-way"

    def __post_init__(self):
        if self.F < 0 or not 0.0 <= self.p <= 1.0:
            raise ValueError("F must be >= 0 and p in [0, 1]")
        if self.df_between < 1 or self.df_error < 1:
            raise ValueError("degrees of freedom must be positive")

    @property
    def significant(self) -> bool:
        return self.p < self.alpha

    def __str__(self):
        return (f"{self.label}: F({self.df_between}, {self.df_error}) = "
                f"{self.F:.4f}, p = {self.p:.4f}")


def _ratio_to_result(ss_effect: float, df_effect: int, ss_error: float,
                     df_error: int, label: str) -> AnovaResult:
    # both-zero means every score identical: no effect, maximal p
    if ss_error <= 0.0:
        if ss_effect <= 0.0:
            return AnovaResult(0.0, df_effect, df_error, 1.0, label=label)
        return AnovaResult(math.inf, df_effect, df_error, 0.0, label=label)
    f_stat = (ss_effect / df_effect) / (ss_error / df_error)
    return AnovaResult(f_stat, df_effect, df_error,
                       f_upper_tail(f_stat, df_effect, df_error), label=label)


def anova_one_way(groups: Sequence[Sequence[float]]) -> AnovaResult:
    """Between-groups one-way ANOVA.

    For k groups of sizes n_i, df = (k-1, N-k); with 4 melodies and 8
    subjects that is (3, 28).
    """
    if len(groups) < 2 or any(len(g) < 2 for g in groups):
        raise EmptyData("need >= 2 groups with >= 2 scores each")
    flat = [x for g in groups for x in g]
    n_total = len(flat)
    grand = sum(flat) / n_total
    ss_between = sum(len(g) * (sum(g) / len(g) - grand) ** 2 for g in groups)
    ss_within = sum((x - sum(g) / len(g)) ** 2 for g in groups for x in g)
    return _ratio_to_result(ss_between, len(groups) - 1,
                            ss_within, n_total - len(groups),
                            "between-groups one-way")


def anova_one_way_within(groups: Sequence[Sequence[float]]) -> AnovaResult:
    """Within-subject one-way ANOVA (same subject at index i of each group).

    Subject variance leaves the error term; df = (k-1, (k-1)(n-1)),
    which is (3, 21) for 4 melodies and 8 subjects.
    """
    if len(groups) < 2:
        raise EmptyData("need >= 2 groups")
    n = len(groups[0])
    if n < 2 or any(len(g) != n for g in groups):
        raise EmptyData("groups must share >= 2 subjects in order")
    k = len(groups)
    grand = sum(x for g in groups for x in g) / (k * n)
    treat_means = [sum(g) / n for g in groups]
    subj_means = [sum(g[s] for g in groups) / k for s in range(n)]
    ss_treat = n * sum((m - grand) ** 2 for m in treat_means)
    ss_subj = k * sum((m - grand) ** 2 for m in subj_means)
    ss_total = sum((x - grand) ** 2 for g in groups for x in g)
    ss_error = ss_total - ss_treat - ss_subj
    return _ratio_to_result(ss_treat, k - 1, max(0.0, ss_error),
                            (k - 1) * (n - 1), "within-subject one-way")


def anova_two_factor(
    scores: Mapping[tuple[str, MelodyId, Condition], float],
) -> dict[str, AnovaResult]:
    """Two-factor repeated-measures ANOVA over a complete subject table.

    One score per (subject, melody, condition). Each effect is tested
    against its own effect-by-subject interaction: melody df
    (a-1, (a-1)(n-1)), condition df (b-1, (b-1)(n-1)), interaction df
    ((a-1)(b-1), (a-1)(b-1)(n-1)).
    """
    subjects = sorted({k[0] for k in scores})
    melodies = list(_IDS)
    conditions = list(Condition)
    if len(subjects) < 2:
        raise EmptyData("need >= 2 subjects")
    missing = [(s, m, c) for s in subjects for m in melodies for c in conditions
               if (s, m, c) not in scores]
    if missing:
        raise MissingCells(missing)

    n, a, b = len(subjects), len(melodies), len(conditions)
    x = {key: float(v) for key, v in scores.items()}
    grand = sum(x.values()) / (n * a * b)

    def mean(keys):
        vals = [x[k] for k in keys]
        return sum(vals) / len(vals)

    m_subj = {s: mean([(s, m, c) for m in melodies for c in conditions]) for s in subjects}
    m_mel = {m: mean([(s, m, c) for s in subjects for c in conditions]) for m in melodies}
    m_con = {c: mean([(s, m, c) for s in subjects for m in melodies]) for c in conditions}
    m_mc = {(m, c): mean([(s, m, c) for s in subjects]) for m in melodies for c in conditions}
    m_sm = {(s, m): mean([(s, m, c) for c in conditions]) for s in subjects for m in melodies}
    m_sc = {(s, c): mean([(s, m, c) for m in melodies]) for s in subjects for c in conditions}

    ss_total = sum((v - grand) ** 2 for v in x.values())
    ss_subj = a * b * sum((m_subj[s] - grand) ** 2 for s in subjects)
    ss_mel = n * b * sum((m_mel[m] - grand) ** 2 for m in melodies)
    ss_con = n * a * sum((m_con[c] - grand) ** 2 for c in conditions)
    ss_mc = (n * sum((m_mc[mc] - grand) ** 2 for mc in m_mc)
             - ss_mel - ss_con)
    ss_mel_subj = (b * sum((m_sm[sm] - grand) ** 2 for sm in m_sm)
                   - ss_mel - ss_subj)
    ss_con_subj = (a * sum((m_sc[sc] - grand) ** 2 for sc in m_sc)
                   - ss_con - ss_subj)
    ss_resid = (ss_total - ss_subj - ss_mel - ss_con - ss_mc
                - ss_mel_subj - ss_con_subj)

    def clamp(v: float) -> float:
        return max(0.0, v)

    return {
        "melody": _ratio_to_result(
            clamp(ss_mel), a - 1, clamp(ss_mel_subj), (a - 1) * (n - 1),
            "repeated-measures melody effect"),
        "condition": _ratio_to_result(
            clamp(ss_con), b - 1, clamp(ss_con_subj), (b - 1) * (n - 1),
            "repeated-measures condition effect"),
        "interaction": _ratio_to_result(
            clamp(ss_mc), (a - 1) * (b - 1), clamp(ss_resid),
            (a - 1) * (b - 1) * (n - 1),
            "repeated-measures melody x condition interaction"),
    }


# --- F-distribution tail via the regularized incomplete beta ----------------

_BETA_EPS = 1e-15
_BETA_TINY = 1e-300
_BETA_MAX_ITER = 500


def _beta_cf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _BETA_TINY:
        d = _BETA_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAX_ITER + 1):
        m2 = 2 * m
        num = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + num * d
        if abs(d) < _BETA_TINY:
            d = _BETA_TINY
        c = 1.0 + num / c
        if abs(c) < _BETA_TINY:
            c = _BETA_TINY
        d = 1.0 / d
        h *= d * c
        num = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + num * d
        if abs(d) < _BETA_TINY:
            d = _BETA_TINY
        c = 1.0 + num / c
        if abs(c) < _BETA_TINY:
            c = _BETA_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_EPS:
            return h
    return h


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) to within 1e-8 absolute error."""
    if a <= 0 or b <= 0:
        raise DomainError("shape parameters must be positive")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x = {x} outside [0, 1]")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    front = math.exp(math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                     + a * math.log(x) + b * math.log1p(-x))
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def f_upper_tail(f_stat: float, df1: int, df2: int) -> float:
    """P(F >= f_stat) for an F(df1, df2) distribution."""
    if df1 < 1 or df2 < 1:
        raise DomainError("degrees of freedom must be >= 1")
    if f_stat < 0:
        raise DomainError("F statistic must be >= 0")
    if math.isinf(f_stat):
        return 0.0
    if f_stat == 0.0:
        return 1.0
    x = df2 / (df2 + df1 * f_stat)
    return regularized_incomplete_beta(df2 / 2.0, df1 / 2.0, x)
