"""Analysis reports: text, JSON-ready structures, and figure files.

Proportions display with two decimals rounded half away from zero, so
3/24 shows as 0.13 the way the published tables round it (banker's
rounding would give 0.12). Raw counts always ride along, keeping the
rounded view auditable. Figure rendering imports matplotlib lazily and
uses the Agg backend, so headless runs and report-only runs stay cheap.
"""

from __future__ import annotations

import math
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Sequence

from .display import DisplayConfig, LinkageState
from .experiment import TrialRecord, scores_by_cell, scores_by_melody
from .melodies import MelodyId
from .model import Condition
from .stats import (AnovaResult, EmptyData, MissingCells, anova_one_way,
                    anova_one_way_within, anova_two_factor, confusion_matrix,
                    overall_accuracy)

MELODY_LABELS = tuple(m.value for m in MelodyId)


def two_decimals(value: float) -> str:
    """Half-away-from-zero at two decimals: 0.125 -> '0.13'."""
    return str(Decimal(repr(float(value))).quantize(Decimal("0.01"),
                                                    rounding=ROUND_HALF_UP))


def whole_percent(value: float) -> int:
    """0.9792 -> 98, matching prose that rounds rates to whole percent."""
    return int(Decimal(repr(float(value) * 100)).quantize(
        Decimal("1"), rounding=ROUND_HALF_UP))


def _anova_dict(result: AnovaResult) -> dict:
    return {"label": result.label,
            "F": "inf" if math.isinf(result.F) else round(result.F, 6),
            "df": [result.df_between, result.df_error],
            "p": round(result.p, 6),
            "alpha": result.alpha,
            "significant": result.significant}


def _try_anova(fn, *args) -> dict:
    try:
        result = fn(*args)
    except (EmptyData, MissingCells) as exc:
        return {"insufficient_data": str(exc)}
    if isinstance(result, dict):
        return {name: _anova_dict(res) for name, res in result.items()}
    return _anova_dict(result)


def build_report(records: Sequence[TrialRecord]) -> dict:
    """Everything cmd_analyze prints, as one JSON-ready dict."""
    if not records:
        raise EmptyData("no trial records")
    participants = sorted({r.participant for r in records})
    report = {
        "trials": len(records),
        "participants": participants,
        "melodies": list(MELODY_LABELS),
        "conditions": {},
    }
    for condition in Condition:
        subset = [r for r in records if r.condition is condition]
        if not subset:
            continue
        matrix = confusion_matrix(subset)
        accuracy = overall_accuracy(subset)
        report["conditions"][condition.value] = {
            "trials": len(subset),
            "accuracy": round(accuracy, 6),
            "accuracy_percent": whole_percent(accuracy),
            "counts": [list(row) for row in matrix.counts],
            "proportions": [[two_decimals(p) for p in row]
                            for row in matrix.proportions],
            "anova_between": _try_anova(anova_one_way,
                                        scores_by_melody(records, condition)),
            "anova_within": _try_anova(anova_one_way_within,
                                       scores_by_melody(records, condition)),
        }
    if len(report["conditions"]) == 2:
        report["two_factor"] = _try_anova(anova_two_factor,
                                          scores_by_cell(records))
    return report


def _format_matrix_block(counts, proportions) -> list[str]:
    lines = ["  counts (rows presented, columns answered; order A-D):"]
    for label, row in zip(MELODY_LABELS, counts):
        lines.append("    " + label + "  " + " ".join(f"{c:4d}" for c in row))
    lines.append("  proportions (row-normalized, two decimals):")
    for label, row in zip(MELODY_LABELS, proportions):
        lines.append("    " + label + "  " + " ".join(f"{p:>5s}" for p in row))
    return lines


def _format_anova_block(block: dict, indent: str = "  ") -> list[str]:
    if "insufficient_data" in block:
        return [f"{indent}ANOVA: insufficient data ({block['insufficient_data']})"]
    if "label" in block:
        sig = "significant" if block["significant"] else "not significant"
        return [f"{indent}{block['label']}: F({block['df'][0]}, {block['df'][1]}) "
                f"= {block['F']}, p = {block['p']} ({sig} at alpha "
                f"{block['alpha']})"]
    lines = []
    for name, sub in block.items():
        lines.extend(_format_anova_block(sub, indent))
    return lines


def format_report_text(report: dict) -> str:
    lines = [f"trials: {report['trials']}",
             f"participants: {len(report['participants'])} "
             f"({', '.join(report['participants'])})"]
    for name, block in report["conditions"].items():
        lines.append("")
        lines.append(f"condition {name}: {block['trials']} trials, accuracy "
                     f"{two_decimals(block['accuracy'])} "
                     f"({block['accuracy_percent']}%)")
        lines.extend(_format_matrix_block(block["counts"], block["proportions"]))
        lines.extend(_format_anova_block(block["anova_between"]))
        lines.extend(_format_anova_block(block["anova_within"]))
    if "two_factor" in report:
        lines.append("")
        lines.append("two-factor repeated measures:")
        lines.extend(_format_anova_block(report["two_factor"]))
    return "\n".join(lines) + "\n"


# --- figure rendering -------------------------------------------------------


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def render_confusion_figure(counts: Sequence[Sequence[int]], title: str, path):
    """Heatmap of row-normalized proportions with two-decimal annotations."""
    plt = _pyplot()
    rows = []
    for row in counts:
        total = sum(row)
        rows.append([c / total if total else 0.0 for c in row])
    fig, ax = plt.subplots(figsize=(4.2, 3.8))
    image = ax.imshow(rows, cmap="Blues", vmin=0.0, vmax=1.0)
    ax.set_xticks(range(len(MELODY_LABELS)), MELODY_LABELS)
    ax.set_yticks(range(len(MELODY_LABELS)), MELODY_LABELS)
    ax.set_xlabel("answered")
    ax.set_ylabel("presented")
    ax.set_title(title)
    for i, row in enumerate(rows):
        for j, value in enumerate(row):
            ax.text(j, i, two_decimals(value), ha="center", va="center",
                    color="white" if value > 0.5 else "black", fontsize=9)
    fig.colorbar(image, ax=ax, fraction=0.046)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_depth_figure(history: Iterable[tuple[LinkageState, ...]],
                        config: DisplayConfig, path):
    """Per-channel contact depth over time for one rendered stream."""
    plt = _pyplot()
    history = list(history)
    times = [tick / config.tick_rate_hz for tick in range(len(history))]
    fig, axes = plt.subplots(3, 1, sharex=True, figsize=(8, 4.5))
    for ch, ax in enumerate(axes):
        ax.plot(times, [states[ch].contact_depth_mm for states in history],
                linewidth=0.9)
        ax.set_ylabel(f"ch{ch + 1} depth (mm)")
        ax.set_ylim(-0.1, config.depth_max_mm * 1.15)
    axes[-1].set_xlabel("time (s)")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_workspace_figure(points: Sequence[tuple[float, float, bool]], path):
    """Scatter of a workspace grid; reachable points filled."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 5))
    good = [(x, y) for x, y, ok in points if ok]
    bad = [(x, y) for x, y, ok in points if not ok]
    if good:
        ax.scatter(*zip(*good), s=3, c="tab:blue", label="reachable")
    if bad:
        ax.scatter(*zip(*bad), s=1, c="0.85", label="unreachable")
    ax.set_xlabel("x (mm)")
    ax.set_ylabel("y (mm)")
    ax.set_aspect("equal")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
