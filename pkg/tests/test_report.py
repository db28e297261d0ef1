"""Report structure, table formatting, and figure files."""

import json

import pytest

from musinger.display import HapticDisplay
from musinger.model import Condition, ForceFrame
from musinger.report import (build_report, format_report_text,
                             render_confusion_figure, render_depth_figure,
                             render_workspace_figure, two_decimals,
                             whole_percent)
from musinger.stats import EmptyData
from tests.helpers import (TABLE_ONE_CELLS, TABLE_ONE_COUNTS, TABLE_TWO_CELLS,
                           TABLE_TWO_COUNTS, paper_style_records,
                           records_from_counts)

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def test_two_decimals_rounds_half_away_from_zero():
    assert two_decimals(3 / 24) == "0.13"  # 0.125 would bank to 0.12
    assert two_decimals(1 / 24) == "0.04"
    assert two_decimals(23 / 24) == "0.96"
    assert two_decimals(22 / 24) == "0.92"
    assert two_decimals(20 / 24) == "0.83"
    assert two_decimals(2 / 24) == "0.08"
    assert two_decimals(0.0) == "0.00"
    assert two_decimals(1.0) == "1.00"


def test_whole_percent():
    assert whole_percent(94 / 96) == 98
    assert whole_percent(89 / 96) == 93
    assert whole_percent(0.985) == 99  # 98.5 rounds up, not to even
    assert whole_percent(1.0) == 100


def test_report_reproduces_published_cells():
    report = build_report(paper_style_records())
    none_block = report["conditions"]["none"]
    white_block = report["conditions"]["white"]
    assert tuple(tuple(row) for row in none_block["proportions"]) == \
        TABLE_ONE_CELLS
    assert tuple(tuple(row) for row in white_block["proportions"]) == \
        TABLE_TWO_CELLS
    assert tuple(tuple(row) for row in none_block["counts"]) == \
        TABLE_ONE_COUNTS
    assert none_block["accuracy_percent"] == 98
    assert white_block["accuracy_percent"] == 93
    assert none_block["trials"] == 96
    assert report["trials"] == 192
    assert report["participants"] == [f"P{i}" for i in range(1, 9)]


def test_report_anova_blocks_have_study_dfs():
    report = build_report(paper_style_records())
    between = report["conditions"]["none"]["anova_between"]
    assert between["df"] == [3, 28]
    within = report["conditions"]["none"]["anova_within"]
    assert within["df"] == [3, 21]
    two_factor = report["two_factor"]
    assert two_factor["melody"]["df"] == [3, 21]
    assert two_factor["condition"]["df"] == [1, 7]
    assert two_factor["interaction"]["df"] == [3, 21]


def test_report_is_json_serializable():
    report = build_report(paper_style_records())
    parsed = json.loads(json.dumps(report))
    assert parsed["conditions"]["none"]["accuracy_percent"] == 98


def test_report_single_condition_omits_two_factor():
    records = records_from_counts(TABLE_ONE_COUNTS, Condition.NO_NOISE)
    report = build_report(records)
    assert list(report["conditions"]) == ["none"]
    assert "two_factor" not in report


def test_report_insufficient_data_is_reported_not_raised():
    records = records_from_counts(TABLE_ONE_COUNTS, Condition.NO_NOISE,
                                  participants=1, reps=24)
    report = build_report(records)
    block = report["conditions"]["none"]["anova_between"]
    assert "insufficient_data" in block
    text = format_report_text(report)
    assert "insufficient data" in text


def test_report_empty_records_raise():
    with pytest.raises(EmptyData):
        build_report([])


def test_format_report_text_layout():
    text = format_report_text(build_report(paper_style_records()))
    assert text.startswith("trials: 192\n")
    assert "condition none: 96 trials, accuracy 0.98 (98%)" in text
    assert "condition white: 96 trials, accuracy 0.93 (93%)" in text
    assert "    A    23    1    0    0" in text
    assert "    A   0.96  0.04  0.00  0.00" in text
    assert "two-factor repeated measures:" in text
    assert text.endswith("\n")


def test_confusion_figure_writes_png(tmp_path):
    path = tmp_path / "confusion.png"
    render_confusion_figure(TABLE_TWO_COUNTS, "white", path)
    assert path.read_bytes()[:8] == PNG_MAGIC


def test_depth_figure_writes_png(tmp_path):
    display = HapticDisplay()
    history = []
    for tick in range(30):
        forces = (8.0, 0.0, 0.0) if tick < 12 else (0.0, 0.0, 0.0)
        frame = ForceFrame(seq=tick, timestamp_us=tick * 10_000, forces=forces)
        history.append(display.render_tick(frame))
    path = tmp_path / "depth.png"
    render_depth_figure(history, display.config, path)
    assert path.read_bytes()[:8] == PNG_MAGIC


def test_workspace_figure_writes_png(tmp_path):
    points = [(float(x), float(y), (x + y) % 2 == 0)
              for x in range(6) for y in range(-6, 0)]
    path = tmp_path / "workspace.png"
    render_workspace_figure(points, path)
    assert path.read_bytes()[:8] == PNG_MAGIC
