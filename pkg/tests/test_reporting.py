from skelreg.models import BestChoice, ExperimentReport, SseSummary
from skelreg.reporting import print_experiment_report, print_markdown_table, print_skeleton_summary

from .skeletons import make_skeleton


def test_print_markdown_table(capsys):
    headers = ["Method", "Median SSE"]
    rows = [
        ["sknn", "12.5"],
        ["mean", "140.0"],
    ]

    print_markdown_table(headers, rows)

    captured = capsys.readouterr()
    expected_output = (
        "| Method | Median SSE |\n"
        "|--------|------------|\n"
        "| sknn   | 12.5       |\n"
        "| mean   | 140.0      |\n"
    )
    assert captured.out == expected_output


def test_print_experiment_report_sorts_by_median(capsys):
    report = ExperimentReport(
        summaries={},
        best={
            "mean": BestChoice("", SseSummary(140.0, 120.04, 161.96)),
            "sknn": BestChoice("knots=38,components=5,k=9", SseSummary(12.5, 10.0, 15.3)),
        },
    )

    print_experiment_report(report, title="yinyang")

    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "## yinyang"
    assert lines[2].startswith("| Method")
    assert [cell.strip() for cell in lines[4].split("|")[1:5]] == [
        "sknn",
        "knots=38,components=5,k=9",
        "12.5",
        "(10.0, 15.3)",
    ]
    assert lines[5].split("|")[1].strip() == "mean"
    assert lines[5].split("|")[2].strip() == "-"


def test_print_skeleton_summary(capsys):
    skeleton = make_skeleton(
        [[0.0, 0.0], [1.0, 0.0], [1.0, 2.0], [5.0, 5.0], [5.0, 6.0]],
        [(0, 1), (1, 2), (3, 4)],
        component=[0, 0, 0, 1, 1],
    )

    print_skeleton_summary(skeleton)

    rows = [line.split("|")[1:-1] for line in capsys.readouterr().out.splitlines()[2:]]
    assert [[cell.strip() for cell in row] for row in rows] == [
        ["0", "3", "2", "3.000"],
        ["1", "2", "1", "1.000"],
    ]
