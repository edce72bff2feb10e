from typing import Any, List, Sequence

from .models import ExperimentReport, Skeleton


def print_markdown_table(headers: List[str], rows: Sequence[Sequence[Any]]) -> None:
    """Prints a generic markdown table."""
    if not headers:
        return

    # Calculate column widths
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            if i < len(widths):
                widths[i] = max(widths[i], len(str(cell)))

    print("| " + " | ".join(f"{h:<{widths[i]}}" for i, h in enumerate(headers)) + " |")
    print("|-" + "-|-".join("-" * widths[i] for i in range(len(widths))) + "-|")
    for row in rows:
        print("| " + " | ".join(f"{str(cell):<{widths[i]}}" for i, cell in enumerate(row)) + " |")


def _sse(value: float) -> str:
    return f"{value:.1f}"


def print_experiment_report(report: ExperimentReport, title: str = "Cross-validation SSE") -> None:
    """Best setting per method with its median SSE and the (5th, 95th) percentiles."""
    print(f"## {title}")
    print()
    rows = []
    for method in sorted(report.best, key=lambda m: (report.best[m].summary.median, m)):
        choice = report.best[method]
        summary = choice.summary
        rows.append(
            [method, choice.params or "-", _sse(summary.median), f"({_sse(summary.p5)}, {_sse(summary.p95)})"]
        )
    print_markdown_table(["Method", "Best parameters", "Median SSE", "(p5, p95)"], rows)


def print_skeleton_summary(skeleton: Skeleton) -> None:
    components = sorted(set(skeleton.component.tolist()))
    rows = []
    for label in components:
        members = skeleton.component == label
        edges = [e for e in skeleton.edges if members[e.i]]
        rows.append([label, int(members.sum()), len(edges), f"{sum(e.length for e in edges):.3f}"])
    print_markdown_table(["Component", "Knots", "Edges", "Total length"], rows)
