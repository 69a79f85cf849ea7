from typing import List, Optional, Sequence

from driftwic.evaluation.metrics import MetricsReport

COLUMNS = ("Accuracy", "macro-F1")


class RunResult:
    def __init__(self, label: str, metrics: MetricsReport):
        self.label = label
        self.metrics = metrics


class Table:
    """
    Scores of several runs, one row per run. Values are kept as fractions and shown as percentages.
    """

    def __init__(self, header: str, rows: List[tuple], title: Optional[str] = None):
        self.header = header
        self.rows = rows
        self.title = title

    @property
    def labels(self) -> List[str]:
        return [row[0] for row in self.rows]

    @staticmethod
    def _percent(value: float) -> str:
        return format(100.0 * value, ".2f")

    def render(self) -> str:
        cells = [(self.header,) + COLUMNS]
        cells += [(label,) + tuple(self._percent(value) for value in values) for label, *values in self.rows]
        widths = [max(len(row[i]) for row in cells) for i in range(len(cells[0]))]
        lines = [self.title] if self.title else []
        for k, row in enumerate(cells):
            lines.append("  ".join([row[0].ljust(widths[0])] +
                                   [cell.rjust(width) for cell, width in zip(row[1:], widths[1:])]).rstrip())
            if k == 0:
                lines.append("  ".join("-" * width for width in widths))
        return "\n".join(lines)

    def to_tsv(self) -> str:
        lines = ["\t".join((self.header,) + COLUMNS)]
        for label, *values in self.rows:
            lines.append("\t".join([label] + [self._percent(value) for value in values]))
        return "\n".join(lines) + "\n"


def report_table(runs: Sequence[RunResult], header: str = "Model", title: Optional[str] = None) -> Table:
    """
    Builds the Accuracy / macro-F1 table of a set of scored runs
    Args:
        runs: Scored runs, their order is the row order
        header: Title of the label column
        title: Optional line shown above the rendered table
    Returns: The table
    """
    if not runs:
        raise ValueError("Cannot build a report table without runs")
    return Table(header, [(run.label, run.metrics.accuracy, run.metrics.macro_f1) for run in runs], title)
