from datetime import datetime
from typing import Iterable, Mapping, Optional

import pandas as pd
from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from ..metrics import RunMetrics

REPORT_COLUMNS = ["record", "value"]


def to_dataframe(records: Iterable[Mapping[str, object]], columns: Optional[list[str]] = None) -> pd.DataFrame:
    """
    Convert report records to a DataFrame.

    Every value is serialized with ``str`` and rows are sorted by their
    serialized form, so identical inputs always produce identical reports.

    Args:
        records: dicts keyed by column name
        columns: column order; defaults to record/value

    Returns:
        pandas DataFrame with one row per record
    """
    columns = columns or REPORT_COLUMNS
    rows = [{c: str(r.get(c, "")) for c in columns} for r in records]
    df = pd.DataFrame(rows, columns=columns)
    if df.empty:
        return df
    return df.sort_values(by=columns, kind="stable").reset_index(drop=True)


def export_report(results: pd.DataFrame, format: str = "json", filename: Optional[str] = None) -> str:
    """
    Export a report to file.

    Args:
        results: report DataFrame
        format: Export format ("json" or "csv")
        filename: Optional output filename

    Returns:
        Path to exported file
    """
    if filename is None:
        timestamp: str = datetime.now().strftime("%Y%m%d_%H%M%S")
        filename = f"shiftlab_report_{timestamp}.{format}"

    if format == "json":
        results.to_json(filename, orient="records", indent=2)
    elif format == "csv":
        results.to_csv(filename, index=False)
    else:
        raise ValueError(f"Unsupported format: {format}")

    return filename


class ConsoleFormatter:
    """
    Rich console output for command reports.

    ``format_report`` draws a titled panel with the verdict and run summary
    followed by the records table; ``format_lines`` prints one tab-separated
    record per line for scripts.
    """

    verdict_styles = {
        "ok": "bold green",
        "partial": "bold yellow",
        "refuted": "bold red",
        "failed": "bold red",
    }

    def __init__(self, console: Optional[Console] = None) -> None:
        self.console = console or Console()

    def format_report(
        self,
        results: pd.DataFrame,
        title: str,
        verdict: str = "ok",
        metrics: Optional[RunMetrics] = None,
    ) -> None:
        self._show_header(title, verdict, results, metrics)
        if results.empty:
            self.console.print("[dim]no records[/]")
            return
        self._show_records(results)

    def _show_header(
        self, title: str, verdict: str, results: pd.DataFrame, metrics: Optional[RunMetrics]
    ) -> None:
        style = self.verdict_styles.get(verdict.split(":")[0], "bold white")
        lines = [f"[{style}]{verdict}[/]", f"[dim]{len(results)} record(s)[/]"]
        if metrics is not None and metrics.checks_performed:
            lines.append(
                f"checks: {metrics.checks_performed} "
                f"([green]{metrics.checks_passed} passed[/], [red]{metrics.checks_failed} failed[/])"
            )
        if metrics is not None and metrics.partial_results:
            lines.append(f"[yellow]{metrics.partial_results} result(s) truncated at the horizon[/]")
        panel = Panel(
            "\n".join(lines),
            title=f"[bold white]{title}[/]",
            border_style="bright_blue",
            box=box.ROUNDED,
            padding=(0, 2),
        )
        self.console.print(panel)

    def _show_records(self, results: pd.DataFrame) -> None:
        table = Table(show_header=True, header_style="bold magenta", box=box.SIMPLE)
        for column in results.columns:
            table.add_column(str(column), style="cyan" if column == "record" else None, overflow="fold")
        for _, row in results.iterrows():
            table.add_row(*(Text(str(v)) for v in row))
        self.console.print(table)

    def format_lines(self, results: pd.DataFrame) -> None:
        for _, row in results.iterrows():
            self.console.out("\t".join(str(v) for v in row), highlight=False)

    def format_summary(self, metrics: RunMetrics) -> None:
        summary = metrics.to_dict()
        table = Table(show_header=False, box=None, padding=(0, 2))
        table.add_column("", style="bold magenta")
        table.add_column("")
        for phase, ms in summary["performance"]["phase_timings_ms"].items():
            table.add_row(phase, f"{ms} ms")
        table.add_row("total", f"{summary['performance']['total_time_ms']} ms")
        self.console.print(table)
