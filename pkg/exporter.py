"""Export functionality for result tables."""

import csv
import io
import json
from pathlib import Path
from typing import Any, Optional, Union

from config import get_settings
from logger import log_success
from models import OutputFormat, ResultTable


def _cell(value: Any) -> str:
    """Deterministic text for one CSV cell; floats round-trip exactly."""
    if isinstance(value, float):
        return repr(value)
    return str(value)


class Exporter:
    """Write result tables as CSV (with a ``#`` metadata header) or JSON."""

    def __init__(self, output_dir: Optional[str] = None):
        """
        Initialize the exporter.

        Args:
            output_dir: Directory for default file names; created on first write
        """
        self.output_dir = Path(output_dir or get_settings().output_dir)

    def default_path(self, command: str, fmt: OutputFormat, figure: Optional[int] = None) -> Path:
        """``<output_dir>/<command>[-<figure>].<format>``."""
        stem = command if figure is None else f"{command}-{figure}"
        return self.output_dir / f"{stem}.{fmt.value}"

    def render_csv(self, table: ResultTable) -> str:
        buffer = io.StringIO()
        buffer.write(f"# title: {table.title}\n")
        for key in sorted(table.metadata):
            buffer.write(f"# {key}: {table.metadata[key]}\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow([_cell(v) for v in row])
        return buffer.getvalue()

    def render_json(self, table: ResultTable) -> str:
        data = {
            "title": table.title,
            "metadata": dict(sorted(table.metadata.items())),
            "columns": table.columns,
            "rows": table.rows,
        }
        return json.dumps(data, indent=2) + "\n"

    def to_csv(self, table: ResultTable, path: Union[str, Path]) -> Path:
        """
        Export a table to CSV.

        Args:
            table: Result table
            path: Destination file

        Returns:
            Path to the exported file
        """
        return self._write(self.render_csv(table), path, len(table.rows))

    def to_json(self, table: ResultTable, path: Union[str, Path]) -> Path:
        return self._write(self.render_json(table), path, len(table.rows))

    def export(
        self,
        table: ResultTable,
        fmt: OutputFormat = OutputFormat.CSV,
        path: Optional[Union[str, Path]] = None,
    ) -> Path:
        """Write ``table`` in ``fmt``; without a path the default name is derived from metadata."""
        if path is None:
            figure = table.metadata.get("figure")
            path = self.default_path(
                table.metadata.get("command", "result"),
                fmt,
                int(figure) if figure is not None else None,
            )
        if fmt is OutputFormat.JSON:
            return self.to_json(table, path)
        return self.to_csv(table, path)

    def _write(self, text: str, path: Union[str, Path], count: int) -> Path:
        filepath = Path(path)
        filepath.parent.mkdir(parents=True, exist_ok=True)
        with open(filepath, "w", newline="", encoding="utf-8") as f:
            f.write(text)
        log_success(f"Exported {count} rows to {filepath}")
        return filepath
