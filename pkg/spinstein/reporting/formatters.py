import math
from typing import Any, Dict, List, Sequence


class TableFormatter:
    """Renders records as markdown tables for the terminal."""

    @staticmethod
    def format_value(value: Any) -> str:
        if value is None:
            return "-"
        if isinstance(value, bool):
            return "yes" if value else "no"
        if isinstance(value, float):
            if math.isinf(value):
                return "inf"
            return f"{value:.6g}"
        if isinstance(value, (list, tuple)):
            return "(" + ", ".join(TableFormatter.format_value(v) for v in value) + ")"
        return str(value)

    @staticmethod
    def format_table(columns: Sequence[str], rows: List[Dict[str, Any]]) -> str:
        """Markdown table with one row per record; an empty record set gives the header only."""
        formatted = "| " + " | ".join(columns) + " |\n"
        formatted += "| " + " | ".join("---" for _ in columns) + " |\n"
        for row in rows:
            formatted += "| " + " | ".join(TableFormatter.format_value(row.get(c)) for c in columns) + " |\n"
        return formatted

    @staticmethod
    def format_summary(summary: Dict[str, Any]) -> str:
        if not summary:
            return ""
        formatted = "**Summary:**\n"
        for key, value in summary.items():
            formatted += f"- **{key}:** {TableFormatter.format_value(value)}\n"
        return formatted
