from .csv_writer import write_csv, render_csv, digest_file, digest_text
from .manifest import ExperimentManifest, manifest_path_for, compare_outputs
from .svg import write_svg_lines, render_svg_lines
from .formatters import TableFormatter

__all__ = [
    "write_csv",
    "render_csv",
    "digest_file",
    "digest_text",
    "ExperimentManifest",
    "manifest_path_for",
    "compare_outputs",
    "write_svg_lines",
    "render_svg_lines",
    "TableFormatter",
]
