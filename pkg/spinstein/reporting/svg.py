"""
Minimal SVG line plots: axes, one polyline per series and a legend.
"""
import logging
import math
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

from ..errors import OutputError, UsageError

logger = logging.getLogger(__name__)

WIDTH, HEIGHT, MARGIN = 640, 420, 60
COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"]

Series = Dict[str, Sequence[Tuple[float, float]]]


def _span(values: List[float]) -> Tuple[float, float]:
    lo, hi = min(values), max(values)
    if hi == lo:
        pad = abs(lo) * 0.05 or 1.0
        return lo - pad, hi + pad
    return lo, hi


def render_svg_lines(series: Series, title: str = "", x_label: str = "", y_label: str = "") -> str:
    points = [(x, y) for values in series.values() for x, y in values if math.isfinite(x) and math.isfinite(y)]
    if not points:
        raise UsageError("nothing to plot: every series is empty")
    x_lo, x_hi = _span([x for x, _ in points])
    y_lo, y_hi = _span([y for _, y in points])

    def sx(x: float) -> float:
        return MARGIN + (x - x_lo) / (x_hi - x_lo) * (WIDTH - 2 * MARGIN)

    def sy(y: float) -> float:
        return HEIGHT - MARGIN - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - 2 * MARGIN)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<text x="{WIDTH / 2}" y="{MARGIN / 2}" text-anchor="middle" font-size="16">{title}</text>',
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 15}" text-anchor="middle" font-size="13">{x_label}</text>',
        f'<text x="15" y="{HEIGHT / 2}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 15 {HEIGHT / 2})">{y_label}</text>',
        f'<text x="{MARGIN}" y="{HEIGHT - MARGIN + 18}" font-size="11">{x_lo:.4g}</text>',
        f'<text x="{WIDTH - MARGIN}" y="{HEIGHT - MARGIN + 18}" text-anchor="end" font-size="11">{x_hi:.4g}</text>',
        f'<text x="{MARGIN - 5}" y="{HEIGHT - MARGIN}" text-anchor="end" font-size="11">{y_lo:.4g}</text>',
        f'<text x="{MARGIN - 5}" y="{MARGIN + 4}" text-anchor="end" font-size="11">{y_hi:.4g}</text>',
    ]
    for i, (name, values) in enumerate(series.items()):
        color = COLORS[i % len(COLORS)]
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in values if math.isfinite(x) and math.isfinite(y))
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{coords}"/>')
        parts.append(f'<text x="{WIDTH - MARGIN - 5}" y="{MARGIN + 16 * (i + 1)}" text-anchor="end" '
                     f'font-size="12" fill="{color}">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg_lines(path: Union[str, Path], series: Series, title: str = "", x_label: str = "", y_label: str = "") -> Path:
    target = Path(path)
    text = render_svg_lines(series, title, x_label, y_label)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except OSError as e:
        raise OutputError(f"cannot write {target}: {e}")
    logger.info("Wrote plot %s", target)
    return target
