"""CSV, JSON and SVG emitters for regions, simulations and benefits."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from ..regions.frontier import ExponentRegion, to_bits
from ..regions.positive_rate import AuxChannels
from ..regions.zero_rate import PartitionSweepPoint
from ..simulator.estimates import ErrorEstimate
from .model_io import atomic_write_text, aux_to_dict

BITS = "bits"
NATS = "nats"

REGION_COLUMNS = ("theta1", "theta2", "unit")
SIMULATION_COLUMNS = (
    "n",
    "alpha1",
    "beta1",
    "alpha2",
    "beta2",
    "exp_beta1",
    "exp_beta2",
    "method",
    "ci95_alpha1",
    "ci95_beta1",
    "ci95_alpha2",
    "ci95_beta2",
)
LIMIT_COLUMNS = ("theta1_limit", "theta2_limit")

SVG_SIZE = 480
SVG_MARGIN = 56


def format_float(value: float) -> str:
    """Shortest decimal that parses back to the same double."""
    value = float(value)
    if not np.isfinite(value):
        return str(value)
    return np.format_float_positional(value, unique=True, trim="-")


def in_unit(value: float, unit: str) -> float:
    return to_bits(value) if unit == BITS else float(value)


def region_csv(region: ExponentRegion, unit: str) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(REGION_COLUMNS)
    for theta1, theta2 in region.points:
        writer.writerow((format_float(in_unit(theta1, unit)), format_float(in_unit(theta2, unit)), unit))
    return buffer.getvalue()


def simulation_csv(
    estimates: Sequence[ErrorEstimate],
    unit: str,
    limits: tuple[float, float] | None = None,
) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SIMULATION_COLUMNS + (LIMIT_COLUMNS if limits is not None else ()))
    for estimate in estimates:
        row = [str(estimate.n)]
        row += [format_float(value) for value in estimate.probabilities]
        row += [format_float(in_unit(value, unit)) for value in estimate.exponents]
        row.append(estimate.method)
        row += [format_float(value) for value in estimate.ci95]
        if limits is not None:
            row += [format_float(in_unit(value, unit)) for value in limits]
        writer.writerow(row)
    return buffer.getvalue()


def region_payload(region: ExponentRegion, unit: str) -> dict[str, Any]:
    return {
        "mode": region.mode,
        "is_rectangle": region.is_rectangle,
        "w1": region.w1,
        "w2": region.w2,
        "unit": unit,
        "points": [[in_unit(a, unit), in_unit(b, unit)] for a, b in region.points],
        "witnesses": [_witness(item, unit) for item in region.witnesses],
        "metadata": {key: _plain(value) for key, value in region.metadata.items()},
    }


def region_svg(region: ExponentRegion, unit: str, title: str = "") -> str:
    """Self-contained SVG: axes, the frontier staircase and a marker per corner."""
    points = [(in_unit(a, unit), in_unit(b, unit)) for a, b in region.points]
    x_max = max([a for a, _ in points] + [1e-12]) * 1.1
    y_max = max([b for _, b in points] + [1e-12]) * 1.1
    span = SVG_SIZE - 2 * SVG_MARGIN

    def sx(value: float) -> float:
        return SVG_MARGIN + span * value / x_max

    def sy(value: float) -> float:
        return SVG_SIZE - SVG_MARGIN - span * value / y_max

    stairs = [(0.0, points[0][1])]
    for index, (a, b) in enumerate(points):
        stairs.append((a, b))
        next_b = points[index + 1][1] if index + 1 < len(points) else 0.0
        stairs.append((a, next_b))
    polyline = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in stairs)
    origin_x, origin_y = sx(0.0), sy(0.0)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" height="{SVG_SIZE}" '
        f'viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<line x1="{origin_x:.2f}" y1="{origin_y:.2f}" x2="{SVG_SIZE - SVG_MARGIN / 2:.2f}" '
        f'y2="{origin_y:.2f}" stroke="black"/>',
        f'<line x1="{origin_x:.2f}" y1="{origin_y:.2f}" x2="{origin_x:.2f}" '
        f'y2="{SVG_MARGIN / 2:.2f}" stroke="black"/>',
        f'<text x="{SVG_SIZE / 2:.0f}" y="{SVG_SIZE - 16}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">θ1 [{unit}] (max {x_max / 1.1:.4g})</text>',
        f'<text x="16" y="{SVG_SIZE / 2:.0f}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="14" transform="rotate(-90 16 {SVG_SIZE / 2:.0f})">'
        f"θ2 [{unit}] (max {y_max / 1.1:.4g})</text>",
        f'<polyline points="{polyline}" fill="none" stroke="#1f4e8c" stroke-width="2"/>',
    ]
    for a, b in points:
        parts.append(f'<circle cx="{sx(a):.2f}" cy="{sy(b):.2f}" r="3.5" fill="#c0392b"/>')
    if title:
        parts.append(
            f'<text x="{SVG_SIZE / 2:.0f}" y="24" text-anchor="middle" font-family="sans-serif" '
            f'font-size="15">{_escape(title)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_text(path: Path | str, text: str) -> None:
    atomic_write_text(Path(path), text)


def write_json(path: Path | str, payload: dict[str, Any]) -> None:
    atomic_write_text(Path(path), dumps_json(payload))


def dumps_json(payload: dict[str, Any]) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False, allow_nan=True) + "\n"


def _witness(item: Any, unit: str) -> Any:
    if isinstance(item, AuxChannels):
        return aux_to_dict(item)
    if isinstance(item, PartitionSweepPoint):
        return {
            "r": in_unit(item.r, unit),
            "mapping": item.mapping,
            "theta1": in_unit(item.theta1, unit),
            "theta2": in_unit(item.theta2, unit),
        }
    return _plain(item)


def _plain(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    return value


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
