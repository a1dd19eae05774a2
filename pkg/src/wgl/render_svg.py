"""Offline SVG rendering of evaluated figures.

Viewport auto-fits the bounding box of the figure's points and circles with
a 10% margin; infinite lines are clipped to that viewport. Points are drawn
as small square markers with labels so `<circle>` elements in the output
correspond one-to-one to actual circles of the figure.
"""

from __future__ import annotations

from .geom import Circle, Construction, Figure, Line, Point

CANVAS = 800.0
POINT_MARKER = 4.0


def _bounds(fig: Figure) -> tuple[float, float, float, float]:
    xs: list[float] = []
    ys: list[float] = []
    for obj in fig.objects.values():
        if isinstance(obj, Point):
            xs.append(obj.x)
            ys.append(obj.y)
        elif isinstance(obj, Circle):
            xs.extend((obj.center.x - obj.radius, obj.center.x + obj.radius))
            ys.extend((obj.center.y - obj.radius, obj.center.y + obj.radius))
    if not xs:
        return -10.0, 10.0, -10.0, 10.0
    xmin, xmax, ymin, ymax = min(xs), max(xs), min(ys), max(ys)
    spread = max(xmax - xmin, ymax - ymin, 1.0)
    margin = 0.1 * spread
    return xmin - margin, xmax + margin, ymin - margin, ymax + margin


def _clip_line(line: Line, box: tuple[float, float, float, float]):
    """Segment of an infinite line inside the box, or None (Liang-Barsky)."""
    xmin, xmax, ymin, ymax = box
    # point on line closest to origin plus direction
    px, py = -line.a * line.c, -line.b * line.c
    dx, dy = -line.b, line.a
    t0, t1 = -1e18, 1e18
    for p, q in ((-dx, px - xmin), (dx, xmax - px), (-dy, py - ymin), (dy, ymax - py)):
        if p == 0.0:
            if q < 0.0:
                return None
            continue
        t = q / p
        if p < 0.0:
            t0 = max(t0, t)
        else:
            t1 = min(t1, t)
    if t0 > t1:
        return None
    return (px + t0 * dx, py + t0 * dy), (px + t1 * dx, py + t1 * dy)


def render_svg(construction: Construction, fig: Figure) -> str:
    xmin, xmax, ymin, ymax = _bounds(fig)
    scale = CANVAS / max(xmax - xmin, ymax - ymin)
    width = (xmax - xmin) * scale
    height = (ymax - ymin) * scale

    def sx(x: float) -> float:
        return (x - xmin) * scale

    def sy(y: float) -> float:
        return (ymax - y) * scale  # flip: world y grows up

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" '
        f'height="{height:.0f}" viewBox="0 0 {width:.2f} {height:.2f}">',
        f'<rect width="{width:.2f}" height="{height:.2f}" fill="white"/>',
    ]
    labels = []
    for step in construction.steps:
        obj = fig.objects[step.name]
        if isinstance(obj, Line):
            seg = _clip_line(obj, (xmin, xmax, ymin, ymax))
            if seg is None:
                continue
            (x1, y1), (x2, y2) = seg
            parts.append(
                f'<line x1="{sx(x1):.2f}" y1="{sy(y1):.2f}" x2="{sx(x2):.2f}" '
                f'y2="{sy(y2):.2f}" stroke="#336" stroke-width="1.5"/>'
            )
        elif isinstance(obj, Circle):
            parts.append(
                f'<circle cx="{sx(obj.center.x):.2f}" cy="{sy(obj.center.y):.2f}" '
                f'r="{obj.radius * scale:.2f}" fill="none" stroke="#363" stroke-width="1.5"/>'
            )
        else:
            m = POINT_MARKER
            parts.append(
                f'<rect x="{sx(obj.x) - m / 2:.2f}" y="{sy(obj.y) - m / 2:.2f}" '
                f'width="{m}" height="{m}" fill="#a33"/>'
            )
            labels.append(
                f'<text x="{sx(obj.x) + 5:.2f}" y="{sy(obj.y) - 5:.2f}" '
                f'font-size="14" font-family="sans-serif">{step.name}</text>'
            )
    parts.extend(labels)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
