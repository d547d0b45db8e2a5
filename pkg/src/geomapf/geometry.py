"""Exact 2D collision primitives for disc agents on straight-line edges.

All obstacles are axis-aligned rectangles. Everything here is a pure
function over immutable tuples, so it is safe to call from any worker.
Comparisons against the radius are strict >= with no epsilon inflation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple

Point2 = Tuple[float, float]
Rect = Tuple[float, float, float, float]  # (xmin, ymin, xmax, ymax)


@dataclass(frozen=True)
class Segment2:
    """Directed segment a -> b; a == b models a wait edge."""

    a: Point2
    b: Point2


def point_rect_distance(p: Point2, rect: Rect) -> float:
    """Euclidean distance from p to the closed rectangle (0 if inside)."""
    xmin, ymin, xmax, ymax = rect
    dx = max(xmin - p[0], 0.0, p[0] - xmax)
    dy = max(ymin - p[1], 0.0, p[1] - ymax)
    return math.hypot(dx, dy)


def point_segment_distance(p: Point2, seg: Segment2) -> float:
    ax, ay = seg.a
    bx, by = seg.b
    dx, dy = bx - ax, by - ay
    l2 = dx * dx + dy * dy
    if l2 == 0.0:
        return math.hypot(p[0] - ax, p[1] - ay)
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / l2
    t = min(1.0, max(0.0, t))
    return math.hypot(p[0] - (ax + t * dx), p[1] - (ay + t * dy))


def segment_segment_distance(s1: Segment2, s2: Segment2) -> float:
    """Minimum distance between two segments (degenerate allowed).

    Closest-point parameterization with clamping; returns 0 when the
    segments intersect, including collinear overlap. Arguments are
    canonically ordered first so the result is exactly symmetric.
    """
    if (s2.a, s2.b) < (s1.a, s1.b):
        s1, s2 = s2, s1
    p1x, p1y = s1.a
    q1x, q1y = s1.b
    p2x, p2y = s2.a
    q2x, q2y = s2.b
    d1x, d1y = q1x - p1x, q1y - p1y
    d2x, d2y = q2x - p2x, q2y - p2y
    rx, ry = p1x - p2x, p1y - p2y
    a = d1x * d1x + d1y * d1y
    e = d2x * d2x + d2y * d2y
    f = d2x * rx + d2y * ry

    if a == 0.0 and e == 0.0:
        return math.hypot(rx, ry)
    if a == 0.0:
        s = 0.0
        t = min(1.0, max(0.0, f / e))
    else:
        c = d1x * rx + d1y * ry
        if e == 0.0:
            t = 0.0
            s = min(1.0, max(0.0, -c / a))
        else:
            b = d1x * d2x + d1y * d2y
            denom = a * e - b * b
            if denom != 0.0:
                s = min(1.0, max(0.0, (b * f - c * e) / denom))
            else:
                s = 0.0
            t = (b * s + f) / e
            if t < 0.0:
                t = 0.0
                s = min(1.0, max(0.0, -c / a))
            elif t > 1.0:
                t = 1.0
                s = min(1.0, max(0.0, (b - c) / a))
    c1x = p1x + d1x * s
    c1y = p1y + d1y * s
    c2x = p2x + d2x * t
    c2y = p2y + d2y * t
    return math.hypot(c1x - c2x, c1y - c2y)


def _point_in_rect(p: Point2, rect: Rect) -> bool:
    xmin, ymin, xmax, ymax = rect
    return xmin <= p[0] <= xmax and ymin <= p[1] <= ymax


def _rect_edges(rect: Rect) -> Iterable[Segment2]:
    xmin, ymin, xmax, ymax = rect
    yield Segment2((xmin, ymin), (xmax, ymin))
    yield Segment2((xmax, ymin), (xmax, ymax))
    yield Segment2((xmax, ymax), (xmin, ymax))
    yield Segment2((xmin, ymax), (xmin, ymin))


def segment_rect_distance(seg: Segment2, rect: Rect) -> float:
    """Minimum distance between a segment and a closed rectangle."""
    if _point_in_rect(seg.a, rect) or _point_in_rect(seg.b, rect):
        return 0.0
    # Endpoints are outside, so any penetration crosses the boundary.
    return min(segment_segment_distance(seg, edge) for edge in _rect_edges(rect))


def vertex_free(p: Point2, rects: Sequence[Rect], r: float) -> bool:
    """Disc of radius r centered at p does not touch any obstacle."""
    return all(point_rect_distance(p, rect) >= r for rect in rects)


def edge_free(seg: Segment2, rects: Sequence[Rect], r: float) -> bool:
    """Swept disc of radius r along seg stays clear of all obstacles."""
    return all(segment_rect_distance(seg, rect) >= r for rect in rects)


def swept_discs_disjoint(e1: Segment2, e2: Segment2, r: float) -> bool:
    """Exact disjointness test for two radius-r swept discs."""
    return segment_segment_distance(e1, e2) >= 2.0 * r
