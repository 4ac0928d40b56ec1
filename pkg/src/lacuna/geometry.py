"""Support geometry: directions, 2-D Newton polygons, line partitions.

Everything here runs on exact integers.  The planar conventions put the
Y-exponents on the first plot axis and the X-exponents on the second, so
"lower" edges are the ones visible from below along the X-exponent axis;
a counter-clockwise walk of the polygon crosses a lower edge with the
Y-exponent increasing, an upper edge with it decreasing, and a vertical
edge with it constant.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Iterator, Sequence

from .core import ExponentVector, LacunaryPoly
from .errors import (
    TooFewTerms,
    UnsupportedArity,
    ZeroPolynomial,
    ZeroVector,
)

LOWER = "lower"
UPPER = "upper"
VERTICAL_EDGE = "vertical"


@dataclass(frozen=True, order=True)
class Direction:
    """Normalized integer vector: first nonzero coordinate positive, gcd 1."""

    coords: tuple[int, ...]

    def __str__(self) -> str:
        return ",".join(str(c) for c in self.coords)


def normalize_direction(v: Sequence[int]) -> Direction:
    """The unique normalized vector collinear with v."""
    v = tuple(int(x) for x in v)
    if not any(v):
        raise ZeroVector("cannot normalize the zero vector")
    g = reduce(gcd, (abs(x) for x in v))
    v = tuple(x // g for x in v)
    first = next(x for x in v if x)
    if first < 0:
        v = tuple(-x for x in v)
    return Direction(v)


@dataclass(frozen=True)
class DirectionSet:
    """A screening set of candidate factor directions (kind 1, 2 or 3)."""

    kind: int
    members: frozenset[Direction]

    def sorted_members(self) -> tuple[Direction, ...]:
        return tuple(sorted(self.members))

    def __contains__(self, d: Direction) -> bool:
        return d in self.members

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class Valuation:
    """Exact rational -p/q attached to a hull edge of direction (p, q)."""

    value: Fraction
    source_direction: Direction


@dataclass(frozen=True)
class Polygon2D:
    """Convex hull of a planar support, with classified edges.

    Vertices are exponent pairs (x-exponent, y-exponent) ordered counter-
    clockwise with respect to the plot plane.  A single point has no edges;
    a degenerate segment has exactly one edge.
    """

    vertices: tuple[tuple[int, int], ...]
    edge_classes: tuple[str, ...]

    def edges(self) -> Iterator[tuple[tuple[int, int], tuple[int, int], str]]:
        m = len(self.vertices)
        if m <= 1:
            return
        if m == 2:
            yield self.vertices[0], self.vertices[1], self.edge_classes[0]
            return
        for i in range(m):
            yield self.vertices[i], self.vertices[(i + 1) % m], self.edge_classes[i]

    def edges_of_class(self, cls: str) -> tuple[tuple[tuple[int, int], tuple[int, int]], ...]:
        return tuple((a, b) for a, b, c in self.edges() if c == cls)


def line_partition(
    points: Iterable[ExponentVector], d: Direction
) -> tuple[tuple[ExponentVector, ...], ...]:
    """Group points by the line of direction d through each of them.

    The grouping key is the integer vector |d|^2*a - (a.d)*d, an exact
    scaled projection onto the hyperplane orthogonal to d; two points get
    the same key exactly when their difference is a multiple of d.
    """
    dd = d.coords
    norm2 = sum(x * x for x in dd)
    groups: dict[tuple[int, ...], list[ExponentVector]] = {}
    for a in points:
        dot = sum(x * y for x, y in zip(a, dd))
        key = tuple(norm2 * x - dot * y for x, y in zip(a, dd))
        groups.setdefault(key, []).append(a)
    out = [tuple(sorted(g, reverse=True)) for g in groups.values()]
    out.sort(key=lambda g: g[0], reverse=True)
    return tuple(out)


def _support_or_raise(f: LacunaryPoly, need: int = 2) -> tuple[ExponentVector, ...]:
    if f.is_zero():
        raise ZeroPolynomial("zero polynomial has no support geometry")
    sup = f.support()
    if len(sup) < need:
        raise TooFewTerms(f"need at least {need} terms, got {len(sup)}")
    return sup


def delta3(f: LacunaryPoly) -> DirectionSet:
    """Directions of all pairwise differences of support points."""
    sup = _support_or_raise(f)
    members = set()
    for i in range(len(sup)):
        for j in range(i + 1, len(sup)):
            diff = tuple(a - b for a, b in zip(sup[i], sup[j]))
            members.add(normalize_direction(diff))
    return DirectionSet(3, frozenset(members))


def _partitions_without_singletons(points: Sequence[ExponentVector], d: Direction) -> bool:
    return all(len(g) >= 2 for g in line_partition(points, d))


def _planar_delta1(points: Sequence[tuple[int, int]]) -> frozenset[Direction]:
    """2-D candidates whose line partition of `points` has no singleton."""
    cands = set()
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            diff = (points[i][0] - points[j][0], points[i][1] - points[j][1])
            cands.add(normalize_direction(diff))
    return frozenset(d for d in cands if _partitions_without_singletons(points, d))


def delta1(f: LacunaryPoly) -> DirectionSet:
    """Directions along which the support splits into parallel segments,
    each containing at least two support points.

    For n > 2 the candidates are pre-screened against the two-variable
    projections of the support before the final no-singleton test.
    """
    sup = _support_or_raise(f)
    n = f.n
    cands = sorted(delta3(f).members)
    if n > 2:
        plane_sets: dict[tuple[int, int], frozenset[Direction]] = {}
        for i in range(n):
            for j in range(i + 1, n):
                pts = sorted({(e[i], e[j]) for e in sup})
                plane_sets[(i, j)] = _planar_delta1(pts) if len(pts) >= 2 else frozenset()

        def plane_ok(d: Direction) -> bool:
            for (i, j), allowed in plane_sets.items():
                pair = (d.coords[i], d.coords[j])
                if pair == (0, 0):
                    continue
                if normalize_direction(pair) not in allowed:
                    return False
            return True

        cands = [d for d in cands if plane_ok(d)]
    members = frozenset(d for d in cands if _partitions_without_singletons(sup, d))
    return DirectionSet(1, members)


def delta1_by_filtering(f: LacunaryPoly) -> DirectionSet:
    """Reference variant: filter the pairwise-difference candidates directly."""
    sup = _support_or_raise(f)
    members = frozenset(
        d for d in delta3(f).members if _partitions_without_singletons(sup, d)
    )
    return DirectionSet(1, members)


# ---------------------------------------------------------------------------
# planar hulls


def _cross(o: tuple[int, int], a: tuple[int, int], b: tuple[int, int]) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull_ccw(points: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Andrew's monotone chain; returns strictly convex CCW vertices."""
    pts = sorted(set(points))
    if len(pts) == 1:
        return pts
    lower: list[tuple[int, int]] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[int, int]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 0:  # all points collinear: chains collapse to endpoints
        hull = [pts[0], pts[-1]]
    return hull


def hull2d(f: LacunaryPoly, vars: tuple[int, int] = (1, 2)) -> Polygon2D:
    """Newton polygon of f seen through two of its variables.

    The support is projected onto the chosen coordinate pair (1-based);
    for a genuinely bivariate polynomial this is its Newton polygon.
    """
    if f.is_zero():
        raise ZeroPolynomial("zero polynomial has no Newton polygon")
    i, j = vars[0] - 1, vars[1] - 1
    # plot coordinates: (y-exponent, x-exponent)
    plot = [(e[j], e[i]) for e in f.support()]
    hull = _hull_ccw(plot)
    vertices = tuple((v, u) for u, v in hull)
    m = len(vertices)
    if m == 1:
        return Polygon2D(vertices, ())
    if m == 2:
        du = hull[1][0] - hull[0][0]
        cls = VERTICAL_EDGE if du == 0 else LOWER
        return Polygon2D(vertices, (cls,))
    classes = []
    for t in range(m):
        du = hull[(t + 1) % m][0] - hull[t][0]
        classes.append(LOWER if du > 0 else UPPER if du < 0 else VERTICAL_EDGE)
    return Polygon2D(vertices, tuple(classes))


def _edge_direction(a: tuple[int, int], b: tuple[int, int]) -> Direction:
    return normalize_direction((a[0] - b[0], a[1] - b[1]))


def delta2_bivariate(f: LacunaryPoly) -> DirectionSet:
    """Directions carried by two distinct parallel edges of the polygon."""
    if f.n != 2:
        raise UnsupportedArity("parallel-edge screening is implemented for n=2 only")
    _support_or_raise(f)
    poly = hull2d(f)
    counts: dict[Direction, int] = {}
    for a, b, _ in poly.edges():
        d = _edge_direction(a, b)
        counts[d] = counts.get(d, 0) + 1
    return DirectionSet(2, frozenset(d for d, c in counts.items() if c >= 2))


def edge_valuations(f: LacunaryPoly, part: str = LOWER) -> tuple[Valuation, ...]:
    """Valuations -p/q of the requested hull part's edges, sorted by value.

    Edges whose direction has q = 0 carry no valuation and are skipped;
    those are exactly the vertical edges, handled by their own pass.
    """
    if f.n != 2:
        raise UnsupportedArity("edge valuations are defined for n=2 only")
    if part not in (LOWER, UPPER):
        raise ValueError(f"part must be '{LOWER}' or '{UPPER}'")
    poly = hull2d(f)
    out = []
    for a, b in poly.edges_of_class(part):
        d = _edge_direction(a, b)
        p, q = d.coords
        if q == 0:
            continue
        out.append(Valuation(Fraction(-p, q), d))
    out.sort(key=lambda v: v.value)
    return tuple(out)


def has_vertical_edge(f: LacunaryPoly) -> bool:
    return bool(hull2d(f).edges_of_class(VERTICAL_EDGE))


def newton_dimension(f: LacunaryPoly) -> int:
    """Dimension of the Newton polytope: 0 monomial, 1 segment, >= 2 body.

    Computed as the integer rank of the differences of the support points,
    by fraction-free elimination.
    """
    if f.is_zero():
        raise ZeroPolynomial("zero polynomial has no Newton polytope")
    sup = f.support()
    base = sup[0]
    pivots: list[tuple[int, list[int]]] = []  # (pivot column, row)
    for p in sup[1:]:
        row = [a - b for a, b in zip(p, base)]
        for col, prow in pivots:
            if row[col]:
                factor = row[col]
                row = [prow[col] * x - factor * y for x, y in zip(row, prow)]
        lead = next((idx for idx, x in enumerate(row) if x), None)
        if lead is not None:
            pivots.append((lead, row))
            if len(pivots) == f.n:
                break
    return len(pivots)
