"""Gap-driven partitions of sparse polynomials.

The key fact: if the terms of a bivariate polynomial, sorted by the weight
alpha + v*beta, jump by more than a window gamma that depends only on the
degree caps and the number of terms seen so far, then the polynomial splits
across the jump without losing any bounded-degree factor with a root of
valuation v — multiplicities combine as the min over the summands.  The
partition routines below exploit that to cut huge-exponent inputs into
summands whose exponent spans are polynomial in the caps and term count.

All weight comparisons are exact: with v = p/q the weight alpha + v*beta is
compared through the integer alpha*q + beta*p, so no rationals (let alone
floats) enter the inner loops.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .core import LacunaryPoly, mdeg, normalize_mval
from .errors import (
    BadIndex,
    EqualValuations,
    MonomialInput,
    ParallelDirections,
    UnsupportedArity,
    ZeroPolynomial,
)
from .geometry import (
    Direction,
    Valuation,
    edge_valuations,
    has_vertical_edge,
)

#: Sentinel for the second bipartition pass that splits on the raw
#: y-exponents (the swapped-variable, valuation-0 pass).
VERTICAL = "VERTICAL"


@dataclass(frozen=True)
class GapParams:
    """Bidegree caps (d_x, d_y) for the factors being searched."""

    d_x: int
    d_y: int

    def __post_init__(self):
        if self.d_x < 1 or self.d_y < 1:
            raise ValueError(f"degree caps must be >= 1, got ({self.d_x}, {self.d_y})")


@dataclass(frozen=True)
class PartitionResult:
    """Disjoint summands adding up to the input, with pass provenance."""

    summands: tuple[LacunaryPoly, ...]
    provenance: str

    def normalized_summands(self) -> tuple[LacunaryPoly, ...]:
        """Each summand divided by its largest monomial divisor."""
        return tuple(normalize_mval(s)[0] for s in self.summands)

    def __len__(self) -> int:
        return len(self.summands)


def gamma(ell: int, p: GapParams) -> int:
    """Window width 4*d_x*d_y*(ell-1)^2 for a block of ell terms."""
    if ell < 1:
        raise ValueError(f"block size must be >= 1, got {ell}")
    return 4 * p.d_x * p.d_y * (ell - 1) ** 2

def gamma_v(ell: int, p: GapParams, v) -> Fraction:
    """Valuation-refined window; never exceeds gamma for |v| <= d_x.

    Diagnostic only: the partitions all use the simpler gamma.
    """
    if ell < 1:
        raise ValueError(f"block size must be >= 1, got {ell}")
    v = Fraction(v)
    return Fraction(gamma(ell, p)) - Fraction(ell - 1, 2) * ((3 * ell - 4) * p.d_x + v * ell)


def _scaled_weights(f: LacunaryPoly, v: Fraction) -> tuple[list[int], int]:
    """Integer weights alpha*q + beta*p for v = p/q, plus the scale q."""
    p, q = v.numerator, v.denominator
    return [e[0] * q + e[1] * p for _, e in f.terms], q


def no_gap(f: LacunaryPoly, p: GapParams, v) -> bool:
    """True when the sorted weights stay inside the growing gamma window."""
    if f.is_zero():
        raise ZeroPolynomial("no-gap test needs a nonzero polynomial")
    v = Fraction(v)
    w, scale = _scaled_weights(f, v)
    w.sort()
    return all(w[i] - w[0] <= gamma(i, p) * scale for i in range(1, len(w)))


def _partition_by_weights(
    f: LacunaryPoly, p: GapParams, weights: Sequence[int], scale: int, provenance: str
) -> PartitionResult:
    """Greedy left-to-right blocking of the terms by non-decreasing weight.

    A new block starts at position l as soon as the weight jumps more than
    gamma(l - j_m) above the block's first weight; every term lands in
    exactly one summand and each summand has no gap for this weight.
    """
    k = len(f.terms)
    order = sorted(range(k), key=weights.__getitem__)
    blocks: list[list[int]] = []
    jm = 0
    for l in range(1, k):
        if weights[order[l]] - weights[order[jm]] > gamma(l - jm, p) * scale:
            blocks.append(order[jm:l])
            jm = l
    blocks.append(order[jm:])
    summands = tuple(
        LacunaryPoly(f.n, tuple(f.terms[j] for j in sorted(idxs, key=lambda t: f.terms[t][1], reverse=True)))
        for idxs in blocks
    )
    return PartitionResult(summands, provenance)


def partition(f: LacunaryPoly, p: GapParams, v) -> PartitionResult:
    """Split f across gaps of the weight alpha + v*beta."""
    if f.is_zero():
        raise ZeroPolynomial("cannot partition the zero polynomial")
    if f.n != 2:
        raise UnsupportedArity("valuation partitions are defined for n=2")
    v = Fraction(v)
    weights, scale = _scaled_weights(f, v)
    return _partition_by_weights(f, p, weights, scale, f"v={v}")


def _vertical_partition(f: LacunaryPoly, p: GapParams) -> PartitionResult:
    """Split f across gaps of the raw y-exponent (the vertical pass)."""
    weights = [e[1] for _, e in f.terms]
    return _partition_by_weights(f, p, weights, 1, "vertical")


def bipartition(f: LacunaryPoly, p: GapParams, v1, v2) -> PartitionResult:
    """Alternate two partition passes until no summand splits further.

    The second pass is either a second valuation (v2 a rational, != v1) or
    VERTICAL, which splits on the y-exponents alone.
    """
    if f.is_zero():
        raise ZeroPolynomial("cannot partition the zero polynomial")
    if f.n != 2:
        raise UnsupportedArity("bipartition is defined for n=2")
    v1 = Fraction(v1)
    if v2 is VERTICAL or (isinstance(v2, str) and v2 == VERTICAL):
        second = lambda h: _vertical_partition(h, p)
        tag = f"v1={v1} x vertical"
    else:
        v2 = Fraction(v2)
        if v1 == v2:
            raise EqualValuations(f"bipartition needs two distinct valuations, got {v1} twice")
        second = lambda h: partition(h, p, v2)
        tag = f"v1={v1} x v2={v2}"
    items: list[LacunaryPoly] = [f]
    while True:
        nxt: list[LacunaryPoly] = []
        for h in items:
            for h1 in partition(h, p, v1).summands:
                nxt.extend(second(h1).summands)
        if len(nxt) == len(items):
            return PartitionResult(tuple(nxt), tag)
        items = nxt


def boundsval(p1: Direction, p2: Direction, params: GapParams) -> tuple[Fraction, Fraction]:
    """Diagnostic bounds 1/|v1-v2| and (|v1|+|v2|)/|v1-v2| for two edges.

    When the directions could come from the lower hull of a polygon within
    the caps (|p| <= d_x, |q1|+|q2| <= d_y), the returned values are at most
    d_y^2/4 and d_x*d_y respectively; that is asserted here.
    """
    (a1, q1), (a2, q2) = p1.coords, p2.coords
    if q1 == 0 or q2 == 0:
        raise ParallelDirections("directions must have nonzero second coordinate")
    v1, v2 = Fraction(-a1, q1), Fraction(-a2, q2)
    if v1 == v2:
        raise ParallelDirections(f"parallel directions {p1.coords} and {p2.coords}")
    sep = Fraction(1) / abs(v1 - v2)
    ratio = (abs(v1) + abs(v2)) / abs(v1 - v2)
    if abs(a1) <= params.d_x and abs(a2) <= params.d_x and abs(q1) + abs(q2) <= params.d_y:
        assert sep <= Fraction(params.d_y**2, 4)
        assert ratio <= params.d_x * params.d_y
    return sep, ratio


# ---------------------------------------------------------------------------
# the bivariate reduction


def _mapped(f: LacunaryPoly, fn) -> LacunaryPoly:
    return LacunaryPoly.from_terms(f.n, ((c, fn(e)) for c, e in f.terms))


def _pull_back(result: PartitionResult, fn, tag: str) -> PartitionResult:
    """Re-express a partition of a transformed polynomial on the original."""
    return PartitionResult(tuple(_mapped(s, fn) for s in result.summands), tag)


def _filtered_lower_valuations(f: LacunaryPoly, p: GapParams) -> tuple[Valuation, ...]:
    out = []
    for val in edge_valuations(f, "lower"):
        a, q = val.source_direction.coords
        if a <= p.d_x and abs(q) <= p.d_y:
            out.append(val)
    return tuple(out)


def reduce_bivariate(f: LacunaryPoly, p: GapParams) -> tuple[PartitionResult, ...]:
    """All gap partitions needed to trap bidegree-bounded 2-D factors.

    One result per pass, each a partition of f itself:

      (a) one bipartition per unordered pair of distinct filtered lower-hull
          valuations of f;
      (b) the same with the x-exponents reflected, covering factors whose
          non-parallel edges sit in the upper hull;
      (c) valuation x vertical passes on f, reaching factors with one lower
          and one vertical (or upper) edge, e.g. triangles;
      (d) the same as (c) on the x-reflected polynomial;
      (e) the same as (c) on the variable-swapped polynomial, with swapped
          caps.

    Every candidate factor later extracted from the summands gets verified
    against the input, so extra passes are harmless; missing ones are not.
    """
    if f.is_zero():
        raise ZeroPolynomial("cannot reduce the zero polynomial")
    if f.is_monomial():
        raise MonomialInput("monomials have no multidimensional factors")
    if f.n != 2:
        raise UnsupportedArity("the bivariate reduction needs n=2")

    results: list[PartitionResult] = []

    top_x = mdeg(f)[0]
    reflect = lambda e: (top_x - e[0], e[1])
    swap = lambda e: (e[1], e[0])
    fx = _mapped(f, reflect)
    fsw = _mapped(f, swap)
    p_sw = GapParams(p.d_y, p.d_x)

    vals = _filtered_lower_valuations(f, p)
    vals_x = _filtered_lower_valuations(fx, p)
    vals_sw = _filtered_lower_valuations(fsw, p_sw)

    for va, vb in combinations(vals, 2):
        r = bipartition(f, p, va.value, vb.value)
        results.append(PartitionResult(r.summands, f"lower {va.value} x {vb.value}"))

    for va, vb in combinations(vals_x, 2):
        r = bipartition(fx, p, va.value, vb.value)
        results.append(_pull_back(r, reflect, f"x-reflected lower {va.value} x {vb.value}"))

    if has_vertical_edge(f):
        for va in vals:
            r = bipartition(f, p, va.value, VERTICAL)
            results.append(PartitionResult(r.summands, f"lower {va.value} x vertical"))
        for va in vals_x:
            r = bipartition(fx, p, va.value, VERTICAL)
            results.append(_pull_back(r, reflect, f"x-reflected lower {va.value} x vertical"))
    if has_vertical_edge(fsw):
        for va in vals_sw:
            r = bipartition(fsw, p_sw, va.value, VERTICAL)
            results.append(_pull_back(r, swap, f"swapped lower {va.value} x vertical"))

    return tuple(results)


# ---------------------------------------------------------------------------
# the multivariate reduction


def univariate_partition(f: LacunaryPoly, delta: int, i: int) -> PartitionResult:
    """Split between consecutive x_i-exponents that differ by more than delta.

    Every summand with l terms then spans at most (l-1)*delta in x_i.
    """
    if f.is_zero():
        raise ZeroPolynomial("cannot partition the zero polynomial")
    if not 1 <= i <= f.n:
        raise BadIndex(f"variable index {i} outside 1..{f.n}")
    k = len(f.terms)
    exps = [e[i - 1] for _, e in f.terms]
    order = sorted(range(k), key=exps.__getitem__)
    blocks: list[list[int]] = []
    jm = 0
    for l in range(1, k):
        if exps[order[l]] - exps[order[l - 1]] > delta:
            blocks.append(order[jm:l])
            jm = l
    blocks.append(order[jm:])
    summands = tuple(
        LacunaryPoly(f.n, tuple(f.terms[j] for j in sorted(idxs, key=lambda t: f.terms[t][1], reverse=True)))
        for idxs in blocks
    )
    return PartitionResult(summands, f"x{i} gaps > {delta}")


def sweep_delta(k: int, caps: Sequence[int], i: int) -> int:
    """Split threshold for variable i on a k-term summand.

    Uses the window for the caps pair (max of the other variables, d_i),
    times that same pair, mirroring the bivariate span bound.
    """
    other = max(c for j, c in enumerate(caps, start=1) if j != i)
    return gamma(k, GapParams(other, caps[i - 1])) * caps[i - 1] * other


def multivariate_partition(f: LacunaryPoly, caps: Sequence[int]) -> PartitionResult:
    """Sweep gap splits over every variable until nothing moves.

    For every multidimensional g of multidegree at most `caps`, the
    multiplicity of g in f equals the minimum of its multiplicities in the
    summands, and each summand spans at most k*delta_i in variable i.
    """
    if f.is_zero():
        raise ZeroPolynomial("cannot partition the zero polynomial")
    if f.is_monomial():
        raise MonomialInput("monomials have no multidimensional factors")
    n = f.n
    if n < 2:
        raise UnsupportedArity("the multivariate reduction needs n >= 2")
    caps = tuple(int(c) for c in caps)
    if len(caps) != n:
        raise BadIndex(f"expected {n} degree caps, got {len(caps)}")
    if any(c < 1 for c in caps):
        raise ValueError(f"degree caps must be >= 1, got {caps}")
    items: list[LacunaryPoly] = [f]
    while True:
        before = len(items)
        for i in range(1, n + 1):
            nxt: list[LacunaryPoly] = []
            for h in items:
                nxt.extend(univariate_partition(h, sweep_delta(len(h.terms), caps, i), i).summands)
            items = nxt
        if len(items) == before:
            return PartitionResult(tuple(items), f"multivariate caps={caps}")
