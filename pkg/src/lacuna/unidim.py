"""Unidimensional factors via projection to univariate factorization.

A polynomial whose support lies on a single line of direction d is, up to a
monomial, a univariate polynomial evaluated at the monomial X^d.  Factoring
such polynomials therefore reduces to univariate factorization: split the
input into its maximal d-collinear components, project each to a univariate
polynomial, intersect the degree-bounded factor lists of the projections
(multiplicities combine as the min), and lift the survivors back.

The univariate step is behind the UnivariateFactorEngine protocol.  The
default engine densifies small-span projections and factors them exactly;
for huge-span projections it can still answer degree-1 queries through
rational-root screening (exact at the points +/-1, Monte Carlo elsewhere),
and refuses anything it cannot certify by raising EngineLimitation rather
than returning an incomplete list.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Protocol, Sequence

import sympy

from .core import (
    ExponentVector,
    LacunaryPoly,
    canonical_associate,
    mval,
    normalize_mval,
    partial_derivative,
)
from .dense import (
    DEFAULT_DENSE_GUARD,
    DensePoly,
    _frac_mod,
    _random_prime,
    factor_univariate,
)
from .errors import (
    DirectionMismatch,
    EngineLimitation,
    MonomialInput,
    NotLiftable,
    NotUnidimensional,
    ZeroPolynomial,
)
from .geometry import Direction, DirectionSet, delta1, delta3, line_partition


@dataclass(frozen=True)
class UnidimDecomposition:
    """Maximal summands that are d-collinear (or single monomials)."""

    direction: Direction
    components: tuple[LacunaryPoly, ...]


@dataclass(frozen=True)
class Projection:
    """Univariate shadow of a d-collinear polynomial.

    poly has valuation 0; the original is X^anchor * poly(X^d).
    """

    poly: LacunaryPoly
    anchor: ExponentVector


@dataclass(frozen=True)
class FactorWithMultiplicity:
    factor: LacunaryPoly
    multiplicity: int
    kind: str  # "monomial" | "unidimensional" | "multidimensional"


def components(f: LacunaryPoly, d: Direction) -> UnidimDecomposition:
    """Group the terms of f by the line of direction d through each."""
    if f.is_zero():
        raise ZeroPolynomial("the zero polynomial has no components")
    groups = line_partition(f.support(), d)
    by_exp = {e: c for c, e in f.terms}
    polys = tuple(
        LacunaryPoly(f.n, tuple((by_exp[e], e) for e in grp)) for grp in groups
    )
    return UnidimDecomposition(d, polys)


def project(f: LacunaryPoly, d: Direction) -> Projection:
    """The valuation-0 univariate polynomial behind a d-collinear f."""
    if f.is_zero():
        raise ZeroPolynomial("cannot project the zero polynomial")
    sup = f.support()
    if len(sup) < 2:
        raise NotUnidimensional("a monomial has no univariate projection")
    dd = d.coords
    pivot = next(i for i, x in enumerate(dd) if x)
    base = sup[0]
    steps = []
    for e in sup:
        diff = tuple(a - b for a, b in zip(e, base))
        lam, rem = divmod(diff[pivot], dd[pivot])
        if rem or any(x != lam * y for x, y in zip(diff, dd)):
            raise _projection_failure(sup, d)
        steps.append(lam)
    low = min(steps)
    anchor = tuple(a + low * x for a, x in zip(base, dd))
    terms = [(c, (lam - low,)) for (c, _), lam in zip(f.terms, steps)]
    return Projection(LacunaryPoly.from_terms(1, terms), anchor)


def _projection_failure(sup, d: Direction) -> Exception:
    """DirectionMismatch for collinear-but-rotated supports, else
    NotUnidimensional."""
    from .geometry import normalize_direction

    base = sup[0]
    diffs = [tuple(a - b for a, b in zip(e, base)) for e in sup[1:]]
    axes = {normalize_direction(x) for x in diffs if any(x)}
    if len(axes) == 1:
        actual = next(iter(axes))
        return DirectionMismatch(
            f"support is collinear along {actual.coords}, not {d.coords}"
        )
    return NotUnidimensional("support points do not lie on one line")


def lift(g: LacunaryPoly, d: Direction) -> LacunaryPoly:
    """The d-collinear polynomial of multivaluation 0 projecting to g."""
    if g.n != 1:
        raise NotLiftable("only univariate polynomials lift")
    if len(g.terms) < 2:
        raise NotLiftable("constants and monomials have no unidimensional lifting")
    if mval(g)[0] != 0:
        raise NotLiftable("the projection must have valuation 0")
    dd = d.coords
    raw = [(c, tuple(e[0] * x for x in dd)) for c, e in g.terms]
    shift = tuple(-min(e[i] for _, e in raw) for i in range(len(dd)))
    return LacunaryPoly.from_terms(
        len(dd), ((c, tuple(a + s for a, s in zip(e, shift))) for c, e in raw)
    )


def projection_degree_bound(bounds: Sequence[int], d: Direction) -> int | None:
    """Largest projection degree a multidegree-bounded factor of direction d
    can have: floor(min over nonzero coordinates of bounds_i / |d_i|)."""
    caps = [b // abs(x) for b, x in zip(bounds, d.coords) if x]
    cap = min(caps)
    return cap if cap >= 1 else None


# ---------------------------------------------------------------------------
# the pluggable univariate engine


class UnivariateFactorEngine(Protocol):
    """Degree-bounded irreducible factors of univariate lacunary inputs."""

    def bounded_factors(
        self, f: LacunaryPoly, degree_cap: int
    ) -> tuple[tuple[LacunaryPoly, int], ...]:
        """All irreducible factors of degree <= degree_cap with their
        multiplicities, as primitive positive-lead univariate polynomials.
        Must raise EngineLimitation rather than return an incomplete list."""
        ...


class DenseFactorEngine:
    """Default engine: densify when the span fits, else screen linear factors.

    Degree-1 queries on huge-span inputs go through the rational root
    theorem: candidate roots come from the divisors of the trailing and
    leading integer coefficients, each tested exactly at +/-1 and by
    modular evaluation elsewhere.  Higher-degree queries on huge spans
    raise EngineLimitation (a genuinely lacunary univariate factorizer is
    an extension point, not provided).
    """

    def __init__(
        self,
        dense_guard: int = DEFAULT_DENSE_GUARD,
        seed: int = 0,
        trials: int = 6,
        divisor_limit: int = 10**12,
    ):
        self.dense_guard = dense_guard
        self.seed = seed
        self.trials = trials
        self.divisor_limit = divisor_limit

    def bounded_factors(self, f: LacunaryPoly, degree_cap: int):
        if f.n != 1:
            raise ValueError("the engine factors univariate polynomials")
        if f.is_zero():
            raise ZeroPolynomial("cannot factor the zero polynomial")
        if degree_cap < 1:
            return ()
        g, _ = normalize_mval(f)
        if g.is_constant():
            return ()
        span = g.terms[0][1][0]
        if span + 1 <= self.dense_guard:
            dense = DensePoly.from_terms(1, g.terms, self.dense_guard)
            fl = factor_univariate(dense, degree_cap)
            return tuple(
                (fac.to_lacunary(), m)
                for fac, m in fl.factors
                if fac.shape[0] <= degree_cap
            )
        if degree_cap == 1:
            return self._linear_factors(g)
        raise EngineLimitation(
            f"projection span {span} exceeds the dense guard and the degree cap "
            f"{degree_cap} is beyond rational-root screening",
            instance=g,
        )

    # -- huge-span linear screening

    def _linear_factors(self, g: LacunaryPoly):
        scale = lcm(*(c.denominator for c, _ in g.terms))
        coeffs = {e[0]: int(c * scale) for c, e in g.terms}
        trailing = coeffs[0]
        leading = coeffs[max(coeffs)]
        if abs(trailing) > self.divisor_limit or abs(leading) > self.divisor_limit:
            raise EngineLimitation(
                "edge coefficients too large to enumerate rational root candidates",
                instance=g,
            )
        rng = random.Random(self.seed)
        out = []
        for p in sympy.divisors(abs(trailing)):
            for q in sympy.divisors(abs(leading)):
                if sympy.gcd(p, q) != 1:
                    continue
                for r in (Fraction(p, q), Fraction(-p, q)):
                    m = self._root_multiplicity(g, r, rng)
                    if m:
                        factor = LacunaryPoly.from_terms(
                            1, [(r.denominator, (1,)), (-r.numerator, (0,))]
                        )
                        factor, _ = canonical_associate(factor)
                        out.append((factor, m))
        out.sort(key=lambda fm: fm[0].terms)
        return tuple(out)

    def _root_multiplicity(self, g: LacunaryPoly, r: Fraction, rng: random.Random) -> int:
        m = 0
        cur = g
        while m <= 64 and not cur.is_zero() and self._is_root(cur, r, rng):
            m += 1
            cur = partial_derivative(cur, 1)
        return m

    def _is_root(self, g: LacunaryPoly, r: Fraction, rng: random.Random) -> bool:
        if abs(r.numerator) == 1 and r.denominator == 1:
            total = Fraction(0)
            for c, e in g.terms:
                total += c if (r > 0 or e[0] % 2 == 0) else -c
            return total == 0
        avoid = {c.denominator for c, _ in g.terms} | {r.denominator, abs(r.numerator)}
        for _ in range(self.trials):
            p = _random_prime(rng, avoid)
            point = r.numerator * pow(r.denominator, -1, p) % p
            total = 0
            for c, e in g.terms:
                # point is nonzero mod p, so Fermat reduction is always valid
                total = (total + _frac_mod(c, p) * pow(point, e[0] % (p - 1), p)) % p
            if total:
                return False
        return True


# ---------------------------------------------------------------------------
# the reduction itself


def unidimensional_factors(
    f: LacunaryPoly,
    bounds: Sequence[int],
    engine: UnivariateFactorEngine | None = None,
    screen: int = 1,
) -> tuple[FactorWithMultiplicity, ...]:
    """All unidimensional factors of f within per-variable degree bounds.

    Directions are screened (no-singleton line partitions by default,
    screen=3 for the raw pairwise set), each direction's components are
    projected, the engine's bounded factor lists are intersected with min
    multiplicities, and the common factors are lifted back.
    """
    if f.is_zero():
        raise ZeroPolynomial("the zero polynomial has no factors")
    if f.is_monomial():
        raise MonomialInput("monomials have no unidimensional factors")
    bounds = tuple(int(b) for b in bounds)
    if len(bounds) != f.n:
        raise ValueError(f"expected {f.n} degree bounds, got {len(bounds)}")
    if engine is None:
        engine = DenseFactorEngine()
    if screen == 1:
        directions = delta1(f).sorted_members()
    elif screen == 3:
        directions = delta3(f).sorted_members()
    else:
        raise ValueError("screen must be 1 or 3")

    found: list[FactorWithMultiplicity] = []
    for d in directions:
        cap = projection_degree_bound(bounds, d)
        if cap is None:
            continue
        decomp = components(f, d)
        if any(len(c.terms) == 1 for c in decomp.components):
            continue  # a monomial component kills every common factor
        common: dict[LacunaryPoly, int] | None = None
        for comp in decomp.components:
            flist = dict(engine.bounded_factors(project(comp, d).poly, cap))
            if common is None:
                common = flist
            else:
                common = {
                    g: min(m, flist[g]) for g, m in common.items() if g in flist
                }
            if not common:
                break
        for g, m in (common or {}).items():
            lifted, _ = canonical_associate(lift(g, d))
            found.append(FactorWithMultiplicity(lifted, m, "unidimensional"))
    found.sort(key=lambda fm: (fm.factor.terms, fm.multiplicity))
    return tuple(found)
