"""Exact dense-polynomial engine over Q and the verification oracles.

DensePoly is the low-degree carrier the reductions feed: construction is
guarded so the per-variable exponent spans always stay small enough for
degree-polynomial algorithms (the guard bounds the product of the spans,
never silently truncating).  Factorization, gcd and squarefree
decomposition are delegated to sympy behind this surface; divisibility and
multiplicity queries are answered by a self-contained exact division, so
the oracle used by the property tests does not share code with the
factorizer it cross-checks.

verify_divisibility / verify_multiplicity are the Monte Carlo gates for
candidates against huge lacunary inputs: sample points on the zero set of
the candidate modulo a random 62-bit prime and evaluate the input there
termwise, reducing exponents modulo p-1.  A nonzero value refutes
divisibility outright; agreement across trials accepts it.  The per-trial
false-accept chance is roughly deg(g)*min(deg f, p-1)/p, so acceptance is
heuristic for genuinely lacunary inputs; whenever the input densifies
under the guard the callers use the exact path instead.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

import sympy

from .core import (
    ExponentVector,
    LacunaryPoly,
    Term,
    canonical_associate,
    mdeg,
    normalize_mval,
    partial_derivative,
)
from .errors import BadModulus, GuardExceeded, ZeroPolynomial

#: Default cap on the number of coefficients a dense instance may hold.
DEFAULT_DENSE_GUARD = 2**22


@dataclass(frozen=True)
class DensePoly:
    """Span-guarded exact polynomial; the target of all reductions.

    `shape` is the exact multidegree; the coefficient table is kept as a
    canonical sorted association so values stay hashable, and the guard on
    the shape product is what makes the instance "dense": every algorithm
    here may freely run in time polynomial in prod(shape).
    """

    n: int
    shape: tuple[int, ...]
    coeffs: tuple[Term, ...]

    @classmethod
    def from_terms(
        cls, n: int, items: Iterable[tuple], guard: int = DEFAULT_DENSE_GUARD
    ) -> "DensePoly":
        f = LacunaryPoly.from_terms(n, items)
        shape = mdeg(f)
        size = 1
        for d in shape:
            size *= d + 1
        if size > guard:
            raise GuardExceeded(
                f"dense shape {shape} holds {size} coefficients (guard {guard})", instance=f
            )
        return cls(n, shape, f.terms)

    def to_lacunary(self) -> LacunaryPoly:
        return LacunaryPoly(self.n, self.coeffs)

    def coeff_map(self) -> dict[ExponentVector, Fraction]:
        return {e: c for c, e in self.coeffs}

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return not self.coeffs or (len(self.coeffs) == 1 and not any(self.coeffs[0][1]))

    def degree_in(self, i: int) -> int:
        return self.shape[i - 1]

    def __str__(self) -> str:
        return str(self.to_lacunary())


@dataclass(frozen=True)
class FactorList:
    """unit * prod(factor^multiplicity) == the factored input, exactly.

    Factors are primitive with positive leading coefficient and pairwise
    non-associate, sorted canonically.
    """

    unit: Fraction
    factors: tuple[tuple[DensePoly, int], ...]

    def expand(self, n: int) -> LacunaryPoly:
        from .core import multiply, power

        out = LacunaryPoly.constant(n, self.unit)
        for g, m in self.factors:
            out = multiply(out, power(g.to_lacunary(), m))
        return out


def densify(
    f: LacunaryPoly, guard: int = DEFAULT_DENSE_GUARD
) -> tuple[DensePoly, ExponentVector]:
    """Normalize the multivaluation away and build the guarded dense carrier.

    Returns (dense form of f / X^mval, mval); the caller keeps the stripped
    monomial.  Raises GuardExceeded when the spans do not fit, which tells
    the caller the reduction has not shrunk this instance enough.
    """
    if f.is_zero():
        raise ZeroPolynomial("cannot densify the zero polynomial")
    g, shift = normalize_mval(f)
    return DensePoly.from_terms(f.n, g.terms, guard), shift


# ---------------------------------------------------------------------------
# exact division (self-contained oracle)


def _leading(terms: dict[ExponentVector, Fraction]) -> ExponentVector:
    return max(terms)


def _divide_exact(
    f: dict[ExponentVector, Fraction], g: dict[ExponentVector, Fraction]
) -> dict[ExponentVector, Fraction] | None:
    """Quotient f/g when the division is exact, else None.

    Classic single-divisor reduction in descending lex order: the leading
    term of an exact multiple is always divisible by the leading term of
    the divisor, so the first failure certifies non-divisibility.
    """
    lg = _leading(g)
    cg = g[lg]
    q: dict[ExponentVector, Fraction] = {}
    r = dict(f)
    while r:
        lr = _leading(r)
        e = tuple(a - b for a, b in zip(lr, lg))
        if any(x < 0 for x in e):
            return None
        c = r[lr] / cg
        q[e] = c
        for eg, cg2 in g.items():
            key = tuple(a + b for a, b in zip(e, eg))
            val = r.get(key, Fraction(0)) - c * cg2
            if val:
                r[key] = val
            else:
                r.pop(key, None)
    return q


def divides_mult(g: DensePoly, f: DensePoly) -> int:
    """Largest m such that g**m divides f, by repeated exact division."""
    if g.is_constant():
        raise ValueError("multiplicity of a constant divisor is undefined")
    if f.is_zero():
        raise ZeroPolynomial("multiplicity in the zero polynomial is undefined")
    if f.n != g.n:
        raise ValueError(f"operands have {g.n} and {f.n} variables")
    gm = g.coeff_map()
    cur = f.coeff_map()
    m = 0
    while True:
        q = _divide_exact(cur, gm)
        if q is None:
            return m
        m += 1
        cur = q


# ---------------------------------------------------------------------------
# sympy bridge


def _gens(n: int):
    return sympy.symbols(f"v1:{n + 1}")


def _to_sympy(p: DensePoly) -> sympy.Poly:
    d = {e: sympy.Rational(c.numerator, c.denominator) for c, e in p.coeffs}
    return sympy.Poly.from_dict(d, *_gens(p.n), domain=sympy.QQ)


def _from_sympy(poly: sympy.Poly, n: int, guard: int) -> DensePoly:
    items = [(Fraction(int(c.p), int(c.q)), e) for e, c in poly.terms()]
    return DensePoly.from_terms(n, items, guard)


def _normalized_factor(p: DensePoly) -> tuple[DensePoly, Fraction]:
    g, unit = canonical_associate(p.to_lacunary())
    return DensePoly(p.n, p.shape, g.terms), unit


def _factor_list_from_sympy(
    f: DensePoly, pairs, unit: Fraction, guard: int
) -> FactorList:
    factors = []
    for poly, m in pairs:
        fac = _from_sympy(poly, f.n, guard)
        fac, u = _normalized_factor(fac)
        unit *= u**m
        factors.append((fac, int(m)))
    factors.sort(key=lambda fm: (fm[0].coeffs, fm[1]))
    return FactorList(unit, tuple(factors))


def factor_univariate(
    f: DensePoly, degree_cap: int | None = None, guard: int = DEFAULT_DENSE_GUARD
) -> FactorList:
    """Complete factorization over Q of a univariate dense polynomial.

    The backend factors completely regardless of degree_cap; the cap is an
    early-exit hint kept for engine compatibility.
    """
    if f.n != 1:
        raise ValueError("factor_univariate needs a univariate input")
    if f.is_constant():
        raise ValueError("cannot factor a constant")
    coeff, pairs = _to_sympy(f).factor_list()
    return _factor_list_from_sympy(f, pairs, Fraction(int(coeff.p), int(coeff.q)), guard)


def factor_bivariate(
    f: DensePoly, caps: tuple[int, int] | None = None, guard: int = DEFAULT_DENSE_GUARD
) -> FactorList:
    """Complete factorization over Q of a bivariate dense polynomial."""
    if f.n != 2:
        raise ValueError("factor_bivariate needs a bivariate input")
    if f.is_constant():
        raise ValueError("cannot factor a constant")
    coeff, pairs = _to_sympy(f).factor_list()
    return _factor_list_from_sympy(f, pairs, Fraction(int(coeff.p), int(coeff.q)), guard)


def squarefree_decompose(f: DensePoly, guard: int = DEFAULT_DENSE_GUARD) -> FactorList:
    """Yun-style decomposition f = unit * prod(s_i^i), s_i squarefree, coprime."""
    if f.is_constant():
        raise ValueError("cannot decompose a constant")
    coeff, pairs = _to_sympy(f).sqf_list()
    return _factor_list_from_sympy(f, pairs, Fraction(int(coeff.p), int(coeff.q)), guard)


def gcd_multivariate(f: DensePoly, g: DensePoly, guard: int = DEFAULT_DENSE_GUARD) -> DensePoly:
    """Primitive gcd with positive leading coefficient."""
    if f.is_zero() and g.is_zero():
        raise ZeroPolynomial("gcd(0, 0) is undefined")
    if f.n != g.n:
        raise ValueError(f"operands have {f.n} and {g.n} variables")
    if f.is_zero() or g.is_zero():
        src = g if f.is_zero() else f
        return _normalized_factor(src)[0]
    h = _to_sympy(f).gcd(_to_sympy(g))
    return _normalized_factor(_from_sympy(h, f.n, guard))[0]


def gcd_many(polys: Sequence[DensePoly], guard: int = DEFAULT_DENSE_GUARD) -> DensePoly:
    """gcd of a nonempty family, folded pairwise."""
    if not polys:
        raise ValueError("gcd of an empty family")
    return reduce(lambda a, b: gcd_multivariate(a, b, guard), polys)


# ---------------------------------------------------------------------------
# modular verification of candidates against lacunary inputs

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _is_prime(m: int) -> bool:
    """Deterministic Miller-Rabin for m < 3.3e24 (covers 64-bit)."""
    if m < 2:
        return False
    for q in _MR_BASES:
        if m % q == 0:
            return m == q
    d, s = m - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, m)
        if x in (1, m - 1):
            continue
        for _ in range(s - 1):
            x = x * x % m
            if x == m - 1:
                break
        else:
            return False
    return True


def _random_prime(rng: random.Random, avoid: set[int]) -> int:
    while True:
        c = rng.randrange(2**61, 2**62) | 1
        if _is_prime(c) and not any(a % c == 0 for a in avoid if a):
            return c


def _frac_mod(c: Fraction, p: int) -> int:
    return c.numerator * pow(c.denominator, -1, p) % p


def _eval_lacunary_mod(f: LacunaryPoly, point: Sequence[int], p: int) -> int:
    total = 0
    for c, e in f.terms:
        t = _frac_mod(c, p)
        for v, a in zip(point, e):
            if a == 0:
                continue
            if v % p == 0:
                t = 0
                break
            t = t * pow(v, a % (p - 1) or p - 1, p) % p
        total = (total + t) % p
    return total


def _gf_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _gf_mulmod(a: list[int], b: list[int], mod: list[int], p: int) -> list[int]:
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    # reduce by the monic modulus
    d = len(mod) - 1
    while len(prod) > d:
        lead = prod[-1]
        if lead:
            off = len(prod) - 1 - d
            for t in range(d + 1):
                prod[off + t] = (prod[off + t] - lead * mod[t]) % p
        prod.pop()
    return _gf_trim(prod)


def _gf_powmod(base: list[int], e: int, mod: list[int], p: int) -> list[int]:
    out = [1]
    b = list(base)
    while e:
        if e & 1:
            out = _gf_mulmod(out, b, mod, p)
        e >>= 1
        b = _gf_mulmod(b, b, mod, p)
    return out


def _gf_monic(a: list[int], p: int) -> list[int]:
    inv = pow(a[-1], -1, p)
    return [x * inv % p for x in a]


def _gf_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = list(a), list(b)
    while b:
        b_m = _gf_monic(b, p)
        # a mod b_m
        r = list(a)
        while len(r) >= len(b_m) and r:
            lead = r[-1]
            if lead:
                off = len(r) - len(b_m)
                for t in range(len(b_m)):
                    r[off + t] = (r[off + t] - lead * b_m[t]) % p
            r.pop()
        a, b = b_m, _gf_trim(r)
    return _gf_monic(a, p) if a else a


def _gf_roots(a: list[int], p: int, rng: random.Random) -> list[int]:
    """Roots in F_p of a nonzero polynomial, by equal-degree splitting."""
    a = _gf_monic(_gf_trim(list(a)), p)
    # isolate the product of distinct linear factors: gcd(a, x^p - x)
    xp = _gf_powmod([0, 1], p, a, p)
    xp_minus_x = list(xp)
    while len(xp_minus_x) < 2:
        xp_minus_x.append(0)
    xp_minus_x[1] = (xp_minus_x[1] - 1) % p
    lin = _gf_gcd(a, _gf_trim(xp_minus_x), p)
    roots: list[int] = []
    stack = [lin]
    while stack:
        h = stack.pop()
        if len(h) <= 1:
            continue
        if len(h) == 2:
            roots.append(-h[0] * pow(h[1], -1, p) % p)
            continue
        while True:
            s = rng.randrange(p)
            w = _gf_powmod([s, 1], (p - 1) // 2, h, p)
            w = list(w)
            if not w:
                w = [0]
            w[0] = (w[0] - 1) % p
            u = _gf_gcd(h, _gf_trim(w), p)
            if 1 < len(u) < len(h):
                stack.append(u)
                # h / u
                q = _gf_quotient(h, u, p)
                stack.append(q)
                break
    roots.sort()
    return roots


def _gf_quotient(a: list[int], b: list[int], p: int) -> list[int]:
    r = list(a)
    q = [0] * (len(a) - len(b) + 1)
    binv = pow(b[-1], -1, p)
    while len(r) >= len(b) and _gf_trim(r):
        off = len(r) - len(b)
        c = r[-1] * binv % p
        q[off] = c
        for t in range(len(b)):
            r[off + t] = (r[off + t] - c * b[t]) % p
        r.pop()
    return _gf_trim(q)


def _denominators(f: LacunaryPoly) -> set[int]:
    return {c.denominator for c, _ in f.terms}


def _sample_zero_point(
    g: DensePoly, p: int, rng: random.Random
) -> tuple[int, ...] | None:
    """One point of {g = 0} over F_p, or None if this prime looks unlucky."""
    solve = max(range(1, g.n + 1), key=lambda i: g.shape[i - 1])
    dsolve = g.shape[solve - 1]
    for _ in range(16):
        others = [rng.randrange(p) for _ in range(g.n)]
        image = [0] * (dsolve + 1)
        for c, e in g.coeffs:
            t = _frac_mod(c, p)
            for i, a in enumerate(e, start=1):
                if i == solve or a == 0:
                    continue
                t = t * pow(others[i - 1], a, p) % p
            image[e[solve - 1]] = (image[e[solve - 1]] + t) % p
        image = _gf_trim(image)
        if len(image) != dsolve + 1:
            continue  # leading coefficient vanished on this slice
        roots = _gf_roots(image, p, rng)
        if not roots:
            continue
        point = list(others)
        point[solve - 1] = roots[rng.randrange(len(roots))]
        return tuple(point)
    return None


def verify_divisibility(
    f: LacunaryPoly, g: DensePoly, trials: int = 8, rng_seed: int = 0
) -> bool:
    """Monte Carlo test of g | f by evaluation on the zero set of g.

    A False answer is backed by a concrete point where g vanishes and f
    does not (modulo a random prime), so it is wrong only when that prime
    divides fixed invisible denominators — vanishingly unlikely.  A True
    answer is heuristic; see the module docstring for the error model.
    """
    if g.is_constant():
        raise ValueError("divisibility by a constant is not a meaningful test")
    if f.n != g.n:
        raise ValueError(f"operands have {f.n} and {g.n} variables")
    if f.is_zero():
        return True
    rng = random.Random(rng_seed)
    avoid = _denominators(f) | {c.denominator for c, _ in g.coeffs}
    for _ in range(trials):
        for _attempt in range(8):
            p = _random_prime(rng, avoid)
            point = _sample_zero_point(g, p, rng)
            if point is not None:
                break
        else:
            raise BadModulus("could not sample a zero of the candidate modulo any prime")
        if _eval_lacunary_mod(f, point, p) != 0:
            return False
    return True


def verify_multiplicity(
    f: LacunaryPoly, g: DensePoly, trials: int = 8, rng_seed: int = 0
) -> int:
    """Largest m such that f and all its partials up to order m-1 pass the
    divisibility test for g; exact for irreducible g in characteristic 0."""
    if g.is_constant():
        raise ValueError("multiplicity of a constant is not a meaningful test")
    from itertools import combinations_with_replacement

    m = 0
    while True:
        level = []
        for combo in combinations_with_replacement(range(1, f.n + 1), m):
            h = f
            for i in combo:
                h = partial_derivative(h, i)
            level.append(h)
        ok = all(
            h.is_zero() or verify_divisibility(h, g, trials, rng_seed + 7 * m + idx)
            for idx, h in enumerate(level)
        )
        if not ok:
            return m
        if all(h.is_zero() for h in level):
            # f itself was zero at this derivative order; multiplicity is capped
            return m
        m += 1
