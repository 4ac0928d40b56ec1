"""Exact sparse polynomials over Q with arbitrary-precision exponents.

A polynomial is stored as its list of nonzero terms; nothing about the
representation depends on the degree, so exponents like 10**50 cost a few
machine words instead of gigabytes.

  term       = (coefficient, exponent vector)
  coefficient = fractions.Fraction   (always reduced, denominator > 0)
  exponent vector = tuple of n nonnegative ints

Canonical form, enforced by LacunaryPoly.from_terms:

  * exponent vectors are pairwise distinct (duplicates merged),
  * no zero coefficients (cancellations dropped),
  * terms sorted by exponent vector, descending lexicographic with
    variable 1 most significant.

The zero polynomial is the empty term list.  All values are immutable and
hashable; every operation is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Iterator, Sequence

from .errors import (
    ArityMismatch,
    GuardExceeded,
    NegativeExponent,
    ParseError,
    WrongVariable,
    ZeroPolynomial,
)

Coefficient = Fraction
ExponentVector = tuple[int, ...]
Term = tuple[Fraction, ExponentVector]

#: Default cap on the number of terms a product may produce.  Multiplication
#: exists for fixtures and oracles; partitions never need it.
DEFAULT_TERM_GUARD = 2**22


@dataclass(frozen=True)
class LacunaryPoly:
    """Canonical sparse polynomial; build instances with from_terms."""

    n: int
    terms: tuple[Term, ...]

    @classmethod
    def from_terms(cls, n: int, items: Iterable[tuple]) -> "LacunaryPoly":
        """Canonicalize an iterable of (coefficient, exponent vector) pairs."""
        if n < 1:
            raise ArityMismatch(f"need at least one variable, got n={n}")
        acc: dict[ExponentVector, Fraction] = {}
        for c, e in items:
            c = Fraction(c)
            e = tuple(int(x) for x in e)
            if len(e) != n:
                raise ArityMismatch(f"exponent vector {e} has length {len(e)}, expected {n}")
            if any(x < 0 for x in e):
                raise NegativeExponent(f"negative exponent in {e}")
            acc[e] = acc.get(e, Fraction(0)) + c
        terms = tuple(
            (c, e) for e, c in sorted(acc.items(), key=lambda kv: kv[0], reverse=True) if c
        )
        return cls(n, terms)

    @classmethod
    def zero(cls, n: int) -> "LacunaryPoly":
        return cls.from_terms(n, ())

    @classmethod
    def constant(cls, n: int, value) -> "LacunaryPoly":
        return cls.from_terms(n, [(value, (0,) * n)])

    @classmethod
    def variable(cls, n: int, index: int) -> "LacunaryPoly":
        """The polynomial x_index (1-based)."""
        e = [0] * n
        e[index - 1] = 1
        return cls.from_terms(n, [(1, e)])

    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(self.terms[0][1]))

    def support(self) -> tuple[ExponentVector, ...]:
        return tuple(e for _, e in self.terms)

    def coefficient(self, e: Sequence[int]) -> Fraction:
        e = tuple(e)
        for c, e2 in self.terms:
            if e2 == e:
                return c
        return Fraction(0)

    def __iter__(self) -> Iterator[Term]:
        return iter(self.terms)

    def __str__(self) -> str:
        return format_poly(self)

    def __add__(self, other: "LacunaryPoly") -> "LacunaryPoly":
        return add(self, other)

    def __sub__(self, other: "LacunaryPoly") -> "LacunaryPoly":
        return add(self, negate(other))

    def __neg__(self) -> "LacunaryPoly":
        return negate(self)

    def __mul__(self, other: "LacunaryPoly") -> "LacunaryPoly":
        return multiply(self, other)


@dataclass(frozen=True)
class PolyStats:
    """Read-offs used everywhere: term count, degrees, valuations, bit size."""

    k: int
    mdeg: ExponentVector
    mval: ExponentVector
    total_degree: int
    lacunary_size: int


def variable_names(n: int) -> tuple[str, ...]:
    """x, y, z for up to three variables, x1..xn beyond."""
    if n <= 3:
        return ("x", "y", "z")[:n]
    return tuple(f"x{i}" for i in range(1, n + 1))


# ---------------------------------------------------------------------------
# parsing


class _Parser:
    """Recursive-descent parser for the term grammar.

    poly := ['-'] term (('+'|'-') term)*
    term := coef | [coef '*'] mono ('*' mono)*
    mono := var ['^' nat]
    coef := nat ['/' nat]
    var  := 'x' | 'y' | 'z' | 'x' nat
    nat  := decimal digits of unbounded length

    Whitespace is insignificant.
    """

    def __init__(self, text: str, n: int):
        self.text = text
        self.n = n
        self.pos = 0

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.pos)

    def ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def nat(self) -> int:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            raise self.error("expected a number")
        return int(self.text[start : self.pos])

    def rational(self) -> Fraction:
        num = self.nat()
        self.ws()
        if self.peek() == "/":
            self.pos += 1
            self.ws()
            den = self.nat()
            if den == 0:
                raise self.error("zero denominator")
            return Fraction(num, den)
        return Fraction(num)

    def variable(self) -> int:
        ch = self.peek()
        if ch == "x":
            self.pos += 1
            if self.peek().isdigit():
                at = self.pos
                idx = self.nat()
                if not 1 <= idx <= self.n:
                    raise WrongVariable(f"variable x{idx} outside x1..x{self.n}", at)
                return idx
            if self.n > 3:
                raise WrongVariable("bare 'x' is only an alias for n <= 3", self.pos - 1)
            return 1
        if ch in ("y", "z"):
            idx = 2 if ch == "y" else 3
            if self.n > 3 or idx > self.n:
                raise WrongVariable(f"variable '{ch}' not available for n={self.n}", self.pos)
            self.pos += 1
            return idx
        raise self.error("expected a variable")

    def mono(self, exps: list[int]) -> None:
        idx = self.variable()
        e = 1
        self.ws()
        if self.peek() == "^":
            self.pos += 1
            self.ws()
            if self.peek() == "-":
                raise NegativeExponent(f"negative exponent at position {self.pos}")
            e = self.nat()
        exps[idx - 1] += e

    def term(self) -> Term:
        exps = [0] * self.n
        ch = self.peek()
        if ch.isdigit():
            coeff = self.rational()
            self.ws()
            if self.peek() != "*":
                return (coeff, tuple(exps))
            self.pos += 1
            self.ws()
            self.mono(exps)
        elif ch in ("x", "y", "z"):
            coeff = Fraction(1)
            self.mono(exps)
        else:
            raise self.error("expected a term")
        self.ws()
        while self.peek() == "*":
            self.pos += 1
            self.ws()
            self.mono(exps)
            self.ws()
        return (coeff, tuple(exps))

    def poly(self) -> list[Term]:
        out: list[Term] = []
        self.ws()
        sign = 1
        if self.peek() == "-":
            sign = -1
            self.pos += 1
            self.ws()
        while True:
            c, e = self.term()
            out.append((sign * c, e))
            self.ws()
            ch = self.peek()
            if not ch:
                return out
            if ch == "+":
                sign = 1
            elif ch == "-":
                sign = -1
            else:
                raise self.error("expected '+' or '-'")
            self.pos += 1
            self.ws()


def parse_poly(text: str, n: int) -> LacunaryPoly:
    """Parse text into a canonical polynomial in n variables.

    Duplicate monomials are merged and cancellations dropped, so the result
    is canonical regardless of how the input was written.
    """
    return LacunaryPoly.from_terms(n, _Parser(text, n).poly())


def infer_variable_count(text: str) -> int:
    """Smallest n for which every variable mentioned in text is valid."""
    n = 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "y":
            n = max(n, 2)
        elif ch == "z":
            n = max(n, 3)
        elif ch == "x" and i + 1 < len(text) and text[i + 1].isdigit():
            j = i + 1
            while j < len(text) and text[j].isdigit():
                j += 1
            n = max(n, int(text[i + 1 : j]))
            i = j - 1
        i += 1
    return n


# ---------------------------------------------------------------------------
# printing


def format_poly(f: LacunaryPoly) -> str:
    """Canonical text form; parse_poly(format_poly(f), f.n) == f."""
    if not f.terms:
        return "0"
    names = variable_names(f.n)
    out: list[str] = []
    for i, (c, e) in enumerate(f.terms):
        mono = "*".join(
            name if k == 1 else f"{name}^{k}" for name, k in zip(names, e) if k
        )
        a = abs(c)
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        if i == 0:
            out.append(body if c > 0 else f"-{body}")
        else:
            out.append(f" + {body}" if c > 0 else f" - {body}")
    return "".join(out)


# ---------------------------------------------------------------------------
# arithmetic


def _require_same_arity(f: LacunaryPoly, g: LacunaryPoly) -> None:
    if f.n != g.n:
        raise ArityMismatch(f"operands have {f.n} and {g.n} variables")


def add(f: LacunaryPoly, g: LacunaryPoly) -> LacunaryPoly:
    """Canonical sum; terms with equal exponent vectors merge."""
    _require_same_arity(f, g)
    if not f.terms:
        return g
    if not g.terms:
        return f
    return LacunaryPoly.from_terms(f.n, list(f.terms) + list(g.terms))


def negate(f: LacunaryPoly) -> LacunaryPoly:
    return LacunaryPoly(f.n, tuple((-c, e) for c, e in f.terms))


def multiply(f: LacunaryPoly, g: LacunaryPoly, guard: int = DEFAULT_TERM_GUARD) -> LacunaryPoly:
    """Canonical product.  Refuses to expand past `guard` terms."""
    _require_same_arity(f, g)
    if not f.terms or not g.terms:
        return LacunaryPoly.zero(f.n)
    if len(f.terms) * len(g.terms) > guard:
        raise GuardExceeded(
            f"product would expand {len(f.terms)}*{len(g.terms)} term pairs (guard {guard})"
        )
    acc: dict[ExponentVector, Fraction] = {}
    for cf, ef in f.terms:
        for cg, eg in g.terms:
            e = tuple(a + b for a, b in zip(ef, eg))
            acc[e] = acc.get(e, Fraction(0)) + cf * cg
    return LacunaryPoly.from_terms(f.n, ((c, e) for e, c in acc.items()))


def power(f: LacunaryPoly, m: int, guard: int = DEFAULT_TERM_GUARD) -> LacunaryPoly:
    """f**m by repeated multiplication (fixture helper)."""
    out = LacunaryPoly.constant(f.n, 1)
    for _ in range(m):
        out = multiply(out, f, guard)
    return out


def mdeg(f: LacunaryPoly) -> ExponentVector:
    """Per-variable maximum exponent; all zeros for the zero polynomial."""
    if not f.terms:
        return (0,) * f.n
    return tuple(max(e[i] for _, e in f.terms) for i in range(f.n))


def mval(f: LacunaryPoly) -> ExponentVector:
    """Per-variable minimum exponent; all zeros for the zero polynomial."""
    if not f.terms:
        return (0,) * f.n
    return tuple(min(e[i] for _, e in f.terms) for i in range(f.n))


def normalize_mval(f: LacunaryPoly) -> tuple[LacunaryPoly, ExponentVector]:
    """Strip the largest monomial dividing f.

    Returns (f / X^v, v) where v is the multivaluation; the first component
    has valuation 0 in every variable.
    """
    if not f.terms:
        raise ZeroPolynomial("the zero polynomial has no multivaluation")
    v = mval(f)
    if not any(v):
        return f, v
    shifted = tuple((c, tuple(a - b for a, b in zip(e, v))) for c, e in f.terms)
    return LacunaryPoly(f.n, shifted), v


def stats(f: LacunaryPoly) -> PolyStats:
    """Term count, multidegree, multivaluation, total degree and bit size.

    The size is the usual estimate k*(n*max exponent bits + max coefficient
    bits) with coefficient bits = bits of |numerator| + bits of denominator.
    For the zero polynomial everything is reported as 0.
    """
    if not f.terms:
        return PolyStats(0, (0,) * f.n, (0,) * f.n, 0, 0)
    k = len(f.terms)
    exp_bits = max((x.bit_length() for _, e in f.terms for x in e), default=0)
    coeff_bits = max(
        abs(c.numerator).bit_length() + c.denominator.bit_length() for c, _ in f.terms
    )
    return PolyStats(
        k=k,
        mdeg=mdeg(f),
        mval=mval(f),
        total_degree=max(sum(e) for _, e in f.terms),
        lacunary_size=k * (f.n * exp_bits + coeff_bits),
    )


# ---------------------------------------------------------------------------
# structural helpers shared by the reduction modules


def partial_derivative(f: LacunaryPoly, i: int) -> LacunaryPoly:
    """Termwise derivative with respect to x_i (1-based)."""
    if not 1 <= i <= f.n:
        raise ArityMismatch(f"variable index {i} outside 1..{f.n}")
    out = []
    for c, e in f.terms:
        if e[i - 1]:
            e2 = list(e)
            e2[i - 1] -= 1
            out.append((c * e[i - 1], tuple(e2)))
    return LacunaryPoly.from_terms(f.n, out)


def reflect_variable(f: LacunaryPoly, i: int, top: int | None = None) -> LacunaryPoly:
    """Reverse the exponents of x_i: e -> top - e (top defaults to deg_i)."""
    if not f.terms:
        return f
    if top is None:
        top = mdeg(f)[i - 1]
    out = []
    for c, e in f.terms:
        e2 = list(e)
        e2[i - 1] = top - e[i - 1]
        out.append((c, tuple(e2)))
    return LacunaryPoly.from_terms(f.n, out)


def swap_variables(f: LacunaryPoly, i: int, j: int) -> LacunaryPoly:
    """Exchange the exponents of x_i and x_j."""
    out = []
    for c, e in f.terms:
        e2 = list(e)
        e2[i - 1], e2[j - 1] = e2[j - 1], e2[i - 1]
        out.append((c, tuple(e2)))
    return LacunaryPoly.from_terms(f.n, out)


def canonical_associate(f: LacunaryPoly) -> tuple[LacunaryPoly, Fraction]:
    """Scale f to integer coefficients with content 1 and positive lead.

    Returns (g, u) with f = u*g; the leading coefficient is the one of the
    first term in canonical order.  Factor identity everywhere in the
    package compares these associates.
    """
    if not f.terms:
        raise ZeroPolynomial("zero has no canonical associate")
    den_lcm = lcm(*(c.denominator for c, _ in f.terms))
    num_gcd = gcd(*(abs(c.numerator) for c, _ in f.terms))
    scale = Fraction(den_lcm, num_gcd)
    if f.terms[0][0] < 0:
        scale = -scale
    g = LacunaryPoly(f.n, tuple((c * scale, e) for c, e in f.terms))
    return g, 1 / scale
