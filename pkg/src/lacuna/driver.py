"""End-to-end pipeline: monomial, unidimensional and multidimensional
factors of a lacunary polynomial within per-variable degree caps.

Stages:

  1. the monomial part is read off the multivaluation;
  2. unidimensional factors come from the projection reduction;
  3. multidimensional factors come from the gap partitions: for n = 2 every
     reduction pass contributes the gcd of its densified summands, whose
     low-degree factorization yields candidates; for n >= 3 the single
     multivariate partition does, with candidates factored when the gcd
     involves at most two variables and emitted as residual instances for
     an external engine otherwise;
  4. every candidate is verified against the input — exactly whenever the
     input itself densifies under the guard, by modular sampling otherwise —
     and the verified multiplicity is what the report states.

Reports are deterministic: same input, caps, seed and options give
byte-identical JSON.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import (
    LacunaryPoly,
    canonical_associate,
    format_poly,
    mdeg,
    normalize_mval,
    variable_names,
)
from .dense import (
    DEFAULT_DENSE_GUARD,
    DensePoly,
    FactorList,
    densify,
    divides_mult,
    factor_bivariate,
    factor_univariate,
    gcd_many,
    verify_multiplicity,
)
from .errors import ZeroPolynomial
from .gap import GapParams, PartitionResult, multivariate_partition, reduce_bivariate
from .geometry import newton_dimension
from .unidim import (
    DenseFactorEngine,
    FactorWithMultiplicity,
    unidimensional_factors,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Certificate:
    """How one reported factor was checked."""

    factor: str
    kind: str
    claimed_multiplicity: int
    verified_multiplicity: int
    mode: str  # "exact" | "probabilistic"
    trials: int
    seed: int


@dataclass(frozen=True)
class FactorReport:
    monomial: tuple[int, ...]
    unidimensional: tuple[FactorWithMultiplicity, ...]
    multidimensional: tuple[FactorWithMultiplicity, ...]
    residual_instances: tuple[DensePoly, ...]
    certificates: tuple[Certificate, ...]
    seed: int
    trials: int
    dense_guard: int


def _dense_size(f: LacunaryPoly) -> int:
    g, _ = normalize_mval(f)
    size = 1
    for d in mdeg(g):
        size *= d + 1
    return size


def _active_variables(g: DensePoly) -> tuple[int, ...]:
    return tuple(i for i, d in enumerate(g.shape, start=1) if d > 0)


def _project_to(g: DensePoly, active: Sequence[int]) -> DensePoly:
    items = [(c, tuple(e[i - 1] for i in active)) for c, e in g.coeffs]
    return DensePoly.from_terms(len(active), items)


def _embed_from(g: DensePoly, active: Sequence[int], n: int) -> LacunaryPoly:
    out = []
    for c, e in g.coeffs:
        full = [0] * n
        for pos, i in enumerate(active):
            full[i - 1] = e[pos]
        out.append((c, tuple(full)))
    return LacunaryPoly.from_terms(n, out)


def _factor_gcd(h: DensePoly) -> FactorList | None:
    """Factor a pass gcd when it involves at most two variables."""
    active = _active_variables(h)
    if len(active) == 0:
        return None
    view = _project_to(h, active) if len(active) != h.n else h
    if len(active) == 1:
        return factor_univariate(view)
    if len(active) == 2:
        return factor_bivariate(view)
    return None


def bounded_degree_factors(
    f: LacunaryPoly,
    caps: Sequence[int],
    *,
    seed: int = 0,
    trials: int = 8,
    dense_guard: int = DEFAULT_DENSE_GUARD,
    screen: int = 1,
    unidim_only: bool = False,
    multidim_only: bool = False,
) -> FactorReport:
    """Compute the bounded-degree factor report of f.

    Raises GuardExceeded (with the offending instance attached) when some
    stage needs a dense object past the guard, and EngineLimitation when a
    univariate projection is out of the default engine's reach.
    """
    if f.is_zero():
        raise ZeroPolynomial("the zero polynomial has no factor report")
    caps = tuple(int(c) for c in caps)
    if len(caps) != f.n:
        raise ValueError(f"expected {f.n} degree caps, got {len(caps)}")
    if any(c < 1 for c in caps):
        raise ValueError(f"degree caps must be >= 1, got {caps}")

    core, monomial = normalize_mval(f)
    exact = _dense_size(core) <= dense_guard
    certificates: list[Certificate] = []

    unidim: tuple[FactorWithMultiplicity, ...] = ()
    if not multidim_only and not core.is_constant() and not core.is_monomial():
        engine = DenseFactorEngine(dense_guard=dense_guard, seed=seed)
        unidim = unidimensional_factors(core, caps, engine, screen)
        unidim = _verify_all(
            core, unidim, certificates, exact, trials, seed, dense_guard
        )

    multidim: tuple[FactorWithMultiplicity, ...] = ()
    residual: tuple[DensePoly, ...] = ()
    if not unidim_only and not core.is_constant() and not core.is_monomial():
        if newton_dimension(core) >= 2:
            multidim, residual = _multidimensional_stage(
                core, caps, certificates, exact, trials, seed, dense_guard
            )

    return FactorReport(
        monomial=monomial,
        unidimensional=unidim,
        multidimensional=multidim,
        residual_instances=residual,
        certificates=tuple(certificates),
        seed=seed,
        trials=trials,
        dense_guard=dense_guard,
    )


def _verify_all(
    core: LacunaryPoly,
    found: Sequence[FactorWithMultiplicity],
    certificates: list[Certificate],
    exact: bool,
    trials: int,
    seed: int,
    dense_guard: int,
) -> tuple[FactorWithMultiplicity, ...]:
    """Replace claimed multiplicities by verified ones; drop non-factors."""
    out = []
    if exact:
        core_dense, _ = densify(core, dense_guard)
    for fm in found:
        g = DensePoly.from_terms(core.n, fm.factor.terms, dense_guard)
        if exact:
            verified = divides_mult(g, core_dense)
            mode = "exact"
        else:
            verified = verify_multiplicity(core, g, trials, seed)
            mode = "probabilistic"
        if verified != fm.multiplicity:
            logger.warning(
                "multiplicity of %s corrected from %d to %d",
                format_poly(fm.factor), fm.multiplicity, verified,
            )
        certificates.append(
            Certificate(
                factor=format_poly(fm.factor),
                kind=fm.kind,
                claimed_multiplicity=fm.multiplicity,
                verified_multiplicity=verified,
                mode=mode,
                trials=trials,
                seed=seed,
            )
        )
        if verified >= 1:
            out.append(
                FactorWithMultiplicity(fm.factor, verified, fm.kind)
            )
    return tuple(out)


def _multidimensional_stage(
    core: LacunaryPoly,
    caps: tuple[int, ...],
    certificates: list[Certificate],
    exact: bool,
    trials: int,
    seed: int,
    dense_guard: int,
):
    n = core.n
    if n == 2:
        passes = reduce_bivariate(core, GapParams(caps[0], caps[1]))
    else:
        passes = (multivariate_partition(core, caps),)

    claims: dict[LacunaryPoly, int] = {}
    residual: list[DensePoly] = []
    seen_residual: set = set()
    for presult in passes:
        summands = [densify(s, dense_guard)[0] for s in presult.summands]
        h = gcd_many(summands, dense_guard)
        if h.is_constant():
            continue
        factored = _factor_gcd(h)
        if factored is None:
            if h.coeffs not in seen_residual:
                seen_residual.add(h.coeffs)
                residual.append(h)
            continue
        active = _active_variables(h)
        for fac, _m in factored.factors:
            g = _embed_from(fac, active, n)
            g, _ = canonical_associate(g)
            if newton_dimension(g) < 2:
                continue
            if any(d > c for d, c in zip(mdeg(g), caps)):
                continue
            gd = DensePoly.from_terms(n, g.terms, dense_guard)
            claim = min(divides_mult(gd, s) for s in summands)
            if claim < 1:
                continue
            prev = claims.get(g)
            if prev is not None and prev != claim:
                logger.warning(
                    "passes disagree on multiplicity of %s: %d vs %d",
                    format_poly(g), prev, claim,
                )
            claims[g] = max(prev or 0, claim)

    found = [
        FactorWithMultiplicity(g, m, "multidimensional")
        for g, m in sorted(claims.items(), key=lambda kv: kv[0].terms)
    ]
    verified = _verify_all(
        core, found, certificates, exact, trials, seed, dense_guard
    )
    return verified, tuple(residual)


def verify_factors(
    f: LacunaryPoly,
    claims: Sequence[tuple[LacunaryPoly, int]],
    trials: int = 8,
    seed: int = 0,
    dense_guard: int = DEFAULT_DENSE_GUARD,
) -> tuple[dict, ...]:
    """Check claimed (factor, multiplicity) pairs against f.

    Returns one verdict per claim: {"claim", "multiplicity", "found",
    "verdict"} with verdict "match" or "mismatch"."""
    if f.is_zero():
        raise ZeroPolynomial("the zero polynomial has no factors to verify")
    core, _ = normalize_mval(f)
    exact = _dense_size(core) <= dense_guard
    if exact:
        core_dense, _ = densify(core, dense_guard)
    out = []
    for g, m in claims:
        if g.is_constant():
            out.append(
                {"claim": format_poly(g), "multiplicity": m, "found": None,
                 "verdict": "error: constant claim"}
            )
            continue
        gn, _ = canonical_associate(g)
        gd = DensePoly.from_terms(f.n, gn.terms, dense_guard)
        if exact:
            found = divides_mult(gd, core_dense)
        else:
            found = verify_multiplicity(core, gd, trials, seed)
        out.append(
            {"claim": format_poly(gn), "multiplicity": m, "found": found,
             "verdict": "match" if found == m else "mismatch"}
        )
    return tuple(out)


# ---------------------------------------------------------------------------
# machine-readable form


def report_to_json(report: FactorReport, n: int) -> str:
    """Render the fixed JSON schema; keys sorted, lists pre-sorted."""
    names = variable_names(n)
    obj = {
        "monomial": {
            names[i]: str(v) for i, v in enumerate(report.monomial) if v
        },
        "unidimensional": [
            {"poly": format_poly(fm.factor), "mult": fm.multiplicity}
            for fm in report.unidimensional
        ],
        "multidimensional": [
            {"poly": format_poly(fm.factor), "mult": fm.multiplicity}
            for fm in report.multidimensional
        ],
        "residual": [str(h) for h in report.residual_instances],
        "meta": {
            "seed": report.seed,
            "trials": report.trials,
            "guard": report.dense_guard,
        },
    }
    return json.dumps(obj, sort_keys=True, separators=(",", ": "), indent=1)
