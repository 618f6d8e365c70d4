"""Verified search for full subpairs inside dense pairs.

A pair carrying at least 2*eps*|A|*|B| edges always contains a
(c,eps)-full subpair on fractional sizes gamma(c,eps) = (1/2)(2 eps)^(12/c)
of each side.  The existence proof is external to this package; the
search below only uses gamma as a size target and feasibility alarm, and
every candidate it returns is certified by the exact fullness checker
before anyone sees it.  Failure above the gamma floors is reported as a
hard diagnostic, never silently.

Strategy: exact-check the pair itself; while a violating sparse subpair
exists, move to the complementary residual pair; if that stalls, fall
back to exhaustive enumeration by descending subpair size within a work
budget.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import mpmath

from .graph import Graph, complement, iter_bits, mask_to_ids
from .predicates import (
    CheckPreconditionError,
    EnumerationBudgetError,
    FullPairCertificate,
    is_full_pair,
)
from .values import LogValue, ceil_frac, log2_fraction

# Exact gamma values are materialised only while the binary size of the
# result stays tame; beyond this the log-scale form is authoritative.
_EXACT_EXPONENT_CAP = 200_000


class FullPairSearchError(RuntimeError):
    """Search budget exhausted without a certified subpair."""


class FullPairGuaranteeViolation(RuntimeError):
    """No subpair at the guaranteed sizes: impossible for valid inputs."""


@dataclass(frozen=True)
class GammaValue:
    exact: Fraction | None
    log2: mpmath.mpf

    def __float__(self) -> float:
        return float(mpmath.power(2, self.log2))


def gamma(c: Fraction, eps: Fraction) -> GammaValue:
    """gamma(c, eps) = (1/2) * (2*eps)^(12/c), exact when 12/c is integral."""
    if not Fraction(0) < c < 1:
        raise ValueError("c must lie in (0,1)")
    if not Fraction(0) < eps < Fraction(1, 4):
        raise ValueError("eps must lie in (0,1/4)")
    exponent = 12 / c
    base = 2 * eps
    log2 = mpmath.mpf(-1) + mpmath.mpf(exponent.numerator) / exponent.denominator * log2_fraction(base)
    exact = None
    if exponent.denominator == 1:
        k = exponent.numerator
        bits = k * max(base.numerator.bit_length(), base.denominator.bit_length())
        if bits <= _EXACT_EXPONENT_CAP:
            exact = base**k / 2
    return GammaValue(exact, log2)


def gamma_scalar(c: Fraction, eps: Fraction) -> "Fraction | LogValue":
    g = gamma(c, eps)
    return g.exact if g.exact is not None else LogValue(g.log2)


@dataclass(frozen=True)
class FullPairParams:
    c: Fraction
    eps: Fraction
    min_frac: Fraction | None = None  # practical override of the gamma size floor

    def __post_init__(self):
        if not Fraction(0) < self.c < 1:
            raise ValueError("c must lie in (0,1)")
        if not Fraction(0) < self.eps < Fraction(1, 4):
            raise ValueError("eps must lie in (0,1/4)")

    def size_floor(self, side: int) -> int:
        """max(1, ceil(frac * side)) with frac = min_frac or gamma(c,eps)."""
        if self.min_frac is not None:
            return max(1, ceil_frac(self.min_frac * side))
        gv = gamma(self.c, self.eps)
        if gv.exact is not None:
            return max(1, ceil_frac(gv.exact * side))
        if gv.log2 + mpmath.log(side, 2) < -1:
            return 1
        raise AssertionError("gamma floor undecidable; supply min_frac")


def _certify(
    g: Graph, a: int, b: int, params: FullPairParams, polarity: str, budget: int
) -> FullPairCertificate | None:
    cert = FullPairCertificate(a, b, params.c, params.eps, polarity)
    if is_full_pair(g, cert, method="exact", budget=budget).ok:
        return cert
    return None


def find_full_pair(
    g: Graph,
    a: int,
    b: int,
    params: FullPairParams,
    polarity: str = "full",
    check_budget: int = 10**7,
    work_budget: int = 400_000,
) -> FullPairCertificate:
    """A subpair (A' of a, B' of b) certified (c,eps)-full (or -empty).

    Precondition: the pair spans at least 2*eps*|a|*|b| edges (in the
    complement for polarity="empty").  Returned sizes respect the gamma
    floor (or the practical min_frac override); exhausting the search
    below those sizes raises a hard diagnostic.
    """
    if not a or not b or a & b:
        raise CheckPreconditionError("sides must be nonempty and disjoint")
    work = g if polarity == "full" else complement(g)
    na, nb = a.bit_count(), b.bit_count()
    if work.edges_between(a, b) < 2 * params.eps * na * nb:
        raise CheckPreconditionError(
            "pair is not dense enough: fewer than 2*eps*|A|*|B| edges"
        )
    floor_a = params.size_floor(na)
    floor_b = params.size_floor(nb)

    # Phase 1: densification — drop violating subpairs while we can.
    cur_a, cur_b = a, b
    while cur_a and cur_b:
        cert = FullPairCertificate(cur_a, cur_b, params.c, params.eps, polarity)
        res = is_full_pair(g, cert, method="exact", budget=check_budget)
        if res.ok:
            return cert
        cur_a &= ~res.witness_a
        cur_b &= ~res.witness_b
        if cur_a.bit_count() < floor_a or cur_b.bit_count() < floor_b:
            break

    # Phase 1.5: alternating high-degree cores — keep only vertices well
    # connected across the pair, then re-check.  Catches the common case
    # where one side is small and the other should shrink to its joint
    # neighborhood.
    cur_a, cur_b = a, b
    for _ in range(4):
        na_c = cur_a.bit_count()
        keep_b = 0
        for v in iter_bits(cur_b):
            if (work.adj[v] & cur_a).bit_count() >= (1 - params.eps) * na_c:
                keep_b |= 1 << v
        if keep_b.bit_count() >= floor_b:
            cur_b = keep_b
        nb_c = cur_b.bit_count()
        keep_a = 0
        for v in iter_bits(cur_a):
            if (work.adj[v] & cur_b).bit_count() >= (1 - params.eps) * nb_c:
                keep_a |= 1 << v
        if keep_a.bit_count() >= floor_a:
            cur_a = keep_a
        if cur_a.bit_count() >= floor_a and cur_b.bit_count() >= floor_b:
            cert = _certify(g, cur_a, cur_b, params, polarity, check_budget)
            if cert is not None:
                return cert

    # Phase 2: exhaustive by descending size within the work budget.
    a_ids = mask_to_ids(a)
    b_ids = mask_to_ids(b)
    spent = 0
    skipped_any = False
    sizes = sorted(
        (
            (sa, sb)
            for sa in range(na, floor_a - 1, -1)
            for sb in range(nb, floor_b - 1, -1)
        ),
        key=lambda p: (-(p[0] + p[1]), -p[0]),
    )
    for sa, sb in sizes:
        cost = comb(na, sa) * comb(nb, sb)
        if spent + cost > work_budget:
            skipped_any = True
            continue
        spent += cost
        for combo_a in itertools.combinations(a_ids, sa):
            am = 0
            for v in combo_a:
                am |= 1 << v
            for combo_b in itertools.combinations(b_ids, sb):
                bm = 0
                for v in combo_b:
                    bm |= 1 << v
                try:
                    cert = _certify(g, am, bm, params, polarity, check_budget)
                except EnumerationBudgetError:
                    cert = None
                if cert is not None:
                    return cert
    if skipped_any:
        raise FullPairSearchError(
            f"work budget {work_budget} exhausted without a certified subpair"
        )
    raise FullPairGuaranteeViolation(
        f"no ({params.c},{params.eps})-{polarity} subpair at sizes >= "
        f"({floor_a},{floor_b}); the input contradicts the guarantee "
        "or the floors were overridden too aggressively"
    )
