"""Decidable checkers for restrictedness, tightness, fullness, and blowups.

Conventions pinned here once and relied on everywhere else:

* sparseness/denseness to a set is STRICT: every vertex of B has fewer
  than eps*|A| neighbors (resp. non-neighbors) in A;
* restrictedness is non-strict: max degree at most eps*|S| in the graph
  or its complement; empty and singleton sets are restricted;
* tightness to an empty A is a precondition error (eps*|A| = 0 makes
  "fewer than 0" unsatisfiable);
* a pair is (c,eps)-full when every subpair of fractional size >= c on
  both sides spans at least eps*|A1|*|B1| edges, and (c,eps)-empty when
  it is full in the complement.

The exact fullness check only examines subpairs at the minimum sizes
ceil(c|A|) x ceil(c|B|); docs/fullness-reduction.md proves this
equivalent to the all-sizes definition by an averaging argument.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from .graph import Graph, Pattern, complement, edge_density, iter_bits, mask_to_ids
from .values import ceil_frac

TIGHTNESS_MODES = ("sparse", "dense", "tight")


class CheckPreconditionError(ValueError):
    """A checker was called outside its contract."""


class EnumerationBudgetError(RuntimeError):
    """Exact enumeration would exceed the configured budget."""


@dataclass(frozen=True)
class TightnessCheck:
    ok: bool
    satisfied: str | None  # "sparse" or "dense" when ok under mode="tight"
    sparse_violator: int | None
    dense_violator: int | None

    @property
    def witness(self) -> int | None:
        """A vertex violating both bounds if one exists, else any violator."""
        if self.sparse_violator is not None and self.sparse_violator == self.dense_violator:
            return self.sparse_violator
        if self.sparse_violator is not None:
            return self.sparse_violator
        return self.dense_violator


def is_tight_to(g: Graph, a: int, b: int, eps: Fraction, mode: str) -> TightnessCheck:
    """Is B eps-sparse / eps-dense / eps-tight to A (strict bounds)?"""
    if mode not in TIGHTNESS_MODES:
        raise ValueError(f"unknown tightness mode {mode!r}")
    if not a:
        raise CheckPreconditionError("tightness target A must be nonempty")
    if a & b:
        raise CheckPreconditionError("A and B must be disjoint")
    na = a.bit_count()
    threshold = eps * na
    sparse_bad = dense_bad = None
    both_bad = None
    for v in iter_bits(b):
        nbrs = (g.adj[v] & a).bit_count()
        viol_sparse = not nbrs < threshold
        viol_dense = not (na - nbrs) < threshold
        if viol_sparse and sparse_bad is None:
            sparse_bad = v
        if viol_dense and dense_bad is None:
            dense_bad = v
        if viol_sparse and viol_dense and both_bad is None:
            both_bad = v
    sparse_ok = sparse_bad is None
    dense_ok = dense_bad is None
    if mode == "sparse":
        return TightnessCheck(sparse_ok, "sparse" if sparse_ok else None, sparse_bad, None)
    if mode == "dense":
        return TightnessCheck(dense_ok, "dense" if dense_ok else None, None, dense_bad)
    ok = sparse_ok or dense_ok
    satisfied = "sparse" if sparse_ok else ("dense" if dense_ok else None)
    if ok:
        return TightnessCheck(True, satisfied, None, None)
    if both_bad is not None:
        return TightnessCheck(False, None, both_bad, both_bad)
    return TightnessCheck(False, None, sparse_bad, dense_bad)


def restricted_side(g: Graph, s: int, eps: Fraction) -> str | None:
    """Which side witnesses eps-restrictedness ('graph'/'complement'), or None."""
    size = s.bit_count()
    if size <= 1:
        return "graph"
    threshold = eps * size
    max_deg = 0
    min_deg = size
    for v in iter_bits(s):
        d = (g.adj[v] & s).bit_count()
        max_deg = max(max_deg, d)
        min_deg = min(min_deg, d)
    if max_deg <= threshold:
        return "graph"
    if (size - 1 - min_deg) <= threshold:
        return "complement"
    return None


def is_restricted(g: Graph, s: int, eps: Fraction) -> bool:
    """Max degree at most eps*|S| in G[S] or in its complement."""
    return restricted_side(g, s, eps) is not None


def is_weakly_restricted(g: Graph, s: int, eps: Fraction) -> bool:
    """Edge density of G[S] at most eps or at least 1-eps."""
    d = edge_density(g, s)
    return d <= eps or d >= 1 - eps


def extract_restricted_from_weak(g: Graph, s: int, eps: Fraction) -> int:
    """From a weakly (eps/4)-restricted S, return an eps-restricted subset
    of size exactly ceil(|S|/2).

    Works on whichever side has density at most eps/4 and repeatedly
    deletes a maximum-degree vertex (ties to the lowest id): the density
    never increases, and once every remaining degree is at most
    eps*ceil(|S|/2) it can never rise again.  The postcondition is
    rechecked before returning.
    """
    size = s.bit_count()
    if size == 0:
        raise CheckPreconditionError("cannot extract from an empty set")
    quarter = eps / 4
    dens = edge_density(g, s)
    if dens <= quarter:
        work = g
    elif dens >= 1 - quarter:
        work = complement(g)
    else:
        raise CheckPreconditionError(
            f"set is not weakly {quarter}-restricted (density {dens})"
        )
    target = (size + 1) // 2
    current = s
    while current.bit_count() > target:
        worst, worst_deg = None, -1
        for v in iter_bits(current):
            d = (work.adj[v] & current).bit_count()
            if d > worst_deg:
                worst, worst_deg = v, d
        current &= ~(1 << worst)
    if not is_restricted(g, current, eps):
        raise AssertionError("greedy extraction missed its postcondition")
    return current


@dataclass(frozen=True)
class FullPairCertificate:
    a: int
    b: int
    c: Fraction
    eps: Fraction
    polarity: str  # "full" | "empty"

    def __post_init__(self):
        if self.polarity not in ("full", "empty"):
            raise ValueError("polarity must be 'full' or 'empty'")
        if not (0 < self.c <= 1):
            raise ValueError("c must lie in (0,1]")
        if not (0 < self.eps < 1):
            raise ValueError("eps must lie in (0,1)")
        if not self.a or not self.b:
            raise ValueError("both sides must be nonempty")
        if self.a & self.b:
            raise ValueError("sides must be disjoint")


@dataclass(frozen=True)
class FullPairCheck:
    ok: bool
    certifying: bool  # exact or witness-backed (sampled True is not certifying)
    witness_a: int | None = None
    witness_b: int | None = None


def min_subpair_sizes(cert: FullPairCertificate) -> tuple[int, int]:
    return ceil_frac(cert.c * cert.a.bit_count()), ceil_frac(cert.c * cert.b.bit_count())


def _violating_subpair(
    work: Graph, a: int, b: int, ka: int, kb: int, eps: Fraction
) -> tuple[int, int] | None:
    """Find A1 (|A1|=ka), B1 (|B1|=kb) spanning fewer than eps*ka*kb edges.

    Enumerates subsets of one side only: for a fixed B1 the minimum edge
    count over all A1 is the sum of the ka smallest per-vertex counts, so
    the other side never needs explicit enumeration.
    """
    a_ids = mask_to_ids(a)
    b_ids = mask_to_ids(b)

    def search(outer_ids, inner_ids, outer_k, inner_k, rows):
        # rows[u] = adjacency of inner vertex u restricted to the outer set
        for combo in itertools.combinations(outer_ids, outer_k):
            combo_mask = 0
            for v in combo:
                combo_mask |= 1 << v
            counts = sorted((rows[u] & combo_mask).bit_count() for u in inner_ids)
            worst = counts[:inner_k]
            if sum(worst) < eps * outer_k * inner_k:
                # reconstruct which inner vertices realize the minimum
                scored = sorted(inner_ids, key=lambda u: ((rows[u] & combo_mask).bit_count(), u))
                inner_mask = 0
                for u in scored[:inner_k]:
                    inner_mask |= 1 << u
                return combo_mask, inner_mask
        return None

    from math import comb

    if comb(len(b_ids), kb) <= comb(len(a_ids), ka):
        rows = {u: work.adj[u] for u in a_ids}
        found = search(b_ids, a_ids, kb, ka, rows)
        if found is None:
            return None
        b1, a1 = found
        return a1, b1
    rows = {u: work.adj[u] for u in b_ids}
    found = search(a_ids, b_ids, ka, kb, rows)
    if found is None:
        return None
    return found


def is_full_pair(
    g: Graph,
    cert: FullPairCertificate,
    method: str = "exact",
    budget: int = 10**7,
    rng: random.Random | None = None,
    samples: int = 2000,
) -> FullPairCheck:
    """Check a fullness certificate.

    exact: decides the (c,eps)-full property (via the minimum-size
    reduction); a False result carries a violating subpair.  sampled:
    probabilistic refutation only; False carries a verified violating
    subpair, True is non-certifying.
    """
    work = g if cert.polarity == "full" else complement(g)
    ka, kb = min_subpair_sizes(cert)
    na, nb = cert.a.bit_count(), cert.b.bit_count()
    if method == "exact":
        from math import comb

        if min(comb(na, ka), comb(nb, kb)) > budget:
            raise EnumerationBudgetError(
                f"exact fullness check needs more than {budget} subset evaluations"
            )
        bad = _violating_subpair(work, cert.a, cert.b, ka, kb, cert.eps)
        if bad is None:
            return FullPairCheck(True, True)
        return FullPairCheck(False, True, witness_a=bad[0], witness_b=bad[1])
    if method == "sampled":
        rng = rng or random.Random(0)
        a_ids = mask_to_ids(cert.a)
        b_ids = mask_to_ids(cert.b)
        for _ in range(samples):
            a1 = rng.sample(a_ids, ka)
            b1 = rng.sample(b_ids, kb)
            am = sum(1 << v for v in a1)
            bm = sum(1 << v for v in b1)
            if work.edges_between(am, bm) < cert.eps * ka * kb:
                return FullPairCheck(False, True, witness_a=am, witness_b=bm)
        return FullPairCheck(True, False)
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class BlowupCertificate:
    parts: tuple[int, ...]
    c: Fraction
    eps: Fraction
    pattern: Pattern  # prefix pattern on len(parts) labels, identity order

    def __post_init__(self):
        if self.pattern.size != len(self.parts):
            raise ValueError("pattern size must match the number of parts")
        union = 0
        for p in self.parts:
            if not p:
                raise ValueError("blowup parts must be nonempty")
            if p & union:
                raise ValueError("blowup parts must be disjoint")
            union |= p


@dataclass(frozen=True)
class BlowupCheck:
    ok: bool
    certifying: bool
    failing_pair: tuple[int, int] | None = None  # 1-based labels
    detail: FullPairCheck | None = None


def verify_blowup(
    g: Graph, cert: BlowupCertificate, method: str = "exact", budget: int = 10**7
) -> BlowupCheck:
    """Every label pair must be full where the pattern has an edge, empty where not."""
    t = len(cert.parts)
    certifying = True
    for i in range(1, t + 1):
        for j in range(i + 1, t + 1):
            polarity = "full" if cert.pattern.label_edge(i, j) else "empty"
            pair = FullPairCertificate(
                cert.parts[i - 1], cert.parts[j - 1], cert.c, cert.eps, polarity
            )
            res = is_full_pair(g, pair, method=method, budget=budget)
            certifying = certifying and res.certifying
            if not res.ok:
                return BlowupCheck(False, res.certifying, (i, j), res)
    return BlowupCheck(True, certifying, None, None)
