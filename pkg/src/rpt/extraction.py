"""Regularity-free extraction machinery.

The central routine finds an induced subgraph whose edge density is at
most eps1 or at least 1-eps2, by the recursive scheme: locate a tight
pair at min(eps1,eps2)/4, recurse into the sparse side at a relaxed
(3/2)*eps1 target, build the low-crossing core of the other side,
recurse again, and merge two equal-size pieces whose union then meets
the original target exactly (the merge arithmetic is asserted with
rationals on every run).  A depth budget replaces the extremal quantity
the scheme implicitly optimizes: on the exact schedule the targets'
product grows by 3/2 per level, so after s = ceil(log_{3/2} eps^-2)
levels every graph qualifies outright and the recursion cannot bottom
out.  Whenever a step cannot honor the guarantee (copy count too high,
depth exhausted), the routine degrades to a flagged best-effort subset
that still satisfies the density claim.

On top of that sit: greedy density-monotone trimming to exact sizes, the
exact-size eps-restricted extractor (density subset -> trim -> weak-to-
strong conversion), and the peel chain that repeatedly removes
restricted sets until only an eta-fraction leftover remains.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .embedding import (
    ManyCopiesResult,
    TightPairResult,
    find_tight_pair,
    tight_pair_copy_threshold,
)
from .graph import (
    Graph,
    Pattern,
    complement,
    edge_density,
    induced_subgraph,
    iter_bits,
    mask_from_ids,
)
from .predicates import extract_restricted_from_weak, is_restricted
from .values import ceil_frac


class ExtractionInfeasible(RuntimeError):
    """Requested size/parameter combination cannot be met at this scale."""


def phi(delta: Fraction, eta: Fraction) -> int:
    """Least integer p >= 1 with (1-delta)^p <= eta, by exact iteration."""
    if not (0 < delta < 1 and 0 < eta < 1):
        raise ValueError("phi needs delta, eta in (0,1)")
    p = 1
    power = 1 - delta
    while power > eta:
        p += 1
        power *= 1 - delta
    return p


def depth_for(eps: Fraction) -> int:
    """ceil(log_{3/2}(eps^-2)): least s with (3/2)^s >= eps^-2, exactly.

    Log-scale guess, then exact adjustment by squared powers (the naive
    per-step product is quadratic in the final bit length and chokes on
    the tiny exact-schedule epsilons).
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0,1)")
    import mpmath

    from .values import log2_fraction

    target = 1 / eps**2
    base = Fraction(3, 2)
    guess = max(int(mpmath.ceil(-2 * log2_fraction(eps) / mpmath.log(mpmath.mpf(3) / 2, 2))), 1)
    while base**guess < target:
        guess += 1
    while guess > 1 and base ** (guess - 1) >= target:
        guess -= 1
    return guess


def shrink_fraction(h: int, eps1: Fraction, eps2: Fraction) -> Fraction:
    """Per-level size shrink: 1/2 * (2h)^-2 * (min(eps1,eps2)/4)^(h-1)."""
    eps = min(eps1, eps2)
    return Fraction(1, 2) * Fraction(1, (2 * h) ** 2) * (eps / 4) ** (h - 1)


@dataclass(frozen=True)
class ExtractionBudget:
    eps1: Fraction
    eps2: Fraction
    depth: int  # recursion budget s
    eta: Fraction  # per-level shrink fraction
    kappa: Fraction | None  # admissible copy-density threshold (exact schedule)

    def __post_init__(self):
        if not (0 < self.eps1 < 1 and 0 < self.eps2 < 1):
            raise ValueError("density targets must lie in (0,1)")
        if self.depth < 1:
            raise ValueError("depth must be >= 1")

    @staticmethod
    def exact_schedule(h: int, eps1: Fraction, eps2: Fraction) -> "ExtractionBudget":
        eps = min(eps1, eps2)
        s = depth_for(eps)
        eta = shrink_fraction(h, eps1, eps2)
        kappa = eta ** (s * h) * tight_pair_copy_threshold(h, eps / 4)
        return ExtractionBudget(eps1, eps2, s, eta, kappa)

    @staticmethod
    def practical(eps1: Fraction, eps2: Fraction, depth: int, h: int = 2) -> "ExtractionBudget":
        return ExtractionBudget(eps1, eps2, depth, shrink_fraction(h, eps1, eps2), None)


@dataclass(frozen=True)
class DensitySubsetResult:
    vertices: int  # host-graph mask
    side: str  # "low" | "high"
    guaranteed: bool  # exact-schedule preconditions confirmed AND size >= eta^s |G|


def trim_to_size(g: Graph, s: int, k: int, side: str) -> int:
    """Exact-size subset whose density moved only the promised way.

    side="low": delete maximum-degree vertices (density never increases);
    side="high": delete minimum-degree vertices (never decreases).
    Ties go to the lowest vertex id.
    """
    size = s.bit_count()
    if k > size:
        raise ValueError(f"cannot trim {size} vertices down to {k}")
    if side not in ("low", "high"):
        raise ValueError("side must be 'low' or 'high'")
    before = edge_density(g, s)
    current = s
    while current.bit_count() > k:
        best_v, best_d = None, None
        for v in iter_bits(current):
            d = (g.adj[v] & current).bit_count()
            if best_d is None or (d > best_d if side == "low" else d < best_d):
                best_v, best_d = v, d
        current &= ~(1 << best_v)
    after = edge_density(g, current)
    if current.bit_count() >= 2:
        if side == "low" and after > before:
            raise AssertionError("low-side trim increased density")
        if side == "high" and after < before:
            raise AssertionError("high-side trim decreased density")
    return current


def _greedy_shrink_to_density(g: Graph, target: Fraction) -> int:
    """Delete maximum-degree vertices until the density drops to target."""
    cur = g.full_mask
    while cur and edge_density(g, cur) > target:
        worst, worst_d = None, -1
        for v in iter_bits(cur):
            d = (g.adj[v] & cur).bit_count()
            if d > worst_d:
                worst, worst_d = v, d
        cur &= ~(1 << worst)
    return cur


def _greedy_independent(g: Graph) -> int:
    """Min-degree-first greedy independent set (lowest id breaks ties)."""
    order = sorted(range(g.n), key=lambda v: (g.adj[v].bit_count(), v))
    out = 0
    for v in order:
        if not g.adj[v] & out:
            out |= 1 << v
    return out


def _independent_set(g: Graph, node_budget: int = 20_000) -> int:
    """Branch-and-bound maximum independent set, seeded by the greedy one.

    Deterministic; gives up (returning the best found so far) once the
    node budget is spent, so worst-case inputs degrade to the greedy
    answer instead of stalling.  Beyond desk scale the greedy answer is
    returned outright: per-node pivot scans on wide bitsets dominate and
    exactness there buys nothing.
    """
    best = _greedy_independent(g)
    if g.n > 64:
        return best
    nodes = 0

    def bnb(cand: int, cur: int, cur_size: int):
        nonlocal best, nodes
        if nodes >= node_budget:
            return
        nodes += 1
        if cur_size + cand.bit_count() <= best.bit_count():
            return
        if not cand:
            if cur_size > best.bit_count():
                best = cur
            return
        # branch on the highest-degree candidate (within cand)
        pivot, pivot_d = -1, -1
        for v in iter_bits(cand):
            d = (g.adj[v] & cand).bit_count()
            if d > pivot_d:
                pivot, pivot_d = v, d
        bit = 1 << pivot
        bnb(cand & ~bit & ~g.adj[pivot], cur | bit, cur_size + 1)
        bnb(cand & ~bit, cur, cur_size)

    bnb(g.full_mask, 0, 0)
    return best


def _greedy_best_effort(g: Graph, eps1: Fraction, eps2: Fraction) -> tuple[int, str]:
    """Largest qualifying set among four cheap candidates: degree-deletion
    toward either density target, a greedy independent set (density 0),
    and a greedy clique (density 1).  Always succeeds: a singleton has
    density 0."""
    gc = complement(g)
    candidates = [
        (_greedy_shrink_to_density(g, eps1), "low"),
        (_greedy_shrink_to_density(gc, eps2), "high"),
        (_independent_set(g), "low"),
        (_independent_set(gc), "high"),
    ]
    best, best_side = 0, "low"
    for mask, side in candidates:
        if not mask:
            continue
        dens = edge_density(g, mask)
        if side == "low" and dens > eps1:
            continue
        if side == "high" and dens < 1 - eps2:
            continue
        if mask.bit_count() > best.bit_count():
            best, best_side = mask, side
    if not best:
        best = 1  # vertex 0: density 0 qualifies on the low side
        best_side = "low"
    return best, best_side


def _assert_merge_arithmetic(
    work: Graph, a1: int, b1: int, eps1: Fraction, eps: Fraction
) -> None:
    """The two-piece merge inequality, with exact rationals.

    |A1| = |B1| = k, both sides at density <= (3/2) eps1, at most
    (1/2) eps k^2 crossing edges  =>  the union has density <= eps1.
    """
    k = a1.bit_count()
    assert k == b1.bit_count()
    ea = work.edges_inside(a1)
    eb = work.edges_inside(b1)
    cross = work.edges_between(a1, b1)
    assert ea <= Fraction(3, 2) * eps1 * comb(k, 2)
    assert eb <= Fraction(3, 2) * eps1 * comb(k, 2)
    assert cross <= Fraction(1, 2) * eps * k * k
    total = ea + eb + cross
    assert total <= eps1 * comb(2 * k, 2), "merge arithmetic failed"


_MAX_RESIZE_ROUNDS = 32


def _search(
    g: Graph, pat: Pattern, eps1: Fraction, eps2: Fraction, depth: int
) -> tuple[int, str, bool]:
    d = edge_density(g)
    if d <= eps1:
        return g.full_mask, "low", True
    if d >= 1 - eps2:
        return g.full_mask, "high", True
    if depth <= 0 or g.n < pat.size:
        m, side = _greedy_best_effort(g, eps1, eps2)
        return m, side, False
    eps = min(eps1, eps2)
    found = find_tight_pair(g, pat, eps / 4)
    if isinstance(found, ManyCopiesResult):
        m, side = _greedy_best_effort(g, eps1, eps2)
        return m, side, False

    flipped = found.mode == "dense"
    if flipped:
        work = complement(g)
        we1, we2 = eps2, eps1
    else:
        work = g
        we1, we2 = eps1, eps2
    a_mask, b_mask = found.a, found.b

    def unflip(mask: int, side: str, flag: bool) -> tuple[int, str, bool]:
        if flipped:
            side = "high" if side == "low" else "low"
        return mask, side, flag

    def sub(mask: int, dep: int) -> tuple[int, str, bool]:
        """Recurse on the induced subgraph; result mapped to host ids."""
        sg, ids = induced_subgraph(work, mask)
        sm, side, flag = _search(sg, pat, Fraction(3, 2) * we1, we2, dep)
        host = mask_from_ids(ids[v] for v in iter_bits(sm))
        return host, side, flag

    s_b, side_b, flag_b = sub(b_mask, depth - 1)
    if side_b == "high":
        return unflip(s_b, "high", flag_b)
    k = min(s_b.bit_count(), a_mask.bit_count() // 2)
    if k == 0:
        m, side = _greedy_best_effort(g, eps1, eps2)
        return m, side, False
    b1 = trim_to_size(work, s_b, k, "low")
    flag_a = True
    for _ in range(_MAX_RESIZE_ROUNDS):
        a0 = 0
        for v in iter_bits(a_mask):
            if (work.adj[v] & b1).bit_count() <= Fraction(1, 2) * eps * k:
                a0 |= 1 << v
        assert 2 * a0.bit_count() > a_mask.bit_count(), "low-crossing core too small"
        s_a, side_a, fa = sub(a0, depth - 1)
        flag_a = flag_a and fa
        if side_a == "high":
            return unflip(s_a, "high", fa)
        if s_a.bit_count() >= k:
            a1 = trim_to_size(work, s_a, k, "low")
            _assert_merge_arithmetic(work, a1, b1, we1, eps)
            merged = a1 | b1
            assert edge_density(work, merged) <= we1
            return unflip(merged, "low", flag_b and flag_a)
        k = s_a.bit_count()
        if k == 0:
            break
        b1 = trim_to_size(work, b1, k, "low")
    m, side = _greedy_best_effort(g, eps1, eps2)
    return m, side, False


def find_low_or_high_density_subset(
    g: Graph, pat: Pattern, budget: ExtractionBudget
) -> DensitySubsetResult:
    """Subset with density <= eps1 or >= 1-eps2, never empty.

    Returns the larger of the recursive search's answer and the cheap
    greedy candidates (the recursion certifies its own size only through
    the guarantee machinery; a plain greedy clique or independent set is
    sometimes bigger and equally valid).  The guarantee flag is set only
    when every recursion step confirmed its preconditions AND the final
    size meets eta^depth * |G|.
    """
    if g.n == 0:
        raise ValueError("empty graph")
    mask, side, flag = _search(g, pat, budget.eps1, budget.eps2, budget.depth)
    alt_mask, alt_side = _greedy_best_effort(g, budget.eps1, budget.eps2)
    if alt_mask.bit_count() > mask.bit_count():
        mask, side = alt_mask, alt_side
    dens = edge_density(g, mask)
    if side == "low" and dens > budget.eps1:
        raise AssertionError("low-side result misses its density claim")
    if side == "high" and dens < 1 - budget.eps2:
        raise AssertionError("high-side result misses its density claim")
    guaranteed = flag and _meets_size_floor(mask.bit_count(), budget, g.n)
    return DensitySubsetResult(mask, side, guaranteed)


def _meets_size_floor(size: int, budget: ExtractionBudget, n: int) -> bool:
    """size >= eta^depth * n, without materialising astronomical powers.

    When the floor is provably below one vertex (decided on the log
    scale) any nonempty result passes; otherwise compare exactly.
    """
    import mpmath

    from .values import log2_fraction

    floor_log2 = budget.depth * log2_fraction(budget.eta) + mpmath.log(max(n, 1), 2)
    if floor_log2 < -1:
        return size >= 1
    return size >= budget.eta**budget.depth * n


def extract_restricted_exact(
    g: Graph,
    pat: Pattern,
    eps: Fraction,
    delta: Fraction,
    depth: int | None = None,
) -> int:
    """An eps-restricted set of size exactly ceil(delta * |G|).

    Pipeline: density subset at eps/8 targets -> trim to ceil(2 delta |G|)
    -> weak-to-strong conversion (which halves the size and lands exactly
    on ceil(delta |G|)).  delta must be at most 1/4 so that the removal
    consequences hold: |T| = 1 when |G| = 1, and |G - T| >= |G|/2 when
    |G| >= 2.
    """
    if g.n < 1:
        raise ValueError("empty graph")
    if not 0 < delta <= Fraction(1, 4):
        raise ValueError("delta must lie in (0, 1/4]")
    target2 = ceil_frac(2 * delta * g.n)
    eighth = eps / 8
    budget = ExtractionBudget.practical(
        eighth, eighth, depth if depth is not None else depth_for(eighth), h=pat.size
    )
    res = find_low_or_high_density_subset(g, pat, budget)
    if res.vertices.bit_count() < target2:
        raise ExtractionInfeasible(
            f"density subset has {res.vertices.bit_count()} vertices, "
            f"need {target2}; lower delta or eps"
        )
    trimmed = trim_to_size(g, res.vertices, target2, res.side)
    t = extract_restricted_from_weak(g, trimmed, eps)
    if t.bit_count() != ceil_frac(delta * g.n):
        raise AssertionError("exact-size extraction missed its target size")
    if not is_restricted(g, t, eps):
        raise AssertionError("extracted set fails its restrictedness recheck")
    if g.n == 1 and t.bit_count() != 1:
        raise AssertionError("singleton graph must yield a singleton")
    if g.n >= 2 and (g.n - t.bit_count()) * 2 < g.n:
        raise AssertionError("extraction removed more than half the graph")
    return t


def _greedy_restricted_chunk(g: Graph, pool: int, eps: Fraction) -> int:
    """Grow a restricted subset of the pool greedily by ascending id."""
    chunk = 0
    for v in iter_bits(pool):
        cand = chunk | (1 << v)
        if is_restricted(g, cand, eps):
            chunk = cand
    return chunk


@dataclass(frozen=True)
class PeelChain:
    peels: tuple[int, ...]  # host-graph masks, disjoint, all eps-restricted
    leftover: int  # final U_p with |U_p| <= eta * |U_0|
    eps: Fraction
    eta: Fraction
    delta: Fraction
    phi_bound: int
    guaranteed: bool  # every peel met the delta fraction

    @property
    def length(self) -> int:
        return len(self.peels)


def peel_chain(
    g: Graph,
    pat: Pattern,
    eps: Fraction,
    eta: Fraction,
    delta: Fraction,
    use_pipeline: bool = True,
) -> PeelChain:
    """Repeatedly peel eps-restricted sets of fractional size >= delta until
    at most an eta fraction of the vertices remains.

    When the pipeline extractor cannot reach the delta fraction the peel
    degrades to a greedy chunk or a single vertex (still a valid
    restricted peel) and the chain is flagged: its length may then exceed
    phi(delta, eta).
    """
    if not (0 < eta < 1 and 0 < delta < 1):
        raise ValueError("eta and delta must lie in (0,1)")
    bound = phi(delta, eta)
    u = g.full_mask
    total = g.n
    peels: list[int] = []
    guaranteed = True
    while u.bit_count() > eta * total:
        need = ceil_frac(delta * u.bit_count())
        peel = _greedy_restricted_chunk(g, u, eps)
        if use_pipeline and peel.bit_count() < u.bit_count():
            sub, ids = induced_subgraph(g, u)
            try:
                local = extract_restricted_exact(
                    sub, pat, eps, min(delta, Fraction(1, 4))
                )
                candidate = mask_from_ids(ids[v] for v in iter_bits(local))
                if candidate.bit_count() > peel.bit_count():
                    peel = candidate
            except (ExtractionInfeasible, ValueError):
                pass
        if not peel:
            peel = u & -u  # lowest-id single vertex
        if peel.bit_count() < need:
            guaranteed = False
        if not is_restricted(g, peel, eps):
            raise AssertionError("peel fails its restrictedness recheck")
        peels.append(peel)
        u &= ~peel
    if len(peels) > bound and guaranteed:
        raise AssertionError("chain exceeded phi despite meeting every delta fraction")
    return PeelChain(tuple(peels), u, eps, eta, delta, bound, guaranteed)
