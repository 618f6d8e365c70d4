"""The working-partition iteration: grow a blowup or split off a small vertex set.

State is an (m,n,t)-partition of V(G): m pairs (A_i,B_i) with A_i
eps-restricted and B_i a tiny theta-tight companion, n eps-restricted
singles C_j, a t-part blowup D_1..D_t of the first t pattern labels, and
a leftover set L dominated by every D_i.  One step computes the set S of
leftover vertices with the correct adjacencies into every D_i; if S is
small (<= d) the partition is rearranged into the final rows, otherwise
a restricted core of S is densified against each D_i in turn, producing
a (t+1)-part blowup plus freshly peeled singles, and t increases.  Since
t is capped by the pattern size, either the rearrangement happens within
h steps or the graph exhibits a full blowup of the pattern, which forces
many copies; under the exact constant schedule that contradicts the copy
budget, and in practical runs it is a legitimate reported outcome.

Every assembled partition is re-verified clause by clause before the
iteration continues; nothing downstream trusts the construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import mpmath

from .embedding import blowup_copy_bound
from .extraction import ExtractionInfeasible, extract_restricted_exact, peel_chain, phi
from .fullpair import FullPairParams, find_full_pair
from .graph import (
    Graph,
    Pattern,
    count_embeddings_into_parts,
    induced_subgraph,
    iter_bits,
    mask_from_ids,
)
from .ledger import ConstantsLedger, build_ledger
from .predicates import (
    BlowupCertificate,
    EnumerationBudgetError,
    is_restricted,
    is_tight_to,
    verify_blowup,
)
from .values import LogValue, Scalar, scalar_log2


class InfeasibleAtScale(RuntimeError):
    """Exact-schedule constants cannot drive a run at this graph scale."""


class StepFailure(RuntimeError):
    """A sub-procedure failed during one iteration; carries step context."""


@dataclass(frozen=True)
class KeyParams:
    """Parameter schedule for the iteration.

    eps/eta/theta bound the output rows; xi (at most theta/4) is the
    blowup density; eps_schedule[t] is the restrictedness level of the
    t-part blowup row; lam is the per-step size fraction the chain must
    achieve; delta_prime sizes the restricted core pulled out of S;
    eta_prime caps the peel leftover.  Coherence conditions validated
    here are exactly the ones the assembled-partition verification
    leans on.
    """

    h: int
    eps: Fraction
    eta: Fraction
    theta: Fraction
    xi: Fraction
    eps_schedule: tuple[Fraction, ...]  # index t = 0..h
    lam: Fraction
    delta_prime: Scalar
    eta_prime: Scalar
    mode: str = "practical"
    ledger: ConstantsLedger | None = field(default=None, compare=False)

    def __post_init__(self):
        for name, val in (("eps", self.eps), ("eta", self.eta), ("theta", self.theta)):
            if not Fraction(0) < val < Fraction(1, 2):
                raise ValueError(f"{name} must lie in (0, 1/2)")
        if not Fraction(0) < self.xi <= self.theta / 4:
            raise ValueError("xi must lie in (0, theta/4]")
        if len(self.eps_schedule) != self.h + 1:
            raise ValueError("eps_schedule must list eps_0..eps_h")
        if self.eps_schedule[self.h] > self.eps:
            raise ValueError("eps_h must not exceed eps")
        for t in range(self.h):
            if self.eps_schedule[t] > self.eps_schedule[t + 1]:
                raise ValueError("eps_schedule must be nondecreasing in t")
        if not Fraction(0) < self.lam <= Fraction(1, 3):
            raise ValueError("lam must lie in (0, 1/3]")
        if isinstance(self.delta_prime, Fraction) and not (
            Fraction(0) < self.delta_prime <= Fraction(1, 4)
        ):
            raise ValueError("delta_prime must lie in (0, 1/4]")
        if isinstance(self.eta_prime, Fraction) and isinstance(self.delta_prime, Fraction):
            cap = Fraction(1, 2) * self.eta * self.delta_prime * self.lam ** (self.h - 1)
            if self.eta_prime > cap:
                raise ValueError(
                    f"eta_prime must be at most eta*delta_prime*lam^(h-1)/2 = {cap}"
                )
            if self.eta_prime > self.lam:
                raise ValueError("eta_prime must be at most lam")

    @staticmethod
    def practical(
        pat: Pattern,
        eps: Fraction,
        eta: Fraction = Fraction(1, 4),
        theta: Fraction = Fraction(1, 4),
        lam: Fraction | None = None,
        delta_prime: Fraction = Fraction(1, 8),
        eta_prime: Fraction | None = None,
        eps_top: Fraction | None = None,
    ) -> "KeyParams":
        h = pat.size
        xi = theta / 4
        if lam is None:
            # the chain's b-side is only guaranteed a 2*xi fraction of
            # correct neighbors, so the floor must not exceed that
            lam = min(Fraction(1, 3), 2 * xi)
        eps_h = eps_top if eps_top is not None else min(eps, xi**h)
        schedule = [eps_h]
        for _ in range(h):
            schedule.append(schedule[-1] * lam)
        schedule.reverse()
        if eta_prime is None:
            eta_prime = Fraction(1, 2) * eta * delta_prime * lam ** (h - 1)
        return KeyParams(
            h, eps, eta, theta, xi, tuple(schedule), lam, delta_prime, eta_prime
        )

    @staticmethod
    def paper(
        pat: Pattern, eps: Fraction, eta: Fraction, theta: Fraction
    ) -> "KeyParams":
        """Exact-schedule parameters, materialised from the ledger.

        Raises InfeasibleAtScale when the schedule cannot be represented
        exactly even with surrogates; the diagnostic names the first
        constant that failed.
        """
        h = pat.size
        led = build_ledger(h, eps, eta, theta)
        xi = theta / 4
        schedule = []
        for t in range(h + 1):
            entry = led.get(f"eps[{t}]")
            if entry.exact is None:
                raise InfeasibleAtScale(
                    f"eps[{t}] is not exactly representable at this scale "
                    f"({entry.describe()}); use practical parameters"
                )
            schedule.append(entry.exact)
        dp = led.get("delta_prime")
        ep = led.get("eta_prime")
        delta_prime: Scalar = dp.exact if dp.exact is not None else LogValue(dp.log2)
        eta_prime: Scalar = ep.exact if ep.exact is not None else LogValue(ep.log2)
        lam_min = None
        for t in range(h):
            for i in range(t + 1):
                entry = led.get(f"lambda[{t},{i}]")
                val = entry.exact if entry.exact is not None else None
                if val is not None and (lam_min is None or val < lam_min):
                    lam_min = val
        # the realized chain fractions only matter through size floors;
        # a saturated lambda row means floor 1, which Fraction(0+) below
        # cannot express, so pass the smallest representable row value or
        # a scale surrogate at run time.
        lam = lam_min if lam_min is not None else Fraction(1, 3)
        return KeyParams(
            h,
            eps,
            eta,
            theta,
            xi,
            tuple(schedule),
            min(lam, Fraction(1, 3)),
            delta_prime,
            eta_prime,
            mode="paper",
            ledger=led,
        )

    # -- scale-aware accessors -------------------------------------------

    def delta_prime_at(self, scale: int) -> Fraction:
        """delta' as an exact fraction, or a surrogate equivalent at sizes <= scale."""
        if isinstance(self.delta_prime, Fraction):
            return self.delta_prime
        if self.delta_prime * scale < 1:  # LogValue comparison, sound
            return Fraction(1, 4 * scale)
        raise InfeasibleAtScale("delta_prime not representable at this scale")

    def eta_prime_at(self, scale: int) -> Fraction:
        if isinstance(self.eta_prime, Fraction):
            return self.eta_prime
        if self.eta_prime * scale < 1:
            return Fraction(1, 4 * scale)
        raise InfeasibleAtScale("eta_prime not representable at this scale")

    def gamma_chain(self, t: int, i: int) -> Fraction:
        """Gamma(t,i) = lam^(t-i): required shrink of S_t relative to S_i."""
        return self.lam ** (t - i)

    def step_c(self, t: int, i: int) -> Fraction:
        """Fullness parameter for chain step i at level t -> t+1."""
        return Fraction(1, 3) * self.eps_schedule[t + 1] * self.gamma_chain(t, i)

    def big_lambda(self, t: int, i: int) -> Scalar:
        """Lambda(t,i): D_i must exceed Lambda(t,i) * d.

        With a uniform per-step fraction the table collapses:
        Lambda(i,i) = delta' * lam^(i-1) and each later level multiplies
        by lam once, so Lambda(t,i) = delta' * lam^(t-1) for every i.
        """
        return self.delta_prime * self.lam ** (t - 1)

    def eps_prime(self) -> Fraction:
        """Restrictedness level of the extracted core: min_t eps_{t+1}*Gamma(t,0)."""
        return min(
            self.eps_schedule[t + 1] * self.gamma_chain(t, 0) for t in range(self.h)
        )

    def phi_bound(self) -> int | None:
        """phi(delta', eta') when exactly computable, else None (astronomical)."""
        if isinstance(self.delta_prime, Fraction) and isinstance(self.eta_prime, Fraction):
            return phi(self.delta_prime, self.eta_prime)
        return None

    def n_bound_holds(self, n: int, multiplier: int) -> bool:
        """Decide n <= multiplier * phi(delta', eta') soundly."""
        if multiplier == 0:
            return n == 0
        exact = self.phi_bound()
        if exact is not None:
            return n <= multiplier * exact
        # phi >= ln(1/eta')/delta' / (1 + delta'); with tiny delta' this
        # lower bound dwarfs any desk-scale n.
        lower_log2 = (
            mpmath.log(-scalar_log2(self.eta_prime) * mpmath.log(2), 2)
            - scalar_log2(self.delta_prime)
            - 1
        )
        return mpmath.log(max(n, 1), 2) <= lower_log2 + mpmath.log(multiplier, 2)

    def part_bound_holds(self, n: int) -> bool:
        """Decide n <= N = C(h,2) + (h-1)*phi(delta', eta')."""
        slack = comb(self.h, 2)
        if n <= slack:
            return True
        return self.n_bound_holds(n - slack, self.h - 1)


@dataclass(frozen=True)
class MNTPartition:
    """The invariant-laden working partition; see module docstring."""

    a_sets: tuple[int, ...]
    b_sets: tuple[int, ...]  # same length as a_sets; entries may be empty
    c_sets: tuple[int, ...]
    d_sets: tuple[int, ...]
    leftover: int
    params: KeyParams
    d_budget: int

    @property
    def m(self) -> int:
        return len(self.a_sets)

    @property
    def n(self) -> int:
        return len(self.c_sets)

    @property
    def t(self) -> int:
        return len(self.d_sets)

    @staticmethod
    def trivial(g: Graph, params: KeyParams, d_budget: int) -> "MNTPartition":
        return MNTPartition((), (), (), (), g.full_mask, params, d_budget)


@dataclass(frozen=True)
class MNTReport:
    ok: bool
    clause: str | None = None
    detail: str = ""
    exact: bool = True  # False when a blowup pair was only sample-checked


def verify_mnt_partition(
    g: Graph, pat: Pattern, p: MNTPartition, full_pair_budget: int = 10**7
) -> MNTReport:
    """Check all six invariant groups; returns the first violated clause."""
    pr = p.params
    if len(p.b_sets) != len(p.a_sets):
        return MNTReport(False, "shape", "one B per A required")
    if p.t > pat.size:
        return MNTReport(False, "shape", "more blowup parts than pattern labels")

    union = p.leftover
    for mask in (*p.a_sets, *p.b_sets, *p.c_sets, *p.d_sets):
        if mask & union:
            return MNTReport(False, "disjoint-union", "sets overlap")
        union |= mask
    if union != g.full_mask:
        return MNTReport(False, "disjoint-union", "sets do not cover V(G)")

    if p.m > comb(p.t, 2):
        return MNTReport(False, "counts", f"m={p.m} exceeds C(t,2)={comb(p.t, 2)}")
    if not pr.n_bound_holds(p.n, p.t):
        return MNTReport(False, "counts", f"n={p.n} exceeds t*phi(delta',eta')")

    for i, a in enumerate(p.a_sets, start=1):
        if not a:
            return MNTReport(False, f"a-nonempty:{i}")
        if not is_restricted(g, a, pr.eps):
            return MNTReport(False, f"a-restricted:{i}")
    for j, c in enumerate(p.c_sets, start=1):
        if not c:
            return MNTReport(False, f"c-nonempty:{j}")
        if not is_restricted(g, c, pr.eps):
            return MNTReport(False, f"c-restricted:{j}")

    for i, (a, b) in enumerate(zip(p.a_sets, p.b_sets), start=1):
        if b.bit_count() > pr.eta * a.bit_count():
            return MNTReport(False, f"b-size:{i}")
        if b and not is_tight_to(g, a, b, pr.theta, "tight").ok:
            return MNTReport(False, f"b-tight:{i}")

    exact = True
    if p.t > 0:
        eps_t = pr.eps_schedule[p.t]
        cert = BlowupCertificate(p.d_sets, eps_t, pr.xi, pat.prefix(p.t))
        try:
            chk = verify_blowup(g, cert, method="exact", budget=full_pair_budget)
        except EnumerationBudgetError:
            chk = verify_blowup(g, cert, method="sampled")
            exact = False
        if not chk.ok:
            return MNTReport(False, f"blowup:{chk.failing_pair}", exact=exact)
        ell = p.leftover.bit_count()
        for i, dset in enumerate(p.d_sets, start=1):
            size = dset.bit_count()
            lam_d = pr.big_lambda(p.t, i)
            if isinstance(lam_d, Fraction):
                if p.d_budget and not size > lam_d * p.d_budget:
                    return MNTReport(False, f"d-threshold:{i}", "Lambda*d bound")
            else:
                if p.d_budget and not lam_d * p.d_budget < Fraction(size):
                    return MNTReport(False, f"d-threshold:{i}", "Lambda*d bound (log)")
            if not size * pr.eta > 2 * ell:
                return MNTReport(False, f"d-threshold:{i}", "2/eta * |L| bound")
            if not is_restricted(g, dset, eps_t):
                return MNTReport(False, f"d-restricted:{i}")
    return MNTReport(True, exact=exact)


@dataclass(frozen=True)
class StepRecord:
    """One iteration's intermediate objects, in host-graph ids."""

    t: int
    correct_set: int  # S
    finished: bool
    l_parts: tuple[int, ...] = ()
    core: int = 0  # S_0
    chain: tuple[int, ...] = ()  # S_1..S_t
    d_primes: tuple[int, ...] = ()
    p_sets: tuple[int, ...] = ()
    peel_sets: tuple[int, ...] = ()
    peel_leftover: int = 0


@dataclass(frozen=True)
class KeyLemmaResult:
    removed: int
    pairs: tuple[tuple[int, int], ...]  # (A_i, B_i), B_i nonempty
    singles: tuple[int, ...]
    params: KeyParams
    d_budget: int
    transcript: tuple[StepRecord, ...] = ()


@dataclass(frozen=True)
class BlowupFound:
    certificate: BlowupCertificate
    copy_count: int
    copy_bound: Fraction
    contradiction_checked: bool
    transcript: tuple[StepRecord, ...] = ()


def _correct_adjacency_split(
    g: Graph, pat: Pattern, p: MNTPartition
) -> tuple[int, list[int]]:
    """S = leftover vertices adjacent 'correctly' to every D_i for label t+1;
    the rest lands in L_i for the least i whose condition it fails."""
    pr = p.params
    t = p.t
    s_mask = 0
    l_parts = [0] * t
    for u in iter_bits(p.leftover):
        fail_at = None
        for i in range(1, t + 1):
            di = p.d_sets[i - 1]
            ni = di.bit_count()
            deg = (g.adj[u] & di).bit_count()
            correct = deg if pat.label_edge(i, t + 1) else ni - deg
            if not correct >= 2 * pr.xi * ni:
                fail_at = i
                break
        if fail_at is None:
            s_mask |= 1 << u
        else:
            l_parts[fail_at - 1] |= 1 << u
    return s_mask, l_parts


def _finish(
    g: Graph, pat: Pattern, p: MNTPartition, s_mask: int, l_parts: list[int]
) -> KeyLemmaResult:
    pr = p.params
    pairs = [(a, b) for a, b in zip(p.a_sets, p.b_sets) if b]
    pairs += [(d, l) for d, l in zip(p.d_sets, l_parts) if l]
    singles = [a for a, b in zip(p.a_sets, p.b_sets) if not b]
    singles += [d for d, l in zip(p.d_sets, l_parts) if not l]
    singles += list(p.c_sets)
    h = pat.size
    if len(pairs) > comb(h, 2):
        raise AssertionError("final pair count exceeds C(h,2)")
    if not pr.part_bound_holds(len(singles)):
        raise AssertionError("final single count exceeds N")
    return KeyLemmaResult(
        removed=s_mask,
        pairs=tuple(pairs),
        singles=tuple(singles),
        params=pr,
        d_budget=p.d_budget,
    )


def advance_or_finish(
    g: Graph, pat: Pattern, p: MNTPartition, verify: bool = True
) -> tuple[KeyLemmaResult | MNTPartition, StepRecord]:
    """One iteration: finish (|S| <= d) or assemble the (m+t, n+s, t+1)-partition."""
    pr = p.params
    t = p.t
    if t >= pat.size:
        raise ValueError("cannot advance a partition that already reached t = h")
    if verify:
        rep = verify_mnt_partition(g, pat, p)
        if not rep.ok:
            raise StepFailure(f"input partition invalid at clause {rep.clause}")

    s_mask, l_parts = _correct_adjacency_split(g, pat, p)
    s_size = s_mask.bit_count()
    if s_size <= p.d_budget:
        for i, (dset, l) in enumerate(zip(p.d_sets, l_parts), start=1):
            if l and not is_tight_to(g, dset, l, 2 * pr.xi, "tight").ok:
                raise AssertionError(f"leftover residue not 2xi-tight to D_{i}")
        rec = StepRecord(t=t, correct_set=s_mask, finished=True, l_parts=tuple(l_parts))
        return _finish(g, pat, p, s_mask, l_parts), rec

    # -- full step: extract a restricted core of S and densify it against
    #    each D_i in turn.
    sub_s, ids_s = induced_subgraph(g, s_mask)
    try:
        core_local = extract_restricted_exact(
            sub_s, pat, pr.eps_prime(), pr.delta_prime_at(s_size)
        )
    except ExtractionInfeasible as exc:
        raise StepFailure(f"core extraction failed at t={t}: {exc}") from exc
    s0 = mask_from_ids(ids_s[v] for v in iter_bits(core_local))

    chain = []
    d_primes = []
    p_sets = []
    s_prev = s0
    for i in range(1, t + 1):
        di = p.d_sets[i - 1]
        polarity = "full" if pat.label_edge(i, t + 1) else "empty"
        fp = FullPairParams(pr.step_c(t, i), pr.xi, min_frac=pr.lam)
        try:
            cert = find_full_pair(g, s_prev, di, fp, polarity=polarity)
        except Exception as exc:
            raise StepFailure(f"chain step {i} at t={t} failed: {exc}") from exc
        s_i, d_i_prime = cert.a, cert.b
        if s_i.bit_count() < pr.lam * s_prev.bit_count():
            raise StepFailure(f"chain step {i}: core shrank below lam fraction")
        if d_i_prime.bit_count() < pr.lam * di.bit_count():
            raise StepFailure(f"chain step {i}: D side shrank below lam fraction")
        half = di.bit_count() // 2
        want = min(d_i_prime.bit_count(), half)
        p_i = 0
        for v in iter_bits(d_i_prime):
            if want == 0:
                break
            p_i |= 1 << v
            want -= 1
        if not p_i or 2 * (di & ~p_i).bit_count() < di.bit_count():
            raise AssertionError("P_i must leave at least half of D_i")
        # the next level's blowup scaling needs both of these
        if p_i.bit_count() < pr.lam * di.bit_count():
            raise AssertionError("P_i fell below the lam fraction of D_i")
        if 3 * p_i.bit_count() < d_i_prime.bit_count():
            raise AssertionError("P_i fell below a third of the certified side")
        chain.append(s_i)
        d_primes.append(d_i_prime)
        p_sets.append(p_i)
        s_prev = s_i
    s_t = s_prev

    rest = s_mask & ~s_t
    if s_size == 1:
        peels: tuple[int, ...] = ()
        new_leftover = 0
    else:
        sub_r, ids_r = induced_subgraph(g, rest)
        eta_p = pr.eta_prime_at(rest.bit_count())
        delta_p = pr.delta_prime_at(rest.bit_count())
        try:
            pc = peel_chain(sub_r, pat, pr.eps, eta_p, delta_p)
        except Exception as exc:
            raise StepFailure(f"peeling failed at t={t}: {exc}") from exc
        peels = tuple(
            mask_from_ids(ids_r[v] for v in iter_bits(q)) for q in pc.peels
        )
        new_leftover = mask_from_ids(ids_r[v] for v in iter_bits(pc.leftover))
        if new_leftover.bit_count() > eta_p * rest.bit_count():
            raise AssertionError("peel leftover exceeds its eta' bound")
        if not pr.n_bound_holds(len(peels), 1):
            raise StepFailure(
                f"peeling produced {len(peels)} > phi(delta',eta') sets at t={t}"
            )

    new_pairs_a = list(p.a_sets) + [d & ~pi for d, pi in zip(p.d_sets, p_sets)]
    new_pairs_b = list(p.b_sets) + list(l_parts)
    new_c = list(p.c_sets) + list(peels)
    new_d = p_sets + [s_t]
    nxt = MNTPartition(
        tuple(new_pairs_a),
        tuple(new_pairs_b),
        tuple(new_c),
        tuple(new_d),
        new_leftover,
        pr,
        p.d_budget,
    )
    rec = StepRecord(
        t=t,
        correct_set=s_mask,
        finished=False,
        l_parts=tuple(l_parts),
        core=s0,
        chain=tuple(chain),
        d_primes=tuple(d_primes),
        p_sets=tuple(p_sets),
        peel_sets=peels,
        peel_leftover=new_leftover,
    )
    if verify:
        rep = verify_mnt_partition(g, pat, nxt)
        if not rep.ok:
            raise StepFailure(
                f"assembled (m={nxt.m},n={nxt.n},t={nxt.t})-partition fails "
                f"clause {rep.clause}: {rep.detail}"
            )
    return nxt, rec


def verify_key_result(g: Graph, pat: Pattern, res: KeyLemmaResult) -> None:
    """Independent recheck of every output clause; raises on failure."""
    pr = res.params
    h = pat.size
    if res.removed.bit_count() > res.d_budget:
        raise AssertionError("removed set exceeds the budget")
    union = res.removed
    for a, b in res.pairs:
        if not a or not b:
            raise AssertionError("pair with an empty side")
        if (a | b) & union or a & b:
            raise AssertionError("output sets overlap")
        union |= a | b
        if not is_restricted(g, a, pr.eps):
            raise AssertionError("pair A-side not eps-restricted")
        if b.bit_count() > pr.eta * a.bit_count():
            raise AssertionError("pair B-side too large")
        if not is_tight_to(g, a, b, pr.theta, "tight").ok:
            raise AssertionError("pair B-side not theta-tight")
    for c in res.singles:
        if not c:
            raise AssertionError("empty single")
        if c & union:
            raise AssertionError("output sets overlap")
        union |= c
        if not is_restricted(g, c, pr.eps):
            raise AssertionError("single not eps-restricted")
    if union != g.full_mask:
        raise AssertionError("output does not cover V(G)")
    if len(res.pairs) > comb(h, 2):
        raise AssertionError("pair count exceeds C(h,2)")
    if not pr.part_bound_holds(len(res.singles)):
        raise AssertionError("single count exceeds N")


def run_key_lemma(
    g: Graph,
    pat: Pattern,
    params: KeyParams,
    d_budget: int,
    max_steps: int | None = None,
    start: MNTPartition | None = None,
) -> KeyLemmaResult | BlowupFound:
    """Iterate from the trivial partition (or a verified resume state);
    see module docstring.

    Exact-schedule runs first check the copy budget ind <= kappa * d^h
    and refuse when the constants cannot decide it at this scale.
    """
    if d_budget < 0:
        raise ValueError("removal budget must be nonnegative")
    h = pat.size
    if params.mode == "paper":
        _paper_precheck(g, pat, params, d_budget)
    p = start if start is not None else MNTPartition.trivial(g, params, d_budget)
    transcript: list[StepRecord] = []
    if p.t == h:
        return _blowup_found(g, pat, params, p, d_budget, transcript)
    for _ in range(max_steps if max_steps is not None else h + 1):
        outcome, rec = advance_or_finish(g, pat, p)
        transcript.append(rec)
        if isinstance(outcome, KeyLemmaResult):
            result = KeyLemmaResult(
                outcome.removed,
                outcome.pairs,
                outcome.singles,
                outcome.params,
                outcome.d_budget,
                tuple(transcript),
            )
            verify_key_result(g, pat, result)
            return result
        p = outcome
        if p.t == h:
            return _blowup_found(g, pat, params, p, d_budget, transcript)
    raise AssertionError("iteration exceeded h steps without finishing")


def _blowup_found(
    g: Graph,
    pat: Pattern,
    params: KeyParams,
    p: MNTPartition,
    d_budget: int,
    transcript: list[StepRecord],
) -> BlowupFound:
    h = pat.size
    eps_h = params.eps_schedule[h]
    cert = BlowupCertificate(p.d_sets, eps_h, params.xi, pat.prefix(h))
    chk = verify_blowup(g, cert, method="exact")
    if not chk.ok:
        raise AssertionError("blowup row failed its exact recheck at t=h")
    count = count_embeddings_into_parts(g, pat, p.d_sets)
    sizes = [d.bit_count() for d in p.d_sets]
    bound = blowup_copy_bound(h, params.xi, sizes, exponent_form="h")
    contradiction = False
    if eps_h <= params.xi**h:
        if count < bound:
            raise AssertionError("blowup found but the copy lower bound fails")
        if params.mode == "paper" and params.ledger is not None:
            kap = params.ledger.get("kappa")
            lhs = mpmath.log(max(count, 1), 2)
            rhs = kap.log2 + h * mpmath.log(max(d_budget, 1), 2)
            if d_budget and lhs <= rhs:
                raise AssertionError(
                    "exact-schedule contradiction failed: count within kappa*d^h"
                )
            contradiction = True
    return BlowupFound(cert, count, bound, contradiction, tuple(transcript))


def _paper_precheck(g: Graph, pat: Pattern, params: KeyParams, d_budget: int) -> None:
    from .graph import count_induced_copies

    assert params.ledger is not None
    kap = params.ledger.get("kappa")
    ind = count_induced_copies(g, pat)
    if ind == 0:
        return
    # need ind <= kappa * d^h; kappa's log2 is an upper bound, so this
    # refusal errs on the safe side.
    if d_budget == 0:
        raise InfeasibleAtScale("exact schedule needs ind(G) = 0 when d = 0")
    lhs = mpmath.log(ind, 2)
    rhs = kap.log2 + pat.size * mpmath.log(d_budget, 2)
    if lhs > rhs:
        raise InfeasibleAtScale(
            "constants infeasible at this scale: ind(G) exceeds kappa*d^h "
            f"(log2 ind = {mpmath.nstr(lhs, 8)}, log2 kappa*d^h <= {mpmath.nstr(rhs, 8)})"
        )
