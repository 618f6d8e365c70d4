import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_graph
from rpt.graph import (
    Graph,
    Pattern,
    complement,
    edge_density,
    mask_from_ids,
    mask_to_ids,
    named_pattern,
)
from rpt.predicates import (
    BlowupCertificate,
    CheckPreconditionError,
    FullPairCertificate,
    extract_restricted_from_weak,
    is_full_pair,
    is_restricted,
    is_tight_to,
    is_weakly_restricted,
    min_subpair_sizes,
    verify_blowup,
)

HALF = Fraction(1, 2)


class TestTightness:
    def test_empty_b_is_vacuously_tight(self):
        g = Graph.empty(4)
        for mode in ("sparse", "dense", "tight"):
            assert is_tight_to(g, 0b0011, 0, HALF, mode).ok

    def test_complete_bipartite_modes(self):
        g = Graph.from_edges(6, [(u, v) for u in range(3) for v in range(3, 6)])
        a, b = 0b000111, 0b111000
        assert not is_tight_to(g, a, b, HALF, "sparse").ok
        assert is_tight_to(g, a, b, HALF, "dense").ok
        assert is_tight_to(g, a, b, HALF, "tight").ok

    def test_empty_a_rejected(self):
        with pytest.raises(CheckPreconditionError):
            is_tight_to(Graph.empty(3), 0, 0b011, HALF, "sparse")

    def test_overlap_rejected(self):
        with pytest.raises(CheckPreconditionError):
            is_tight_to(Graph.empty(3), 0b011, 0b010, HALF, "sparse")

    def test_strictness_at_the_boundary(self):
        # one vertex with exactly eps*|A| neighbors violates the strict bound
        g = Graph.from_edges(3, [(0, 2)])
        a, b = 0b011, 0b100
        assert not is_tight_to(g, a, b, HALF, "sparse").ok
        assert is_tight_to(g, a, b, Fraction(51, 100), "sparse").ok

    @given(st.integers(0, 200))
    @settings(max_examples=40)
    def test_sparse_monotone_in_eps(self, seed):
        g = random_graph(8, 0.4, seed)
        a, b = 0b00001111, 0b11110000
        for num in range(1, 8):
            eps = Fraction(num, 8)
            if is_tight_to(g, a, b, eps, "sparse").ok:
                assert is_tight_to(g, a, b, eps + Fraction(1, 8), "sparse").ok

    @given(st.integers(0, 200))
    @settings(max_examples=40)
    def test_full_in_graph_is_empty_in_complement(self, seed):
        g = random_graph(8, 0.5, seed)
        cert_f = FullPairCertificate(0b00001111, 0b11110000, HALF, Fraction(1, 4), "full")
        cert_e = FullPairCertificate(0b00001111, 0b11110000, HALF, Fraction(1, 4), "empty")
        assert is_full_pair(g, cert_f).ok == is_full_pair(complement(g), cert_e).ok

    @given(st.integers(0, 300))
    @settings(max_examples=60)
    def test_matches_direct_degree_scan(self, seed):
        g = random_graph(9, 0.5, seed)
        a, b = 0b000011111, 0b111100000
        eps = Fraction(1, 3)
        res = is_tight_to(g, a, b, eps, "tight")
        na = a.bit_count()
        sparse = all((g.adj[v] & a).bit_count() < eps * na for v in mask_to_ids(b))
        dense = all(
            na - (g.adj[v] & a).bit_count() < eps * na for v in mask_to_ids(b)
        )
        assert res.ok == (sparse or dense)
        if not res.ok:
            assert res.witness is not None


class TestRestricted:
    def test_independent_set_always_restricted(self):
        g = Graph.from_edges(5, [(0, 1)])
        assert is_restricted(g, 0b11100, Fraction(0))

    def test_c5_spot_value(self):
        c5 = Graph.cycle(5)
        assert not is_restricted(c5, c5.full_mask, Fraction(3, 10))
        assert is_restricted(c5, c5.full_mask, Fraction(2, 5))

    def test_clique_restricted_via_complement(self):
        g = Graph.complete(4)
        assert is_restricted(g, g.full_mask, HALF)

    def test_small_sets(self):
        g = Graph.complete(3)
        assert is_restricted(g, 0, Fraction(0))
        assert is_restricted(g, 0b1, Fraction(0))

    @given(st.integers(0, 200), st.integers(1, 8))
    @settings(max_examples=60)
    def test_monotone_in_eps(self, seed, num):
        g = random_graph(8, 0.5, seed)
        s = g.full_mask
        eps = Fraction(num, 8)
        if is_restricted(g, s, eps):
            assert is_restricted(g, s, eps + Fraction(1, 8))

    @given(st.integers(0, 200))
    @settings(max_examples=60)
    def test_complement_duality(self, seed):
        g = random_graph(8, 0.5, seed)
        s = 0b01111110
        for eps in (Fraction(1, 4), Fraction(1, 2)):
            assert is_restricted(g, s, eps) == is_restricted(complement(g), s, eps)


class TestWeaklyRestricted:
    def test_c5_boundary(self):
        c5 = Graph.cycle(5)
        assert is_weakly_restricted(c5, c5.full_mask, HALF)
        assert not is_weakly_restricted(c5, c5.full_mask, Fraction(2, 5))

    @given(st.integers(0, 200))
    @settings(max_examples=60)
    def test_half_eps_restricted_implies_weak(self, seed):
        g = random_graph(8, 0.5, seed)
        s = g.full_mask
        eps = Fraction(1, 2)
        if is_restricted(g, s, eps / 2):
            assert is_weakly_restricted(g, s, eps)


class TestExtractFromWeak:
    def test_singleton(self):
        g = Graph.complete(1)
        assert extract_restricted_from_weak(g, 0b1, HALF) == 0b1

    def test_independent_input(self):
        g = Graph.empty(7)
        out = extract_restricted_from_weak(g, g.full_mask, Fraction(1, 4))
        assert out.bit_count() == 4  # ceil(7/2)

    def test_star_input(self):
        # a star is weakly restricted but not restricted; greedy removes the hub
        g = Graph.from_edges(11, [(0, i) for i in range(1, 11)])
        eps = Fraction(3, 4)
        out = extract_restricted_from_weak(g, g.full_mask, eps)
        assert out.bit_count() == 6
        assert is_restricted(g, out, eps)

    def test_precondition_enforced(self):
        c5 = Graph.cycle(5)
        with pytest.raises(CheckPreconditionError):
            extract_restricted_from_weak(c5, c5.full_mask, Fraction(1, 4))

    @given(st.integers(0, 1000))
    @settings(max_examples=200, deadline=None)
    def test_output_always_passes(self, seed):
        rng = random.Random(seed)
        n = rng.randint(1, 12)
        p = rng.choice([0.05, 0.1, 0.9, 0.95])
        g = random_graph(n, p, seed)
        eps = Fraction(rng.randint(1, 3), 4)
        s = g.full_mask
        if not is_weakly_restricted(g, s, eps / 4):
            return
        out = extract_restricted_from_weak(g, s, eps)
        assert out.bit_count() == (n + 1) // 2
        assert is_restricted(g, out, eps)
        # degree bound verified directly on every output vertex
        side_g = g if edge_density(g, s) <= eps / 4 else complement(g)
        k = out.bit_count()
        if all((side_g.adj[v] & out).bit_count() <= eps * k for v in mask_to_ids(out)):
            pass  # the greedy side met the bound itself
        else:
            assert is_restricted(g, out, eps)


def brute_force_full(g: Graph, cert: FullPairCertificate) -> bool:
    """Unreduced all-subpairs enumeration, straight from the definition."""
    work = g if cert.polarity == "full" else complement(g)
    a_ids, b_ids = mask_to_ids(cert.a), mask_to_ids(cert.b)
    na, nb = len(a_ids), len(b_ids)
    for ka in range(1, na + 1):
        if ka < cert.c * na:
            continue
        for kb in range(1, nb + 1):
            if kb < cert.c * nb:
                continue
            for a1 in itertools.combinations(a_ids, ka):
                am = mask_from_ids(a1)
                for b1 in itertools.combinations(b_ids, kb):
                    bm = mask_from_ids(b1)
                    if work.edges_between(am, bm) < cert.eps * ka * kb:
                        return False
    return True


class TestFullPair:
    def test_complete_bipartite_is_full(self):
        g = Graph.from_edges(8, [(u, v) for u in range(4) for v in range(4, 8)])
        cert = FullPairCertificate(0b00001111, 0b11110000, HALF, Fraction(1, 4), "full")
        assert is_full_pair(g, cert).ok

    def test_empty_bipartite_fails_with_witness(self):
        g = Graph.empty(8)
        cert = FullPairCertificate(0b00001111, 0b11110000, HALF, Fraction(1, 4), "full")
        res = is_full_pair(g, cert)
        assert not res.ok
        ka, kb = min_subpair_sizes(cert)
        assert res.witness_a.bit_count() == ka
        assert res.witness_b.bit_count() == kb
        # and the same pair is exactly empty
        cert_e = FullPairCertificate(0b00001111, 0b11110000, HALF, Fraction(1, 4), "empty")
        assert is_full_pair(g, cert_e).ok

    @given(st.integers(0, 120))
    @settings(max_examples=25, deadline=None)
    def test_reduced_check_equals_brute_force(self, seed):
        rng = random.Random(seed)
        g = random_graph(8, rng.uniform(0.3, 0.9), seed)
        cert = FullPairCertificate(
            0b00001111, 0b11110000, HALF, Fraction(1, 4), rng.choice(["full", "empty"])
        )
        assert is_full_pair(g, cert).ok == brute_force_full(g, cert)

    def test_reduced_check_equals_brute_force_ten_by_ten(self):
        rng = random.Random(42)
        g = random_graph(20, 0.55, 42)
        a = mask_from_ids(range(10))
        b = mask_from_ids(range(10, 20))
        cert = FullPairCertificate(a, b, HALF, Fraction(1, 4), "full")
        assert is_full_pair(g, cert).ok == brute_force_full(g, cert)

    def test_sampled_refutation_is_verified(self):
        g = Graph.empty(8)
        cert = FullPairCertificate(0b00001111, 0b11110000, HALF, Fraction(1, 4), "full")
        res = is_full_pair(g, cert, method="sampled", rng=random.Random(1))
        assert not res.ok and res.certifying

    def test_exact_budget_enforced(self):
        from rpt.predicates import EnumerationBudgetError

        g = random_graph(40, 0.5, 0)
        a = mask_from_ids(range(20))
        b = mask_from_ids(range(20, 40))
        cert = FullPairCertificate(a, b, HALF, Fraction(1, 4), "full")
        with pytest.raises(EnumerationBudgetError):
            is_full_pair(g, cert, budget=1000)

    def test_scaling_property(self):
        # exact-verified full pair stays full at (c/c', eps) on large subpairs
        rng = random.Random(5)
        g = random_graph(12, 0.85, 5)
        a, b = mask_from_ids(range(6)), mask_from_ids(range(6, 12))
        c, eps = Fraction(1, 3), Fraction(1, 5)
        if not is_full_pair(g, FullPairCertificate(a, b, c, eps, "full")).ok:
            pytest.skip("random instance not full at the base parameters")
        c_prime = Fraction(2, 3)
        for a1 in itertools.combinations(range(6), 4):
            for b1 in itertools.combinations(range(6, 12), 4):
                sub = FullPairCertificate(
                    mask_from_ids(a1), mask_from_ids(b1), c / c_prime, eps, "full"
                )
                assert is_full_pair(g, sub).ok

    def test_monotonicity_in_c_and_eps(self):
        g = random_graph(10, 0.8, 9)
        a, b = mask_from_ids(range(5)), mask_from_ids(range(5, 10))
        base = FullPairCertificate(a, b, Fraction(1, 2), Fraction(1, 5), "full")
        if not is_full_pair(g, base).ok:
            pytest.skip("base certificate does not hold")
        assert is_full_pair(g, FullPairCertificate(a, b, Fraction(3, 5), Fraction(1, 5), "full")).ok
        assert is_full_pair(g, FullPairCertificate(a, b, Fraction(1, 2), Fraction(1, 6), "full")).ok


class TestBlowup:
    def test_single_part_vacuous(self):
        g = Graph.empty(4)
        cert = BlowupCertificate((0b0011,), HALF, Fraction(1, 4), named_pattern("K1"))
        assert verify_blowup(g, cert).ok

    def test_k2_complete_join(self):
        g = Graph.from_edges(6, [(u, v) for u in range(3) for v in range(3, 6)])
        cert = BlowupCertificate(
            (0b000111, 0b111000), HALF, Fraction(1, 4), named_pattern("K2")
        )
        assert verify_blowup(g, cert).ok

    def test_mutation_is_caught(self):
        edges = [(u, v) for u in range(3) for v in range(3, 6)]
        edges.remove((0, 3))
        edges.remove((0, 4))
        edges.remove((0, 5))
        g = Graph.from_edges(6, edges)
        cert = BlowupCertificate(
            (0b000111, 0b111000), Fraction(1, 3), Fraction(1, 4), named_pattern("K2")
        )
        res = verify_blowup(g, cert)
        assert not res.ok and res.failing_pair == (1, 2)
