"""Immutable simple graphs with bitset adjacency, patterns, and induced-copy counting.

Vertices are dense 0-based integers.  A vertex set is a plain Python int
used as a bitmask over 0..n-1; helpers below convert to and from sorted
id lists.  Certificates elsewhere in the package always speak host-graph
ids, translating through the index map returned by :func:`induced_subgraph`.

A *copy* of a pattern H in G is an injective map phi from the pattern
vertices into V(G) that preserves both adjacency and non-adjacency; the
count of such maps is what :func:`count_induced_copies` returns (so each
induced-isomorphic vertex subset contributes |Aut(H)| to the total).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class GraphParseError(ValueError):
    """Malformed graph input; carries a 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


def mask_from_ids(ids) -> int:
    m = 0
    for v in ids:
        m |= 1 << v
    return m


def mask_to_ids(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Graph:
    """Simple graph: ``adj[v]`` is the neighbor bitmask of vertex v."""

    n: int
    adj: tuple[int, ...]

    def __post_init__(self):
        if self.n < 0 or len(self.adj) != self.n:
            raise ValueError("adjacency length must equal vertex count")
        full = self.full_mask
        for v, row in enumerate(self.adj):
            if row & (1 << v):
                raise ValueError(f"self-loop at vertex {v}")
            if row & ~full:
                raise ValueError(f"adjacency row {v} mentions out-of-range vertices")
        for v in range(self.n):
            for u in iter_bits(self.adj[v]):
                if not self.adj[u] & (1 << v):
                    raise ValueError(f"asymmetric adjacency between {u} and {v}")

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @staticmethod
    def from_edges(n: int, edges) -> "Graph":
        rows = [0] * n
        seen = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop edge ({u},{v})")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge ({u},{v})")
            seen.add(key)
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return Graph(n, tuple(rows))

    @staticmethod
    def empty(n: int) -> "Graph":
        return Graph(n, tuple([0] * n))

    @staticmethod
    def complete(n: int) -> "Graph":
        full = (1 << n) - 1
        return Graph(n, tuple(full ^ (1 << v) for v in range(n)))

    @staticmethod
    def path(n: int) -> "Graph":
        return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    @staticmethod
    def cycle(n: int) -> "Graph":
        if n < 3:
            raise ValueError("cycles need at least 3 vertices")
        return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] & (1 << v))

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in iter_bits(self.adj[u]) if u < v]

    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self.adj) // 2

    def degree_in(self, v: int, mask: int | None = None) -> int:
        row = self.adj[v]
        if mask is not None:
            row &= mask
        return row.bit_count()

    def max_degree(self, mask: int | None = None) -> int:
        if mask is None:
            mask = self.full_mask
        return max((self.degree_in(v, mask) for v in iter_bits(mask)), default=0)

    def edges_inside(self, mask: int) -> int:
        total = 0
        for v in iter_bits(mask):
            total += (self.adj[v] & mask).bit_count()
        return total // 2

    def edges_between(self, a: int, b: int) -> int:
        if a & b:
            raise ValueError("edges_between requires disjoint sets")
        return sum((self.adj[v] & b).bit_count() for v in iter_bits(a))


def complement(g: Graph) -> Graph:
    full = g.full_mask
    return Graph(g.n, tuple((full ^ row) & ~(1 << v) for v, row in enumerate(g.adj)))


def induced_subgraph(g: Graph, mask: int) -> tuple[Graph, list[int]]:
    """Subgraph induced by ``mask`` plus the new-id -> host-id map."""
    if mask & ~g.full_mask:
        raise ValueError("vertex set out of range")
    ids = mask_to_ids(mask)
    pos = {v: i for i, v in enumerate(ids)}
    rows = [0] * len(ids)
    for i, v in enumerate(ids):
        for u in iter_bits(g.adj[v] & mask):
            rows[i] |= 1 << pos[u]
    return Graph(len(ids), tuple(rows)), ids


def edge_density(g: Graph, mask: int | None = None) -> Fraction:
    """|E(G[S])| / C(|S|,2), exactly; 0 by convention when |S| <= 1."""
    if mask is None:
        mask = g.full_mask
    size = mask.bit_count()
    if size <= 1:
        return Fraction(0)
    return Fraction(g.edges_inside(mask), size * (size - 1) // 2)


@dataclass(frozen=True)
class Pattern:
    """A pattern graph together with its labeled vertex order.

    ``order[k]`` is the pattern vertex playing label k+1; embeddings and
    blowups index their parts by these labels.
    """

    graph: Graph
    order: tuple[int, ...]

    def __post_init__(self):
        if self.graph.n < 1:
            raise ValueError("patterns need at least one vertex")
        if sorted(self.order) != list(range(self.graph.n)):
            raise ValueError("order must be a permutation of the pattern vertices")

    @property
    def size(self) -> int:
        return self.graph.n

    @staticmethod
    def of(graph: Graph, order=None) -> "Pattern":
        return Pattern(graph, tuple(order) if order else tuple(range(graph.n)))

    def label_edge(self, i: int, j: int) -> bool:
        """Is there a pattern edge between labels i and j (1-based)?"""
        return self.graph.has_edge(self.order[i - 1], self.order[j - 1])

    def prefix(self, t: int) -> "Pattern":
        """Pattern induced by the first t labels, relabeled 0..t-1 in label order."""
        if not 1 <= t <= self.size:
            raise ValueError("prefix length out of range")
        edges = [
            (i, j)
            for i in range(t)
            for j in range(i + 1, t)
            if self.label_edge(i + 1, j + 1)
        ]
        return Pattern.of(Graph.from_edges(t, edges))

    def complement_pattern(self) -> "Pattern":
        return Pattern(complement(self.graph), self.order)


NAMED_PATTERNS = {
    "K1": lambda: Graph.empty(1),
    "K2": lambda: Graph.complete(2),
    "K3": lambda: Graph.complete(3),
    "K4": lambda: Graph.complete(4),
    "K5": lambda: Graph.complete(5),
    "P2": lambda: Graph.path(2),
    "P3": lambda: Graph.path(3),
    "P4": lambda: Graph.path(4),
    "P5": lambda: Graph.path(5),
    "C4": lambda: Graph.cycle(4),
    "C5": lambda: Graph.cycle(5),
}


def named_pattern(name: str) -> Pattern:
    try:
        return Pattern.of(NAMED_PATTERNS[name]())
    except KeyError:
        raise ValueError(
            f"unknown pattern {name!r}; known: {', '.join(sorted(NAMED_PATTERNS))}"
        ) from None


def from_edge_list(text: str) -> Graph:
    """Parse the edge-list format.

    First non-comment line is the vertex count n; each following line is
    "u v" with 0 <= u < v < n.  '#' starts a comment line.
    """
    n = None
    edges = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 1:
                raise GraphParseError("expected a single vertex count", lineno)
            try:
                n = int(parts[0])
            except ValueError:
                raise GraphParseError(f"bad vertex count {parts[0]!r}", lineno) from None
            if n < 0:
                raise GraphParseError("vertex count must be nonnegative", lineno)
            continue
        if len(parts) != 2:
            raise GraphParseError("expected an edge 'u v'", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError(f"bad edge {line!r}", lineno) from None
        if u == v:
            raise GraphParseError(f"self-loop ({u},{v})", lineno)
        if not 0 <= u < v:
            raise GraphParseError(f"edge must satisfy 0 <= u < v, got ({u},{v})", lineno)
        if v >= n:
            raise GraphParseError(f"vertex {v} out of range for n={n}", lineno)
        if (u, v) in seen:
            raise GraphParseError(f"duplicate edge ({u},{v})", lineno)
        seen.add((u, v))
        edges.append((u, v))
    if n is None:
        raise GraphParseError("no vertex count found")
    return Graph.from_edges(n, edges)


def to_edge_list(g: Graph) -> str:
    lines = [str(g.n)]
    lines += [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def from_graph6(line: str) -> Graph:
    """Decode a single graph6 line (short or long size header)."""
    data = [ord(c) - 63 for c in line.strip()]
    if any(not 0 <= x <= 63 for x in data):
        raise GraphParseError("invalid graph6 character")
    if not data:
        raise GraphParseError("empty graph6 input")
    if data[0] <= 62:
        n, body = data[0], data[1:]
    elif len(data) >= 4 and data[1] <= 62:
        n = (data[1] << 12) | (data[2] << 6) | data[3]
        body = data[4:]
    else:
        raise GraphParseError("unsupported graph6 size header")
    need = n * (n - 1) // 2
    if len(body) * 6 < need:
        raise GraphParseError("graph6 body too short")
    bits = []
    for x in body:
        bits.extend((x >> shift) & 1 for shift in range(5, -1, -1))
    edges = []
    k = 0
    for j in range(1, n):
        for i in range(j):
            if bits[k]:
                edges.append((i, j))
            k += 1
    return Graph.from_edges(n, edges)


def to_graph6(g: Graph) -> str:
    if g.n > 62:
        raise ValueError("only short-form graph6 encoding is supported")
    bits = []
    for j in range(1, g.n):
        for i in range(j):
            bits.append(1 if g.has_edge(i, j) else 0)
    while len(bits) % 6:
        bits.append(0)
    out = [chr(g.n + 63)]
    for k in range(0, len(bits), 6):
        val = 0
        for b in bits[k : k + 6]:
            val = (val << 1) | b
        out.append(chr(val + 63))
    return "".join(out)


def load_graph_text(text: str) -> Graph:
    """Edge-list or graph6, detected by whether the first data line is an integer."""
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            int(line.split()[0])
        except ValueError:
            return from_graph6(line)
        return from_edge_list(text)
    raise GraphParseError("empty graph input")


def _position_constraints(pat: Pattern):
    """Per position k: lists of earlier positions that must be neighbors / non-neighbors."""
    padj = pat.graph.adj
    prev_edge, prev_non = [], []
    for k in range(pat.size):
        vk = pat.order[k]
        prev_edge.append([j for j in range(k) if padj[vk] & (1 << pat.order[j])])
        prev_non.append([j for j in range(k) if not padj[vk] & (1 << pat.order[j])])
    return prev_edge, prev_non


def _count_backtrack(g: Graph, pat: Pattern, parts: list[int] | None) -> int:
    hn = pat.size
    full = g.full_mask
    prev_edge, prev_non = _position_constraints(pat)
    phi = [0] * hn

    def rec(k: int, used: int) -> int:
        cand = (parts[k] if parts is not None else full) & ~used
        for j in prev_edge[k]:
            cand &= g.adj[phi[j]]
        for j in prev_non[k]:
            cand &= ~g.adj[phi[j]]
        cand &= full
        if k == hn - 1:
            return cand.bit_count()
        total = 0
        rest = cand
        while rest:
            low = rest & -rest
            phi[k] = low.bit_length() - 1
            total += rec(k + 1, used | low)
            rest ^= low
        return total

    if hn > g.n:
        return 0
    return rec(0, 0)


def count_induced_copies(g: Graph, pat: Pattern) -> int:
    """Number of injective maps preserving adjacency and non-adjacency."""
    return _count_backtrack(g, pat, None)


def count_embeddings_into_parts(g: Graph, pat: Pattern, parts) -> int:
    """Copies phi with phi(v_i) in parts[i-1] for every label i."""
    parts = list(parts)
    if len(parts) != pat.size:
        raise ValueError("need exactly one part per pattern label")
    union = 0
    for p in parts:
        if p & union:
            raise ValueError("parts must be pairwise disjoint")
        union |= p
    return _count_backtrack(g, pat, parts)
