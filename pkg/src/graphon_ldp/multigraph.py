"""Labeled multigraphs on a fixed vertex universe, and their bipartite variant.

A multigraph is an edge-multiplicity map on unordered vertex pairs (no
self-loops, 1-based vertex labels).  The classes are immutable and hashable;
enumeration canonicalizes by sorted edge lists so streams are duplicate-free
and deterministic.  The empty multigraph counts as connected with zero
components, so that empty moment factors degenerate to 1.
"""

from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement, permutations
import math

from .errors import GuardError

#: default hard guards for exhaustive enumeration
MAX_ENUM_VERTICES = 8
MAX_ENUM_EDGES = 5

#: refuse sub-multigraph streams bigger than this
MAX_SUBGRAPH_COUNT = 10**9


def _components(adjacency: dict) -> int:
    seen = set()
    count = 0
    for start in adjacency:
        if start in seen:
            continue
        count += 1
        stack = [start]
        seen.add(start)
        while stack:
            v = stack.pop()
            for w in adjacency[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
    return count


@dataclass(frozen=True)
class Multigraph:
    """Immutable multigraph: ``edges`` is a sorted tuple of ((i, j), mult), i < j."""

    n: int
    edges: tuple

    @staticmethod
    def from_edges(n: int, edges) -> "Multigraph":
        """Build from a {(i, j): mult} mapping or an iterable of (i, j[, mult])."""
        acc = {}
        items = edges.items() if hasattr(edges, "items") else None
        if items is None:
            items = []
            for entry in edges:
                if len(entry) == 2 and isinstance(entry[0], int):
                    items.append(((entry[0], entry[1]), 1))
                else:
                    items.append(((entry[0][0], entry[0][1]), entry[1]))
        for (i, j), m in items:
            if i == j:
                raise ValueError(f"self-loop on vertex {i}")
            if not (1 <= i <= n and 1 <= j <= n):
                raise ValueError(f"vertex out of range: ({i}, {j}) with n={n}")
            if m < 1:
                raise ValueError("multiplicities must be >= 1")
            key = (min(i, j), max(i, j))
            acc[key] = acc.get(key, 0) + m
        return Multigraph(n, tuple(sorted(acc.items())))

    @property
    def size(self) -> int:
        """Total edge count |alpha| including multiplicities."""
        return sum(m for _, m in self.edges)

    @property
    def is_empty(self) -> bool:
        return not self.edges

    @property
    def support(self) -> frozenset:
        return frozenset(v for (i, j), _ in self.edges for v in (i, j))

    @property
    def vertex_count(self) -> int:
        return len(self.support)

    def multiplicity(self, i: int, j: int) -> int:
        key = (min(i, j), max(i, j))
        for pair, m in self.edges:
            if pair == key:
                return m
        return 0

    def _adjacency(self) -> dict:
        adj = {v: set() for v in self.support}
        for (i, j), _ in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return adj

    @property
    def component_count(self) -> int:
        return _components(self._adjacency())

    @property
    def connected(self) -> bool:
        """Connected over the spanned support; empty graph is connected."""
        return self.component_count <= 1

    def with_edge(self, i: int, j: int, m: int = 1) -> "Multigraph":
        acc = dict(self.edges)
        key = (min(i, j), max(i, j))
        acc[key] = acc.get(key, 0) + m
        return Multigraph(self.n, tuple(sorted(acc.items())))

    def minus(self, beta: "Multigraph") -> "Multigraph":
        """Entrywise difference alpha - beta; requires beta <= alpha."""
        acc = dict(self.edges)
        for pair, m in beta.edges:
            have = acc.get(pair, 0)
            if m > have:
                raise ValueError(f"not a sub-multigraph at edge {pair}")
            if m == have:
                del acc[pair]
            else:
                acc[pair] = have - m
        return Multigraph(self.n, tuple(sorted(acc.items())))

    def dominates(self, beta: "Multigraph") -> bool:
        acc = dict(self.edges)
        return all(acc.get(pair, 0) >= m for pair, m in beta.edges)

    def sub_count(self) -> int:
        """Number of entrywise-dominated sub-multigraphs, prod(mult + 1)."""
        count = 1
        for _, m in self.edges:
            count *= m + 1
        return count

    def sub_multigraphs(self):
        """Yield every (beta, binom(alpha, beta)) with 0 <= beta <= alpha, once each."""
        if self.sub_count() > MAX_SUBGRAPH_COUNT:
            raise GuardError(
                f"sub-multigraph stream of size {self.sub_count()} exceeds guard"
            )
        pairs = [pair for pair, _ in self.edges]
        mults = [m for _, m in self.edges]

        def rec(idx, chosen, weight):
            if idx == len(pairs):
                yield Multigraph(self.n, tuple(chosen)), weight
                return
            for b in range(mults[idx] + 1):
                nxt = chosen + [(pairs[idx], b)] if b else chosen
                yield from rec(idx + 1, nxt, weight * math.comb(mults[idx], b))

        yield from rec(0, [], 1)

    def binom(self, beta: "Multigraph") -> int:
        """prod_e C(alpha_e, beta_e); zero unless beta <= alpha."""
        acc = dict(self.edges)
        out = 1
        for pair, m in beta.edges:
            out *= math.comb(acc.get(pair, 0), m)
        return out

    def canonical_key(self, fixed=(1, 2)) -> tuple:
        """Canonical edge tuple under relabelings of the support that fix ``fixed``.

        Exchangeability of the priors over the non-distinguished vertices makes
        this the memoization key for cumulant values.
        """
        free = sorted(v for v in self.support if v not in fixed)
        if not free:
            return self.edges
        targets = range(len(fixed) + 1, len(fixed) + 1 + len(free))
        best = None
        for perm in permutations(targets):
            mapping = dict(zip(free, perm))
            for f_idx, f in enumerate(fixed, start=1):
                mapping[f] = f_idx
            relabeled = tuple(
                sorted(
                    ((min(mapping[i], mapping[j]), max(mapping[i], mapping[j])), m)
                    for (i, j), m in self.edges
                )
            )
            if best is None or relabeled < best:
                best = relabeled
        return best

    def to_text(self) -> str:
        """Serialize as a sorted 'i-j:m' edge list, space separated."""
        return " ".join(f"{i}-{j}:{m}" for (i, j), m in self.edges)

    @staticmethod
    def from_text(text: str, n: int) -> "Multigraph":
        edges = {}
        text = text.strip()
        if text:
            for token in text.split():
                pair, m = token.split(":")
                i, j = pair.split("-")
                edges[(int(i), int(j))] = int(m)
        return Multigraph.from_edges(n, edges)


# -- spec-facing functional wrappers ------------------------------------------


def vertex_support(g: Multigraph) -> frozenset:
    return g.support


def is_connected(g: Multigraph) -> bool:
    return g.connected


def component_count(g: Multigraph) -> int:
    return g.component_count


def enumerate_sub_multigraphs(g: Multigraph):
    return g.sub_multigraphs()


def all_edges(n: int):
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def enumerate_multigraphs(n: int, d: int):
    """All multigraphs with exactly d edges (counting multiplicity) on [n]."""
    for combo in combinations_with_replacement(all_edges(n), d):
        acc = {}
        for e in combo:
            acc[e] = acc.get(e, 0) + 1
        yield Multigraph(n, tuple(sorted(acc.items())))


def enumerate_binary_graphs(n: int, d: int):
    """All simple (multiplicity-1) graphs with exactly d edges on [n]."""
    for combo in combinations(all_edges(n), d):
        yield Multigraph(n, tuple((e, 1) for e in combo))


def _check_enum_guard(n: int, d: int, max_n: int, max_d: int):
    if n > max_n or d > max_d:
        raise GuardError(
            f"enumeration guard exceeded: n={n} (max {max_n}), d={d} (max {max_d})"
        )


def enumerate_connected(n: int, d: int, required_vertices=(), max_n: int = MAX_ENUM_VERTICES, max_d: int = MAX_ENUM_EDGES):
    """All connected multigraphs with |alpha| = d whose support contains
    ``required_vertices``, each exactly once."""
    _check_enum_guard(n, d, max_n, max_d)
    required = frozenset(required_vertices)
    if any(v < 1 or v > n for v in required):
        return
    for g in enumerate_multigraphs(n, d):
        if required <= g.support and g.connected and not g.is_empty:
            yield g


@dataclass(frozen=True)
class CountingCheck:
    actual: int
    bound: int
    ok: bool


def verify_counting_lemma(n: int, d: int, h: int, max_n: int = MAX_ENUM_VERTICES, max_d: int = MAX_ENUM_EDGES) -> CountingCheck:
    """Count connected alpha with 1,2 in V(alpha), |alpha| = d, |V| = d+1-h,
    and compare against the combinatorial bound n^(d-h-1) * d^(d+h)."""
    if not (0 <= h <= d - 1):
        raise ValueError("require 0 <= h <= d-1")
    _check_enum_guard(n, d, max_n, max_d)
    target = d + 1 - h
    actual = sum(
        1 for g in enumerate_connected(n, d, (1, 2), max_n, max_d) if g.vertex_count == target
    )
    bound = n ** (d - h - 1) * d ** (d + h)
    return CountingCheck(actual=actual, bound=bound, ok=actual <= bound)


def verify_vertex_lemma(alpha: Multigraph, beta: Multigraph) -> bool:
    """|V(alpha - beta)| + |V(beta)| - components(alpha - beta) >= |V(alpha)|,
    for non-empty connected beta <= alpha with alpha connected.

    beta must span at least one vertex: every component of alpha - beta has to
    share a vertex with beta for the count to work, so the empty sub-multigraph
    is excluded."""
    if not alpha.connected or alpha.is_empty:
        raise ValueError("alpha must be connected and non-empty")
    if not beta.connected or beta.is_empty:
        raise ValueError("beta must be connected and non-empty")
    if not alpha.dominates(beta):
        raise ValueError("beta must be a sub-multigraph of alpha")
    rest = alpha.minus(beta)
    return rest.vertex_count + beta.vertex_count - rest.component_count >= alpha.vertex_count


# -- bipartite variant ---------------------------------------------------------


@dataclass(frozen=True)
class BipartiteMultigraph:
    """Multigraph between row vertices [n1] and column vertices [n2].

    ``edges`` is a sorted tuple of ((row, col), mult), both sides 1-based.
    """

    n1: int
    n2: int
    edges: tuple

    @staticmethod
    def from_edges(n1: int, n2: int, edges) -> "BipartiteMultigraph":
        acc = {}
        items = edges.items() if hasattr(edges, "items") else [(e, 1) for e in edges]
        for (i, j), m in items:
            if not (1 <= i <= n1 and 1 <= j <= n2):
                raise ValueError(f"edge out of range: ({i}, {j})")
            if m < 1:
                raise ValueError("multiplicities must be >= 1")
            acc[(i, j)] = acc.get((i, j), 0) + m
        return BipartiteMultigraph(n1, n2, tuple(sorted(acc.items())))

    @property
    def size(self) -> int:
        return sum(m for _, m in self.edges)

    @property
    def is_empty(self) -> bool:
        return not self.edges

    @property
    def row_support(self) -> frozenset:
        return frozenset(i for (i, _), _ in self.edges)

    @property
    def col_support(self) -> frozenset:
        return frozenset(j for (_, j), _ in self.edges)

    @property
    def vertex_count(self) -> int:
        """|V1| + |V2|."""
        return len(self.row_support) + len(self.col_support)

    @property
    def component_count(self) -> int:
        adj = {}
        for (i, j), _ in self.edges:
            adj.setdefault(("r", i), set()).add(("c", j))
            adj.setdefault(("c", j), set()).add(("r", i))
        return _components(adj)

    @property
    def connected(self) -> bool:
        return self.component_count <= 1

    def with_edge(self, i: int, j: int, m: int = 1) -> "BipartiteMultigraph":
        acc = dict(self.edges)
        acc[(i, j)] = acc.get((i, j), 0) + m
        return BipartiteMultigraph(self.n1, self.n2, tuple(sorted(acc.items())))

    def minus(self, beta: "BipartiteMultigraph") -> "BipartiteMultigraph":
        acc = dict(self.edges)
        for pair, m in beta.edges:
            have = acc.get(pair, 0)
            if m > have:
                raise ValueError(f"not a sub-multigraph at edge {pair}")
            if m == have:
                del acc[pair]
            else:
                acc[pair] = have - m
        return BipartiteMultigraph(self.n1, self.n2, tuple(sorted(acc.items())))

    def sub_count(self) -> int:
        count = 1
        for _, m in self.edges:
            count *= m + 1
        return count

    def sub_multigraphs(self):
        if self.sub_count() > MAX_SUBGRAPH_COUNT:
            raise GuardError("sub-multigraph stream exceeds guard")
        pairs = [pair for pair, _ in self.edges]
        mults = [m for _, m in self.edges]

        def rec(idx, chosen, weight):
            if idx == len(pairs):
                yield BipartiteMultigraph(self.n1, self.n2, tuple(chosen)), weight
                return
            for b in range(mults[idx] + 1):
                nxt = chosen + [(pairs[idx], b)] if b else chosen
                yield from rec(idx + 1, nxt, weight * math.comb(mults[idx], b))

        yield from rec(0, [], 1)

    def canonical_key(self) -> tuple:
        """Canonical form under side-respecting relabelings fixing row 1 and col 1."""
        free_rows = sorted(v for v in self.row_support if v != 1)
        free_cols = sorted(v for v in self.col_support if v != 1)
        best = None
        for rperm in permutations(range(2, 2 + len(free_rows))):
            rmap = dict(zip(free_rows, rperm))
            rmap[1] = 1
            for cperm in permutations(range(2, 2 + len(free_cols))):
                cmap = dict(zip(free_cols, cperm))
                cmap[1] = 1
                relabeled = tuple(
                    sorted(((rmap[i], cmap[j]), m) for (i, j), m in self.edges)
                )
                if best is None or relabeled < best:
                    best = relabeled
        return best if best is not None else self.edges


def all_bipartite_edges(n1: int, n2: int):
    return [(i, j) for i in range(1, n1 + 1) for j in range(1, n2 + 1)]


def enumerate_bipartite_multigraphs(n1: int, n2: int, d: int):
    for combo in combinations_with_replacement(all_bipartite_edges(n1, n2), d):
        acc = {}
        for e in combo:
            acc[e] = acc.get(e, 0) + 1
        yield BipartiteMultigraph(n1, n2, tuple(sorted(acc.items())))


def enumerate_connected_bipartite(n1: int, n2: int, d: int, required_rows=(), required_cols=(), max_n: int = MAX_ENUM_VERTICES, max_d: int = MAX_ENUM_EDGES):
    _check_enum_guard(n1 + n2, d, 2 * max_n, max_d)
    rreq = frozenset(required_rows)
    creq = frozenset(required_cols)
    for g in enumerate_bipartite_multigraphs(n1, n2, d):
        if rreq <= g.row_support and creq <= g.col_support and g.connected and not g.is_empty:
            yield g


def verify_counting_lemma_bipartite(n1: int, n2: int, d: int, h: int, max_n: int = MAX_ENUM_VERTICES, max_d: int = MAX_ENUM_EDGES) -> CountingCheck:
    """Bipartite analogue: connected alpha through row 1 and col 1 with
    |V1| + |V2| = d+1-h, bounded by (n1+n2)^(d-h-1) * d^(d+h)."""
    if not (0 <= h <= d - 1):
        raise ValueError("require 0 <= h <= d-1")
    target = d + 1 - h
    actual = sum(
        1
        for g in enumerate_connected_bipartite(n1, n2, d, (1,), (1,), max_n, max_d)
        if g.vertex_count == target
    )
    bound = (n1 + n2) ** (d - h - 1) * d ** (d + h)
    return CountingCheck(actual=actual, bound=bound, ok=actual <= bound)
