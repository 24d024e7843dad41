"""Encodings of connected graph partition (CGP) and 3-colourability, with
independent oracles used to check them."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb, perm

import networkx as nx

from .constraints import CardinalitySet, EgcConstraint, TableConstraint
from .core import CspInstance, default_budget
from .errors import BudgetError, ValidationError

COLOURS = ("b", "g", "r")


@dataclass(frozen=True)
class Graph:
    vertices: tuple
    edges: frozenset

    def __post_init__(self):
        verts = tuple(sorted(dict.fromkeys(self.vertices), key=str))
        edges = frozenset(frozenset(e) for e in self.edges)
        for e in edges:
            if len(e) != 2:
                raise ValidationError(f"edge {sorted(e, key=str)} is a self-loop or malformed")
            if not e <= set(verts):
                raise ValidationError(f"edge {sorted(e, key=str)} has unknown endpoints")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_edges(cls, edges, vertices=()) -> Graph:
        edges = [tuple(e) for e in edges]
        verts = list(vertices) + [v for e in edges for v in e]
        return cls(tuple(verts), frozenset(frozenset(e) for e in edges))

    @classmethod
    def from_networkx(cls, g) -> Graph:
        return cls(tuple(g.nodes), frozenset(frozenset(e) for e in g.edges))

    @classmethod
    def cycle(cls, n: int) -> Graph:
        return cls.from_edges([(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def complete(cls, n: int) -> Graph:
        return cls.from_edges(itertools.combinations(range(n), 2), range(n))

    def sorted_edges(self) -> list:
        return sorted((tuple(sorted(e, key=str)) for e in self.edges), key=lambda e: tuple(map(str, e)))

    def to_networkx(self):
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(tuple(e) for e in self.edges)
        return g

    def is_connected(self) -> bool:
        return bool(self.vertices) and nx.is_connected(self.to_networkx())


def vertex_var(v) -> str:
    return f"v{v}"


def edge_var(e) -> str:
    u, w = sorted(e, key=str)
    return f"e{u}_{w}"


# connected graph partition ----------------------------------------------


def encode_cgp(G: Graph, alpha: int, beta: int) -> CspInstance:
    """Vertex labels 1..|V|, one boolean per edge marking it as cut.

    C^α bounds every label class by α; C^β bounds the cut edges by β; a
    ternary table per edge forces the edge to be cut when its endpoints get
    different labels. Cardinality intervals are clipped to the scope size.
    """
    if not G.is_connected():
        raise ValidationError("connected graph partition needs a connected graph")
    if alpha < 1:
        raise ValidationError("alpha must be at least 1")
    m = len(G.edges)
    if not 0 <= beta <= m:
        raise ValidationError("beta must lie in 0..|E|")
    n = len(G.vertices)
    labels = frozenset(range(1, n + 1))
    A = [vertex_var(v) for v in G.vertices]
    B = [edge_var(e) for e in G.sorted_edges()]
    domains = {a: labels for a in A}
    domains.update({b: frozenset({0, 1}) for b in B})
    cons = [
        EgcConstraint(A, {i: CardinalitySet.interval(0, min(alpha, n)) for i in labels}, domains),
    ]
    if B:
        cons.append(
            EgcConstraint(
                B, {0: CardinalitySet.interval(0, m), 1: CardinalitySet.interval(0, beta)}, domains
            )
        )
    for e in G.sorted_edges():
        u, w = vertex_var(e[0]), vertex_var(e[1])
        rows = [(a, b, x) for a in labels for b in labels for x in (0, 1) if a == b or x == 1]
        cons.append(TableConstraint((u, w, edge_var(e)), rows, domains))
    return CspInstance(domains, cons)


def _cut_sets(G: Graph, beta: int, budget: int):
    edges = G.sorted_edges()
    total = sum(comb(len(edges), i) for i in range(beta + 1))
    if total > budget:
        raise BudgetError(f"{total} cut sets exceed the budget {budget}")
    for i in range(beta + 1):
        yield from itertools.combinations(edges, i)


def cgp_oracle(G: Graph, alpha: int, beta: int, budget: int | None = None) -> bool:
    """Guess a cut set of at most β edges and check every component has at
    most α vertices."""
    budget = default_budget() if budget is None else budget
    base = G.to_networkx()
    for cut in _cut_sets(G, min(beta, len(G.edges)), budget):
        g = base.copy()
        g.remove_edges_from(cut)
        if all(len(comp) <= alpha for comp in nx.connected_components(g)):
            return True
    return False


def set_partitions(items: list):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def cgp_solution_count(G: Graph, alpha: int, beta: int) -> int:
    """|sol(encode_cgp(G, α, β))| without building the instance.

    Labelings are grouped by the partition of V they induce (k blocks give
    n!/(n-k)! labelings); cut edges are forced to 1 and the remaining edges
    may add ones while the total stays within β.
    """
    n = len(G.vertices)
    edges = list(G.edges)
    total = 0
    for blocks in set_partitions(list(G.vertices)):
        if any(len(b) > alpha for b in blocks):
            continue
        where = {v: i for i, b in enumerate(blocks) for v in b}
        cut = sum(1 for e in edges if len({where[v] for v in e}) == 2)
        if cut > beta:
            continue
        uncut = len(edges) - cut
        total += perm(n, len(blocks)) * sum(comb(uncut, j) for j in range(beta - cut + 1))
    return total


def cgp_solution_bound(G: Graph, beta: int) -> int:
    """(|E|+1)^β · |V|^(2β)."""
    return (len(G.edges) + 1) ** beta * len(G.vertices) ** (2 * beta)


def decode_partition(G: Graph, theta) -> tuple[list, set]:
    """Components of G minus the edges marked cut, and the cut edges."""
    cut = {e for e in G.edges if theta[edge_var(e)] == 1}
    g = G.to_networkx()
    g.remove_edges_from(tuple(e) for e in cut)
    return [set(c) for c in nx.connected_components(g)], cut


def check_cgp_witness(G: Graph, alpha: int, beta: int, theta) -> bool:
    parts, cut = decode_partition(G, theta)
    return len(cut) <= beta and all(len(p) <= alpha for p in parts)


# 3-colourability --------------------------------------------------------


def encode_3col(G: Graph) -> CspInstance:
    """Per-edge EGC allowing each colour at most once, plus a vacuous EGC
    over all vertices that only shapes the hypergraph."""
    if not G.vertices:
        raise ValidationError("graph has no vertices")
    colours = frozenset(COLOURS)
    domains = {str(v): colours for v in G.vertices}
    cons = [
        EgcConstraint(
            [str(v) for v in e], {c: CardinalitySet.interval(0, 1) for c in COLOURS}, domains
        )
        for e in G.sorted_edges()
    ]
    n = len(G.vertices)
    cons.append(
        EgcConstraint(list(domains), {c: CardinalitySet.interval(0, n) for c in COLOURS}, domains)
    )
    return CspInstance(domains, cons)


def colourings(G: Graph, budget: int | None = None):
    """Every proper 3-colouring, by brute force."""
    budget = default_budget() if budget is None else budget
    n = len(G.vertices)
    if 3**n > budget:
        raise BudgetError(f"3^{n} colourings exceed the budget {budget}")
    edges = [tuple(e) for e in G.edges]
    for combo in itertools.product(COLOURS, repeat=n):
        col = dict(zip(G.vertices, combo))
        if all(col[u] != col[w] for u, w in edges):
            yield col


def is_3colourable(G: Graph, budget: int | None = None) -> bool:
    return next(colourings(G, budget), None) is not None
