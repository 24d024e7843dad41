"""Tree decompositions and exact width measures at desk scale.

Widths are minimised over elimination orderings with the subset dynamic
programme F(S) = min_{v∈S} max(F(S−v), f({v} ∪ Q(S−v, v))), where Q(S, v)
is the set of vertices outside S ∪ {v} reachable from v through S. For a
monotone bag cost f this gives the exact f-width; f(X) = |X|−1 is
treewidth, the edge cover number ρ gives ghw and the fractional edge cover
number ρ* gives fhw.
"""
from __future__ import annotations

from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from fractions import Fraction

from .constraints import TableConstraint
from .core import CspInstance, Hypergraph, hypergraph_of, instance_size
from .errors import ApplicabilityError, BudgetError, InfeasibleError, ValidationError
from .lp import Unbounded, simplex_max

TREEWIDTH_LIMIT = 14
HYPERTREE_LIMIT = 10


@dataclass(frozen=True)
class TreeDecomposition:
    bags: dict
    edges: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "bags", {t: frozenset(b) for t, b in self.bags.items()})
        object.__setattr__(self, "edges", frozenset(frozenset(e) for e in self.edges))

    def check_tree(self) -> None:
        nodes = set(self.bags)
        if not nodes:
            raise ValidationError("a tree decomposition needs at least one node")
        for t, bag in self.bags.items():
            if not bag:
                raise ValidationError(f"bag {t!r} is empty")
        for e in self.edges:
            if len(e) != 2 or not e <= nodes:
                raise ValidationError(f"bad tree edge {sorted(e, key=repr)}")
        if len(self.edges) != len(nodes) - 1:
            raise ValidationError("tree must have exactly |nodes| - 1 edges")
        adj = self.adjacency()
        start = next(iter(nodes))
        seen, stack = {start}, [start]
        while stack:
            for u in adj[stack.pop()]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        if seen != nodes:
            raise ValidationError("tree decomposition graph is disconnected")

    def adjacency(self) -> dict:
        adj = {t: set() for t in self.bags}
        for e in self.edges:
            a, b = tuple(e)
            adj[a].add(b)
            adj[b].add(a)
        return adj

    @property
    def width(self) -> int:
        return max(len(b) for b in self.bags.values()) - 1

    def to_dict(self) -> dict:
        nodes = sorted(self.bags, key=repr)
        index = {t: i for i, t in enumerate(nodes)}
        return {
            "bags": [sorted(self.bags[t]) for t in nodes],
            "edges": sorted(sorted(index[t] for t in e) for e in self.edges),
        }


def validate_tree_decomposition(G: Hypergraph, td: TreeDecomposition) -> bool:
    """Vertex coverage, hyperedge containment and connectedness.

    A malformed tree (cycle, disconnected, empty bag) raises ValidationError.
    """
    td.check_tree()
    bags = td.bags
    if not G.vertices <= set().union(*bags.values()):
        return False
    if any(not any(e <= b for b in bags.values()) for e in G.edges):
        return False
    adj = td.adjacency()
    for v in G.vertices:
        holding = {t for t, b in bags.items() if v in b}
        start = next(iter(holding))
        seen, stack = {start}, [start]
        while stack:
            for u in adj[stack.pop()]:
                if u in holding and u not in seen:
                    seen.add(u)
                    stack.append(u)
        if seen != holding:
            return False
    return True


# covers -----------------------------------------------------------------


@dataclass
class FractionalCover:
    """Edge weights covering ``covered`` plus a vertex packing of equal value
    that certifies optimality."""

    weights: dict
    covered: frozenset
    packing: dict = field(default_factory=dict)

    @property
    def weight(self) -> Fraction:
        return sum(self.weights.values(), Fraction(0))

    def verify(self, edges: Iterable) -> bool:
        edges = [frozenset(e) for e in edges]
        if any(not 0 <= w <= 1 for w in self.weights.values()):
            return False
        for v in self.covered:
            if sum((w for e, w in self.weights.items() if v in e), Fraction(0)) < 1:
                return False
        if any(y < 0 for y in self.packing.values()):
            return False
        for e in edges:
            if sum((y for v, y in self.packing.items() if v in e), Fraction(0)) > 1:
                return False
        return sum(self.packing.values(), Fraction(0)) == self.weight


def fractional_edge_cover_number(G: Hypergraph, X: Iterable | None = None):
    """ρ*(X) by an exact rational LP; returns ``(value, FractionalCover)``.

    The packing dual max Σ y_v s.t. Σ_{v∈h∩X} y_v ≤ 1 is solved directly and
    the cover is read off its final objective row.
    """
    X = frozenset(G.vertices if X is None else X)
    if not X:
        raise ValidationError("width functions are defined on nonempty vertex sets")
    edges = sorted(G.edges, key=lambda e: sorted(e))
    verts = sorted(X)
    uncovered = [v for v in verts if not any(v in e for e in edges)]
    if uncovered:
        raise InfeasibleError(f"vertices {uncovered} lie in no hyperedge")
    A = [[int(v in e) for v in verts] for e in edges]
    try:
        res = simplex_max(A, [1] * len(edges), [1] * len(verts))
    except Unbounded as exc:  # pragma: no cover - excluded by the check above
        raise InfeasibleError(str(exc)) from exc
    weights = {e: w for e, w in zip(edges, res.dual) if w != 0}
    packing = {v: y for v, y in zip(verts, res.primal) if y != 0}
    return res.value, FractionalCover(weights, X, packing)


def edge_cover_number(G: Hypergraph, X: Iterable | None = None):
    """ρ(X) by exact search; returns ``(value, list of chosen hyperedges)``."""
    X = frozenset(G.vertices if X is None else X)
    if not X:
        raise ValidationError("width functions are defined on nonempty vertex sets")
    traces = {}
    for e in sorted(G.edges, key=lambda e: sorted(e)):
        t = e & X
        if t and t not in traces:
            traces[t] = e
    # drop traces strictly contained in another
    maximal = [t for t in traces if not any(t < u for u in traces)]
    uncovered = X - set().union(*maximal) if maximal else X
    if uncovered:
        raise InfeasibleError(f"vertices {sorted(uncovered)} lie in no hyperedge")
    by_vertex = {v: [t for t in maximal if v in t] for v in X}

    def search(remaining, k, chosen):
        if not remaining:
            return list(chosen)
        if k == 0:
            return None
        v = min(remaining, key=lambda u: (len(by_vertex[u]), u))
        for t in by_vertex[v]:
            chosen.append(t)
            found = search(remaining - t, k - 1, chosen)
            chosen.pop()
            if found is not None:
                return found
        return None

    for k in range(1, len(X) + 1):
        found = search(X, k, [])
        if found is not None:
            return k, [traces[t] for t in found]
    raise AssertionError("unreachable: every vertex is coverable")


# width search -----------------------------------------------------------


@dataclass
class WidthReport:
    measure: str
    value: object
    decomposition: TreeDecomposition | None = None
    covers: dict = field(default_factory=dict)
    ordering: tuple = ()

    @property
    def supported(self) -> bool:
        return self.value is not None

    def verify(self, G: Hypergraph) -> bool:
        """Re-check the witness decomposition and the per-bag certificates."""
        if not self.supported:
            return True
        td = self.decomposition
        if td is None or not validate_tree_decomposition(G, td):
            return False
        bags = td.bags
        if self.measure == "tw":
            return td.width == self.value
        if self.measure == "ghw":
            for t, chosen in self.covers.items():
                if not bags[t] <= set().union(*chosen) or len(chosen) > self.value:
                    return False
                if any(e not in G.edges for e in chosen):
                    return False
            return set(self.covers) == set(bags) and max(map(len, self.covers.values())) == self.value
        if self.measure == "fhw":
            for t, cover in self.covers.items():
                if cover.covered != bags[t] or not cover.verify(G.edges):
                    return False
                if cover.weight > self.value:
                    return False
            weights = [c.weight for c in self.covers.values()]
            return set(self.covers) == set(bags) and max(weights) == self.value
        return False


def _primal_masks(G: Hypergraph):
    verts = sorted(G.vertices)
    index = {v: i for i, v in enumerate(verts)}
    adj = [0] * len(verts)
    for e in G.edges:
        mask = 0
        for v in e:
            mask |= 1 << index[v]
        for v in e:
            adj[index[v]] |= mask & ~(1 << index[v])
    return verts, adj


def _reach(adj, inside: int, v: int) -> int:
    """Vertices outside ``inside`` ∪ {v} reachable from v through ``inside``."""
    seen = 1 << v
    frontier = adj[v]
    out = 0
    while frontier:
        u = (frontier & -frontier).bit_length() - 1
        frontier &= frontier - 1
        bit = 1 << u
        if seen & bit:
            continue
        seen |= bit
        if inside & bit:
            frontier |= adj[u] & ~seen
        else:
            out |= bit
    return out


def _min_width_ordering(G: Hypergraph, cost: Callable[[frozenset], object]):
    verts, adj = _primal_masks(G)
    n = len(verts)
    memo = {}

    def bag_cost(mask):
        hit = memo.get(mask)
        if hit is None:
            hit = cost(frozenset(verts[i] for i in range(n) if mask >> i & 1))
            memo[mask] = hit
        return hit

    best = {0: None}
    choice = {}
    for S in range(1, 1 << n):
        top = None
        pick = None
        rest = S
        while rest:
            i = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            prev = S & ~(1 << i)
            before = best[prev]
            if top is not None and before is not None and before >= top:
                continue
            c = bag_cost(_reach(adj, prev, i) | (1 << i))
            val = c if before is None or c > before else before
            if top is None or val < top:
                top, pick = val, i
        best[S] = top
        choice[S] = pick
    order = []
    S = (1 << n) - 1
    while S:
        i = choice[S]
        order.append(verts[i])
        S &= ~(1 << i)
    order.reverse()
    return best[(1 << n) - 1], tuple(order)


def decomposition_from_ordering(G: Hypergraph, order) -> TreeDecomposition:
    """Bags {v} ∪ Q(earlier, v); each bag hangs off its earliest-eliminated
    neighbour, and component roots are chained."""
    verts, adj = _primal_masks(G)
    index = {v: i for i, v in enumerate(verts)}
    position = {v: k for k, v in enumerate(order)}
    bags, edges, roots = {}, set(), []
    eliminated = 0
    for v in order:
        i = index[v]
        q = _reach(adj, eliminated, i)
        members = [verts[j] for j in range(len(verts)) if q >> j & 1]
        bags[v] = frozenset(members) | {v}
        if members:
            parent = min(members, key=position.__getitem__)
            edges.add(frozenset((v, parent)))
        else:
            roots.append(v)
        eliminated |= 1 << i
    for a, b in zip(roots, roots[1:]):
        edges.add(frozenset((a, b)))
    return TreeDecomposition(bags, frozenset(edges))


def _check_limit(G: Hypergraph, limit: int):
    if not G.vertices:
        raise ValidationError("hypergraph has no vertices")
    if len(G.vertices) > limit:
        raise BudgetError(f"{len(G.vertices)} vertices exceed the exact-width limit {limit}")


def treewidth_exact(G: Hypergraph, limit: int = TREEWIDTH_LIMIT) -> WidthReport:
    _check_limit(G, limit)
    value, order = _min_width_ordering(G, lambda bag: len(bag) - 1)
    td = decomposition_from_ordering(G, order)
    return WidthReport("tw", value, td, ordering=order)


def ghw_and_fhw_exact_small(
    G: Hypergraph, measure: str = "rho", limit: int = HYPERTREE_LIMIT
) -> WidthReport:
    """ghw (``measure="rho"``) or fhw (``measure="rho_star"``), exactly."""
    _check_limit(G, limit)
    if measure == "rho":
        value, order = _min_width_ordering(G, lambda bag: edge_cover_number(G, bag)[0])
        td = decomposition_from_ordering(G, order)
        covers = {t: edge_cover_number(G, b)[1] for t, b in td.bags.items()}
        return WidthReport("ghw", value, td, covers, order)
    if measure == "rho_star":
        value, order = _min_width_ordering(
            G, lambda bag: fractional_edge_cover_number(G, bag)[0]
        )
        td = decomposition_from_ordering(G, order)
        covers = {t: fractional_edge_cover_number(G, b)[1] for t, b in td.bags.items()}
        return WidthReport("fhw", value, td, covers, order)
    raise ValueError(f"unknown measure {measure!r}")


def submodular_width(G: Hypergraph) -> WidthReport:
    """Not computed; reported as an unsupported measure."""
    return WidthReport("subw", None)


def solution_bound(P: CspInstance) -> int:
    """⌈|P|^ρ*(hyp(P))⌉ for classic instances."""
    if any(not isinstance(c, TableConstraint) for c in P.constraints):
        raise ApplicabilityError("solution bound applies to classic instances only")
    if not P.variables:
        return 1
    rho, _ = fractional_edge_cover_number(hypergraph_of(P))
    return ceil_power(instance_size(P), rho)


def ceil_power(base: int, exponent: Fraction) -> int:
    """Smallest integer N with N >= base**exponent, computed exactly."""
    exponent = Fraction(exponent)
    target = base ** exponent.numerator
    q = exponent.denominator
    lo, hi = 0, 1
    while hi**q < target:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**q >= target:
            hi = mid
        else:
            lo = mid + 1
    return lo
