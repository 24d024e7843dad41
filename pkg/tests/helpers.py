"""Random instance generators and independent oracles for the tests.

The oracles deliberately avoid the library's own search and PAC code:
solutions come from filtering the full product of domains with
``evaluate``, and projections from filtering constraint extensions.
"""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

from globalcsp.constraints import (
    CardinalitySet,
    EgcConstraint,
    NegativeConstraint,
    TableConstraint,
)
from globalcsp.core import Assignment, CspInstance, restrict
from globalcsp.weighted import WcspInstance, WeightedTable


def names(n: int) -> list:
    return [f"x{i}" for i in range(n)]


def random_domains(rng: random.Random, n: int, max_dom: int = 3, shared: bool | None = None):
    if shared is None:
        shared = rng.random() < 0.5
    if shared:
        d = frozenset(range(rng.randint(1, max_dom)))
        return {v: d for v in names(n)}
    out = {}
    for v in names(n):
        k = rng.randint(1, max_dom)
        out[v] = frozenset(rng.sample(range(max_dom), k))
    return out


def random_scopes(rng: random.Random, variables: list, k: int, max_arity: int = 3) -> list:
    scopes = [rng.sample(variables, rng.randint(1, min(max_arity, len(variables)))) for _ in range(k)]
    covered = set().union(*map(set, scopes))
    for v in variables:
        if v not in covered:
            rng.choice(scopes).append(v)
    return [list(dict.fromkeys(s)) for s in scopes]


def random_table(rng, scope, domains, density=None) -> TableConstraint:
    full = list(itertools.product(*(sorted(domains[v]) for v in scope)))
    p = rng.uniform(0.2, 0.9) if density is None else density
    rows = [r for r in full if rng.random() < p]
    return TableConstraint(scope, rows, domains)


def random_negative(rng, scope, domains) -> NegativeConstraint:
    full = list(itertools.product(*(sorted(domains[v]) for v in scope)))
    p = rng.uniform(0.1, 0.6)
    return NegativeConstraint(scope, [r for r in full if rng.random() < p], domains)


def random_interval_egc(rng, scope, domains) -> EgcConstraint:
    values = set().union(*(domains[v] for v in scope))
    n = len(scope)
    card = {}
    for a in values:
        lo = rng.randint(0, n)
        hi = rng.randint(lo, n)
        if rng.random() < 0.4:
            lo = 0
        card[a] = CardinalitySet.interval(lo, hi)
    return EgcConstraint(scope, card, domains)


def random_explicit_egc(rng, scope, domains) -> EgcConstraint:
    """An EGC with a non-contiguous cardinality set, hence without PAC.

    Needs a scope of at least two variables.
    """
    values = sorted(set().union(*(domains[v] for v in scope)))
    n = len(scope)
    card = {a: CardinalitySet.interval(0, n) for a in values}
    card[rng.choice(values)] = CardinalitySet.of({0, 2})
    return EgcConstraint(scope, card, domains)


def random_pac_instance(rng: random.Random, max_vars: int = 5, max_dom: int = 3,
                        max_constraints: int = 4, kinds=("table", "negative", "egc")) -> CspInstance:
    n = rng.randint(1, max_vars)
    domains = random_domains(rng, n, max_dom)
    scopes = random_scopes(rng, names(n), rng.randint(1, max_constraints))
    cons = []
    for scope in scopes:
        kind = rng.choice(kinds)
        if kind == "table":
            cons.append(random_table(rng, scope, domains))
        elif kind == "negative":
            cons.append(random_negative(rng, scope, domains))
        else:
            cons.append(random_interval_egc(rng, scope, domains))
    return CspInstance(domains, cons)


def random_classic_instance(rng: random.Random, max_vars: int = 5, max_dom: int = 3,
                            max_constraints: int = 4) -> CspInstance:
    return random_pac_instance(rng, max_vars, max_dom, max_constraints, kinds=("table",))


def random_weighted_parts(rng: random.Random, max_vars: int = 5, max_dom: int = 3,
                          max_denominator: int = 8) -> list:
    """WCSP parts with pairwise disjoint constraint sets."""
    n = rng.randint(1, max_vars)
    domains = random_domains(rng, n, max_dom)
    scopes = random_scopes(rng, names(n), rng.randint(1, 4))
    tables = []
    for i, scope in enumerate(scopes):
        full = list(itertools.product(*(sorted(domains[v]) for v in scope)))
        rows = {}
        for r in full:
            if rng.random() < 0.7:
                rows[r] = Fraction(rng.randint(-6, 12), rng.randint(1, max_denominator))
        tables.append(WeightedTable(scope, rows, domains, tag=i))
    k = rng.randint(1, min(3, len(tables)))
    buckets = [[] for _ in range(k)]
    for i, t in enumerate(tables):
        buckets[i % k if i < k else rng.randrange(k)].append(t)
    parts = []
    for bucket in buckets:
        vs = set().union(*(t.scope_set for t in bucket))
        parts.append(WcspInstance({v: domains[v] for v in vs}, bucket))
    return parts


# oracles ----------------------------------------------------------------


def product(variables, domains):
    variables = sorted(variables)
    for combo in itertools.product(*(sorted(domains[v], key=repr) for v in variables)):
        yield dict(zip(variables, combo))


def oracle_solutions(P: CspInstance) -> frozenset:
    return frozenset(
        Assignment(theta)
        for theta in product(P.variables, P.domains)
        if all(c.evaluate({v: theta[v] for v in c.scope}) for c in P.constraints)
    )


def oracle_extension_projection(c, X) -> frozenset:
    """π_X of the extension of ``c``, from the full product of its scope."""
    X = frozenset(X)
    out = set()
    for theta in product(c.scope, c.domains):
        if c.evaluate(theta):
            out.add(restrict(theta, X))
    return frozenset(out)


def oracle_projection_solutions(P: CspInstance, X) -> frozenset:
    """sol(pj_X(P)) from the definition: θ over X such that, for every
    constraint meeting X, θ restricted to the overlap extends into it."""
    X = frozenset(X)
    allowed = {
        c: oracle_extension_projection(c, X & c.scope_set)
        for c in P.constraints
        if X & c.scope_set
    }
    return frozenset(
        Assignment(theta)
        for theta in product(X, P.domains)
        if all(restrict(theta, X & c.scope_set) in rows for c, rows in allowed.items())
    )


def oracle_pac(c, theta) -> bool:
    return restrict(theta, theta.keys()) in oracle_extension_projection(c, theta.keys())


def oracle_min_cost(P: WcspInstance):
    best = None
    for theta in product(P.variables, P.domains):
        if all(c.evaluate({v: theta[v] for v in c.scope}) for c in P.constraints):
            q = sum(c.costs[Assignment({v: theta[v] for v in c.scope})] for c in P.constraints)
            if best is None or q < best:
                best = q
    return best


def oracle_treewidth(vertices, edges) -> int:
    """Minimum over all elimination orderings of the max fill-in degree."""
    vertices = sorted(vertices)
    if not vertices:
        return -1
    adj0 = {v: set() for v in vertices}
    for e in edges:
        for u in e:
            adj0[u] |= set(e) - {u}
    best = len(vertices) - 1
    for order in itertools.permutations(vertices):
        adj = {v: set(n) for v, n in adj0.items()}
        width = 0
        for v in order:
            nb = adj.pop(v)
            width = max(width, len(nb))
            if width >= best:
                break
            for u in nb:
                adj[u] |= nb - {u}
                adj[u].discard(v)
        best = min(best, width)
    return best


def random_backdoor_instance(rng: random.Random, max_vars: int = 5, max_dom: int = 3) -> CspInstance:
    """PAC tables/EGCs plus one explicit-set EGC whose scope they cover."""
    while True:
        P = random_pac_instance(rng, max_vars, max_dom, kinds=("table", "egc"))
        if len(P.variables) >= 2:
            break
    scope = rng.sample(sorted(P.variables), rng.randint(2, len(P.variables)))
    hard = random_explicit_egc(rng, scope, {v: P.domain(v) for v in scope})
    return CspInstance(P.domains, P.constraints + (hard,))


# fixed instances ---------------------------------------------------------


def equality_family(n: int):
    """Parts P (an EGC with exactly four ones on x1..xn plus xi = yi tables)
    and Q (an EGC with exactly n ones and n zeros on y1..yn, z1..zn)."""
    B = frozenset({0, 1})
    xs = [f"x{i}" for i in range(1, n + 1)]
    ys = [f"y{i}" for i in range(1, n + 1)]
    zs = [f"z{i}" for i in range(1, n + 1)]
    four = EgcConstraint(xs, {1: CardinalitySet.of({4}), 0: CardinalitySet.interval(0, n)},
                         {v: B for v in xs})
    eqs = [TableConstraint([x, y], [(0, 0), (1, 1)], {x: B, y: B}) for x, y in zip(xs, ys)]
    P = CspInstance({v: B for v in xs + ys}, [four] + eqs)
    half = EgcConstraint(ys + zs, {1: CardinalitySet.of({n}), 0: CardinalitySet.of({n})},
                         {v: B for v in ys + zs})
    Q = CspInstance({v: B for v in ys + zs}, [half])
    return P, Q


def dense_pair(n: int = 8) -> CspInstance:
    """Two negative constraints on the same n booleans: 2^n - 2 solutions
    against an instance size of 7n."""
    B = frozenset({0, 1})
    vs = [f"u{i}" for i in range(n)]
    d = {v: B for v in vs}
    return CspInstance(d, [NegativeConstraint(vs, [(0,) * n], d),
                           NegativeConstraint(vs, [(1,) * n], d)])


def oracle_lp_max(A, b, c) -> float:
    """max c·x s.t. Ax <= b, x >= 0 in floating point (HiGHS)."""
    from scipy.optimize import linprog

    res = linprog([-x for x in c], A_ub=A, b_ub=b, bounds=[(0, None)] * len(c), method="highs")
    assert res.status == 0, res.message
    return -res.fun


def oracle_rho_star(edges, X) -> float:
    """min Σγ s.t. every vertex of X is covered with weight >= 1, in floating point."""
    from scipy.optimize import linprog

    edges = [frozenset(e) for e in edges]
    X = sorted(X)
    A = [[-int(v in e) for e in edges] for v in X]
    res = linprog([1] * len(edges), A_ub=A, b_ub=[-1] * len(X),
                  bounds=[(0, 1)] * len(edges), method="highs")
    assert res.status == 0, res.message
    return res.fun


def oracle_width(vertices, edges, cost) -> object:
    """min over all elimination orderings of the max bag cost."""
    vertices = sorted(vertices)
    adj0 = {v: set() for v in vertices}
    for e in edges:
        for u in e:
            adj0[u] |= set(e) - {u}
    best = None
    for order in itertools.permutations(vertices):
        adj = {v: set(n) for v, n in adj0.items()}
        width = None
        for v in order:
            nb = adj.pop(v)
            w = cost(frozenset(nb | {v}))
            width = w if width is None or w > width else width
            if best is not None and width >= best:
                break
            for u in nb:
                adj[u] |= nb - {u}
                adj[u].discard(v)
        if best is None or width < best:
            best = width
    return best


def oracle_edge_cover(edges, X) -> int:
    """Smallest number of hyperedges covering X, by trying all subsets."""
    edges = sorted({frozenset(e) for e in edges}, key=sorted)
    X = frozenset(X)
    for k in range(1, len(edges) + 1):
        for combo in itertools.combinations(edges, k):
            if X <= frozenset().union(*combo):
                return k
    raise ValueError("not coverable")


def random_hypergraph(rng: random.Random, max_vertices: int = 6, max_edges: int = 5):
    from globalcsp.core import Hypergraph

    n = rng.randint(1, max_vertices)
    vs = names(n)
    edges = random_scopes(rng, vs, rng.randint(1, max_edges), max_arity=3)
    return Hypergraph(frozenset(vs), frozenset(frozenset(e) for e in edges))
