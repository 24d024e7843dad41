"""Solving classic instances, directly or over a tree decomposition, and the
reduce-solve-lift pipeline for global-constraint instances."""
from __future__ import annotations

import logging
import warnings
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from .constraints import TableConstraint
from .core import (
    BOTTOM,
    Assignment,
    CspInstance,
    default_budget,
    hypergraph_of,
    restrict,
    sorted_values,
)
from .enumeration import connectivity_order, find_solution
from .errors import ApplicabilityError, BudgetError, SparsityViolation, ValidationError
from .reduction import Reduction, reduce_to_classic
from .structure import TreeDecomposition, treewidth_exact, validate_tree_decomposition

log = logging.getLogger(__name__)

EXACT_TD_LIMIT = 12


def require_classic(P: CspInstance) -> None:
    for c in P.constraints:
        if not isinstance(c, TableConstraint):
            raise ApplicabilityError(f"{c!r} is not a table constraint")


def solve_classic(P: CspInstance) -> Assignment | None:
    """Backtracking with table lookups; None means unsatisfiable."""
    require_classic(P)
    return find_solution(P)


# tree decompositions -----------------------------------------------------


def single_bag_decomposition(P: CspInstance) -> TreeDecomposition:
    return TreeDecomposition({0: P.variables})


def rooted(td: TreeDecomposition, root=None):
    """(root, parent map, nodes in BFS order) for a validated tree."""
    adj = td.adjacency()
    if root is None:
        root = min(td.bags, key=repr)
    parent = {root: None}
    order = [root]
    for t in order:
        for u in sorted(adj[t], key=repr):
            if u not in parent:
                parent[u] = t
                order.append(u)
    return root, parent, order


def bag_relation(bag: Iterable[str], tables: Iterable[TableConstraint], domains: Mapping,
                 budget: int | None = None) -> list:
    """All assignments of ``bag`` consistent with the projection of every
    table onto the bag, in deterministic order."""
    order = sorted(bag)
    touching = [c for c in tables if c.scope_set & set(order)]
    budget = default_budget() if budget is None else budget
    by_depth = []
    bound = set()
    for v in order:
        bound.add(v)
        checks = []
        for c in touching:
            if v in c.scope_set:
                on = frozenset(c.scope_set & bound)
                checks.append((on, c.projected_rows(on)))
        by_depth.append(checks)
    out = []
    theta = {}

    def dfs(i):
        if i == len(order):
            out.append(Assignment(theta))
            if len(out) > budget:
                raise BudgetError(f"bag relation exceeds the budget {budget}")
            return
        v = order[i]
        for a in sorted_values(domains[v]):
            theta[v] = a
            if all(restrict(theta, on) in rows for on, rows in by_depth[i]):
                dfs(i + 1)
        del theta[v]

    dfs(0)
    return out


def solve_via_tree_decomposition(
    P: CspInstance, td: TreeDecomposition, budget: int | None = None
) -> Assignment | None:
    """Bag joins, a leaf-to-root semijoin pass and root-to-leaf extraction."""
    require_classic(P)
    if not P.variables:
        return BOTTOM
    if not validate_tree_decomposition(hypergraph_of(P), td):
        raise ValidationError("tree decomposition does not fit the instance hypergraph")
    budget = default_budget() if budget is None else budget
    rel = {}
    total = 0
    for t, bag in td.bags.items():
        rel[t] = bag_relation(bag, P.constraints, P.domains, budget)
        total += len(rel[t])
        if total > budget:
            raise BudgetError(f"bag relations exceed the budget {budget}")
    root, parent, order = rooted(td)
    for t in reversed(order):
        p = parent[t]
        if p is None:
            continue
        shared = td.bags[t] & td.bags[p]
        keys = {restrict(s, shared) for s in rel[t]}
        rel[p] = [s for s in rel[p] if restrict(s, shared) in keys]
    if not rel[root]:
        return None
    chosen = {root: rel[root][0]}
    for t in order[1:]:
        p = parent[t]
        shared = td.bags[t] & td.bags[p]
        want = restrict(chosen[p], shared)
        chosen[t] = next(s for s in rel[t] if restrict(s, shared) == want)
    merged = {}
    for s in chosen.values():
        merged.update(s)
    theta = Assignment(merged)
    if not P.is_solution(theta):  # pragma: no cover - guards the join logic
        raise AssertionError("tree-decomposition solve produced a non-solution")
    return theta


def decompose(P: CspInstance, exact_limit: int = EXACT_TD_LIMIT) -> TreeDecomposition:
    """Optimal-width decomposition at desk scale, otherwise a single bag."""
    if not P.variables or len(P.variables) > exact_limit:
        return single_bag_decomposition(P)
    return treewidth_exact(hypergraph_of(P)).decomposition


# pipeline ----------------------------------------------------------------


@dataclass
class PipelineResult:
    solution: Assignment | None
    route: str
    reduction: Reduction | None = None
    decomposition: TreeDecomposition | None = None
    notes: list = field(default_factory=list)

    @property
    def satisfiable(self) -> bool:
        return self.solution is not None


def solve_pipeline(P: CspInstance, c: int, fallback: bool = True) -> PipelineResult:
    """Reduce with cap |P|^c, decompose, solve, lift.

    When the cap is reached and ``fallback`` is set, the instance is solved
    by PAC-guided backtracking instead and a warning is emitted.
    """
    try:
        red = reduce_to_classic(P, c)
    except SparsityViolation as exc:
        if not fallback:
            raise
        msg = f"reduction abandoned ({exc}); solving by backtracking search"
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        log.info(msg)
        theta = find_solution(P, order=connectivity_order(P), break_symmetry=True)
        return PipelineResult(theta, "fallback", notes=[msg])
    td = decompose(red.instance)
    theta = solve_via_tree_decomposition(red.instance, td)
    if theta is None:
        return PipelineResult(None, "reduction", red, td)
    lifted = red.lift(theta)
    return PipelineResult(lifted, "reduction", red, td)

