"""Solution enumeration by nested projections, capped counting, sparsity
probing, and two independent search routes (brute force and PAC-guided
backtracking).
"""
from __future__ import annotations

import itertools
import logging
import random
import time
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass, field

from .constraints import project_instance
from .core import (
    BOTTOM,
    Assignment,
    CspInstance,
    all_assignments,
    default_budget,
    instance_size,
    intersection_variables,
    product_size,
    restrict,
    sorted_values,
)
from .errors import BudgetError, CapabilityError, ScopeError

log = logging.getLogger(__name__)


@dataclass
class EnumerationReport:
    """Outcome of one run of the projection-based enumerator.

    ``per_level_counts[k]`` is the number of solutions of the projection onto
    the ``k`` innermost variables of the elimination order, so the list starts
    with 1 (the empty assignment) and ends with ``len(solutions)`` unless the
    cap was hit.
    """

    solutions: frozenset
    per_level_counts: list
    elapsed: float
    cap_hit: bool
    order: tuple = ()

    @property
    def max_level_count(self) -> int:
        return max(self.per_level_counts, default=0)


def require_pac(P: CspInstance) -> None:
    lacking = [c for c in P.constraints if not c.has_pac]
    if lacking:
        raise CapabilityError(
            f"partial assignment checking unavailable for {lacking[0]!r}"
        )


def elimination_order(P: CspInstance, order: Sequence[str] | None = None) -> tuple:
    """Removal order for the enumerator; default removes the greatest name first."""
    if order is None:
        return tuple(sorted(P.variables, reverse=True))
    order = tuple(order)
    if len(order) != len(P.variables) or set(order) != P.variables:
        raise ScopeError("elimination order must list every variable exactly once")
    return order


def enum_solutions(
    P: CspInstance, order: Sequence[str] | None = None, cap: int | None = None
) -> EnumerationReport:
    """All solutions of ``P`` via EnumSolutions.

    The recursion pj_{V-{w}}(P) is unrolled bottom-up: level ``k`` holds
    sol(pj_W(P)) for the ``k`` innermost variables ``W``, and each of its
    members is extended by every value of the next variable. Only the
    constraints mentioning the new variable need re-checking, since the others
    are unchanged between adjacent levels. With ``cap`` set, the run stops as
    soon as a level reaches ``cap`` members.
    """
    require_pac(P)
    order = elimination_order(P, order)
    start = time.perf_counter()
    innermost = list(reversed(order))
    level = [BOTTOM]
    counts = [1]
    n = len(innermost)
    for k in range(1, n + 1):
        w = innermost[k - 1]
        Q = P if k == n else project_instance(P, innermost[:k])
        checks = Q.constraints_on(w)
        values = sorted_values(Q.domain(w))
        nxt = []
        for theta in level:
            for a in values:
                cand = theta.extend(w, a)
                if all(c.evaluate(restrict(cand, c.scope)) for c in checks):
                    nxt.append(cand)
                    if cap is not None and len(nxt) >= cap:
                        counts.append(len(nxt))
                        return EnumerationReport(
                            frozenset(nxt), counts, time.perf_counter() - start, True, order
                        )
        level = nxt
        counts.append(len(level))
    return EnumerationReport(frozenset(level), counts, time.perf_counter() - start, False, order)


def count_solutions_capped(P: CspInstance, cap: int | None = None) -> int | None:
    """|sol(P)| if every level stays below ``cap``; None once the cap is reached."""
    if cap is not None and cap <= 0:
        return None
    report = enum_solutions(P, cap=cap)
    return None if report.cap_hit else len(report.solutions)


def brute_force_solutions(P: CspInstance, limit: int | None = None) -> frozenset:
    """Every assignment of V filtered by evaluate; never uses PAC."""
    limit = default_budget() if limit is None else limit
    total = product_size(P.variables, P.domains)
    if total > limit:
        raise BudgetError(f"{total} candidate assignments exceed the limit {limit}")
    return frozenset(a for a in all_assignments(P.variables, P.domains) if P.is_solution(a))


def default_search_order(P: CspInstance) -> list:
    """Smallest domain first, ties broken by name."""
    return sorted(P.variables, key=lambda v: (len(P.domain(v)), v))


def connectivity_order(P: CspInstance) -> list:
    """Greedy static order that next picks the variable completing the most
    constraints, then touching the most partly assigned constraints, then
    lying in the most constraints; ties go to smaller domains and names.

    Small constraints thus become fully assigned (and checkable) early.
    """
    remaining = {c: len(c.scope) for c in P.constraints}
    touched = {c: 0 for c in P.constraints}
    left = set(P.variables)
    order = []
    while left:
        def score(v):
            cs = P.constraints_on(v)
            completes = sum(1 for c in cs if remaining[c] == 1)
            partial = sum(1 for c in cs if touched[c])
            return (-completes, -partial, -len(cs), len(P.domain(v)), v)

        v = min(left, key=score)
        order.append(v)
        left.discard(v)
        for c in P.constraints_on(v):
            remaining[c] -= 1
            touched[c] += 1
    return order


def _swap_invariant(c, group: frozenset, a, b) -> bool:
    """Is ``c`` unchanged when a and b are swapped on the variables in ``group``?"""
    inside = [v for v in c.scope if v in group]
    if not inside:
        return True

    def swap(theta):
        out = dict(theta)
        for v in inside:
            if out[v] == a:
                out[v] = b
            elif out[v] == b:
                out[v] = a
        return Assignment(out)

    rows = getattr(c, "rows", None)
    if rows is None:
        rows = getattr(c, "forbidden", None)
    if rows is not None and c.kind in ("table", "negative"):
        return all(swap(r) in rows for r in rows)
    card = getattr(c, "cardinality", None)
    if card is not None and c.kind == "egc":
        outside = [v for v in c.scope if v not in group and {a, b} & c.domain(v)]
        return not outside and card.get(a) == card.get(b)
    return False


def interchangeable_values(P: CspInstance) -> dict:
    """Map variable -> (group, classes) for values that are fully interchangeable.

    Variables are grouped by identical domain; two values are linked when
    swapping them on the whole group maps every constraint onto itself.
    Classes are the connected components of that relation, so every
    permutation within a class is a symmetry of ``P``.
    """
    by_domain = {}
    for v in sorted(P.variables):
        by_domain.setdefault(P.domain(v), []).append(v)
    out = {}
    for dom, members in by_domain.items():
        if len(dom) < 2:
            continue
        group = frozenset(members)
        cons = {c for v in members for c in P.constraints_on(v)}
        values = sorted_values(dom)
        parent = {a: a for a in values}

        def find(a):
            while parent[a] != a:
                a = parent[a]
            return a

        for a, b in itertools.combinations(values, 2):
            if find(a) != find(b) and all(_swap_invariant(c, group, a, b) for c in cons):
                parent[find(b)] = find(a)
        classes = {}
        for a in values:
            classes.setdefault(find(a), []).append(a)
        classes = [tuple(cl) for cl in classes.values() if len(cl) > 1]
        if classes:
            for v in members:
                out[v] = (group, classes)
    return out


def search_solutions(
    P: CspInstance,
    seed: Mapping | None = None,
    order: Sequence[str] | None = None,
    break_symmetry: bool = False,
) -> Iterator[Assignment]:
    """Backtracking over ``P`` that prunes with partial assignment checks.

    Constraints without PAC are only checked once their scope is fully
    assigned. ``seed`` fixes some variables up front. With
    ``break_symmetry`` only one representative of interchangeable unused
    values is tried, so some solutions are skipped but satisfiability is
    decided correctly.
    """
    seed = dict(seed or {})
    for v, a in seed.items():
        if v not in P.variables:
            raise ScopeError(f"seed variable {v!r} not in the instance")
        if a not in P.domain(v):
            return
    order = [v for v in (order or default_search_order(P)) if v not in seed]
    theta = dict(seed)

    def consistent(var) -> bool:
        for c in P.constraints_on(var):
            sub = {v: theta[v] for v in c.scope if v in theta}
            if len(sub) == len(c.scope):
                if not c.evaluate(sub):
                    return False
            elif c.has_pac and not c.pac_extends(sub):
                return False
        return True

    if any(not consistent(v) for v in seed):
        return
    if not order and not seed:
        if not P.variables:
            yield BOTTOM
        return
    values = {v: sorted_values(P.domain(v)) for v in order}
    symmetric = interchangeable_values(P) if break_symmetry else {}

    def candidates(var):
        entry = symmetric.get(var)
        if entry is None:
            return values[var]
        group, classes = entry
        used = {theta[w] for w in group if w in theta}
        skip = set()
        for cl in classes:
            fresh = [a for a in cl if a not in used]
            skip.update(fresh[1:])
        return [a for a in values[var] if a not in skip]

    def dfs(i):
        if i == len(order):
            yield Assignment(theta)
            return
        var = order[i]
        for a in candidates(var):
            theta[var] = a
            if consistent(var):
                yield from dfs(i + 1)
        del theta[var]

    if order:
        yield from dfs(0)
    else:
        yield Assignment(theta)


def find_solution(
    P: CspInstance,
    seed: Mapping | None = None,
    order: Sequence[str] | None = None,
    break_symmetry: bool = False,
) -> Assignment | None:
    return next(search_solutions(P, seed, order, break_symmetry), None)


@dataclass
class SparsityCertificate:
    """Evidence about sparse intersections for one exponent.

    ``verdict`` is ``"sparse"`` when every subset of every iv set was probed
    and stayed below the bound, ``"exhausted-budget"`` when the sampled probes
    stayed below the bound but not every subset was probed, and
    ``"not-sparse"`` when some probe reached the bound.
    """

    exponent: int
    bound: int
    per_constraint: dict = field(default_factory=dict)
    verdict: str = "sparse"
    complete: bool = True
    probes: int = 0
    offending: tuple | None = None

    @property
    def max_count(self) -> int:
        return max(self.per_constraint.values(), default=0)


def _probe_sets(iv: frozenset, budget: int, rng: random.Random) -> tuple[list, bool]:
    ordered = sorted(iv)
    proper = (1 << len(ordered)) - 2
    if proper <= budget:
        subsets = [
            frozenset(combo)
            for r in range(1, len(ordered))
            for combo in itertools.combinations(ordered, r)
        ]
        return [iv] + subsets, True
    seen = set()
    while len(seen) < budget:
        mask = rng.randrange(1, (1 << len(ordered)) - 1)
        seen.add(frozenset(v for i, v in enumerate(ordered) if mask >> i & 1))
    return [iv] + sorted(seen, key=sorted), False


def has_sparse_intersections(
    P: CspInstance, c: int, probe_budget: int = 64, seed: int = 0
) -> SparsityCertificate:
    """Probe |sol(pj_X(P))| < |P|^c for X ⊆ iv(δ) of every constraint.

    X = iv(δ) is always checked; proper subsets are enumerated exhaustively
    when there are at most ``probe_budget`` of them, otherwise sampled.
    """
    require_pac(P)
    bound = instance_size(P) ** c
    cert = SparsityCertificate(exponent=c, bound=bound)
    rng = random.Random(seed)
    for con in P.constraints:
        iv = intersection_variables(P, con)
        if not iv:
            continue
        subsets, complete = _probe_sets(iv, probe_budget, rng)
        cert.complete &= complete
        worst = 0
        for X in subsets:
            cert.probes += 1
            count = count_solutions_capped(project_instance(P, X), bound)
            if count is None:
                cert.per_constraint[con] = bound
                cert.verdict = "not-sparse"
                cert.offending = (con, X)
                log.info("sparsity bound %d reached for %r on %s", bound, con, sorted(X))
                return cert
            worst = max(worst, count)
        cert.per_constraint[con] = worst
    if not cert.complete:
        cert.verdict = "exhausted-budget"
    return cert
