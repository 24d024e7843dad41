"""Weighted constraints, WCSP instances and the weighted reduction.

Costs are exact rationals (``fractions.Fraction``) and may be negative.
A weighted constraint is an ordinary global constraint (satisfaction is
delegated to its unweighted base) that also prices each satisfying
assignment.
"""
from __future__ import annotations

from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction

from .constraints import GlobalConstraint, Pac, TableConstraint, project_instance
from .core import (
    STAR,
    Assignment,
    CspInstance,
    default_budget,
    disjoint_union,
    hypergraph_of,
    restrict,
)
from .enumeration import enum_solutions, search_solutions
from .errors import (
    ApplicabilityError,
    BudgetError,
    CapabilityError,
    MembershipError,
    ScopeError,
    SparsityViolation,
    ValidationError,
)
from .reduction import SubproblemConstraint, SubproblemDecomposition
from .solve import bag_relation, decompose, rooted


def as_cost(value) -> Fraction:
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def cost_bits(q: Fraction) -> int:
    """Bits of a sign + numerator + denominator encoding."""
    return 1 + max(1, abs(q.numerator).bit_length()) + q.denominator.bit_length()


class WeightedConstraint(GlobalConstraint):
    """Base class; ``base`` decides satisfaction, subclasses price solutions."""

    kind = "weighted"

    def __init__(self, base: GlobalConstraint, scope: Iterable[str] | None = None):
        super().__init__(base.scope if scope is None else scope, base.domains)
        self.base = base
        self.pac = base.pac

    def _key(self):
        return self.base

    def _accepts(self, theta):
        return self.base.evaluate(theta)

    def _extends(self, theta):
        return self.base.pac_extends(theta)

    @property
    def has_weighted_pac(self) -> bool:
        return self.has_pac

    def cost(self, theta: Mapping) -> Fraction:
        if not self.evaluate(theta):
            raise ApplicabilityError(f"{dict(theta)} does not satisfy {self!r}")
        return self._cost(Assignment(theta))

    def _cost(self, theta: Assignment) -> Fraction:
        raise NotImplementedError

    def min_cost_extension(self, theta: Mapping) -> Fraction | None:
        """min cost over satisfying assignments extending ``theta``."""
        raise NotImplementedError

    def weighted_pac(self, theta: Mapping, k) -> bool:
        if not self.scope_set.issuperset(theta):
            raise ScopeError(f"{sorted(set(theta) - self.scope_set)} outside {self!r}")
        if not self.has_weighted_pac:
            raise CapabilityError(f"{self!r} does not allow weighted partial assignment checking")
        best = self.min_cost_extension(theta)
        return best is not None and best <= as_cost(k)


class WeightedTable(WeightedConstraint):
    """Table constraint with an inline cost per row.

    ``tag`` only distinguishes otherwise identical tables (two parts of a
    decomposition may induce equal tables that must both be counted).
    """

    kind = "wtable"

    def __init__(self, scope, rows, domains, tag=None):
        scope = tuple(scope)
        pairs = rows.items() if isinstance(rows, Mapping) else rows
        costs = {}
        for row, cost in pairs:
            if not isinstance(row, Mapping):
                row = dict(zip(scope, row))
            costs[Assignment(row)] = as_cost(cost)
        super().__init__(TableConstraint(scope, costs, domains))
        self.costs = costs
        self.tag = tag

    def _key(self):
        return (self.base, frozenset(self.costs.items()), self.tag)

    @property
    def description_size(self):
        return self.base.description_size + sum(cost_bits(q) for q in self.costs.values())

    @property
    def rows(self):
        return self.base.rows

    def _cost(self, theta):
        return self.costs[theta]

    def min_cost_extension(self, theta):
        found = [q for row, q in self.costs.items() if row.agrees_with(theta)]
        return min(found) if found else None

    def sorted_rows(self) -> list:
        return [(row, self.costs[row]) for row in self.base.sorted_rows()]


class BlackBoxWeighted(WeightedConstraint):
    """A constraint priced by a procedure, with weighted PAC given as a
    decision oracle ``decide(theta, k)``.

    Costs are assumed to be multiples of ``1/denominator`` inside
    ``[lower, upper]``; minimum costs are then found by binary search over
    the scaled integer range.
    """

    kind = "wblackbox"

    def __init__(self, base, cost_fn: Callable, decide: Callable, denominator: int | None,
                 lower, upper):
        super().__init__(base)
        self.cost_fn = cost_fn
        self.decide = decide
        self.denominator = denominator
        self.lower = as_cost(lower)
        self.upper = as_cost(upper)
        self.pac = Pac.NATIVE
        self.calls = 0

    def _key(self):
        return (self.base, self.cost_fn, self.decide, self.denominator, self.lower, self.upper)

    @property
    def description_size(self):
        extra = cost_bits(self.lower) + cost_bits(self.upper)
        return self.base.description_size + extra + (self.denominator or 1).bit_length()

    def _accepts(self, theta):
        return self.base.evaluate(theta)

    def _extends(self, theta):
        return self._ask(theta, self.upper)

    def _cost(self, theta):
        return as_cost(self.cost_fn(theta))

    def _ask(self, theta, k) -> bool:
        self.calls += 1
        return bool(self.decide(Assignment(theta), k))

    def min_cost_extension(self, theta):
        if not self.denominator or self.denominator < 1:
            raise CapabilityError("binary search needs a positive denominator bound")
        L = self.denominator
        lo = (self.lower * L).__floor__()
        hi = (self.upper * L).__ceil__()
        if not self._ask(theta, Fraction(hi, L)):
            return None
        while lo < hi:
            mid = (lo + hi) // 2
            if self._ask(theta, Fraction(mid, L)):
                hi = mid
            else:
                lo = mid + 1
        return Fraction(lo, L)


class WeightedProjection(WeightedConstraint):
    """pj_X of a weighted constraint: extendable assignments priced at the
    cheapest extension."""

    kind = "wprojected"

    def __init__(self, base: WeightedConstraint, variables):
        variables = sorted(variables)
        super().__init__(base, variables)

    def _key(self):
        return (self.base, self.scope_set)

    @property
    def description_size(self):
        return self.base.description_size + len(self.scope)

    def _accepts(self, theta):
        return self.base.pac_extends(theta)

    def _extends(self, theta):
        return self.base.pac_extends(theta)

    def _cost(self, theta):
        return self.base.min_cost_extension(theta)

    def min_cost_extension(self, theta):
        return self.base.min_cost_extension(theta)

    def __repr__(self):
        return f"pj[{', '.join(self.scope)}]({self.base!r})"


class WcspInstance(CspInstance):
    """A CSP instance whose constraints are all weighted."""

    def __init__(self, domains: Mapping, constraints: Iterable):
        constraints = list(constraints)
        for c in constraints:
            if not isinstance(c, WeightedConstraint):
                raise ValidationError(f"{c!r} is not a weighted constraint")
        super().__init__(domains, constraints)

    @property
    def is_classic(self) -> bool:
        return all(isinstance(c, WeightedTable) for c in self.constraints)


class WeightedSubproblem(WeightedConstraint):
    """A WCSP instance viewed as one weighted constraint over its variables."""

    kind = "wsubproblem"

    def __init__(self, part: WcspInstance):
        super().__init__(SubproblemConstraint(part))
        self.part = part

    def _key(self):
        return self.part

    @property
    def description_size(self):
        return self.base.description_size

    def _cost(self, theta):
        return wcost(self.part, theta)

    def min_cost_extension(self, theta):
        best = wcsp_optimal(self.part, seed=theta)
        return None if best is None else best.value

    def witness(self, seed: Mapping) -> Assignment | None:
        best = wcsp_optimal(self.part, seed=seed)
        return None if best is None else best.solution


# operations ---------------------------------------------------------------


def wcost(P: WcspInstance, theta: Mapping) -> Fraction:
    if not P.is_solution(theta):
        raise ApplicabilityError("cost is only defined on solutions")
    return sum((c.cost(restrict(theta, c.scope)) for c in P.constraints), Fraction(0))


def weighted_pac(c: WeightedConstraint, theta: Mapping, k) -> bool:
    return c.weighted_pac(theta, k)


def min_cost_extension(c: WeightedConstraint, theta: Mapping) -> Fraction | None:
    if not c.has_weighted_pac:
        raise CapabilityError(f"{c!r} does not allow weighted partial assignment checking")
    return c.min_cost_extension(theta)


def weighted_project(c: WeightedConstraint, variables) -> WeightedConstraint:
    X = frozenset(variables)
    if not X:
        raise ScopeError("projection onto the empty set is not a constraint")
    if not X <= c.scope_set:
        raise ScopeError(f"{sorted(X - c.scope_set)} outside {c!r}")
    if X == c.scope_set:
        return c
    if not c.has_weighted_pac:
        raise CapabilityError(f"{c!r} cannot be projected without weighted PAC")
    if isinstance(c, WeightedProjection):
        c = c.base
    return WeightedProjection(c, X)


def weighted_project_instance(P: WcspInstance, variables) -> WcspInstance:
    X = frozenset(variables)
    if not X or not X <= P.variables:
        raise ScopeError("projection set must be a nonempty subset of the variables")
    cons = [weighted_project(c, X & c.scope_set) for c in P.constraints if X & c.scope_set]
    return WcspInstance({v: P.domain(v) for v in X}, cons)


@dataclass
class Optimum:
    value: Fraction
    solution: Assignment


def wcsp_optimal(P: WcspInstance, seed: Mapping | None = None,
                 budget: int | None = None) -> Optimum | None:
    """Cheapest solution (extending ``seed``); None if there is none.

    Classic instances without a seed are solved by min-sum dynamic
    programming over a tree decomposition; everything else by exhaustive
    PAC-pruned search.
    """
    budget = default_budget() if budget is None else budget
    if not seed and isinstance(P, WcspInstance) and P.is_classic and P.variables:
        return _td_min_sum(P, budget)
    best = None
    seen = 0
    for theta in search_solutions(P, seed):
        seen += 1
        if seen > budget:
            raise BudgetError(f"more than {budget} solutions to price")
        q = wcost(P, theta)
        if best is None or q < best.value:
            best = Optimum(q, theta)
    return best


def _td_min_sum(P: WcspInstance, budget: int) -> Optimum | None:
    td = decompose(P)
    tables = [c.base for c in P.constraints]
    rel = {t: bag_relation(bag, tables, P.domains, budget) for t, bag in td.bags.items()}
    home = {t: [] for t in td.bags}
    nodes = sorted(td.bags, key=repr)
    for c in P.constraints:
        t = next(t for t in nodes if c.scope_set <= td.bags[t])
        home[t].append(c)
    root, parent, order = rooted(td)
    children = {t: [] for t in td.bags}
    for t in order[1:]:
        children[parent[t]].append(t)
    value = {}
    pick = {}
    best_of = {}
    for t in reversed(order):
        vals = {}
        for s in rel[t]:
            q = sum((c.costs[restrict(s, c.scope)] for c in home[t]), Fraction(0))
            ok = True
            for ch in children[t]:
                key = restrict(s, td.bags[ch] & td.bags[t])
                hit = best_of[ch].get(key)
                if hit is None:
                    ok = False
                    break
                q += hit[0]
            if ok:
                vals[s] = q
        value[t] = vals
        p = parent[t]
        if p is not None:
            shared = td.bags[t] & td.bags[p]
            table = {}
            for s, q in vals.items():
                key = restrict(s, shared)
                if key not in table or q < table[key][0]:
                    table[key] = (q, s)
            best_of[t] = table
    if not value[root]:
        return None
    top = min(value[root].items(), key=lambda item: item[1])
    pick[root] = top[0]
    for t in order[1:]:
        p = parent[t]
        pick[t] = best_of[t][restrict(pick[p], td.bags[t] & td.bags[p])][1]
    merged = {}
    for s in pick.values():
        merged.update(s)
    theta = Assignment(merged)
    return Optimum(wcost(P, theta), theta)


def wcsp_decision(P: WcspInstance, k) -> bool:
    best = wcsp_optimal(P)
    return best is not None and best.value <= as_cost(k)


# weighted reduction -----------------------------------------------------


def decomposition_cost(S: SubproblemDecomposition, theta: Mapping) -> Fraction:
    """Σ over parts of the part cost; equals the union cost when the parts
    have disjoint constraint sets."""
    return sum((wcost(T, restrict(theta, T.variables)) for T in S.parts), Fraction(0))


def _iv_of_part(S: SubproblemDecomposition, T: WcspInstance) -> frozenset:
    if T not in S.parts:
        raise MembershipError("part is not in the decomposition")
    others = set()
    for U in S.parts:
        if U != T:
            others |= U.variables
    return T.variables & others


def weighted_induced_constraint(
    S: SubproblemDecomposition, T: WcspInstance, cap: int | None = None, tag=None
) -> WeightedTable:
    """Rows θ ⊕ μ* for θ ∈ sol(pj_iv(T)(⊔S)), priced at T's cheapest extension."""
    iv = _iv_of_part(S, T)
    part = WeightedSubproblem(T)
    scope = sorted(T.variables)
    private = [v for v in scope if v not in iv]
    star = Assignment({v: STAR for v in private})
    domains = {v: (T.domain(v) if v in iv else {STAR}) for v in scope}
    if not iv:
        best = part.min_cost_extension({})
        rows = {} if best is None else {star: best}
        return WeightedTable(scope, rows, domains, tag)
    union = S.as_instance()
    report = enum_solutions(project_instance(union, iv), cap=cap)
    if report.cap_hit:
        raise SparsityViolation(
            f"projection onto iv of a part reached the cap {cap}", constraint=part, cap=cap
        )
    rows = {}
    for theta in report.solutions:
        q = part.min_cost_extension(theta)
        if q is None:  # pragma: no cover - θ comes from a projection of S
            raise AssertionError("projected assignment without a part extension")
        rows[disjoint_union(theta, star)] = q
    return WeightedTable(scope, rows, domains, tag)


@dataclass
class WeightedReduction:
    source: SubproblemDecomposition
    instance: WcspInstance
    tables: dict = field(default_factory=dict)

    def lift(self, theta: Mapping) -> Assignment:
        """Cheapest extension of every part, combined."""
        merged = {}
        for T in self.source.parts:
            iv = _iv_of_part(self.source, T)
            piece = WeightedSubproblem(T).witness({v: theta[v] for v in iv})
            if piece is None:
                raise ValidationError("a part does not extend the given assignment")
            for v, a in piece.items():
                if merged.setdefault(v, a) != a:
                    raise ValidationError(f"parts disagree on {v!r}")
        return Assignment(merged)


def reduce_weighted(S: SubproblemDecomposition, cap: int | None = None) -> WeightedReduction:
    for T in S.parts:
        if not isinstance(T, WcspInstance):
            raise ValidationError("weighted reduction needs WCSP parts")
    tables = {T: weighted_induced_constraint(S, T, cap, i) for i, T in enumerate(S.parts)}
    shared = set()
    for T in S.parts:
        shared |= _iv_of_part(S, T)
    domains = {v: (S.union().domain(v) if v in shared else {STAR}) for v in S.variables}
    P = WcspInstance(domains, tables.values())
    if hypergraph_of(P) != S.hypergraph():  # pragma: no cover - by construction
        raise AssertionError("reduced hypergraph differs from the decomposition")
    return WeightedReduction(S, P, tables)
