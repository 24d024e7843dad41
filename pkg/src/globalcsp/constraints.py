"""Global constraints: table, negative, extended global cardinality (EGC),
joins and projections, with partial assignment checking (PAC).

A constraint is a type (the class) plus a description (its fields). Each
constraint knows the domains of its scope variables so that it can answer
PAC queries without an instance at hand.
"""
from __future__ import annotations

import enum
from collections import Counter, deque
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

from .core import (
    Assignment,
    CspInstance,
    all_assignments,
    product_size,
    restrict,
    sorted_values,
)
from .errors import CapabilityError, ConsistencyError, ScopeError, ValidationError


class Pac(enum.Enum):
    NONE = "none"
    NATIVE = "native"
    TABLE = "table-backed"


class GlobalConstraint:
    """Common behaviour: scope checks, capability checks, identity.

    Subclasses implement ``_accepts`` (full assignments of the scope) and,
    when they advertise PAC, ``_extends`` (partial assignments).
    """

    kind = "global"
    pac = Pac.NONE

    def __init__(self, scope: Iterable[str], domains: Mapping):
        scope = tuple(scope)
        if not scope:
            raise ValidationError(f"{self.kind} constraint needs a nonempty scope")
        if len(set(scope)) != len(scope):
            raise ValidationError(f"{self.kind} constraint repeats a scope variable")
        missing = [v for v in scope if v not in domains]
        if missing:
            raise ValidationError(f"no domain given for {missing}")
        self.scope = scope
        self.scope_set = frozenset(scope)
        self._domains = {v: frozenset(domains[v]) for v in scope}

    # identity -------------------------------------------------------
    def _key(self):
        raise NotImplementedError

    def __eq__(self, other):
        if not isinstance(other, GlobalConstraint):
            return NotImplemented
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self):
        try:
            return self._hash
        except AttributeError:
            self._hash = hash((type(self).__name__, self._key()))
            return self._hash

    def __repr__(self):
        return f"{self.kind}({', '.join(self.scope)})"

    # domains --------------------------------------------------------
    def domain(self, var: str) -> frozenset:
        return self._domains[var]

    @property
    def domains(self) -> dict:
        return dict(self._domains)

    @property
    def has_pac(self) -> bool:
        return self.pac is not Pac.NONE

    @property
    def description_size(self) -> int:
        raise NotImplementedError

    # semantics ------------------------------------------------------
    def evaluate(self, theta: Mapping) -> bool:
        if set(theta) != self.scope_set:
            raise ScopeError(f"{self!r} evaluated on {sorted(theta)}")
        return self._accepts(theta)

    def pac_extends(self, theta: Mapping) -> bool:
        if not self.scope_set.issuperset(theta):
            raise ScopeError(f"{sorted(set(theta) - self.scope_set)} outside {self!r}")
        if not self.has_pac:
            raise CapabilityError(f"{self!r} does not allow partial assignment checking")
        if len(theta) == len(self.scope):
            return self._accepts(theta)
        return self._extends(theta)

    def _accepts(self, theta) -> bool:
        raise NotImplementedError

    def _extends(self, theta) -> bool:
        raise NotImplementedError

    def extension(self) -> frozenset:
        """Brute-force extension over the scope domains (desk scale only)."""
        return frozenset(
            a for a in all_assignments(self.scope, self._domains) if self._accepts(a)
        )


def _as_row(scope, row) -> Assignment:
    if isinstance(row, Mapping):
        return Assignment(row)
    row = tuple(row)
    if len(row) != len(scope):
        raise ValidationError(f"row {row} does not match scope {scope}")
    return Assignment(zip(scope, row))


def _check_rows(scope, domains, rows) -> frozenset:
    out = set()
    for row in rows:
        row = _as_row(scope, row)
        if row.variables != frozenset(scope):
            raise ValidationError(f"row {row!r} is not a full assignment of {scope}")
        for v, val in row.items():
            if val not in domains[v]:
                raise ValidationError(f"row value {val!r} not in the domain of {v!r}")
        out.add(row)
    return frozenset(out)


class TableConstraint(GlobalConstraint):
    """Allowed tuples, listed explicitly."""

    kind = "table"
    pac = Pac.TABLE

    def __init__(self, scope, rows, domains):
        super().__init__(scope, domains)
        self.rows = _check_rows(self.scope, self._domains, rows)
        self._projections = {}

    def _key(self):
        return (self.scope, frozenset(self._domains.items()), self.rows)

    @property
    def description_size(self):
        return len(self.rows) * len(self.scope) + len(self.scope)

    def _accepts(self, theta):
        return Assignment(theta) in self.rows

    def projected_rows(self, variables) -> frozenset:
        variables = frozenset(variables)
        cached = self._projections.get(variables)
        if cached is None:
            cached = frozenset(restrict(r, variables) for r in self.rows)
            self._projections[variables] = cached
        return cached

    def _extends(self, theta):
        return Assignment(theta) in self.projected_rows(theta)

    def sorted_rows(self) -> list:
        return sorted(self.rows, key=Assignment.sort_key)


class NegativeConstraint(GlobalConstraint):
    """Forbidden tuples, listed explicitly."""

    kind = "negative"
    pac = Pac.NATIVE

    def __init__(self, scope, forbidden, domains):
        super().__init__(scope, domains)
        self.forbidden = _check_rows(self.scope, self._domains, forbidden)
        self._counts = {}

    def _key(self):
        return (self.scope, frozenset(self._domains.items()), self.forbidden)

    @property
    def description_size(self):
        return len(self.forbidden) * len(self.scope) + len(self.scope)

    def _accepts(self, theta):
        return Assignment(theta) not in self.forbidden

    def _extends(self, theta):
        # θ extends iff some completion is not forbidden: compare the number of
        # forbidden rows consistent with θ against the number of completions
        variables = frozenset(theta)
        counts = self._counts.get(variables)
        if counts is None:
            counts = Counter(restrict(r, variables) for r in self.forbidden)
            self._counts[variables] = counts
        free = [v for v in self.scope if v not in variables]
        return counts[Assignment(theta)] < product_size(free, self._domains)


@dataclass(frozen=True)
class CardinalitySet:
    """Either an interval ``[lo, hi]`` or an explicit finite set of naturals."""

    lo: int | None = None
    hi: int | None = None
    values: frozenset | None = None

    @classmethod
    def interval(cls, lo: int, hi: int) -> CardinalitySet:
        if not 0 <= lo <= hi:
            raise ValidationError(f"bad cardinality interval [{lo}, {hi}]")
        return cls(lo=lo, hi=hi)

    @classmethod
    def of(cls, values: Iterable[int]) -> CardinalitySet:
        values = frozenset(values)
        if any(not isinstance(n, int) or n < 0 for n in values):
            raise ValidationError(f"cardinalities must be naturals: {sorted(values)}")
        return cls(values=values)

    @classmethod
    def coerce(cls, spec) -> CardinalitySet:
        if isinstance(spec, CardinalitySet):
            return spec
        if isinstance(spec, range):
            return cls.interval(spec.start, spec.stop - 1)
        if isinstance(spec, int):
            return cls.of([spec])
        return cls.of(spec)

    @property
    def is_interval(self) -> bool:
        return self.values is None

    def bounds(self) -> tuple[int, int] | None:
        """Interval bounds, normalizing contiguous explicit sets; else None."""
        if self.values is None:
            return self.lo, self.hi
        if not self.values:
            return None
        lo, hi = min(self.values), max(self.values)
        if len(self.values) == hi - lo + 1:
            return lo, hi
        return None

    def __contains__(self, n):
        if self.values is None:
            return self.lo <= n <= self.hi
        return n in self.values

    @property
    def size(self) -> int:
        return 2 if self.values is None else len(self.values)

    def __repr__(self):
        if self.values is None:
            return f"[{self.lo},{self.hi}]"
        return "{" + ",".join(map(str, sorted(self.values))) + "}"


class EgcConstraint(GlobalConstraint):
    """Extended global cardinality: the number of scope variables taking
    value ``a`` must lie in ``K(a)`` for every ``a`` in the scope domains.

    PAC is advertised only when every cardinality set is an interval (after
    normalization); general EGC satisfiability is NP-hard.
    """

    kind = "egc"

    def __init__(self, scope, cardinality: Mapping, domains):
        super().__init__(scope, domains)
        values = set().union(*self._domains.values())
        card = {a: CardinalitySet.coerce(k) for a, k in cardinality.items()}
        if set(card) != values:
            missing = sorted_values(values - set(card))
            extra = sorted_values(set(card) - values)
            raise ValidationError(
                f"EGC cardinality keys must match the scope values (missing {missing}, extra {extra})"
            )
        for a, k in card.items():
            if k.is_interval and k.hi > len(self.scope):
                raise ValidationError(
                    f"interval {k!r} for value {a!r} exceeds the scope size {len(self.scope)}"
                )
        self.cardinality = {a: card[a] for a in sorted_values(card)}
        self._bounds = {a: k.bounds() for a, k in self.cardinality.items()}
        self.pac = (
            Pac.NATIVE if all(b is not None for b in self._bounds.values()) else Pac.NONE
        )

    def _key(self):
        return (self.scope, frozenset(self._domains.items()), frozenset(self.cardinality.items()))

    @property
    def description_size(self):
        return len(self.scope) + sum(k.size for k in self.cardinality.values())

    def _accepts(self, theta):
        counts = Counter(theta.values())
        return all(counts[a] in k for a, k in self.cardinality.items())

    def _extends(self, theta):
        counts = Counter(theta.values())
        lower, upper = {}, {}
        for a, (lo, hi) in self._bounds.items():
            room = hi - counts[a]
            if room < 0:
                return False
            lower[a] = max(0, lo - counts[a])
            upper[a] = room
        free = [v for v in self.scope if v not in theta]
        return cardinality_feasible([self._domains[v] for v in free], lower, upper)


def cardinality_feasible(free_domains: list, lower: Mapping, upper: Mapping) -> bool:
    """Can each free variable pick a value from its domain so that every value
    ``a`` is used between ``lower[a]`` and ``upper[a]`` times?

    Decided as a feasible circulation with lower bounds on the bipartite
    network variables → values.
    """
    n = len(free_domains)
    reachable = set().union(*free_domains) if free_domains else set()
    if any(lower[a] > 0 for a in lower if a not in reachable):
        return False
    if n == 0:
        return all(lower[a] == 0 for a in lower)
    if all(d == free_domains[0] for d in free_domains):
        dom = free_domains[0]
        lo = sum(lower[a] for a in dom)
        hi = sum(upper[a] for a in dom)
        return lo <= n <= hi
    if sum(lower.values()) > n:
        return False
    # circulation: s→var [1,1], var→val [0,1], val→t [lower, upper], t→s [0, n]
    cap = {}

    def add(u, v, c):
        cap.setdefault(u, {}).setdefault(v, 0)
        cap[u][v] += c
        cap.setdefault(v, {}).setdefault(u, 0)

    excess = Counter()
    for i, dom in enumerate(free_domains):
        var = ("var", i)
        excess[var] += 1  # lower bound on s→var
        excess["s"] -= 1
        for a in dom:
            add(var, ("val", a), 1)
    for a in reachable:
        val = ("val", a)
        add(val, "t", upper[a] - lower[a])
        excess["t"] += lower[a]
        excess[val] -= lower[a]
    add("t", "s", n)
    demand = 0
    for node, ex in excess.items():
        if ex > 0:
            add("S*", node, ex)
            demand += ex
        elif ex < 0:
            add(node, "T*", -ex)
    return _max_flow(cap, "S*", "T*") == demand


def _max_flow(cap: dict, source, sink) -> int:
    flow = 0
    while True:
        parent = {source: None}
        queue = deque([source])
        while queue and sink not in parent:
            u = queue.popleft()
            for v, c in cap[u].items():
                if c > 0 and v not in parent:
                    parent[v] = u
                    queue.append(v)
        if sink not in parent:
            return flow
        path, v = [], sink
        while parent[v] is not None:
            path.append((parent[v], v))
            v = parent[v]
        push = min(cap[u][v] for u, v in path)
        for u, v in path:
            cap[u][v] -= push
            cap[v][u] += push
        flow += push


class JoinConstraint(GlobalConstraint):
    """Lazy conjunction of two constraints over the union of their scopes."""

    kind = "join"

    def __init__(self, left: GlobalConstraint, right: GlobalConstraint):
        domains = _merged_domains(left, right)
        scope = left.scope + tuple(v for v in right.scope if v not in left.scope_set)
        super().__init__(scope, domains)
        self.left, self.right = left, right

    def _key(self):
        return (self.left, self.right)

    @property
    def description_size(self):
        return self.left.description_size + self.right.description_size

    def _accepts(self, theta):
        return self.left.evaluate(restrict(theta, self.left.scope)) and self.right.evaluate(
            restrict(theta, self.right.scope)
        )


def _merged_domains(c1, c2) -> dict:
    domains = c1.domains
    for v, d in c2.domains.items():
        if v in domains and domains[v] != d:
            raise ConsistencyError(f"join operands disagree on the domain of {v!r}")
        domains[v] = d
    return domains


def join(c1: GlobalConstraint, c2: GlobalConstraint) -> GlobalConstraint:
    """Constraint join; two tables give a materialized relational join."""
    if isinstance(c1, TableConstraint) and isinstance(c2, TableConstraint):
        domains = _merged_domains(c1, c2)
        scope = c1.scope + tuple(v for v in c2.scope if v not in c1.scope_set)
        shared = c1.scope_set & c2.scope_set
        index = {}
        for r in c2.rows:
            index.setdefault(restrict(r, shared), []).append(r)
        rows = []
        for r1 in c1.rows:
            for r2 in index.get(restrict(r1, shared), ()):
                merged = dict(r1)
                merged.update(r2)
                rows.append(Assignment(merged))
        return TableConstraint(scope, rows, domains)
    return JoinConstraint(c1, c2)


class ProjectedConstraint(GlobalConstraint):
    """pj_X of a constraint, kept as the original plus the target scope.

    Membership of μ over X is decided by asking the original constraint
    whether μ extends, so projections never materialize extensions.
    """

    kind = "projected"

    def __init__(self, base: GlobalConstraint, variables):
        variables = frozenset(variables)
        super().__init__(tuple(v for v in base.scope if v in variables), base.domains)
        self.base = base
        self.pac = base.pac

    def _key(self):
        return (self.base, self.scope)

    @property
    def description_size(self):
        return self.base.description_size + len(self.scope)

    def _accepts(self, theta):
        return self.base.pac_extends(theta)

    def _extends(self, theta):
        return self.base.pac_extends(theta)

    def __repr__(self):
        return f"pj[{', '.join(self.scope)}]({self.base!r})"


def evaluate(c: GlobalConstraint, theta: Mapping) -> bool:
    return c.evaluate(theta)


def pac_extends(c: GlobalConstraint, theta: Mapping) -> bool:
    return c.pac_extends(theta)


def project_constraint(c: GlobalConstraint, variables: Iterable[str]) -> GlobalConstraint:
    variables = frozenset(variables)
    if not variables:
        raise ScopeError("projection onto the empty set is not supported")
    if not variables <= c.scope_set:
        raise ScopeError(f"{sorted(variables - c.scope_set)} not in the scope of {c!r}")
    if variables == c.scope_set:
        return c
    if isinstance(c, ProjectedConstraint):
        c = c.base
    if not c.has_pac:
        raise CapabilityError(f"cannot project {c!r}: no partial assignment checking")
    return ProjectedConstraint(c, variables)


def project_instance(P: CspInstance, variables: Iterable[str]) -> CspInstance:
    """pj_X(P): every constraint meeting X projected onto its part of X."""
    variables = frozenset(variables)
    if not variables:
        raise ScopeError("projection onto the empty set is not supported")
    if not variables <= P.variables:
        raise ScopeError(f"{sorted(variables - P.variables)} not variables of the instance")
    constraints = [
        project_constraint(c, variables & c.scope_set)
        for c in P.constraints
        if variables & c.scope_set
    ]
    return CspInstance({v: P.domain(v) for v in variables}, constraints)


def table(scope, rows, domains) -> TableConstraint:
    return TableConstraint(scope, rows, domains)


def negative(scope, forbidden, domains) -> NegativeConstraint:
    return NegativeConstraint(scope, forbidden, domains)


def egc(scope, cardinality, domains) -> EgcConstraint:
    return EgcConstraint(scope, cardinality, domains)
