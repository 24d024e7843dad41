"""Variables, values, assignments, CSP instances and their hypergraphs.

Variables are plain strings. Values are ints or strings; the string ``"*"``
(``STAR``) is reserved for padding private variables in induced tables and
may only appear as the sole member of a domain.
"""
from __future__ import annotations

import itertools
import os
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from types import MappingProxyType

from .errors import (
    ConsistencyError,
    DisjointnessError,
    MembershipError,
    ScopeError,
    ValidationError,
)

STAR = "*"
DEFAULT_BUDGET = 10**7
BUDGET_ENV = "GLOBALCSP_BUDGET"


def default_budget() -> int:
    """Enumeration budget, overridable through ``GLOBALCSP_BUDGET``."""
    raw = os.environ.get(BUDGET_ENV)
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return DEFAULT_BUDGET


def value_key(value):
    # ints sort before strings, STAR after everything
    if value == STAR:
        return (2, "")
    if isinstance(value, int):
        return (0, value)
    return (1, str(value))


def sorted_values(values: Iterable) -> list:
    return sorted(values, key=value_key)


class Assignment(Mapping):
    """An immutable, hashable map from variables to values.

    >>> a = Assignment({"y": 0, "x": 1})
    >>> a
    {x→1, y→0}
    >>> a.restrict({"x"})
    {x→1}
    """

    __slots__ = ("_map", "_hash")

    def __init__(self, bindings=()):
        self._map = dict(bindings)
        self._hash = None

    def __getitem__(self, var):
        return self._map[var]

    def __iter__(self):
        return iter(self._map)

    def __len__(self):
        return len(self._map)

    def __contains__(self, var):
        return var in self._map

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._map.items()))
        return self._hash

    def __eq__(self, other):
        if isinstance(other, Assignment):
            return self._map == other._map
        if isinstance(other, Mapping):
            return self._map == dict(other)
        return NotImplemented

    def __repr__(self):
        if not self._map:
            return "⊥"
        body = ", ".join(f"{v}→{self._map[v]}" for v in sorted(self._map))
        return "{" + body + "}"

    def sort_key(self):
        return tuple((v, value_key(self._map[v])) for v in sorted(self._map))

    @property
    def variables(self) -> frozenset:
        return frozenset(self._map)

    def restrict(self, variables: Iterable[str]) -> Assignment:
        return restrict(self, variables)

    def extend(self, var: str, value) -> Assignment:
        if var in self._map:
            raise DisjointnessError(f"variable {var!r} already bound")
        new = dict(self._map)
        new[var] = value
        return Assignment(new)

    def agrees_with(self, other: Mapping) -> bool:
        """True if the two assignments coincide on their shared variables."""
        small, large = (self, other) if len(self) <= len(other) else (other, self)
        return all(large.get(v, small[v]) == small[v] for v in small)

    def as_dict(self) -> dict:
        return dict(self._map)


BOTTOM = Assignment()


def restrict(theta: Mapping, variables: Iterable[str]) -> Assignment:
    """Restriction of ``theta`` to ``variables``; the empty set gives ⊥."""
    variables = set(variables)
    missing = variables.difference(theta)
    if missing:
        raise ScopeError(f"cannot restrict to unbound variables {sorted(missing)}")
    return Assignment({v: theta[v] for v in variables})


def disjoint_union(theta1: Mapping, theta2: Mapping) -> Assignment:
    overlap = set(theta1).intersection(theta2)
    if overlap:
        raise DisjointnessError(f"assignments overlap on {sorted(overlap)}")
    merged = dict(theta1)
    merged.update(theta2)
    return Assignment(merged)


def project_assignments(assignments: Iterable[Assignment], variables: Iterable[str]) -> frozenset:
    """Set projection; π_X(∅) = ∅ and π_∅(Θ) = {⊥} for nonempty Θ."""
    assignments = list(assignments)
    variables = frozenset(variables)
    if not assignments:
        return frozenset()
    common = assignments[0].variables
    for theta in assignments:
        if theta.variables != common:
            raise ScopeError("assignment set is not over a common variable set")
    if not variables <= common:
        raise ScopeError(f"{sorted(variables - common)} not in the assignment variables")
    return frozenset(restrict(theta, variables) for theta in assignments)


def all_assignments(variables: Iterable[str], domains: Mapping) -> Iterator[Assignment]:
    """Every assignment of ``variables`` in deterministic order."""
    variables = sorted(variables)
    pools = [sorted_values(domains[v]) for v in variables]
    for combo in itertools.product(*pools):
        yield Assignment(zip(variables, combo))


def product_size(variables: Iterable[str], domains: Mapping) -> int:
    total = 1
    for v in variables:
        total *= len(domains[v])
    return total


def check_domain(var: str, domain: frozenset) -> None:
    if not domain:
        raise ValidationError(f"variable {var!r} has an empty domain")
    if STAR in domain and len(domain) > 1:
        raise ValidationError(f"variable {var!r}: {STAR!r} is reserved and cannot share a domain")


class CspInstance:
    """A set of variables with finite domains plus a set of global constraints.

    Constraints carry the domains of their own scope; the instance checks
    that these agree with its own domains and that every variable lies in
    the scope of some constraint.
    """

    def __init__(self, domains: Mapping, constraints: Iterable):
        doms = {}
        for var in sorted(domains):
            dom = frozenset(domains[var])
            check_domain(var, dom)
            doms[var] = dom
        self._domains = MappingProxyType(doms)
        self.constraints = tuple(dict.fromkeys(constraints))
        self.variables = frozenset(doms)
        by_var = {v: [] for v in doms}
        for c in self.constraints:
            for v in c.scope:
                if v not in doms:
                    raise ValidationError(
                        f"{c.kind} constraint mentions undeclared variable {v!r}"
                    )
                if c.domain(v) != doms[v]:
                    raise ConsistencyError(
                        f"{c.kind} constraint disagrees on the domain of {v!r}"
                    )
                by_var[v].append(c)
        unscoped = sorted(v for v, cs in by_var.items() if not cs)
        if unscoped:
            raise ValidationError(f"variables in no constraint scope: {unscoped}")
        self._by_var = {v: tuple(cs) for v, cs in by_var.items()}
        self._hash = None

    @property
    def domains(self) -> Mapping:
        return self._domains

    def domain(self, var: str) -> frozenset:
        return self._domains[var]

    def constraints_on(self, var: str) -> tuple:
        return self._by_var[var]

    def __eq__(self, other):
        if not isinstance(other, CspInstance):
            return NotImplemented
        return (
            type(self) is type(other)
            and self._domains == other._domains
            and frozenset(self.constraints) == frozenset(other.constraints)
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((frozenset(self._domains.items()), frozenset(self.constraints)))
        return self._hash

    def __repr__(self):
        kinds = ", ".join(c.kind for c in self.constraints)
        return f"{type(self).__name__}({len(self.variables)} vars; {kinds})"

    def is_solution(self, theta: Mapping) -> bool:
        if set(theta) != self.variables:
            return False
        return all(c.evaluate(restrict(theta, c.scope)) for c in self.constraints)

    def size(self) -> int:
        return instance_size(self)

    def hypergraph(self) -> Hypergraph:
        return hypergraph_of(self)


@dataclass(frozen=True)
class Hypergraph:
    vertices: frozenset
    edges: frozenset

    def __post_init__(self):
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        object.__setattr__(self, "edges", frozenset(frozenset(e) for e in self.edges))
        for edge in self.edges:
            if not edge <= self.vertices:
                raise ValidationError(f"hyperedge {sorted(edge)} has unknown vertices")

    def sorted_edges(self) -> list:
        return sorted((sorted(e) for e in self.edges), key=lambda e: (len(e), e))

    def to_dict(self) -> dict:
        return {"vertices": sorted(self.vertices), "edges": self.sorted_edges()}


def instance_size(P: CspInstance) -> int:
    """|V| + Σ|D(v)| + Σ|δ| with count-based description sizes."""
    return (
        len(P.variables)
        + sum(len(d) for d in P.domains.values())
        + sum(c.description_size for c in P.constraints)
    )


def hypergraph_of(P: CspInstance) -> Hypergraph:
    return Hypergraph(P.variables, frozenset(frozenset(c.scope) for c in P.constraints))


def intersection_variables(P: CspInstance, c) -> frozenset:
    """iv(δ): scope variables of ``c`` shared with some other constraint."""
    if c not in P.constraints:
        raise MembershipError(f"{c!r} is not a constraint of the instance")
    return frozenset(
        v for v in c.scope if any(other != c for other in P.constraints_on(v))
    )
