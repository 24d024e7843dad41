"""Reductions from global-constraint instances to classic (table) instances.

* induced tables and :func:`reduce_to_classic` for instances whose
  intersections are sparse,
* back-door augmentation for constraints that lack partial assignment
  checking,
* subproblem decompositions, whose parts act as mega-constraints.
"""
from __future__ import annotations

import logging
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field

from .constraints import GlobalConstraint, Pac, TableConstraint, project_instance
from .core import (
    STAR,
    Assignment,
    CspInstance,
    Hypergraph,
    all_assignments,
    disjoint_union,
    instance_size,
    intersection_variables,
    restrict,
    sorted_values,
)
from .enumeration import enum_solutions, find_solution, require_pac
from .errors import (
    CapabilityError,
    ConsistencyError,
    ScopeError,
    SparsityViolation,
    ValidationError,
)

log = logging.getLogger(__name__)

__all__ = [
    "AugmentedConstraint",
    "BackDoorSpec",
    "Reduction",
    "SubproblemConstraint",
    "SubproblemDecomposition",
    "augment_with_backdoor",
    "extend_into",
    "full_scope_backdoor",
    "induced_table_constraint",
    "intersection_variables",
    "reduce_backdoors",
    "reduce_decomposition_to_classic",
    "reduce_to_classic",
    "subproblem_union",
]


def extend_into(c: GlobalConstraint, seed: Mapping) -> Assignment | None:
    """A satisfying assignment of ``c`` extending ``seed``, found greedily with PAC."""
    witness = getattr(c, "witness", None)
    if witness is not None:
        return witness(seed)
    theta = dict(seed)
    if not c.pac_extends(theta):
        return None
    for v in c.scope:
        if v in theta:
            continue
        for a in sorted_values(c.domain(v)):
            theta[v] = a
            if c.pac_extends(theta):
                break
        else:
            return None
    return Assignment(theta)


def induced_table_constraint(
    P: CspInstance, c: GlobalConstraint, cap: int | None = None
) -> TableConstraint:
    """ic(c): sol(pj_iv(P)) padded with STAR on the private variables.

    A constraint without intersection variables gets the single all-STAR row
    when it is satisfiable and no rows otherwise.
    """
    iv = intersection_variables(P, c)
    private = [v for v in c.scope if v not in iv]
    star = Assignment({v: STAR for v in private})
    domains = {v: (P.domain(v) if v in iv else {STAR}) for v in c.scope}
    if not iv:
        rows = [star] if c.pac_extends({}) else []
        return TableConstraint(c.scope, rows, domains)
    report = enum_solutions(project_instance(P, iv), cap=cap)
    if report.cap_hit:
        raise SparsityViolation(
            f"projection onto iv of {c!r} reached the cap {cap}", constraint=c, cap=cap
        )
    rows = [disjoint_union(theta, star) for theta in report.solutions]
    return TableConstraint(c.scope, rows, domains)


@dataclass
class Reduction:
    """A classic instance together with the way back to the original."""

    source: CspInstance
    instance: CspInstance
    tables: dict = field(default_factory=dict)

    def lift(self, theta: Mapping) -> Assignment:
        """Turn a solution of the classic instance into one of the source.

        Each constraint is extended independently from the shared variables;
        private variables occur in one constraint only, so the pieces combine.
        """
        merged = {}
        for c in self.source.constraints:
            iv = intersection_variables(self.source, c)
            seed = {v: theta[v] for v in iv}
            piece = extend_into(c, seed)
            if piece is None:
                raise ValidationError(f"{c!r} does not extend {seed}")
            for v, a in piece.items():
                if merged.setdefault(v, a) != a:
                    raise ValidationError(f"pieces disagree on {v!r}")
        return Assignment(merged)


def reduce_to_classic(P: CspInstance, c: int) -> Reduction:
    """Replace every constraint by its induced table, capping at |P|^c."""
    require_pac(P)
    cap = instance_size(P) ** c
    tables = {con: induced_table_constraint(P, con, cap) for con in P.constraints}
    shared = set()
    for con in P.constraints:
        shared |= intersection_variables(P, con)
    domains = {v: (P.domain(v) if v in shared else {STAR}) for v in P.variables}
    return Reduction(P, CspInstance(domains, tables.values()), tables)


# back doors -------------------------------------------------------------


@dataclass(frozen=True)
class BackDoorSpec:
    """A set W of scope variables plus a procedure deciding, for assignments
    binding at least W, whether they extend into the constraint."""

    constraint: GlobalConstraint
    variables: frozenset
    decider: Callable[[Mapping], bool]

    def __post_init__(self):
        object.__setattr__(self, "variables", frozenset(self.variables))
        if not self.variables <= self.constraint.scope_set:
            raise ScopeError("back door set must lie inside the constraint scope")


def full_scope_backdoor(c: GlobalConstraint) -> BackDoorSpec:
    """The whole scope is always a back door: decide by evaluation."""
    return BackDoorSpec(c, c.scope_set, lambda theta: c.evaluate(restrict(theta, c.scope)))


class AugmentedConstraint(GlobalConstraint):
    """A constraint restricted to assignments whose back-door part is allowed."""

    kind = "augmented"
    pac = Pac.NATIVE

    def __init__(self, base: GlobalConstraint, backdoor: BackDoorSpec, allowed: Iterable):
        super().__init__(base.scope, base.domains)
        allowed = frozenset(Assignment(t) for t in allowed)
        for t in allowed:
            if t.variables != backdoor.variables:
                raise ScopeError(f"allowed assignment {t!r} is not over the back door set")
        self.base = base
        self.backdoor = backdoor
        self.allowed = allowed

    def _key(self):
        return (self.base, self.backdoor.variables, self.allowed)

    @property
    def description_size(self):
        w = len(self.backdoor.variables)
        return self.base.description_size + len(self.allowed) * w + w

    def _accepts(self, theta):
        return restrict(theta, self.backdoor.variables) in self.allowed and self.base.evaluate(theta)

    def _extends(self, theta):
        for t in self.allowed:
            if t.agrees_with(theta):
                cand = dict(theta)
                cand.update(t)
                if self.backdoor.decider(cand):
                    return True
        return False


def augment_with_backdoor(
    c: GlobalConstraint, bd: BackDoorSpec, allowed: Iterable
) -> AugmentedConstraint:
    return AugmentedConstraint(c, bd, allowed)


def reduce_backdoors(
    P: CspInstance,
    pac_membership: Callable[[GlobalConstraint], bool],
    finder: Callable[[GlobalConstraint], BackDoorSpec | None],
    c: int,
) -> CspInstance:
    """Augment every non-PAC constraint with sol(pj_W(P ∩ Γ_PAC)).

    Back-door variables not covered by any PAC constraint are left free.
    The cover must satisfy ``|Θ| <= |P|^c``.
    """
    pac_cons = [con for con in P.constraints if pac_membership(con)]
    others = [con for con in P.constraints if not pac_membership(con)]
    if not others:
        return P
    for con in pac_cons:
        if not con.has_pac:
            raise CapabilityError(f"{con!r} is flagged as PAC but does not advertise it")
    bound = instance_size(P) ** c
    covered_vars = set()
    for con in pac_cons:
        covered_vars |= con.scope_set
    pac_part = (
        CspInstance({v: P.domain(v) for v in covered_vars}, pac_cons) if pac_cons else None
    )
    replaced = {}
    for con in others:
        bd = finder(con)
        if bd is None:
            raise CapabilityError(f"no back door found for {con!r}")
        covered = bd.variables & covered_vars
        if covered:
            report = enum_solutions(project_instance(pac_part, covered), cap=bound + 1)
            if report.cap_hit:
                raise SparsityViolation(
                    f"back door of {con!r} has more than {bound} covered assignments",
                    constraint=con,
                    cap=bound,
                )
            base = report.solutions
        else:
            base = frozenset([Assignment()])
        free = sorted(bd.variables - covered)
        allowed = {
            disjoint_union(theta, tau)
            for theta in base
            for tau in all_assignments(free, P.domains)
        }
        if len(allowed) > bound:
            raise SparsityViolation(
                f"back door of {con!r} allows more than {bound} assignments",
                constraint=con,
                cap=bound,
            )
        replaced[con] = augment_with_backdoor(con, bd, allowed)
    return CspInstance(P.domains, [replaced.get(con, con) for con in P.constraints])


# subproblem decompositions ---------------------------------------------


def subproblem_union(Q1: CspInstance, Q2: CspInstance) -> CspInstance:
    domains = dict(Q1.domains)
    for v, d in Q2.domains.items():
        if v in domains and domains[v] != d:
            raise ConsistencyError(f"union operands disagree on the domain of {v!r}")
        domains[v] = d
    return type(Q1)(domains, Q1.constraints + Q2.constraints)


class SubproblemConstraint(GlobalConstraint):
    """A whole CSP instance viewed as one constraint over its variables.

    Partial assignments are checked by seeding a backtracking search with
    them (a seeded variable behaves like a unary constraint); the part
    advertises this only when all its constraints do.
    """

    kind = "subproblem"

    def __init__(self, part: CspInstance):
        super().__init__(sorted(part.variables), part.domains)
        self.part = part
        self.pac = Pac.NATIVE if all(c.has_pac for c in part.constraints) else Pac.NONE
        self._memo = {}

    def _key(self):
        return self.part

    @property
    def description_size(self):
        return instance_size(self.part)

    def _accepts(self, theta):
        return self.part.is_solution(theta)

    def _extends(self, theta):
        key = Assignment(theta)
        hit = self._memo.get(key)
        if hit is None:
            hit = find_solution(self.part, theta) is not None
            self._memo[key] = hit
        return hit

    def witness(self, seed: Mapping) -> Assignment | None:
        return find_solution(self.part, seed)

    def __repr__(self):
        return f"subproblem({len(self.part.constraints)} constraints over {len(self.scope)} vars)"


class SubproblemDecomposition:
    """A set of instances whose union is the decomposed instance.

    Proper decompositions (no part's constraints contained in another's) are
    required unless ``require_proper=False``.
    """

    def __init__(self, parts: Iterable[CspInstance], require_proper: bool = True):
        self.parts = tuple(dict.fromkeys(parts))
        if not self.parts:
            raise ValidationError("a decomposition needs at least one part")
        if require_proper and not self.is_proper():
            raise ValidationError("decomposition is not proper: some part contains another")
        merged = self.parts[0]
        for part in self.parts[1:]:
            merged = subproblem_union(merged, part)
        self._union = merged

    def is_proper(self) -> bool:
        sets = [frozenset(p.constraints) for p in self.parts]
        return not any(
            i != j and a <= b for i, a in enumerate(sets) for j, b in enumerate(sets)
        )

    def union(self) -> CspInstance:
        return self._union

    @property
    def variables(self) -> frozenset:
        return self._union.variables

    def as_instance(self) -> CspInstance:
        return CspInstance(
            self._union.domains, [SubproblemConstraint(p) for p in self.parts]
        )

    def hypergraph(self) -> Hypergraph:
        return Hypergraph(self.variables, frozenset(p.variables for p in self.parts))

    @classmethod
    def trivial(cls, P: CspInstance) -> SubproblemDecomposition:
        """One part per constraint."""
        return cls(
            CspInstance({v: P.domain(v) for v in c.scope}, [c]) for c in P.constraints
        )


def reduce_decomposition_to_classic(S: SubproblemDecomposition, c: int) -> Reduction:
    """Classic instance with one induced table per part; lifts to sol(⊔S)."""
    return reduce_to_classic(S.as_instance(), c)
