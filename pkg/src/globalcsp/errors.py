"""Exception hierarchy shared by every module."""


class CspError(Exception):
    """Base class for all engine errors."""


class ScopeError(CspError):
    """An assignment or variable set does not fit the expected scope."""


class DisjointnessError(CspError):
    """Two assignments that must be disjoint share a variable."""


class CapabilityError(CspError):
    """A constraint lacks a capability (partial assignment checking, min cost)."""


class BudgetError(CspError):
    """A desk-scale computation would exceed its configured limit."""


class ValidationError(CspError):
    """A structural invariant (instance, decomposition, tree) is violated."""


class ConsistencyError(ValidationError):
    """Two objects disagree on the domain of a shared variable."""


class MembershipError(CspError):
    """A constraint is not part of the instance it was looked up in."""


class ApplicabilityError(CspError):
    """An operation was applied to an object outside its input class."""


class SparsityViolation(CspError):
    """A capped enumeration hit its cap during a reduction.

    ``constraint`` is the constraint whose induced table (or back door set)
    could not be materialized.
    """

    def __init__(self, message, constraint=None, cap=None):
        super().__init__(message)
        self.constraint = constraint
        self.cap = cap


class ParseError(CspError):
    """Malformed instance or hypergraph document."""


class InfeasibleError(CspError):
    """A covering problem has no feasible solution (uncovered vertex)."""
