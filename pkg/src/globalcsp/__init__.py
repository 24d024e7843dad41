"""Constraint satisfaction with global constraints: projections, solution
enumeration, reductions to classic table instances, exact hypergraph widths,
weighted CSP and two worked encodings."""

__version__ = "0.1.0"

from .constraints import (
    CardinalitySet,
    EgcConstraint,
    GlobalConstraint,
    NegativeConstraint,
    Pac,
    TableConstraint,
    egc,
    evaluate,
    join,
    negative,
    pac_extends,
    project_constraint,
    project_instance,
    table,
)
from .core import (
    BOTTOM,
    STAR,
    Assignment,
    CspInstance,
    Hypergraph,
    disjoint_union,
    hypergraph_of,
    instance_size,
    intersection_variables,
    project_assignments,
    restrict,
)
from .enumeration import (
    EnumerationReport,
    SparsityCertificate,
    brute_force_solutions,
    count_solutions_capped,
    enum_solutions,
    find_solution,
    has_sparse_intersections,
    search_solutions,
)
from .errors import (
    ApplicabilityError,
    BudgetError,
    CapabilityError,
    ConsistencyError,
    CspError,
    DisjointnessError,
    InfeasibleError,
    MembershipError,
    ParseError,
    ScopeError,
    SparsityViolation,
    ValidationError,
)
from .reduction import (
    AugmentedConstraint,
    BackDoorSpec,
    Reduction,
    SubproblemConstraint,
    SubproblemDecomposition,
    augment_with_backdoor,
    full_scope_backdoor,
    induced_table_constraint,
    reduce_backdoors,
    reduce_decomposition_to_classic,
    reduce_to_classic,
    subproblem_union,
)
from .solve import (
    PipelineResult,
    solve_classic,
    solve_pipeline,
    solve_via_tree_decomposition,
)
from .structure import (
    FractionalCover,
    TreeDecomposition,
    WidthReport,
    edge_cover_number,
    fractional_edge_cover_number,
    ghw_and_fhw_exact_small,
    solution_bound,
    treewidth_exact,
    validate_tree_decomposition,
)
from .weighted import (
    BlackBoxWeighted,
    WcspInstance,
    WeightedConstraint,
    WeightedProjection,
    WeightedSubproblem,
    WeightedTable,
    min_cost_extension,
    reduce_weighted,
    wcost,
    wcsp_decision,
    wcsp_optimal,
    weighted_induced_constraint,
    weighted_pac,
    weighted_project,
    weighted_project_instance,
)
