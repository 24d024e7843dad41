import random
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from globalcsp.apps import Graph, encode_3col, encode_cgp
from globalcsp.constraints import egc, table
from globalcsp.core import CspInstance, Hypergraph, hypergraph_of
from globalcsp.errors import (
    ApplicabilityError,
    BudgetError,
    InfeasibleError,
    ValidationError,
)
from globalcsp.structure import (
    TreeDecomposition,
    ceil_power,
    edge_cover_number,
    fractional_edge_cover_number,
    ghw_and_fhw_exact_small,
    solution_bound,
    submodular_width,
    treewidth_exact,
    validate_tree_decomposition,
)

from helpers import (
    oracle_edge_cover,
    oracle_rho_star,
    oracle_solutions,
    oracle_treewidth,
    oracle_width,
    random_classic_instance,
    random_hypergraph,
)

seeds = st.integers(0, 10**9)


def H(*edges):
    edges = [frozenset(e) for e in edges]
    return Hypergraph(frozenset().union(*edges), frozenset(edges))


TRIANGLE = H("ab", "bc", "ca")


def widths(G):
    return (
        ghw_and_fhw_exact_small(G, "rho_star"),
        ghw_and_fhw_exact_small(G, "rho"),
        treewidth_exact(G),
    )


def test_rho_star_of_triangle():
    value, cover = fractional_edge_cover_number(TRIANGLE)
    assert value == Fraction(3, 2)
    assert set(cover.weights.values()) == {Fraction(1, 2)}
    assert cover.verify(TRIANGLE.edges)


@pytest.mark.parametrize(
    "G, expected",
    [
        (H("abc"), 1),
        (H("ab", "ac", "ad"), 3),
        (H("ab", "bc", "cd", "de", "ea"), Fraction(5, 2)),
        (H("abc", "cde", "ace"), 2),
    ],
)
def test_rho_star_known_values(G, expected):
    value, cover = fractional_edge_cover_number(G)
    assert value == expected
    assert cover.verify(G.edges)


def test_rho_star_on_subset_and_errors():
    assert fractional_edge_cover_number(TRIANGLE, "ab")[0] == 1
    with pytest.raises(ValidationError):
        fractional_edge_cover_number(TRIANGLE, [])
    G = Hypergraph(frozenset("abz"), frozenset([frozenset("ab")]))
    with pytest.raises(InfeasibleError):
        fractional_edge_cover_number(G)


def test_edge_cover_number():
    assert edge_cover_number(TRIANGLE)[0] == 2
    k, chosen = edge_cover_number(H("ab", "bc", "cd"))
    assert k == 2
    assert set("abcd") <= set().union(*chosen)


def test_triangle_widths():
    fhw, ghw, tw = widths(TRIANGLE)
    assert (fhw.value, ghw.value, tw.value) == (Fraction(3, 2), 2, 2)
    for report in (fhw, ghw, tw):
        assert report.verify(TRIANGLE)


def test_cycle_widths():
    G = H(*[(f"v{i}", f"v{(i + 1) % 8}") for i in range(8)])
    fhw, ghw, tw = widths(G)
    assert (fhw.value, ghw.value, tw.value) == (2, 2, 2)


def test_cgp_hypergraph_widths():
    G = hypergraph_of(encode_cgp(Graph.cycle(5), 3, 2))
    fhw, ghw, tw = widths(G)
    assert ghw.value == 2
    assert fhw.value == 2
    # also confirmed offline by the permutation oracle
    assert tw.value == 6
    for report in (fhw, ghw, tw):
        assert report.verify(G)


def test_three_colouring_widths_are_one():
    for graph in (Graph.complete(3), Graph.cycle(5), Graph.complete(4)):
        G = hypergraph_of(encode_3col(graph))
        fhw, ghw, tw = widths(G)
        assert fhw.value == ghw.value == 1
        assert tw.value == len(graph.vertices) - 1
        assert all(r.verify(G) for r in (fhw, ghw, tw))


def test_subw_is_unsupported():
    report = submodular_width(TRIANGLE)
    assert not report.supported
    assert report.verify(TRIANGLE)


def test_limits():
    big = H(*[(f"v{i}", f"v{i + 1}") for i in range(12)])
    with pytest.raises(BudgetError):
        ghw_and_fhw_exact_small(big)
    with pytest.raises(ValueError):
        ghw_and_fhw_exact_small(TRIANGLE, "bogus")


def test_validate_tree_decomposition():
    td = TreeDecomposition({0: "ab", 1: "bc", 2: "ca"}, [(0, 1), (1, 2)])
    # a lies in nodes 0 and 2 but not in node 1 between them
    assert not validate_tree_decomposition(TRIANGLE, td)
    good = TreeDecomposition({0: "abc"})
    assert validate_tree_decomposition(TRIANGLE, good)
    missing = TreeDecomposition({0: "ab", 1: "b"}, [(0, 1)])
    assert not validate_tree_decomposition(TRIANGLE, missing)
    with pytest.raises(ValidationError):
        validate_tree_decomposition(TRIANGLE, TreeDecomposition({0: "abc", 1: "a", 2: "b"},
                                                                [(0, 1), (1, 2), (2, 0)]))
    with pytest.raises(ValidationError):
        validate_tree_decomposition(TRIANGLE, TreeDecomposition({0: "abc", 1: ""}, [(0, 1)]))


def test_ceil_power():
    assert ceil_power(4, Fraction(3, 2)) == 8
    assert ceil_power(5, Fraction(3, 2)) == 12  # 5^1.5 = 11.18...
    assert ceil_power(7, Fraction(0)) == 1
    assert ceil_power(2, Fraction(10)) == 1024


def test_solution_bound_needs_classic():
    d = {"a": {0, 1}, "b": {0, 1}}
    P = CspInstance(d, [egc(["a", "b"], {0: [1, 1], 1: [1, 1]}, d)])
    with pytest.raises(ApplicabilityError):
        solution_bound(P)
    Q = CspInstance(d, [table(["a", "b"], [(0, 1)], d)])
    # |P| = 2 + 4 + (1*2 + 2) and rho* = 1
    assert solution_bound(Q) == 10


@settings(max_examples=40)
@given(seeds)
def test_treewidth_matches_oracle(seed):
    rng = random.Random(seed)
    G = random_hypergraph(rng, max_vertices=7)
    report = treewidth_exact(G)
    assert report.value == oracle_treewidth(G.vertices, G.edges)
    assert report.verify(G)


@settings(max_examples=40)
@given(seeds)
def test_ghw_matches_oracle(seed):
    rng = random.Random(seed)
    G = random_hypergraph(rng, max_vertices=6)
    report = ghw_and_fhw_exact_small(G, "rho")
    assert report.value == oracle_width(G.vertices, G.edges,
                                        lambda bag: oracle_edge_cover(G.edges, bag))
    assert report.verify(G)


@settings(max_examples=40)
@given(seeds)
def test_rho_star_matches_float_lp(seed):
    rng = random.Random(seed)
    G = random_hypergraph(rng, max_vertices=7, max_edges=6)
    value, cover = fractional_edge_cover_number(G)
    assert abs(float(value) - oracle_rho_star(G.edges, G.vertices)) < 1e-9
    assert cover.verify(G.edges)


@settings(max_examples=40)
@given(seeds)
def test_width_ordering(seed):
    rng = random.Random(seed)
    G = random_hypergraph(rng, max_vertices=7)
    fhw, ghw, tw = widths(G)
    assert fhw.value <= ghw.value
    assert all(r.verify(G) for r in (fhw, ghw, tw))
    # a bag of tw + 1 vertices is covered by at most tw + 1 edges
    assert ghw.value <= tw.value + 1


@settings(max_examples=60)
@given(seeds)
def test_solution_count_bound(seed):
    rng = random.Random(seed)
    P = random_classic_instance(rng)
    assert len(oracle_solutions(P)) <= solution_bound(P)


def test_treewidth_never_exceeds_min_fill_heuristic():
    from networkx.algorithms.approximation import treewidth_min_fill_in

    for i in range(1, 200):
        g = nx.graph_atlas(i)
        if g.number_of_edges() == 0:
            continue
        G = H(*[(f"v{u}", f"v{w}") for u, w in g.edges()])
        assert treewidth_exact(G).value <= treewidth_min_fill_in(g)[0]
