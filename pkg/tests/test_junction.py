"""
Tests for chordality, junction trees and factorized bounds
"""

from fractions import Fraction

import networkx as nx
import pytest

from itembound.bounds import frequency_interval
from itembound.core import EMPTY, Itemset, downward_close
from itembound.errors import NotChordalError, PreconditionError
from itembound.graph import build_graph, is_safe, minimal_safe_set
from itembound.junction import (JunctionTree, build_junction_tree, factorized_interval,
                                inner_separators, is_clique_safe, is_triangulated,
                                iter_junction_trees, maximal_cliques, safe_set_from_tree,
                                triangulate)
from itembound.query import Const, parse


@pytest.fixture
def wedge_cliques(wedge_family):
    return maximal_cliques(build_graph(wedge_family))


def tree_with_edges(trees, edges):
    return next(t for t in trees if t.edges == edges)


class TestChordality:
    """Test chordality checks, cliques and triangulation."""

    def test_square_is_not_chordal(self, square_family):
        """Test that a chordless 4-cycle is detected."""
        chordal, order = is_triangulated(build_graph(square_family))
        assert not chordal
        assert order is None

    def test_wedge_is_chordal(self, wedge_family):
        """Test that the elimination order covers every item."""
        chordal, order = is_triangulated(build_graph(wedge_family))
        assert chordal
        assert sorted(order) == [0, 1, 2, 3, 4]

    def test_agrees_with_networkx(self, random_family):
        """Test the chordality check against networkx on random families."""
        for seed in range(40):
            G = build_graph(random_family(seed, K=7))
            assert is_triangulated(G)[0] == nx.is_chordal(G)

    def test_maximal_cliques(self, wedge_cliques, five):
        """Test the three cliques of the wedge."""
        assert wedge_cliques == [five.itemset("ab"), five.itemset("bcd"),
                                 five.itemset("bce")]

    def test_cliques_of_non_chordal_graph(self, square_family):
        """Test that cliques are only read off chordal graphs."""
        with pytest.raises(NotChordalError):
            maximal_cliques(build_graph(square_family))

    def test_min_fill_on_square(self, square_family):
        """Test that one fill edge closes the square."""
        H, fill, order = triangulate(build_graph(square_family))
        assert fill == [(1, 3)]
        assert order[:3] == [4, 5, 0]
        assert is_triangulated(H)[0]

    def test_triangulate_random(self, random_family):
        """Test that triangulation always yields a chordal supergraph."""
        for seed in range(30):
            G = build_graph(random_family(seed, K=8))
            H, fill, _ = triangulate(G)
            assert nx.is_chordal(H)
            assert set(G.edges) <= set(H.edges) | {(v, u) for u, v in H.edges}
            assert H.number_of_edges() == G.number_of_edges() + len(fill)


class TestJunctionTrees:
    """Test junction tree construction and enumeration."""

    def test_build(self, wedge_cliques):
        """Test the spanning tree of the wedge cliques."""
        tree = build_junction_tree(wedge_cliques)
        assert len(tree.edges) == 2
        assert (1, 2) in tree.edges
        assert tree.has_running_intersection()
        assert not tree.is_forest
        assert tree.variables == 20

    def test_enumerate(self, wedge_cliques, five):
        """Test that {a,b} may hang off either triangle."""
        trees = list(iter_junction_trees(wedge_cliques))
        assert sorted(t.edges for t in trees) == [((0, 1), (1, 2)), ((0, 2), (1, 2))]
        for tree in trees:
            assert tree.separators[(1, 2)] == five.itemset("bc")

    def test_single_clique(self, five):
        """Test the one-clique tree."""
        trees = list(iter_junction_trees([five.itemset("abc")]))
        assert len(trees) == 1
        assert trees[0].edges == ()

    def test_disconnected_cliques(self, five):
        """Test that enumeration needs a connected graph."""
        with pytest.raises(PreconditionError):
            list(iter_junction_trees([five.itemset("ab"), five.itemset("cd")]))

    def test_forest(self, five):
        """Test that disjoint cliques make a junction forest."""
        tree = build_junction_tree([five.itemset("ab"), five.itemset("cd")])
        assert tree.is_forest
        assert tree.edges == ()

    def test_running_intersection_violation(self, five):
        """Test a tree whose item holders are disconnected."""
        cliques = (five.itemset("ab"), five.itemset("bc"), five.itemset("ac"))
        tree = JunctionTree(cliques, ((0, 1), (1, 2)))
        assert not tree.has_running_intersection()


class TestCliqueSafety:
    """Test clique-safe families."""

    def test_wedge_is_clique_safe(self, wedge_family):
        """Test that triangles only need their pairs."""
        assert is_clique_safe(wedge_family)

    def test_missing_triple(self, abcd):
        """Test that a 4-clique needs its triples."""
        pairs = [Itemset.of([i, j]) for i in range(4) for j in range(i + 1, 4)]
        assert not is_clique_safe(downward_close(pairs, abcd))


class TestSafeSetsFromTrees:
    """Test safe sets read off junction trees."""

    def test_inner_separators(self, wedge_cliques, five):
        """Test the separators between the cliques holding a and d."""
        trees = list(iter_junction_trees(wedge_cliques))
        first = tree_with_edges(trees, ((0, 1), (1, 2)))
        inner = inner_separators(first, five.itemset("ad"))
        assert inner.edges == ((0, 1),)
        assert inner.items == five.itemset("b")
        assert inner.chosen == {0: 0, 3: 1}

    def test_one_tree_gives_the_minimal_set(self, wedge_family, wedge_cliques, five):
        """Test that the best tree matches the minimal safe set of {a,d}."""
        trees = list(iter_junction_trees(wedge_cliques))
        base = five.itemset("ad")
        first = tree_with_edges(trees, ((0, 1), (1, 2)))
        second = tree_with_edges(trees, ((0, 2), (1, 2)))
        assert safe_set_from_tree(first, base, wedge_family) == five.itemset("abd")
        assert safe_set_from_tree(second, base, wedge_family) == five.itemset("abcd")

    def test_minimal_set_inside_every_tree_set(self, wedge_family, wedge_cliques, five):
        """Test containment and the minimum over trees for several bases."""
        trees = list(iter_junction_trees(wedge_cliques))
        for names in ("ad", "ae", "de", "ac", "bd"):
            base = five.itemset(names)
            minimal = minimal_safe_set(base, wedge_family)
            from_trees = [safe_set_from_tree(t, base, wedge_family) for t in trees]
            assert all(minimal.issubset(C) for C in from_trees)
            assert min(len(C) for C in from_trees) == len(minimal)
            for tree in trees:
                extra = minimal - base
                assert extra.issubset(inner_separators(tree, base).items)

    def test_requires_chordal_family(self, square_family, wedge_cliques, six):
        """Test that non-triangulated families are rejected."""
        tree = build_junction_tree(wedge_cliques)
        with pytest.raises(PreconditionError):
            safe_set_from_tree(tree, six.itemset("ab"), square_family)

    def test_requires_clique_safe_family(self, abcd):
        """Test that families missing clique subsets are rejected."""
        pairs = [Itemset.of([i, j]) for i in range(4) for j in range(i + 1, 4)]
        family = downward_close(pairs, abcd)
        tree = JunctionTree((abcd.full(),), ())
        with pytest.raises(PreconditionError):
            safe_set_from_tree(tree, abcd.itemset("ab"), family)


class TestFactorizedInterval:
    """Test the factorized interval program."""

    def test_diamond(self, diamond_theta, abcd):
        """Test that two triangles reproduce the safe interval."""
        result = factorized_interval(parse("b & c"), diamond_theta)
        assert result.projection == abcd.full()
        assert result.cliques == [abcd.itemset("abc"), abcd.itemset("bcd")]
        assert (result.interval.lo, result.interval.hi) == (Fraction(2, 5), Fraction(2, 5))
        assert result.variables == 16

    def test_path(self, path_theta, path_universe):
        """Test that the closed path splits into eight triangles."""
        f = parse("a1 & a10")
        result = factorized_interval(f, path_theta)
        assert result.projection == path_universe.full()
        assert len(result.cliques) == 8
        assert all(len(Q) == 3 for Q in result.cliques)
        assert result.variables == 64
        assert result.naive_variables == 1024
        assert len(result.fill_edges) == 7
        chain_value = Fraction(1, 4) + Fraction(1, 2 ** 11)
        assert chain_value in result.interval

    @pytest.mark.slow
    def test_path_matches_full_program(self, path_theta, path_universe):
        """Test the factorized path interval against the 1024-cell program."""
        f = parse("a1 & a10")
        result = factorized_interval(f, path_theta)
        assert result.interval == frequency_interval(f, path_theta, path_universe.full())

    def test_constant_query(self, example1_theta):
        """Test a query without attributes."""
        result = factorized_interval(Const(1), example1_theta)
        assert result.projection == EMPTY
        assert (result.interval.lo, result.interval.hi) == (1, 1)

    def test_matches_plain_program(self, random_instance):
        """Test the factorized interval against the plain one on random instances."""
        for seed in range(12):
            _, theta = random_instance(seed, K=6, rows=30)
            names = theta.universe.names
            f = parse(f"{names[0]} & !{names[3]} | {names[5]}")
            result = factorized_interval(f, theta)
            assert is_safe(result.projection, theta.family)
            plain = frequency_interval(f, theta, result.projection)
            assert result.interval == plain
