"""
Chordal graphs, junction trees and the factorized interval program.

When the dependency graph (with the query attributes made a clique) is
chordal, a distribution satisfying the frequencies can be stored as one
small table per maximal clique, glued along the separators of a junction
tree. The interval program then needs Σ 2^|Q_i| variables instead of
2^|C|.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple

import networkx as nx
from networkx.algorithms.tree.mst import SpanningTreeIterator

from .bounds import FrequencyInterval
from .core import (FrequencyAssignment, Itemset, ItemsetFamily, indicator_vector,
                   project_frequencies, projection_index)
from .errors import InconsistentFrequenciesError, NotChordalError, PreconditionError
from .graph import build_graph, is_safe, minimal_safe_set
from .lp import LinearProgram, LPStatus, solve
from .query import Formula, objective_vector, support

logger = logging.getLogger(__name__)


def is_triangulated(G: nx.Graph) -> Tuple[bool, Optional[List[int]]]:
    """Maximum cardinality search; returns a perfect elimination ordering if G is chordal."""
    weight = {v: 0 for v in G.nodes}
    visited: List[int] = []
    unvisited = set(G.nodes)
    while unvisited:
        v = min(unvisited, key=lambda u: (-weight[u], u))
        unvisited.remove(v)
        visited.append(v)
        for u in G[v]:
            if u in unvisited:
                weight[u] += 1
    order = visited[::-1]
    position = {v: i for i, v in enumerate(order)}
    for v in order:
        later = [u for u in G[v] if position[u] > position[v]]
        if not later:
            continue
        follower = min(later, key=position.__getitem__)
        if any(u != follower and not G.has_edge(u, follower) for u in later):
            return False, None
    return True, order


def maximal_cliques(G: nx.Graph) -> List[Itemset]:
    """Maximal cliques of a chordal graph, read off its elimination ordering."""
    chordal, order = is_triangulated(G)
    if not chordal:
        raise NotChordalError("maximal cliques are only enumerated for chordal graphs")
    position = {v: i for i, v in enumerate(order)}
    candidates = {Itemset.of([v, *(u for u in G[v] if position[u] > position[v])])
                  for v in order}
    cliques = [Q for Q in candidates
               if not any(Q != R and Q.issubset(R) for R in candidates)]
    return sorted(cliques, key=Itemset.sort_key)


def _fill_in(adjacency: Dict[int, Set[int]], v: int) -> List[Tuple[int, int]]:
    neighbours = sorted(adjacency[v])
    return [(a, b) for i, a in enumerate(neighbours) for b in neighbours[i + 1:]
            if b not in adjacency[a]]


def triangulate(G: nx.Graph) -> Tuple[nx.Graph, List[Tuple[int, int]], List[int]]:
    """Greedy min-fill elimination (ties to the smallest item).

    Returns the chordal supergraph, the fill edges and the elimination order.
    """
    H = G.copy()
    adjacency = {v: set(G[v]) for v in G.nodes}
    fill: List[Tuple[int, int]] = []
    order: List[int] = []
    while adjacency:
        v = min(adjacency, key=lambda u: (len(_fill_in(adjacency, u)), u))
        for a, b in _fill_in(adjacency, v):
            adjacency[a].add(b)
            adjacency[b].add(a)
            fill.append((a, b))
        for u in adjacency[v]:
            adjacency[u].discard(v)
        del adjacency[v]
        order.append(v)
    H.add_edges_from(fill)
    if fill:
        logger.debug(f"Triangulation added {len(fill)} fill edges: {fill}")
    return H, fill, order


@dataclass(frozen=True)
class JunctionTree:
    """Cliques joined by tree edges (pairs of clique indices)."""
    cliques: Tuple[Itemset, ...]
    edges: Tuple[Tuple[int, int], ...]

    def graph(self) -> nx.Graph:
        T = nx.Graph()
        T.add_nodes_from(range(len(self.cliques)))
        T.add_edges_from(self.edges)
        return T

    def separator(self, i: int, j: int) -> Itemset:
        return self.cliques[i] & self.cliques[j]

    @property
    def separators(self) -> Dict[Tuple[int, int], Itemset]:
        return {(i, j): self.separator(i, j) for i, j in self.edges}

    @property
    def is_forest(self) -> bool:
        return len(self.cliques) > 0 and len(self.edges) < len(self.cliques) - 1

    def has_running_intersection(self) -> bool:
        T = self.graph()
        items = set().union(*(Q.members for Q in self.cliques)) if self.cliques else set()
        for item in items:
            holders = [i for i, Q in enumerate(self.cliques) if item in Q]
            if not nx.is_connected(T.subgraph(holders)):
                return False
        return True

    @property
    def variables(self) -> int:
        return sum(1 << len(Q) for Q in self.cliques)


def _clique_graph(cliques: Sequence[Itemset]) -> nx.Graph:
    CG = nx.Graph()
    CG.add_nodes_from(range(len(cliques)))
    for i, Q in enumerate(cliques):
        for j in range(i + 1, len(cliques)):
            shared = len(Q & cliques[j])
            if shared:
                CG.add_edge(i, j, weight=shared)
    return CG


def build_junction_tree(cliques: Sequence[Itemset]) -> JunctionTree:
    """Maximum-weight spanning tree of the clique graph, weights |Q_i ∩ Q_j|."""
    cliques = tuple(cliques)
    T = nx.maximum_spanning_tree(_clique_graph(cliques), algorithm="kruskal")
    tree = JunctionTree(cliques, tuple(sorted(tuple(sorted(e)) for e in T.edges)))
    if not tree.has_running_intersection():
        raise NotChordalError("cliques do not come from a chordal graph: "
                              "no spanning tree has the running intersection property")
    if tree.is_forest:
        logger.warning(f"Dependency graph is disconnected; junction forest of "
                       f"{len(cliques) - len(tree.edges)} trees")
    return tree


def iter_junction_trees(cliques: Sequence[Itemset]) -> Iterator[JunctionTree]:
    """Every junction tree of the cliques of a connected chordal graph."""
    cliques = tuple(cliques)
    CG = _clique_graph(cliques)
    if len(cliques) == 1:
        yield JunctionTree(cliques, ())
        return
    if not nx.is_connected(CG):
        raise PreconditionError("junction trees are enumerated for connected graphs only")
    for T in SpanningTreeIterator(CG, minimum=False):
        tree = JunctionTree(cliques, tuple(sorted(tuple(sorted(e)) for e in T.edges)))
        if tree.has_running_intersection():
            yield tree


def is_clique_safe(family: ItemsetFamily) -> bool:
    """Every proper subset of every maximal clique of the graph is in the family."""
    G = build_graph(family)
    for clique in nx.find_cliques(G):
        V = Itemset.of(clique)
        if len(V) > 1 and any(V.without(v) not in family for v in V):
            return False
    return True


@dataclass(frozen=True)
class InnerSeparators:
    edges: Tuple[Tuple[int, int], ...]
    separators: Tuple[Itemset, ...]
    chosen: Dict[int, int] = field(default_factory=dict)

    @property
    def items(self) -> Itemset:
        out = Itemset()
        for S in self.separators:
            out = out | S
        return out


def inner_separators(tree: JunctionTree, base: Itemset) -> InnerSeparators:
    """Separators of the smallest subtree holding a clique for every item of `base`.

    The cliques holding one item form a subtree, so repeatedly dropping a leaf
    whose items are all still held elsewhere leaves that smallest subtree.
    """
    groups = {}
    for b in base:
        holders = {i for i, Q in enumerate(tree.cliques) if b in Q}
        if not holders:
            raise PreconditionError(f"item {b} is in no clique of the tree")
        groups[b] = holders

    T = tree.graph()
    kept = set(T.nodes)

    def removable(node: int) -> bool:
        return all(len(holders & kept) > 1
                   for holders in groups.values() if node in holders)

    changed = True
    while changed:
        changed = False
        for node in sorted(kept):
            degree = sum(1 for u in T[node] if u in kept)
            if degree <= 1 and removable(node):
                kept.remove(node)
                changed = True

    edges = tuple(e for e in tree.edges if e[0] in kept and e[1] in kept)
    chosen = {b: min(holders & kept) for b, holders in groups.items()}
    return InnerSeparators(edges, tuple(tree.separator(*e) for e in edges), chosen)


def safe_set_from_tree(tree: JunctionTree, base: Itemset,
                       family: ItemsetFamily) -> Itemset:
    """`base` plus every item of its inner separators."""
    chordal, _ = is_triangulated(build_graph(family))
    if not chordal:
        raise PreconditionError("the dependency graph of the family is not triangulated")
    if not is_clique_safe(family):
        raise PreconditionError("the family is not clique-safe")
    attrs = base | inner_separators(tree, base).items
    check = is_safe(attrs, family)
    if not check:
        raise PreconditionError(
            f"{family.universe.format(attrs)} is not safe; the tree does not "
            f"belong to the family's dependency graph")
    return attrs


@dataclass
class FactorizedResult:
    interval: FrequencyInterval
    projection: Itemset
    cliques: List[Itemset]
    tree: JunctionTree
    root: int
    fill_edges: List[Tuple[int, int]]

    @property
    def variables(self) -> int:
        return self.tree.variables

    @property
    def naive_variables(self) -> int:
        return 1 << len(self.projection)


def _factorized_program(theta: FrequencyAssignment, tree: JunctionTree,
                        root: int, objective: Sequence[int],
                        sense: str) -> LinearProgram:
    offsets = []
    n = 0
    for Q in tree.cliques:
        offsets.append(n)
        n += 1 << len(Q)
    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []

    def new_row() -> List[Fraction]:
        row = [Fraction(0)] * n
        rows.append(row)
        return row

    # each itemset is constrained in the first clique holding it; the
    # separator rows carry it to the other cliques
    placed = set()
    for i, Q in enumerate(tree.cliques):
        for U in theta:
            if not U.issubset(Q) or (U in placed and len(U) > 0):
                continue
            placed.add(U)
            row = new_row()
            for z, hit in enumerate(indicator_vector(U, Q).tolist()):
                if hit:
                    row[offsets[i] + z] = Fraction(1)
            rhs.append(theta[U])

    for i, j in tree.edges:
        S = tree.separator(i, j)
        if not S:
            continue
        to_i = projection_index(tree.cliques[i], S).tolist()
        to_j = projection_index(tree.cliques[j], S).tolist()
        for s in range(1 << len(S)):
            row = new_row()
            for z, t in enumerate(to_i):
                if t == s:
                    row[offsets[i] + z] = Fraction(1)
            for z, t in enumerate(to_j):
                if t == s:
                    row[offsets[j] + z] = Fraction(-1)
            rhs.append(Fraction(0))

    c = [0] * n
    c[offsets[root]:offsets[root] + len(objective)] = objective
    return LinearProgram(tuple(tuple(r) for r in rows), tuple(rhs), tuple(c), sense)


def factorized_interval(f: Formula, theta: FrequencyAssignment) -> FactorizedResult:
    """Interval of f from per-clique tables on a junction tree of the safe set."""
    universe = theta.universe
    B = support(f, universe)
    attrs = minimal_safe_set(B, theta.family)
    projected = project_frequencies(theta, attrs)

    G = nx.Graph()
    G.add_nodes_from(attrs)
    G.add_edges_from(pair.members for pair in projected.family.pairs())
    G.add_edges_from((u, v) for u in B for v in B if u < v)
    H, fill, _ = triangulate(G)
    # a constant query over an empty safe set still needs one (empty) clique
    cliques = maximal_cliques(H) or [Itemset()]
    tree = build_junction_tree(cliques)

    holding = [i for i, Q in enumerate(cliques) if B.issubset(Q)]
    root = min(holding, key=lambda i: cliques[i].sort_key())
    objective = objective_vector(f, cliques[root], universe)

    low = solve(_factorized_program(projected, tree, root, objective, "min"))
    if low.status is LPStatus.INFEASIBLE:
        raise InconsistentFrequenciesError(
            f"no distribution on {universe.format(attrs)} satisfies the frequencies",
            projection=attrs)
    high = solve(_factorized_program(projected, tree, root, objective, "max"))
    result = FactorizedResult(FrequencyInterval(low.value, high.value), attrs,
                              cliques, tree, root, fill)
    logger.info(f"Factorized bound on {universe.format(attrs)}: {result.interval} "
                f"with {result.variables} variables ({result.naive_variables} naive)")
    return result
