"""
Dependency graphs, frontiers, ranks, the safeness test and the search for
the minimal safe set containing a given set of items.

Paths "from x to C" are restricted paths: only their last vertex may lie in
C. Graphs are networkx graphs whose nodes are item indices.
"""

import logging
from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

import networkx as nx

from .core import Itemset, ItemsetFamily

logger = logging.getLogger(__name__)


def build_graph(family: ItemsetFamily) -> nx.Graph:
    """One vertex per attribute, one edge per 2-itemset of the family."""
    G = nx.Graph()
    for i, name in enumerate(family.universe.names):
        G.add_node(i, name=name)
    for pair in family.pairs():
        u, v = pair.members
        G.add_edge(u, v)
    return G


def restricted_distances(x: int, attrs: Itemset, G: nx.Graph,
                         radius: Optional[int] = None) -> Dict[int, int]:
    """Shortest restricted-path length from x to every reachable vertex.

    Vertices of `attrs` are reached but never expanded.
    """
    dist = {x: 0}
    queue = deque([x])
    while queue:
        u = queue.popleft()
        if u != x and u in attrs:
            continue
        if radius is not None and dist[u] >= radius:
            continue
        for v in sorted(G[u]):
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def restricted_neighborhood(x: int, r: int, attrs: Itemset,
                            G: nx.Graph) -> Itemset:
    """Items reachable from x by a restricted path of length at most r."""
    if r < 0:
        raise ValueError(f"radius must be non-negative, got {r}")
    return Itemset.of(restricted_distances(x, attrs, G, radius=r))


def outside_component(x: int, attrs: Itemset, G: nx.Graph) -> List[int]:
    """x and every item connected to it without passing through `attrs`."""
    outside = [v for v in G.nodes if v == x or v not in attrs]
    return sorted(nx.node_connected_component(G.subgraph(outside), x))


def frontier(x: int, attrs: Itemset, G: nx.Graph) -> Itemset:
    """front(x, C): the last items of all restricted paths from x to C."""
    if x in attrs:
        raise ValueError(f"item {x} belongs to the set; its frontier is undefined")
    ends = set()
    for u in outside_component(x, attrs, G):
        ends.update(v for v in G[u] if v in attrs)
    return Itemset.of(ends)


@dataclass(frozen=True, order=True)
class RankVector:
    """Counts of set items by restricted-path distance 1, 2, ... (trailing zeros dropped).

    Tuple order on the trimmed counts is the lexicographic order of the
    zero-padded vectors.
    """
    counts: Tuple[int, ...] = ()

    def __str__(self) -> str:
        if len(self.counts) == 1:
            return str(self.counts[0])
        return "(" + ",".join(map(str, self.counts)) + ")"


def rank(x: int, attrs: Itemset, G: nx.Graph) -> RankVector:
    if x in attrs:
        raise ValueError(f"item {x} belongs to the set; its rank is undefined")
    dist = restricted_distances(x, attrs, G)
    depths = [d for v, d in dist.items() if v in attrs]
    if not depths:
        return RankVector()
    counts = [0] * max(depths)
    for d in depths:
        counts[d - 1] += 1
    return RankVector(tuple(counts))


@dataclass(frozen=True)
class SafetyCheck:
    safe: bool
    witness: Optional[int] = None
    frontier: Optional[Itemset] = None

    def __bool__(self) -> bool:
        return self.safe


def is_safe(attrs: Itemset, family: ItemsetFamily,
            G: Optional[nx.Graph] = None) -> SafetyCheck:
    """C is safe iff every outside item has its frontier in the family."""
    G = build_graph(family) if G is None else G
    done = set()
    for x in sorted(G.nodes):
        if x in attrs or x in done:
            continue
        component = outside_component(x, attrs, G)
        done.update(component)
        front = frontier(x, attrs, G)
        if front not in family:
            return SafetyCheck(False, x, front)
    return SafetyCheck(True)


@dataclass(frozen=True)
class GrowthStep:
    """One augmentation of the search: `added` joins `before`."""
    before: Itemset
    added: Itemset
    radius: int
    ranks: Dict[int, RankVector]


def iter_growth(base: Itemset, family: ItemsetFamily,
                G: Optional[nx.Graph] = None) -> Iterator[GrowthStep]:
    """Run the safe-set search from `base`, yielding each augmentation.

    Each round looks at the neighbours V of C and grows the radius r until
    some U_x = N(x, r, C) ∩ C falls outside the family or the restricted
    neighbourhoods stop growing. Violators of maximal rank are then added
    together.
    """
    G = build_graph(family) if G is None else G
    family.universe.check(base)
    current = base
    while True:
        neighbours = sorted({v for u in current for v in G[u]} - set(current))
        dist = {x: restricted_distances(x, current, G) for x in neighbours}
        # past this radius no restricted neighbourhood grows
        horizon = max((max(d.values()) for d in dist.values()), default=0)
        violators: List[int] = []
        r = 1
        while True:
            reached = {x: Itemset.of(v for v, d in dist[x].items()
                                     if d <= r and v in current)
                       for x in neighbours}
            violators = [x for x in neighbours if reached[x] not in family]
            if violators or r >= horizon:
                break
            r += 1
        if not violators:
            return
        ranks = {x: rank(x, current, G) for x in violators}
        best = max(ranks.values())
        added = Itemset.of(x for x in violators if ranks[x] == best)
        logger.debug(f"Radius {r}: violators {violators}, adding "
                     f"{list(added)} with rank {best}")
        yield GrowthStep(current, added, r, ranks)
        current = current | added


def minimal_safe_set(base: Itemset, family: ItemsetFamily,
                     G: Optional[nx.Graph] = None) -> Itemset:
    """The unique smallest safe set containing `base`."""
    current = base
    for step in iter_growth(base, family, G):
        current = step.before | step.added
    logger.debug(f"Minimal safe set of {family.universe.format(base)} is "
                 f"{family.universe.format(current)}")
    return current
