"""
Restricted safe sets: keep the projection set within a size budget by
cutting weakly dependent edges of the dependency graph.

Edges are weighted by the mutual information (in nats) of the item pair,
as reconstructed from the pair's frequencies. Whenever the safe-set search
would grow past the budget, each item it is about to add gets the cheapest
edge cut separating it from its frontier. The cheapest of those cuts is
removed from the family and the search restarts.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
from networkx.algorithms.flow import edmonds_karp

from .core import FrequencyAssignment, Itemset, ItemsetFamily
from .errors import InconsistentFrequenciesError, NotViolatingError, PreconditionError
from .graph import build_graph, frontier, iter_growth, outside_component

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]
EdgeWeights = Dict[Edge, float]

_SINK = -1
# Residual capacities below this count as saturated.
_RESIDUAL_EPS = 1e-12


def edge_key(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


def mi_weight(u: int, v: int, theta: FrequencyAssignment) -> float:
    """Mutual information of the pair (u, v) in nats."""
    a, b, ab = Itemset.of([u]), Itemset.of([v]), Itemset.of([u, v])
    for U in (a, b, ab):
        if U not in theta:
            raise KeyError(f"{theta.universe.format(U)} is not in the family")
    pu, pv, puv = theta[a], theta[b], theta[ab]
    cells = {
        (1, 1): puv,
        (1, 0): pu - puv,
        (0, 1): pv - puv,
        (0, 0): 1 - pu - pv + puv,
    }
    if any(p < 0 for p in cells.values()):
        raise InconsistentFrequenciesError(
            f"frequencies of {theta.universe.format(ab)} admit no pair distribution",
            projection=ab)
    marginal_u = {1: pu, 0: 1 - pu}
    marginal_v = {1: pv, 0: 1 - pv}
    total = 0.0
    for (i, j), p in cells.items():
        if p == 0:
            continue
        total += float(p) * math.log(p / (marginal_u[i] * marginal_v[j]))
    # rounding may leave a tiny negative value under independence
    return max(total, 0.0)


def edge_weights(theta: FrequencyAssignment) -> EdgeWeights:
    return {edge_key(*pair.members): mi_weight(*pair.members, theta)
            for pair in theta.family.pairs()}


def violation_subgraph(x: int, attrs: Itemset, G: nx.Graph,
                       family: ItemsetFamily) -> nx.Graph:
    """The part of G between x and its frontier on `attrs`.

    Nodes are x, the component of x outside `attrs` and the frontier;
    edges inside `attrs` are left out.
    """
    front = frontier(x, attrs, G)
    if front in family:
        raise NotViolatingError(
            f"frontier of {family.universe.names[x]} is "
            f"{family.universe.format(front)}, which is in the family")
    nodes = set(outside_component(x, attrs, G)) | set(front)
    H = nx.Graph()
    H.add_nodes_from(sorted(nodes))
    H.add_edges_from((u, v) for u, v in G.subgraph(nodes).edges
                     if not (u in attrs and v in attrs))
    return H


def min_cut(H: nx.Graph, weights: EdgeWeights, x: int,
            targets: Itemset) -> Tuple[Tuple[Edge, ...], float]:
    """Cheapest edge set of H separating x from every node of `targets`.

    The targets are merged into one sink and the flow is found with
    Edmonds-Karp. The returned cut is the one closest to x: its source side
    is everything reachable from x in the final residual network.
    """
    if x in targets:
        raise ValueError(f"item {x} is one of the targets")
    if not targets:
        raise ValueError("a cut needs at least one target")

    flow_graph = nx.Graph()
    flow_graph.add_node(x)
    flow_graph.add_node(_SINK)
    for u, v in H.edges:
        if u in targets and v in targets:
            continue
        a = _SINK if u in targets else u
        b = _SINK if v in targets else v
        w = weights[edge_key(u, v)]
        if flow_graph.has_edge(a, b):
            flow_graph[a][b]["capacity"] += w
        else:
            flow_graph.add_edge(a, b, capacity=w)

    R = edmonds_karp(flow_graph, x, _SINK, capacity="capacity")
    source_side = {x}
    stack = [x]
    while stack:
        u = stack.pop()
        for v, attr in R.succ[u].items():
            if v not in source_side and attr["capacity"] - attr["flow"] > _RESIDUAL_EPS:
                source_side.add(v)
                stack.append(v)

    edges = sorted(edge_key(u, v) for u, v in H.edges
                   if (u in source_side) != (v in source_side))
    cost = sum(weights[e] for e in edges)
    logger.debug(f"Min cut for item {x}: {edges} with cost {cost:.4f} "
                 f"(flow {R.graph['flow_value']:.4f})")
    return tuple(edges), cost


def prune_edges(theta: FrequencyAssignment,
                edges: Sequence[Edge]) -> FrequencyAssignment:
    """Drop the 2-itemsets of `edges` and every itemset containing one."""
    pairs = [Itemset.of(e) for e in edges]
    keep = [U for U in theta.family.sets
            if not any(pair.issubset(U) for pair in pairs)]
    return theta.restrict(keep)


@dataclass(frozen=True)
class CutCandidate:
    item: int
    edges: Tuple[Edge, ...]
    cost: float


@dataclass
class RestrictedSafeSet:
    itemset: Itemset
    theta: FrequencyAssignment
    removed_edges: List[Edge] = field(default_factory=list)
    cuts: List[List[CutCandidate]] = field(default_factory=list)
    within_budget: bool = True
    # removed edges that are not independent or not maximal in the input family
    inexact_edges: List[Edge] = field(default_factory=list)

    @property
    def restarts(self) -> int:
        return max(len(self.cuts) - 1, 0)

    @property
    def exact(self) -> bool:
        return not self.inexact_edges


def _inexact_edges(theta: FrequencyAssignment, edges: Sequence[Edge]) -> List[Edge]:
    out = []
    for u, v in edges:
        pair = Itemset.of((u, v))
        independent = theta[pair] == theta[Itemset.of([u])] * theta[Itemset.of([v])]
        maximal = not any(len(U) > 2 and pair.issubset(U) for U in theta.family.sets)
        if not (independent and maximal):
            out.append((u, v))
    return out


def restricted_safe_set(base: Itemset, theta: FrequencyAssignment, max_size: int,
                        weights: Optional[EdgeWeights] = None) -> RestrictedSafeSet:
    """A safe set of at most `max_size` items for a pruned version of θ."""
    universe = theta.universe
    if len(base) > max_size:
        raise PreconditionError(
            f"{universe.format(base)} already has more than {max_size} items")
    weights = edge_weights(theta) if weights is None else weights
    result = RestrictedSafeSet(base, theta)
    current = theta
    attempts = len(theta.family.pairs()) + 1
    for _ in range(attempts):
        family = current.family
        G = build_graph(family)
        candidates: List[CutCandidate] = []
        attrs = base
        for step in iter_growth(base, family, G):
            if len(step.before) + len(step.added) > max_size:
                for x in step.added:
                    H = violation_subgraph(x, step.before, G, family)
                    edges, cost = min_cut(H, weights, x, frontier(x, step.before, G))
                    candidates.append(CutCandidate(x, edges, cost))
            attrs = step.before | step.added
        result.cuts.append(candidates)
        result.itemset = attrs
        result.theta = current
        if len(attrs) <= max_size:
            break
        if not candidates:
            break
        best = min(candidates, key=lambda c: (c.cost, c.item))
        logger.info(f"Safe set {universe.format(attrs)} exceeds {max_size} items; "
                    f"cutting {[universe.names_of(Itemset.of(e)) for e in best.edges]} "
                    f"(cost {best.cost:.4f}) and restarting")
        current = prune_edges(current, best.edges)
        result.removed_edges.extend(best.edges)

    result.within_budget = len(result.itemset) <= max_size
    if not result.within_budget:
        logger.warning(f"No cut brings {universe.format(base)} within {max_size} "
                       f"items; returning {universe.format(result.itemset)}")
    result.inexact_edges = _inexact_edges(theta, result.removed_edges)
    if result.inexact_edges:
        logger.warning(f"Removed edges {result.inexact_edges} are not independent "
                       f"maximal itemsets; the restricted interval may be wider")
    return result


def candidate_costs(result: RestrictedSafeSet) -> Dict[int, float]:
    """Cost of the first recorded cut of each item, over all restarts."""
    costs: Dict[int, float] = {}
    for round_ in result.cuts:
        for c in round_:
            costs.setdefault(c.item, c.cost)
    return costs
