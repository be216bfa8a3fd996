"""
Maximum-entropy distributions satisfying itemset frequencies.

Fitting is iterative proportional fitting over a dense float table: each
constraint U rescales the cells where U holds to θ_U and the rest to
1 - θ_U. Cells that no consistent distribution can use (zero cells of an
exact itemset marginal) are fixed at zero before fitting, which also
covers θ_U ∈ {0, 1}.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from .bounds import frequency_interval
from .core import (Distribution, FrequencyAssignment, Itemset, indicator_vector,
                   marginal_table, marginalize, project_frequencies,
                   projection_index, satisfies)
from .errors import InconsistentFrequenciesError, PreconditionError
from .graph import build_graph, frontier, is_safe, outside_component
from .query import Const

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 10_000
MAX_DENSE_ITEMS = 20
# how far the input of an extension may be from the projected frequencies
EXTENSION_CHECK_TOL = 1e-8


@dataclass
class MaxentResult:
    distribution: Distribution
    iterations: int
    residual: float
    converged: bool
    history: List[float] = field(default_factory=list)


def structural_zeros(theta: FrequencyAssignment, attrs: Itemset) -> np.ndarray:
    """Boolean vector of the cells of `attrs` that may carry mass."""
    projected = project_frequencies(theta, attrs)
    allowed = np.ones(1 << len(attrs), dtype=bool)
    for V in projected.family.maximal():
        table = marginal_table(projected, V)
        zero = [k for k, v in enumerate(table) if v == 0]
        if zero:
            allowed &= ~np.isin(projection_index(attrs, V), zero)
    return allowed


def _check_dense(attrs: Itemset) -> None:
    if len(attrs) > MAX_DENSE_ITEMS:
        raise PreconditionError(
            f"dense tables are limited to {MAX_DENSE_ITEMS} items, got {len(attrs)}")


def ipf_maxent(theta: FrequencyAssignment, attrs: Optional[Itemset] = None,
               tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
               check_feasible: bool = True) -> MaxentResult:
    """Maximum-entropy distribution on `attrs` (default: every item) matching Π θ.

    Unless `check_feasible` is off, frequencies that no distribution on
    `attrs` satisfies raise InconsistentFrequenciesError before fitting.
    """
    universe = theta.universe
    attrs = universe.full() if attrs is None else attrs
    _check_dense(attrs)
    projected = project_frequencies(theta, attrs)
    if check_feasible:
        frequency_interval(Const(1), projected, attrs)

    allowed = structural_zeros(projected, attrs)
    if not allowed.any():
        raise InconsistentFrequenciesError(
            f"frequencies leave no cell of {universe.format(attrs)} with mass",
            projection=attrs)
    p = allowed / allowed.sum()

    constraints: List[Tuple[np.ndarray, float]] = [
        (indicator_vector(U, attrs), float(projected[U]))
        for U in projected if len(U) > 0 and 0 < projected[U] < 1]

    history: List[float] = []
    residual = 0.0
    iterations = 0
    while constraints and iterations < max_iter:
        iterations += 1
        for ind, target in constraints:
            inside = p[ind].sum()
            outside = p[~ind].sum()
            if inside > 0:
                p[ind] *= target / inside
            if outside > 0:
                p[~ind] *= (1 - target) / outside
        residual = max(abs(p[ind].sum() - target) for ind, target in constraints)
        history.append(residual)
        logger.debug(f"IPF cycle {iterations}: residual {residual:.3e}")
        if residual <= tol:
            break
    converged = residual <= tol
    if not converged:
        logger.warning(f"IPF on {universe.format(attrs)} stopped after {iterations} "
                       f"cycles with residual {residual:.3e} (tolerance {tol:.1e})")
    p = p / p.sum()
    return MaxentResult(Distribution(attrs, p), iterations, residual, converged, history)


@dataclass(frozen=True)
class FittedExpectation:
    itemset: Itemset
    target: Fraction
    fitted: float

    @property
    def residual(self) -> float:
        return abs(self.fitted - float(self.target))


def expectations(result: MaxentResult,
                 theta: FrequencyAssignment) -> List[FittedExpectation]:
    """Fitted E_p[S_U] next to θ_U, for every itemset inside the fit."""
    p = result.distribution
    return [FittedExpectation(U, theta[U], float(p.mass(U)))
            for U in theta if U.issubset(p.attrs)]


def extend_via_maxent(q: Distribution, theta: FrequencyAssignment,
                      tol: float = DEFAULT_TOL,
                      max_iter: int = DEFAULT_MAX_ITER) -> Distribution:
    """Extend a distribution on a safe set C to every item, keeping θ satisfied.

    Items outside C split into blocks W connected outside C; each block is
    attached through its frontier V by the maximum-entropy conditional
    p(W | V) fitted on W ∪ V.
    """
    universe = theta.universe
    family = theta.family
    attrs = q.attrs
    full = universe.full()
    if attrs == full:
        return q
    _check_dense(full)
    check = is_safe(attrs, family)
    if not check:
        raise PreconditionError(
            f"{universe.format(attrs)} is not safe: frontier of "
            f"{universe.names[check.witness]} is {universe.format(check.frontier)}")
    if not satisfies(q, project_frequencies(theta, attrs), tol=EXTENSION_CHECK_TOL):
        raise InconsistentFrequenciesError(
            f"distribution on {universe.format(attrs)} does not satisfy the frequencies",
            projection=attrs)

    G = build_graph(family)
    p = q.as_array()[projection_index(full, attrs)]
    seen = set()
    for x in sorted(set(full) - set(attrs)):
        if x in seen:
            continue
        block = Itemset.of(outside_component(x, attrs, G))
        seen.update(block)
        V = frontier(x, attrs, G)
        local = ipf_maxent(theta, block | V, tol, max_iter).distribution
        joint = local.as_array()[projection_index(full, block | V)]
        margin = marginalize(local, V).as_array()[projection_index(full, V)]
        p = p * np.divide(joint, margin, out=np.zeros_like(joint), where=margin > 0)
        logger.debug(f"Attached block {universe.format(block)} through "
                     f"{universe.format(V)}")
    return Distribution(full, p / p.sum())


def verify_marginal_theorem(theta: FrequencyAssignment, attrs: Itemset,
                            tol: float = DEFAULT_TOL,
                            max_iter: int = DEFAULT_MAX_ITER) -> float:
    """Largest gap between the full maxent marginalized to C and the maxent fitted on C."""
    check = is_safe(attrs, theta.family)
    if not check:
        raise PreconditionError(f"{theta.universe.format(attrs)} is not safe")
    whole = ipf_maxent(theta, None, tol, max_iter).distribution
    local = ipf_maxent(theta, attrs, tol, max_iter).distribution
    gap = np.abs(marginalize(whole, attrs).as_array() - local.as_array())
    deviation = float(gap.max())
    logger.info(f"Maxent marginal on {theta.universe.format(attrs)} deviates by "
                f"{deviation:.3e}")
    return deviation
