"""
Frequency intervals of boolean queries.

The interval of f is the range of E_p[f] over all distributions p on a
projection set C that satisfy the frequencies of the itemsets inside C.
Both ends are exact linear programs over the 2^|C| cells of p.
"""

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Union

from .core import (FrequencyAssignment, Itemset, TransactionDB, indicator_vector,
                   project_frequencies)
from .cut import restricted_safe_set
from .errors import EmptyDataError, InconsistentFrequenciesError
from .graph import minimal_safe_set
from .lp import LinearProgram, LPStatus, solve
from .query import Formula, compile_formula, objective_vector, support

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FrequencyInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        if lo > hi:
            raise ValueError(f"interval lower end {lo} exceeds upper end {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, value) -> bool:
        return self.lo <= value <= self.hi

    def issubset(self, other: "FrequencyInterval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


def build_problem(theta: FrequencyAssignment, attrs: Itemset, f: Formula,
                  sense: str = "min") -> LinearProgram:
    """The program over Π_C θ whose optimum is one end of f's interval.

    Variables are the cells of a distribution on `attrs`; each itemset inside
    `attrs` contributes one row (the empty itemset gives Σp = 1).
    """
    universe = theta.universe
    c = objective_vector(f, attrs, universe)
    projected = project_frequencies(theta, attrs)
    A = []
    b = []
    for U in projected:
        A.append(tuple(int(v) for v in indicator_vector(U, attrs)))
        b.append(projected[U])
    return LinearProgram(tuple(A), tuple(b), c, sense)


def frequency_interval(f: Formula, theta: FrequencyAssignment,
                       attrs: Itemset) -> FrequencyInterval:
    """Exact [min, max] of E_p[f] over distributions on `attrs` satisfying θ."""
    universe = theta.universe
    low = solve(build_problem(theta, attrs, f, "min"))
    if low.status is LPStatus.INFEASIBLE:
        raise InconsistentFrequenciesError(
            f"no distribution on {universe.format(attrs)} satisfies the frequencies",
            projection=attrs)
    high = solve(build_problem(theta, attrs, f, "max"))
    interval = FrequencyInterval(low.value, high.value)
    logger.debug(f"Interval of f on {universe.format(attrs)}: {interval} "
                 f"({1 << len(attrs)} variables, {low.pivots + high.pivots} pivots)")
    return interval


@dataclass(frozen=True)
class Policy:
    name: str
    max_size: Optional[int] = None

    def __str__(self) -> str:
        return f"{self.name}:{self.max_size}" if self.name == "restricted" else self.name


POLICY_NAMES = ("trivial", "safe", "restricted", "factorized")
_RESTRICTED = re.compile(r"restricted(?::(\d+))?\Z")


def parse_policy(text: str, default_max_size: int = 8) -> Policy:
    """`trivial`, `safe`, `factorized`, `restricted` or `restricted:M`."""
    text = text.strip().lower()
    match = _RESTRICTED.match(text)
    if match:
        size = int(match.group(1)) if match.group(1) else default_max_size
        if size < 1:
            raise ValueError(f"restricted budget must be positive, got {size}")
        return Policy("restricted", size)
    if text in POLICY_NAMES:
        return Policy(text)
    raise ValueError(f"unknown policy {text!r}; expected one of "
                     f"trivial, safe, restricted:M, factorized")


@dataclass
class BoundReport:
    interval: FrequencyInterval
    policy: Policy
    projection: Itemset
    variables: int
    metadata: Dict[str, object] = field(default_factory=dict)


def bound_with_policy(f: Formula, theta: FrequencyAssignment,
                      policy: Union[Policy, str]) -> BoundReport:
    """Choose the projection set by policy and bound f on it."""
    if isinstance(policy, str):
        policy = parse_policy(policy)
    universe = theta.universe
    B = support(f, universe)
    metadata: Dict[str, object] = {}

    if policy.name == "factorized":
        # imported here: junction builds on this module
        from .junction import factorized_interval
        result = factorized_interval(f, theta)
        metadata.update(cliques=[universe.names_of(Q) for Q in result.cliques],
                        naive_variables=result.naive_variables)
        return BoundReport(result.interval, policy, result.projection,
                           result.variables, metadata)

    if policy.name == "trivial":
        attrs, used = B, theta
    elif policy.name == "safe":
        attrs, used = minimal_safe_set(B, theta.family), theta
    else:
        restricted = restricted_safe_set(B, theta, policy.max_size)
        attrs, used = restricted.itemset, restricted.theta
        metadata.update(
            removed_edges=[universe.names_of(Itemset.of(e))
                           for e in restricted.removed_edges],
            within_budget=restricted.within_budget,
            exact=restricted.exact)
    interval = frequency_interval(f, used, attrs)
    logger.info(f"Bound ({policy}) on {universe.format(attrs)}: {interval}")
    return BoundReport(interval, policy, attrs, 1 << len(attrs), metadata)


def interval_ratio(i1: FrequencyInterval, i2: FrequencyInterval) -> Fraction:
    """r = |i2| / |i1|, with 0/0 taken as 1."""
    if i1.width == 0:
        return Fraction(1)
    return i2.width / i1.width


def true_frequency(f: Formula, data: TransactionDB) -> Fraction:
    """Exact share of rows on which f holds."""
    if not data.rows:
        raise EmptyDataError("cannot compute frequencies on an empty database")
    check = compile_formula(f, data.universe)
    return Fraction(sum(check(r) for r in data.rows), len(data.rows))
