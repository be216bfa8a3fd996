"""
Transaction ingestion and levelwise itemset mining.

The miner keeps an itemset U when θ_U / η_U ≥ σ, where η_U is the product
of the scaling factors s(a) = m(a) / m of its items (m(a) the frequency of
item a, m the smallest item frequency). Since s(a) ≥ 1 the criterion is
antimonotonic, so the usual Apriori candidate pruning applies. With
`relative=False` the criterion is the plain support threshold θ_U ≥ σ.
"""

import logging
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from tqdm import tqdm

from .core import (EMPTY, AttributeUniverse, FrequencyAssignment, Itemset,
                   ItemsetFamily, TransactionDB, item_sort_key)
from .errors import EmptyDataError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MinerConfig:
    sigma: float
    max_size: Optional[int] = None
    relative: bool = True

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.max_size is not None and self.max_size < 0:
            raise ValueError(f"max_size must be non-negative, got {self.max_size}")

    @property
    def threshold(self) -> Fraction:
        # through str so 0.2 means 1/5, not its binary approximation
        return Fraction(str(self.sigma))


def parse_transactions(text: str) -> TransactionDB:
    lines = text.splitlines()
    if not lines:
        raise EmptyDataError("transaction file is empty")
    transactions = [line.split() for line in lines]
    tokens = {t for row in transactions for t in row}
    universe = AttributeUniverse(tuple(sorted(tokens, key=item_sort_key)))
    return TransactionDB.from_transactions(universe, transactions)


def read_transactions(path: Union[str, Path]) -> TransactionDB:
    """Read a FIMI-style file: one transaction per line, items separated by whitespace."""
    with open(path, 'r', encoding='utf-8') as f:
        data = parse_transactions(f.read())
    logger.info(f"Loaded {len(data)} transactions over {data.universe.K} items from {path}")
    return data


def _tidsets(data: TransactionDB) -> List[int]:
    """Per item, a bitset of the rows containing it."""
    tids = [0] * data.universe.K
    for r, row in enumerate(data.rows):
        for i in Itemset(row):
            tids[i] |= 1 << r
    return tids


def scaling_factors(data: TransactionDB) -> Dict[int, Fraction]:
    """s(a) for every item occurring in the data; absent items are left out."""
    if not data.rows:
        raise EmptyDataError("cannot compute scaling factors on an empty database")
    n = len(data.rows)
    counts = {i: t.bit_count() for i, t in enumerate(_tidsets(data))}
    absent = [data.universe.names[i] for i, c in counts.items() if c == 0]
    if absent:
        logger.warning(f"Dropping items that occur in no transaction: {absent}")
    present = {i: Fraction(c, n) for i, c in counts.items() if c > 0}
    if not present:
        return {}
    rarest = min(present.values())
    return {i: m / rarest for i, m in present.items()}


def modified_apriori(data: TransactionDB, cfg: MinerConfig,
                     progress: bool = False) -> Tuple[ItemsetFamily, FrequencyAssignment]:
    """Levelwise search for every itemset passing the (relative) threshold."""
    if not data.rows:
        raise EmptyDataError("cannot mine an empty database")
    n = len(data.rows)
    sigma = cfg.threshold
    scale = scaling_factors(data)
    if not cfg.relative:
        scale = {i: Fraction(1) for i in scale}
    tids = _tidsets(data)

    def passes(freq: Fraction, eta: Fraction) -> bool:
        return freq / eta >= sigma

    values: Dict[Itemset, Fraction] = {EMPTY: Fraction(1)}
    level: Dict[Itemset, Tuple[int, Fraction]] = {}
    if cfg.max_size is None or cfg.max_size >= 1:
        for i in sorted(scale):
            freq = Fraction(tids[i].bit_count(), n)
            if passes(freq, scale[i]):
                level[Itemset.of([i])] = (tids[i], scale[i])

    size = 1
    with tqdm(desc="Mining levels", unit="level", disable=not progress,
              file=sys.stderr) as pbar:
        while level:
            for U, (tid, _) in level.items():
                values[U] = Fraction(tid.bit_count(), n)
            logger.debug(f"Level {size}: {len(level)} itemsets")
            pbar.update(1)
            pbar.set_postfix(size=size, kept=len(level))
            if cfg.max_size is not None and size >= cfg.max_size:
                break
            ordered = sorted(level, key=Itemset.sort_key)
            following: Dict[Itemset, Tuple[int, Fraction]] = {}
            for a, U in enumerate(ordered):
                for V in ordered[a + 1:]:
                    if U.members[:-1] != V.members[:-1]:
                        break
                    W = U | V
                    if any(W.without(i) not in level for i in W):
                        continue
                    tid = level[U][0] & level[V][0]
                    eta = level[U][1] * scale[V.members[-1]]
                    if passes(Fraction(tid.bit_count(), n), eta):
                        following[W] = (tid, eta)
            level = following
            size += 1

    theta = FrequencyAssignment(data.universe, values)
    logger.info(f"Mined {len(theta) - 1} itemsets (sigma={cfg.sigma}, "
                f"{'relative' if cfg.relative else 'absolute'} threshold)")
    return theta.family, theta
