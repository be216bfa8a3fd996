"""
Attribute universes, itemsets, antimonotonic families, frequencies,
transaction data, projections and dense distributions.

Assignments over an attribute set C are enumerated little-endian: bit j of a
local index holds the value of the j-th smallest member of C. Objective
vectors, constraint rows and distribution vectors all share this order.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from pathlib import Path
from typing import (Dict, FrozenSet, Iterable, Iterator, List, Mapping,
                    Optional, Sequence, TextIO, Tuple, Union)

import numpy as np

from .errors import (DomainMismatchError, EmptyDataError, FamilyFormatError,
                     InconsistentFrequenciesError, UnknownAttributeError)

logger = logging.getLogger(__name__)

BitVector = Union[int, Sequence[int]]

# Float distributions (maxent only) must sum to one within this tolerance.
FLOAT_SUM_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Itemset:
    """A set of item indices stored as a bitmask."""
    mask: int = 0

    def __post_init__(self):
        if self.mask < 0:
            raise ValueError(f"itemset mask must be non-negative, got {self.mask}")

    @classmethod
    def of(cls, indices: Iterable[int]) -> "Itemset":
        mask = 0
        for i in indices:
            if i < 0:
                raise ValueError(f"item index must be non-negative, got {i}")
            mask |= 1 << i
        return cls(mask)

    @cached_property
    def members(self) -> Tuple[int, ...]:
        return tuple(i for i in range(self.mask.bit_length())
                     if self.mask >> i & 1)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, item: int) -> bool:
        return item >= 0 and bool(self.mask >> item & 1)

    def __or__(self, other: "Itemset") -> "Itemset":
        return Itemset(self.mask | other.mask)

    def __and__(self, other: "Itemset") -> "Itemset":
        return Itemset(self.mask & other.mask)

    def __sub__(self, other: "Itemset") -> "Itemset":
        return Itemset(self.mask & ~other.mask)

    def issubset(self, other: "Itemset") -> bool:
        return self.mask & ~other.mask == 0

    def issuperset(self, other: "Itemset") -> bool:
        return other.mask & ~self.mask == 0

    def with_item(self, item: int) -> "Itemset":
        return Itemset(self.mask | 1 << item)

    def without(self, item: int) -> "Itemset":
        return Itemset(self.mask & ~(1 << item))

    def subsets(self) -> Iterator["Itemset"]:
        """Every subset, the empty set first and self last."""
        sub = 0
        while True:
            yield Itemset(sub)
            if sub == self.mask:
                return
            sub = (sub - self.mask) & self.mask

    def sort_key(self) -> Tuple[int, Tuple[int, ...]]:
        return len(self), self.members

    def __repr__(self) -> str:
        return f"Itemset({set(self.members) or '{}'})"


EMPTY = Itemset()


def item_sort_key(token: str):
    """Numeric tokens sort numerically and before other tokens."""
    return (0, int(token), "") if token.isdigit() else (1, 0, token)


@dataclass(frozen=True)
class AttributeUniverse:
    """The ordered attribute names a_1 ... a_K."""
    names: Tuple[str, ...]

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if len(set(names)) != len(names):
            raise ValueError(f"attribute names must be unique: {names}")
        if any(not isinstance(n, str) or not n for n in names):
            raise ValueError("attribute names must be non-empty strings")

    @property
    def K(self) -> int:
        return len(self.names)

    def __len__(self) -> int:
        return len(self.names)

    @cached_property
    def _positions(self) -> Dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    def index(self, name: str) -> int:
        try:
            return self._positions[name]
        except KeyError:
            raise UnknownAttributeError(name) from None

    def itemset(self, names: Iterable[str]) -> Itemset:
        return Itemset.of(self.index(n) for n in names)

    def full(self) -> Itemset:
        return Itemset((1 << self.K) - 1)

    def names_of(self, itemset: Itemset) -> Tuple[str, ...]:
        self.check(itemset)
        return tuple(self.names[i] for i in itemset)

    def format(self, itemset: Itemset) -> str:
        return "{" + ",".join(self.names_of(itemset)) + "}"

    def check(self, itemset: Itemset) -> None:
        if itemset.mask >> self.K:
            raise DomainMismatchError(
                f"{itemset!r} has items outside a universe of {self.K} attributes")

    def restrict(self, attrs: Itemset) -> "AttributeUniverse":
        return AttributeUniverse(self.names_of(attrs))


# --- bit-level helpers -----------------------------------------------------

def as_mask(z: BitVector, width: Optional[int] = None) -> int:
    """Turn a bit vector (or an integer mask) into an integer mask."""
    if isinstance(z, (int, np.integer)):
        return int(z)
    if width is not None and len(z) != width:
        raise DomainMismatchError(
            f"binary vector has length {len(z)}, expected {width}")
    mask = 0
    for i, bit in enumerate(z):
        if bit not in (0, 1):
            raise ValueError(f"binary vector entries must be 0 or 1, got {bit}")
        mask |= bit << i
    return mask


def indicator(itemset: Itemset, z: BitVector, width: Optional[int] = None) -> int:
    """S_U(z): 1 iff every member of U is set in z.

    A bit vector z must cover every member of U, and have exactly `width`
    entries when a width (the universe size K) is given.
    """
    mask = as_mask(z, width)
    if not isinstance(z, (int, np.integer)) and itemset.mask >> len(z):
        raise DomainMismatchError(
            f"binary vector of length {len(z)} does not cover {itemset!r}")
    return int(mask & itemset.mask == itemset.mask)


def compress(mask: int, attrs: Itemset) -> int:
    """Local index over `attrs` of a global assignment mask."""
    local = 0
    for j, item in enumerate(attrs.members):
        local |= (mask >> item & 1) << j
    return local


def expand(local: int, attrs: Itemset) -> int:
    """Global mask of a local assignment index over `attrs`."""
    mask = 0
    for j, item in enumerate(attrs.members):
        mask |= (local >> j & 1) << item
    return mask


@lru_cache(maxsize=512)
def _assignment_masks(attrs_mask: int) -> np.ndarray:
    members = Itemset(attrs_mask).members
    local = np.arange(1 << len(members), dtype=np.int64)
    masks = np.zeros_like(local)
    for j, item in enumerate(members):
        masks |= ((local >> j) & 1) << item
    masks.setflags(write=False)
    return masks


def assignment_masks(attrs: Itemset) -> np.ndarray:
    """Global masks of all 2^|attrs| assignments, in canonical order."""
    return _assignment_masks(attrs.mask)


def indicator_vector(itemset: Itemset, attrs: Itemset) -> np.ndarray:
    """Boolean vector marking the assignments of `attrs` where S_U is 1."""
    if not itemset.issubset(attrs):
        raise DomainMismatchError(f"{itemset!r} is not contained in {attrs!r}")
    masks = assignment_masks(attrs)
    return (masks & itemset.mask) == itemset.mask


def projection_index(source: Itemset, target: Itemset) -> np.ndarray:
    """For each assignment of `source`, the index of its restriction to `target`."""
    if not target.issubset(source):
        raise DomainMismatchError(f"{target!r} is not contained in {source!r}")
    position = {item: j for j, item in enumerate(source.members)}
    local = np.arange(1 << len(source), dtype=np.int64)
    index = np.zeros_like(local)
    for t, item in enumerate(target.members):
        index |= ((local >> position[item]) & 1) << t
    return index


# --- families and frequencies ---------------------------------------------

def is_downward_closed(sets: Iterable[Itemset]) -> bool:
    """True iff removing any single item from a member gives a member."""
    members = set(sets)
    return all(U.without(i) in members for U in members for i in U)


@dataclass(frozen=True)
class ItemsetFamily:
    """A downward-closed family of itemsets containing the empty set."""
    universe: AttributeUniverse
    sets: FrozenSet[Itemset]

    def __post_init__(self):
        sets = frozenset(self.sets)
        object.__setattr__(self, "sets", sets)
        for U in sets:
            self.universe.check(U)
        if EMPTY not in sets:
            raise DomainMismatchError("a family must contain the empty itemset")
        if not is_downward_closed(sets):
            missing = next(U.without(i) for U in sets for i in U
                           if U.without(i) not in sets)
            raise DomainMismatchError(
                f"family is not downward closed: missing "
                f"{self.universe.format(missing)}")

    def __contains__(self, itemset: Itemset) -> bool:
        return itemset in self.sets

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self) -> Iterator[Itemset]:
        return iter(self.ordered)

    @cached_property
    def ordered(self) -> Tuple[Itemset, ...]:
        return tuple(sorted(self.sets, key=Itemset.sort_key))

    def pairs(self) -> List[Itemset]:
        return [U for U in self.ordered if len(U) == 2]

    def maximal(self) -> List[Itemset]:
        return [U for U in self.ordered
                if not any(U.mask != V.mask and U.issubset(V) for V in self.sets)]

    def format(self) -> str:
        return "[" + ", ".join(self.universe.format(U) for U in self) + "]"


def downward_close(seeds: Iterable[Itemset],
                   universe: AttributeUniverse) -> ItemsetFamily:
    """Smallest downward-closed family containing the seeds and the empty set."""
    sets = {EMPTY}
    for seed in seeds:
        universe.check(seed)
        if seed in sets:
            continue
        sets.update(seed.subsets())
    return ItemsetFamily(universe, frozenset(sets))


def project_family(family: ItemsetFamily, attrs: Itemset) -> ItemsetFamily:
    """Keep the itemsets contained in `attrs`."""
    return ItemsetFamily(family.universe,
                         frozenset(U for U in family.sets if U.issubset(attrs)))


class FrequencyAssignment(Mapping[Itemset, Fraction]):
    """Exact frequencies θ_U for every itemset of a family."""

    def __init__(self, universe: AttributeUniverse,
                 values: Mapping[Itemset, Union[Fraction, int, str]]):
        self.universe = universe
        self._values: Dict[Itemset, Fraction] = {
            U: Fraction(v) for U, v in values.items()}
        self._validate()

    def _validate(self):
        # builds (and checks) the family
        family = self.family
        if self._values[EMPTY] != 1:
            raise InconsistentFrequenciesError(
                f"the empty itemset must have frequency 1, got {self._values[EMPTY]}")
        for U, value in self._values.items():
            if not 0 <= value <= 1:
                raise InconsistentFrequenciesError(
                    f"frequency of {self.universe.format(U)} is outside [0, 1]: {value}")
            for i in U:
                if value > self._values[U.without(i)]:
                    raise InconsistentFrequenciesError(
                        f"frequency of {self.universe.format(U)} exceeds the "
                        f"frequency of its subset {self.universe.format(U.without(i))}")
        logger.debug(f"Validated {len(family)} frequencies")

    @cached_property
    def family(self) -> ItemsetFamily:
        return ItemsetFamily(self.universe, frozenset(self._values))

    def __getitem__(self, itemset: Itemset) -> Fraction:
        return self._values[itemset]

    def __iter__(self) -> Iterator[Itemset]:
        return iter(self.family.ordered)

    def __len__(self) -> int:
        return len(self._values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FrequencyAssignment):
            return NotImplemented
        return self.universe == other.universe and self._values == other._values

    __hash__ = None

    def restrict(self, sets: Iterable[Itemset]) -> "FrequencyAssignment":
        """Frequencies of a sub-family (which must be downward closed)."""
        return FrequencyAssignment(self.universe,
                                   {U: self._values[U] for U in sets})

    def __repr__(self) -> str:
        body = ", ".join(f"{self.universe.format(U)}: {v}" for U, v in self.items())
        return f"FrequencyAssignment({body})"


def project_frequencies(theta: FrequencyAssignment,
                        attrs: Itemset) -> FrequencyAssignment:
    """Π_C θ: the frequencies of the itemsets contained in `attrs`."""
    return theta.restrict(project_family(theta.family, attrs).sets)


def marginal_table(theta: FrequencyAssignment, itemset: Itemset) -> Tuple[Fraction, ...]:
    """Exact distribution on an itemset of the family, by Möbius inversion."""
    if itemset not in theta:
        raise DomainMismatchError(
            f"{theta.universe.format(itemset)} is not in the family")
    table = []
    for local in range(1 << len(itemset)):
        ones = Itemset(expand(local, itemset))
        total = Fraction(0)
        for extra in (itemset - ones).subsets():
            sign = -1 if len(extra) % 2 else 1
            total += sign * theta[ones | extra]
        table.append(total)
    return tuple(table)


# --- transaction data ------------------------------------------------------

@dataclass(frozen=True)
class TransactionDB:
    """A multiset of binary rows over a universe, stored as masks."""
    universe: AttributeUniverse
    rows: Tuple[int, ...]

    def __post_init__(self):
        rows = tuple(int(r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        limit = 1 << self.universe.K
        for r in rows:
            if not 0 <= r < limit:
                raise DomainMismatchError(
                    f"row {r:b} does not fit a universe of {self.universe.K} attributes")

    @classmethod
    def from_vectors(cls, universe: AttributeUniverse,
                     vectors: Iterable[Sequence[int]]) -> "TransactionDB":
        return cls(universe, tuple(as_mask(v, universe.K) for v in vectors))

    @classmethod
    def from_transactions(cls, universe: AttributeUniverse,
                          transactions: Iterable[Iterable[str]]) -> "TransactionDB":
        return cls(universe, tuple(universe.itemset(t).mask for t in transactions))

    def vectors(self) -> List[Tuple[int, ...]]:
        return [tuple(r >> i & 1 for i in range(self.universe.K)) for r in self.rows]

    def __len__(self) -> int:
        return len(self.rows)


def frequency(itemset: Itemset, data: TransactionDB) -> Fraction:
    """fr(U, D): the fraction of rows containing every item of U."""
    data.universe.check(itemset)
    if not data.rows:
        raise EmptyDataError("cannot compute frequencies on an empty database")
    hits = sum(1 for r in data.rows if r & itemset.mask == itemset.mask)
    return Fraction(hits, len(data.rows))


def frequencies(data: TransactionDB, family: ItemsetFamily) -> FrequencyAssignment:
    """fr(F, D) for every itemset of the family."""
    return FrequencyAssignment(family.universe,
                               {U: frequency(U, data) for U in family.sets})


def project_data(data: TransactionDB, attrs: Itemset) -> TransactionDB:
    """Π_C D: delete the columns outside `attrs`, keeping row multiplicity."""
    universe = data.universe.restrict(attrs)
    return TransactionDB(universe, tuple(compress(r, attrs) for r in data.rows))


# --- distributions ---------------------------------------------------------

Probabilities = Union[Tuple[Fraction, ...], np.ndarray]


@dataclass(frozen=True, eq=False)
class Distribution:
    """A dense distribution over the assignments of `attrs`.

    Entries are exact Fractions, except for maxent results which hold a
    float numpy array.
    """
    attrs: Itemset
    probs: Probabilities

    def __post_init__(self):
        size = 1 << len(self.attrs)
        if isinstance(self.probs, np.ndarray):
            probs = np.asarray(self.probs, dtype=float)
            if probs.shape != (size,):
                raise DomainMismatchError(
                    f"distribution over {len(self.attrs)} items needs {size} entries")
            if np.any(probs < 0):
                raise ValueError("distribution entries must be non-negative")
            if abs(probs.sum() - 1.0) > FLOAT_SUM_TOLERANCE:
                raise ValueError(f"distribution sums to {probs.sum()!r}, not 1")
            probs.setflags(write=False)
        else:
            probs = tuple(Fraction(v) for v in self.probs)
            if len(probs) != size:
                raise DomainMismatchError(
                    f"distribution over {len(self.attrs)} items needs {size} entries")
            if any(v < 0 for v in probs):
                raise ValueError("distribution entries must be non-negative")
            if sum(probs) != 1:
                raise ValueError(f"distribution sums to {sum(probs)}, not 1")
        object.__setattr__(self, "probs", probs)

    @property
    def exact(self) -> bool:
        return not isinstance(self.probs, np.ndarray)

    def __len__(self) -> int:
        return len(self.probs)

    def __getitem__(self, local: int):
        return self.probs[local]

    @classmethod
    def uniform(cls, attrs: Itemset, exact: bool = True) -> "Distribution":
        size = 1 << len(attrs)
        if exact:
            return cls(attrs, (Fraction(1, size),) * size)
        return cls(attrs, np.full(size, 1.0 / size))

    @classmethod
    def point_mass(cls, attrs: Itemset, z: BitVector) -> "Distribution":
        """All mass on one assignment, given as bits in member order."""
        local = as_mask(z, len(attrs)) if not isinstance(z, int) else z
        probs = [Fraction(0)] * (1 << len(attrs))
        probs[local] = Fraction(1)
        return cls(attrs, tuple(probs))

    def as_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.probs]) if self.exact else self.probs

    def expectation(self, values: Sequence):
        """Σ_z values[z] p(z); exact for exact distributions."""
        if len(values) != len(self.probs):
            raise DomainMismatchError("value vector and distribution differ in length")
        if self.exact:
            return sum((Fraction(v) * p for v, p in zip(values, self.probs)),
                       Fraction(0))
        return float(np.dot(np.asarray(values, dtype=float), self.probs))

    def mass(self, itemset: Itemset):
        """E_p[S_U] for an itemset inside the distribution's attributes."""
        return self.expectation(
            indicator_vector(itemset, self.attrs).astype(int).tolist())


def empirical(data: TransactionDB) -> Distribution:
    """Normalized row counts over the whole universe of the data."""
    if not data.rows:
        raise EmptyDataError("cannot build an empirical distribution of no rows")
    counts: Dict[int, int] = {}
    for r in data.rows:
        counts[r] = counts.get(r, 0) + 1
    n = len(data.rows)
    size = 1 << data.universe.K
    probs = tuple(Fraction(counts.get(z, 0), n) for z in range(size))
    return Distribution(data.universe.full(), probs)


def marginalize(p: Distribution, attrs: Itemset) -> Distribution:
    """Π_C p: sum out the attributes of p outside `attrs`."""
    if not attrs.issubset(p.attrs):
        raise DomainMismatchError(f"{attrs!r} is not contained in {p.attrs!r}")
    index = projection_index(p.attrs, attrs)
    size = 1 << len(attrs)
    if not p.exact:
        return Distribution(attrs, np.bincount(index, weights=p.probs,
                                               minlength=size))
    out = [Fraction(0)] * size
    for source, target in enumerate(index.tolist()):
        out[target] += p.probs[source]
    return Distribution(attrs, tuple(out))


def satisfies(p: Distribution, theta: FrequencyAssignment,
              tol: float = 0.0) -> bool:
    """E_p[S_F] = θ, exactly (or within `tol` when tol > 0)."""
    for U in theta.family:
        if not U.issubset(p.attrs):
            raise DomainMismatchError(
                f"itemset {theta.universe.format(U)} is outside the distribution's attributes")
        got = p.mass(U)
        if tol > 0:
            if abs(float(got) - float(theta[U])) > tol:
                return False
        elif got != theta[U]:
            return False
    return True


# --- family+frequency text format ------------------------------------------

ITEMS_HEADER = "# items:"


def parse_family(text: str) -> FrequencyAssignment:
    """Parse `item item ... : value` lines; values may be fractions or decimals."""
    declared: Optional[List[str]] = None
    entries: List[Tuple[int, Tuple[str, ...], Fraction]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.lower().startswith(ITEMS_HEADER):
            declared = line[len(ITEMS_HEADER):].split()
            continue
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise FamilyFormatError("expected 'items : frequency'", lineno)
        left, _, right = line.rpartition(":")
        try:
            value = Fraction(right.strip())
        except (ValueError, ZeroDivisionError):
            raise FamilyFormatError(f"invalid frequency {right.strip()!r}", lineno)
        items = tuple(left.split())
        if len(set(items)) != len(items):
            raise FamilyFormatError("repeated item in itemset", lineno)
        entries.append((lineno, items, value))

    if declared is not None:
        universe = AttributeUniverse(tuple(declared))
    else:
        tokens = {t for _, items, _ in entries for t in items}
        universe = AttributeUniverse(tuple(sorted(tokens, key=item_sort_key)))

    values: Dict[Itemset, Fraction] = {}
    for lineno, items, value in entries:
        try:
            U = universe.itemset(items)
        except UnknownAttributeError as e:
            raise FamilyFormatError(f"item '{e.name}' is not declared", lineno)
        if U in values:
            raise FamilyFormatError(
                f"itemset {universe.format(U)} listed twice", lineno)
        values[U] = value
    values.setdefault(EMPTY, Fraction(1))
    try:
        return FrequencyAssignment(universe, values)
    except (DomainMismatchError, InconsistentFrequenciesError) as e:
        raise FamilyFormatError(str(e)) from e


def read_family(path: Union[str, Path]) -> FrequencyAssignment:
    with open(path, 'r', encoding='utf-8') as f:
        theta = parse_family(f.read())
    logger.info(f"Loaded {len(theta)} itemset frequencies over "
                f"{theta.universe.K} attributes from {path}")
    return theta


def format_family(theta: FrequencyAssignment) -> str:
    lines = [f"{ITEMS_HEADER} {' '.join(theta.universe.names)}"]
    for U, value in theta.items():
        items = " ".join(theta.universe.names_of(U))
        lines.append(f"{items} : {value}" if items else f": {value}")
    return "\n".join(lines) + "\n"


def write_family(theta: FrequencyAssignment,
                 target: Union[str, Path, TextIO]) -> None:
    text = format_family(theta)
    if hasattr(target, "write"):
        target.write(text)
        return
    with open(target, 'w', encoding='utf-8') as f:
        f.write(text)
    logger.info(f"Wrote {len(theta)} itemset frequencies to {target}")
