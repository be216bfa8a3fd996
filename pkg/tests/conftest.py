"""
Shared pytest fixtures for itembound tests
"""

import random
from fractions import Fraction
from itertools import combinations, product
from pathlib import Path

import pytest

from itembound.core import (AttributeUniverse, FrequencyAssignment, Itemset,
                            TransactionDB, downward_close, frequencies)

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


def sets(universe, *words):
    """Itemsets from words of single-letter names, e.g. sets(u, "ab", "c")."""
    return [universe.itemset(list(w)) for w in words]


def supersets(base, K):
    """Every itemset over K items that contains `base`."""
    outside = [i for i in range(K) if i not in base]
    for size in range(len(outside) + 1):
        for extra in combinations(outside, size):
            yield base | Itemset.of(extra)


@pytest.fixture
def abc():
    return AttributeUniverse(("a", "b", "c"))


@pytest.fixture
def example1_data(abc):
    """The five-row dataset over a, b, c."""
    rows = [(1, 0, 1), (0, 0, 1), (0, 1, 1), (1, 1, 0), (1, 0, 0)]
    return TransactionDB.from_vectors(abc, rows)


@pytest.fixture
def example1_theta(abc):
    """Frequencies of ∅, a, b, c, ab, ac on the five-row dataset."""
    a, b, c, ab, ac = sets(abc, "a", "b", "c", "ab", "ac")
    return FrequencyAssignment(abc, {
        Itemset(): 1, a: Fraction(3, 5), b: Fraction(2, 5), c: Fraction(3, 5),
        ab: Fraction(1, 5), ac: Fraction(1, 5),
    })


@pytest.fixture
def example1_path():
    return DATA_DIR / "example1.family"


@pytest.fixture
def toy_data_path():
    return DATA_DIR / "toy_correlated.dat"


@pytest.fixture
def six():
    return AttributeUniverse(tuple("abcdef"))


@pytest.fixture
def square_family(six):
    """A chordless square a-b-c-d with e hanging off c, d and f off a."""
    return downward_close(sets(six, "ab", "bc", "cd", "ad", "de", "ce", "af"), six)


@pytest.fixture
def abcd():
    return AttributeUniverse(("a", "b", "c", "d"))


@pytest.fixture
def diamond_theta(abcd):
    """Edges ab, ac, bd, cd; b and d always agree, a is independent of b and c."""
    a, b, c, d, ab, ac, bd, cd = sets(abcd, "a", "b", "c", "d", "ab", "ac", "bd", "cd")
    half = Fraction(1, 2)
    return FrequencyAssignment(abcd, {
        Itemset(): 1, a: half, b: half, c: half, d: half,
        ab: Fraction(1, 4), ac: Fraction(1, 4), bd: half, cd: Fraction(2, 5),
    })


@pytest.fixture
def path_universe():
    return AttributeUniverse(tuple(f"a{i}" for i in range(1, 11)))


@pytest.fixture
def path_theta(path_universe):
    """A ten-item Markov chain: fair start, each item repeats its predecessor w.p. 3/4."""
    values = {Itemset(): Fraction(1)}
    for i in range(10):
        values[Itemset.of([i])] = Fraction(1, 2)
    for i in range(9):
        values[Itemset.of([i, i + 1])] = Fraction(3, 8)
    return FrequencyAssignment(path_universe, values)


@pytest.fixture
def five():
    return AttributeUniverse(tuple("abcde"))


@pytest.fixture
def wedge_family(five):
    """Cliques {a,b}, {b,c,d}, {b,c,e}; {a,b} may hang off either triangle."""
    return downward_close(sets(five, "ab", "bc", "bd", "cd", "be", "ce"), five)


def _random_data(rng, universe, rows, positive):
    K = universe.K
    density = [rng.uniform(0.2, 0.8) for _ in range(K)]
    vectors = []
    for _ in range(rows):
        # items copy a random earlier item now and then, to create dependencies
        row = []
        for i in range(K):
            if i and rng.random() < 0.4:
                row.append(row[rng.randrange(i)])
            else:
                row.append(int(rng.random() < density[i]))
        vectors.append(tuple(row))
    if positive:
        vectors.extend(product((0, 1), repeat=K))
    return TransactionDB.from_vectors(universe, vectors)


def _random_family(rng, universe, max_size):
    K = universe.K
    seeds = []
    for _ in range(rng.randint(1, 2 * K)):
        size = rng.randint(1, min(max_size, K))
        seeds.append(Itemset.of(rng.sample(range(K), size)))
    return downward_close(seeds, universe)


@pytest.fixture
def random_instance():
    """Factory: random data and the exact frequencies of a random family on it."""
    def make(seed, K, rows=30, max_size=3, positive=False):
        rng = random.Random(seed)
        universe = AttributeUniverse(tuple(f"i{k}" for k in range(K)))
        data = _random_data(rng, universe, rows, positive)
        family = _random_family(rng, universe, max_size)
        return data, frequencies(data, family)
    return make


@pytest.fixture
def random_family():
    """Factory: a random downward-closed family over K items."""
    def make(seed, K, max_size=3):
        rng = random.Random(seed)
        universe = AttributeUniverse(tuple(f"i{k}" for k in range(K)))
        return _random_family(rng, universe, max_size)
    return make
