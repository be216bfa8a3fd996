"""
Tests for transaction parsing and the modified Apriori miner
"""

import logging
import random
from fractions import Fraction
from itertools import combinations
from math import prod

import pytest

from itembound.core import EMPTY, AttributeUniverse, Itemset, TransactionDB, frequency
from itembound.errors import EmptyDataError
from itembound.miner import (MinerConfig, modified_apriori, parse_transactions,
                             read_transactions, scaling_factors)


@pytest.fixture
def toy_data(toy_data_path):
    return read_transactions(toy_data_path)


class TestParseTransactions:
    """Test FIMI-style transaction input."""

    def test_toy_file(self, toy_data):
        """Test the bundled correlated dataset."""
        assert len(toy_data) == 10
        assert toy_data.universe.names == tuple("abcdef")
        assert toy_data.rows[4] == 0

    def test_blank_lines_are_empty_transactions(self):
        """Test that blank lines count as rows."""
        data = parse_transactions("a b\n\nb\n")
        assert len(data) == 3
        assert frequency(Itemset.of([1]), data) == Fraction(2, 3)

    def test_numeric_items_sort_numerically(self):
        """Test the order of numeric item names."""
        data = parse_transactions("10 2\n2\n")
        assert data.universe.names == ("2", "10")

    def test_empty_text(self):
        """Test that an empty file is rejected."""
        with pytest.raises(EmptyDataError):
            parse_transactions("")


class TestScalingFactors:
    """Test the per-item scaling factors."""

    def test_toy_factors(self, toy_data):
        """Test that the two most frequent items are scaled by 4/3."""
        scale = scaling_factors(toy_data)
        names = toy_data.universe.names
        assert {names[i]: s for i, s in scale.items()} == {
            "a": 1, "b": Fraction(4, 3), "c": 1, "d": 1, "e": Fraction(4, 3), "f": 1}

    def test_absent_items_dropped(self, abc, caplog):
        """Test that items without occurrences get no factor."""
        data = TransactionDB.from_vectors(abc, [(1, 0, 0), (1, 1, 0)])
        with caplog.at_level(logging.WARNING, logger="itembound.miner"):
            scale = scaling_factors(data)
        assert scale == {0: Fraction(2), 1: Fraction(1)}
        assert "['c']" in caplog.text

    def test_empty_data(self, abc):
        """Test that factors need rows."""
        with pytest.raises(EmptyDataError):
            scaling_factors(TransactionDB(abc, ()))


class TestMinerConfig:
    """Test miner settings."""

    def test_threshold_is_exact(self):
        """Test that the decimal threshold is read exactly."""
        assert MinerConfig(0.21).threshold == Fraction(21, 100)

    @pytest.mark.parametrize("kwargs", [{"sigma": 0}, {"sigma": -0.1},
                                        {"sigma": 0.2, "max_size": -1}])
    def test_invalid(self, kwargs):
        """Test that invalid settings are rejected."""
        with pytest.raises(ValueError):
            MinerConfig(**kwargs)


class TestModifiedApriori:
    """Test levelwise mining."""

    def test_toy_relative(self, toy_data):
        """Test that the relative threshold keeps the four correlated pairs."""
        family, theta = modified_apriori(toy_data, MinerConfig(0.21))
        universe = toy_data.universe
        pairs = {universe.format(U) for U in family.pairs()}
        assert pairs == {"{a,b}", "{b,c}", "{d,e}", "{e,f}"}
        assert len(family) == 11
        assert theta[universe.itemset("ab")] == Fraction(3, 10)

    def test_relative_versus_absolute(self, toy_data):
        """Test that scaling raises the bar for pairs with frequent items."""
        relative, _ = modified_apriori(toy_data, MinerConfig(0.3))
        absolute, _ = modified_apriori(toy_data, MinerConfig(0.3, relative=False))
        assert relative.pairs() == []
        assert len(absolute.pairs()) == 4

    def test_equal_frequencies_match_classic_apriori(self):
        """Test that items of equal frequency make both thresholds agree."""
        universe = AttributeUniverse(tuple("abcdef"))
        for seed in range(10):
            rng = random.Random(seed)
            rows = [tuple(rng.randint(0, 1) for _ in range(6)) for _ in range(12)]
            # each row with its complement puts every item at 1/2
            rows += [tuple(1 - v for v in row) for row in rows]
            data = TransactionDB.from_vectors(universe, rows)
            assert set(scaling_factors(data).values()) == {1}
            for sigma in (0.05, 0.2, 0.25, 0.4):
                relative = modified_apriori(data, MinerConfig(sigma))
                absolute = modified_apriori(data, MinerConfig(sigma, relative=False))
                assert set(relative[0]) == set(absolute[0])
                assert relative[1] == absolute[1]

    def test_max_size(self, toy_data):
        """Test the size cap."""
        family, _ = modified_apriori(toy_data, MinerConfig(0.01, max_size=1))
        assert max(len(U) for U in family) == 1
        family, _ = modified_apriori(toy_data, MinerConfig(0.01, max_size=0))
        assert set(family) == {EMPTY}

    def test_triples(self, toy_data):
        """Test that a low threshold reaches the frequent triples."""
        family, theta = modified_apriori(toy_data, MinerConfig(0.1))
        universe = toy_data.universe
        assert universe.itemset("abc") in family
        assert universe.itemset("def") in family
        assert theta[universe.itemset("abc")] == Fraction(1, 5)

    def test_progress_bar(self, toy_data, capsys):
        """Test that the progress bar goes to stderr only."""
        modified_apriori(toy_data, MinerConfig(0.21), progress=True)
        captured = capsys.readouterr()
        assert captured.out == ""
        assert "Mining levels" in captured.err

    def test_empty_data(self, abc):
        """Test that mining needs rows."""
        with pytest.raises(EmptyDataError):
            modified_apriori(TransactionDB(abc, ()), MinerConfig(0.2))

    def test_matches_brute_force(self, random_instance):
        """Test the mined family against enumeration of every itemset."""
        for seed in range(15):
            data, _ = random_instance(seed, K=6, rows=30)
            cfg = MinerConfig(0.15)
            family, theta = modified_apriori(data, cfg)
            scale = scaling_factors(data)
            expected = {EMPTY}
            for size in range(1, 7):
                for items in combinations(sorted(scale), size):
                    U = Itemset.of(items)
                    eta = prod(scale[i] for i in items)
                    if frequency(U, data) / eta >= cfg.threshold:
                        expected.add(U)
            assert set(family) == expected
            assert all(theta[U] == frequency(U, data) for U in family)
