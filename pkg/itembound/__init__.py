"""
itembound: exact frequency bounds for boolean queries over itemset frequencies.
"""

from .bounds import FrequencyInterval, bound_with_policy, frequency_interval
from .core import (AttributeUniverse, FrequencyAssignment, Itemset, ItemsetFamily,
                   TransactionDB, read_family)
from .cut import restricted_safe_set
from .graph import is_safe, minimal_safe_set
from .query import parse

__version__ = "0.1.0"
