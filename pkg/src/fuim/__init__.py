"""Fuzzy-utility itemset mining over quantitative transaction databases.

Library surface: a fast fuzzy-list miner (`mine`), a two-phase level-wise
baseline (`tpfu_mine`), an exhaustive oracle (`oracle_mine`), and the
shared fuzzification primitives they are all defined in terms of. The
batch CLI lives in `fuim.cli`.
"""

from .core import (
    ContractViolation,
    FuimError,
    FuzzyItem,
    FuzzyItemset,
    ParseError,
    QuantitativeDatabase,
    QuantitativeTransaction,
    RegionLabel,
    ResourceLimitExceeded,
    Threshold,
    ValidationError,
    build_database,
    load_database,
    resolve_threshold,
)
from .fuzzifier import (
    FuzzyRegion,
    MembershipFunction,
    default_membership_function,
    fuzzify,
    fuzzify_database,
    fuub,
    itemset_fuzzy_utility_in_tx,
    load_membership_function,
    max_fuzzy_utility,
    max_transaction_fuzzy_utility,
    parse_membership_function,
    region_fuzzy_utility,
    total_fuzzy_utility,
)
from .fuzzylist import FuzzyList, FuzzyListElement, build_initial_lists, join
from .miner import (
    ASCENDING,
    DESCENDING,
    ItemOrder,
    MinerConfig,
    MiningResult,
    RunStats,
    compute_order,
    expended_check,
    mine,
    variant_config,
)
from .baseline import OracleConfig, oracle_mine, tpfu_mine
from .datagen import GeneratorSpec, generate_database

__version__ = "0.1.0"

__all__ = [
    "ASCENDING",
    "DESCENDING",
    "ContractViolation",
    "FuimError",
    "FuzzyItem",
    "FuzzyItemset",
    "FuzzyList",
    "FuzzyListElement",
    "FuzzyRegion",
    "GeneratorSpec",
    "ItemOrder",
    "MembershipFunction",
    "MinerConfig",
    "MiningResult",
    "OracleConfig",
    "ParseError",
    "QuantitativeDatabase",
    "QuantitativeTransaction",
    "RegionLabel",
    "ResourceLimitExceeded",
    "RunStats",
    "Threshold",
    "ValidationError",
    "build_database",
    "build_initial_lists",
    "compute_order",
    "default_membership_function",
    "expended_check",
    "fuzzify",
    "fuzzify_database",
    "fuub",
    "generate_database",
    "itemset_fuzzy_utility_in_tx",
    "join",
    "load_database",
    "load_membership_function",
    "max_fuzzy_utility",
    "max_transaction_fuzzy_utility",
    "mine",
    "oracle_mine",
    "parse_membership_function",
    "region_fuzzy_utility",
    "resolve_threshold",
    "total_fuzzy_utility",
    "tpfu_mine",
    "variant_config",
]
