import pytest

from fuim import (
    ASCENDING,
    DESCENDING,
    FuzzyItem,
    FuzzyItemset,
    MinerConfig,
    ValidationError,
    build_database,
    build_initial_lists,
    compute_order,
    default_membership_function,
    expended_check,
    generate_database,
    mine,
    oracle_mine,
    variant_config,
)
from fuim.fuzzylist import FuzzyList, FuzzyListElement
from fuim.miner import MiningAccumulator, RunStats, miner_step

import helpers


# ------------------------------------------------------------------- order


def test_order_ascending_on_sample(sample_db, bundled_mf):
    order = compute_order(sample_db, bundled_mf)
    assert [sample_db.labels[b] for b in order.base_sequence] == ["C", "E", "D", "A", "B"]


def test_order_descending_is_reverse_at_base_level(sample_db, bundled_mf):
    asc = compute_order(sample_db, bundled_mf)
    desc = compute_order(sample_db, bundled_mf, descending=True)
    assert desc.base_sequence == tuple(reversed(asc.base_sequence))


def test_order_ties_broken_by_smaller_id():
    mf = default_membership_function()
    # two items with identical occurrences have equal upper bounds
    db = build_database([(1, [("P", 2)]), (2, [("Q", 2)])], {"P": 3.0, "Q": 3.0})
    order = compute_order(db, mf)
    assert order.base_sequence == (db.label_to_id["P"], db.label_to_id["Q"])


def test_order_regions_adjacent_per_base(sample_db, bundled_mf):
    order = compute_order(sample_db, bundled_mf)
    seq = order.fuzzy_sequence
    assert len(seq) == sample_db.item_count * len(bundled_mf.regions)
    for i in range(0, len(seq), len(bundled_mf.regions)):
        block = seq[i : i + len(bundled_mf.regions)]
        assert len({fi.item for fi in block}) == 1
        assert [fi.region for fi in block] == list(range(len(bundled_mf.regions)))


# ------------------------------------------------------------------- config


def test_config_requires_exhaustive_acknowledgement():
    cfg = MinerConfig(gamma=1.0, prune_fuub=False)
    with pytest.raises(ValidationError):
        cfg.validate()
    cfg.allow_exhaustive = True
    cfg.validate()


def test_config_rejects_bad_values():
    with pytest.raises(ValidationError):
        MinerConfig(gamma=-1.0).validate()
    with pytest.raises(ValidationError):
        MinerConfig(gamma=1.0, order="sideways").validate()
    with pytest.raises(ValidationError):
        MinerConfig(gamma=1.0, max_pattern_length=0).validate()


def test_variant_presets():
    assert variant_config("FUIM", 5.0).prune_remaining and variant_config("FUIM", 5.0).prune_expended
    assert not variant_config("FUIM1", 5.0).prune_remaining
    assert not variant_config("FUIM1", 5.0).prune_expended
    v2 = variant_config("FUIM2", 5.0)
    assert v2.prune_remaining and not v2.prune_expended
    v3 = variant_config("FUIM3", 5.0)
    assert v3.prune_expended and not v3.prune_remaining
    with pytest.raises(ValidationError):
        variant_config("FUIM9", 5.0)


# ------------------------------------------------------------------- mining


def test_mine_matches_oracle_on_sample(sample_db, bundled_mf):
    expected = helpers.result_map(oracle_mine(sample_db, bundled_mf, 60.0))
    got = helpers.result_map(mine(sample_db, bundled_mf, MinerConfig(gamma=60.0)))
    assert helpers.maps_equal(expected, got), helpers.describe_diff(expected, got)
    assert len(got) == 15


def test_gamma_above_every_upper_bound_yields_nothing(sample_db, bundled_mf):
    result = mine(sample_db, bundled_mf, MinerConfig(gamma=351.0))
    assert result.hfuis == []
    assert result.stats.visited_nodes == 0


def test_toggle_and_order_combinations_agree(bundled_mf):
    for seed in (1, 4):
        db = generate_database(helpers.corpus_spec(seed))
        reference = None
        for pr in (True, False):
            for pe in (True, False):
                for order in (ASCENDING, DESCENDING):
                    cfg = MinerConfig(
                        gamma=40.0, order=order, prune_remaining=pr, prune_expended=pe
                    )
                    got = helpers.result_map(mine(db, bundled_mf, cfg))
                    if reference is None:
                        reference = got
                    else:
                        assert helpers.maps_equal(reference, got)


def test_prune_monotonicity(sample_db, bundled_mf):
    def constructed(variant):
        return mine(sample_db, bundled_mf, variant_config(variant, 60.0)).stats.constructed_lists

    full, only_remaining, none_ = constructed("FUIM"), constructed("FUIM2"), constructed("FUIM1")
    assert full <= only_remaining <= none_


def test_reported_utilities_match_list_and_oracle(sample_db, bundled_mf):
    result = mine(sample_db, bundled_mf, MinerConfig(gamma=60.0))
    oracle = helpers.result_map(oracle_mine(sample_db, bundled_mf, 60.0))
    for itemset, fu in result.hfuis:
        assert helpers.close(fu, oracle[helpers.itemset_key(itemset)])


def test_result_ordering_deterministic(sample_db, bundled_mf):
    a = mine(sample_db, bundled_mf, MinerConfig(gamma=40.0))
    b = mine(sample_db, bundled_mf, MinerConfig(gamma=40.0))
    assert a.hfuis == b.hfuis
    utilities = [v for _, v in a.hfuis]
    assert utilities == sorted(utilities, reverse=True)


def test_max_pattern_length_caps_depth(sample_db, bundled_mf):
    capped = mine(sample_db, bundled_mf, MinerConfig(gamma=0.0, max_pattern_length=2))
    assert capped.hfuis
    assert max(len(s) for s, _ in capped.hfuis) == 2
    from fuim.baseline import OracleConfig

    expected = helpers.result_map(
        oracle_mine(sample_db, bundled_mf, 0.0, OracleConfig(max_pattern_length=2))
    )
    assert helpers.maps_equal(expected, helpers.result_map(capped))


def test_stats_counters_consistent(sample_db, bundled_mf):
    stats = mine(sample_db, bundled_mf, MinerConfig(gamma=60.0)).stats
    assert stats.constructed_lists <= stats.visited_nodes
    assert stats.visited_nodes > 0
    assert stats.pruned_by_remaining >= 0 and stats.pruned_by_expended >= 0
    assert stats.peak_memory_estimate > 0
    assert stats.wall_time >= 0.0


def test_exhaustive_mode_matches_filtered_mode(sample_db, bundled_mf):
    filtered = helpers.result_map(mine(sample_db, bundled_mf, MinerConfig(gamma=60.0)))
    exhaustive = helpers.result_map(
        mine(
            sample_db,
            bundled_mf,
            MinerConfig(gamma=60.0, prune_fuub=False, allow_exhaustive=True),
        )
    )
    assert helpers.maps_equal(filtered, exhaustive)


# ------------------------------------------------------------ miner_step


def element(tid, membership, crisp, rfu):
    return FuzzyListElement(tid, membership, crisp, rfu)


def run_step(lists, gamma):
    cfg = MinerConfig(gamma=gamma)
    acc = MiningAccumulator(cfg=cfg, stats=RunStats())
    miner_step(None, lists, cfg, acc)
    return acc


def test_remaining_guard_blocks_extension_and_counts():
    # ifu + rfu mass below gamma: node emitted but never extended
    lst = FuzzyList.from_elements(
        FuzzyItemset((FuzzyItem(0, 0),)),
        [element(1, 0.5, 100.0, 1.0), element(2, 0.5, 40.0, 0.0)],
    )
    sibling = FuzzyList.from_elements(
        FuzzyItemset((FuzzyItem(1, 0),)), [element(1, 0.9, 10.0, 0.0)]
    )
    acc = run_step([lst, sibling], gamma=80.0)
    assert acc.stats.pruned_by_remaining == 2  # both nodes stop
    assert acc.stats.constructed_lists == 0
    assert [s for s, _ in acc.results] == []
    # sumIfu(lst) = 70 < 80, sumIfu+sumRfu = 71 < 80


def test_expended_check_disjoint_prunes_for_positive_gamma():
    x = FuzzyList.from_elements(
        FuzzyItemset((FuzzyItem(0, 0),)), [element(1, 0.5, 10.0, 5.0)]
    )
    y = FuzzyList.from_elements(
        FuzzyItemset((FuzzyItem(1, 0),)), [element(2, 0.5, 10.0, 0.0)]
    )
    assert expended_check(x, y, 1e-9) is True
    assert expended_check(x, y, 0.0) is False  # 0 < 0 is false


def test_expended_check_covering_reduces_to_remaining_bound():
    x = FuzzyList.from_elements(
        FuzzyItemset((FuzzyItem(0, 0),)),
        [element(1, 0.5, 10.0, 5.0), element(2, 0.4, 10.0, 1.0)],
    )
    y = FuzzyList.from_elements(
        FuzzyItemset((FuzzyItem(1, 0),)),
        [element(1, 0.9, 2.0, 0.0), element(2, 0.9, 2.0, 0.0)],
    )
    total = x.sum_ifu + x.sum_rfu
    assert expended_check(x, y, total - 1e-6) is False
    assert expended_check(x, y, total + 1e-6) is True


def test_expended_prune_counted_and_sound(sample_db, bundled_mf):
    with_prune = mine(sample_db, bundled_mf, MinerConfig(gamma=60.0))
    assert with_prune.stats.pruned_by_expended > 0
    without = mine(
        sample_db, bundled_mf, MinerConfig(gamma=60.0, prune_expended=False)
    )
    assert helpers.maps_equal(
        helpers.result_map(with_prune), helpers.result_map(without)
    )


def test_same_base_siblings_never_join(sample_db, bundled_mf):
    # at gamma 0 every pair is joined except two regions of one base;
    # every visited multi-item node must therefore have distinct bases
    seen = []

    def hook(itemset, si, sr):
        seen.append(itemset)

    mine(sample_db, bundled_mf, MinerConfig(gamma=0.0), node_hook=hook)
    for s in seen:
        bases = [m.item for m in s]
        assert len(set(bases)) == len(bases)


def test_depth_first_memory_stays_below_whole_tree(sample_db, bundled_mf):
    from fuim.fuzzylist import ELEMENT_FOOTPRINT_BYTES

    total_constructed_elements = 0

    def hook(itemset, si, sr):
        pass

    result = mine(sample_db, bundled_mf, MinerConfig(gamma=0.0), node_hook=hook)
    # count every element the run ever produced (initial lists + joins)
    order = compute_order(sample_db, bundled_mf)
    lists = build_initial_lists(sample_db, bundled_mf, order, 0.0)
    initial = sum(len(l.elements) for l in lists)
    # peak live elements must be well below all-visited-nodes-at-once
    assert result.stats.peak_memory_estimate < (
        (initial + result.stats.visited_nodes * len(sample_db.transactions))
        * ELEMENT_FOOTPRINT_BYTES
    )
    assert result.stats.peak_memory_estimate >= initial * ELEMENT_FOOTPRINT_BYTES
