from collections import Counter
from fractions import Fraction

import pytest

from hiercache import (
    ChunkId,
    analytics,
    make_library,
    min_file_bytes,
    mirror_reconstruct,
    run_simulation,
    validate_config,
)
from hiercache.hierarchy import _multicast_set, chunk_table, place
from hiercache.model import make_partition, subsets, users_of_mirror
from conftest import LIBRARY_SEED


def simulate(k1, k2, n, t, alpha, demands, seed=LIBRARY_SEED):
    cfg = validate_config(k1, k2, n, t, alpha)
    library = make_library(cfg, min_file_bytes(cfg), seed)
    return cfg, library, run_simulation(cfg, library, demands)


@pytest.fixture(scope="module")
def reference_run():
    # K1=3, K2=2, N=6, t=2, alpha=1/2, distinct demands
    return simulate(3, 2, 6, 2, "1/2", (1, 2, 3, 4, 5, 6))


def test_placement_structure(reference_run):
    cfg, library, sim = reference_run
    lam1 = sim.placement.mirror_caches[0]
    coded = [s for s in lam1 if len(s.generators) > 1]
    plain = [s for s in lam1 if len(s.generators) == 1]
    assert len(coded) == 2  # one N-fold XOR per attached user slot
    assert {next(iter(s.generators)).slot for s in plain} == {(1, 2)}
    assert len(plain) == 6  # every file's block-covering chunk
    z1 = sim.placement.user_caches[0]
    slots = {next(iter(s.generators)).slot for s in z1}
    assert slots == {(1, 3), (1, 4), (1, 5), (1, 6)}
    assert len(z1) == 24


def test_cache_budgets_match_formulas(reference_run):
    cfg, library, sim = reference_run
    m1, m2 = analytics.memory_point(cfg)
    f = sim.partition.file_bytes
    for cache in sim.placement.mirror_caches:
        assert Fraction(sum(len(s.payload) for s in cache), f) == m1
    for cache in sim.placement.user_caches:
        assert Fraction(sum(len(s.payload) for s in cache), f) == m2


def test_server_message_counts(reference_run):
    _, _, sim = reference_run
    steps = Counter(m.step for m in sim.log.server_msgs)
    assert steps == {"SM1": 30, "SM3": 20}


def test_mirror_message_counts(reference_run):
    _, _, sim = reference_run
    steps = Counter(m.step for m in sim.log.mirror_msgs[0])
    assert steps == {"MU1": 12, "MU2": 16, "MU3": 2}


def test_measured_rates(reference_run):
    _, _, sim = reference_run
    assert sim.rates.r1 == Fraction(19, 6)
    assert sim.rates.r2_per_mirror == (Fraction(8, 5),) * 3
    assert sim.rates.r2_worst == Fraction(8, 5)


def test_all_users_decode(reference_run):
    _, library, sim = reference_run
    for user in range(1, 7):
        assert sim.decoded[user - 1] == library[sim.profile.demand_of(user) - 1]


def test_generator_count_invariants(reference_run):
    cfg, _, sim = reference_run
    for step, symbol in sim.log.server_msgs:
        expected = {"SM1": 1, "SM2": 2, "SM3": cfg.t + 1}[step]
        assert len(symbol.generators) == expected
    for m, msgs in enumerate(sim.log.mirror_msgs, start=1):
        block = users_of_mirror(cfg, m)
        for step, symbol in msgs:
            if step in ("MU1", "MU3"):
                assert len(symbol.generators) == 1
            else:
                covering = block <= set(_multicast_set(symbol))
                assert len(symbol.generators) == (cfg.k2 if covering else cfg.t + 1)


def test_repeated_demand_run_matches_reference_counts():
    cfg, library, sim = simulate(3, 2, 3, 2, "1/2", (1, 2, 1, 3, 2, 2))
    steps = Counter(m.step for m in sim.log.server_msgs)
    assert steps == {"SM1": 12, "SM2": 3, "SM3": 20}
    assert sim.rates.r1 == Fraction(115, 60)
    assert sim.rates.r2_per_mirror == (Fraction(8, 5), Fraction(8, 5), Fraction(16, 15))
    assert sim.rates.r2_worst == Fraction(8, 5)
    for user in range(1, 7):
        assert sim.decoded[user - 1] == library[sim.profile.demand_of(user) - 1]


def test_mirror_reconstruct_scope():
    cfg, library, sim = simulate(3, 2, 3, 2, "1/2", (1, 2, 1, 3, 2, 2))
    plan = mirror_reconstruct(
        cfg, 3, sim.placement.mirror_caches[2], sim.log.server_msgs, sim.profile, sim.partition
    )
    # mirror 3 serves only file 2: exactly its six layer-1 chunks
    assert set(plan.l1_chunks) == {ChunkId.l1(2, i) for i in range(1, 7)}
    chunks = chunk_table(cfg, library, sim.partition)
    for cid, payload in plan.l1_chunks.items():
        assert payload == chunks[cid]
    for cid, payload in plan.l2_cached.items():
        assert payload == chunks[cid]


def test_mirror_reconstruct_reference(reference_run):
    cfg, library, sim = reference_run
    plan = mirror_reconstruct(
        cfg, 1, sim.placement.mirror_caches[0], sim.log.server_msgs, sim.profile, sim.partition
    )
    chunks = chunk_table(cfg, library, sim.partition)
    assert set(plan.l1_chunks) == {ChunkId.l1(n, i) for n in (1, 2) for i in range(1, 7)}
    for cid, payload in plan.l1_chunks.items():
        assert payload == chunks[cid]
    assert len(plan.l2_forward) == 16  # every multicast meeting the block


def test_uncovered_block_cache_size():
    # per-user layer-2 cache at alpha=0: [C(3,1) - C(2,0)] * 4 / C(4,2) files
    cfg = validate_config(2, 2, 4, 2, 0)
    library = make_library(cfg, min_file_bytes(cfg), LIBRARY_SEED)
    partition = make_partition(cfg, len(library[0]))
    placement = place(cfg, library, partition)
    f = partition.file_bytes
    for cache in placement.user_caches:
        assert Fraction(sum(len(s.payload) for s in cache), f) == Fraction(8, 6)


def test_full_subset_parameter_degenerates():
    # t = K: no multicasts at all, layer-2 rides on MU3 alone
    cfg, library, sim = simulate(2, 2, 4, 4, 0, (1, 2, 3, 4))
    assert sim.rates.r1 == 0
    assert not any(m.step == "SM3" for m in sim.log.server_msgs)
    assert not any(m.step == "MU2" for msgs in sim.log.mirror_msgs for m in msgs)
    for user in range(1, 5):
        assert sim.decoded[user - 1] == library[sim.profile.demand_of(user) - 1]


def test_alpha_one_layer1_only():
    cfg, library, sim = simulate(2, 2, 4, 2, 1, (1, 2, 3, 4))
    assert all(m.step in ("SM1", "SM2") for m in sim.log.server_msgs)
    assert analytics.memory_point(cfg)[1] == 0
    for user in range(1, 5):
        assert sim.decoded[user - 1] == library[sim.profile.demand_of(user) - 1]


def test_more_files_than_users_alpha_zero():
    cfg, library, sim = simulate(2, 2, 7, 2, 0, (7, 7, 1, 3))
    for user in range(1, 5):
        assert sim.decoded[user - 1] == library[sim.profile.demand_of(user) - 1]


def test_single_user_blocks():
    # K2 = 1 collapses multicast relays to uncoded sends
    cfg, library, sim = simulate(3, 1, 3, 2, "1/2", (1, 2, 3))
    for user in range(1, 4):
        assert sim.decoded[user - 1] == library[sim.profile.demand_of(user) - 1]


def test_rate_agreement_across_t_and_alpha():
    for t in range(1, 7):
        for alpha in (Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(1)):
            cfg, library, sim = simulate(3, 2, 6, t, alpha, (1, 2, 3, 4, 5, 6))
            assert sim.rates.r1 == analytics.rate_r1(cfg)
            for m, r2 in enumerate(sim.rates.r2_per_mirror, start=1):
                assert r2 == analytics.rate_r2(cfg, sim.profile.mirror_counts[m - 1])
            for user in range(1, 7):
                assert sim.decoded[user - 1] == library[sim.profile.demand_of(user) - 1]


def test_subset_order_is_lexicographic():
    assert subsets(4, 2) == ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))
