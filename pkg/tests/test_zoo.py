import math

import numpy as np
import pytest

from qcommlab import engine, linalg, ranklab, zoo


def test_trivial_protocols_match_tables():
    for fn, n in [("EQ", 2), ("DISJ", 2), ("INT", 2)]:
        t = ranklab.build_comm_matrix(fn, n)
        p = zoo.trivial_exact_protocol(t)
        assert p.declared_cost == n + 1
        am = engine.acceptance_matrix(p)
        assert np.array_equal(am.values, t.values.astype(float)), fn
    disj = engine.acceptance_matrix(
        zoo.trivial_exact_protocol(ranklab.build_comm_matrix("DISJ", 2)))
    assert int(disj.values.sum()) == 9  # pairs with x AND y = 0
    intm = engine.acceptance_matrix(
        zoo.trivial_exact_protocol(ranklab.build_comm_matrix("INT", 2)))
    assert np.array_equal(intm.values, 1.0 - disj.values)


def test_svd_protocol_eq4_cost_and_pattern():
    bundle = zoo.ndet_svd_protocol(np.eye(16))
    assert bundle.r == 16
    assert bundle.protocol.declared_cost == 5
    am = engine.acceptance_matrix(bundle.protocol)
    assert np.array_equal(am.values > 1e-9,
                          ranklab.build_comm_matrix("EQ", 4).values == 1)


def test_svd_protocol_neq3_rank_two_cost_two():
    m = ranklab.canonical_witness("NEQ", 3)
    assert linalg.exact_rank(m) == 2
    bundle = zoo.ndet_svd_protocol(m)
    assert bundle.r == 2 and bundle.protocol.declared_cost == 2
    am = engine.acceptance_matrix(bundle.protocol)
    assert np.array_equal(am.values > 1e-9,
                          ranklab.build_comm_matrix("NEQ", 3).values == 1)


def test_svd_protocol_int_costs_log_n_plus_1():
    for n in (2, 4, 8):
        m = ranklab.canonical_witness("INT", n)
        bundle = zoo.ndet_svd_protocol(m)
        assert bundle.r == n
        assert bundle.protocol.declared_cost == int(math.log2(n)) + 1


def test_svd_protocol_acceptance_formula():
    for fn, n in [("EQ", 2), ("NEQ", 2), ("INT", 2), ("DISJ", 2),
                  ("INT", 4)]:
        m = ranklab.canonical_witness(fn, n)
        bundle = zoo.ndet_svd_protocol(m)
        am = engine.acceptance_matrix(bundle.protocol)
        pred = bundle.per_row_norm[:, None] ** 2 * np.abs(m) ** 2
        assert np.max(np.abs(am.values - pred)) <= 1e-9, (fn, n)


def test_svd_protocol_dead_rows_reject_exactly():
    m = ranklab.canonical_witness("INT", 2)  # row 0 all zero
    bundle = zoo.ndet_svd_protocol(m)
    assert bundle.per_row_norm[0] == 0.0
    am = engine.acceptance_matrix(bundle.protocol)
    assert np.all(am.values[0] == 0.0)


def test_svd_protocol_all_zero_matrix():
    bundle = zoo.ndet_svd_protocol(np.zeros((4, 4)))
    assert bundle.r == 0 and bundle.protocol.declared_cost == 0
    am = engine.acceptance_matrix(bundle.protocol)
    assert np.all(am.values == 0.0)


def test_grover_exact_on_four_states():
    st = zoo.grover_state(zoo._uniform_prepare(2), [1], 1)
    assert abs(abs(st[1]) ** 2 - 1.0) <= 1e-9


def test_qsearch_empty_predicate_returns_none():
    cfg = zoo.QSearchConfig(rng_seed=1, max_applications=50)
    res = zoo.qsearch(zoo._uniform_prepare(2), [], cfg)
    assert res.outcome is None


def test_qsearch_single_solution_success_floor():
    for n in (4, 16, 64):
        k = int(math.log2(n))
        hits = 0
        for s in range(200):
            res = zoo.qsearch(zoo._uniform_prepare(k), [n - 1],
                              zoo.QSearchConfig(rng_seed=s))
            assert res.outcome in (None, n - 1)
            hits += res.outcome is not None
        assert hits / 200 >= 0.5, n


def test_qsearch_reproducible():
    cfg = zoo.QSearchConfig(rng_seed=123)
    a = zoo.qsearch(zoo._uniform_prepare(3), [5], cfg)
    b = zoo.qsearch(zoo._uniform_prepare(3), [5], cfg)
    assert a == b


def test_distributed_and_oracle_tables():
    frag = zoo.distributed_and_oracle([0], "1", "1")
    assert frag.cost == 2 and frag.flips(0)
    frag = zoo.distributed_and_oracle(range(4), "0010", "0110")
    assert frag.cost == 2 * (2 + 1)
    assert frag.flips(2) and not frag.flips(1)
    u = frag.unitary
    assert linalg.is_unitary(u)
    # basis action: |i=2,b=0> -> |i=2,b=1>
    v = np.zeros(8)
    v[2 << 1] = 1.0
    assert np.argmax(u @ v) == (2 << 1 | 1)


def test_bcw_intersection_examples():
    hits = 0
    for s in range(200):
        res = zoo.bcw_intersection("0010", "0010", zoo.QSearchConfig(rng_seed=s))
        assert res.index in (None, 2)
        hits += res.index == 2
    assert hits / 200 >= 0.5
    res = zoo.bcw_intersection("1100", "0011", zoo.QSearchConfig(rng_seed=9))
    assert res.index is None


def test_bcw_intersection_n1_cost_two():
    res = zoo.bcw_intersection("1", "1", zoo.QSearchConfig(rng_seed=0))
    assert (res.index, res.cost) == (0, 2)
    res = zoo.bcw_intersection("1", "0", zoo.QSearchConfig(rng_seed=0))
    assert (res.index, res.cost) == (None, 2)


def test_bcw_intersection_padding_never_creates_solutions():
    for s in range(50):
        res = zoo.bcw_intersection("11010", "00100",
                                   zoo.QSearchConfig(rng_seed=s))
        assert res.index in (None, 2)


def test_recursive_intersection_delegates_when_block_covers_input():
    rcfg = zoo.RecursionConfig(block_size_rule=lambda n: 16)
    for s in range(25):
        cfg = zoo.QSearchConfig(rng_seed=s)
        a = zoo.recursive_intersection("0010011000010001", "0110000001010001",
                                       rcfg, cfg)
        b = zoo.bcw_intersection("0010011000010001", "0110000001010001", cfg)
        assert (a.index, a.cost) == (b.index, b.cost)


def test_recursive_intersection_single_common_index():
    rcfg = zoo.RecursionConfig(base_threshold=16)
    assert rcfg.block_size_rule(64) == 36
    x = ["0"] * 64
    x[42] = "1"
    x = "".join(x)
    hits = 0
    for s in range(200):
        res = zoo.recursive_intersection(x, x, rcfg,
                                         zoo.QSearchConfig(rng_seed=s))
        assert res.index in (None, 42)
        hits += res.index == 42
    assert hits / 200 >= 0.5


def test_recursive_intersection_one_sided():
    rcfg = zoo.RecursionConfig(base_threshold=16)
    rng = np.random.default_rng(17)
    for _ in range(20):
        x = rng.integers(0, 2, size=64)
        y = rng.integers(0, 2, size=64)
        res = zoo.recursive_intersection(x, y, rcfg,
                                         zoo.QSearchConfig(rng_seed=3))
        if res.index is not None:
            assert x[res.index] & y[res.index]


def test_cost_model_values():
    assert zoo.cost_model(1) == 2.0
    # forced single block at n = 16: one level of the recursion formula
    rcfg = zoo.RecursionConfig(base_threshold=2,
                               block_size_rule=lambda n: 16)
    want = (math.sqrt(16) / 4.0) * (zoo.bcw_cost_model(16) + 1.0 * 4.0)
    assert zoo.cost_model(16, rcfg) == pytest.approx(want)


def test_cost_model_monotone():
    prev = 0.0
    for n in list(range(1, 300)) + [2 ** i for i in range(9, 65)]:
        c = zoo.cost_model(n)
        assert c >= prev - 1e-9, n
        prev = c


def test_cost_envelope_fit():
    ns = [2 ** 4, 2 ** 8, 2 ** 16, 2 ** 32, 2 ** 64]
    fit = zoo.fit_cost_envelope(ns)
    assert fit.monotone
    assert fit.c <= 16
    for r, s in zip(fit.ratios, fit.log_stars):
        assert r <= fit.kappa * fit.c ** s + 1e-9


def test_log_star():
    assert zoo.log_star(2) == 1
    assert zoo.log_star(16) == 3
    assert zoo.log_star(2 ** 16) == 4
    assert zoo.log_star(2 ** 64) == 5


def test_qsearch_config_validation():
    with pytest.raises(ValueError):
        zoo.QSearchConfig(rng_seed=0, schedule_growth=2.5)
    with pytest.raises(ValueError):
        zoo.QSearchConfig(rng_seed=0, max_applications=0)
    with pytest.raises(ValueError):
        zoo.RecursionConfig(base_threshold=1)


def test_protocol_corpus_costs():
    for n in (1, 2):
        for entry in zoo.protocol_corpus(n):
            if entry.name.startswith("trivial"):
                assert entry.protocol.declared_cost == n + 1
