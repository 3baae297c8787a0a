import json

import numpy as np
import pytest

from qcommlab import engine, linalg, ranklab, zoo
from qcommlab.errors import FamilyHypothesisError, PatternMismatchError


def test_build_comm_matrix_tables():
    eq2 = ranklab.build_comm_matrix("EQ", 2)
    assert np.array_equal(eq2.values, np.eye(4))
    disj2 = ranklab.build_comm_matrix("DISJ", 2)
    assert int(disj2.values.sum()) == 9
    int1 = ranklab.build_comm_matrix("INT", 1)
    assert np.array_equal(int1.values, [[0, 0], [0, 1]])
    neq2 = ranklab.build_comm_matrix("NEQ", 2)
    assert np.array_equal(neq2.values, 1 - eq2.values)
    with pytest.raises(ValueError):
        ranklab.build_comm_matrix("MAJ", 2)
    with pytest.raises(ValueError):
        ranklab.build_comm_matrix("EQ", 11)


def test_verify_witness_accepts_and_ranks():
    w = ranklab.verify_ndet_witness(np.eye(8), ranklab.build_comm_matrix("EQ", 3))
    assert w.rank == 8
    m = ranklab.canonical_witness("NEQ", 3)
    w = ranklab.verify_ndet_witness(m, ranklab.build_comm_matrix("NEQ", 3))
    assert w.rank == 2
    assert linalg.exact_rank(m) == 2
    obj = json.loads(w.to_json())
    assert obj == {"target": "NEQ", "n": 3, "rank": 2, "pattern_ok": True,
                   "counterexamples": []}


def test_verify_witness_rejects_with_counterexamples():
    with pytest.raises(PatternMismatchError) as err:
        ranklab.verify_ndet_witness(np.ones((4, 4)),
                                    ranklab.build_comm_matrix("EQ", 2))
    assert len(err.value.counterexamples) == 12


def test_eq_fullrank_audit():
    for n, trials in [(1, 10), (3, 100), (4, 100)]:
        rep = ranklab.eq_fullrank_audit(n, trials, seed=7)
        assert rep.ok and rep.trials == trials
        assert rep.detail["expected_rank"] == 2 ** n


def test_disj_ordering_triangularizes():
    rows, cols = ranklab.disj_ordering(2)
    disj = ranklab.build_comm_matrix("DISJ", 2).values
    perm = disj[np.ix_(rows, cols)]
    assert np.all(np.diag(perm) == 1)
    assert np.all(np.tril(perm, -1) == 0)


def test_disj_triangular_audit():
    for n, trials in [(1, 10), (2, 50), (4, 100)]:
        rep = ranklab.disj_triangular_audit(n, trials, seed=5)
        assert rep.ok, rep.failures
    obj = json.loads(rep.to_json())
    assert obj["ok"] is True


def test_scalarize_rejects_family_violating_hypothesis():
    # e_x (x) e_y is never zero, so it cannot witness EQ's 0-set
    a = np.zeros((1, 2, 2))
    b = np.zeros((1, 2, 2))
    for v in range(2):
        a[0, v, v] = 1.0
        b[0, v, v] = 1.0
    with pytest.raises(FamilyHypothesisError):
        ranklab.lemma2_scalarize(a, b, ranklab.build_comm_matrix("EQ", 1))


def test_scalarize_difference_family_for_neq():
    # a_1(x) = x, b_1(y) = 1, a_2(x) = 1, b_2(y) = -y: sum = x - y
    a = np.zeros((2, 2, 1))
    b = np.zeros((2, 2, 1))
    for v in range(2):
        a[0, v, 0] = v
        b[0, v, 0] = 1.0
        a[1, v, 0] = 1.0
        b[1, v, 0] = -v
    trial = ranklab.lemma2_scalarize(a, b, ranklab.build_comm_matrix("NEQ", 1),
                                     seed=3)
    assert trial.success and trial.witness.rank <= 2
    assert np.all(trial.alpha >= 1.0) and np.all(trial.alpha < 2.0)


def test_scalarize_seeded_success_rate():
    t = ranklab.build_comm_matrix("NEQ", 2)
    p = zoo.ndet_svd_protocol(ranklab.canonical_witness("NEQ", 2)).protocol
    d = {xi: engine.yao_kremer_decompose(p, xi, 0).output_components()[0]
         for xi in range(4)}
    count = 1 << p.declared_cost
    a_tab = np.stack([np.stack([d[xi][i] for xi in range(4)])
                      for i in range(count)])
    b_tab = np.stack([np.stack(
        [engine.yao_kremer_decompose(p, 0, yi).output_components()[1][i]
         for yi in range(4)]) for i in range(count)])
    hits = 0
    for seed in range(100):
        trial = ranklab.lemma2_scalarize(a_tab, b_tab, t, seed=seed)
        hits += trial.success and trial.attempt == 0
    assert hits >= 99


def test_protocol_to_witness_rank_bounds():
    for fn, n in [("EQ", 2), ("NEQ", 2), ("INT", 4)]:
        target = ranklab.build_comm_matrix(fn, n)
        p = zoo.ndet_svd_protocol(ranklab.canonical_witness(fn, n)).protocol
        w = ranklab.protocol_to_witness(p, target, seed=1)
        assert w.rank <= 2 ** (p.declared_cost - 1), (fn, n)
        assert w.target.name == fn


def test_protocol_to_witness_trivial_eq2_is_tight():
    target = ranklab.build_comm_matrix("EQ", 2)
    p = zoo.trivial_exact_protocol(target)
    w = ranklab.protocol_to_witness(p, target, seed=2)
    assert w.rank == 4  # full rank forces cost >= n + 1


def test_protocol_to_witness_always_accept():
    lay = engine.RegisterLayout(0, 1, 0)
    x_gate = np.array([[0.0, 1.0], [1.0, 0.0]])
    p = engine.Protocol(lay, (engine.ProtocolStep(
        engine.ALICE, (0,), lambda b: [engine.Gate(x_gate, (0,))]),),
        input_bits=1)
    ones = ranklab.CommMatrix(1, "custom", np.ones((2, 2), dtype=int))
    w = ranklab.protocol_to_witness(p, ones, seed=0)
    assert w.rank == 1


def test_protocol_to_witness_requires_matching_pattern():
    p = zoo.trivial_exact_protocol(ranklab.build_comm_matrix("EQ", 2))
    with pytest.raises(ValueError):
        ranklab.protocol_to_witness(p, ranklab.build_comm_matrix("DISJ", 2))


def test_is_and_dependent():
    disj = engine.acceptance_matrix(
        zoo.trivial_exact_protocol(ranklab.build_comm_matrix("DISJ", 2)))
    assert ranklab.is_and_dependent(disj)
    eq = engine.acceptance_matrix(
        zoo.trivial_exact_protocol(ranklab.build_comm_matrix("EQ", 2)))
    assert not ranklab.is_and_dependent(eq)
    half = engine.AcceptanceMatrix(n=2, values=np.full((4, 4), 0.5))
    assert ranklab.is_and_dependent(half)


def test_fold_constant_one():
    am = engine.AcceptanceMatrix(n=2, values=np.ones((4, 4)))
    poly = ranklab.fold_to_polynomial(am)
    assert poly.coeffs[0] == 1.0 and np.all(poly.coeffs[1:] == 0.0)


def test_fold_nor_pattern_small():
    am = engine.AcceptanceMatrix(n=1, values=np.array([[1.0, 1.0],
                                                       [1.0, 0.0]]))
    poly = ranklab.fold_to_polynomial(am)
    assert np.allclose(poly.coeffs, [1.0, -1.0])


def test_fold_common_ones_fraction():
    xs = np.arange(4)[:, None]
    ys = np.arange(4)[None, :]
    vals = np.vectorize(lambda v: bin(v).count("1") / 2.0)(xs & ys)
    am = engine.AcceptanceMatrix(n=2, values=vals)
    poly = ranklab.fold_to_polynomial(am)
    assert sorted(poly.coeffs) == [0.0, 0.0, 0.5, 0.5]
    rep = ranklab.monomial_rank_audit(am)
    assert rep == (2, 2, True)


def test_monomial_rank_on_disj_pattern():
    am = engine.AcceptanceMatrix(
        n=2, values=ranklab.build_comm_matrix("DISJ", 2).values.astype(float))
    poly = ranklab.fold_to_polynomial(am)
    assert np.allclose(poly.coeffs, [1, -1, -1, 1])
    rep = ranklab.monomial_rank_audit(am)
    assert rep == (4, 4, True)


def test_monomial_rank_random_and_dependent():
    rng = np.random.default_rng(21)
    for n in (2, 3, 4, 5):
        for _ in range(10):
            am = ranklab.random_and_dependent_acceptance(n, rng)
            rep = ranklab.monomial_rank_audit(am)
            assert rep.ok, (n, rep)


def test_nor_approx_audit():
    disj = engine.AcceptanceMatrix(
        n=2, values=ranklab.build_comm_matrix("DISJ", 2).values.astype(float))
    rep = ranklab.nor_approx_audit(ranklab.fold_to_polynomial(disj), 1 / 3)
    assert rep.ok and rep.max_error == 0.0
    assert rep.predicted_monomial_lower_bound == pytest.approx(2 ** (2 / 12) ** 0.5)
    zero = ranklab.FoldedPolynomial(n=1, coeffs=np.zeros(2))
    assert not ranklab.nor_approx_audit(zero, 1 / 3).ok
    obj = json.loads(rep.to_json())
    assert obj["ok"] is True
