import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hlrc.code import GeneratorMatrix, distance_bound
from hlrc.errors import BoundViolated, BudgetExceeded
from hlrc.gf import make_field
from hlrc.verify import (
    EXHAUSTIVE,
    SAMPLED,
    DistanceResult,
    WeightEngine,
    check_as_census,
    check_bound,
    check_point_counts,
    combine,
    fiber_product_search,
    low_weight_search,
    min_distance_exhaustive,
    min_weight_sampled,
    normalization_count,
    product_message,
    projective_message_count,
    projective_point_count,
    sharpness_witness,
    sparse_search,
)

from conftest import built
from oracles import NaiveField, naive_min_distance

TINY = [
    ("as3", (5, 2, 4), 5),
    ("as3", (4, 3, 4), 5),
    ("as3", (5, 3, 3), 5),
    ("herm2", (3, 2, 3), 4),
    ("herm2", (4, 2, 2), 4),
]


def _naive_d(code, G):
    F = code.field
    return naive_min_distance(NaiveField(F.p, F.h, F.modulus), G.rows.tolist())


@pytest.mark.parametrize("inst", TINY)
def test_exhaustive_matches_naive_enumeration(inst):
    code, G, _ = built(*inst)
    res = min_distance_exhaustive(G)
    assert res.mode == EXHAUSTIVE
    assert res.measured_min_weight == _naive_d(code, G)
    assert res.evaluated == projective_message_count(code.field.q, G.k)
    for w in res.witnesses:
        assert np.count_nonzero(G.encode(w)) == res.measured_min_weight
    assert res.measured_min_weight >= distance_bound(code)


@pytest.mark.slow
def test_as_533_true_distance_against_oracle():
    code, G, _ = built("as3", (5, 2, 3), 5)
    res = min_distance_exhaustive(G)
    assert res.evaluated == 820
    assert res.measured_min_weight == 36 == _naive_d(code, G)
    assert check_bound(res, code).detail["slack"] == 3


def test_frozen_exhaustive_distances():
    code, G, _ = built("as3", (4, 2, 4), 5)
    assert min_distance_exhaustive(G).measured_min_weight == 38
    assert distance_bound(code) == 32
    code, G, _ = built("kummer5", (10, 6, 23))
    res = min_distance_exhaustive(G)
    assert res.evaluated == 26 and res.measured_min_weight == 1380 == distance_bound(code)


def test_k1_code_has_distance_n():
    code, G, _ = built("as3", (5, 3, 4), 5)
    assert G.k == 1
    assert min_distance_exhaustive(G).measured_min_weight == code.n == 60


def test_budget():
    _, G, _ = built("as3", (5, 2, 3), 5)
    with pytest.raises(BudgetExceeded):
        min_distance_exhaustive(G, budget=819)
    assert min_distance_exhaustive(G, budget=820).measured_min_weight == 36


def test_zero_column_rejected():
    _, G, _ = built("as3", (5, 3, 4), 5)
    rows = G.rows.copy()
    rows[:, 3] = 0
    bad = GeneratorMatrix(G.field, G.basis, G.evalset, rows, G.rank)
    with pytest.raises(ValueError):
        WeightEngine(bad)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_scalar_invariance(seed):
    _, G, _ = built("as3", (4, 2, 1), 5)
    F = G.field
    rng = np.random.default_rng(seed)
    msgs = rng.integers(0, F.q, (8, G.k))
    c = int(rng.integers(1, F.q))
    eng = WeightEngine(G)
    assert np.array_equal(eng.weights(msgs), eng.weights(F.vmul(c, msgs)))
    assert eng.weights(msgs).tolist() == [int(np.count_nonzero(G.encode(m))) for m in msgs]


@pytest.mark.parametrize("inst", TINY[:3] + [("as3", (5, 2, 3), 5)])
def test_sampled_never_below_exhaustive(inst):
    _, G, _ = built(*inst)
    d = min_distance_exhaustive(G).measured_min_weight
    s = min_weight_sampled(G, 500, seed=3)
    assert s.mode == SAMPLED and s.measured_min_weight >= d and s.evaluated == 500


def test_sampling_is_deterministic():
    _, G, _ = built("as3", (4, 2, 1), 5)
    a, b = min_weight_sampled(G, 1, seed=9), min_weight_sampled(G, 1, seed=9)
    assert a == b and a.evaluated == 1
    with pytest.raises(ValueError):
        min_weight_sampled(G, 0)


def test_sparse_search_is_exact_on_two_term_messages():
    code, G, _ = built("as3", (5, 2, 3), 5)
    F = G.field
    best = min(np.count_nonzero(G.rows, axis=1))
    for r, s in itertools.combinations(range(G.k), 2):
        for c in range(1, F.q):
            m = np.zeros(G.k, dtype=np.int64)
            m[r], m[s] = 1, c
            best = min(best, int(np.count_nonzero(G.encode(m))))
    res = sparse_search(G)
    assert res.measured_min_weight == best
    for w in res.witnesses:
        assert np.count_nonzero(G.encode(w)) == best


def test_combine_and_export():
    a = DistanceResult(SAMPLED, 10, ((1, 0),), 5, 0, "uniform")
    b = DistanceResult(EXHAUSTIVE, 9, ((0, 1),), 3, None, "exhaustive")
    c = combine([a, b])
    assert c.mode == EXHAUSTIVE and c.measured_min_weight == 9 and c.evaluated == 8
    assert c.witnesses == ((0, 1),)
    assert json.loads(json.dumps(c.to_dict()))["witnesses"] == [[0, 1]]


def test_bound_violation_is_a_hard_failure(as421):
    code, _, _ = as421
    fake = DistanceResult(SAMPLED, 7, ((1,) + (0,) * 15,), 1, 0, "fabricated")
    with pytest.raises(BoundViolated) as info:
        check_bound(fake, code)
    record = info.value.record
    assert record.verdict == "FAIL" and record.measured == 7 and record.expected == 8
    assert record.detail["witnesses"]


def test_sampled_audit_passes_on_golden_as(as421):
    code, G, _ = as421
    record = check_bound(low_weight_search(G, code, 2000, seed=0), code)
    assert record.passed and record.measured >= 8
    assert set(json.loads(record.to_json())) == {"claim", "source", "expected", "measured", "verdict", "detail"}


def test_sharpness_witness():
    code, G, _ = built("kummer5", (10, 6, 23))
    rec = sharpness_witness(G, code)
    assert rec.passed and rec.measured == rec.expected == 1380


def test_product_message_encodes_the_product():
    code, G, _ = built("as3", (4, 2, 2), 5)
    F = G.field
    px, py, pz = [2, 1], [1, 1], [3, 1]
    word = G.encode(product_message(G, px, py, pz))
    ev = code.evalset
    ev_poly = lambda c, v: F.vadd(c[0], F.vmul(c[1], v))
    expected = F.vmul(F.vmul(ev_poly(px, ev.xs), ev_poly(py, ev.ys)), ev_poly(pz, ev.zs))
    assert np.array_equal(word, expected)


def test_kummer_maxdim_low_weight_word(kummer621):
    # frozen regression: a product word of weight 20 meets the general bound exactly
    code, G, _ = kummer621
    res = fiber_product_search(G, code)
    assert res.measured_min_weight == 20 == distance_bound(code)
    for w in res.witnesses:
        assert np.count_nonzero(G.encode(w)) == 20


@pytest.mark.parametrize("q,value", [(2, 9), (5, 64)])
def test_projective_point_counts(q, value):
    results = check_point_counts(q)
    assert len(results) == 5 * (q * q - 1)
    assert all(r.match for r in results)
    proj = {r.counted for r in results if r.label.endswith("projective")}
    assert proj == {value}
    assert normalization_count(q, value)[0] == normalization_count(q, value)[1]


def test_projective_count_q2_by_brute_force():
    # direct enumeration of all 21 points of P^2(F_4), no canonical-representative shortcut
    F = make_field(2, 2)
    for g in range(1, 4):
        reps = set()
        for x, y, w in itertools.product(range(4), repeat=3):
            if not (x or y or w):
                continue
            val = F.iadd(F.iadd(F.ipow(y, 3), F.imul(g, F.imul(F.ipow(x, 2), w))),
                         F.imul(F.ipow(g, 2), F.imul(x, F.ipow(w, 2))))
            if val == 0:
                lead = next(v for v in (w, y, x) if v)
                inv = F.iinv(lead)
                reps.add((F.imul(inv, x), F.imul(inv, y), F.imul(inv, w)))
        assert len(reps) == projective_point_count(F, g, 1) == 9


def test_q5_fiber_census():
    results = check_point_counts(5, gammas=[1, 7])
    by_label = {r.label.split(" ", 2)[2]: r.counted for r in results if "gamma=7" in r.label}
    assert by_label["|T_gamma|"] == 60 and by_label["|pi_x|"] == 10


def test_point_count_argument_checks():
    with pytest.raises(ValueError):
        check_point_counts(3)
    with pytest.raises(ValueError):
        check_point_counts(2, gammas=[0])


@pytest.mark.parametrize("p,gamma_size,t", [(3, 4, 60), (5, 16, 720)])
def test_as_census(p, gamma_size, t):
    rec = check_as_census(p)
    assert rec.passed
    assert rec.measured["gamma_size"] == gamma_size and rec.measured["T"] == t
    if p == 3:
        assert len(rec.measured["excluded_nonzero"]) == 4
