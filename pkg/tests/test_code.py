import csv
import io
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hlrc.code import (
    CodeSpec,
    bound_branch,
    check_rho,
    distance_bound,
    distance_bound_value,
    generator_matrix,
    local_distance_terms,
    monomial_basis,
    param_report,
    rank,
    validate_spec,
)
from hlrc.errors import Condition2Violated, RhoOutOfRange
from hlrc.gf import make_field
from hlrc.surface import as_example_surface, kummer_example_surface

from conftest import built
from oracles import NaiveField, naive_generator


def test_as_p3_maxdim_parameters(as421):
    code, G, _ = as421
    assert (code.n, code.k, distance_bound(code)) == (60, 16, 8)
    assert G.rank == 16
    rep = param_report(code)
    assert rep.branch == "tie"
    assert (rep.n2, rep.k2, rep.d2) == (3, 2, 2)
    assert (rep.n1_lower, rep.k1, rep.d1) == (15, 4, 8)


@pytest.mark.parametrize("rho3,k,d", [(1, 16, 8), (2, 12, 16), (3, 8, 24), (4, 4, 32)])
def test_as_p3_rho3_sweep(rho3, k, d):
    code = validate_spec(CodeSpec(as_example_surface(3), 5, 4, 2, rho3))
    assert code.k == k and distance_bound(code) == d


def test_as_p3_533():
    code, G, _ = built("as3", (5, 2, 3), 5)
    assert code.k == 4 and distance_bound(code) == 33
    assert param_report(code).branch == "bezout"


def test_kummer_q5_parameters():
    S = kummer_example_surface(5)
    sharp = validate_spec(CodeSpec(S, None, 10, 6, 23))
    assert sharp.eta == 10 and sharp.k == 2 and distance_bound(sharp) == 1380
    assert validate_spec(CodeSpec(S, None, 10, 6, 22)).k == 3
    code, G, _ = built("kummer5", (6, 2, 1))
    assert code.k == 5 * 5 * 24 and G.rank == code.k
    assert distance_bound(code) == 20
    assert bound_branch(6, 2, 6, 4) == "bezout"


def test_kummer_rho1_below_lambda_rejected():
    with pytest.raises(RhoOutOfRange):
        validate_spec(CodeSpec(kummer_example_surface(5), None, 4, 2, 1))


@pytest.mark.parametrize("rho", [(1, 2, 1), (6, 2, 1), (4, 1, 1), (4, 4, 1), (4, 2, 0), (4, 2, 5)])
def test_rho_out_of_range(rho):
    with pytest.raises(RhoOutOfRange):
        validate_spec(CodeSpec(as_example_surface(3), 5, *rho))


def test_condition2():
    # s = 7 makes the Bezout term 3*2 - 7*1 = -1 negative
    with pytest.raises(Condition2Violated):
        check_rho(False, 5, 3, 7, 4, 2, 2, 1)
    warnings = check_rho(False, 5, 3, 7, 4, 2, 2, 1, waive_condition2=True)
    assert len(warnings) == 1 and "waived" in warnings[0]
    assert check_rho(False, 5, 3, 4, 4, 2, 2, 1) == []


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 12), st.integers(2, 7), st.integers(2, 7), st.integers(4, 20))
def test_condition2_equivalent_to_positive_bezout_term(eta, deg, rho1, s):
    rho1 = min(rho1, eta)
    for rho2 in range(2, deg + 1):
        _, bez = local_distance_terms(rho1, rho2, deg, s)
        try:
            check_rho(False, eta, deg, s, 1, rho1, rho2, 1)
            ok = True
        except Condition2Violated:
            ok = False
        assert ok == (bez >= 1)


def test_generator_matches_naive_evaluation(as421):
    code, G, _ = as421
    F = code.field
    N = NaiveField(F.p, F.h, F.modulus)
    pts = list(zip(code.evalset.xs.tolist(), code.evalset.ys.tolist(), code.evalset.zs.tolist()))
    assert G.rows.tolist() == naive_generator(N, list(G.basis), pts)


def test_basis_order():
    code = validate_spec(CodeSpec(as_example_surface(3), 5, 4, 2, 3))
    assert list(monomial_basis(code)) == [(i, j, k) for i in range(2) for j in range(2) for k in range(2)]


def test_rank_against_known_matrices():
    F = make_field(3, 2)
    assert rank(F, np.zeros((3, 4), dtype=np.int64)) == 0
    a = np.array([[1, 2, 3], [2, 4, 6], [0, 0, 5]])
    # second row is 2 * first row in GF(9)
    a[1] = F.vmul(2, a[0])
    assert rank(F, a) == 2
    assert rank(F, np.eye(4, dtype=np.int64)) == 4


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(2, 3), st.integers(1, 4))
def test_as_p3_codes_have_full_rank_and_formula_dimension(rho1, rho2, rho3):
    code = validate_spec(CodeSpec(as_example_surface(3), 5, rho1, rho2, rho3, waive_condition2=True))
    G = generator_matrix(code)
    assert G.rank == code.k == len(G.basis)
    assert code.k == (5 - rho1 + 1) * (3 - rho2 + 1) * (4 - rho3 + 1)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 9), st.integers(2, 5), st.integers(1, 6), st.integers(2, 9))
def test_bound_monotone_in_each_rho(rho1, rho2, rho3, s):
    deg = 5
    base = distance_bound_value(rho1, rho2, rho3, deg, s)
    assert distance_bound_value(rho1 + 1, rho2, rho3, deg, s) >= base
    if rho2 < deg:
        assert distance_bound_value(rho1, rho2 + 1, rho3, deg, s) >= base
    assert distance_bound_value(rho1, rho2, rho3 + 1, deg, s) >= base


def test_encode_agrees_with_encode_many(as421):
    _, G, _ = as421
    rng = np.random.default_rng(1)
    msgs = rng.integers(0, 9, (20, G.k))
    batch = G.encode_many(msgs)
    for m, w in zip(msgs, batch):
        assert np.array_equal(G.encode(m), w)
    with pytest.raises(ValueError):
        G.encode(np.zeros(G.k + 1, dtype=np.int64))


def test_encoding_is_linear(as421):
    code, G, _ = as421
    F = code.field
    rng = np.random.default_rng(2)
    a, b = rng.integers(0, 9, (2, G.k))
    c = int(rng.integers(1, 9))
    lhs = G.encode(F.vadd(F.vmul(c, a), b))
    rhs = F.vadd(F.vmul(c, G.encode(a)), G.encode(b))
    assert np.array_equal(lhs, rhs)


def test_exports(as421):
    code, G, _ = as421
    doc = json.loads(json.dumps(G.to_json_dict()))
    assert doc["rank"] == 16 and len(doc["rows"]) == 16 and len(doc["points"]) == 60
    assert doc["rows"][0][0] == [1, 0]
    rows = list(csv.reader(io.StringIO(G.to_csv())))
    assert len(rows) == 16 and all(len(r) == 60 for r in rows)
    assert [[int(v) for v in r] for r in rows] == G.rows.tolist()
    rep = param_report(code).to_dict()
    assert rep["k"] == 16 and rep["d_lower"] == 8 and rep["lower"] == {"n2": 3, "k2": 2, "d2": 2}
    assert "rate" in param_report(code).table()
