import numpy as np
import pytest

from hlrc.errors import EmptyGammaSet, InvalidSurface, LambdaDivisibleByCharacteristic, UnsupportedLHS
from hlrc.gf import AdditiveLHS, make_field
from hlrc.surface import (
    ArtinSchreierSurface,
    BivariatePoly,
    KummerProductForm,
    KummerSurface,
    as_example_surface,
    evaluation_set,
    fiber_points,
    gamma_set,
    hermitian_cone_surface,
    kummer_example_surface,
    max_eta,
    specialize,
)

from oracles import NaiveField, as_example_points, kummer_points


def _naive(F):
    return NaiveField(F.p, F.h, F.modulus)


def _triples(T):
    return list(zip(T.xs.tolist(), T.ys.tolist(), T.zs.tolist()))


@pytest.mark.parametrize("eta", [1, 3, 5, 6])
def test_as_p3_evaluation_set_matches_enumeration(eta):
    S = as_example_surface(3)
    gammas, points = as_example_points(_naive(S.field), eta)
    if not gammas:
        with pytest.raises(EmptyGammaSet):
            evaluation_set(S, eta)
        return
    T = evaluation_set(S, eta)
    assert [g.value for g in T.gammas] == gammas
    assert _triples(T) == points


def test_as_p3_sizes():
    S = as_example_surface(3)
    T = evaluation_set(S, 5)
    assert len(T.gammas) == 4
    assert T.n == 60
    assert T.per_gamma_counts == [15] * 4
    assert list(T.x_images) == [5] * 4
    assert max_eta(S) == 5
    assert S.cover_degree == 3 and S.s == 4


def test_as_p5_sizes():
    S = as_example_surface(5)
    assert max_eta(S) == 9
    T = evaluation_set(S, 9)
    assert len(T.gammas) == 16
    assert T.n == 720
    assert len(gamma_set(S, 5)) == 24


def test_kummer_q2_matches_enumeration():
    S = kummer_example_surface(2)
    F = S.field
    form = S.f
    gammas, points = kummer_points(_naive(F), S.lam, form.c.value, form.h, form.nu,
                                   [a.value for a in form.roots], 1)
    T = evaluation_set(S, 1)
    assert [g.value for g in T.gammas] == gammas
    assert _triples(T) == points
    assert T.per_gamma_counts == [6, 6, 6]
    assert list(T.x_images) == [2, 2, 2]


def test_kummer_small_custom_surface_matches_enumeration():
    F = make_field(7)
    form = KummerProductForm(F, F.element(3), 1, 1, (F.element(1), F.element(2)))
    S = KummerSurface(F, 6, form)
    for eta in (1, 2, 3):
        gammas, points = kummer_points(_naive(F), 6, 3, 1, 1, [1, 2], eta)
        if not gammas:
            with pytest.raises(EmptyGammaSet):
                evaluation_set(S, eta)
            continue
        T = evaluation_set(S, eta)
        assert [g.value for g in T.gammas] == gammas
        assert _triples(T) == points


def test_kummer_q5_sizes():
    S = kummer_example_surface(5)
    assert S.lam == 6 and S.s == 4 and S.f.h == 2 and S.f.nu == 2
    assert max_eta(S) == 10
    T = evaluation_set(S, 10)
    assert len(T.gammas) == 24
    assert T.n == 1440
    assert set(T.per_gamma_counts) == {60}


def test_hermitian_cone_sizes():
    S = hermitian_cone_surface(2)
    T = evaluation_set(S, 4)
    assert len(T.gammas) == 4 and T.n == 32
    assert S.cover_degree == 2 and S.s == 3


def test_specialize_examples():
    S = as_example_surface(3)
    F = S.field
    # x^4 * 1 + x^2 * 1 at gamma = 1
    assert [c.value for c in specialize(S.f, F.one)] == [0, 0, 1, 0, 1]
    assert specialize(S.f, F.zero) == []
    K = kummer_example_surface(5)
    G = K.field
    m1 = G.from_int(-1)
    # -x^2 (x^2 + 1) at gamma = 1
    assert specialize(K.f, G.one) == [G.zero, G.zero, m1, G.zero, m1]


def test_lower_groups_share_x_and_z():
    T = evaluation_set(as_example_surface(3), 5)
    for g in np.unique(T.lower):
        idx = np.flatnonzero(T.lower == g)
        assert len(set(T.xs[idx].tolist())) == 1
        assert len(set(T.zs[idx].tolist())) == 1
        assert idx.size == 3
        assert np.all(np.diff(idx) == 1)
    assert np.all(T.zs == np.array([T.gammas[m].value for m in T.middle]))


def test_points_lie_on_surface():
    for S, eta in ((as_example_surface(3), 5), (kummer_example_surface(5), 10), (hermitian_cone_surface(2), 4)):
        T = evaluation_set(S, eta)
        assert not np.any(S.residual(T.xs, T.ys, T.zs))


def test_kummer_fiber_flags_ramified_points():
    S = kummer_example_surface(5)
    fp = fiber_points(S, S.field.one)
    assert fp.ramified
    assert all(y == S.field.zero for _, y in fp.ramified)
    assert len(fp.x_image) == 10
    assert len(fp.points) - len(fp.ramified) == 60


def test_gamma_set_empty():
    with pytest.raises(EmptyGammaSet):
        gamma_set(as_example_surface(3), 6)


def test_invalid_surfaces():
    F = make_field(3, 2)
    low = BivariatePoly.from_dict(F, {(3, 1): 1})
    with pytest.raises(InvalidSurface):
        ArtinSchreierSurface(F, low)
    assert ArtinSchreierSurface(F, low, relaxed_degree=True).s == 3
    with pytest.raises(UnsupportedLHS):
        ArtinSchreierSurface(F, BivariatePoly.from_dict(F, {(5, 1): 1}), AdditiveLHS(4, -1))
    G = make_field(5, 2)
    with pytest.raises(InvalidSurface):
        KummerProductForm(G, G.one, 1, 0, (G.one, G.one))
    with pytest.raises(InvalidSurface):
        KummerProductForm(G, G.one, 1, 0, (G.zero,))
    with pytest.raises(InvalidSurface):
        KummerProductForm(G, G.zero, 0, 0, (G.one,))
    with pytest.raises(InvalidSurface):
        KummerProductForm(G, G.one, 2, 0, ())  # no linear factor
    form = KummerProductForm(G, G.one, 1, 1, (G.one,))
    with pytest.raises(LambdaDivisibleByCharacteristic):
        KummerSurface(G, 5, form)
    with pytest.raises(InvalidSurface):
        KummerSurface(G, 7, form)
    big = KummerProductForm(G, G.one, 3, 0, tuple(G.elements()[1:4]))
    with pytest.raises(InvalidSurface):
        KummerSurface(G, 6, big)  # mu = 6 is not below lambda


def test_kummer_example_needs_q_2_mod_3():
    with pytest.raises(InvalidSurface):
        kummer_example_surface(3)


def test_export_rows():
    T = evaluation_set(hermitian_cone_surface(2), 4)
    rows = T.rows()
    assert len(rows) == 32 and rows[0]["index"] == 0
    assert all(len(r["x"]) == 2 for r in rows)
