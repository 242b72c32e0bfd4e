import pytest
from hypothesis import given, strategies as st

from conftest import OMEGA, SL2, ident, multiloop
from oracles import tensor_fixed_space_dim_and_basis
from loomalg.algcore import AlgEndo
from loomalg.descent import (GaloisCocycle, GaloisElement, act_on_poly, character, check_cocycle,
                             cocycle_from_sigma, compare_with_multiloop, fixed_point_elements,
                             fixed_points, galois_group, is_fixed)
from loomalg.exactla import Span, root_power
from loomalg.laurent import LaurentPoly
from loomalg.multiloop import EigenDecomp, Window


def _same_span(us, vs):
    a, b = Span(), Span()
    for u in us:
        a.add({k: x for k, x in enumerate(u) if x})
    for v in vs:
        b.add({k: x for k, x in enumerate(v) if x})
    return a.dim == b.dim and all(a.contains({k: x for k, x in enumerate(v) if x}) for v in vs)


def _cyclic3():
    z = root_power(3, 1)
    return multiloop(SL2, [[[z, 0, 0], [0, 1, 0], [0, 0, z * z]]], [3])


FIXTURES = {
    "omega": lambda: multiloop(SL2, [OMEGA], [2]),
    "identity": lambda: multiloop(SL2, [ident(3)], [1]),
    "omega_id": lambda: multiloop(SL2, [OMEGA, ident(3)], [2, 1]),
    "omega_omega": lambda: multiloop(SL2, [OMEGA, OMEGA], [2, 2]),
    "cyclic3": _cyclic3,
}


# -- cocycles ----------------------------------------------------------------------------

def test_chevalley_cocycle_values(L_tw):
    u = cocycle_from_sigma(L_tw.sigma)
    assert u[(0,)] == AlgEndo.identity(L_tw.A)
    assert u[(1,)] == L_tw.sigma.sigmas[0]


def test_identity_tuple_gives_trivial_cocycle(L_un):
    u = cocycle_from_sigma(L_un.sigma)
    assert all(v == AlgEndo.identity(L_un.A) for v in u.values.values())


def test_two_variable_cocycle():
    L = FIXTURES["omega_omega"]()
    u = cocycle_from_sigma(L.sigma)
    assert u[(1, 1)] == AlgEndo.identity(L.A)
    assert u[(1, 0)] == L.sigma.sigmas[0]


def test_constructed_cocycle_checks(L_tw):
    assert check_cocycle(cocycle_from_sigma(L_tw.sigma))
    assert cocycle_from_sigma(L_tw.sigma).satisfies_derivation_hypothesis


def test_non_involution_fails_cocycle_condition():
    L = multiloop(SL2, [ident(3)], [1], m=4)
    i = root_power(4, 1)
    diag = AlgEndo.from_rows(L.A, [[i, 0, 0], [0, 1, 0], [0, 0, -i]])
    ident_e = AlgEndo.identity(L.A)
    assert not check_cocycle({(0,): ident_e, (1,): diag}, (2,))


def test_misassigned_order_four_cocycle():
    L = multiloop(SL2, [ident(3)], [1], m=4)
    i = root_power(4, 1)
    diag = AlgEndo.from_rows(L.A, [[i, 0, 0], [0, 1, 0], [0, 0, -i]])
    good = {(k,): diag ** k for k in range(4)}
    assert check_cocycle(good, (4,))
    bad = dict(good)
    bad[(2,)] = diag
    assert not check_cocycle(bad, (4,))


def test_undefined_assignment_rejected(L_tw):
    with pytest.raises(ValueError):
        check_cocycle({(0,): AlgEndo.identity(L_tw.A)}, (2,))


# -- Galois action -------------------------------------------------------------------------

@given(st.integers(0, 5), st.integers(0, 5), st.integers(-9, 9))
def test_character_is_multiplicative(e1, e2, a):
    m = 6
    assert character(m, (6,), (e1 + e2,), (a,)) == character(m, (6,), (e1,), (a,)) * character(m, (6,), (e2,), (a,))


@pytest.mark.parametrize("mj", [2, 3, 4])
def test_action_has_exact_order_on_root(mj):
    root = LaurentPoly.monomial((mj,), mj, (1,))
    g = GaloisElement((1,), (mj,))
    p = root
    for k in range(1, mj + 1):
        p = act_on_poly(g, p)
        assert (p == root) == (k == mj)


# -- fixed points -----------------------------------------------------------------------

def test_degree_zero_fixed_points(L_tw):
    u = cocycle_from_sigma(L_tw.sigma)
    fp = fixed_points(L_tw.A, u, Window((0,)))
    assert _same_span(fp[(0,)], [L_tw.A.vector({"e": 1, "f": -1})])


def test_small_window_total_dimension(L_tw):
    u = cocycle_from_sigma(L_tw.sigma)
    fp = fixed_points(L_tw.A, u, Window((2,)))
    assert sum(len(v) for v in fp.values()) == 7


def test_trivial_cocycle_fixed_points():
    L = multiloop(SL2, [ident(3)], [1], m=2)
    trivial = GaloisCocycle((2,), {(0,): AlgEndo.identity(L.A), (1,): AlgEndo.identity(L.A)})
    fp = fixed_points(L.A, trivial, Window((3,)))
    for (a,), basis in fp.items():
        assert len(basis) == (3 if a % 2 == 0 else 0)


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_fixed_points_match_tensor_oracle(name):
    L = FIXTURES[name]()
    u = cocycle_from_sigma(L.sigma)
    W = Window((3,) * L.n) if L.n == 1 else Window((2,) * L.n)
    fp = fixed_points(L.A, u, W)
    for a in W.degrees():
        oracle = tensor_fixed_space_dim_and_basis(L.A, u.values, L.moduli, a)
        assert _same_span(fp[a], oracle), a


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_descent_agrees_with_eigenspaces(name):
    L = FIXTURES[name]()
    W = Window((4,) * L.n) if L.n == 1 else Window((2,) * L.n)
    cmp = compare_with_multiloop(L.A, L.sigma, W)
    assert cmp.agree, cmp.message()


def test_descent_message(L_tw):
    cmp = compare_with_multiloop(L_tw.A, L_tw.sigma, Window((6,)))
    assert cmp.message() == "fixed-point and eigenspace constructions agree on 13 degrees"


def test_corrupted_eigenbasis_reported_at_first_odd_degree(L_tw):
    bad = EigenDecomp((2,), {(0,): L_tw.decomp.classes[(0,)], (1,): L_tw.decomp.classes[(0,)]})
    cmp = compare_with_multiloop(L_tw.A, L_tw.sigma, Window((6,)), bad)
    assert not cmp.agree
    assert cmp.first_mismatch == (-5,)
    assert "(-5,)" in cmp.message()


def test_fixed_points_form_subalgebra(L_tw):
    u = cocycle_from_sigma(L_tw.sigma)
    W = Window((3,))
    elems = fixed_point_elements(L_tw.A, u, W)
    for x in elems:
        assert is_fixed(u, x, L_tw.m)
        for y in elems:
            assert is_fixed(u, L_tw.multiply(x, y, check=False), L_tw.m)


def test_galois_group_size():
    assert len(galois_group((2, 3))) == 6
