import pytest
from hypothesis import given, strategies as st

from conftest import ABELIAN1, IDEM1, KXK, OMEGA, SL2, ident, sl2
from oracles import centroid_dim, derivation_dim
from loomalg.algcore import (AlgEndo, AlgebraError, SigmaError, adjoint, centroid_basis,
                             derivations_of_A, is_central, is_derivation, is_perfect, load_algebra,
                             multiply, satisfies_centroid, validate_sigma_tuple)
from loomalg.exactla import Span, root_power


def _span_of(endos):
    s = Span()
    for e in endos:
        s.add(e.flat())
    return s


# -- loading --------------------------------------------------------------------------

def test_sl2_loads_as_lie():
    A = sl2()
    assert A.is_lie and not A.is_associative
    assert A.dim == 3


def test_anticommutativity_conflict_rejected():
    desc = dict(SL2, products=[("h", "e", {"e": 2}), ("e", "h", {"e": 2})])
    with pytest.raises(AlgebraError, match="anticommutativity"):
        load_algebra(desc)


def test_idempotent_line_is_associative_not_lie():
    A = load_algebra(IDEM1)
    assert not A.is_lie and A.is_associative


def test_jacobi_failure_names_triple():
    desc = {"basis": ["x", "y", "z"], "kind": "bracket",
            "products": [("x", "y", {"z": 1}), ("y", "z", {"y": 1})]}
    with pytest.raises(AlgebraError) as info:
        load_algebra(desc)
    assert "Jacobi" in str(info.value)
    assert info.value.triple == (0, 1, 2)


def test_declared_flag_is_verified():
    with pytest.raises(AlgebraError, match="associativity"):
        load_algebra(dict(SL2, kind="product", flags=["associative"]))


@pytest.mark.parametrize("desc, msg", [
    ({"basis": []}, "empty"),
    ({"basis": ["a", "a"]}, "duplicate"),
    ({"basis": ["a"], "dim": 2}, "dim"),
    ({"basis": ["a"], "products": [("a", "b", {"a": 1})]}, "unknown"),
    ({"products": []}, "basis"),
])
def test_malformed_descriptions(desc, msg):
    with pytest.raises(AlgebraError, match=msg):
        load_algebra(desc)


# -- products -------------------------------------------------------------------------

def test_multiply_examples():
    A = sl2()
    e, h, f = (A.basis_vector(i) for i in range(3))
    assert multiply(A, e, f) == h
    assert multiply(A, h, e) == tuple(2 * x for x in e)
    assert multiply(A, e, A.zero()) == A.zero()


# -- perfect / centroid / derivations ----------------------------------------------------

@pytest.mark.parametrize("desc, expected", [(SL2, True), (ABELIAN1, False), (IDEM1, True), (KXK, True)])
def test_is_perfect(desc, expected):
    assert is_perfect(load_algebra(desc)) is expected


@pytest.mark.parametrize("desc, dim", [(SL2, 1), (KXK, 2), (ABELIAN1, 1), (IDEM1, 1)])
def test_centroid_dimension(desc, dim):
    A = load_algebra(desc)
    basis = centroid_basis(A)
    assert len(basis) == dim == centroid_dim(A)
    assert all(satisfies_centroid(A, c) for c in basis)


def test_sl2_centroid_is_identity():
    A = sl2()
    assert _span_of(centroid_basis(A)).contains(AlgEndo.identity(A).flat())


def test_kxk_centroid_contains_projections():
    A = load_algebra(KXK)
    s = _span_of(centroid_basis(A))
    assert s.contains(AlgEndo.from_rows(A, [[1, 0], [0, 0]]).flat())
    assert s.contains(AlgEndo.from_rows(A, [[0, 0], [0, 1]]).flat())


@pytest.mark.parametrize("desc, expected", [(SL2, True), (KXK, False), (ABELIAN1, True), (IDEM1, True)])
def test_is_central(desc, expected):
    assert is_central(load_algebra(desc)) is expected


@pytest.mark.parametrize("desc, dim", [(SL2, 3), (ABELIAN1, 1), (IDEM1, 0), (KXK, 0)])
def test_derivation_dimension(desc, dim):
    A = load_algebra(desc)
    ders = derivations_of_A(A)
    assert len(ders) == dim == derivation_dim(A)
    assert all(is_derivation(A, D) for D in ders)


def test_sl2_derivations_are_inner():
    A = sl2()
    ders = _span_of(derivations_of_A(A))
    inner = _span_of(adjoint(A, A.basis_vector(i)) for i in range(3))
    assert ders.dim == inner.dim == 3
    assert all(ders.contains(v) for v in inner.rows().values())


def test_sl2_satisfies_standing_hypothesis():
    A = sl2()
    assert is_perfect(A) and is_central(A)


# -- random algebras: structural properties --------------------------------------------

@st.composite
def small_algebras(draw):
    n = draw(st.integers(1, 3))
    names = [f"x{i}" for i in range(n)]
    products = []
    for i in range(n):
        for j in range(n):
            coeffs = {names[k]: draw(st.integers(-2, 2)) for k in range(n)}
            products.append((names[i], names[j], coeffs))
    return load_algebra({"basis": names, "products": products})


@given(small_algebras())
def test_centroid_matches_oracle_and_commutes_when_perfect(A):
    basis = centroid_basis(A)
    assert len(basis) == centroid_dim(A)
    if is_perfect(A):
        for a in basis:
            for b in basis:
                assert a.bracket(b).is_zero()


@given(small_algebras())
def test_derivation_bracket_with_centroid_is_centroidal(A):
    ders = derivations_of_A(A)
    assert len(ders) == derivation_dim(A)
    for D in ders:
        for chi in centroid_basis(A):
            assert satisfies_centroid(A, D.bracket(chi))


@given(small_algebras())
def test_derivations_closed_under_bracket(A):
    ders = derivations_of_A(A)
    for D1 in ders:
        for D2 in ders:
            assert is_derivation(A, D1.bracket(D2))


# -- automorphism tuples ------------------------------------------------------------

def test_chevalley_involution_accepted():
    A = sl2(2)
    s = validate_sigma_tuple(A, [OMEGA], [2])
    assert s.n == 1 and s.orders == (2,)


def test_chevalley_involution_rejected_with_order_three():
    A = sl2(3)
    with pytest.raises(SigmaError, match=r"\^3 != id"):
        validate_sigma_tuple(A, [OMEGA], [3])


def test_identity_accepted():
    A = sl2()
    validate_sigma_tuple(A, [ident(3)], [1])


def test_non_multiplicative_rejected():
    A = sl2(2)
    with pytest.raises(SigmaError, match="not multiplicative"):
        validate_sigma_tuple(A, [[[1, 0, 0], [0, 1, 0], [0, 0, -1]]], [2])


def test_non_commuting_rejected():
    A = sl2(4)
    i = root_power(4, 1)
    diag = [[i, 0, 0], [0, 1, 0], [0, 0, -i]]
    with pytest.raises(SigmaError, match="do not commute"):
        validate_sigma_tuple(A, [OMEGA, diag], [2, 4])


def test_sigma_count_must_match_orders():
    A = sl2(2)
    with pytest.raises(SigmaError):
        validate_sigma_tuple(A, [OMEGA], [2, 1])
