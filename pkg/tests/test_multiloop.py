import random

import pytest
from hypothesis import given, strategies as st

from conftest import KXK, SL2, ident, multiloop, sl2
from loomalg.algcore import validate_sigma_tuple
from loomalg.exactla import Span, root_power
from loomalg.multiloop import (EigenspaceError, LoopElement, Multiloop, Window, graded_component_basis,
                               loop_multiply)


def _same_span(us, vs):
    a, b = Span(), Span()
    for u in us:
        a.add({k: x for k, x in enumerate(u) if x})
    for v in vs:
        b.add({k: x for k, x in enumerate(v) if x})
    return a.dim == b.dim and all(a.contains({k: x for k, x in enumerate(v) if x}) for v in vs)


def vec(A, **kw):
    return A.vector(kw)


# -- eigenspaces -------------------------------------------------------------------------

def test_chevalley_eigenspaces(L_tw):
    A = L_tw.A
    classes = L_tw.decomp.classes
    assert _same_span(classes[(0,)], [vec(A, e=1, f=-1)])
    assert _same_span(classes[(1,)], [vec(A, h=1), vec(A, e=1, f=1)])


def test_identity_single_class(L_un):
    assert L_un.decomp.dims() == {(0,): 3}


def test_two_variable_classes(L_two):
    dims = L_two.decomp.dims()
    assert dims[(0, 0)] == 1 and dims[(1, 0)] == 2


def test_eigenvectors_satisfy_eigen_equation(L_tw):
    # independent check: sigma(v) == (-1)^class v
    omega = L_tw.sigma.sigmas[0]
    for cls, vs in L_tw.decomp.classes.items():
        for v in vs:
            sign = -1 if cls[0] else 1
            assert omega(v) == tuple(sign * x for x in v)


def test_cyclic_order_three_eigenspaces():
    z = root_power(3, 1)
    L = multiloop(SL2, [[[z, 0, 0], [0, 1, 0], [0, 0, z * z]]], [3])
    A = L.A
    assert _same_span(L.decomp.classes[(0,)], [vec(A, h=1)])
    assert _same_span(L.decomp.classes[(1,)], [vec(A, e=1)])
    assert _same_span(L.decomp.classes[(2,)], [vec(A, f=1)])


# -- products --------------------------------------------------------------------------

def test_twisted_product_example(L_tw):
    A = L_tw.A
    x = L_tw.element({(0,): {"e": 1, "f": -1}})
    y = L_tw.element({(1,): {"h": 1}})
    assert loop_multiply(L_tw, x, y) == LoopElement({(1,): vec(A, e=-2, f=-2)})


def test_untwisted_product_example(L_un):
    x = L_un.element({(1,): {"e": 1}})
    y = L_un.element({(1,): {"f": 1}})
    assert loop_multiply(L_un, x, y) == L_un.element({(2,): {"h": 1}})


def test_element_outside_algebra_rejected(L_tw):
    with pytest.raises(EigenspaceError):
        L_tw.element({(1,): {"e": 1, "f": -1}})


@pytest.mark.parametrize("a, dim", [((3,), 2), ((-4,), 1), ((0,), 1)])
def test_component_dimensions(L_tw, a, dim):
    assert L_tw.dim(a) == dim
    assert len(graded_component_basis(L_tw, a)) == dim


def test_untwisted_dimensions(L_un):
    assert all(L_un.dim((a,)) == 3 for a in range(-5, 6))


# -- properties ---------------------------------------------------------------------------

degrees = st.integers(-8, 8)


@given(degrees, st.integers(-3, 3))
def test_periodicity(a, k):
    L = _TW
    assert L.dim((a,)) == L.dim((a + 2 * k,))


@given(degrees, degrees)
def test_grading_closed(a, b):
    L = _TW
    for x in L.graded_component_basis((a,)):
        for y in L.graded_component_basis((b,)):
            z = L.multiply(x, y)  # raises InvariantError if the product leaves L
            assert set(z.degrees()) <= {(a + b,)}


@given(st.integers(0, 10 ** 6))
def test_lie_identities_on_window(seed):
    L = _TW
    rng = random.Random(seed)
    degs = [(a,) for a in range(-2, 3)]
    x, y, z = (L.random_element(rng, degs, density=0.6) for _ in range(3))
    assert L.multiply(x, x).is_zero()
    assert L.multiply(x, y) == -L.multiply(y, x)
    jac = (L.multiply(x, L.multiply(y, z)) + L.multiply(y, L.multiply(z, x))
           + L.multiply(z, L.multiply(x, y)))
    assert jac.is_zero()


@pytest.mark.parametrize("name", ["twisted", "two"])
def test_perfectness_transfers(name, L_tw, L_two):
    L = L_tw if name == "twisted" else L_two
    W = Window.centered((4,) * L.n)
    for a in W.core_degrees():
        products = Span()
        for b in W.degrees():
            c = tuple(x - y for x, y in zip(a, b))
            if not W.contains(c):
                continue
            for x in L.graded_component_basis(b):
                for y in L.graded_component_basis(c):
                    p = L.multiply(x, y)
                    if not p.is_zero():
                        products.add({k: v for k, v in enumerate(p[a]) if v})
        for v in L.eigenbasis(a):
            assert products.contains({k: x for k, x in enumerate(v) if x})


def test_kxk_with_swap():
    L = multiloop(KXK, [[[0, 1], [1, 0]]], [2])
    assert L.dim((0,)) == 1 and L.dim((1,)) == 1
    x = L.graded_component_basis((1,))[0]
    assert L.multiply(x, x)[(2,)]  # (p - q)^2 = p + q, lands in class 0


def test_order_must_divide_conductor():
    A = sl2(1)
    sig = validate_sigma_tuple(sl2(2), [ident(3)], [2])
    with pytest.raises(ValueError):
        Multiloop(A, sig)


_TW = multiloop(SL2, [[[0, 0, -1], [0, -1, 0], [-1, 0, 0]]], [2])
