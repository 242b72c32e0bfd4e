"""Acceptance criteria, each checked exactly and reported on one line.

Run with ``pytest tests/test_acceptance.py -v`` or ``python3 tests/test_acceptance.py``.
"""

import random
import sys
import time
from pathlib import Path

import pytest
from gmpy2 import mpq

sys.path.insert(0, str(Path(__file__).resolve().parent))

from conftest import KXK, OMEGA, SL2, ident, multiloop  # noqa: E402
from loomalg.dermod import (HypothesisError, compare_on_core, ad, check_rho_homomorphism,  # noqa: E402
                            check_rho_on_homothety, decompose, eta, inner_generators,
                            random_derivation, random_laurent, rho, section_monomials,
                            tensor_centroid_generators, verify_theorem, windowed_centroid,
                            windowed_derivations_by_shift)
from loomalg.descent import compare_with_multiloop  # noqa: E402
from loomalg.laurent import LaurentDerivation, LaurentPoly  # noqa: E402
from loomalg.multiloop import Window  # noqa: E402

ALL_PASS = {"membership": "PASS", "directness": "PASS", "section": "PASS", "ideal": "PASS"}


def report(number, ok, detail):
    return ok, f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"


def twisted():
    return multiloop(SL2, [OMEGA], [2])


def untwisted():
    return multiloop(SL2, [ident(3)], [1])


# ---------------------------------------------------------------------------

def criterion_1():
    L = twisted()
    W = Window.centered((6,), (3,))
    t0 = time.perf_counter()
    rep = verify_theorem(L, W, seed=0)
    elapsed = time.perf_counter() - t0
    ok = rep.verdicts == ALL_PASS and elapsed < 60
    return report(1, ok, f"flagship sl2+omega W=[-6,6] C=[-3,3]: {rep.verdicts} in {elapsed:.2f}s (< 60s)")


def criterion_2():
    L = multiloop(SL2, [OMEGA, ident(3)], [2, 1])
    W = Window.centered((2, 2), (1, 1))
    t0 = time.perf_counter()
    rep = verify_theorem(L, W, seed=0)
    elapsed = time.perf_counter() - t0
    ok = rep.verdicts == ALL_PASS and elapsed < 300
    return report(2, ok, f"sl2 (omega, id) m=(2,1) W=(2,2) C=(1,1): {rep.verdicts} in {elapsed:.2f}s (< 300s)")


def criterion_3():
    L = untwisted()
    W = Window.centered((6,), (3,))
    sols = windowed_derivations_by_shift(L, W, W.core_shifts(), r_linear=True)
    bad = [s for s, maps in sols.items() if not compare_on_core(maps, inner_generators(L, W, s), s).equal]
    return report(3, not bad, f"untwisted R-linear windowed derivations equal inner span on the core "
                              f"over {len(sols)} shifts; mismatched shifts: {bad or 'none'}")


def criterion_4():
    W = Window((6,))
    results = []
    for name, L in [("sl2+omega", twisted()), ("sl2 untwisted", untwisted())]:
        cmp = compare_with_multiloop(L.A, L.sigma, W)
        results.append((name, cmp.agree, cmp.message()))
    ok = all(r[1] for r in results)
    return report(4, ok, "; ".join(f"{n}: {msg}" for n, _, msg in results))


def criterion_5():
    L = twisted()
    W = Window.centered((6,), (3,))
    rep = windowed_centroid(L, W)
    degrees = [s[0] for s in rep.shifts_found]
    even = degrees == [s for s in range(-9, 10) if s % 2 == 0]
    refused = False
    try:
        verify_theorem(multiloop(KXK, [ident(2)], [1]), W)
    except HypothesisError:
        refused = True
    ok = rep.match and rep.degrees_match and even and refused
    return report(5, ok, f"twisted centroid equals monomial homotheties on the core: {rep.match}; "
                         f"nonzero degrees {degrees} are 2Z in W-C: {even}; k x k refused: {refused}")


def criterion_6():
    rng = random.Random(2024)
    checked = 0
    section_ok = True
    for L, W in [(twisted(), Window.centered((6,), (3,))),
                 (multiloop(SL2, [OMEGA, ident(3)], [2, 1]), Window.centered((2, 2), (1, 1)))]:
        shapes = section_monomials(L, W)
        for k in range(10):
            s, j = shapes[k % len(shapes)]
            c = mpq(rng.choice([-5, -3, -2, -1, 1, 2, 3, 7]), rng.choice([1, 2, 3]))
            d = LaurentDerivation.degree(L.moduli, L.m, j, LaurentPoly.monomial(L.moduli, L.m, s, c))
            section_ok &= eta(rho(L, d, W)) == d
            checked += 1
    L, W = twisted(), Window.centered((6,), (3,))
    rng = random.Random(7)
    hom_ok = bracket_ok = True
    for _ in range(100):
        d1 = random_derivation(rng, L.moduli, L.m, max_exp=2, terms=3)
        d2 = random_derivation(rng, L.moduli, L.m, max_exp=2, terms=3)
        r = random_laurent(rng, L.moduli, L.m, max_exp=2, terms=3)
        hom_ok &= check_rho_homomorphism(L, W, d1, d2)
        bracket_ok &= check_rho_on_homothety(L, W, d1, r)
    ok = section_ok and hom_ok and bracket_ok and checked == 20
    return report(6, ok, f"eta(rho(d)) = d on {checked} monomials: {section_ok}; "
                         f"[rho d1, rho d2] = rho[d1, d2] on 100 pairs: {hom_ok}; "
                         f"[rho d, chi_r] = chi_(d r) on 100 pairs: {bracket_ok}")


def criterion_7():
    L = twisted()
    W = Window.centered((6,), (3,))
    rng = random.Random(77)
    good = 0
    for _ in range(50):
        z = L.random_element(rng, W.core_degrees(), density=0.4)
        d = random_derivation(rng, L.moduli, L.m)
        res = decompose(ad(L, z, W) + rho(L, d, W))
        good += res.derivation == d and res.inner == z and res.residual_zero and res.unique
    return report(7, good == 50, f"decompose(ad(z) + rho(d)) returned (d, z) with zero residual: {good}/50")


def criterion_8():
    W = Window.centered((6,), (3,))
    parts = []
    for name, desc, n, dim in [("sl2", SL2, 3, 1), ("k x k", KXK, 2, 2)]:
        L = multiloop(desc, [ident(n)], [1])
        rep = windowed_centroid(L, W, generator_factory=tensor_centroid_generators)
        dims = {c.solved for c in rep.comparisons.values()}
        parts.append((name, rep.passed and dims == {dim}, dims))
    ok = all(p[1] for p in parts)
    return report(8, ok, "; ".join(f"{n}: Ctd(A) (x) monomials match={m}, per-degree dims {sorted(d)}"
                                   for n, m, d in parts))


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4,
            criterion_5, criterion_6, criterion_7, criterion_8]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 9)])
def test_acceptance(criterion, capsys):
    ok, line = criterion()
    with capsys.disabled():
        print(f"\n{line}")
    assert ok, line


if __name__ == "__main__":
    results = []
    for c in CRITERIA:
        ok, line = c()
        print(line)
        results.append(ok)
    sys.exit(0 if all(results) else 1)
