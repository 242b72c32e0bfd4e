"""Galois descent for R = k[t^{+-1}] -> R' = k[t^{+-1/m}].

The group Gamma = Z/m_1 x ... x Z/m_n acts on R' by
e . t_i^{1/m_i} = xi_{m_i}^{e_i} t_i^{1/m_i}.  A constant cocycle e -> v_e in
Aut_k(A) defines the twisted form

    L_u = {x in A (x) R' : v_e(e . x) = x for every e in Gamma},

which is how the condition u p_1(x) = p_2(x) reads after splitting
R' (x)_R R' into |Gamma| copies of R' via a (x) b -> (e(a) b)_e.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Mapping, Sequence

from .algcore import AlgEndo, FinAlg, SigmaTuple
from .exactla import CycNum, Span, homogeneous_solutions
from .laurent import LaurentPoly
from .multiloop import EigenDecomp, InvariantError, LoopElement, Multiloop, Window, _normalise


@dataclass(frozen=True)
class GaloisElement:
    e: tuple
    moduli: tuple

    def __post_init__(self):
        object.__setattr__(self, "e", tuple(x % mi for x, mi in zip(self.e, self.moduli)))

    def __mul__(self, other: "GaloisElement") -> "GaloisElement":
        return GaloisElement(tuple(a + b for a, b in zip(self.e, other.e)), self.moduli)

    def inverse(self) -> "GaloisElement":
        return GaloisElement(tuple(-a for a in self.e), self.moduli)


def galois_group(moduli: Sequence[int]) -> list:
    moduli = tuple(moduli)
    return [GaloisElement(tuple(e), moduli) for e in product(*(range(mi) for mi in moduli))]


def character(m: int, moduli: Sequence[int], e: Sequence[int], a: Sequence[int]) -> CycNum:
    """The scalar by which e acts on t^{a/m}: prod_j xi_{m_j}^{e_j a_j}."""
    k = 0
    for ej, aj, mj in zip(e, a, moduli):
        k += ej * aj * (m // mj)
    return CycNum.root_power(m, k)


def act_on_poly(g: GaloisElement, p: LaurentPoly) -> LaurentPoly:
    return LaurentPoly(p.moduli, p.m, {a: c * character(p.m, p.moduli, g.e, a) for a, c in p.terms.items()})


def act_on_element(g: GaloisElement, x: LoopElement, m: int) -> LoopElement:
    return LoopElement({a: tuple(c * character(m, g.moduli, g.e, a) for c in v) for a, v in x.terms.items()})


# ---------------------------------------------------------------------------
# cocycles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaloisCocycle:
    """Assignment e -> v_e.  ``constant`` marks values in Aut_k(A); only those are built here.

    Constant cocycles take values fixed by every d' (they do not involve t at
    all), which is the hypothesis on u needed for the section rho.
    """

    moduli: tuple
    values: dict = field(hash=False)
    constant: bool = True

    def __getitem__(self, e) -> AlgEndo:
        key = e.e if isinstance(e, GaloisElement) else tuple(x % mi for x, mi in zip(e, self.moduli))
        return self.values[key]

    @property
    def satisfies_derivation_hypothesis(self) -> bool:
        return self.constant


def cocycle_from_sigma(sigma: SigmaTuple) -> GaloisCocycle:
    """e -> sigma_1^{-e_1} ... sigma_n^{-e_n}."""
    values = {}
    for g in galois_group(sigma.orders):
        v = None
        for s, ej, mj in zip(sigma.sigmas, g.e, sigma.orders):
            term = s ** ((-ej) % mj)
            v = term if v is None else v @ term
        values[g.e] = v
    u = GaloisCocycle(tuple(sigma.orders), values, constant=True)
    if not check_cocycle(u):
        raise InvariantError("commuting finite-order automorphisms failed to give a homomorphism")
    return u


def check_cocycle(u: GaloisCocycle | Mapping, moduli: Sequence[int] | None = None) -> bool:
    """u_{g h} == u_g o (g . u_h) for every pair; the action on constant values is trivial."""
    if isinstance(u, GaloisCocycle):
        values, moduli, constant = u.values, u.moduli, u.constant
    else:
        if moduli is None:
            raise ValueError("moduli are required for a bare assignment")
        values, constant = dict(u), True
    if not constant:
        raise NotImplementedError("only constant cocycles are supported")
    group = galois_group(moduli)
    missing = [g.e for g in group if g.e not in values]
    if missing:
        raise ValueError(f"assignment undefined on {missing}")
    for g in group:
        for h in group:
            if values[(g * h).e] != values[g.e] @ values[h.e]:
                return False
    return True


# ---------------------------------------------------------------------------
# fixed points
# ---------------------------------------------------------------------------

def fixed_points(A: FinAlg, u: GaloisCocycle, W: Window) -> dict:
    """Degree -> basis (A-vectors) of {v : v_e(e . v t^{a/m}) = v t^{a/m} for all e}."""
    n = A.dim
    group = galois_group(u.moduli)
    out = {}
    for a in W.degrees():
        rows = []
        for g in group:
            chi = character(A.m, u.moduli, g.e, a)
            M = u[g].matrix
            for r in range(n):
                row = {c: chi * M[r, c] - (1 if r == c else 0) for c in range(n)}
                rows.append({c: x for c, x in row.items() if x})
        sols = homogeneous_solutions(rows, range(n), A.m)
        out[a] = [_normalise(tuple(s.get(k, CycNum.zero(A.m)) for k in range(n))) for s in sols]
    return out


def fixed_point_elements(A: FinAlg, u: GaloisCocycle, W: Window) -> list:
    return [LoopElement({a: v}) for a, vs in fixed_points(A, u, W).items() for v in vs]


def is_fixed(u: GaloisCocycle, x: LoopElement, m: int) -> bool:
    for g in galois_group(u.moduli):
        moved = act_on_element(g, x, m)
        image = LoopElement({a: u[g](v) for a, v in moved.terms.items()})
        if image != x:
            return False
    return True


@dataclass
class DescentComparison:
    agree: bool
    degrees_checked: int
    first_mismatch: tuple | None
    fixed_dims: dict
    eigen_dims: dict

    def message(self) -> str:
        if self.agree:
            return (f"fixed-point and eigenspace constructions agree on "
                    f"{self.degrees_checked} degrees")
        a = self.first_mismatch
        return (f"constructions differ at degree {a}: fixed-point dim {self.fixed_dims[a]}, "
                f"eigenspace dim {self.eigen_dims[a]}")


def _same_span(us: Sequence, vs: Sequence) -> bool:
    su, sv = Span(), Span()
    for v in us:
        su.add({k: x for k, x in enumerate(v) if x})
    for v in vs:
        sv.add({k: x for k, x in enumerate(v) if x})
    if su.dim != sv.dim:
        return False
    return all(su.contains({k: x for k, x in enumerate(v) if x}) for v in vs)


def compare_with_multiloop(A: FinAlg, sigma: SigmaTuple, W: Window,
                           decomp: EigenDecomp | None = None) -> DescentComparison:
    """Degree by degree, do L_u and the eigenspace grading span the same subspace?"""
    L = Multiloop(A, sigma, decomp)
    fixed = fixed_points(A, cocycle_from_sigma(sigma), W)
    first = None
    fixed_dims, eigen_dims = {}, {}
    for a in W.degrees():
        basis = L.eigenbasis(a)
        fixed_dims[a] = len(fixed[a])
        eigen_dims[a] = len(basis)
        if first is None and not _same_span(fixed[a], basis):
            first = a
    return DescentComparison(first is None, len(fixed_dims), first, fixed_dims, eigen_dims)
