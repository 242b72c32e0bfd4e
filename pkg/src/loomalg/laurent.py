"""Laurent polynomials with fractional exponents and their degree derivations.

A monomial t_1^{a_1/m_1} ... t_n^{a_n/m_n} is stored by its integer
numerators ``a`` over the session moduli ``m``; it lies in the integral ring
R = k[t^{+-1}] exactly when every m_i divides a_i.

Derivations are written in the basis t_j d/dt_j:
``LaurentDerivation([r_1, ..., r_n])`` is sum_j r_j t_j d/dt_j.  Because the
rule t^{a/m} -> (a_j/m_j) t^{a/m} makes sense for fractional exponents too,
the same object acts on R' = k[t^{+-1/m}] as the unique extension d'.
"""

from __future__ import annotations

from typing import Iterable, Mapping, NamedTuple, Sequence

from gmpy2 import mpq

from .exactla import CycNum, format_cyc, parse_cyc


class FracMonomial(NamedTuple):
    numerators: tuple
    moduli: tuple

    def in_R(self) -> bool:
        return all(a % m == 0 for a, m in zip(self.numerators, self.moduli))

    def exponents(self) -> tuple:
        return tuple(mpq(a, m) for a, m in zip(self.numerators, self.moduli))


class LaurentPoly:
    """Finite sum of coefficient * t^{a/m}; immutable."""

    __slots__ = ("moduli", "m", "terms")

    def __init__(self, moduli: Sequence[int], m: int, terms: Mapping | None = None):
        self.moduli = tuple(int(x) for x in moduli)
        self.m = m
        clean = {}
        for key, c in (terms or {}).items():
            key = tuple(int(a) for a in key)
            if len(key) != len(self.moduli):
                raise ValueError("monomial arity does not match the moduli")
            c = c if isinstance(c, CycNum) else CycNum.rational(m, c)
            c = clean.get(key, CycNum.zero(m)) + c
            if c:
                clean[key] = c
            else:
                clean.pop(key, None)
        self.terms = clean

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, moduli, m) -> "LaurentPoly":
        return cls(moduli, m)

    @classmethod
    def constant(cls, moduli, m, c=1) -> "LaurentPoly":
        return cls(moduli, m, {(0,) * len(moduli): c})

    @classmethod
    def monomial(cls, moduli, m, numerators, c=1) -> "LaurentPoly":
        return cls(moduli, m, {tuple(numerators): c})

    @classmethod
    def integral_monomial(cls, moduli, m, exponents, c=1) -> "LaurentPoly":
        """c * t^b with integer exponents b (numerators m_i * b_i)."""
        return cls(moduli, m, {tuple(b * mi for b, mi in zip(exponents, moduli)): c})

    @classmethod
    def generator(cls, moduli, m, j) -> "LaurentPoly":
        """t_j itself."""
        e = [0] * len(moduli)
        e[j] = 1
        return cls.integral_monomial(moduli, m, e)

    # -- queries ----------------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.moduli)

    def in_R(self) -> bool:
        return all(FracMonomial(k, self.moduli).in_R() for k in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def monomials(self) -> list:
        return [FracMonomial(k, self.moduli) for k in sorted(self.terms)]

    def _check(self, other):
        if self.moduli != other.moduli or self.m != other.m:
            raise ValueError("Laurent polynomials over different sessions")

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(self.moduli, self.m, other)
        self._check(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms[k] + c if k in terms else c
        return LaurentPoly(self.moduli, self.m, terms)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.moduli, self.m, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(self.moduli, self.m, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            return LaurentPoly(self.moduli, self.m, {k: c * other for k, c in self.terms.items()})
        self._check(other)
        terms = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                c = c1 * c2
                terms[k] = terms[k] + c if k in terms else c
        return LaurentPoly(self.moduli, self.m, terms)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.moduli == other.moduli and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.moduli, tuple(sorted(self.terms.items()))))

    def __repr__(self):
        return f"LaurentPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms):
            mono = "*".join(
                f"t{j + 1}^{_exp(a, mi)}" for j, (a, mi) in enumerate(zip(k, self.moduli)) if a)
            coeff = format_cyc(self.terms[k])
            parts.append(f"({coeff})*{mono}" if mono else f"({coeff})")
        return " + ".join(parts)

    # -- serialisation ----------------------------------------------------
    def to_json(self) -> list:
        return [{"numerators": list(k), "coeff": format_cyc(self.terms[k])} for k in sorted(self.terms)]


def _exp(a, m):
    q = mpq(a, m)
    return str(q) if q.denominator == 1 else f"({q})"


# ---------------------------------------------------------------------------
# derivations
# ---------------------------------------------------------------------------

class LaurentDerivation:
    """sum_j coeffs[j] * t_j d/dt_j."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[LaurentPoly]):
        coeffs = tuple(coeffs)
        if not coeffs:
            raise ValueError("a derivation needs at least one variable")
        for c in coeffs[1:]:
            coeffs[0]._check(c)
        if len(coeffs) != coeffs[0].n:
            raise ValueError("need one coefficient per variable")
        self.coeffs = coeffs

    @classmethod
    def zero(cls, moduli, m) -> "LaurentDerivation":
        return cls([LaurentPoly.zero(moduli, m) for _ in moduli])

    @classmethod
    def degree(cls, moduli, m, j: int, coeff: LaurentPoly | None = None) -> "LaurentDerivation":
        """coeff * t_j d/dt_j (coeff defaults to 1)."""
        cs = [LaurentPoly.zero(moduli, m) for _ in moduli]
        cs[j] = coeff if coeff is not None else LaurentPoly.constant(moduli, m)
        return cls(cs)

    @property
    def moduli(self):
        return self.coeffs[0].moduli

    @property
    def m(self):
        return self.coeffs[0].m

    def is_derivation_of_R(self) -> bool:
        return all(c.in_R() for c in self.coeffs)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __call__(self, p: LaurentPoly) -> LaurentPoly:
        return apply_derivation(self, p)

    def __add__(self, other):
        return LaurentDerivation([a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        return LaurentDerivation([a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return LaurentDerivation([-a for a in self.coeffs])

    def __mul__(self, c):
        return LaurentDerivation([a * c for a in self.coeffs])

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, LaurentDerivation):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        parts = [f"[{c}]*t{j + 1}d{j + 1}" for j, c in enumerate(self.coeffs) if c]
        return "LaurentDerivation(" + (" + ".join(parts) or "0") + ")"

    def shifts(self) -> set:
        """Numerator shifts of all monomials appearing in the coefficients."""
        return {k for c in self.coeffs for k in c.terms}

    def to_json(self) -> list:
        return [c.to_json() for c in self.coeffs]


def apply_derivation(d: LaurentDerivation, p: LaurentPoly) -> LaurentPoly:
    """sum over monomials c t^{a/m} of p of sum_j r_j (a_j/m_j) c t^{a/m}."""
    d.coeffs[0]._check(p)
    moduli = p.moduli
    out = LaurentPoly.zero(moduli, p.m)
    for j, r in enumerate(d.coeffs):
        if r.is_zero():
            continue
        scaled = {k: c * mpq(k[j], moduli[j]) for k, c in p.terms.items() if k[j]}
        if scaled:
            out = out + r * LaurentPoly(moduli, p.m, scaled)
    return out


def derivation_bracket(d1: LaurentDerivation, d2: LaurentDerivation) -> LaurentDerivation:
    """[d1, d2] = sum_j (d1(s_j) - d2(r_j)) t_j d/dt_j."""
    return LaurentDerivation([apply_derivation(d1, s) - apply_derivation(d2, r)
                              for r, s in zip(d1.coeffs, d2.coeffs)])


def parse_poly_json(data: Iterable[Mapping], moduli, m) -> LaurentPoly:
    return LaurentPoly(moduli, m, {tuple(t["numerators"]): parse_cyc(str(t["coeff"]), m) for t in data})
