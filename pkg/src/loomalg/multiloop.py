"""The Z^n-graded multiloop algebra L(A, sigma) inside A (x) k[t^{+-1/m}].

The degree-a component is A_{a mod m} (x) t^{a/m}, where A_i is the
simultaneous eigenspace {x : sigma_j(x) = xi_{m_j}^{i_j} x}.  Elements are
finite maps degree -> coordinate vector in A.  Each component carries the
eigenbasis of its residue class, and "component coordinates" always refer to
that basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping, Sequence

from .algcore import FinAlg, SigmaTuple, multiply
from .exactla import CycNum, Span, homogeneous_solutions


class InvariantError(AssertionError):
    """An internal invariant failed; indicates a bug or a corrupted input."""


class EigenspaceError(ValueError):
    """A vector does not lie in the eigenspace its degree requires."""


# ---------------------------------------------------------------------------
# windows
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Window:
    """Centered degree box {a : |a_j| <= bounds_j} with an optional inner core."""

    bounds: tuple
    core: tuple | None = None

    def __post_init__(self):
        bounds = tuple(int(b) for b in self.bounds)
        if any(b < 0 for b in bounds):
            raise ValueError("window bounds must be non-negative")
        object.__setattr__(self, "bounds", bounds)
        if self.core is not None:
            core = tuple(int(c) for c in self.core)
            if len(core) != len(bounds) or any(c < 0 or c > b for c, b in zip(core, bounds)):
                raise ValueError(f"core {core} is not inside window {bounds}")
            object.__setattr__(self, "core", core)

    @classmethod
    def centered(cls, bounds: Sequence[int], core: Sequence[int] | None = None) -> "Window":
        """Window with core defaulting to floor(B/2)."""
        bounds = tuple(bounds)
        if core is None:
            core = tuple(b // 2 for b in bounds)
        return cls(bounds, tuple(core))

    @property
    def n(self) -> int:
        return len(self.bounds)

    def degrees(self) -> list:
        return [tuple(a) for a in product(*(range(-b, b + 1) for b in self.bounds))]

    def core_degrees(self) -> list:
        return [tuple(a) for a in product(*(range(-c, c + 1) for c in self.core_bounds))]

    @property
    def core_bounds(self) -> tuple:
        return self.core if self.core is not None else self.bounds

    def contains(self, a) -> bool:
        return all(abs(x) <= b for x, b in zip(a, self.bounds))

    def in_core(self, a) -> bool:
        return all(abs(x) <= c for x, c in zip(a, self.core_bounds))

    def core_shifts(self) -> list:
        """Shifts s moving at least one core degree into the window (the box W - C)."""
        return [tuple(s) for s in product(*(range(-(b + c), b + c + 1)
                                             for b, c in zip(self.bounds, self.core_bounds)))]

    def window_shifts(self) -> list:
        """Shifts s moving at least one window degree into the window (the box W - W)."""
        return [tuple(s) for s in product(*(range(-2 * b, 2 * b + 1) for b in self.bounds))]

    def to_json(self) -> dict:
        return {"bounds": list(self.bounds), "core": list(self.core_bounds)}


def add_deg(a, b) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def sub_deg(a, b) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


# ---------------------------------------------------------------------------
# eigenspaces
# ---------------------------------------------------------------------------

def residue_classes(moduli: Sequence[int]) -> list:
    return [tuple(i) for i in product(*(range(mi) for mi in moduli))]


def eigenvalue(m: int, m_j: int, i_j: int) -> CycNum:
    """xi_{m_j}^{i_j} expressed in Q(xi_m)."""
    if m % m_j:
        raise ValueError(f"order {m_j} does not divide the conductor {m}")
    return CycNum.root_power(m, i_j * (m // m_j))


@dataclass
class EigenDecomp:
    """Simultaneous eigenbasis of A, one list of coordinate vectors per residue class."""

    moduli: tuple
    classes: dict
    _coords: Span = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        span = Span(track=True)
        for cls, vecs in self.classes.items():
            for idx, v in enumerate(vecs):
                span.add({k: x for k, x in enumerate(v) if x}, label=(cls, idx))
        self._coords = span

    def residue(self, a) -> tuple:
        return tuple(x % mi for x, mi in zip(a, self.moduli))

    def dim(self, cls) -> int:
        return len(self.classes.get(tuple(cls), ()))

    def dims(self) -> dict:
        return {c: len(v) for c, v in self.classes.items()}

    def total_dim(self) -> int:
        return sum(len(v) for v in self.classes.values())

    def coords(self, cls, v: Sequence) -> tuple:
        """Coordinates of v in the eigenbasis of ``cls``; EigenspaceError if v is elsewhere."""
        cls = tuple(cls)
        combo = self._coords.coordinates({k: x for k, x in enumerate(v) if x})
        if combo is None:
            raise EigenspaceError("vector is not in the span of the eigenbasis")
        m = v[0].m if v else 1
        out = [CycNum.zero(m)] * self.dim(cls)
        for (c, idx), w in combo.items():
            if c != cls:
                raise EigenspaceError(f"vector has a component in class {c}, expected {cls}")
            out[idx] = out[idx] + w
        return tuple(out)


def _normalise(v: Sequence) -> tuple:
    lead = next(x for x in v if x)
    inv = 1 / lead
    return tuple(x * inv for x in v)


def eigenspaces(A: FinAlg, sigma: SigmaTuple) -> EigenDecomp:
    """Simultaneous eigenspace decomposition; completeness is verified."""
    n = A.dim
    classes = {}
    for cls in residue_classes(sigma.orders):
        rows = []
        for s, mj, ij in zip(sigma.sigmas, sigma.orders, cls):
            lam = eigenvalue(A.m, mj, ij)
            M = s.matrix
            for r in range(n):
                row = {c: M[r, c] - (lam if r == c else 0) for c in range(n)}
                rows.append({c: x for c, x in row.items() if x})
        sols = homogeneous_solutions(rows, range(n), A.m)
        vecs = [_normalise(tuple(s.get(k, CycNum.zero(A.m)) for k in range(n))) for s in sols]
        for s, mj, ij in zip(sigma.sigmas, sigma.orders, cls):
            lam = eigenvalue(A.m, mj, ij)
            for v in vecs:
                if s(v) != tuple(lam * x for x in v):
                    raise InvariantError(f"eigenvector check failed in class {cls}")
        classes[cls] = vecs
    decomp = EigenDecomp(tuple(sigma.orders), classes)
    if decomp.total_dim() != n or decomp._coords.dim != n:
        raise InvariantError(
            f"eigenspaces do not decompose A: total {decomp.total_dim()}, rank {decomp._coords.dim}, dim {n}")
    return decomp


# ---------------------------------------------------------------------------
# loop elements
# ---------------------------------------------------------------------------

class LoopElement:
    """Finite sum of v_a (x) t^{a/m}; zero vectors are never stored."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | None = None):
        clean = {}
        for a, v in (terms or {}).items():
            v = tuple(v)
            if any(v):
                clean[tuple(a)] = v
        self.terms = clean

    def degrees(self) -> list:
        return sorted(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __getitem__(self, a):
        return self.terms[tuple(a)]

    def get(self, a, default=None):
        return self.terms.get(tuple(a), default)

    def __add__(self, other: "LoopElement") -> "LoopElement":
        terms = dict(self.terms)
        for a, v in other.terms.items():
            terms[a] = tuple(x + y for x, y in zip(terms[a], v)) if a in terms else v
        return LoopElement(terms)

    def __neg__(self):
        return LoopElement({a: tuple(-x for x in v) for a, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "LoopElement":
        return LoopElement({a: tuple(x * c for x in v) for a, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, LoopElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __repr__(self):
        parts = [f"{a}: ({', '.join(str(x) for x in v)})" for a, v in sorted(self.terms.items())]
        return "LoopElement{" + "; ".join(parts) + "}"

    def restrict(self, degrees: Iterable) -> "LoopElement":
        keep = set(map(tuple, degrees))
        return LoopElement({a: v for a, v in self.terms.items() if a in keep})


# ---------------------------------------------------------------------------
# the multiloop algebra
# ---------------------------------------------------------------------------

class Multiloop:
    """L(A, sigma) with eigenbasis bookkeeping and a cached component product table."""

    def __init__(self, A: FinAlg, sigma: SigmaTuple, decomp: EigenDecomp | None = None):
        for mj in sigma.orders:
            if A.m % mj:
                raise ValueError(f"order {mj} does not divide the conductor {A.m}")
        self.A = A
        self.sigma = sigma
        self.moduli = tuple(sigma.orders)
        self.m = A.m
        self.decomp = decomp if decomp is not None else eigenspaces(A, sigma)
        self._table_cache = {}

    @property
    def n(self) -> int:
        return len(self.moduli)

    def residue(self, a) -> tuple:
        return tuple(x % mi for x, mi in zip(a, self.moduli))

    def dim(self, a) -> int:
        return self.decomp.dim(self.residue(a))

    def eigenbasis(self, a) -> list:
        return list(self.decomp.classes.get(self.residue(a), ()))

    def graded_component_basis(self, a) -> list:
        a = tuple(a)
        return [LoopElement({a: v}) for v in self.eigenbasis(a)]

    def coords(self, a, v: Sequence) -> tuple:
        return self.decomp.coords(self.residue(a), v)

    def from_coords(self, a, coords: Sequence) -> tuple:
        out = [CycNum.zero(self.m)] * self.A.dim
        for c, v in zip(coords, self.eigenbasis(a)):
            if c:
                out = [x + c * y for x, y in zip(out, v)]
        return tuple(out)

    def element(self, terms: Mapping) -> LoopElement:
        """Build and validate an element from {degree: A-vector or {name: coeff}}."""
        x = LoopElement({tuple(a): self.A.vector(v) for a, v in terms.items()})
        self.validate(x)
        return x

    def validate(self, x: LoopElement) -> None:
        for a, v in x.terms.items():
            if len(a) != self.n:
                raise EigenspaceError(f"degree {a} has the wrong arity")
            try:
                self.coords(a, v)
            except EigenspaceError as exc:
                raise EigenspaceError(f"degree {a}: {exc}") from None

    def is_valid(self, x: LoopElement) -> bool:
        try:
            self.validate(x)
        except EigenspaceError:
            return False
        return True

    def multiply(self, x: LoopElement, y: LoopElement, check: bool = True) -> LoopElement:
        if check:
            self.validate(x)
            self.validate(y)
        out = {}
        for a, u in x.terms.items():
            for b, v in y.terms.items():
                c = add_deg(a, b)
                uv = multiply(self.A, u, v)
                out[c] = tuple(p + q for p, q in zip(out[c], uv)) if c in out else uv
        z = LoopElement(out)
        if check:
            try:
                self.validate(z)
            except EigenspaceError as exc:
                raise InvariantError(f"product left the multiloop algebra: {exc}") from None
        return z

    def product_table(self, c1, c2) -> tuple:
        """T[p][q] = component coordinates of basis_p(c1) * basis_q(c2) in class c1 + c2."""
        key = (tuple(c1), tuple(c2))
        if key not in self._table_cache:
            b1 = self.decomp.classes.get(key[0], [])
            b2 = self.decomp.classes.get(key[1], [])
            target = tuple((x + y) % mi for x, y, mi in zip(c1, c2, self.moduli))
            self._table_cache[key] = tuple(
                tuple(self.decomp.coords(target, multiply(self.A, u, v)) for v in b2) for u in b1)
        return self._table_cache[key]

    def component_table(self, W: Window) -> dict:
        return {a: self.dim(a) for a in W.degrees()}

    def random_element(self, rng, degrees: Sequence, density: float = 1.0, coeff_range: int = 3) -> LoopElement:
        """Random element with small integer coefficients on the given degrees."""
        terms = {}
        for a in degrees:
            if rng.random() > density or not self.dim(a):
                continue
            coords = [rng.randint(-coeff_range, coeff_range) for _ in range(self.dim(a))]
            terms[tuple(a)] = self.from_coords(a, coords)
        return LoopElement(terms)


def loop_multiply(L: Multiloop, x: LoopElement, y: LoopElement) -> LoopElement:
    return L.multiply(x, y)


def graded_component_basis(L: Multiloop, a) -> list:
    return L.graded_component_basis(a)
