"""Finite-dimensional algebras over Q(xi_m) given by structure constants.

Covers perfectness, the centroid (kernel of the map f -> (f(ab) - f(a)b,
f(ab) - af(b))), centrality, derivations, and validation of commuting tuples
of finite-order automorphisms.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Mapping, Sequence

from .exactla import CycNum, ExactMatrix, Span, homogeneous_solutions, lower, parse_cyc


class AlgebraError(ValueError):
    """Malformed algebra description or a declared property that fails."""

    def __init__(self, message, triple=None):
        super().__init__(message)
        self.triple = triple


class SigmaError(ValueError):
    pass


@dataclass(frozen=True)
class FinAlg:
    """x_i * x_j = sum_k table[i][j][k] x_k, all scalars in Q(xi_m)."""

    m: int
    basis_names: tuple
    table: tuple
    is_lie: bool
    is_associative: bool
    name: str = ""

    @property
    def dim(self) -> int:
        return len(self.basis_names)

    def basis_vector(self, i: int) -> tuple:
        return tuple(CycNum.one(self.m) if k == i else CycNum.zero(self.m) for k in range(self.dim))

    def vector(self, coords: Mapping | Sequence) -> tuple:
        """Coordinate vector from {name: coeff} or a full sequence."""
        if isinstance(coords, Mapping):
            out = [CycNum.zero(self.m)] * self.dim
            for key, c in coords.items():
                i = key if isinstance(key, int) else self.basis_names.index(key)
                out[i] = out[i] + _scalar(self.m, c)
            return tuple(out)
        if len(coords) != self.dim:
            raise ValueError(f"expected {self.dim} coordinates")
        return tuple(_scalar(self.m, c) for c in coords)

    def zero(self) -> tuple:
        return (CycNum.zero(self.m),) * self.dim

    def is_rational(self) -> bool:
        return all(x.is_rational() for row in self.table for v in row for x in v)


def _scalar(m, c) -> CycNum:
    if isinstance(c, CycNum):
        return c
    if isinstance(c, str):
        return parse_cyc(c, m)
    return CycNum.rational(m, c)


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def load_algebra(desc: Mapping, m: int = 1) -> FinAlg:
    """Build and validate a FinAlg from a description mapping.

    Keys: ``basis`` (names), optional ``dim``, ``products`` (iterable of
    ``(left, right, {target: coeff})``), ``kind`` (``"bracket"`` fills in the
    antisymmetric partner of every product, ``"product"`` does not), optional
    ``flags`` (subset of {"lie", "associative"}) which are verified, and
    ``name``.  Coefficients may be CycNum, rationals or strings such as
    ``"-1/2*z^3"``.
    """
    try:
        names = tuple(str(b) for b in desc["basis"])
    except KeyError:
        raise AlgebraError("algebra description lacks a basis") from None
    n = len(names)
    if n == 0:
        raise AlgebraError("basis is empty")
    if len(set(names)) != n:
        raise AlgebraError("duplicate basis names")
    if "dim" in desc and int(desc["dim"]) != n:
        raise AlgebraError(f"dim {desc['dim']} does not match {n} basis names")
    kind = desc.get("kind", "product")
    if kind not in ("bracket", "product"):
        raise AlgebraError(f"unknown product kind {kind!r}")
    flags = set(desc.get("flags", ()))
    if kind == "bracket":
        flags.add("lie")
    unknown = flags - {"lie", "associative"}
    if unknown:
        raise AlgebraError(f"unknown flags {sorted(unknown)}")

    def index(x):
        if isinstance(x, int):
            if not 0 <= x < n:
                raise AlgebraError(f"basis index {x} out of range")
            return x
        try:
            return names.index(x)
        except ValueError:
            raise AlgebraError(f"unknown basis element {x!r}") from None

    zero = CycNum.zero(m)
    table = [[None] * n for _ in range(n)]
    explicit = set()
    for entry in desc.get("products", ()):
        left, right, rhs = entry
        i, j = index(left), index(right)
        vec = [zero] * n
        for target, coeff in rhs.items():
            k = index(target)
            try:
                vec[k] = vec[k] + _scalar(m, coeff)
            except ValueError as exc:
                raise AlgebraError(f"bad coefficient for {names[i]} {names[j]}: {exc}") from None
        vec = tuple(vec)
        if (i, j) in explicit and table[i][j] != vec:
            raise AlgebraError(f"product {names[i]} {names[j]} given twice", (i, j))
        if table[i][j] is not None and (i, j) not in explicit and table[i][j] != vec:
            # only reachable for brackets: conflicts with the filled-in partner
            raise AlgebraError(
                f"anticommutativity violated: {names[i]} {names[j]} != -({names[j]} {names[i]})",
                (i, j),
            )
        table[i][j] = vec
        explicit.add((i, j))
        if kind == "bracket" and (j, i) not in explicit:
            table[j][i] = tuple(-x for x in vec)
    table = tuple(tuple(table[i][j] if table[i][j] is not None else (zero,) * n
                        for j in range(n)) for i in range(n))
    provisional = FinAlg(m, names, table, False, False, str(desc.get("name", "")))

    lie_violation = _lie_violation(provisional)
    assoc_violation = _assoc_violation(provisional)
    if "lie" in flags and lie_violation is not None:
        raise AlgebraError(lie_violation[0], lie_violation[1])
    if "associative" in flags and assoc_violation is not None:
        raise AlgebraError(assoc_violation[0], assoc_violation[1])
    return FinAlg(m, names, table, lie_violation is None, assoc_violation is None, provisional.name)


def _lie_violation(A: FinAlg):
    n = A.dim
    names = A.basis_names
    for i in range(n):
        if any(A.table[i][i]):
            return f"anticommutativity violated: {names[i]} {names[i]} != 0", (i, i)
        for j in range(i + 1, n):
            if any(a + b for a, b in zip(A.table[i][j], A.table[j][i])):
                return (f"anticommutativity violated: {names[i]} {names[j]} != -({names[j]} {names[i]})",
                        (i, j))
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                x, y, z = A.basis_vector(i), A.basis_vector(j), A.basis_vector(k)
                s = _add(_add(multiply(A, x, multiply(A, y, z)),
                              multiply(A, y, multiply(A, z, x))),
                         multiply(A, z, multiply(A, x, y)))
                if any(s):
                    return (f"Jacobi identity fails on ({names[i]}, {names[j]}, {names[k]})",
                            (i, j, k))
    return None


def _assoc_violation(A: FinAlg):
    n = A.dim
    for i, j, k in product(range(n), repeat=3):
        x, y, z = A.basis_vector(i), A.basis_vector(j), A.basis_vector(k)
        if multiply(A, multiply(A, x, y), z) != multiply(A, x, multiply(A, y, z)):
            names = A.basis_names
            return f"associativity fails on ({names[i]}, {names[j]}, {names[k]})", (i, j, k)
    return None


def _add(u, v):
    return tuple(a + b for a, b in zip(u, v))


# ---------------------------------------------------------------------------
# products and structural predicates
# ---------------------------------------------------------------------------

def multiply(A: FinAlg, x: Sequence, y: Sequence) -> tuple:
    if len(x) != A.dim or len(y) != A.dim:
        raise ValueError(f"expected vectors of length {A.dim}")
    out = [CycNum.zero(A.m)] * A.dim
    for i, a in enumerate(x):
        if not a:
            continue
        row = A.table[i]
        for j, b in enumerate(y):
            if not b:
                continue
            ab = a * b
            for k, c in enumerate(row[j]):
                if c:
                    out[k] = out[k] + ab * c
    return tuple(out)


def is_perfect(A: FinAlg) -> bool:
    span = Span()
    for i in range(A.dim):
        for j in range(A.dim):
            span.add({k: c for k, c in enumerate(A.table[i][j]) if c})
    return span.dim == A.dim


@dataclass(frozen=True)
class AlgEndo:
    """Linear endomorphism of A acting on column coordinate vectors."""

    matrix: ExactMatrix

    @classmethod
    def identity(cls, A: FinAlg) -> "AlgEndo":
        return cls(ExactMatrix.identity(A.m, A.dim))

    @classmethod
    def from_rows(cls, A: FinAlg, rows) -> "AlgEndo":
        rows = [[_scalar(A.m, x) for x in r] for r in rows]
        M = ExactMatrix.from_rows(A.m, rows)
        if (M.rows, M.cols) != (A.dim, A.dim):
            raise ValueError(f"expected a {A.dim}x{A.dim} matrix")
        return cls(M)

    def __call__(self, vec: Sequence) -> tuple:
        return self.matrix.apply(vec)

    def __matmul__(self, other: "AlgEndo") -> "AlgEndo":
        return AlgEndo(self.matrix @ other.matrix)

    def __pow__(self, k: int) -> "AlgEndo":
        return AlgEndo(self.matrix ** k)

    def __add__(self, other):
        return AlgEndo(self.matrix + other.matrix)

    def __sub__(self, other):
        return AlgEndo(self.matrix - other.matrix)

    def scale(self, c) -> "AlgEndo":
        return AlgEndo(self.matrix.scale(c))

    def bracket(self, other: "AlgEndo") -> "AlgEndo":
        return self @ other - other @ self

    def is_zero(self) -> bool:
        return self.matrix.is_zero()

    def flat(self) -> dict:
        M = self.matrix
        return {(i, j): M[i, j] for i in range(M.rows) for j in range(M.cols) if M[i, j]}


def _endos_from_solutions(A: FinAlg, sols) -> list:
    n = A.dim
    zero = CycNum.zero(A.m)
    return [AlgEndo(ExactMatrix(A.m, n, n, [s.get((r, c), zero) for r in range(n) for c in range(n)]))
            for s in sols]


def _unknowns(n):
    return [(r, c) for r in range(n) for c in range(n)]


def centroid_equations(A: FinAlg):
    """Rows of the linearised centroid conditions in the unknowns X[r, c]."""
    n, T = A.dim, A.table
    for i in range(n):
        for j in range(n):
            left, right = {}, {}
            for r in range(n):
                lrow, rrow = {}, {}
                for k in range(n):
                    c = T[i][j][k]
                    if c:
                        lrow[(r, k)] = lrow.get((r, k), 0) + c
                        rrow[(r, k)] = rrow.get((r, k), 0) + c
                for p in range(n):
                    c = T[p][j][r]
                    if c:
                        lrow[(p, i)] = lrow.get((p, i), 0) - c
                    c = T[i][p][r]
                    if c:
                        rrow[(p, j)] = rrow.get((p, j), 0) - c
                left[r], right[r] = lrow, rrow
            yield from left.values()
            yield from right.values()


def centroid_basis(A: FinAlg) -> list:
    """Basis of {chi : chi(xy) = chi(x)y = x chi(y)}."""
    sols = homogeneous_solutions(centroid_equations(A), _unknowns(A.dim), A.m)
    return _endos_from_solutions(A, sols)


def is_central(A: FinAlg) -> bool:
    basis = centroid_basis(A)
    if len(basis) != 1:
        return False
    ident = AlgEndo.identity(A).flat()
    span = Span()
    span.add(basis[0].flat())
    return span.contains(ident)


def derivations_of_A(A: FinAlg) -> list:
    """Basis of {D : D(xy) = D(x)y + xD(y)}."""
    n, T = A.dim, A.table
    rows = []
    for i in range(n):
        for j in range(n):
            for r in range(n):
                row = {}
                for k in range(n):
                    c = T[i][j][k]
                    if c:
                        row[(r, k)] = row.get((r, k), 0) + c
                for p in range(n):
                    c = T[p][j][r]
                    if c:
                        row[(p, i)] = row.get((p, i), 0) - c
                    c = T[i][p][r]
                    if c:
                        row[(p, j)] = row.get((p, j), 0) - c
                rows.append(row)
    sols = homogeneous_solutions(rows, _unknowns(n), A.m)
    return _endos_from_solutions(A, sols)


def adjoint(A: FinAlg, x: Sequence) -> AlgEndo:
    """Left multiplication y -> xy."""
    cols = [multiply(A, x, A.basis_vector(j)) for j in range(A.dim)]
    return AlgEndo(ExactMatrix.from_rows(A.m, [[cols[j][i] for j in range(A.dim)] for i in range(A.dim)]))


def satisfies_centroid(A: FinAlg, chi: AlgEndo) -> bool:
    for i in range(A.dim):
        for j in range(A.dim):
            x, y = A.basis_vector(i), A.basis_vector(j)
            cxy = chi(multiply(A, x, y))
            if cxy != multiply(A, chi(x), y) or cxy != multiply(A, x, chi(y)):
                return False
    return True


def is_derivation(A: FinAlg, D: AlgEndo) -> bool:
    for i in range(A.dim):
        for j in range(A.dim):
            x, y = A.basis_vector(i), A.basis_vector(j)
            if D(multiply(A, x, y)) != _add(multiply(A, D(x), y), multiply(A, x, D(y))):
                return False
    return True


# ---------------------------------------------------------------------------
# automorphism tuples
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SigmaTuple:
    sigmas: tuple
    orders: tuple

    @property
    def n(self) -> int:
        return len(self.sigmas)


def automorphism_violation(A: FinAlg, sigma: AlgEndo):
    """First basis pair (i, j) with sigma(x_i x_j) != sigma(x_i) sigma(x_j), or None."""
    images = [sigma(A.basis_vector(i)) for i in range(A.dim)]
    for i in range(A.dim):
        for j in range(A.dim):
            if sigma(A.table[i][j]) != multiply(A, images[i], images[j]):
                return i, j
    return None


def validate_sigma_tuple(A: FinAlg, candidates: Sequence, orders: Sequence[int]) -> SigmaTuple:
    """Check multiplicativity, sigma_i^{m_i} = id and pairwise commutation."""
    if len(candidates) != len(orders):
        raise SigmaError(f"{len(candidates)} automorphisms but {len(orders)} orders")
    sigmas = []
    for idx, cand in enumerate(candidates):
        s = cand if isinstance(cand, AlgEndo) else (
            AlgEndo(cand) if isinstance(cand, ExactMatrix) else AlgEndo.from_rows(A, cand))
        if (s.matrix.rows, s.matrix.cols) != (A.dim, A.dim):
            raise SigmaError(f"sigma_{idx + 1} has the wrong shape")
        m_i = int(orders[idx])
        if m_i < 1:
            raise SigmaError(f"order m_{idx + 1} must be positive")
        bad = automorphism_violation(A, s)
        if bad is not None:
            i, j = bad
            raise SigmaError(
                f"sigma_{idx + 1} is not multiplicative on ({A.basis_names[i]}, {A.basis_names[j]})")
        if s ** m_i != AlgEndo.identity(A):
            raise SigmaError(f"sigma_{idx + 1}^{m_i} != id")
        sigmas.append(s)
    for i in range(len(sigmas)):
        for j in range(i + 1, len(sigmas)):
            if not sigmas[i].bracket(sigmas[j]).is_zero():
                raise SigmaError(f"sigma_{i + 1} and sigma_{j + 1} do not commute")
    return SigmaTuple(tuple(sigmas), tuple(int(x) for x in orders))


def is_rational_endo(e: AlgEndo) -> bool:
    return all(lower(x) is not None for x in e.matrix.entries)
