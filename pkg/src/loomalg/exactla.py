"""Exact arithmetic in Q(xi_m) and exact linear algebra over it.

Elements of the cyclotomic field are stored as residues in Q[x]/(Phi_m(x)),
coefficients low degree first.  Rationals are ``gmpy2.mpq``.

Linear algebra works on sparse rows (``dict`` key -> scalar) through
:class:`Span`, which keeps a reduced row echelon basis and can optionally
track how each stored row was combined from the inputs.  The dense
:class:`ExactMatrix` front end is a thin wrapper used for small
endomorphism matrices.
"""

from __future__ import annotations

import functools
from fractions import Fraction
from numbers import Integral, Rational as _RationalABC
from typing import Hashable, Iterable, Mapping, Sequence

from gmpy2 import mpq

Rational = type(mpq(0))

ZERO = mpq(0)
ONE = mpq(1)


class FieldError(ArithmeticError):
    pass


class ConductorMismatch(FieldError):
    pass


# ---------------------------------------------------------------------------
# polynomials over Q (coefficient tuples, low degree first)
# ---------------------------------------------------------------------------

def _trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(num, den):
    num = _trim(num)
    den = _trim(den)
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    q = [ZERO] * max(len(num) - len(den) + 1, 0)
    lead = den[-1]
    while len(num) >= len(den):
        c = num[-1] / lead
        shift = len(num) - len(den)
        q[shift] = c
        for i, d in enumerate(den):
            num[shift + i] -= c * d
        num.pop()
        num = _trim(num)
    return q, num


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


@functools.cache
def cyclotomic_polynomial(m: int) -> tuple:
    """Coefficients of Phi_m, lowest degree first.

    Computed as (x^m - 1) divided by every Phi_d with d a proper divisor of m.

    >>> [int(c) for c in cyclotomic_polynomial(6)]
    [1, -1, 1]
    """
    if not isinstance(m, Integral) or m < 1:
        raise ValueError(f"conductor must be a positive integer, got {m!r}")
    num = [mpq(-1)] + [ZERO] * (m - 1) + [ONE]
    for d in range(1, m):
        if m % d == 0:
            num, rem = _poly_divmod(num, cyclotomic_polynomial(d))
            if rem:
                raise AssertionError(f"Phi_{d} does not divide x^{m}-1")
    return tuple(mpq(c) for c in num)


def euler_phi(m: int) -> int:
    return len(cyclotomic_polynomial(m)) - 1


@functools.cache
def _power_table(m: int) -> tuple:
    # x^k mod Phi_m for k = 0 .. 2*deg - 2
    phi = cyclotomic_polynomial(m)
    d = len(phi) - 1
    rows = []
    cur = [ZERO] * d
    if d:
        cur[0] = ONE
    for _ in range(max(2 * d - 1, 1)):
        rows.append(tuple(cur))
        # multiply by x and reduce using the monic relation
        top = cur[-1] if d else ZERO
        cur = [ZERO] + cur[:-1]
        if top != 0:
            for i in range(d):
                cur[i] -= top * phi[i]
    return tuple(rows)


def _reduce(m: int, poly) -> tuple:
    d = euler_phi(m)
    out = [ZERO] * d
    table = _power_table(m)
    for k, c in enumerate(poly):
        if c == 0:
            continue
        if k < d:
            out[k] += c
        elif k < len(table):
            for i, t in enumerate(table[k]):
                if t != 0:
                    out[i] += c * t
        else:
            _, rem = _poly_divmod([ZERO] * k + [c], cyclotomic_polynomial(m))
            for i, t in enumerate(rem):
                out[i] += t
    return tuple(out)


def _to_rational(x) -> Rational:
    if isinstance(x, Rational):
        return x
    if isinstance(x, (Integral, Fraction, _RationalABC)):
        return mpq(x)
    if isinstance(x, str):
        return mpq(x)
    raise TypeError(f"cannot interpret {x!r} as a rational number")


# ---------------------------------------------------------------------------
# cyclotomic numbers
# ---------------------------------------------------------------------------

class CycNum:
    """An element of Q(xi_m), immutable.

    ``CycNum(4, [0, 1])`` is xi_4.  Plain integers and rationals coerce into
    the field of the other operand.
    """

    __slots__ = ("m", "c")

    def __init__(self, m: int, coeffs: Iterable = ()):
        d = euler_phi(m)
        c = [_to_rational(x) for x in coeffs]
        if len(c) > d:
            c = list(_reduce(m, c))
        c += [ZERO] * (d - len(c))
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "c", tuple(c))

    @classmethod
    def _make(cls, m, c):
        obj = object.__new__(cls)
        object.__setattr__(obj, "m", m)
        object.__setattr__(obj, "c", c)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("CycNum is immutable")

    @classmethod
    def rational(cls, m: int, q) -> "CycNum":
        d = euler_phi(m)
        return cls._make(m, (_to_rational(q),) + (ZERO,) * (d - 1))

    @classmethod
    def zero(cls, m: int) -> "CycNum":
        return cls._make(m, (ZERO,) * euler_phi(m))

    @classmethod
    def one(cls, m: int) -> "CycNum":
        return cls.rational(m, 1)

    @classmethod
    def root_power(cls, m: int, k: int) -> "CycNum":
        """xi_m ** k, as the residue of x^k."""
        k %= m
        return cls._make(m, _reduce(m, [ZERO] * k + [ONE]))

    # -- predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.c)

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def __bool__(self):
        return any(self.c)

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, CycNum):
            if other.m != self.m:
                raise ConductorMismatch(f"conductors {self.m} and {other.m} differ")
            return other
        try:
            q = _to_rational(other)
        except TypeError:
            return NotImplemented
        return CycNum.rational(self.m, q)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycNum._make(self.m, tuple(a + b for a, b in zip(self.c, other.c)))

    __radd__ = __add__

    def __neg__(self):
        return CycNum._make(self.m, tuple(-a for a in self.c))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycNum._make(self.m, tuple(a - b for a, b in zip(self.c, other.c)))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        if not isinstance(other, CycNum):
            try:
                q = _to_rational(other)
            except TypeError:
                return NotImplemented
            return CycNum._make(self.m, tuple(a * q for a in self.c))
        if other.m != self.m:
            raise ConductorMismatch(f"conductors {self.m} and {other.m} differ")
        if len(self.c) == 1:
            return CycNum._make(self.m, (self.c[0] * other.c[0],))
        return CycNum._make(self.m, _reduce(self.m, _poly_mul(self.c, other.c)))

    __rmul__ = __mul__

    def inverse(self) -> "CycNum":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(xi_m)")
        if self.is_rational():
            return CycNum.rational(self.m, 1 / self.c[0])
        # extended Euclid: s*a + t*Phi = g, g a nonzero constant
        r0, r1 = list(cyclotomic_polynomial(self.m)), _trim(self.c)
        s0, s1 = [], [ONE]
        while len(r1) > 1:
            q, r = _poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        g = r1[0]
        return CycNum(self.m, [x / g for x in _reduce(self.m, s1)])

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = CycNum.one(self.m)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, CycNum):
            return self.m == other.m and self.c == other.c
        try:
            q = _to_rational(other)
        except TypeError:
            return NotImplemented
        return self.is_rational() and self.c[0] == q

    def __hash__(self):
        if self.is_rational():
            return hash(self.c[0])
        return hash((self.m, self.c))

    def __repr__(self):
        return f"CycNum({self.m}, {self})"

    def __str__(self):
        return format_cyc(self)


def _poly_sub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [ZERO] * (n - len(a))
    b = list(b) + [ZERO] * (n - len(b))
    return _trim([x - y for x, y in zip(a, b)])


def root_power(m: int, k: int) -> CycNum:
    return CycNum.root_power(m, k)


def format_cyc(x: CycNum, var: str = "z") -> str:
    """Exact text form, e.g. ``3/2 - z^2``; parsed back by :func:`parse_cyc`."""
    terms = []
    for k, q in enumerate(x.c):
        if q == 0:
            continue
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        if not mono:
            body = str(abs(q))
        elif abs(q) == 1:
            body = mono
        else:
            body = f"{abs(q)}*{mono}"
        terms.append(("-" if q < 0 else "+", body))
    if not terms:
        return "0"
    head_sign, head = terms[0]
    out = ("-" if head_sign == "-" else "") + head
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def parse_cyc(text: str, m: int, var: str = "z") -> CycNum:
    """Parse ``p/q``, ``z^k``, ``p/q*z^k`` and sums of those.

    ``var`` denotes xi_m.  Whitespace is ignored.
    """
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty coefficient")
    total = CycNum.zero(m)
    i = 0
    while i < len(s):
        sign = 1
        while i < len(s) and s[i] in "+-":
            if s[i] == "-":
                sign = -sign
            i += 1
        j = i
        while j < len(s) and s[j] not in "+-":
            j += 1
        term = s[i:j]
        if not term:
            raise ValueError(f"malformed coefficient {text!r}")
        total = total + sign * _parse_term(term, m, var)
        i = j
    return total


def _parse_term(term: str, m: int, var: str) -> CycNum:
    factor = CycNum.one(m)
    for piece in term.split("*"):
        if not piece:
            raise ValueError(f"malformed term {term!r}")
        if piece.startswith(var):
            rest = piece[len(var):]
            if not rest:
                k = 1
            elif rest.startswith("^"):
                k = int(rest[1:])
            else:
                raise ValueError(f"malformed power {piece!r}")
            factor = factor * CycNum.root_power(m, k)
        else:
            try:
                factor = factor * mpq(piece)
            except ValueError:
                raise ValueError(f"malformed rational {piece!r}") from None
    return factor


# ---------------------------------------------------------------------------
# sparse row reduction
# ---------------------------------------------------------------------------

class Span:
    """Subspace spanned by sparse vectors, kept in reduced row echelon form.

    Vectors are mappings from sortable keys to field scalars (``mpq`` or
    :class:`CycNum`; they must not be mixed inside one Span).  With
    ``track=True`` every stored row remembers the combination of added input
    labels it came from, so :meth:`coordinates` can express a member of the
    span in terms of the inputs.
    """

    def __init__(self, track: bool = False):
        self.track = track
        self._rows: dict = {}      # pivot key -> row dict, row[pivot] == 1
        self._combos: dict = {}    # pivot key -> {label: coeff}
        self._labels: list = []

    def __len__(self):
        return len(self._rows)

    @property
    def dim(self) -> int:
        return len(self._rows)

    @property
    def labels(self) -> list:
        """Labels of the inputs that were independent when added."""
        return list(self._labels)

    def reduce(self, vec: Mapping):
        """Return (remainder, combo) with vec = remainder + sum(combo[l] * input_l)."""
        r = {k: (mpq(v) if isinstance(v, int) else v) for k, v in vec.items() if v}
        combo: dict = {}
        for k in [k for k in r if k in self._rows]:
            c = r.get(k)
            if not c:
                continue
            for kk, vv in self._rows[k].items():
                nv = r.get(kk, 0) - c * vv
                if nv:
                    r[kk] = nv
                else:
                    r.pop(kk, None)
            if self.track:
                for lab, w in self._combos[k].items():
                    nv = combo.get(lab, 0) + c * w
                    if nv:
                        combo[lab] = nv
                    else:
                        combo.pop(lab, None)
        return r, combo

    def add(self, vec: Mapping, label: Hashable = None) -> bool:
        """Insert a vector; return False if it was already in the span."""
        r, combo = self.reduce(vec)
        if not r:
            return False
        p = min(r)
        inv = 1 / r[p]
        r = {k: v * inv for k, v in r.items()}
        if self.track:
            row_combo = {lab: -w * inv for lab, w in combo.items()}
            row_combo[label] = row_combo.get(label, 0) + inv
            row_combo = {lab: w for lab, w in row_combo.items() if w}
        for q, row in self._rows.items():
            c = row.get(p)
            if c:
                for kk, vv in r.items():
                    nv = row.get(kk, 0) - c * vv
                    if nv:
                        row[kk] = nv
                    else:
                        row.pop(kk, None)
                if self.track:
                    qc = self._combos[q]
                    for lab, w in row_combo.items():
                        nv = qc.get(lab, 0) - c * w
                        if nv:
                            qc[lab] = nv
                        else:
                            qc.pop(lab, None)
        self._rows[p] = r
        if self.track:
            self._combos[p] = row_combo
        self._labels.append(label)
        return True

    def contains(self, vec: Mapping) -> bool:
        r, _ = self.reduce(vec)
        return not r

    def coordinates(self, vec: Mapping):
        """Combination of input labels giving ``vec``, or None if outside the span."""
        if not self.track:
            raise ValueError("coordinates need a tracking Span")
        r, combo = self.reduce(vec)
        if r:
            return None
        return combo

    def pivots(self) -> list:
        return sorted(self._rows)

    def rows(self) -> dict:
        return {p: dict(row) for p, row in self._rows.items()}

    def null_basis(self, keys: Sequence) -> list:
        """Basis of {x : row . x = 0 for every stored row}, over the given keys.

        Each basis vector is a dict; one per free key, in ``keys`` order.
        """
        free = [k for k in keys if k not in self._rows]
        basis = []
        for f in free:
            vec = {f: ONE}
            for p, row in self._rows.items():
                c = row.get(f)
                if c:
                    vec[p] = -c
            basis.append(vec)
        return basis


def intersection_dim(a: Iterable[Mapping], b: Iterable[Mapping]) -> int:
    """dim(span a  cap  span b) via dim a + dim b - dim(a + b)."""
    sa, sb, ssum = Span(), Span(), Span()
    for v in a:
        sa.add(v)
        ssum.add(v)
    for v in b:
        sb.add(v)
        ssum.add(v)
    return sa.dim + sb.dim - ssum.dim


# ---------------------------------------------------------------------------
# dense matrices
# ---------------------------------------------------------------------------

def lower(x):
    """CycNum -> mpq when the value is rational; None otherwise."""
    if isinstance(x, CycNum):
        return x.c[0] if x.is_rational() else None
    return _to_rational(x)


class ExactMatrix:
    """Dense rows x cols matrix of CycNum sharing one conductor."""

    __slots__ = ("rows", "cols", "m", "entries")

    def __init__(self, m: int, rows: int, cols: int, entries: Iterable):
        entries = tuple(x if isinstance(x, CycNum) else CycNum.rational(m, x) for x in entries)
        if len(entries) != rows * cols:
            raise ValueError(f"expected {rows * cols} entries, got {len(entries)}")
        for x in entries:
            if x.m != m:
                raise ConductorMismatch(f"entry conductor {x.m} != {m}")
        self.m = m
        self.rows = rows
        self.cols = cols
        self.entries = entries

    @classmethod
    def from_rows(cls, m: int, rows: Sequence[Sequence], cols: int | None = None) -> "ExactMatrix":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else (cols or 0)
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        return cls(m, len(rows), ncols, [x for r in rows for x in r])

    @classmethod
    def identity(cls, m: int, n: int) -> "ExactMatrix":
        return cls(m, n, n, [ONE if i == j else ZERO for i in range(n) for j in range(n)])

    @classmethod
    def zeros(cls, m: int, rows: int, cols: int) -> "ExactMatrix":
        return cls(m, rows, cols, [ZERO] * (rows * cols))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple:
        return self.entries[j::self.cols]

    def to_rows(self) -> list:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.m, self.cols, self.rows,
                           [self[i, j] for j in range(self.cols) for i in range(self.rows)])

    def __matmul__(self, other):
        if isinstance(other, ExactMatrix):
            if self.cols != other.rows:
                raise ValueError("shape mismatch")
            out = []
            for i in range(self.rows):
                r = self.row(i)
                for j in range(other.cols):
                    acc = CycNum.zero(self.m)
                    for k, x in enumerate(r):
                        if x:
                            y = other[k, j]
                            if y:
                                acc = acc + x * y
                    out.append(acc)
            return ExactMatrix(self.m, self.rows, other.cols, out)
        return self.apply(other)

    def apply(self, vec: Sequence) -> tuple:
        if len(vec) != self.cols:
            raise ValueError("shape mismatch")
        out = []
        for i in range(self.rows):
            acc = CycNum.zero(self.m)
            for x, y in zip(self.row(i), vec):
                if x and y:
                    acc = acc + x * y
            out.append(acc)
        return tuple(out)

    def __add__(self, other):
        self._check_shape(other)
        return ExactMatrix(self.m, self.rows, self.cols, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other):
        self._check_shape(other)
        return ExactMatrix(self.m, self.rows, self.cols, [a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self):
        return ExactMatrix(self.m, self.rows, self.cols, [-a for a in self.entries])

    def scale(self, c) -> "ExactMatrix":
        return ExactMatrix(self.m, self.rows, self.cols, [a * c for a in self.entries])

    def __pow__(self, k: int) -> "ExactMatrix":
        if self.rows != self.cols or k < 0:
            raise ValueError("power needs a square matrix and k >= 0")
        result = ExactMatrix.identity(self.m, self.rows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def _check_shape(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")

    def is_zero(self) -> bool:
        return not any(self.entries)

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.entries) == (other.rows, other.cols, other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        body = "; ".join(", ".join(str(x) for x in self.row(i)) for i in range(self.rows))
        return f"ExactMatrix[{self.rows}x{self.cols}]({body})"

    # -- linear algebra ---------------------------------------------------
    def _row_span(self, extra_col: Sequence | None = None) -> tuple[Span, bool]:
        rational = all(x.is_rational() for x in self.entries)
        if extra_col is not None:
            rational = rational and all(lower(x) is not None for x in extra_col)
        conv = (lambda x: x.c[0]) if rational else (lambda x: x)
        span = Span()
        for i in range(self.rows):
            row = {j: conv(x) for j, x in enumerate(self.row(i)) if x}
            if extra_col is not None and extra_col[i]:
                row[self.cols] = conv(_as_cyc(self.m, extra_col[i]))
            span.add(row)
        return span, rational

    def rank(self) -> int:
        return self._row_span()[0].dim

    def nullspace(self) -> list:
        """Basis of the right kernel as tuples of CycNum (RREF order)."""
        span, rational = self._row_span()
        basis = span.null_basis(range(self.cols))
        return [self._densify(v, self.cols, rational) for v in basis]

    def solve(self, rhs: Sequence):
        """One solution x of self @ x = rhs, or None if inconsistent."""
        if len(rhs) != self.rows:
            raise ValueError("shape mismatch")
        span, rational = self._row_span(rhs)
        rows = span.rows()
        if self.cols in rows:
            return None
        x = {}
        for p, row in rows.items():
            x[p] = row.get(self.cols, 0)
        return self._densify(x, self.cols, rational)

    def _densify(self, vec: Mapping, n: int, rational: bool) -> tuple:
        m = self.m
        if rational:
            return tuple(CycNum.rational(m, vec.get(j, ZERO)) for j in range(n))
        return tuple(_as_cyc(m, vec.get(j, ZERO)) for j in range(n))


def _as_cyc(m, x) -> CycNum:
    return x if isinstance(x, CycNum) else CycNum.rational(m, x)


def nullspace(M: ExactMatrix) -> list:
    return M.nullspace()


def rank(M: ExactMatrix) -> int:
    return M.rank()


def solve(M: ExactMatrix, rhs: Sequence):
    return M.solve(rhs)


def vectors_rank(vectors: Sequence[Sequence]) -> int:
    span = Span()
    for v in vectors:
        span.add({i: x for i, x in enumerate(v) if x})
    return span.dim


def subspace_membership(v: Sequence, S: Sequence[Sequence], m: int | None = None):
    """(True, coords) if v lies in span(S), else (False, None).

    ``coords`` has one entry per element of S; dependent members of S get 0.
    """
    if m is None:
        m = next((x.m for x in v if isinstance(x, CycNum)), 1)
    span = Span(track=True)
    for i, s in enumerate(S):
        if len(s) != len(v):
            raise ValueError("dimension mismatch")
        span.add({j: x for j, x in enumerate(s) if x}, label=i)
    combo = span.coordinates({j: x for j, x in enumerate(v) if x})
    if combo is None:
        return False, None
    return True, tuple(_as_cyc(m, combo.get(i, ZERO)) for i in range(len(S)))


def homogeneous_solutions(rows: Iterable[Mapping], keys: Sequence, m: int) -> list:
    """Basis (dicts key -> CycNum) of the common kernel of sparse equation rows.

    Runs over Q when every coefficient is rational.
    """
    rows = [r for r in rows if r]
    rational = all(lower(x) is not None for r in rows for x in r.values())
    span = Span()
    if rational:
        for r in rows:
            span.add({k: lower(x) for k, x in r.items() if x})
    else:
        for r in rows:
            span.add({k: _as_cyc(m, x) for k, x in r.items() if x})
    return [{k: _as_cyc(m, x) for k, x in v.items()} for v in span.null_basis(keys)]
