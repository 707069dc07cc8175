"""Exact scalar arithmetic and exact linear algebra.

Three scalar kinds, closed under the operations the rest of the package
needs:

* ``fractions.Fraction`` for rational numbers,
* :class:`CycScalar` for elements of a cyclotomic field Q(zeta_m), stored as
  coordinate vectors in the power basis 1, zeta, ..., zeta^(phi(m)-1),
* :class:`Jet` for dual numbers a + eps*b with eps^2 = 0, used to carry a
  value together with one exact directional derivative.

:class:`Matrix` is a dense exact matrix over any mix of these kinds, with
Gaussian elimination for kernels and linear solves.  No floating point
anywhere.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence, Union

from sympy import cyclotomic_poly, symbols


class DomainError(Exception):
    """Base class for all domain-level failures raised by this package."""


class NoSolution(DomainError):
    """An exact linear system turned out to be inconsistent."""


Rational = Fraction

ScalarLike = Union[int, Fraction, "CycScalar", "Jet"]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected a rational number, got {type(x).__name__}")


def rational_to_str(q: Fraction) -> str:
    """Serialize a rational as "p" or "p/q" (lowest terms, q > 0)."""
    q = _frac(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def rational_from_str(s: str) -> Fraction:
    """Parse "p" or "p/q" into a Fraction."""
    if not isinstance(s, str):
        raise ValueError(f"rational JSON value must be a string, got {s!r}")
    return Fraction(s)


_CYC_CACHE: dict = {}


def _cyc_data(m: int):
    """Reduction data for Q(zeta_m): (phi(m), power table x^k mod Phi_m).

    The table covers exponents 0 .. max(2*phi(m) - 2, m), enough for products
    of basis vectors and for exponent arithmetic mod m.
    """
    if m in _CYC_CACHE:
        return _CYC_CACHE[m]
    if not isinstance(m, int) or m < 1:
        raise ValueError(f"conductor must be a positive integer, got {m!r}")
    x = symbols("x")
    coeffs = [Fraction(int(c)) for c in cyclotomic_poly(m, x).as_poly(x).all_coeffs()]
    phi = len(coeffs) - 1
    # x^phi = -(c_1 x^(phi-1) + ... + c_phi), Phi_m monic.
    top = [-c for c in reversed(coeffs[1:])]
    table = [
        tuple(Fraction(1) if i == k else Fraction(0) for i in range(phi))
        for k in range(phi)
    ]
    limit = max(2 * phi - 2, m)
    for k in range(phi, limit + 1):
        prev = table[k - 1]
        shifted = [Fraction(0)] + list(prev[: phi - 1])
        lead = prev[phi - 1]
        if lead:
            shifted = [s + lead * t for s, t in zip(shifted, top)]
        table.append(tuple(shifted))
    _CYC_CACHE[m] = (phi, table)
    return _CYC_CACHE[m]


class CycScalar:
    """An element of Q(zeta_m) with exact rational coordinates.

    The conductor m is part of the value.  Mixed-conductor arithmetic lifts
    both operands into Q(zeta_lcm) first, so equal values compare equal even
    when built at different conductors.
    """

    __slots__ = ("conductor", "coeffs")

    def __init__(self, conductor: int, coeffs: Sequence):
        phi, _ = _cyc_data(conductor)
        coeffs = tuple(_frac(c) for c in coeffs)
        if len(coeffs) != phi:
            raise ValueError(
                f"conductor {conductor} needs {phi} coordinates, got {len(coeffs)}"
            )
        self.conductor = conductor
        self.coeffs = coeffs

    @classmethod
    def from_rational(cls, q, conductor: int = 1) -> "CycScalar":
        phi, _ = _cyc_data(conductor)
        return cls(conductor, (_frac(q),) + (Fraction(0),) * (phi - 1))

    @classmethod
    def zeta(cls, m: int, power: int = 1) -> "CycScalar":
        """The root of unity zeta_m**power as an element of Q(zeta_m)."""
        phi, table = _cyc_data(m)
        return cls(m, table[power % m])

    def _lifted_coeffs(self, target: int) -> tuple:
        """Coordinates of self inside Q(zeta_target); self.conductor | target."""
        if target == self.conductor:
            return self.coeffs
        step = target // self.conductor
        phi, table = _cyc_data(target)
        out = [Fraction(0)] * phi
        for j, c in enumerate(self.coeffs):
            if not c:
                continue
            row = table[(j * step) % target]
            for i in range(phi):
                if row[i]:
                    out[i] += c * row[i]
        return tuple(out)

    def _pair(self, other):
        """Promote self and another scalar to a common conductor."""
        if isinstance(other, CycScalar):
            if other.conductor == self.conductor:
                return self.coeffs, other.coeffs, self.conductor
            m = math.lcm(self.conductor, other.conductor)
            return self._lifted_coeffs(m), other._lifted_coeffs(m), m
        if isinstance(other, (int, Fraction)):
            o = CycScalar.from_rational(other, 1)
            return self._pair(o)
        return None

    def __add__(self, other):
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        a, b, m = pair
        return CycScalar(m, tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __sub__(self, other):
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        a, b, m = pair
        return CycScalar(m, tuple(x - y for x, y in zip(a, b)))

    def __rsub__(self, other):
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        a, b, m = pair
        return CycScalar(m, tuple(y - x for x, y in zip(a, b)))

    def __neg__(self):
        return CycScalar(self.conductor, tuple(-c for c in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            f = _frac(other)
            return CycScalar(self.conductor, tuple(c * f for c in self.coeffs))
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        a, b, m = pair
        phi, table = _cyc_data(m)
        out = [Fraction(0)] * phi
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                if not bj:
                    continue
                c = ai * bj
                if i + j < phi:
                    out[i + j] += c
                else:
                    row = table[i + j]
                    for t in range(phi):
                        if row[t]:
                            out[t] += c * row[t]
        return CycScalar(m, tuple(out))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            f = _frac(other)
            if f == 0:
                raise ZeroDivisionError("division by zero")
            return CycScalar(self.conductor, tuple(c / f for c in self.coeffs))
        if isinstance(other, CycScalar):
            return self * other.inv()
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycScalar.from_rational(other, 1) * self.inv()
        return NotImplemented

    def inv(self) -> "CycScalar":
        """Multiplicative inverse; Q(zeta_m) is a field, so any nonzero
        element is invertible."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        phi, table = _cyc_data(self.conductor)
        # Columns: coordinates of self * zeta^j.
        cols = []
        basis = [CycScalar.zeta(self.conductor, j) if j else None for j in range(phi)]
        for j in range(phi):
            prod = self if j == 0 else self * basis[j]
            cols.append(prod.coeffs)
        mat = Matrix([[cols[j][i] for j in range(phi)] for i in range(phi)])
        rhs = Matrix([[Fraction(1) if i == 0 else Fraction(0)] for i in range(phi)])
        sol = mat.solve(rhs)
        return CycScalar(self.conductor, tuple(sol.entries[i][0] for i in range(phi)))

    def subst_power(self, k: int) -> "CycScalar":
        """Apply the substitution zeta -> zeta^k (a Galois map when
        gcd(k, m) = 1)."""
        m = self.conductor
        phi, table = _cyc_data(m)
        out = [Fraction(0)] * phi
        for j, c in enumerate(self.coeffs):
            if not c:
                continue
            row = table[(j * k) % m]
            for i in range(phi):
                if row[i]:
                    out[i] += c * row[i]
        return CycScalar(m, tuple(out))

    def conjugate(self) -> "CycScalar":
        """Complex conjugation zeta -> zeta^(m-1)."""
        return self.subst_power(self.conductor - 1)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.coeffs[0]

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, Jet):
            return NotImplemented
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        if isinstance(other, CycScalar):
            pair = self._pair(other)
            a, b, _ = pair
            return a == b
        return NotImplemented

    __hash__ = None  # mixed-conductor equality makes a sound hash expensive

    def to_json(self):
        return {
            "conductor": self.conductor,
            "coeffs": [rational_to_str(c) for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, obj) -> "CycScalar":
        if not isinstance(obj, dict) or set(obj) != {"conductor", "coeffs"}:
            raise ValueError(f"not a cyclotomic JSON value: {obj!r}")
        return cls(obj["conductor"], [rational_from_str(c) for c in obj["coeffs"]])

    def __repr__(self):
        body = ", ".join(rational_to_str(c) for c in self.coeffs)
        return f"CycScalar({self.conductor}, [{body}])"


class Jet:
    """Dual number value + eps*derivative with eps^2 = 0.

    Both parts may be rational or cyclotomic.  Division requires the value
    part to be nonzero.
    """

    __slots__ = ("value", "derivative")

    def __init__(self, value, derivative=0):
        if isinstance(value, Jet) or isinstance(derivative, Jet):
            raise TypeError("Jet parts must be base scalars, not Jets")
        self.value = _coerce_base(value)
        self.derivative = _coerce_base(derivative)

    @staticmethod
    def _lift(x) -> "Jet":
        if isinstance(x, Jet):
            return x
        return Jet(x, 0)

    def __add__(self, other):
        if not isinstance(other, (Jet, int, Fraction, CycScalar)):
            return NotImplemented
        o = Jet._lift(other)
        return Jet(self.value + o.value, self.derivative + o.derivative)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, (Jet, int, Fraction, CycScalar)):
            return NotImplemented
        o = Jet._lift(other)
        return Jet(self.value - o.value, self.derivative - o.derivative)

    def __rsub__(self, other):
        if not isinstance(other, (Jet, int, Fraction, CycScalar)):
            return NotImplemented
        o = Jet._lift(other)
        return Jet(o.value - self.value, o.derivative - self.derivative)

    def __neg__(self):
        return Jet(-self.value, -self.derivative)

    def __mul__(self, other):
        if not isinstance(other, (Jet, int, Fraction, CycScalar)):
            return NotImplemented
        o = Jet._lift(other)
        return Jet(
            self.value * o.value,
            self.value * o.derivative + self.derivative * o.value,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, (Jet, int, Fraction, CycScalar)):
            return NotImplemented
        o = Jet._lift(other)
        if scalar_is_zero(o.value):
            raise ZeroDivisionError("Jet division needs an invertible value part")
        inv = scalar_inv(o.value)
        val = self.value * inv
        return Jet(val, (self.derivative - val * o.derivative) * inv)

    def __rtruediv__(self, other):
        if not isinstance(other, (int, Fraction, CycScalar)):
            return NotImplemented
        return Jet._lift(other) / self

    def is_zero(self) -> bool:
        return scalar_is_zero(self.value) and scalar_is_zero(self.derivative)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if not isinstance(other, (Jet, int, Fraction, CycScalar)):
            return NotImplemented
        o = Jet._lift(other)
        return self.value == o.value and self.derivative == o.derivative

    __hash__ = None

    def __repr__(self):
        return f"Jet({self.value!r}, {self.derivative!r})"


def _coerce_base(x):
    if isinstance(x, (Fraction, CycScalar)):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"not an exact base scalar: {type(x).__name__}")


def scalar_is_zero(x) -> bool:
    """Exact zero test across all scalar kinds."""
    if isinstance(x, (CycScalar, Jet)):
        return x.is_zero()
    return _frac(x) == 0


def scalar_is_unit(x) -> bool:
    """Whether x is invertible (for a Jet: value part nonzero)."""
    if isinstance(x, Jet):
        return not scalar_is_zero(x.value)
    return not scalar_is_zero(x)


def scalar_inv(x):
    if isinstance(x, Jet):
        return Jet(1, 0) / x
    if isinstance(x, CycScalar):
        return x.inv()
    f = _frac(x)
    if f == 0:
        raise ZeroDivisionError("inverse of zero")
    return 1 / f


def cyc_conjugate(x):
    """Complex conjugation, extended to rationals (identity) and Jets
    (partwise)."""
    if isinstance(x, CycScalar):
        return x.conjugate()
    if isinstance(x, Jet):
        return Jet(cyc_conjugate(x.value), cyc_conjugate(x.derivative))
    return _frac(x)


def scalar_to_json(x):
    """Canonical JSON form: "p/q" for rationals, conductor/coeffs object for
    cyclotomics."""
    if isinstance(x, CycScalar):
        if x.is_rational():
            return rational_to_str(x.rational_value())
        return x.to_json()
    if isinstance(x, Jet):
        raise TypeError("Jets are internal and have no JSON form")
    return rational_to_str(_frac(x))


def scalar_from_json(obj):
    if isinstance(obj, str):
        return rational_from_str(obj)
    if isinstance(obj, int):
        return Fraction(obj)
    if isinstance(obj, dict):
        return CycScalar.from_json(obj)
    raise ValueError(f"not a scalar JSON value: {obj!r}")


class Matrix:
    """Dense exact matrix.  Entries may be Fraction, CycScalar, or Jet.

    Immutable; all operations return new matrices.  Elimination picks the
    first invertible entry in each column, so results are deterministic.
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence]):
        rows = [tuple(_coerce_entry(e) for e in row) for row in entries]
        if not rows:
            raise ValueError("use Matrix.zero(0, c) for empty matrices")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged rows")
        self.rows = len(rows)
        self.cols = width
        self.entries = tuple(rows)

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, rows: int, cols: int) -> "Matrix":
        if rows < 0 or cols < 0:
            raise ValueError("negative matrix shape")
        m = object.__new__(cls)
        m.rows = rows
        m.cols = cols
        m.entries = tuple(tuple(Fraction(0) for _ in range(cols)) for _ in range(rows))
        return m

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        m = object.__new__(cls)
        m.rows = n
        m.cols = n
        m.entries = tuple(
            tuple(Fraction(1 if i == j else 0) for j in range(n)) for i in range(n)
        )
        return m

    @classmethod
    def diag(cls, values: Sequence) -> "Matrix":
        n = len(values)
        vals = [_coerce_entry(v) for v in values]
        return cls.zero(n, n) if n == 0 else cls(
            [[vals[i] if i == j else Fraction(0) for j in range(n)] for i in range(n)]
        )

    @classmethod
    def column(cls, values: Sequence) -> "Matrix":
        return cls([[v] for v in values]) if values else cls.zero(0, 1)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int = None) -> "Matrix":
        if not columns:
            if rows is None:
                raise ValueError("need an explicit row count for zero columns")
            return cls.zero(rows, 0)
        height = len(columns[0])
        if height == 0:
            return cls.zero(0, len(columns))
        return cls([[col[i] for col in columns] for i in range(height)])

    @classmethod
    def hcat(cls, blocks: Sequence["Matrix"]) -> "Matrix":
        blocks = list(blocks)
        if not blocks:
            raise ValueError("hcat of nothing")
        r = blocks[0].rows
        if any(b.rows != r for b in blocks):
            raise ValueError("hcat blocks must share a row count")
        m = object.__new__(cls)
        m.rows = r
        m.cols = sum(b.cols for b in blocks)
        m.entries = tuple(
            tuple(e for b in blocks for e in b.entries[i]) for i in range(r)
        )
        return m

    @classmethod
    def vcat(cls, blocks: Sequence["Matrix"]) -> "Matrix":
        blocks = list(blocks)
        if not blocks:
            raise ValueError("vcat of nothing")
        c = blocks[0].cols
        if any(b.cols != c for b in blocks):
            raise ValueError("vcat blocks must share a column count")
        m = object.__new__(cls)
        m.rows = sum(b.rows for b in blocks)
        m.cols = c
        m.entries = tuple(row for b in blocks for row in b.entries)
        return m

    @classmethod
    def block(cls, grid: Sequence[Sequence["Matrix"]]) -> "Matrix":
        return cls.vcat([cls.hcat(row) for row in grid])

    # -- basic operations ---------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        self._same_shape(other)
        return self._new(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ]
        )

    def __sub__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        self._same_shape(other)
        return self._new(
            [
                [a - b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ]
        )

    def __neg__(self):
        return self._new([[-a for a in row] for row in self.entries])

    def __mul__(self, other):
        if isinstance(other, Matrix):
            if self.cols != other.rows:
                raise ValueError(
                    f"cannot multiply {self.rows}x{self.cols} by "
                    f"{other.rows}x{other.cols}"
                )
            cols = list(zip(*other.entries)) if other.rows else []
            out = []
            for row in self.entries:
                if self.cols == 0:
                    out.append([Fraction(0)] * other.cols)
                    continue
                out.append(
                    [_dot(row, col) for col in cols]
                    if cols
                    else [Fraction(0)] * other.cols
                )
            m = object.__new__(Matrix)
            m.rows = self.rows
            m.cols = other.cols
            m.entries = tuple(tuple(r) for r in out)
            return m
        if isinstance(other, (int, Fraction, CycScalar, Jet)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, CycScalar, Jet)):
            return self.scale(other)
        return NotImplemented

    def scale(self, s) -> "Matrix":
        s = _coerce_entry(s)
        return self._new([[a * s for a in row] for row in self.entries])

    def transpose(self) -> "Matrix":
        m = object.__new__(Matrix)
        m.rows = self.cols
        m.cols = self.rows
        m.entries = tuple(zip(*self.entries)) if self.rows else tuple(
            () for _ in range(self.cols)
        )
        m.entries = tuple(tuple(r) for r in m.entries)
        return m

    def trace(self):
        if self.rows != self.cols:
            raise ValueError("trace of a non-square matrix")
        total = Fraction(0)
        for i in range(self.rows):
            total = total + self.entries[i][i]
        return total

    def map(self, fn) -> "Matrix":
        return self._new([[fn(a) for a in row] for row in self.entries])

    def submatrix(self, row_idx: Iterable[int], col_idx: Iterable[int]) -> "Matrix":
        rs = list(row_idx)
        cs = list(col_idx)
        m = object.__new__(Matrix)
        m.rows = len(rs)
        m.cols = len(cs)
        m.entries = tuple(tuple(self.entries[i][j] for j in cs) for i in rs)
        return m

    def row(self, i: int) -> tuple:
        return self.entries[i]

    def col(self, j: int) -> tuple:
        return tuple(self.entries[i][j] for i in range(self.rows))

    def is_zero(self) -> bool:
        return all(scalar_is_zero(a) for row in self.entries for a in row)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.rows != other.rows or self.cols != other.cols:
            return False
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        body = "; ".join(
            " ".join(_entry_repr(a) for a in row) for row in self.entries
        )
        return f"Matrix({self.rows}x{self.cols}: {body})"

    def _new(self, entries) -> "Matrix":
        m = object.__new__(Matrix)
        m.rows = self.rows
        m.cols = self.cols
        m.entries = tuple(tuple(r) for r in entries)
        return m

    def _same_shape(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError(
                f"shape mismatch: {self.rows}x{self.cols} vs "
                f"{other.rows}x{other.cols}"
            )

    def has_jets(self) -> bool:
        return any(isinstance(a, Jet) for row in self.entries for a in row)

    def jet_parts(self) -> tuple:
        """Split into (value part, derivative part) as base-scalar
        matrices."""
        val = [[a.value if isinstance(a, Jet) else a for a in row] for row in self.entries]
        der = [
            [a.derivative if isinstance(a, Jet) else Fraction(0) for a in row]
            for row in self.entries
        ]
        m1 = self._new(val)
        m2 = self._new(der)
        return m1, m2

    # -- elimination ---------------------------------------------------

    def _echelon(self):
        """Row-reduce a working copy; returns (rows, pivot column list).

        Base scalars only.  Pivot choice: first row with a nonzero entry in
        the leftmost unresolved column.
        """
        work = [list(row) for row in self.entries]
        pivots = []
        r = 0
        for c in range(self.cols):
            pivot_row = None
            for i in range(r, self.rows):
                if not scalar_is_zero(work[i][c]):
                    pivot_row = i
                    break
            if pivot_row is None:
                continue
            work[r], work[pivot_row] = work[pivot_row], work[r]
            inv = scalar_inv(work[r][c])
            work[r] = [e * inv for e in work[r]]
            for i in range(self.rows):
                if i != r and not scalar_is_zero(work[i][c]):
                    f = work[i][c]
                    work[i] = [e - f * p for e, p in zip(work[i], work[r])]
            pivots.append(c)
            r += 1
            if r == self.rows:
                break
        return work, pivots

    def rank(self) -> int:
        if self.has_jets():
            raise TypeError("rank over Jets is not defined here")
        if self.rows == 0 or self.cols == 0:
            return 0
        _, pivots = self._echelon()
        return len(pivots)

    def kernel(self) -> list:
        """Basis of the right null space, as a list of column Matrix values.

        Entries must be field scalars (rational or cyclotomic), not Jets.
        The basis is the reduced-echelon one: each free column contributes
        a vector with a 1 in its own position.
        """
        if self.has_jets():
            raise TypeError("kernel needs field entries, not Jets")
        if self.cols == 0:
            return []
        if self.rows == 0:
            return [Matrix.column([Fraction(1) if i == j else Fraction(0) for i in range(self.cols)]) for j in range(self.cols)]
        work, pivots = self._echelon()
        pivot_set = set(pivots)
        free = [c for c in range(self.cols) if c not in pivot_set]
        basis = []
        for f in free:
            vec = [Fraction(0)] * self.cols
            vec[f] = Fraction(1)
            for idx, pc in enumerate(pivots):
                vec[pc] = -work[idx][f]
            basis.append(Matrix.column(vec))
        return basis

    def solve(self, rhs: "Matrix") -> "Matrix":
        """Any exact solution X of self @ X = rhs, free variables pinned
        to zero.

        Raises NoSolution when the system is inconsistent.  Jet entries are
        handled by eliminating the doubled base-scalar system.
        """
        if not isinstance(rhs, Matrix):
            raise TypeError("rhs must be a Matrix")
        if rhs.rows != self.rows:
            raise ValueError("rhs row count mismatch")
        if self.has_jets() or rhs.has_jets():
            a0, a1 = self.jet_parts()
            b0, b1 = rhs.jet_parts()
            big = Matrix.block([[a0, Matrix.zero(self.rows, self.cols)], [a1, a0]])
            rhs_big = Matrix.vcat([b0, b1])
            sol = big.solve(rhs_big)
            top = sol.submatrix(range(self.cols), range(rhs.cols))
            bot = sol.submatrix(range(self.cols, 2 * self.cols), range(rhs.cols))
            return top._new(
                [
                    [Jet(top.entries[i][j], bot.entries[i][j]) for j in range(rhs.cols)]
                    for i in range(self.cols)
                ]
            ) if self.cols else Matrix.zero(0, rhs.cols)
        if self.cols == 0:
            if not rhs.is_zero():
                raise NoSolution("zero-column system with nonzero rhs")
            return Matrix.zero(0, rhs.cols)
        if self.rows == 0:
            return Matrix.zero(self.cols, rhs.cols)
        aug = Matrix.hcat([self, rhs])
        work, pivots = aug._echelon()
        for c in pivots:
            if c >= self.cols:
                raise NoSolution("inconsistent linear system")
        n_pivots = len(pivots)
        for i in range(n_pivots, self.rows):
            if any(not scalar_is_zero(work[i][j]) for j in range(self.cols, aug.cols)):
                raise NoSolution("inconsistent linear system")
        out = [[Fraction(0)] * rhs.cols for _ in range(self.cols)]
        for idx, pc in enumerate(pivots):
            for j in range(rhs.cols):
                out[pc][j] = work[idx][self.cols + j]
        m = object.__new__(Matrix)
        m.rows = self.cols
        m.cols = rhs.cols
        m.entries = tuple(tuple(r) for r in out)
        return m

    def inverse(self) -> "Matrix":
        if self.rows != self.cols:
            raise ValueError("inverse of a non-square matrix")
        try:
            inv = self.solve(Matrix.identity(self.rows))
        except NoSolution:
            raise NoSolution("matrix is singular")
        if inv * self != Matrix.identity(self.rows):
            raise NoSolution("matrix is singular")
        return inv

    def to_json(self):
        return [[scalar_to_json(a) for a in row] for row in self.entries]

    @classmethod
    def from_json(cls, obj, rows: int = None, cols: int = None) -> "Matrix":
        if not isinstance(obj, list) or any(not isinstance(r, list) for r in obj):
            raise ValueError("matrix JSON must be a list of lists")
        if not obj:
            if rows not in (0, None) or cols is None:
                raise ValueError("empty matrix JSON needs explicit shape")
            return cls.zero(0, cols)
        m = cls([[scalar_from_json(e) for e in row] for row in obj])
        if rows is not None and m.rows != rows:
            raise ValueError(f"expected {rows} rows, got {m.rows}")
        if cols is not None and m.cols != cols:
            raise ValueError(f"expected {cols} columns, got {m.cols}")
        return m


def _coerce_entry(x):
    if isinstance(x, (Fraction, CycScalar, Jet)):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"not an exact scalar: {type(x).__name__}")


def _entry_repr(a):
    if isinstance(a, Fraction):
        return rational_to_str(a)
    return repr(a)


def _dot(row, col):
    total = None
    for a, b in zip(row, col):
        term = a * b
        total = term if total is None else total + term
    return Fraction(0) if total is None else total


def mat_kernel(m: Matrix) -> list:
    """Right null space basis of an exact matrix (field entries only)."""
    return m.kernel()


def mat_solve(m: Matrix, rhs: Matrix) -> Matrix:
    """Particular exact solution of m @ x = rhs; NoSolution if
    inconsistent."""
    return m.solve(rhs)
