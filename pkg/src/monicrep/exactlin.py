"""Exact dense linear algebra over prime fields F_p and the rationals.

Matrices are immutable wrappers around numpy arrays.  Over F_p with a small
prime the backing dtype is int64 (entries reduced to 0..p-1 after every
operation); over the rationals, and for large primes, the dtype is ``object``
holding :class:`fractions.Fraction` / Python ints, so nothing ever overflows.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

# p * p * (number of summands) must stay below 2**63 for int64 matmul.
_INT64_PRIME_LIMIT = 1 << 20


class DimensionMismatch(ValueError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class Field:
    """A prime field F_p (``p`` set) or the rationals (``p is None``)."""

    p: int | None = None

    def __post_init__(self) -> None:
        if self.p is not None and not _is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @classmethod
    def prime(cls, p: int) -> "Field":
        return cls(p)

    @classmethod
    def rationals(cls) -> "Field":
        return cls(None)

    @property
    def characteristic(self) -> int:
        return self.p or 0

    @property
    def is_rational(self) -> bool:
        return self.p is None

    @property
    def dtype(self):
        if self.p is not None and self.p < _INT64_PRIME_LIMIT:
            return np.int64
        return object

    def __str__(self) -> str:
        return "QQ" if self.p is None else f"GF({self.p})"

    # -- scalars ---------------------------------------------------------

    def element(self, value) -> int | Fraction:
        """Canonical form of ``value``: a residue 0..p-1 or a reduced Fraction."""
        if isinstance(value, str):
            value = Fraction(value.strip())
        if self.p is None:
            return Fraction(value)
        if isinstance(value, Fraction):
            if value.denominator == 1:
                return int(value.numerator) % self.p
            return (value.numerator * pow(value.denominator, -1, self.p)) % self.p
        return int(value) % self.p

    def inv(self, value) -> int | Fraction:
        if value == 0:
            raise ZeroDivisionError("zero has no inverse")
        if self.p is None:
            return 1 / Fraction(value)
        return pow(int(value), -1, self.p)

    def to_json(self, value) -> int | str:
        if self.p is None:
            value = Fraction(value)
            return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
        return int(value)

    def elements(self) -> list[int]:
        if self.p is None:
            raise ValueError("the rationals are infinite")
        return list(range(self.p))

    # -- arrays ----------------------------------------------------------

    def reduce(self, arr: np.ndarray) -> np.ndarray:
        if self.p is None:
            return arr
        return arr % self.p

    def coerce(self, data) -> np.ndarray:
        """Turn nested sequences / arrays into a canonical 2-d backing array."""
        if isinstance(data, np.ndarray) and data.dtype != object and self.dtype is np.int64:
            return (data.astype(np.int64) % self.p).reshape(data.shape)
        arr = np.array(data, dtype=object)
        if arr.ndim != 2:
            raise DimensionMismatch(f"expected a 2-d array, got shape {arr.shape}")
        out = np.empty(arr.shape, dtype=self.dtype)
        for idx, v in np.ndenumerate(arr):
            out[idx] = self.element(v)
        return out

    def zeros(self, shape) -> np.ndarray:
        if self.dtype is object:
            out = np.empty(shape, dtype=object)
            out.fill(Fraction(0) if self.p is None else 0)
            return out
        return np.zeros(shape, dtype=np.int64)

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = self.element(1)
        return out


GF2 = Field(2)
GF3 = Field(3)
QQ = Field(None)


class Matrix:
    """Immutable dense matrix over a :class:`Field`."""

    __slots__ = ("field", "a")

    def __init__(self, field: Field, data, *, trusted: bool = False) -> None:
        arr = data if trusted else field.coerce(data)
        if arr.ndim != 2:
            raise DimensionMismatch("matrices are 2-d")
        arr.flags.writeable = False
        self.field = field
        self.a = arr

    # -- constructors ----------------------------------------------------

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int) -> "Matrix":
        return cls(field, field.zeros((rows, cols)), trusted=True)

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        return cls(field, field.eye(n), trusted=True)

    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence], cols: int | None = None) -> "Matrix":
        rows = [list(r) for r in rows]
        if not rows:
            return cls.zeros(field, 0, cols or 0)
        if cols is not None and any(len(r) != cols for r in rows):
            raise DimensionMismatch("row length does not match the column count")
        if len({len(r) for r in rows}) > 1:
            raise DimensionMismatch("ragged rows")
        if len(rows[0]) == 0:
            return cls.zeros(field, len(rows), 0)
        return cls(field, rows)

    @classmethod
    def column(cls, field: Field, values: Sequence) -> "Matrix":
        return cls.from_rows(field, [[v] for v in values], 1)

    @classmethod
    def _wrap(cls, field: Field, arr: np.ndarray) -> "Matrix":
        return cls(field, field.reduce(arr), trusted=True)

    # -- shape -----------------------------------------------------------

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    def entry(self, i: int, j: int):
        return self.a[i, j]

    def col(self, j: int) -> "Matrix":
        return Matrix(self.field, self.a[:, j : j + 1].copy(), trusted=True)

    def columns(self, idx: Iterable[int]) -> "Matrix":
        idx = list(idx)
        return Matrix(self.field, self.a[:, idx].copy() if idx else self.field.zeros((self.rows, 0)), trusted=True)

    def row_slice(self, start: int, stop: int) -> "Matrix":
        return Matrix(self.field, self.a[start:stop, :].copy(), trusted=True)

    def col_slice(self, start: int, stop: int) -> "Matrix":
        return Matrix(self.field, self.a[:, start:stop].copy(), trusted=True)

    def block(self, r0: int, r1: int, c0: int, c1: int) -> "Matrix":
        return Matrix(self.field, self.a[r0:r1, c0:c1].copy(), trusted=True)

    def tolist(self) -> list[list]:
        return [[self.a[i, j] for j in range(self.cols)] for i in range(self.rows)]

    def to_json(self) -> list[list]:
        f = self.field
        return [[f.to_json(self.a[i, j]) for j in range(self.cols)] for i in range(self.rows)]

    def is_zero(self) -> bool:
        return not np.any(self.a != 0)

    # -- arithmetic ------------------------------------------------------

    def _check(self, other: "Matrix") -> None:
        if not isinstance(other, Matrix):
            raise TypeError("expected a Matrix")
        if other.field != self.field:
            raise ValueError(f"field mismatch: {self.field} vs {other.field}")

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        if self.cols == 0:
            return Matrix.zeros(self.field, self.rows, other.cols)
        return Matrix._wrap(self.field, self.a @ other.a)

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot add {self.shape} and {other.shape}")
        return Matrix._wrap(self.field, self.a + other.a)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot subtract {self.shape} and {other.shape}")
        return Matrix._wrap(self.field, self.a - other.a)

    def __neg__(self) -> "Matrix":
        return Matrix._wrap(self.field, -self.a)

    def scale(self, c) -> "Matrix":
        return Matrix._wrap(self.field, self.a * self.field.element(c))

    @property
    def T(self) -> "Matrix":
        return Matrix(self.field, self.a.T.copy(), trusted=True)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and bool(np.all(self.a == other.a))

    def __hash__(self) -> int:
        return hash((self.field, self.shape, tuple(self.a.ravel().tolist())))

    def __repr__(self) -> str:
        return f"Matrix({self.field}, {self.to_json()})"


# -- assembly helpers ---------------------------------------------------------


def hstack(field: Field, mats: Sequence[Matrix], rows: int) -> Matrix:
    """Horizontal concatenation; ``rows`` fixes the shape when ``mats`` is empty."""
    if not mats:
        return Matrix.zeros(field, rows, 0)
    for m in mats:
        if m.rows != rows:
            raise DimensionMismatch("hstack row mismatch")
    return Matrix(field, np.concatenate([m.a for m in mats], axis=1), trusted=True)


def vstack(field: Field, mats: Sequence[Matrix], cols: int) -> Matrix:
    if not mats:
        return Matrix.zeros(field, 0, cols)
    for m in mats:
        if m.cols != cols:
            raise DimensionMismatch("vstack column mismatch")
    return Matrix(field, np.concatenate([m.a for m in mats], axis=0), trusted=True)


def block_diag(field: Field, mats: Sequence[Matrix]) -> Matrix:
    r = sum(m.rows for m in mats)
    c = sum(m.cols for m in mats)
    out = field.zeros((r, c))
    i = j = 0
    for m in mats:
        out[i : i + m.rows, j : j + m.cols] = m.a
        i += m.rows
        j += m.cols
    return Matrix(field, out, trusted=True)


def kron(a: Matrix, b: Matrix) -> Matrix:
    a._check(b)
    return Matrix._wrap(a.field, np.kron(a.a, b.a))


# -- elimination --------------------------------------------------------------


def _rref_array(a: np.ndarray, field: Field, ncols: int | None = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of a copy of ``a``.

    Pivots are only searched among the first ``ncols`` columns; row operations
    act on the full width (augmented systems).
    """
    a = a.copy()
    rows, cols = a.shape
    if ncols is None:
        ncols = cols
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c] != 0)
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        piv = a[r, c]
        if piv != 1:
            a[r] = field.reduce(a[r] * field.inv(piv))
        colvals = a[:, c].copy()
        colvals[r] = 0
        hit = np.flatnonzero(colvals != 0)
        if hit.size:
            a[hit] = field.reduce(a[hit] - np.outer(colvals[hit], a[r]))
        pivots.append(c)
        r += 1
    return a, pivots


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    arr, piv = _rref_array(m.a, m.field)
    return Matrix(m.field, arr, trusted=True), piv


def rank(m: Matrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    return len(_rref_array(m.a, m.field)[1])


def kernel_basis(m: Matrix) -> Matrix:
    """Columns spanning the null space, one per free column of rref(m)."""
    f = m.field
    n = m.cols
    if m.rows == 0:
        return Matrix.identity(f, n)
    arr, piv = _rref_array(m.a, f)
    free = [c for c in range(n) if c not in set(piv)]
    out = f.zeros((n, len(free)))
    for k, c in enumerate(free):
        out[c, k] = f.element(1)
        for r, pc in enumerate(piv):
            out[pc, k] = -arr[r, c]
    return Matrix._wrap(f, out)


def is_injective(m: Matrix) -> bool:
    return rank(m) == m.cols


def column_basis(m: Matrix) -> Matrix:
    """An independent subset of the columns of ``m`` spanning its column space."""
    if m.cols == 0 or m.rows == 0:
        return Matrix.zeros(m.field, m.rows, 0)
    _, piv = _rref_array(m.a, m.field)
    return m.columns(piv)


def in_span(basis: Matrix, v: Matrix) -> bool:
    """Whether every column of ``v`` lies in the column space of ``basis``."""
    return rank(hstack(basis.field, [basis, v], basis.rows)) == rank(basis)


def sum_is_direct(maps: Sequence[Matrix], codomain_dim: int | None = None) -> bool:
    """Whether the images of ``maps`` (sharing a codomain) form a direct sum."""
    if not maps:
        return True
    rows = maps[0].rows if codomain_dim is None else codomain_dim
    for m in maps:
        if m.rows != rows:
            raise DimensionMismatch("maps do not share a codomain")
    total = rank(hstack(maps[0].field, list(maps), rows))
    return total == sum(rank(m) for m in maps)


def sum_is_direct_iterated(maps: Sequence[Matrix], codomain_dim: int | None = None) -> bool:
    """Same question as :func:`sum_is_direct`, answered by intersecting each image
    with the running sum of the previous ones."""
    if not maps:
        return True
    f = maps[0].field
    rows = maps[0].rows if codomain_dim is None else codomain_dim
    acc = Matrix.zeros(f, rows, 0)
    for m in maps:
        if m.rows != rows:
            raise DimensionMismatch("maps do not share a codomain")
        w = column_basis(m)
        if acc.cols and w.cols:
            meet = kernel_basis(hstack(f, [acc, -w], rows))
            if meet.cols:
                return False
        acc = column_basis(hstack(f, [acc, w], rows))
    return True


def solve(m: Matrix, b: Matrix) -> Matrix | None:
    """Some ``x`` with ``m @ x == b``, or ``None`` when the system is inconsistent."""
    m._check(b)
    if m.rows != b.rows:
        raise DimensionMismatch(f"row counts differ: {m.rows} vs {b.rows}")
    f = m.field
    n = m.cols
    if m.rows == 0:
        return Matrix.zeros(f, n, b.cols)
    aug = np.concatenate([m.a, b.a], axis=1)
    arr, piv = _rref_array(aug, f, ncols=n)
    r = len(piv)
    if np.any(arr[r:, n:] != 0):
        return None
    x = f.zeros((n, b.cols))
    for k, c in enumerate(piv):
        x[c] = arr[k, n:]
    return Matrix(f, x, trusted=True)


def inverse(m: Matrix) -> Matrix:
    if m.rows != m.cols:
        raise DimensionMismatch("only square matrices are invertible")
    x = solve(m, Matrix.identity(m.field, m.rows))
    if x is None or rank(m) != m.rows:
        raise ZeroDivisionError("matrix is singular")
    return x


def complement_columns(basis: Matrix) -> Matrix:
    """Standard basis vectors completing the (independent) columns of ``basis``."""
    f = basis.field
    n = basis.rows
    full = hstack(f, [basis, Matrix.identity(f, n)], n)
    _, piv = _rref_array(full.a, f)
    extra = [c - basis.cols for c in piv if c >= basis.cols]
    return Matrix.identity(f, n).columns(extra)


def left_inverse(basis: Matrix) -> Matrix:
    """``L`` with ``L @ basis == I`` for a matrix with independent columns."""
    f = basis.field
    comp = complement_columns(basis)
    t = hstack(f, [basis, comp], basis.rows)
    return inverse(t).row_slice(0, basis.cols)
