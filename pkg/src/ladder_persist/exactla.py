"""Exact linear algebra over prime fields GF(p).

Matrices are dense numpy int64 arrays holding residues in ``[0, p)``.
The array-level kernels (``*_arr``) are what the decomposition code uses;
``Matrix`` and the functions taking it are the public, immutable face.

Echelon conventions: both forms leave the bottom-left region zero.

* ``row_echelon``: ``E = Q @ M``.  Row pivots (first nonzero entry of a
  row) move strictly right going down; zero rows sit at the bottom.
* ``column_echelon``: ``E = M @ P``.  Column pivots (last nonzero entry of
  a column) move strictly down going right; zero columns sit at the left.

Both forms are reduced: pivots are 1 and are the only nonzero entry in
their row (column echelon) or column (row echelon).  Pivots are chosen by
scanning for the first nonzero entry, so results are deterministic.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

# p * p * n must stay well inside int64 for the matmul in ``mul``.
MAX_PRIME = 46337


class SingularMatrixError(ValueError):
    """Raised when inverting a matrix that is not invertible."""


@lru_cache(maxsize=None)
def check_prime(p: int) -> int:
    p = int(p)
    if p < 2 or p > MAX_PRIME or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
        raise ValueError(f"field modulus must be a prime in [2, {MAX_PRIME}], got {p}")
    return p


class FieldElem:
    """An element of GF(p)."""

    __slots__ = ("value", "p")

    def __init__(self, value: int, p: int = 2):
        self.p = check_prime(p)
        self.value = int(value) % self.p

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElem):
            if other.p != self.p:
                raise ValueError("mixed field moduli")
            return other.value
        return int(other) % self.p

    def __add__(self, other):
        return FieldElem(self.value + self._coerce(other), self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElem(self.value - self._coerce(other), self.p)

    def __rsub__(self, other):
        return FieldElem(self._coerce(other) - self.value, self.p)

    def __mul__(self, other):
        return FieldElem(self.value * self._coerce(other), self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElem(-self.value, self.p)

    def __truediv__(self, other):
        return self * field_inv(FieldElem(self._coerce(other), self.p))

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"FieldElem({self.value}, p={self.p})"


def field_inv(a: FieldElem) -> FieldElem:
    """Multiplicative inverse; raises ``ZeroDivisionError`` on zero."""
    if a.value == 0:
        raise ZeroDivisionError(f"0 has no inverse in GF({a.p})")
    return FieldElem(pow(a.value, -1, a.p), a.p)


# ---------------------------------------------------------------------------
# array kernels
# ---------------------------------------------------------------------------


def as_field_array(a, p: int) -> np.ndarray:
    arr = np.array(a, dtype=np.int64)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {arr.shape}")
    return arr % p


def mul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    return (a @ b) % p


def eye(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def _reduce(a: np.ndarray, p: int, ncols: int) -> list[int]:
    """In-place reduced row echelon form of ``a``; pivots only in the first
    ``ncols`` columns.  Returns the pivot columns."""
    m = a.shape[0]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        v = int(a[r, c])
        if v != 1:
            a[r] = a[r] * pow(v, -1, p) % p
        col = a[:, c].copy()
        col[r] = 0
        rows = np.flatnonzero(col)
        if rows.size:
            a[rows] = (a[rows] - np.outer(col[rows], a[r])) % p
        pivots.append(c)
        r += 1
    return pivots


def row_echelon_arr(m: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray, list[int]]:
    """Return ``(E, Q, pivots)`` with ``E = Q @ m`` in reduced row echelon form."""
    rows, cols = m.shape
    aug = np.concatenate([m % p, eye(rows)], axis=1)
    pivots = _reduce(aug, p, cols)
    return aug[:, :cols].copy(), aug[:, cols:].copy(), pivots


def column_echelon_arr(m: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray, int]:
    """Return ``(E, P, rank)`` with ``E = m @ P`` in bottom-left-zero column
    echelon form.  The first ``cols - rank`` columns of ``P`` span ker m."""
    # Reverse the rows, transpose, row-reduce; undo with a column reversal.
    _, q, pivots = row_echelon_arr(m[::-1, :].T.copy(), p)
    pmat = q.T[:, ::-1].copy()
    return mul(m, pmat, p), pmat, len(pivots)


def rank_arr(m: np.ndarray, p: int) -> int:
    if m.size == 0:
        return 0
    return len(_reduce(m % p, p, m.shape[1]))


def kernel_arr(m: np.ndarray, p: int) -> np.ndarray:
    _, pmat, r = column_echelon_arr(m, p)
    return pmat[:, : m.shape[1] - r].copy()


def inverse_arr(m: np.ndarray, p: int) -> np.ndarray:
    n, k = m.shape
    if n != k:
        raise SingularMatrixError(f"non-square matrix {m.shape}")
    e, q, pivots = row_echelon_arr(m, p)
    if len(pivots) != n:
        raise SingularMatrixError(f"matrix of rank {len(pivots)} < {n} is singular")
    return q


def solve_arr(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    """A solution ``x`` of ``a @ x = b`` (``b`` may have several columns),
    or ``None`` when the system is inconsistent."""
    m, n = a.shape
    aug = np.concatenate([a % p, b % p], axis=1)
    pivots = _reduce(aug, p, n)
    r = len(pivots)
    if np.any(aug[r:, n:]):
        return None
    x = np.zeros((n, b.shape[1]), dtype=np.int64)
    x[pivots] = aug[:r, n:]
    return x


def image_basis_arr(m: np.ndarray, p: int) -> np.ndarray:
    """Columns of ``m`` at pivot positions: a basis of the column space."""
    piv = _reduce(m.copy() % p, p, m.shape[1])
    return (m % p)[:, piv]


def extend_to_basis_arr(sub: np.ndarray, n: int, p: int) -> np.ndarray:
    """Invertible ``n x n`` matrix whose first columns are the (independent)
    columns of ``sub`` followed by standard basis vectors."""
    aug = np.concatenate([sub % p, eye(n)], axis=1)
    piv = _reduce(aug.copy(), p, aug.shape[1])
    if piv[: sub.shape[1]] != list(range(sub.shape[1])):
        raise ValueError("columns are not linearly independent")
    return aug[:, piv]


# ---------------------------------------------------------------------------
# immutable matrix type
# ---------------------------------------------------------------------------


class Matrix:
    """Dense immutable matrix over GF(p)."""

    __slots__ = ("a", "p")

    def __init__(self, entries, p: int = 2, shape: tuple[int, int] | None = None):
        p = check_prime(p)
        if isinstance(entries, Matrix):
            arr = entries.a.copy()
        elif shape is not None:
            arr = np.array(list(entries), dtype=np.int64).reshape(shape)
        else:
            arr = np.array(entries, dtype=np.int64)
            if arr.ndim == 1 and arr.size == 0:
                arr = arr.reshape(0, 0)
        if arr.ndim != 2:
            raise ValueError(f"matrix entries must be 2-d, got shape {arr.shape}")
        arr = arr % p
        arr.flags.writeable = False
        self.a = arr
        self.p = p

    @classmethod
    def wrap(cls, arr: np.ndarray, p: int) -> "Matrix":
        """Wrap an array already reduced mod p (no copy if read-only)."""
        obj = cls.__new__(cls)
        if arr.flags.writeable:
            arr = arr.copy()
            arr.flags.writeable = False
        obj.a = arr
        obj.p = p
        return obj

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int = 2) -> "Matrix":
        return cls.wrap(np.zeros((rows, cols), dtype=np.int64), check_prime(p))

    @classmethod
    def identity(cls, n: int, p: int = 2) -> "Matrix":
        return cls.wrap(eye(n), check_prime(p))

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    @property
    def T(self) -> "Matrix":
        return Matrix.wrap(self.a.T.copy(), self.p)

    def entries(self) -> list[int]:
        """Row-major residues."""
        return [int(x) for x in self.a.ravel()]

    def tolist(self) -> list[list[int]]:
        return self.a.tolist()

    def __getitem__(self, ij) -> FieldElem:
        return FieldElem(int(self.a[ij]), self.p)

    def _check(self, other: "Matrix"):
        if not isinstance(other, Matrix):
            raise TypeError("expected Matrix")
        if other.p != self.p:
            raise ValueError("mixed field moduli")

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return Matrix.wrap(mul(self.a, other.a, self.p), self.p)

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix.wrap((self.a + other.a) % self.p, self.p)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix.wrap((self.a - other.a) % self.p, self.p)

    def __neg__(self) -> "Matrix":
        return Matrix.wrap((-self.a) % self.p, self.p)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.p == other.p and self.shape == other.shape and bool(np.array_equal(self.a, other.a))

    def __hash__(self):
        return hash((self.p, self.shape, self.a.tobytes()))

    def __repr__(self):
        return f"Matrix({self.a.tolist()}, p={self.p})"


def column_echelon(m: Matrix) -> tuple[Matrix, Matrix]:
    e, pmat, _ = column_echelon_arr(m.a, m.p)
    return Matrix.wrap(e, m.p), Matrix.wrap(pmat, m.p)


def row_echelon(m: Matrix) -> tuple[Matrix, Matrix]:
    e, q, _ = row_echelon_arr(m.a, m.p)
    return Matrix.wrap(e, m.p), Matrix.wrap(q, m.p)


def rank(m: Matrix) -> int:
    return rank_arr(m.a, m.p)


def kernel_basis(m: Matrix) -> Matrix:
    return Matrix.wrap(kernel_arr(m.a, m.p), m.p)


def solve(a: Matrix, b: Matrix) -> Matrix | None:
    """Some ``x`` with ``a @ x = b``; ``None`` signals an inconsistent system."""
    if a.p != b.p or a.rows != b.rows:
        raise ValueError("shape or field mismatch")
    x = solve_arr(a.a, b.a, a.p)
    return None if x is None else Matrix.wrap(x, a.p)


def inverse(m: Matrix) -> Matrix:
    return Matrix.wrap(inverse_arr(m.a, m.p), m.p)
