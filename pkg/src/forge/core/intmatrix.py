"""Dense exact-integer matrices.

Entries are plain Python ints, so nothing ever overflows or rounds.  The
type is immutable; every operation returns a new matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from .. import caps as _caps
from ..errors import FormatError, ParameterError, SizeError


@dataclass(frozen=True)
class IntMatrix:
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.rows or not self.rows[0]:
            raise ParameterError("matrices need at least one row and one column")
        width = len(self.rows[0])
        if any(len(r) != width for r in self.rows):
            raise ParameterError("ragged rows")

    # -- construction -------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> "IntMatrix":
        return cls(tuple(tuple(int(v) for v in r) for r in rows))

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "IntMatrix":
        return cls(tuple((0,) * ncols for _ in range(nrows)))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def from_numpy(cls, arr: np.ndarray) -> "IntMatrix":
        return cls.from_rows(arr.tolist())

    # -- shape & access -------------------------------------------------
    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, idx):
        i, j = idx
        return self.rows[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.rows[i]

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[tuple[int, ...]]:
        return list(zip(*self.rows))

    def transpose(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.rows)))

    def select_rows(self, idx: Sequence[int]) -> "IntMatrix":
        return IntMatrix(tuple(self.rows[i] for i in idx))

    def select_cols(self, idx: Sequence[int]) -> "IntMatrix":
        return IntMatrix(tuple(tuple(r[j] for j in idx) for r in self.rows))

    def max_abs(self) -> int:
        return max(abs(v) for r in self.rows for v in r)

    def is_zero(self) -> bool:
        return all(v == 0 for r in self.rows for v in r)

    def to_numpy(self, dtype=object) -> np.ndarray:
        return np.array(self.rows, dtype=dtype)

    def to_int64(self) -> np.ndarray:
        if self.max_abs() >= 2**62:
            raise SizeError("entries too large for an int64 view")
        return np.array(self.rows, dtype=np.int64)

    # -- arithmetic -------------------------------------------------------
    def left_mul(self, x: Sequence[int]) -> tuple[int, ...]:
        """Row vector times matrix, ``x @ self``."""
        if len(x) != self.nrows:
            raise ParameterError(f"vector of length {len(x)} against {self.nrows} rows")
        out = [0] * self.ncols
        for xi, r in zip(x, self.rows):
            if xi:
                for j, v in enumerate(r):
                    if v:
                        out[j] += xi * v
        return tuple(out)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise ParameterError("inner dimensions differ")
        return IntMatrix(tuple(other.left_mul(r) for r in self.rows))

    def hstack(self, *others: "IntMatrix") -> "IntMatrix":
        return hstack([self, *others])

    # -- exact linear algebra ---------------------------------------------
    def rank(self) -> int:
        return len(_rref(self.rows)[1])

    def det(self) -> int:
        if self.nrows != self.ncols:
            raise ParameterError("determinant of a non-square matrix")
        return bareiss_det(self.rows)


def hstack(mats: Sequence[IntMatrix]) -> IntMatrix:
    if not mats:
        raise ParameterError("nothing to concatenate")
    n = mats[0].nrows
    if any(m.nrows != n for m in mats):
        raise ParameterError("row counts differ in horizontal concatenation")
    return IntMatrix(tuple(sum((m.rows[i] for m in mats), ()) for i in range(n)))


def check_entry_cap(nrows: int, ncols: int, cap: int | None = None, what: str = "matrix") -> None:
    if cap is None:
        cap = _caps.current().matrix_entries
    if nrows * ncols > cap:
        raise SizeError(f"{what} of shape {nrows}x{ncols} exceeds the entry cap {cap}")


def matrix_tensor(a: IntMatrix, b: IntMatrix, cap: int | None = None) -> IntMatrix:
    """Kronecker product.

    Row ``(i, i')`` sits at index ``i * b.nrows + i'`` (lexicographic pairs),
    and likewise for columns.
    """
    check_entry_cap(a.nrows * b.nrows, a.ncols * b.ncols, cap, "tensor product")
    rows = []
    for ra in a.rows:
        for rb in b.rows:
            rows.append(tuple(x * y for x in ra for y in rb))
    return IntMatrix(tuple(rows))


def tensor_power(a: IntMatrix, k: int, cap: int | None = None) -> IntMatrix:
    if k < 1:
        raise ParameterError("tensor power needs k >= 1")
    out = a
    for _ in range(k - 1):
        out = matrix_tensor(out, a, cap)
    return out


def bareiss_det(rows: Sequence[Sequence[int]]) -> int:
    """Fraction-free Gaussian elimination; exact for integer input."""
    m = [list(r) for r in rows]
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1] if n else 1


def _rref(rows: Sequence[Sequence[int]]) -> tuple[list[list[Fraction]], list[int]]:
    m = [[Fraction(v) for v in r] for r in rows]
    pivots: list[int] = []
    if not m:
        return m, pivots
    nrows, ncols = len(m), len(m[0])
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def _primitive(vec: Sequence[Fraction]) -> tuple[int, ...]:
    den = reduce(lambda acc, v: acc * v.denominator // gcd(acc, v.denominator), vec, 1)
    ints = [int(v * den) for v in vec]
    g = reduce(gcd, (abs(v) for v in ints), 0) or 1
    ints = [v // g for v in ints]
    first = next(v for v in ints if v != 0)
    if first < 0:
        ints = [-v for v in ints]
    return tuple(ints)


def left_kernel_basis(mx: IntMatrix) -> list[tuple[int, ...]]:
    """Basis of ``{x : x @ mx == 0}`` over the rationals.

    Vectors are scaled to primitive integer vectors whose first nonzero entry
    is positive.  Returns ``[]`` when the rows are linearly independent.
    """
    # nullspace of mx^T
    rref, pivots = _rref(mx.transpose().rows)
    n = mx.nrows
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * n
        vec[f] = Fraction(1)
        for row, pc in zip(rref, pivots):
            vec[pc] = -row[f]
        basis.append(_primitive(vec))
    return basis


def rank_of_rows(rows: Sequence[Sequence[int]]) -> int:
    return len(_rref(rows)[1])


def rank_mod_p(arr: np.ndarray, p: int) -> int:
    """Rank of an int64 matrix over GF(p); never exceeds the rational rank."""
    m = np.array(arr, dtype=np.int64) % p
    nrows, ncols = m.shape
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        inv = pow(int(m[r, c]), p - 2, p)
        m[r] = (m[r] * inv) % p
        col = m[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            m[nzr] = (m[nzr] - np.outer(col[nzr], m[r])) % p
        r += 1
    return r


# -- latmat v1 ---------------------------------------------------------------

def dumps_latmat(mx: IntMatrix) -> str:
    lines = [f"{mx.nrows} {mx.ncols}"]
    lines.extend(" ".join(str(v) for v in r) for r in mx.rows)
    return "\n".join(lines) + "\n"


def loads_latmat(text: str) -> IntMatrix:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    try:
        nrows, ncols = (int(t) for t in lines[0].split(" "))
        rows = [tuple(int(t) for t in line.split(" ")) for line in lines[1:]]
    except (ValueError, IndexError) as exc:
        raise FormatError(f"bad latmat text: {exc}") from None
    if len(rows) != nrows or any(len(r) != ncols for r in rows):
        raise FormatError("latmat header does not match the body")
    return IntMatrix(tuple(rows))


def read_latmat(path) -> IntMatrix:
    with open(path, encoding="ascii") as fh:
        return loads_latmat(fh.read())


def write_latmat(path, mx: IntMatrix) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(dumps_latmat(mx))
