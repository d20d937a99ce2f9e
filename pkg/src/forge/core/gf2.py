"""Arithmetic in GF(2^lam) and matrices over it.

Elements are ints whose bits are polynomial coefficients over GF(2) (bit
``i`` is the coefficient of ``x^i``).  Addition is XOR; multiplication is
carry-less multiplication reduced modulo the field's irreducible polynomial.
Fields up to 2^16 elements use cached log/exp tables.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from ..errors import FormatError, ParameterError

TABLE_LIMIT = 16


# -- polynomials over GF(2), encoded as ints ----------------------------------

def poly_degree(f: int) -> int:
    return f.bit_length() - 1


def poly_mod(a: int, f: int) -> int:
    df = poly_degree(f)
    while a and poly_degree(a) >= df:
        a ^= f << (poly_degree(a) - df)
    return a


def poly_mulmod(a: int, b: int, f: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> poly_degree(f) & 1:
            a ^= f
    return poly_mod(out, f)


def poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly_mod(a, b)
    return a


def is_irreducible(f: int) -> bool:
    """Rabin's test, specialised to degrees that are powers of two."""
    n = poly_degree(f)
    if n < 1:
        return False
    x = 0b10
    # x^(2^k) mod f
    powers = [poly_mod(x, f)]
    for _ in range(n):
        powers.append(poly_mulmod(powers[-1], powers[-1], f))
    if powers[n] != poly_mod(x, f):
        return False
    for p in _prime_factors(n):
        if poly_gcd(f, powers[n // p] ^ poly_mod(x, f)) != 1:
            return False
    return True


def is_irreducible_trial(f: int) -> bool:
    """Irreducibility by trial division over all divisors of degree <= deg/2."""
    n = poly_degree(f)
    if n < 1:
        return False
    for g in range(2, 1 << (n // 2 + 1)):
        if poly_mod(f, g) == 0:
            return False
    return True


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def format_poly(f: int) -> str:
    terms = []
    for i in range(poly_degree(f), -1, -1):
        if f >> i & 1:
            terms.append("1" if i == 0 else "x" if i == 1 else f"x^{i}")
    return " + ".join(terms) or "0"


# -- fields ---------------------------------------------------------------------

@dataclass(frozen=True)
class BinaryField:
    lam: int
    modulus: int

    def __post_init__(self):
        if not _is_power_of_two(self.lam):
            raise ParameterError(f"lambda must be a power of two, got {self.lam}")
        if poly_degree(self.modulus) != self.lam:
            raise ParameterError("modulus degree differs from lambda")

    @property
    def order(self) -> int:
        return 1 << self.lam

    def __repr__(self) -> str:
        return f"GF(2^{self.lam}) mod {format_poly(self.modulus)}"

    def elements(self) -> range:
        return range(self.order)

    def nonzero(self) -> range:
        return range(1, self.order)

    def element(self, bits: int) -> "FieldElement":
        return FieldElement(self, bits)

    # scalar ops on raw ints
    @staticmethod
    def add(a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.lam <= TABLE_LIMIT:
            exp, log = _tables(self.lam, self.modulus)
            return int(exp[int(log[a]) + int(log[b])])
        return poly_mulmod(a, b, self.modulus)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        out, base = 1, a
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return self.pow(a, self.order - 2)

    # vectorised ops
    def mul_arr(self, a, b) -> np.ndarray:
        """Elementwise product of broadcastable int arrays."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.lam > TABLE_LIMIT:
            fn = np.frompyfunc(self.mul, 2, 1)
            return fn(a, b).astype(np.int64)
        exp, log = _tables(self.lam, self.modulus)
        out = exp[log[a] + log[b]]
        return np.where((a == 0) | (b == 0), 0, out)


@lru_cache(maxsize=None)
def _tables(lam: int, modulus: int) -> tuple[np.ndarray, np.ndarray]:
    q = 1 << lam
    if q == 2:
        exp = np.array([1, 1, 1], dtype=np.int64)
        log = np.array([0, 0], dtype=np.int64)
        return exp, log
    for g in range(2, q):
        exp = np.zeros(2 * q, dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        v = 1
        ok = True
        for i in range(q - 1):
            if i and v == 1:
                ok = False
                break
            exp[i] = v
            log[v] = i
            v = poly_mulmod(v, g, modulus)
        if ok and v == 1:
            exp[q - 1 : 2 * q - 2] = exp[: q - 1]
            return exp, log
    raise ParameterError("no primitive element found; modulus is not irreducible")


@lru_cache(maxsize=None)
def build_field(lam: int) -> BinaryField:
    """GF(2^lam) with the numerically smallest irreducible modulus.

    Only polynomials with a nonzero constant term are considered, so degree 1
    yields ``x + 1``.
    """
    if not _is_power_of_two(lam):
        raise ParameterError(f"lambda must be a power of two, got {lam}")
    for f in range((1 << lam) | 1, 1 << (lam + 1), 2):
        if is_irreducible(f):
            return BinaryField(lam, f)
    raise AssertionError("unreachable: irreducibles exist in every degree")


@dataclass(frozen=True)
class FieldElement:
    field: BinaryField
    bits: int

    def __post_init__(self):
        if not 0 <= self.bits < self.field.order:
            raise ParameterError(f"{self.bits:#x} is not an element of {self.field}")

    def _same(self, other: "FieldElement") -> None:
        if other.field != self.field:
            raise ParameterError("elements of different fields")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._same(other)
        return FieldElement(self.field, self.bits ^ other.bits)

    __sub__ = __add__

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._same(other)
        return FieldElement(self.field, self.field.mul(self.bits, other.bits))

    def __pow__(self, e: int) -> "FieldElement":
        return FieldElement(self.field, self.field.pow(self.bits, e))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.bits))

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        return self * other.inverse()

    def __bool__(self) -> bool:
        return self.bits != 0

    def __repr__(self) -> str:
        return f"<{self.bits:0{self.field.lam}b}>"


# -- matrices ---------------------------------------------------------------------

@dataclass(frozen=True)
class FieldMatrix:
    field: BinaryField
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.rows or not self.rows[0]:
            raise ParameterError("matrices need at least one row and one column")
        width = len(self.rows[0])
        q = self.field.order
        for r in self.rows:
            if len(r) != width:
                raise ParameterError("ragged rows")
            if any(not 0 <= v < q for v in r):
                raise ParameterError(f"entry outside {self.field}")

    @classmethod
    def from_rows(cls, field: BinaryField, rows: Iterable[Iterable[int]]) -> "FieldMatrix":
        return cls(field, tuple(tuple(int(v) for v in r) for r in rows))

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def to_numpy(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.int64)

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.rows)

    def left_mul(self, x: Sequence[int]) -> tuple[int, ...]:
        out = [0] * self.ncols
        mul = self.field.mul
        for xi, r in zip(x, self.rows):
            if xi:
                for j, v in enumerate(r):
                    out[j] ^= mul(xi, v)
        return tuple(out)

    def __matmul__(self, other: "FieldMatrix") -> "FieldMatrix":
        if other.field != self.field or self.ncols != other.nrows:
            raise ParameterError("incompatible matrices")
        return FieldMatrix(self.field, tuple(other.left_mul(r) for r in self.rows))

    def hstack(self, *others: "FieldMatrix") -> "FieldMatrix":
        return field_hstack([self, *others])

    def tensor(self, other: "FieldMatrix") -> "FieldMatrix":
        if other.field != self.field:
            raise ParameterError("tensor of matrices over different fields")
        mul = self.field.mul
        rows = []
        for ra in self.rows:
            for rb in other.rows:
                rows.append(tuple(mul(x, y) for x in ra for y in rb))
        return FieldMatrix(self.field, tuple(rows))

    def rank(self) -> int:
        f = self.field
        m = [list(r) for r in self.rows]
        rank = 0
        for c in range(self.ncols):
            piv = next((i for i in range(rank, len(m)) if m[i][c]), None)
            if piv is None:
                continue
            m[rank], m[piv] = m[piv], m[rank]
            inv = f.inv(m[rank][c])
            m[rank] = [f.mul(inv, v) for v in m[rank]]
            for i in range(len(m)):
                if i != rank and m[i][c]:
                    k = m[i][c]
                    m[i] = [a ^ f.mul(k, b) for a, b in zip(m[i], m[rank])]
            rank += 1
            if rank == len(m):
                break
        return rank


def field_hstack(mats: Sequence[FieldMatrix]) -> FieldMatrix:
    field = mats[0].field
    n = mats[0].nrows
    if any(m.field != field or m.nrows != n for m in mats):
        raise ParameterError("incompatible blocks in horizontal concatenation")
    return FieldMatrix(field, tuple(sum((m.rows[i] for m in mats), ()) for i in range(n)))


def field_vandermonde(rows: int, cols: int, field: BinaryField) -> FieldMatrix:
    """``rows x cols`` Vandermonde matrix with entry ``(i, j) = c(j)^i``.

    ``i`` runs from 1 and ``c(j)`` is the j-th nonzero element in ascending
    bit order, i.e. ``c(j) = j`` for ``j = 1..cols``.
    """
    if rows < 1 or cols < 1:
        raise ParameterError("Vandermonde dimensions must be positive")
    if rows >= field.order or cols >= field.order:
        raise ParameterError(f"{rows}x{cols} Vandermonde needs a field larger than {field.order}")
    return FieldMatrix(
        field,
        tuple(tuple(field.pow(c, i) for c in range(1, cols + 1)) for i in range(1, rows + 1)),
    )


@lru_cache(maxsize=None)
def embedding_root(source: BinaryField, target: BinaryField) -> int:
    """Smallest element of ``target`` that is a root of ``source.modulus``."""
    if target.lam % source.lam:
        raise ParameterError(f"GF(2^{source.lam}) does not embed in GF(2^{target.lam})")
    deg = source.lam
    for cand in target.elements():
        acc = 0
        for i in range(deg, -1, -1):
            acc = target.mul(acc, cand) ^ (source.modulus >> i & 1)
        if acc == 0:
            return cand
    raise AssertionError("an irreducible of degree dividing lam always has a root")


def embed_element(value: int, source: BinaryField, target: BinaryField) -> int:
    root = embedding_root(source, target)
    out, power = 0, 1
    for i in range(source.lam):
        if value >> i & 1:
            out ^= power
        power = target.mul(power, root)
    return out


def field_cast(g: FieldMatrix, target: BinaryField) -> FieldMatrix:
    """Map every entry through the fixed subfield embedding into ``target``."""
    src = g.field
    if src == target:
        return g
    if target.lam % src.lam:
        raise ParameterError(f"lambda {src.lam} does not divide {target.lam}")
    table = {v: embed_element(v, src, target) for v in {v for r in g.rows for v in r}}
    return FieldMatrix(target, tuple(tuple(table[v] for v in r) for r in g.rows))


# -- ffmat v1 -----------------------------------------------------------------------

def dumps_ffmat(g: FieldMatrix) -> str:
    lines = [f"{g.nrows} {g.ncols} {g.field.lam} {g.field.modulus:x}"]
    lines.extend(" ".join(f"{v:x}" for v in r) for r in g.rows)
    return "\n".join(lines) + "\n"


def loads_ffmat(text: str) -> FieldMatrix:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    try:
        head = lines[0].split(" ")
        nrows, ncols, lam = int(head[0]), int(head[1]), int(head[2])
        modulus = int(head[3], 16)
        rows = [tuple(int(t, 16) for t in line.split(" ")) for line in lines[1:]]
    except (ValueError, IndexError) as exc:
        raise FormatError(f"bad ffmat text: {exc}") from None
    if len(head) != 4 or len(rows) != nrows or any(len(r) != ncols for r in rows):
        raise FormatError("ffmat header does not match the body")
    field = BinaryField(lam, modulus)
    if not is_irreducible(modulus):
        raise FormatError(f"modulus {modulus:x} is reducible")
    return FieldMatrix(field, tuple(rows))


def read_ffmat(path) -> FieldMatrix:
    with open(path, encoding="ascii") as fh:
        return loads_ffmat(fh.read())


def write_ffmat(path, g: FieldMatrix) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(dumps_ffmat(g))
