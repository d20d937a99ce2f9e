"""Reduced integer Vandermonde matrices and checks of their minors.

Row ``i`` (1-based) of ``reduced_vandermonde(a, b)`` is ``(i^0, ..., i^(b-1))``
reduced mod ``a``.  Modulo ``a`` each square row-submatrix is therefore an
ordinary Vandermonde matrix on distinct points of GF(a), which is why all of
them are nonsingular over the integers too.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Iterator, Sequence

import numpy as np

from .. import caps as _caps
from ..errors import ParameterError, SizeError
from .intmatrix import IntMatrix, bareiss_det
from .primes import isprime


def reduced_vandermonde(a: int, b: int) -> IntMatrix:
    if not isprime(a):
        raise ParameterError(f"modulus {a} is not prime")
    if not 1 <= b < a:
        raise ParameterError(f"need 1 <= b < a, got a={a}, b={b}")
    return IntMatrix(tuple(tuple(pow(i, j, a) for j in range(b)) for i in range(1, a)))


def vandermonde_row(a: int, b: int, i: int) -> tuple[int, ...]:
    """Row ``i`` (1-based) without materialising the whole matrix."""
    if not 1 <= i < a:
        raise ParameterError(f"row {i} outside 1..{a - 1}")
    return tuple(pow(i, j, a) for j in range(b))


# -- batched determinants mod p ----------------------------------------------

def _dets_mod_p(stack: np.ndarray, p: int) -> np.ndarray:
    """Determinants mod ``p`` of a ``(K, b, b)`` int64 stack, values in [0, p)."""
    if p >= 2**31:
        raise ParameterError("modulus too large for int64 elimination")
    m = stack % p
    k, b, _ = m.shape
    inv = np.zeros(p, dtype=np.int64)
    for v in range(1, p):
        inv[v] = pow(v, p - 2, p)
    det = np.ones(k, dtype=np.int64)
    alive = np.arange(k)
    for c in range(b):
        sub = m[alive, c:, c]
        nz = sub != 0
        has = nz.any(axis=1)
        det[alive[~has]] = 0
        alive = alive[has]
        if alive.size == 0:
            break
        piv = c + np.argmax(nz[has], axis=1)
        swap = piv != c
        if swap.any():
            idx = alive[swap]
            rows_c = m[idx, c, :].copy()
            m[idx, c, :] = m[idx, piv[swap], :]
            m[idx, piv[swap], :] = rows_c
            det[idx] = (p - det[idx]) % p
        pv = m[alive, c, c]
        det[alive] = det[alive] * pv % p
        scale = inv[pv]
        for r in range(c + 1, b):
            f = m[alive, r, c] * scale % p
            m[alive, r, c:] = (m[alive, r, c:] - f[:, None] * m[alive, c, c:]) % p
    return det


def _row_combinations(n: int, b: int, chunk: int) -> Iterator[np.ndarray]:
    buf = []
    for rows in combinations(range(n), b):
        buf.append(rows)
        if len(buf) == chunk:
            yield np.array(buf, dtype=np.int64)
            buf = []
    if buf:
        yield np.array(buf, dtype=np.int64)


def singular_minor(mx: IntMatrix, modulus: int, cap: int | None = None) -> tuple[int, ...] | None:
    """First set of rows (0-based) whose square submatrix is singular.

    Each minor is reduced mod ``modulus`` first; a minor found nonzero there is
    certainly nonzero over the integers, and a zero residue is rechecked
    exactly before being reported.  Returns None when every minor is nonzero.
    """
    n, b = mx.shape
    if cap is None:
        cap = _caps.current().combinations
    total = comb(n, b)
    if total > cap:
        raise SizeError(f"{total} row subsets exceed the cap {cap}")
    arr = mx.to_int64()
    for batch in _row_combinations(n, b, 20000):
        dets = _dets_mod_p(arr[batch], modulus)
        for hit in np.nonzero(dets == 0)[0]:
            rows = tuple(int(v) for v in batch[hit])
            if bareiss_det(mx.select_rows(rows).rows) == 0:
                return rows
    return None


def minor_count(a: int, b: int) -> int:
    return comb(a - 1, b)


@lru_cache(maxsize=None)
def vandermonde_product_identity(b: int) -> bool:
    """Symbolically confirm ``det[x_k^j] == prod_{k<l} (x_l - x_k)`` for size b."""
    import sympy

    xs = sympy.symbols(f"x0:{b}")
    mat = sympy.Matrix(b, b, lambda k, j: xs[k] ** j)
    prod = sympy.Integer(1)
    for k in range(b):
        for l in range(k + 1, b):
            prod *= xs[l] - xs[k]
    return sympy.expand(mat.det(method="berkowitz") - prod) == 0


def residue_certificate(mx: IntMatrix, a: int) -> dict:
    """Certificate that every square row-submatrix of ``mx`` is nonsingular.

    Checks that row ``k`` reduces mod ``a`` to the powers of a point ``x_k``,
    that the points are pairwise distinct mod ``a``, and that the Vandermonde
    product formula holds for this size.  Together these force each minor to
    be a nonzero residue mod ``a``.
    """
    n, b = mx.shape
    points = []
    mismatch = None
    for k, row in enumerate(mx.rows):
        x = row[1] % a if b > 1 else k + 1
        if row[0] % a != 1 % a or any((row[j] - pow(x, j, a)) % a for j in range(b)):
            mismatch = k
            break
        points.append(x)
    distinct = mismatch is None and (b == 1 or len(set(points)) == len(points))
    identity = vandermonde_product_identity(b)
    repeated = None
    if mismatch is None and not distinct:
        seen: dict[int, int] = {}
        for k, x in enumerate(points):
            if x in seen:
                repeated = (seen[x], k)
                break
            seen[x] = k
    return {
        "rows": n,
        "cols": b,
        "modulus": a,
        "power_rows": mismatch is None,
        "mismatch_row": mismatch,
        "distinct_points": distinct,
        "repeated_points": repeated,
        "product_identity": identity,
        "valid": mismatch is None and distinct and identity,
    }


def minors_nonzero(mx: IntMatrix, a: int, budget: int) -> dict:
    """Decide whether every square row-submatrix of ``mx`` is nonsingular.

    Enumerates the minors directly when there are at most ``budget`` of them
    and falls back to :func:`residue_certificate` otherwise.  A singular
    minor is reported as ``witness`` (0-based row indices).
    """
    n, b = mx.shape
    total = comb(n, b)
    if total <= budget:
        witness = singular_minor(mx, a, cap=budget)
        return {"method": "exhaustive", "minors": total, "ok": witness is None, "witness": witness}
    cert = residue_certificate(mx, a)
    witness = None
    if not cert["valid"]:
        witness = _witness_from_certificate(mx, cert)
    return {"method": "certificate", "minors": total, "ok": cert["valid"], "witness": witness, "certificate": cert}


def _witness_from_certificate(mx: IntMatrix, cert: dict) -> tuple[int, ...] | None:
    # search minors through the offending rows first
    n, b = mx.shape
    focus = cert["repeated_points"] or ((cert["mismatch_row"],) if cert["mismatch_row"] is not None else ())
    others = [k for k in range(n) if k not in focus]
    for rest in combinations(others, b - len(focus)):
        rows = tuple(sorted((*focus, *rest)))
        if bareiss_det(mx.select_rows(rows).rows) == 0:
            return rows
    return None


def dets_of_rows(mx: IntMatrix, row_sets: Sequence[Sequence[int]]) -> list[int]:
    return [bareiss_det(mx.select_rows(rows).rows) for rows in row_sets]
