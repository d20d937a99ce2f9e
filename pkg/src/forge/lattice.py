"""From a hypergraph to a lattice basis whose sparsest vector encodes density.

``C = [A | R | W]`` where ``A`` is the Vandermonde gadget of the VF tensor
product, ``R`` replaces each 1 of ``Q`` by a reduced Vandermonde row and ``W``
is a narrow reduced Vandermonde matrix.  The basis ``B`` is ``2h`` copies of
``C`` followed by an identity block.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Sequence

import mpmath
import numpy as np

from . import caps as _caps
from .core.intmatrix import IntMatrix, check_entry_cap, hstack, left_kernel_basis, rank_mod_p, rank_of_rows, tensor_power
from .core.primes import vandermonde_prime
from .core.vandermonde import reduced_vandermonde, vandermonde_row
from .errors import InfeasibleParametersError, ParameterError, SizeError
from .hypergraph import Hypergraph, duplicate_edges, indicator_matrix
from .numbers import ceil_frac, exact, floor_frac, to_json_number
from .vf import EdgeTupleSet, VFTensorResult, kernel_combinations, tuple_index, vf_tensor


# -- parameters -------------------------------------------------------------------------

@dataclass(frozen=True)
class ReductionParams:
    n: int
    alpha: Fraction
    beta: Fraction
    r: Fraction
    d: int
    t: int
    q: int
    h: int
    w: int
    mode: str = "manual"
    duplication: int = 1            # copies of each edge of the input hypergraph
    m: int = 0                      # edge count after duplication
    n_vertices: int = 0
    notes: tuple = field(default=(), compare=False)

    def to_json(self) -> dict:
        out = {}
        for k, v in asdict(self).items():
            if isinstance(v, Fraction):
                v = to_json_number(v)
            elif isinstance(v, tuple):
                v = list(v)
            out[k] = v
        return out

    @classmethod
    def from_json(cls, data: dict) -> "ReductionParams":
        kw = dict(data)
        for k in ("alpha", "beta", "r"):
            kw[k] = exact(kw.get(k, 0))
        kw["notes"] = tuple(kw.get("notes", ()))
        return cls(**kw)


def _log2(x) -> mpmath.mpf:
    return mpmath.log(mpmath.mpf(x), 2)


def _smallest_int_in(lo, hi, bracket: str, multiple_of: int = 1, at_least: int = 1) -> int:
    """Smallest integer ``v >= at_least`` with ``lo <= v <= hi`` and ``multiple_of | v``.

    ``lo`` and ``hi`` may be Fractions or mpmath numbers.
    """
    if isinstance(lo, Fraction):
        start = ceil_frac(lo)
    else:
        start = int(mpmath.ceil(lo))
    start = max(start, at_least)
    start = -(-start // multiple_of) * multiple_of
    if start > hi:
        raise InfeasibleParametersError(bracket, f"no admissible integer in [{_fmt(lo)}, {_fmt(hi)}]")
    return start


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x) if x.denominator == 1 or abs(x) > 10**12 else f"{float(x):.6g}"
    return mpmath.nstr(x, 8)


def density_level(alpha: Fraction, r: Fraction, d: int) -> Fraction:
    """``alpha (1/r)^(d-1)``, the planted edge fraction."""
    return alpha / r ** (d - 1)


def choose_params(
    n: int,
    h_graph: Hypergraph,
    alpha,
    r,
    d: int,
    beta,
    mode: str = "manual",
    *,
    t: int | None = None,
    q: int | None = None,
    h: int | None = None,
    w: int | None = None,
    duplication: int = 1,
) -> ReductionParams:
    """Pick or validate the reduction parameters for a hypergraph.

    Asymptotic mode takes the smallest admissible integer in each bracket,
    in the order t, q, h, w, with every unspecified constant set to 1.
    Manual mode checks the supplied values for consistency.
    """
    alpha, r, beta = exact(alpha), exact(r), exact(beta)
    if n < 1 or d < 1 or r < 1 or not 0 <= alpha <= 1 or not 0 <= beta <= 1:
        raise ParameterError("need n, d >= 1, r >= 1 and alpha, beta in [0, 1]")
    if h_graph.arity != d:
        raise ParameterError(f"hypergraph arity {h_graph.arity} differs from d={d}")
    nv = h_graph.n_vertices
    if mode == "manual":
        if None in (t, q, h, w):
            raise ParameterError("manual mode needs t, q, h and w")
        m = h_graph.n_edges * duplication
        for name, v in (("t", t), ("q", q), ("h", h), ("w", w), ("duplication", duplication)):
            if v < 1:
                raise ParameterError(f"{name} must be a positive integer")
        if m % t:
            raise InfeasibleParametersError("t | M", f"t={t} does not divide M={m}")
        if h % n:
            raise InfeasibleParametersError("n | h", f"n={n} does not divide h={h}")
        prime = vandermonde_prime(m**q)
        if w >= prime:
            raise InfeasibleParametersError("w < a", f"w={w} must stay below the prime {prime}")
        if h // n >= prime:
            raise InfeasibleParametersError("h/n < a", f"h/n={h // n} must stay below the prime {prime}")
        return ReductionParams(n, alpha, beta, r, d, t, q, h, w, "manual", duplication, m, nv)
    if mode != "asymptotic":
        raise ParameterError(f"unknown mode {mode!r}")
    lvl = density_level(alpha, r, d)
    if lvl == 0:
        raise InfeasibleParametersError("t", "alpha (1/r)^(d-1) is zero")
    t = _smallest_int_in(n / lvl, 2 * n / lvl, "t")
    notes = []
    if beta * t >= 1:
        raise InfeasibleParametersError("1/t > beta", f"t={t} with beta={beta}")
    dup = n * n * t * nv
    m = dup * h_graph.n_edges
    with mpmath.workdps(50):
        if n < 2:
            raise InfeasibleParametersError("q", "log n vanishes for n < 2")
        ll = _log2(_log2(n))
        if ll <= 0:
            raise InfeasibleParametersError("q", f"log log n = {mpmath.nstr(ll, 5)} is not positive")
        q_lo = _log2(n) / ll
        q = _smallest_int_in(q_lo, 2 * q_lo, "q")
    x = lvl * m
    h = _smallest_int_in(Fraction(ceil_frac(x) ** q), (2 * x) ** q, "h", multiple_of=n)
    y = (x / (Fraction(nv) / r)) ** q / n
    w = _smallest_int_in(y, 2 * y, "w")
    prime = vandermonde_prime(m**q)
    if w >= prime:
        raise InfeasibleParametersError("w < a", f"w={w} reaches the prime {prime}")
    if h // n >= prime:
        raise InfeasibleParametersError("h/n < a", f"h/n={h // n} reaches the prime {prime}")
    if not avg_principle_check(n, m, nv, alpha, r, q, d, h, w).holds:
        notes.append("averaging inequality fails at this n")
    return ReductionParams(n, alpha, beta, r, d, t, q, h, w, "asymptotic", dup, m, nv, tuple(notes))


# -- construction -------------------------------------------------------------------------

def build_R(big_q: IntMatrix, w: int, prime_a: int) -> IntMatrix:
    """One width-``w`` block per column of Q; a 1 in row e becomes Vandermonde row e+1."""
    if w >= prime_a:
        raise ParameterError(f"w={w} must be smaller than the prime {prime_a}")
    if big_q.nrows >= prime_a:
        raise ParameterError(f"{big_q.nrows} rows need a prime above {big_q.nrows}, got {prime_a}")
    check_entry_cap(big_q.nrows, big_q.ncols * w, None, "matrix R")
    vrows = [vandermonde_row(prime_a, w, e + 1) for e in range(big_q.nrows)]
    zero = (0,) * w
    rows = []
    for e, qrow in enumerate(big_q.rows):
        out: list[int] = []
        for v in qrow:
            out.extend(vrows[e] if v else zero)
        rows.append(tuple(out))
    return IntMatrix(tuple(rows))


def build_W(rows: int, width: int) -> tuple[IntMatrix, int]:
    prime = vandermonde_prime(rows)
    v = reduced_vandermonde(prime, width)
    return IntMatrix(v.rows[:rows]), prime


@dataclass(frozen=True)
class LatticeInstance:
    A: IntMatrix
    R: IntMatrix
    W: IntMatrix
    C: IntMatrix
    B: IntMatrix
    params: ReductionParams
    vf: VFTensorResult
    prime_w: int
    provenance: dict = field(default_factory=dict, compare=False)

    @property
    def Q(self) -> IntMatrix:
        return self.vf.Q

    def manifest(self) -> dict:
        return {
            "params": self.params.to_json(),
            "prime_a": self.vf.prime_a,
            "prime_w": self.prime_w,
            "shapes": {k: list(getattr(self, k).shape) for k in ("A", "R", "W", "C", "B")},
            "provenance": self.provenance,
        }


def build_instance(p: IntMatrix, params: ReductionParams, provenance: dict | None = None) -> LatticeInstance:
    m = p.nrows
    if params.m and params.m != m:
        raise ParameterError(f"params expect M={params.m}, the matrix has {m} rows")
    if params.h % params.n:
        raise ParameterError("n must divide h")
    vf = vf_tensor(p, params.t, params.q)
    mq = m**params.q
    big_r = build_R(vf.Q, params.w, vf.prime_a)
    big_w, prime_w = build_W(mq, params.h // params.n)
    big_c = hstack([vf.A, big_r, big_w])
    check_entry_cap(mq, 2 * params.h * big_c.ncols + mq, None, "basis B")
    ident = IntMatrix.identity(mq)
    big_b = IntMatrix(tuple(row * (2 * params.h) + irow for row, irow in zip(big_c.rows, ident.rows)))
    return LatticeInstance(vf.A, big_r, big_w, big_c, big_b, params, vf, prime_w, dict(provenance or {}))


def instance_from_hypergraph(h_graph: Hypergraph, params: ReductionParams, provenance: dict | None = None) -> LatticeInstance:
    dup = duplicate_edges(h_graph, params.duplication) if params.duplication > 1 else h_graph
    return build_instance(indicator_matrix(dup), params, provenance)


def planted_rows(edges: Iterable[int], m: int, q: int) -> list[int]:
    """Row indices of the tuples ``(E')^q`` for a set of edge indices ``E'``."""
    es = sorted(set(edges))
    return sorted(tuple_index(tup, m) for tup in product(es, repeat=q))


# -- completeness ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    x: tuple[int, ...]
    method: str
    searched: int


def _restricted_columns(c: IntMatrix, rows: Sequence[int]) -> np.ndarray:
    sub = np.array([c.rows[i] for i in rows], dtype=object)
    keep = [j for j in range(c.ncols) if any(sub[:, j])]
    return sub[:, keep] if keep else np.zeros((len(rows), 0), dtype=object)


def _row_indices(rows, nrows: int) -> list[int]:
    if isinstance(rows, EdgeTupleSet):
        if rows.m**rows.q != nrows:
            raise ParameterError(f"tuple set over [{rows.m}]^{rows.q} does not index {nrows} rows")
        return sorted(tuple_index(tup, rows.m) for tup in rows)
    return sorted(set(int(i) for i in rows))


def completeness_witness(
    c: IntMatrix,
    rows: Iterable[int],
    h_minus: int | None = None,
    cap: int | None = None,
) -> Witness | None:
    """Nonzero ``x`` in {-1,0,1} supported on ``rows`` with ``x C = 0``.

    Found as a collision between two {-1,0,1} half-combinations of the row-
    restricted matrix (a meet-in-the-middle form of two 0/1 subset sums
    agreeing).  Returns None when no such vector exists.
    """
    rows = _row_indices(rows, c.nrows)
    if h_minus is not None and len(rows) != h_minus:
        raise ParameterError(f"{len(rows)} planted rows, expected {h_minus}")
    if not rows:
        return None
    if cap is None:
        cap = _caps.current().collision_side
    sub = _restricted_columns(c, rows)
    k = len(rows)

    def expand(local: Sequence[int]) -> tuple[int, ...]:
        x = [0] * c.nrows
        for i, v in zip(rows, local):
            x[i] = v
        return tuple(x)

    for i in range(k):
        if not any(sub[i]):
            local = [0] * k
            local[i] = 1
            return Witness(expand(local), "zero-row", 1)
    left, right = k // 2, k - k // 2
    if 3**right > cap:
        raise SizeError(f"3^{right} half-combinations exceed the cap {cap}")
    sums: dict[tuple, tuple[int, ...]] = {}
    zero_key = tuple(0 for _ in range(sub.shape[1]))
    for coeffs in product((0, 1, -1), repeat=left):
        key = tuple(int(v) for v in np.dot(np.array(coeffs, dtype=object), sub[:left])) if left else zero_key
        if key not in sums or (key == zero_key and not any(sums[key])):
            sums[key] = coeffs
    searched = len(sums)
    for coeffs in product((0, 1, -1), repeat=right):
        searched += 1
        key = tuple(-int(v) for v in np.dot(np.array(coeffs, dtype=object), sub[left:]))
        hit = sums.get(key)
        if hit is None:
            continue
        if any(coeffs) or any(hit):
            return Witness(expand(hit + coeffs), "collision", searched)
    return None


def kernel_witness(c: IntMatrix, rows: Iterable[int], cap: int | None = None) -> Witness | None:
    """Fallback search: {-1,0,1}-combinations of a kernel basis of the restricted rows."""
    rows = _row_indices(rows, c.nrows)
    if cap is None:
        cap = _caps.current().kernel_combinations
    sub = IntMatrix(tuple(c.rows[i] for i in rows))
    basis = left_kernel_basis(sub)
    count = 0
    for local in kernel_combinations(basis, cap):
        count += 1
        if any(local) and all(v in (-1, 0, 1) for v in local):
            x = [0] * c.nrows
            for i, v in zip(rows, local):
                x[i] = v
            return Witness(tuple(x), "kernel", count)
    return None


# -- soundness ------------------------------------------------------------------------------

def implicated_columns(x: Sequence[int], big_q: IntMatrix) -> dict[int, int]:
    out: dict[int, int] = {}
    for xi, row in zip(x, big_q.rows):
        if xi:
            for j, v in enumerate(row):
                if v:
                    out[j] = out.get(j, 0) + 1
    return out


@dataclass(frozen=True)
class SoundnessVerdict:
    verdict: str                  # "W", "A", "R" names the certifying block, else "xC = 0"
    support: int
    xW_nonzero: bool
    xA_nonzero: bool
    xR_nonzero: bool
    implicated: int
    xC_zero: bool


def soundness_claims_check(inst: LatticeInstance, x: Sequence[int]) -> SoundnessVerdict:
    """Evaluate each block separately, in the order W, A, R of the case split."""
    if len(x) != inst.C.nrows:
        raise ParameterError(f"x has length {len(x)}, expected {inst.C.nrows}")
    xw = any(inst.W.left_mul(x))
    xa = any(inst.A.left_mul(x))
    xr = any(inst.R.left_mul(x))
    verdict = "W" if xw else "A" if xa else "R" if xr else "xC = 0"
    return SoundnessVerdict(
        verdict,
        sum(1 for v in x if v),
        xw,
        xa,
        xr,
        len(implicated_columns(x, inst.Q)),
        not (xw or xa or xr),
    )


# -- SVP-style oracles ----------------------------------------------------------------------

def _column_directions(mx: IntMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Distinct nonzero columns up to sign and scaling, with multiplicities."""
    counts: dict[tuple[int, ...], int] = {}
    for col in mx.columns():
        if not any(col):
            continue
        g = 0
        for v in col:
            g = math.gcd(g, v)
        prim = tuple(v // g for v in col)
        if next(v for v in prim if v) < 0:
            prim = tuple(-v for v in prim)
        counts[prim] = counts.get(prim, 0) + 1
    if not counts:
        return np.zeros((mx.nrows, 0), dtype=np.int64), np.zeros(0, dtype=np.int64)
    keys = sorted(counts)
    dirs = np.array(keys, dtype=object).T
    weights = np.array([counts[k] for k in keys], dtype=np.int64)
    return dirs, weights


def _half_box(dim: int, bound: int, chunk: int):
    """Box vectors whose first nonzero entry is positive, in chunks."""
    side = 2 * bound + 1
    for lead in range(dim):
        # zeros before position lead, a positive entry at lead, anything after
        tail = dim - lead - 1
        total = bound * side**tail
        for start in range(0, total, chunk):
            idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
            cols = []
            for _ in range(tail):
                idx, rem = np.divmod(idx, side)
                cols.append(rem - bound)
            head = idx + 1
            block = np.zeros((head.size, dim), dtype=np.int64)
            block[:, lead] = head
            for k, col in enumerate(reversed(cols)):
                block[:, lead + 1 + k] = col
            yield block


@dataclass(frozen=True)
class MinSupport:
    value: int
    witness: tuple[int, ...]
    vectors: int


def min_support_lattice(b: IntMatrix, coeff_bound: int, cap: int | None = None) -> MinSupport:
    """Exact min of ``||x B||_0`` over nonzero x in ``[-k, k]^rows``.

    Only half the box is scanned since ``x`` and ``-x`` give the same support;
    columns parallel to each other are merged with multiplicity weights.
    """
    if coeff_bound < 1:
        raise ParameterError("coefficient bound must be >= 1")
    if cap is None:
        cap = _caps.current().box_vectors
    dim = b.nrows
    half = ((2 * coeff_bound + 1) ** dim - 1) // 2
    if half > cap:
        raise SizeError(f"{half} coefficient vectors exceed the cap {cap}")
    dirs, weights = _column_directions(b)
    if dirs.shape[1] == 0:
        x = (1,) + (0,) * (dim - 1)
        return MinSupport(0, x, 1)
    limit = coeff_bound * int(max(sum(abs(int(v)) for v in dirs[:, j]) for j in range(dirs.shape[1])))
    if limit >= 2**62:
        raise SizeError("entries too large for int64 products")
    d64 = dirs.astype(np.int64)
    best, best_x, seen = None, None, 0
    for xs in _half_box(dim, coeff_bound, 1 << 16):
        seen += len(xs)
        weight = ((xs @ d64) != 0).astype(np.int64) @ weights
        j = int(np.argmin(weight))
        if best is None or weight[j] < best:
            best, best_x = int(weight[j]), tuple(int(v) for v in xs[j])
            if best == 0:
                break
    return MinSupport(best, best_x, seen)


@dataclass(frozen=True)
class ShortestInBox:
    p: object
    value: object              # the l_p norm of the best lattice vector
    witness: tuple[int, ...]
    vector: tuple[int, ...]
    vectors: int


def shortest_in_box(b: IntMatrix, p, coeff_bound: int, cap: int | None = None) -> ShortestInBox:
    """Shortest nonzero ``x B`` in the l_p norm over x in ``[-k, k]^rows``.

    Lattice vectors that are zero for a nonzero x are skipped, so the result
    is the shortest nonzero lattice vector reachable from the box.
    """
    if p == 0:
        ms = min_support_lattice(b, coeff_bound, cap)
        return ShortestInBox(0, ms.value, ms.witness, b.left_mul(ms.witness), ms.vectors)
    if coeff_bound < 1:
        raise ParameterError("coefficient bound must be >= 1")
    if cap is None:
        cap = _caps.current().box_vectors
    dim = b.nrows
    half = ((2 * coeff_bound + 1) ** dim - 1) // 2
    if half > cap:
        raise SizeError(f"{half} coefficient vectors exceed the cap {cap}")
    inf = p == math.inf or p == "inf"
    if not inf and (p < 1):
        raise ParameterError(f"p must be 0, inf or at least 1, got {p}")
    integral = not inf and int(p) == p
    bound = coeff_bound * sum(abs(v) for row in b.rows for v in row)
    if bound >= 2**62 or (integral and bound ** int(p) * b.ncols >= 2**62):
        raise SizeError("entries too large for int64 products")
    arr = b.to_int64()
    best, best_x, seen = None, None, 0
    for xs in _half_box(dim, coeff_bound, 1 << 15):
        seen += len(xs)
        vals = np.abs(xs @ arr)
        if inf:
            score = vals.max(axis=1).astype(np.float64)
        elif integral:
            score = (vals ** int(p)).sum(axis=1)
        else:
            score = (vals.astype(np.float64) ** float(p)).sum(axis=1)
        score = np.where(vals.any(axis=1), score, np.inf if score.dtype.kind == "f" else np.iinfo(np.int64).max)
        j = int(np.argmin(score))
        if vals[j].any() and (best is None or score[j] < best):
            best, best_x = score[j], tuple(int(v) for v in xs[j])
    if best_x is None:
        raise ParameterError("every box vector maps to zero")
    vec = b.left_mul(best_x)
    return ShortestInBox(p, lp_norm(vec, p), best_x, vec, seen)


def no_short_kernel_vector(c: IntMatrix, below: int, cap: int | None = None) -> tuple[bool, tuple[int, ...] | None]:
    """Whether every nonzero x with ``x C = 0`` has more than ``below - 1`` nonzeros.

    Any such x with fewer than ``below`` nonzeros lives inside some row set of
    size ``min(below - 1, rows)``, so it is enough that each of those row sets
    is linearly independent.  Returns a dependent row set on failure.
    """
    size = min(below - 1, c.nrows)
    if size <= 0:
        return True, None
    if cap is None:
        cap = _caps.current().combinations
    if math.comb(c.nrows, size) > cap:
        raise SizeError(f"C({c.nrows},{size}) row sets exceed the cap {cap}")
    arr = c.to_int64() if c.max_abs() < 2**31 else None
    for rows in combinations(range(c.nrows), size):
        if arr is not None and rank_mod_p(arr[list(rows)], 2_147_483_629) == size:
            continue
        if rank_of_rows([c.rows[i] for i in rows]) < size:
            return False, rows
    return True, None


def lp_norm_power(v: Sequence[int], p: int) -> int:
    """``sum |v_i|^p`` for integer ``p >= 1``, exactly."""
    if p < 1 or int(p) != p:
        raise ParameterError("exact powers need an integer p >= 1")
    return sum(abs(int(x)) ** int(p) for x in v)


def lp_norm(v: Sequence[int], p) -> int | float | Fraction:
    """``l_p`` norm; ``p=0`` counts nonzeros, ``p=inf`` is the max entry.

    Integer ``p`` returns an exact int whenever the p-th root is integral.
    """
    if p == 0:
        return sum(1 for x in v if x)
    if p == math.inf or p == "inf":
        return max((abs(int(x)) for x in v), default=0)
    if p < 1:
        raise ParameterError(f"p must be 0, inf or at least 1, got {p}")
    if int(p) == p:
        s = lp_norm_power(v, int(p))
        root = _integer_root(s, int(p))
        if root is not None:
            return root
    with mpmath.workdps(40):
        s = mpmath.fsum(mpmath.mpf(abs(int(x))) ** mpmath.mpf(p) for x in v)
        return float(s ** (1 / mpmath.mpf(p)))


def _integer_root(s: int, p: int) -> int | None:
    if s == 0:
        return 0
    r = round(s ** (1.0 / p)) if s < 2**1000 else int(mpmath.nint(mpmath.root(s, p)))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**p == s:
            return cand
    return None


def tensor_amplify(b: IntMatrix, k: int, cap: int | None = None) -> IntMatrix:
    return tensor_power(b, k, cap)


# -- numeric checkers -----------------------------------------------------------------------

@dataclass(frozen=True)
class GammaReport:
    exponent: object          # n^(1/loglog n)/p - 1, exact when possible
    lhs: object               # 2^exponent
    log_m_prime: object       # log2 of M'
    epsilon: object
    ratio: object             # log2(lhs) / (log2 M')^(1 - epsilon)
    exact: bool


def _exact_root_power(n: int) -> Fraction | None:
    """``n^(1/log2 log2 n)`` when n = 2^k with log2 k an integer dividing k."""
    if n < 4 or n & (n - 1):
        return None
    k = n.bit_length() - 1
    if k & (k - 1):
        return None
    j = k.bit_length() - 1
    if j == 0 or k % j:
        return None
    return Fraction(2 ** (k // j))


def gamma_bound_check(n: int, p, m) -> GammaReport:
    """Evaluate the final gap ``2^(n^(1/loglog n)/p - 1)`` against the rank.

    Logs are base 2 and the unspecified constant in the epsilon exponent is 1.
    There is no verdict: the asymptotic constants are not pinned down.
    """
    if n < 16:
        raise ParameterError("need n >= 16")
    p = exact(p)
    if p < 1:
        raise ParameterError("need p >= 1")
    if m is None or m < 1:
        raise ParameterError("need M >= 1")
    root = _exact_root_power(n)
    with mpmath.workdps(50):
        if root is not None:
            exponent = root / p - 1
            lhs = Fraction(2) ** exponent.numerator if exponent.denominator == 1 else mpmath.power(2, mpmath.mpf(exponent.numerator) / exponent.denominator)
            power = mpmath.mpf(root.numerator)
            exact_flag = exponent.denominator == 1
        else:
            ll = _log2(_log2(n))
            power = mpmath.power(n, 1 / ll)
            exponent = power / mpmath.mpf(p.numerator) * p.denominator - 1
            lhs = mpmath.power(2, exponent)
            exact_flag = False
        log_mp = power * _log2(m)
        if log_mp <= 1:
            raise ParameterError("log M' must exceed 1 for the epsilon expression")
        llm = _log2(log_mp)
        if llm <= 1:
            raise ParameterError("log log M' must exceed 1 for the epsilon expression")
        eps = _log2(llm) / mpmath.sqrt(llm)
        log_lhs = mpmath.mpf(exponent.numerator) / exponent.denominator if isinstance(exponent, Fraction) else exponent
        ratio = log_lhs / mpmath.power(log_mp, 1 - eps)
        if isinstance(lhs, Fraction) and lhs.denominator == 1:
            lhs = lhs.numerator
        return GammaReport(exponent, lhs, log_mp, eps, ratio, exact_flag)


@dataclass(frozen=True)
class AvgPrincipleReport:
    holds: bool
    lhs: mpmath.mpf
    w: int
    lhs_pow_d: Fraction        # lhs^d, exact
    w_pow_d: int


def avg_principle_check(n: int, m: int, nv: int, alpha, r, q: int, d: int, h: int, w) -> AvgPrincipleReport:
    """Is ``2 h d^q / (N^q ((alpha (1/r)^(d-1))^q / n^2)^(1/d)) < w``?

    Decided exactly by comparing d-th powers of both sides; the LHS itself is
    also returned to 50 significant digits.
    """
    alpha, r, w = exact(alpha), exact(r), exact(w)
    for name, v in (("n", n), ("M", m), ("N", nv), ("alpha", alpha), ("r", r), ("q", q), ("d", d), ("h", h), ("w", w)):
        if v <= 0:
            raise ParameterError(f"{name} must be positive")
    inner = density_level(alpha, r, d) ** q / (n * n)
    lhs_d = Fraction(2 * h * d**q) ** d / (Fraction(nv) ** (q * d) * inner)
    holds = lhs_d < w**d
    with mpmath.workdps(50):
        lhs = mpmath.mpf(2 * h * d**q) / (
            mpmath.power(nv, q) * mpmath.power(mpmath.mpf(inner.numerator) / inner.denominator, mpmath.mpf(1) / d)
        )
    return AvgPrincipleReport(holds, lhs, w, lhs_d, w**d)


# -- toy parameter search ---------------------------------------------------------------------

@dataclass(frozen=True)
class ToySoundness:
    params: ReductionParams
    delta: Fraction


def toy_soundness_params(h_graph: Hypergraph, beta, q: int, max_support: int | None = None) -> ToySoundness | None:
    """Small parameters under which the soundness argument applies verbatim.

    Looks for t | M with beta t < 1, n | h, a density ``delta`` and a width
    ``w`` such that ``h/n > M^q delta^d / (1 - beta t)^q`` and
    ``2h d^q / (N^q delta) < w``, both widths staying below the prime.
    ``2h`` is kept at most ``max_support`` (default ``M^q``) so that the
    resulting soundness claim is not vacuous.  Prefers large h, then small w.
    """
    beta = exact(beta)
    m, nv, d = h_graph.n_edges, h_graph.n_vertices, h_graph.arity
    mq = m**q
    prime = vandermonde_prime(mq)
    limit = max_support if max_support is not None else mq
    best = None
    for t in range(1, m + 1):
        if m % t or beta * t >= 1:
            continue
        shrink = (1 - beta * t) ** q
        for h in range(limit // 2, 0, -1):
            for n in range(1, h + 1):
                if h % n or h // n >= prime:
                    continue
                # largest delta allowed by the first inequality, approached from below
                cap_d = Fraction(h // n) * shrink / mq
                delta = _root_below(cap_d, d)
                if delta <= 0:
                    continue
                w = floor_frac(Fraction(2 * h * d**q) / (nv**q * delta)) + 1
                if w >= prime:
                    continue
                cand = (h, -w, -t, -n)
                if best is None or cand > best[0]:
                    best = (cand, t, h, n, w, delta)
            if best is not None and best[2] == h:
                break
    if best is None:
        return None
    _, t, h, n, w, delta = best
    params = ReductionParams(n, Fraction(1), beta, Fraction(1), d, t, q, h, w, "manual", 1, m, nv)
    return ToySoundness(params, delta)


def _root_below(x: Fraction, d: int, denom: int = 1000) -> Fraction:
    """Largest ``k/denom`` with ``(k/denom)^d < x`` (0 if none), capped at 1."""
    lo, hi = 0, denom
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if Fraction(mid, denom) ** d < x:
            lo = mid
        else:
            hi = mid - 1
    return Fraction(lo, denom)
