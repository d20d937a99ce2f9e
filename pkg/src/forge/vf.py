"""Vandermonde-fortified tensor products and the legality machinery around them.

Rows of ``Q = P^{(x)q}`` are indexed by q-tuples of rows of ``P``; tuple
``(e_1, .., e_q)`` sits at row ``sum e_k M^(q-k)``, which is both lexicographic
order and Kronecker order.  The gadget ``A`` has one block per axis line of
``[M]^q``: the block for a line puts distinct reduced Vandermonde rows on the
tuples of that line and zeros elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Sequence

import numpy as np

from . import caps as _caps
from .core.intmatrix import IntMatrix, _rref, check_entry_cap, left_kernel_basis, tensor_power
from .core.primes import vandermonde_prime
from .errors import ParameterError, SizeError
from .hypergraph import from_indicator, qrdh_case2_holds
from .numbers import exact

Tup = tuple[int, ...]


def tuple_index(tup: Sequence[int], m: int) -> int:
    idx = 0
    for e in tup:
        idx = idx * m + e
    return idx


def index_tuple(idx: int, m: int, q: int) -> Tup:
    out = []
    for _ in range(q):
        idx, r = divmod(idx, m)
        out.append(r)
    return tuple(reversed(out))


def all_tuples(m: int, q: int) -> list[Tup]:
    return list(product(range(m), repeat=q))


@dataclass(frozen=True)
class AxisLine:
    """The tuples that agree with ``fixed`` off coordinate ``axis`` (0-based)."""

    axis: int
    fixed: Tup

    def members(self, m: int) -> list[Tup]:
        return [self.fixed[: self.axis] + (v,) + self.fixed[self.axis :] for v in range(m)]

    def key(self, tup: Tup) -> bool:
        return tup[: self.axis] + tup[self.axis + 1 :] == self.fixed


def slice_family(m: int, q: int) -> list[AxisLine]:
    """All ``q * M^(q-1)`` axis lines, by axis and then fixed coordinates."""
    return [AxisLine(axis, fixed) for axis in range(q) for fixed in product(range(m), repeat=q - 1)]


def _as_tuple_set(members: Iterable) -> set[Tup]:
    out = set()
    for e in members:
        out.add((int(e),) if isinstance(e, (int, np.integer)) else tuple(int(v) for v in e))
    return out


@dataclass(frozen=True)
class EdgeTupleSet:
    q: int
    m: int
    members: frozenset

    def __post_init__(self):
        canon = frozenset(_as_tuple_set(self.members))
        for tup in canon:
            if len(tup) != self.q or any(not 0 <= v < self.m for v in tup):
                raise ParameterError(f"{tup} is not a {self.q}-tuple over 0..{self.m - 1}")
        object.__setattr__(self, "members", canon)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members))

    def __contains__(self, tup) -> bool:
        return tup in self.members


# -- construction -------------------------------------------------------------------

@dataclass(frozen=True)
class VFTensorResult:
    A: IntMatrix
    Q: IntMatrix
    t: int
    q: int
    prime_a: int
    slice_family: tuple[AxisLine, ...]
    m: int
    n: int

    @property
    def block_width(self) -> int:
        return self.m // self.t

    def block(self, k: int) -> IntMatrix:
        w = self.block_width
        return self.A.select_cols(range(k * w, (k + 1) * w))

    def manifest(self) -> dict:
        return {
            "M": self.m,
            "N": self.n,
            "t": self.t,
            "q": self.q,
            "prime_a": self.prime_a,
            "slice_family_size": len(self.slice_family),
            "block_width": self.block_width,
            "A_shape": list(self.A.shape),
            "Q_shape": list(self.Q.shape),
        }


def _check_zero_one(p: IntMatrix) -> None:
    if any(v not in (0, 1) for r in p.rows for v in r):
        raise ParameterError("P must be a 0/1 matrix")


def vf_tensor(p: IntMatrix, t: int, q: int, cap: int | None = None) -> VFTensorResult:
    _check_zero_one(p)
    m, n = p.shape
    if t < 1 or q < 1:
        raise ParameterError("t and q must be positive")
    if m % t:
        raise ParameterError(f"t={t} does not divide M={m}")
    mq, width = m**q, m // t
    check_entry_cap(mq, q * mq // t, cap, "gadget A")
    check_entry_cap(mq, n**q, cap, "tensor power Q")
    a = vandermonde_prime(mq)
    lines = slice_family(m, q)
    rows = [[0] * (len(lines) * width) for _ in range(mq)]
    for k, line in enumerate(lines):
        for tup in line.members(m):
            i = tuple_index(tup, m)
            for j in range(width):
                rows[i][k * width + j] = pow(i + 1, j, a)
    big_a = IntMatrix(tuple(tuple(r) for r in rows))
    big_q = tensor_power(p, q, cap)
    return VFTensorResult(big_a, big_q, t, q, a, tuple(lines), m, n)


# -- legality -----------------------------------------------------------------------

def _line_counts(members: set[Tup], q: int) -> dict[tuple[int, Tup], int]:
    counts: dict[tuple[int, Tup], int] = {}
    for tup in members:
        for axis in range(q):
            key = (axis, tup[:axis] + tup[axis + 1 :])
            counts[key] = counts.get(key, 0) + 1
    return counts


def illegal_line(members: Iterable, t: int, m: int) -> tuple[AxisLine, int] | None:
    """An axis line meeting the set in 1..M/t-1 tuples, with that count."""
    s = _as_tuple_set(members)
    if not s:
        return None
    q = len(next(iter(s)))
    need = Fraction(m, t)
    for (axis, fixed), c in sorted(_line_counts(s, q).items()):
        if c < need:
            return AxisLine(axis, fixed), c
    return None


def is_legal(members: Iterable, t: int, m: int) -> bool:
    return illegal_line(members, t, m) is None


def maximal_legal_subset(members: Iterable, t: int, m: int) -> set[Tup]:
    """Largest legal subset; unions of legal sets are legal, so it is unique."""
    s = _as_tuple_set(members)
    while True:
        bad = illegal_line(s, t, m)
        if bad is None:
            return s
        line = bad[0]
        s = {tup for tup in s if not line.key(tup)}


def neighborhood(p: IntMatrix, members: Iterable) -> set[Tup]:
    supports = [tuple(j for j, v in enumerate(r) if v) for r in p.rows]
    out: set[Tup] = set()
    for tup in _as_tuple_set(members):
        out.update(product(*(supports[e] for e in tup)))
    return out


def slice_set(members: Iterable, kind: str, coords: Sequence[int]):
    """The W, X, Y and Z slice operators.

    ``Y`` (edge tuples) and ``W`` (vertex tuples) fix the first coordinate and
    return the set of remaining (q-1)-tuples.  ``Z`` and ``X`` fix coordinates
    2..q and return the set of first coordinates.
    """
    s = _as_tuple_set(members)
    coords = tuple(coords)
    if kind in ("Y", "W"):
        if len(coords) != 1:
            raise ParameterError(f"{kind}-slices fix exactly one coordinate")
        return {tup[1:] for tup in s if tup[0] == coords[0]}
    if kind in ("Z", "X"):
        return {tup[0] for tup in s if tup[1:] == coords}
    raise ParameterError(f"unknown slice kind {kind!r}")


# -- kernel checks --------------------------------------------------------------------

@dataclass(frozen=True)
class KernelLegality:
    ok: bool
    witness: tuple[int, ...] | None
    kernel_dimension: int
    combinations_checked: int
    combination_terms: int          # max nonzero coefficients per combination
    supports_scanned: int           # 0 when the exact scan was skipped
    exact: bool                     # every possible support was examined


def support_of(x: Sequence[int]) -> set[Tup]:
    return {i for i, v in enumerate(x) if v}


def _support_tuples(x: Sequence[int], m: int, q: int) -> set[Tup]:
    return {index_tuple(i, m, q) for i, v in enumerate(x) if v}


def _combination_terms(k: int, cap: int) -> int:
    total, terms = 0, 0
    from math import comb

    for j in range(1, k + 1):
        total += comb(k, j) * 2**j
        if total > cap:
            break
        terms = j
    return terms


def kernel_combinations(basis: Sequence[Sequence[int]], cap: int) -> Iterable[tuple[int, ...]]:
    """Nonzero {-1,0,1}-combinations of the basis, fewest terms first."""
    k = len(basis)
    terms = _combination_terms(k, cap)
    n = len(basis[0]) if basis else 0
    for j in range(1, terms + 1):
        for chosen in combinations(range(k), j):
            for signs in product((1, -1), repeat=j):
                x = [0] * n
                for s, b in zip(signs, chosen):
                    for i, v in enumerate(basis[b]):
                        x[i] += s * v
                yield tuple(x)


def _independent_of(vectors: list[list[Fraction]], v: Sequence[Fraction]) -> bool:
    if not vectors:
        return any(x != 0 for x in v)
    return len(_rref([*vectors, list(v)])[1]) > len(_rref(vectors)[1])


def realizable_supports(basis: Sequence[Sequence[int]], n: int) -> Iterable[tuple[frozenset, tuple[int, ...]]]:
    """Every exact support of a nonzero vector in the row space of ``basis``.

    A set S is a support iff its complement is a flat of the column matroid
    of the basis.  Yields each support with an integer vector realising it.
    """
    k = len(basis)
    if k == 0:
        return
    cols = [[Fraction(basis[r][i]) for r in range(k)] for i in range(n)]
    for size in range(n):
        for flat in combinations(range(n), size):
            fset = set(flat)
            span = [cols[i] for i in flat]
            rank = len(_rref(span)[1]) if span else 0
            if rank == k:
                continue
            base = _rref(span)[0][:rank] if span else []
            if all(_independent_of(base, cols[i]) for i in range(n) if i not in fset):
                support = frozenset(i for i in range(n) if i not in fset)
                yield support, _realize(basis, fset, support)


def _realize(basis, zero_set: set[int], support: frozenset) -> tuple[int, ...]:
    # the subspace of combinations vanishing on zero_set, then a generic element
    k, n = len(basis), len(basis[0])
    if zero_set:
        sub = IntMatrix(tuple(tuple(basis[r][i] for i in sorted(zero_set)) for r in range(k)))
        coeffs = left_kernel_basis(sub)
    else:
        coeffs = [tuple(1 if j == r else 0 for j in range(k)) for r in range(k)]
    vecs = [tuple(sum(c[r] * basis[r][i] for r in range(k)) for i in range(n)) for c in coeffs]
    for base in range(1, 4 * n + 3):
        x = [0] * n
        for p, v in enumerate(vecs):
            w = base**p
            for i in range(n):
                x[i] += w * v[i]
        if all(x[i] for i in support):
            return tuple(x)
    raise AssertionError("a generic combination always exists over the rationals")


def kernel_supports_legal(result: VFTensorResult, caps: _caps.Caps | None = None) -> KernelLegality:
    """Check that every integer x with ``x A = 0`` has a legal support.

    Small {-1,0,1}-combinations of a kernel basis are always tested; when
    ``M^q`` is within the support-enumeration cap every realizable support is
    examined as well, which makes the check exact.
    """
    caps = caps or _caps.current()
    m, q, t = result.m, result.q, result.t
    basis = left_kernel_basis(result.A)
    if not basis:
        return KernelLegality(True, None, 0, 0, 0, 0, True)
    checked = 0
    for x in kernel_combinations(basis, caps.kernel_combinations):
        checked += 1
        if any(x) and not is_legal(_support_tuples(x, m, q), t, m):
            return KernelLegality(False, x, len(basis), checked, _combination_terms(len(basis), caps.kernel_combinations), 0, False)
    terms = _combination_terms(len(basis), caps.kernel_combinations)
    mq = m**q
    if mq > caps.support_enumeration:
        return KernelLegality(True, None, len(basis), checked, terms, 0, False)
    scanned = 0
    for support, x in realizable_supports(basis, mq):
        scanned += 1
        if not is_legal({index_tuple(i, m, q) for i in support}, t, m):
            return KernelLegality(False, x, len(basis), checked, terms, scanned, True)
    return KernelLegality(True, None, len(basis), checked, terms, scanned, True)


@dataclass(frozen=True)
class GridReport:
    ok: bool
    vectors: int
    illegal_vectors: int
    witness: tuple[int, ...] | None


def legal_mask_table(m: int, q: int, t: int) -> np.ndarray:
    """``table[mask]`` is True when the tuple set with that row bitmask is legal."""
    mq = m**q
    if mq > 24:
        raise SizeError(f"2^{mq} supports is too many to tabulate")
    tuples = all_tuples(m, q)
    out = np.zeros(1 << mq, dtype=bool)
    for mask in range(1 << mq):
        out[mask] = is_legal([tuples[i] for i in range(mq) if mask >> i & 1], t, m)
    return out


def illegal_grid_check(result: VFTensorResult, bound: int = 2, cap: int | None = None) -> GridReport:
    """Every x in ``[-bound, bound]^(M^q)`` with an illegal support has ``x A != 0``."""
    mq = result.m**result.q
    side = 2 * bound + 1
    if cap is None:
        cap = _caps.current().box_vectors
    if side**mq > cap:
        raise SizeError(f"{side}^{mq} coefficient vectors exceed the cap {cap}")
    legal = legal_mask_table(result.m, result.q, result.t)
    a = result.A.to_int64()
    weights = (1 << np.arange(mq, dtype=np.int64))
    total, illegal = 0, 0
    for xs in _box_chunks(mq, bound, 1 << 18):
        mask = (xs != 0).astype(np.int64) @ weights
        bad = ~legal[mask]
        total += len(xs)
        illegal += int(bad.sum())
        if bad.any():
            prod = xs[bad] @ a
            zero = ~prod.any(axis=1)
            if zero.any():
                w = tuple(int(v) for v in xs[bad][np.argmax(zero)])
                return GridReport(False, total, illegal, w)
    return GridReport(True, total, illegal, None)


def _box_chunks(dim: int, bound: int, chunk: int):
    side = 2 * bound + 1
    total = side**dim
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        cols = []
        for _ in range(dim):
            idx, r = np.divmod(idx, side)
            cols.append(r - bound)
        yield np.stack(cols[::-1], axis=1)


# -- legal expansion ----------------------------------------------------------------------

@dataclass(frozen=True)
class ExpansionReport:
    """Outcome of a legal-expansion check.

    With ``method == "exact"`` the ratio and sets are attained by legal sets.
    With ``method == "bound"`` the legality constraint was dropped to make the
    search tractable; ``ok`` is still a proof, but ``worst_ratio`` and
    ``largest_within`` are only upper bounds and no set is reported.
    """

    ok: bool
    sets_checked: int
    worst_ratio: Fraction            # max of lhs/rhs over nonempty legal sets
    worst_set: tuple[Tup, ...]
    worst_neighborhood: int
    violation: tuple[Tup, ...] | None
    largest_within: tuple[int, ...]   # index s: max |E'| over legal E' with |N(E')| <= s
    method: str = "exact"


def _expansion_setup(p: IntMatrix, q: int):
    m, n = p.shape
    supports = [tuple(j for j, v in enumerate(r) if v) for r in p.rows]
    tuples = all_tuples(m, q)
    hit = [0] * (n**q)
    for i, tup in enumerate(tuples):
        for cell in product(*(supports[e] for e in tup)):
            hit[tuple_index(cell, n)] |= 1 << i
    return tuples, hit


def _line_masks(m: int, q: int) -> list[int]:
    return [sum(1 << tuple_index(t, m) for t in line.members(m)) for line in slice_family(m, q)]


def _peel(fam: np.ndarray, lines: np.ndarray, need: int, chunk: int = 1 << 15) -> np.ndarray:
    if need <= 1 or fam.size == 0:
        return fam
    out = fam.copy()
    for s in range(0, out.size, chunk):
        y = out[s : s + chunk]
        while True:
            cnt = np.bitwise_count(y[:, None] & lines[None, :])
            bad = (cnt > 0) & (cnt < need)
            if not bad.any():
                break
            y &= ~np.bitwise_or.reduce(np.where(bad, lines[None, :], np.uint64(0)), axis=1)
        out[s : s + chunk] = y
    return out


def _intersection_family(start: int, gens, lines: np.ndarray, need: int, cap: int) -> np.ndarray:
    fam = _peel(np.array([start], dtype=np.uint64), lines, need)
    for g in sorted(set(gens)):
        new = _peel(fam & np.uint64(g), lines, need)
        fam = np.unique(np.concatenate([fam, new]))
        if fam.size > cap:
            raise SizeError(f"more than {cap} candidate sets")
    return fam


def candidate_legal_sets(p: IntMatrix, t: int, q: int, cap: int | None = None) -> np.ndarray:
    """Bitmasks of every legal set of the form L*(U(V')).

    ``U(V')`` is the set of tuples whose neighborhood lies inside ``V'`` and
    ``L*`` strips a set to its largest legal subset.  Every legal ``E'`` sits
    inside one of these sets with a neighborhood no larger, so checking them
    decides the expansion inequality for all legal sets.  The family is built
    from the full set by intersecting with ``U([N]^q minus one cell)`` and
    re-stripping, using ``L*(Y & G) == L*(L*(Y) & G)``.
    """
    m, n = p.shape
    _bitmask_guard(m, n, q)
    if cap is None:
        cap = _caps.current().closed_sets
    tuples, hit = _expansion_setup(p, q)
    full = (1 << len(tuples)) - 1
    lines = np.array(_line_masks(m, q), dtype=np.uint64)
    need = -(-m // t)
    return _intersection_family(full, [full & ~h for h in hit], lines, need, cap)


def _bitmask_guard(m: int, n: int, q: int) -> None:
    if m**q > 64 or n**q > 64:
        raise SizeError(f"M^q={m**q}, N^q={n**q}; the bitmask search handles at most 64")


def unconstrained_profile(p: IntMatrix, q: int, cap: int | None = None) -> tuple[int, ...]:
    """``out[s]`` = max ``|E'|`` over all E' (legal or not) with ``|N(E')| <= s``.

    Tuples whose neighborhoods never touch, even through chains, form
    independent components; each component is enumerated on its own and the
    profiles are combined by max-plus convolution.
    """
    m, n = p.shape
    _bitmask_guard(m, n, q)
    if cap is None:
        cap = _caps.current().closed_sets
    tuples, hit = _expansion_setup(p, q)
    cells_of = [[c for c, h in enumerate(hit) if h >> i & 1] for i in range(len(tuples))]
    parent = list(range(len(tuples)))

    def root(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for h in hit:
        members = [i for i in range(len(tuples)) if h >> i & 1]
        for i in members[1:]:
            parent[root(i)] = root(members[0])
    comps: dict[int, int] = {}
    for i in range(len(tuples)):
        comps[root(i)] = comps.get(root(i), 0) | 1 << i
    no_lines = np.zeros(0, dtype=np.uint64)
    total = [0] + [-1] * (n**q)
    for tmask in comps.values():
        cells = sorted({c for i in range(len(tuples)) if tmask >> i & 1 for c in cells_of[i]})
        fam = _intersection_family(tmask, [tmask & ~hit[c] for c in cells], no_lines, 1, cap)
        nbh = neighborhood_sizes(fam, [hit[c] & tmask for c in cells])
        prof = np.full(len(cells) + 1, -1, dtype=np.int64)
        np.maximum.at(prof, nbh, np.bitwise_count(fam).astype(np.int64))
        merged = [-1] * (n**q + 1)
        for s1, v1 in enumerate(total):
            if v1 < 0:
                continue
            for s2, v2 in enumerate(prof):
                if v2 >= 0 and s1 + s2 <= n**q:
                    merged[s1 + s2] = max(merged[s1 + s2], v1 + int(v2))
        total = merged
    return _running_max(total)


def neighborhood_sizes(fam: np.ndarray, hit: Sequence[int], chunk: int = 1 << 20) -> np.ndarray:
    out = np.zeros(fam.size, dtype=np.int64)
    hits = [np.uint64(h) for h in hit if h]
    for s in range(0, fam.size, chunk):
        y = fam[s : s + chunk]
        acc = np.zeros(y.size, dtype=np.int64)
        for h in hits:
            acc += (y & h) != 0
        out[s : s + chunk] = acc
    return out


def _require_expansion_preconditions(p: IntMatrix, t: int, q: int, beta: Fraction, check_case2: bool) -> None:
    _check_zero_one(p)
    m = p.nrows
    if t < 1 or q < 1 or m % t:
        raise ParameterError(f"need positive t dividing M={m}, got t={t}")
    if beta * t >= 1:
        raise ParameterError(f"need 1/t > beta, got beta={beta}, t={t}")
    if check_case2 and not qrdh_case2_holds(from_indicator(p), beta).holds:
        raise ParameterError(f"P is not certified at density level beta={beta}")


def verify_legal_expansion(
    p: IntMatrix,
    t: int,
    q: int,
    beta,
    cap: int | None = None,
    check_case2: bool = True,
    method: str = "auto",
) -> ExpansionReport:
    """Check ``|E'| (1 - beta t)^q <= M^q (|N(E')| / N^q)^d`` for every legal E'.

    ``method="exact"`` enumerates :func:`candidate_legal_sets`; ``"bound"``
    uses :func:`unconstrained_profile`, which ignores legality and can only
    prove the inequality, never refute it.  ``"auto"`` tries the exact
    search and falls back to the bound when the search exceeds ``cap``.
    """
    beta = exact(beta)
    _require_expansion_preconditions(p, t, q, beta, check_case2)
    if method not in ("auto", "exact", "bound"):
        raise ParameterError(f"unknown method {method!r}")
    if method != "bound":
        try:
            return _exact_expansion(p, t, q, beta, cap)
        except SizeError:
            if method == "exact":
                raise
    report = _bound_expansion(p, t, q, beta, cap)
    if not report.ok:
        raise SizeError("the exact search exceeds the cap and the legality-free bound is inconclusive")
    return report


def _rhs(m: int, n: int, q: int, d: int, s: int) -> Fraction:
    return m**q * Fraction(s, n**q) ** d


def _bound_expansion(p: IntMatrix, t: int, q: int, beta: Fraction, cap) -> ExpansionReport:
    m, n = p.shape
    d = sum(p.rows[0])
    prof = unconstrained_profile(p, q, cap)
    shrink = (1 - beta * t) ** q
    worst, worst_s, ok = Fraction(0), 0, True
    for s in range(1, n**q + 1):
        if prof[s] <= 0:
            continue
        ratio = prof[s] * shrink / _rhs(m, n, q, d, s)
        if ratio > worst:
            worst, worst_s = ratio, s
        ok = ok and ratio <= 1
    return ExpansionReport(ok, 0, worst, (), worst_s, None, prof, "bound")


def _exact_expansion(p: IntMatrix, t: int, q: int, beta: Fraction, cap) -> ExpansionReport:
    m, n = p.shape
    d = sum(p.rows[0])
    fam = candidate_legal_sets(p, t, q, cap)
    _, hit = _expansion_setup(p, q)
    sizes = np.bitwise_count(fam).astype(np.int64)
    nbh = neighborhood_sizes(fam, hit)
    best = np.full(n**q + 1, -1, dtype=np.int64)
    np.maximum.at(best, nbh, sizes)
    shrink = (1 - beta * t) ** q
    worst_ratio, worst_s = Fraction(0), 0
    violation_s = None
    for s in range(1, n**q + 1):
        if best[s] <= 0:
            continue
        ratio = int(best[s]) * shrink / _rhs(m, n, q, d, s)
        if ratio > worst_ratio:
            worst_ratio, worst_s = ratio, s
        if ratio > 1 and violation_s is None:
            violation_s = s
    tuples = all_tuples(m, q)

    def members(s: int) -> tuple[Tup, ...]:
        idx = np.nonzero((nbh == s) & (sizes == best[s]))[0][0]
        mask = int(fam[idx])
        return tuple(tuples[i] for i in range(len(tuples)) if mask >> i & 1)

    worst_set = members(worst_s) if worst_s else ()
    violation = members(violation_s) if violation_s is not None else None
    return ExpansionReport(
        violation is None,
        int(fam.size),
        worst_ratio,
        worst_set,
        worst_s,
        violation,
        _running_max(best),
    )


def legal_expansion_bruteforce(p: IntMatrix, t: int, q: int, beta, cap: int = 1 << 16) -> ExpansionReport:
    """Same check by listing every subset of ``[M]^q``; for small cases only."""
    beta = exact(beta)
    _require_expansion_preconditions(p, t, q, beta, check_case2=False)
    m, n = p.shape
    d = sum(p.rows[0])
    tuples = all_tuples(m, q)
    if 1 << len(tuples) > cap:
        raise SizeError(f"2^{len(tuples)} subsets exceed the cap {cap}")
    shrink = (1 - beta * t) ** q
    best = [-1] * (n**q + 1)
    worst_ratio, worst_set, worst_s, violation, count = Fraction(0), (), 0, None, 0
    for mask in range(1 << len(tuples)):
        e = tuple(tuples[i] for i in range(len(tuples)) if mask >> i & 1)
        if not is_legal(e, t, m):
            continue
        count += 1
        s = len(neighborhood(p, e))
        best[s] = max(best[s], len(e))
        if not e:
            continue
        ratio = len(e) * shrink / (m**q * Fraction(s, n**q) ** d)
        if ratio > worst_ratio:
            worst_ratio, worst_set, worst_s = ratio, e, s
        if ratio > 1 and violation is None:
            violation = e
    return ExpansionReport(violation is None, count, worst_ratio, worst_set, worst_s, violation, _running_max(best))


def _running_max(best) -> tuple[int, ...]:
    out, cur = [], 0
    for v in best:
        cur = max(cur, int(v))
        out.append(cur)
    return tuple(out)
