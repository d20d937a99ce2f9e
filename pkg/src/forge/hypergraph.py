"""Arity-d hypergraphs, density checks over all vertex subsets, and generators.

Vertices are ``0..N-1``.  Edges are stored as sorted tuples and may repeat.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

import numpy as np

from . import caps as _caps
from .core.intmatrix import IntMatrix
from .errors import FormatError, GenerationError, ParameterError, SizeError
from .numbers import ceil_frac, exact, floor_frac
from .rng import SplitMix64


@dataclass(frozen=True)
class Hypergraph:
    n_vertices: int
    arity: int
    edges: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n_vertices < 1:
            raise ParameterError("a hypergraph needs at least one vertex")
        if self.arity < 1:
            raise ParameterError("arity must be >= 1")
        if not self.edges:
            raise ParameterError("a hypergraph needs at least one edge")
        canon = []
        for e in self.edges:
            s = tuple(sorted(int(v) for v in e))
            if len(s) != self.arity or len(set(s)) != self.arity:
                raise ParameterError(f"edge {e} does not have {self.arity} distinct vertices")
            if s[0] < 0 or s[-1] >= self.n_vertices:
                raise ParameterError(f"edge {e} leaves the vertex range 0..{self.n_vertices - 1}")
            canon.append(s)
        object.__setattr__(self, "edges", tuple(canon))

    @classmethod
    def from_edges(cls, n_vertices: int, edges: Iterable[Iterable[int]], arity: int | None = None) -> "Hypergraph":
        edges = [tuple(e) for e in edges]
        if arity is None:
            arity = len(edges[0]) if edges else 0
        return cls(n_vertices, arity, tuple(edges))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def edge_masks(self) -> list[int]:
        return [sum(1 << v for v in e) for e in self.edges]


def indicator_matrix(h: Hypergraph) -> IntMatrix:
    return IntMatrix(tuple(tuple(1 if v in e else 0 for v in range(h.n_vertices)) for e in h.edges))


def from_indicator(mx: IntMatrix) -> Hypergraph:
    """Inverse of :func:`indicator_matrix` for 0/1 matrices with equal row sums."""
    edges = []
    for row in mx.rows:
        if any(v not in (0, 1) for v in row):
            raise ParameterError("indicator matrices are 0/1")
        edges.append(tuple(j for j, v in enumerate(row) if v))
    sizes = {len(e) for e in edges}
    if len(sizes) != 1:
        raise ParameterError("rows have different numbers of ones")
    return Hypergraph(mx.ncols, sizes.pop(), tuple(edges))


def contained_edges(h: Hypergraph, vsub: Iterable[int]) -> int:
    s = set(vsub)
    return sum(1 for e in h.edges if all(v in s for v in e))


# -- exhaustive subset statistics -------------------------------------------------

def _popcounts(n_bits: int) -> np.ndarray:
    pc = np.zeros(1 << n_bits, dtype=np.int64)
    for i in range(n_bits):
        block = 1 << i
        pc.reshape(-1, 2 * block)[:, block:] += 1
    return pc


def subset_contained_counts(h: Hypergraph, cap: int | None = None) -> np.ndarray:
    """``counts[s]`` = edges inside the vertex set with bitmask ``s``.

    Computed with a subset-sum (zeta) transform over the edge masks.
    """
    n = h.n_vertices
    if cap is None:
        cap = _caps.current().subset_vertices
    if n > cap:
        raise SizeError(f"2^{n} vertex subsets exceed the cap 2^{cap}")
    f = np.zeros(1 << n, dtype=np.int64)
    for m, mult in Counter(h.edge_masks()).items():
        f[m] += mult
    for i in range(n):
        block = 1 << i
        view = f.reshape(-1, 2 * block)
        view[:, block:] += view[:, :block]
    return f


def max_contained_by_size(h: Hypergraph, cap: int | None = None) -> tuple[list[int], list[int]]:
    """Per subset size k: the largest contained-edge count and a mask achieving it."""
    counts = subset_contained_counts(h, cap)
    pc = _popcounts(h.n_vertices)
    best, masks = [], []
    for k in range(h.n_vertices + 1):
        idx = np.nonzero(pc == k)[0]
        j = int(idx[np.argmax(counts[idx])])
        best.append(int(counts[j]))
        masks.append(j)
    return best, masks


def _mask_to_set(mask: int) -> tuple[int, ...]:
    out, v = [], 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return tuple(out)


@dataclass(frozen=True)
class Case2Result:
    holds: bool
    witness: tuple[int, ...] | None     # violating subset when holds is False
    tightest: tuple[int, ...]           # subset with the least slack
    tightest_slack: Fraction            # bound minus count, as a fraction of M
    certified_beta: Fraction            # smallest beta for which the case holds

    def __bool__(self) -> bool:
        return self.holds


def qrdh_case2_holds(h: Hypergraph, beta, cap: int | None = None) -> Case2Result:
    """Whether every vertex subset V' holds at most ``(|V'|/N)^d M + beta M`` edges."""
    beta = exact(beta)
    n, m, d = h.n_vertices, h.n_edges, h.arity
    best, masks = max_contained_by_size(h, cap)
    worst_k, worst_slack = 0, None
    for k, c in enumerate(best):
        slack = Fraction(k**d, n**d) + beta - Fraction(c, m)
        if worst_slack is None or slack < worst_slack:
            worst_k, worst_slack = k, slack
    beta_star = max(Fraction(0), beta - worst_slack)
    tight = _mask_to_set(masks[worst_k])
    holds = worst_slack >= 0
    return Case2Result(holds, None if holds else tight, tight, worst_slack, beta_star)


def certified_beta(h: Hypergraph, cap: int | None = None) -> Fraction:
    """Smallest beta >= 0 for which case 2 holds (exact)."""
    return qrdh_case2_holds(h, 0, cap).certified_beta


def min_touched_vertices(h: Hypergraph, count: int, cap: int | None = None) -> int:
    """Fewest vertices covered by any ``count`` of the edges."""
    m = h.n_edges
    if not 0 <= count <= m:
        raise ParameterError(f"cannot pick {count} of {m} edges")
    if cap is None:
        cap = _caps.current().combinations
    total = comb(m, count)
    if total > cap:
        raise SizeError(f"C({m},{count}) = {total} edge subsets exceed the cap {cap}")
    masks = h.edge_masks()
    best = h.n_vertices
    for chosen in combinations(masks, count):
        u = 0
        for mk in chosen:
            u |= mk
        best = min(best, bin(u).count("1"))
    return best


def duplicate_edges(h: Hypergraph, factor: int) -> Hypergraph:
    """Each edge repeated ``factor`` times in place (copies are adjacent)."""
    if factor < 1:
        raise ParameterError("duplication factor must be >= 1")
    return Hypergraph(h.n_vertices, h.arity, tuple(e for e in h.edges for _ in range(factor)))


# -- generators -------------------------------------------------------------------

@dataclass(frozen=True)
class PlantedHypergraph:
    hypergraph: Hypergraph
    certificate: tuple[int, ...]
    planted_edges: int = field(default=0)


def planted_edge_target(m: int, d: int, r, alpha) -> int:
    """``ceil(alpha * (1/r)^(d-1) * M)``."""
    return ceil_frac(exact(alpha) * (1 / exact(r)) ** (d - 1) * m)


def _random_edge(rng: SplitMix64, pool: Sequence[int], d: int) -> tuple[int, ...]:
    return tuple(sorted(rng.sample(pool, d)))


def gen_planted(n: int, m: int, d: int, r, alpha, seed: int) -> PlantedHypergraph:
    r, alpha = exact(r), exact(alpha)
    if r < 1 or not 0 <= alpha <= 1:
        raise ParameterError("need r >= 1 and 0 <= alpha <= 1")
    if d > n or m < 1:
        raise ParameterError("need 1 <= d <= N and M >= 1")
    size = floor_frac(n / r)
    k = planted_edge_target(m, d, r, alpha)
    if k > m or (k > 0 and size < d):
        raise ParameterError(f"{k} planted edges of arity {d} do not fit inside {size} vertices")
    rng = SplitMix64(seed)
    plant = tuple(sorted(rng.sample(range(n), size)))
    edges = [_random_edge(rng, plant, d) for _ in range(k)]
    edges += [_random_edge(rng, range(n), d) for _ in range(m - k)]
    rng.shuffle(edges)
    return PlantedHypergraph(Hypergraph(n, d, tuple(edges)), plant, k)


def gen_random(n: int, m: int, d: int, seed: int) -> Hypergraph:
    rng = SplitMix64(seed)
    return Hypergraph(n, d, tuple(_random_edge(rng, range(n), d) for _ in range(m)))


def gen_expanding(n: int, m: int, d: int, beta, seed: int, max_tries: int = 1000, cap: int | None = None) -> Hypergraph:
    """First seeded random hypergraph that passes :func:`qrdh_case2_holds`."""
    if d > n or m < 1:
        raise ParameterError("need 1 <= d <= N and M >= 1")
    if cap is None:
        cap = _caps.current().subset_vertices
    if n > cap:
        raise SizeError(f"2^{n} vertex subsets exceed the cap 2^{cap}")
    rng = SplitMix64(seed)
    for _ in range(max_tries):
        h = Hypergraph(n, d, tuple(_random_edge(rng, range(n), d) for _ in range(m)))
        if qrdh_case2_holds(h, beta, cap).holds:
            return h
    raise GenerationError(f"no instance passed the density check in {max_tries} tries")


# -- hg v1 ------------------------------------------------------------------------

def dumps_hg(h: Hypergraph) -> str:
    lines = [f"{h.n_vertices} {h.n_edges} {h.arity}"]
    lines.extend(" ".join(str(v) for v in e) for e in h.edges)
    return "\n".join(lines) + "\n"


def loads_hg(text: str) -> Hypergraph:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    try:
        n, m, d = (int(t) for t in lines[0].split(" "))
        edges = [tuple(int(t) for t in line.split(" ")) for line in lines[1:]]
    except (ValueError, IndexError) as exc:
        raise FormatError(f"bad hg text: {exc}") from None
    if len(edges) != m:
        raise FormatError(f"header promises {m} edges, body has {len(edges)}")
    if any(list(e) != sorted(e) for e in edges):
        raise FormatError("edge vertex ids must be sorted")
    try:
        return Hypergraph(n, d, tuple(edges))
    except ParameterError as exc:
        raise FormatError(str(exc)) from None


def read_hg(path) -> Hypergraph:
    with open(path, encoding="ascii") as fh:
        return loads_hg(fh.read())


def write_hg(path, h: Hypergraph) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(dumps_hg(h))
