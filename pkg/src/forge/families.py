"""Exhaustive families of small hypergraphs and 0/1 matrices, up to symmetry."""

from __future__ import annotations

from itertools import combinations, combinations_with_replacement, permutations, product
from typing import Iterator

import numpy as np

from .core.intmatrix import IntMatrix
from .hypergraph import Hypergraph


def _canonical_codes(counts: np.ndarray, perms: np.ndarray, base: int) -> np.ndarray:
    """Smallest base-``base`` code of each count vector over all permutations."""
    weights = base ** np.arange(counts.shape[1] - 1, -1, -1, dtype=np.int64)
    best = np.full(counts.shape[0], np.iinfo(np.int64).max, dtype=np.int64)
    for perm in perms:
        np.minimum(best, counts[:, perm] @ weights, out=best)
    return best


def hypergraph_classes(n: int, m: int, d: int) -> Iterator[Hypergraph]:
    """One representative per vertex-relabelling class of M-edge multisets.

    Representatives come out in increasing order of their canonical code.
    """
    cands = list(combinations(range(n), d))
    index = {e: i for i, e in enumerate(cands)}
    multisets = list(combinations_with_replacement(range(len(cands)), m))
    counts = np.zeros((len(multisets), len(cands)), dtype=np.int64)
    for row, ms in enumerate(multisets):
        for i in ms:
            counts[row, i] += 1
    edge_perms = np.array(
        [[index[tuple(sorted(pi[v] for v in e))] for e in cands] for pi in permutations(range(n))],
        dtype=np.int64,
    )
    # relabelled counts: new[:, j] = old[:, perm^-1(j)]; iterating all perms covers inverses too
    codes = _canonical_codes(counts, edge_perms, m + 1)
    _, first = np.unique(codes, return_index=True)
    for row in sorted(first, key=lambda r: codes[r]):
        yield Hypergraph(n, d, tuple(cands[i] for i in multisets[row]))


def small_hypergraphs(max_n: int, max_m: int, arities=(1, 2)) -> Iterator[Hypergraph]:
    for n in range(1, max_n + 1):
        for d in arities:
            if d > n:
                continue
            for m in range(1, max_m + 1):
                yield from hypergraph_classes(n, m, d)


def zero_one_matrices(rows: int, cols: int) -> Iterator[IntMatrix]:
    for bits in product((0, 1), repeat=rows * cols):
        yield IntMatrix(tuple(tuple(bits[i * cols : (i + 1) * cols]) for i in range(rows)))


def zero_one_classes(rows: int, cols: int) -> list[IntMatrix]:
    """0/1 matrices up to row and column permutation, nonzero ones only."""
    seen, out = set(), []
    for mx in zero_one_matrices(rows, cols):
        if mx.is_zero():
            continue
        key = min(
            tuple(sorted(tuple(r[j] for j in cp) for r in mx.rows))
            for cp in permutations(range(cols))
        )
        if key not in seen:
            seen.add(key)
            out.append(mx)
    return out
