from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from forge import caps as _caps
from forge.core.intmatrix import IntMatrix, left_kernel_basis, tensor_power
from forge.core.vandermonde import reduced_vandermonde
from forge.errors import ParameterError, SizeError
from forge.families import small_hypergraphs, zero_one_matrices
from forge.hypergraph import Hypergraph, certified_beta, indicator_matrix
from forge.vf import (
    EdgeTupleSet,
    VFTensorResult,
    all_tuples,
    illegal_grid_check,
    index_tuple,
    is_legal,
    kernel_combinations,
    kernel_supports_legal,
    legal_expansion_bruteforce,
    maximal_legal_subset,
    neighborhood,
    slice_family,
    slice_set,
    tuple_index,
    verify_legal_expansion,
    vf_tensor,
)

I2 = IntMatrix.identity(2)
TRI = indicator_matrix(Hypergraph.from_edges(3, [(0, 1), (1, 2), (0, 2)]))


def tuple_sets(m, q):
    return st.sets(st.tuples(*[st.integers(0, m - 1)] * q))


def test_vf_tensor_dimensions():
    p = IntMatrix.from_rows([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    res = vf_tensor(p, 3, 2)
    assert res.A.shape == (9, 6) and res.Q.shape == (9, 9)
    assert len(res.slice_family) == 2 * 3
    one = vf_tensor(p, 1, 1)
    assert len(one.slice_family) == 1 and one.A.shape == (3, 3) and one.Q == p
    small = vf_tensor(I2, 2, 2)
    assert small.A.shape == (4, 4) and len(small.slice_family) == 4 and small.block_width == 1


def test_vf_tensor_rejects_bad_parameters():
    with pytest.raises(ParameterError):
        vf_tensor(TRI, 2, 1)
    with pytest.raises(ParameterError):
        vf_tensor(IntMatrix.from_rows([[2, 0]]), 1, 1)
    with pytest.raises(SizeError):
        vf_tensor(IntMatrix.identity(6), 1, 4, cap=10**4)


@pytest.mark.parametrize("m,n,t,q", [(2, 2, 1, 2), (2, 3, 2, 2), (3, 2, 3, 2), (3, 3, 1, 1), (4, 2, 2, 2)])
def test_vf_tensor_structure(m, n, t, q):
    for seed, p in enumerate(zero_one_matrices(m, n)):
        if seed % 7:
            continue
        res = vf_tensor(p, t, q)
        assert res.Q == tensor_power(p, q)
        assert m**q < res.prime_a < 3 * m**q or (m**q == 1 and res.prime_a == 2)
        v = reduced_vandermonde(res.prime_a, m // t)
        for k, line in enumerate(res.slice_family):
            block = res.block(k)
            on_line = {tuple_index(tup, m) for tup in line.members(m)}
            # global row indexing: tuple i always takes Vandermonde row i, so rows on a line are distinct rows of V
            for i, row in enumerate(block.rows):
                if i in on_line:
                    assert row == v.rows[i]
                else:
                    assert not any(row)


def test_tuple_indexing_is_lexicographic():
    for m, q in ((2, 3), (3, 2), (4, 1)):
        tuples = all_tuples(m, q)
        assert tuples == sorted(tuples)
        for i, tup in enumerate(tuples):
            assert tuple_index(tup, m) == i and index_tuple(i, m, q) == tup


def test_slice_family_size():
    for m, q in ((2, 1), (2, 2), (3, 2), (2, 3)):
        fam = slice_family(m, q)
        assert len(fam) == q * m ** (q - 1)
        for line in fam:
            assert len(line.members(m)) == m


def test_is_legal_examples():
    assert is_legal([], 2, 4)
    assert is_legal(all_tuples(3, 2), 1, 3)
    assert not is_legal([(1,)], 2, 4)
    assert is_legal([(0,), (1,)], 2, 4)


@pytest.mark.parametrize("m,q,t", [(2, 2, 1), (2, 2, 2), (3, 2, 1), (3, 2, 3), (4, 1, 2), (2, 3, 1)])
def test_is_legal_matches_definition(m, q, t):
    tuples = all_tuples(m, q)
    for mask in range(1 << len(tuples)):
        members = [tuples[i] for i in range(len(tuples)) if mask >> i & 1]
        assert is_legal(members, t, m) == oracles.legal(members, t, m, q)


@given(tuple_sets(3, 2), st.sampled_from([1, 3]))
def test_maximal_legal_subset(members, t):
    best = maximal_legal_subset(members, t, 3)
    assert best <= members and is_legal(best, t, 3)
    # nothing legal is left out: adding any legal subset keeps it maximal
    tuples = sorted(members)
    for mask in range(1 << len(tuples)):
        sub = {tuples[i] for i in range(len(tuples)) if mask >> i & 1}
        if is_legal(sub, t, 3):
            assert sub <= best


def test_edge_tuple_set_validation():
    s = EdgeTupleSet(2, 3, [(0, 1), (2, 2)])
    assert len(s) == 2 and (0, 1) in s
    with pytest.raises(ParameterError):
        EdgeTupleSet(2, 3, [(0, 3)])
    with pytest.raises(ParameterError):
        EdgeTupleSet(2, 3, [(0,)])


def test_neighborhood_examples():
    assert neighborhood(TRI, [0]) == {(0,), (1,)}
    assert neighborhood(I2, [(0, 1)]) == {(0, 1)}
    assert neighborhood(TRI, [(0, 0)]) == {(0, 0), (0, 1), (1, 0), (1, 1)}


@given(tuple_sets(3, 2))
def test_neighborhood_matches_oracle(members):
    got = neighborhood(TRI, members)
    assert got == oracles.neighborhood(TRI.rows, members)
    for tup in members:
        assert len(neighborhood(TRI, [tup])) == 2**2


def test_slice_examples():
    e1, e2 = {0, 2}, {1, 3}
    prod = set(product(e1, e2))
    assert slice_set(prod, "Y", [0]) == {(1,), (3,)}
    assert slice_set(set(), "Z", [0]) == set()
    assert slice_set({(0, 0), (1, 0), (1, 1)}, "X", [0]) == {0, 1}
    assert slice_set({(0, 0, 1), (0, 1, 1), (2, 1, 1)}, "W", [0]) == {(0, 1), (1, 1)}
    with pytest.raises(ParameterError):
        slice_set(prod, "Q", [0])


@pytest.mark.parametrize("m,t", [(2, 1), (2, 2), (3, 1), (3, 3)])
def test_slices_of_legal_sets_are_legal(m, t):
    q = 2
    tuples = all_tuples(m, q)
    for mask in range(1 << len(tuples)):
        members = {tuples[i] for i in range(len(tuples)) if mask >> i & 1}
        if not is_legal(members, t, m):
            continue
        for e1 in range(m):
            assert oracles.legal(slice_set(members, "Y", [e1]), t, m, q - 1)
        for rest in range(m):
            assert oracles.legal({(v,) for v in slice_set(members, "Z", [rest])}, t, m, 1)


def test_kernel_supports_legal_examples():
    full_rank = vf_tensor(I2, 1, 1)
    assert left_kernel_basis(full_rank.A) == []
    rep = kernel_supports_legal(full_rank)
    assert rep.ok and rep.exact and rep.kernel_dimension == 0
    # a zero gadget lets any support through, including illegal ones
    res = vf_tensor(IntMatrix.from_rows([[1, 0], [0, 1], [1, 1]]), 1, 1)
    broken = VFTensorResult(IntMatrix.zeros(3, 1), res.Q, 1, 1, res.prime_a, res.slice_family, 3, 2)
    rep = kernel_supports_legal(broken)
    assert not rep.ok and not is_legal({index_tuple(i, 3, 1) for i, v in enumerate(rep.witness) if v}, 1, 3)
    assert not any(broken.A.left_mul(rep.witness))


@pytest.mark.parametrize("m,t,q", [(2, 1, 2), (2, 2, 2), (3, 1, 2), (3, 3, 2), (4, 2, 1), (2, 2, 3)])
def test_kernel_supports_are_legal(m, t, q):
    res = vf_tensor(IntMatrix.identity(m), t, q)
    rep = kernel_supports_legal(res, _caps.with_overrides(_caps.current(), support_enumeration=9))
    assert rep.ok and rep.exact == (m**q <= 9)
    for x in kernel_combinations(left_kernel_basis(res.A), 3**6):
        assert not any(res.A.left_mul(x))


@pytest.mark.parametrize("m,t,q", [(1, 1, 1), (2, 1, 1), (2, 2, 1), (2, 1, 2), (2, 2, 2), (3, 3, 1)])
def test_illegal_grid_against_direct_products(m, t, q):
    res = vf_tensor(IntMatrix.identity(m), t, q)
    rep = illegal_grid_check(res, 2)
    assert rep.ok and rep.vectors == 5 ** (m**q)
    illegal = 0
    for x in product(range(-2, 3), repeat=m**q):
        support = {index_tuple(i, m, q) for i, v in enumerate(x) if v}
        if not oracles.legal(support, t, m, q):
            illegal += 1
            assert any(oracles.vec_mat(x, [list(r) for r in res.A.rows]))
    assert illegal == rep.illegal_vectors


def test_illegal_grid_reports_witness_on_a_broken_gadget():
    res = vf_tensor(I2, 1, 1)
    broken = VFTensorResult(IntMatrix.zeros(2, 1), res.Q, 1, 1, res.prime_a, res.slice_family, 2, 2)
    rep = illegal_grid_check(broken, 1)
    assert not rep.ok and not is_legal({index_tuple(i, 2, 1) for i, v in enumerate(rep.witness) if v}, 1, 2)


def test_legal_expansion_examples():
    rep = verify_legal_expansion(I2, 2, 1, 0)
    # E' = {0}: 1 * 1 <= 2 * (1/2), tight
    assert rep.ok and rep.worst_ratio == 1
    assert rep.largest_within[0] == 0
    assert verify_legal_expansion(I2, 2, 2, 0).ok
    assert legal_expansion_bruteforce(I2, 2, 2, 0).ok


def test_legal_expansion_preconditions():
    with pytest.raises(ParameterError):
        verify_legal_expansion(I2, 2, 1, Fraction(1, 2))
    with pytest.raises(ParameterError):
        verify_legal_expansion(TRI, 2, 1, 0)
    dup = indicator_matrix(Hypergraph.from_edges(3, [(0, 1)] * 3))
    with pytest.raises(ParameterError):
        verify_legal_expansion(dup, 1, 1, 0)


def test_legal_expansion_routes_agree():
    checked = 0
    for h in small_hypergraphs(4, 4):
        beta = certified_beta(h)
        p = indicator_matrix(h)
        for t in range(1, h.n_edges + 1):
            if h.n_edges % t or beta * t >= 1:
                continue
            for q in (1, 2):
                if h.n_edges**q > 9:
                    continue
                fast = verify_legal_expansion(p, t, q, beta, check_case2=False, method="exact")
                slow = legal_expansion_bruteforce(p, t, q, beta, cap=1 << 9)
                assert fast.ok == slow.ok
                assert fast.worst_ratio == slow.worst_ratio
                assert fast.largest_within == slow.largest_within
                checked += 1
    assert checked > 50


def test_bound_method_only_proves():
    p = IntMatrix.identity(3)
    exact = verify_legal_expansion(p, 1, 2, 0, method="exact")
    bound = verify_legal_expansion(p, 1, 2, 0, method="bound")
    assert exact.ok and bound.ok and bound.method == "bound"
    assert bound.worst_ratio >= exact.worst_ratio
    # dropping legality makes the dense-pair instance inconclusive rather than wrong
    pair = indicator_matrix(Hypergraph.from_edges(4, [(0, 1), (2, 3)]))
    beta = certified_beta(Hypergraph.from_edges(4, [(0, 1), (2, 3)]))
    assert verify_legal_expansion(pair, 1, 2, beta, method="exact").ok
    with pytest.raises(SizeError):
        verify_legal_expansion(pair, 1, 2, beta, method="bound")


def test_kernel_vectors_expand_on_a_delta_grid():
    # supports of kernel vectors of A that are large must have large neighborhoods
    cases = 0
    for h in small_hypergraphs(3, 4):
        beta = certified_beta(h)
        p = indicator_matrix(h)
        m, n, d = h.n_edges, h.n_vertices, h.arity
        for t in range(1, m + 1):
            if m % t or beta * t >= 1:
                continue
            for q in (1, 2):
                if m**q > 9:
                    continue
                res = vf_tensor(p, t, q)
                basis = left_kernel_basis(res.A)
                for x in kernel_combinations(basis, 200):
                    support = {index_tuple(i, m, q) for i, v in enumerate(x) if v}
                    nb = len(neighborhood(p, support))
                    for k in range(11):
                        delta = Fraction(k, 10)
                        if len(support) > m**q * delta**d / (1 - beta * t) ** q:
                            assert nb > n**q * delta
                            cases += 1
    assert cases > 100
