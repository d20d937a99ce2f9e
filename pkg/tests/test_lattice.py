import json
import math
from fractions import Fraction
from itertools import product

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from forge.core.intmatrix import IntMatrix, left_kernel_basis
from forge.errors import InfeasibleParametersError, ParameterError, SizeError
from forge.families import zero_one_classes
from forge.hypergraph import Hypergraph, certified_beta, gen_expanding, gen_planted
from forge.lattice import (
    ReductionParams,
    avg_principle_check,
    build_instance,
    build_R,
    build_W,
    choose_params,
    completeness_witness,
    gamma_bound_check,
    implicated_columns,
    instance_from_hypergraph,
    kernel_witness,
    lp_norm,
    min_support_lattice,
    no_short_kernel_vector,
    planted_rows,
    shortest_in_box,
    soundness_claims_check,
    tensor_amplify,
    toy_soundness_params,
)
from forge.vf import EdgeTupleSet

M = IntMatrix.from_rows


def nnz(v):
    return sum(1 for x in v if x)


def planted_instance(seed):
    ph = gen_planted(6, 4, 2, 2, 1, seed)
    h = ph.hypergraph
    inst = instance_from_hypergraph(h, choose_params(1, h, 1, 2, 2, 0, t=4, q=2, h=1, w=1))
    dense = [i for i, e in enumerate(h.edges) if set(ph.certificate).issuperset(e)]
    return inst, planted_rows(dense, 4, 2)


# -- parameters ------------------------------------------------------------------------------

def test_manual_params_examples():
    h9 = Hypergraph.from_edges(4, [(0, 1)] * 9)
    p = choose_params(2, h9, 1, 1, 2, 0, t=3, q=2, h=4, w=2)
    assert (p.t, p.q, p.h, p.w, p.m) == (3, 2, 4, 2, 9)
    with pytest.raises(InfeasibleParametersError) as exc:
        choose_params(2, h9, 1, 1, 2, 0, t=2, q=2, h=4, w=2)
    assert exc.value.bracket == "t | M"
    with pytest.raises(InfeasibleParametersError) as exc:
        choose_params(3, h9, 1, 1, 2, 0, t=3, q=2, h=4, w=2)
    assert exc.value.bracket == "n | h"
    with pytest.raises(ParameterError):
        choose_params(2, h9, 1, 1, 2, 0, t=3, q=2, h=4)


def test_duplication_enters_the_divisibility_check():
    h3 = Hypergraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    with pytest.raises(InfeasibleParametersError):
        choose_params(1, h3, 1, 1, 2, 0, t=2, q=1, h=1, w=1)
    assert choose_params(1, h3, 1, 1, 2, 0, t=2, q=1, h=1, w=1, duplication=2).m == 6


@pytest.mark.parametrize("n", [1, 2])
def test_asymptotic_mode_is_infeasible_at_tiny_n(n):
    h = Hypergraph.from_edges(4, [(0, 1), (2, 3)])
    with pytest.raises(InfeasibleParametersError) as exc:
        choose_params(n, h, 1, 2, 2, 0, mode="asymptotic")
    assert exc.value.bracket == "q"


@pytest.mark.parametrize("n", [3, 4, 16])
def test_asymptotic_brackets_fill_but_averaging_fails_at_desk_scale(n):
    h = Hypergraph.from_edges(4, [(0, 1), (2, 3)])
    p = choose_params(n, h, 1, 2, 2, 0, mode="asymptotic")
    assert p.h % n == 0 and p.m % p.t == 0
    assert p.notes == ("averaging inequality fails at this n",)
    assert not avg_principle_check(n, p.m, 4, 1, 2, p.q, 2, p.h, p.w).holds


def test_asymptotic_mode_rejects_beta_above_one_over_t():
    h = Hypergraph.from_edges(2, [(0, 1)])
    with pytest.raises(InfeasibleParametersError) as exc:
        choose_params(16, h, 1, 1, 2, Fraction(1, 2), mode="asymptotic")
    assert exc.value.bracket == "1/t > beta"


def test_asymptotic_mode_picks_smallest_values():
    h = Hypergraph.from_edges(2, [(0, 1)])
    p = choose_params(16, h, 1, 1, 2, 0, mode="asymptotic")
    # t in [n/lvl, 2n/lvl] with lvl = 1; q in [log n / loglog n, ...] = [2, 4]
    assert p.t == 16 and p.q == 2 and p.h % 16 == 0
    assert p.duplication == 16 * 16 * 16 * 2 and p.m == p.duplication


def test_params_json_roundtrip():
    p = choose_params(1, Hypergraph.from_edges(3, [(0, 1), (1, 2)]), Fraction(1, 2), 2, 2, Fraction(1, 8), t=2, q=1, h=1, w=1)
    assert ReductionParams.from_json(json.loads(json.dumps(p.to_json()))) == p


# -- construction ----------------------------------------------------------------------------

def test_build_R_examples():
    assert build_R(M([[1]]), 1, 3).rows == ((1,),)
    assert build_R(IntMatrix.zeros(2, 3), 2, 5) == IntMatrix.zeros(2, 6)
    assert build_R(IntMatrix.identity(2), 2, 7).rows == ((1, 1, 0, 0), (0, 0, 1, 2))
    with pytest.raises(ParameterError):
        build_R(M([[1]]), 3, 3)


def test_build_W_takes_leading_vandermonde_rows():
    w, prime = build_W(4, 2)
    assert prime == 5 and w.rows == ((1, 1), (1, 2), (1, 3), (1, 4))


def test_instance_widths_small_example():
    h = Hypergraph.from_edges(2, [(0,), (1,)])
    inst = instance_from_hypergraph(h, choose_params(1, h, 1, 1, 1, 0, t=2, q=1, h=1, w=1))
    assert (inst.A.ncols, inst.R.ncols, inst.W.ncols) == (1, 2, 1)
    assert inst.C.ncols == 4 and inst.B.shape == (2, 10)


@pytest.mark.parametrize("seed", range(4))
def test_instance_structure(seed):
    inst, _ = planted_instance(seed)
    p = inst.params
    mq = p.m**p.q
    assert inst.C.ncols == p.q * mq // p.t + inst.params.n_vertices**p.q * p.w + p.h // p.n
    assert inst.B.nrows == mq
    assert inst.B.ncols == 2 * p.h * inst.C.ncols + mq
    width = inst.C.ncols
    for e, row in enumerate(inst.B.rows):
        for k in range(2 * p.h):
            assert row[k * width : (k + 1) * width] == inst.C.rows[e]
        assert row[2 * p.h * width :] == tuple(1 if j == e else 0 for j in range(mq))
    assert p.m**p.q < inst.prime_w < 3 * p.m**p.q


def test_instance_manifest_records_provenance():
    inst, _ = planted_instance(0)
    man = inst.manifest()
    assert man["params"]["t"] == 4 and "prime_w" in man


# -- completeness ---------------------------------------------------------------------------

def test_completeness_examples():
    dup = M([[1, 2], [3, 4], [1, 2]])
    wit = completeness_witness(dup, [0, 2])
    assert wit.x in ((1, 0, -1), (-1, 0, 1))
    zero = M([[0, 0], [5, 1], [0, 0]])
    assert completeness_witness(zero, [0, 2]).x == (1, 0, 0)
    sums = M([[1], [2], [2], [1]])
    wit = completeness_witness(sums, range(4), 4)
    assert any(wit.x) and all(v in (-1, 0, 1) for v in wit.x)
    assert oracles.vec_mat(wit.x, [[1], [2], [2], [1]]) == [0]
    assert completeness_witness(IntMatrix.identity(3), range(3)) is None


def test_completeness_accepts_tuple_sets_and_checks_h_minus():
    c = M([[1], [1], [2], [3]])
    rows = EdgeTupleSet(2, 2, [(0, 0), (0, 1)])
    assert completeness_witness(c, rows).x in ((1, -1, 0, 0), (-1, 1, 0, 0))
    with pytest.raises(ParameterError):
        completeness_witness(c, [0, 1], 3)
    with pytest.raises(SizeError):
        completeness_witness(IntMatrix.identity(30), range(30), cap=100)


@given(st.lists(st.lists(st.integers(-3, 3), min_size=2, max_size=2), min_size=1, max_size=7))
def test_completeness_agrees_with_exhaustive_search(rows):
    wit = completeness_witness(M(rows), range(len(rows)))
    exists = any(any(x) and not any(oracles.vec_mat(x, rows)) for x in product((-1, 0, 1), repeat=len(rows)))
    assert (wit is not None) == exists
    if wit is not None:
        assert not any(oracles.vec_mat(wit.x, rows)) and set(wit.x) <= {-1, 0, 1}


def test_kernel_witness_fallback():
    c = M([[1, 0], [0, 1], [1, 1], [7, 7]])
    wit = kernel_witness(c, [0, 1, 2])
    assert wit is not None and not any(c.left_mul(wit.x)) and wit.x[3] == 0


@pytest.mark.parametrize("seed", range(6))
def test_planted_witness_has_small_lattice_vector(seed):
    inst, rows = planted_instance(seed)
    wit = completeness_witness(inst.C, rows, len(rows))
    c_rows = [list(r) for r in inst.C.rows]
    if wit is None:
        # the search may only give up when no collision exists at all
        for local in product((-1, 0, 1), repeat=len(rows)):
            x = [0] * inst.C.nrows
            for i, v in zip(rows, local):
                x[i] = v
            assert not any(local) or any(oracles.vec_mat(x, c_rows))
        return
    xb = inst.B.left_mul(wit.x)
    assert not any(oracles.vec_mat(wit.x, [list(r) for r in inst.C.rows]))
    assert set(xb) <= {-1, 0, 1}
    assert nnz(xb) == nnz(wit.x) <= len(rows)
    assert all(i in rows for i, v in enumerate(wit.x) if v)


# -- soundness --------------------------------------------------------------------------------

def test_implicated_columns_examples():
    assert implicated_columns((1, 0), IntMatrix.identity(2)) == {0: 1}
    assert implicated_columns((1, 1), M([[1, 1], [1, 0]])) == {0: 2, 1: 1}
    assert implicated_columns((0, 0), M([[1, 1], [1, 0]])) == {}


def test_soundness_verdicts():
    inst, _ = planted_instance(0)
    e1 = tuple(1 if i == 0 else 0 for i in range(inst.C.nrows))
    v = soundness_claims_check(inst, e1)
    assert v.verdict == "W" and v.xW_nonzero and not v.xC_zero
    for x in left_kernel_basis(inst.C):
        assert soundness_claims_check(inst, x).verdict == "xC = 0"
    with pytest.raises(ParameterError):
        soundness_claims_check(inst, (1,))


@given(st.data())
def test_soundness_verdict_matches_direct_product(data):
    inst, _ = planted_instance(data.draw(st.integers(0, 3)))
    x = data.draw(st.lists(st.integers(-2, 2), min_size=inst.C.nrows, max_size=inst.C.nrows))
    v = soundness_claims_check(inst, x)
    xc = oracles.vec_mat(x, [list(r) for r in inst.C.rows])
    assert v.xC_zero == (not any(xc))
    assert (v.verdict == "xC = 0") == v.xC_zero
    if not v.xC_zero:
        assert nnz(inst.B.left_mul(x)) >= 2 * inst.params.h
    else:
        assert nnz(inst.B.left_mul(x)) == nnz(x)


# -- box oracles ------------------------------------------------------------------------------

def test_min_support_examples():
    assert min_support_lattice(IntMatrix.identity(2), 1).value == 1
    ms = min_support_lattice(M([[1, 1], [1, -1]]), 2)
    assert ms.value == 1 and nnz(M([[1, 1], [1, -1]]).left_mul(ms.witness)) == 1
    assert min_support_lattice(M([[2]]), 1).value == 1
    with pytest.raises(SizeError):
        min_support_lattice(IntMatrix.identity(20), 2, cap=1000)


@given(st.lists(st.lists(st.integers(-2, 2), min_size=3, max_size=3), min_size=1, max_size=3), st.integers(1, 2))
def test_min_support_matches_oracle(rows, bound):
    assert min_support_lattice(M(rows), bound).value == oracles.min_support(rows, bound)


@given(st.lists(st.lists(st.integers(-2, 2), min_size=3, max_size=3), min_size=1, max_size=3),
       st.sampled_from([1, 2, 3, 1.5, math.inf]))
def test_shortest_in_box_matches_oracle(rows, p):
    b = M(rows)
    best = None
    for x in product(range(-1, 2), repeat=len(rows)):
        v = oracles.vec_mat(x, rows)
        if any(v):
            n = max(map(abs, v)) if p == math.inf else sum(abs(t) ** p for t in v) ** (1 / p)
            best = n if best is None else min(best, n)
    if best is None:
        with pytest.raises(ParameterError):
            shortest_in_box(b, p, 1)
        return
    res = shortest_in_box(b, p, 1)
    assert abs(float(res.value) - best) < 1e-9
    assert list(res.vector) == oracles.vec_mat(res.witness, rows)


def test_no_short_kernel_vector():
    ok, rows = no_short_kernel_vector(M([[1, 0], [0, 1], [1, 1]]), 4)
    assert not ok and rows == (0, 1, 2)
    assert no_short_kernel_vector(M([[1, 0], [0, 1], [1, 1]]), 3) == (True, None)
    assert no_short_kernel_vector(M([[1, 2], [2, 4]]), 3)[0] is False


def test_lp_norm_examples():
    assert lp_norm((1, -1, 0), 0) == 2
    assert lp_norm((3, 4), 2) == 5
    assert lp_norm((1, 1, 1, 1), 1) == 4
    assert lp_norm((3, -7), math.inf) == 7
    assert abs(lp_norm((1, 1), 2) - math.sqrt(2)) < 1e-12
    with pytest.raises(ParameterError):
        lp_norm((1,), Fraction(1, 2))


@given(st.lists(st.integers(-4, 4), min_size=1, max_size=8), st.sampled_from([1, 2, 3, 4]))
def test_lp_dominates_l0_root(v, p):
    lhs = mpmath.mpf(lp_norm(v, p))
    rhs = mpmath.mpf(lp_norm(v, 0)) ** (mpmath.mpf(1) / p)
    assert lhs >= rhs - mpmath.mpf(10) ** -12
    # equality exactly when every entry is in {-1, 0, 1}: compare p-th powers
    assert (sum(abs(x) ** p for x in v) == lp_norm(v, 0)) == all(abs(x) <= 1 for x in v)


def test_tensor_amplify_examples():
    b = M([[1, 2], [0, 3]])
    assert tensor_amplify(b, 1) == b
    assert tensor_amplify(IntMatrix.identity(2), 2) == IntMatrix.identity(4)
    assert tensor_amplify(M([[1, 1]]), 2).rows == ((1, 1, 1, 1),)


@pytest.mark.parametrize("rows,cols", [(1, 2), (2, 1), (2, 2), (1, 3)])
def test_l0_tensor_submultiplicative(rows, cols):
    for b in zero_one_classes(rows, cols):
        one = min_support_lattice(b, 2)
        two = min_support_lattice(tensor_amplify(b, 2), 2).value
        assert two <= one.value**2
        # the tensor of the witness with itself realises the square
        xx = [u * v for u in one.witness for v in one.witness]
        assert nnz(tensor_amplify(b, 2).left_mul(xx)) == one.value**2


# -- numeric checkers --------------------------------------------------------------------------

def test_gamma_examples():
    rep = gamma_bound_check(2**16, 1, 2)
    assert rep.exact and rep.lhs == 2**15
    assert gamma_bound_check(2**16, 16, 2).lhs == 1
    prev = None
    for p in (1, 2, 3, 4, 8):
        e = gamma_bound_check(2**16, p, 4).exponent
        assert prev is None or e < prev
        prev = e
    with pytest.raises(ParameterError):
        gamma_bound_check(8, 1, 2)
    with pytest.raises(ParameterError):
        gamma_bound_check(2**16, Fraction(1, 2), 2)


def test_gamma_inexact_route_close_to_formula():
    n = 1000
    rep = gamma_bound_check(n, 2, 3)
    with mpmath.workdps(30):
        ll = mpmath.log(mpmath.log(n, 2), 2)
        expected = mpmath.power(n, 1 / ll) / 2 - 1
    assert not rep.exact and abs(rep.exponent - expected) < mpmath.mpf(10) ** -20


def _avg_lhs(n, nv, alpha, r, q, d, h):
    with mpmath.workdps(50):
        lvl = mpmath.mpf(alpha.numerator) / alpha.denominator / (mpmath.mpf(r.numerator) / r.denominator) ** (d - 1)
        return 2 * h * mpmath.mpf(d) ** q / (mpmath.mpf(nv) ** q * (lvl**q / n**2) ** (mpmath.mpf(1) / d))


def test_avg_principle_examples():
    args = (16, 8, 8, Fraction(1, 2), Fraction(2), 2, 2, 4)
    lhs = _avg_lhs(16, 8, Fraction(1, 2), Fraction(2), 2, 2, 4)
    rep = avg_principle_check(*args, 1)
    assert abs(rep.lhs - lhs) < mpmath.mpf(10) ** -40
    assert avg_principle_check(*args, Fraction(rep.lhs_pow_d.numerator, 1) * 2).holds
    assert avg_principle_check(*args, math.ceil(lhs * 2)).holds
    assert not avg_principle_check(*args, math.floor(lhs / 2)).holds
    with pytest.raises(ParameterError):
        avg_principle_check(0, *args[1:], 3)


@given(st.integers(1, 30), st.integers(1, 30), st.integers(1, 5), st.integers(1, 4), st.integers(1, 50),
       st.fractions(Fraction(1, 10), 1, max_denominator=10), st.fractions(1, 4, max_denominator=10),
       st.integers(1, 10**5))
def test_avg_principle_matches_high_precision(n, nv, q, d, h, alpha, r, w):
    rep = avg_principle_check(n, 5, nv, alpha, r, q, d, h, w)
    lhs = _avg_lhs(n, nv, alpha, r, q, d, h)
    if abs(lhs - w) > mpmath.mpf(10) ** -30:
        assert rep.holds == (lhs < w)


# -- toy soundness parameters ---------------------------------------------------------------

@pytest.mark.parametrize("seed", range(3))
def test_toy_soundness_params_satisfy_both_inequalities(seed):
    h = gen_expanding(5, 7, 2, Fraction(1, 4), seed)
    beta = certified_beta(h)
    toy = toy_soundness_params(h, beta, 1)
    p, delta = toy.params, toy.delta
    m, nv, d = h.n_edges, h.n_vertices, h.arity
    assert m % p.t == 0 and p.h % p.n == 0 and beta * p.t < 1
    assert Fraction(p.h, p.n) > m**p.q * delta**d / (1 - beta * p.t) ** p.q
    assert Fraction(2 * p.h * d**p.q) / (nv**p.q * delta) < p.w
    assert 2 * p.h <= m**p.q
    inst = instance_from_hypergraph(h, p)
    assert min_support_lattice(inst.B, 1).value >= 2 * p.h
    assert no_short_kernel_vector(inst.C, 2 * p.h)[0]


def test_build_instance_cap():
    big = IntMatrix.identity(8)
    params = ReductionParams(1, Fraction(1), Fraction(0), Fraction(1), 1, 1, 4, 1, 1, "manual", 1, 8, 8)
    with pytest.raises(SizeError):
        build_instance(big, params)
