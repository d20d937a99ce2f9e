"""Property suites for every module and the JSON-lines report they produce.

Each property returns ``(ok, witness)``.  A property that would exceed its
enumeration cap is recorded as ``skipped-by-cap`` rather than failing.
"""

from __future__ import annotations

import json
import tempfile
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Callable

import mpmath
import numpy as np

from . import caps as _caps
from .errors import SizeError

PASS, FAIL, SKIP = "pass", "fail", "skipped-by-cap"
FAULTS = ("vandermonde",)


@dataclass(frozen=True)
class PropertyResult:
    suite: str
    property: str
    status: str
    witness: object
    seconds: float

    def to_line(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, default=str)


@dataclass(frozen=True)
class VerifyReport:
    results: tuple[PropertyResult, ...]

    @property
    def ok(self) -> bool:
        return all(r.status != FAIL for r in self.results)

    def counts(self) -> dict[str, int]:
        out = {PASS: 0, FAIL: 0, SKIP: 0}
        for r in self.results:
            out[r.status] += 1
        return out

    def to_text(self) -> str:
        return "".join(r.to_line() + "\n" for r in self.results)

    @classmethod
    def from_text(cls, text: str) -> "VerifyReport":
        return cls(tuple(PropertyResult(**json.loads(line)) for line in text.splitlines() if line.strip()))


class Context:
    def __init__(self, caps: _caps.Caps, faults: frozenset):
        self.caps = caps
        self.faults = faults


Check = Callable[[Context], tuple]


# -- core-algebra -------------------------------------------------------------------------

def corrupted_vandermonde(a: int, b: int):
    """Reduced Vandermonde matrix whose second row is overwritten by the first."""
    from .core.intmatrix import IntMatrix
    from .core.vandermonde import reduced_vandermonde

    v = reduced_vandermonde(a, b)
    rows = list(v.rows)
    rows[1] = rows[0]
    return IntMatrix(tuple(rows))


def _vandermonde_minors(ctx: Context):
    from sympy import primerange

    from .core.vandermonde import minors_nonzero, reduced_vandermonde

    budget = ctx.caps.combinations // 5
    for a in primerange(2, 32):
        for b in range(1, min(5, a)):
            if "vandermonde" in ctx.faults and a - 1 >= 2 and b >= 2:
                mx = corrupted_vandermonde(a, b)
                fault = "row 2 := row 1"
            else:
                mx, fault = reduced_vandermonde(a, b), None
            res = minors_nonzero(mx, a, budget)
            if not res["ok"]:
                rows = res["witness"]
                det = mx.select_rows(rows).det() if rows else None
                return False, {"a": a, "b": b, "fault": fault, "rows": list(rows) if rows else None, "det": det, "method": res["method"]}
    return True, None


def _vandermonde_certificates(ctx: Context):
    from sympy import primerange

    from .core.vandermonde import reduced_vandermonde, residue_certificate

    for a in primerange(2, 102):
        for b in range(1, min(7, a)):
            mx = corrupted_vandermonde(a, b) if "vandermonde" in ctx.faults and a > 2 and b >= 2 else reduced_vandermonde(a, b)
            cert = residue_certificate(mx, a)
            if not cert["valid"]:
                from .core.vandermonde import minors_nonzero

                res = minors_nonzero(mx, a, 0)
                rows = res["witness"]
                return False, {"a": a, "b": b, "certificate": cert, "rows": list(rows) if rows else None,
                               "det": mx.select_rows(rows).det() if rows else None}
    return True, None


def _irreducible_dual_route(ctx: Context):
    from .core.gf2 import is_irreducible, is_irreducible_trial

    for f in range(2, 1 << 11):
        if is_irreducible(f) != is_irreducible_trial(f):
            return False, {"poly": f}
    return True, None


def _field_axioms(ctx: Context):
    from .core.gf2 import build_field

    for lam in (1, 2, 4):
        f = build_field(lam)
        els = list(f.elements())
        for a, b, c in product(els, repeat=3):
            if f.mul(a, f.mul(b, c)) != f.mul(f.mul(a, b), c) or f.mul(a, b ^ c) != f.mul(a, b) ^ f.mul(a, c):
                return False, {"lam": lam, "a": a, "b": b, "c": c}
    for lam in (1, 2, 4, 8):
        f = build_field(lam)
        for a in f.nonzero():
            if f.mul(a, f.inv(a)) != 1:
                return False, {"lam": lam, "a": a}
    return True, None


def _tensor_mixed_product(ctx: Context):
    from .core.intmatrix import IntMatrix, matrix_tensor
    from .rng import SplitMix64

    rng = SplitMix64(7)

    def rand(r, c):
        return IntMatrix(tuple(tuple(rng.below(7) - 3 for _ in range(c)) for _ in range(r)))

    for _ in range(30):
        a, c = rand(2, 3), rand(3, 2)
        b, d = rand(2, 2), rand(2, 3)
        lhs = matrix_tensor(a, b) @ matrix_tensor(c, d)
        rhs = matrix_tensor(a @ c, b @ d)
        if lhs != rhs:
            return False, {"a": a.rows, "b": b.rows, "c": c.rows, "d": d.rows}
    return True, None


def _field_cast_homomorphism(ctx: Context):
    from .core.gf2 import build_field, embed_element

    for small, big in ((1, 2), (2, 4), (4, 8), (2, 8)):
        fs, fb = build_field(small), build_field(big)
        for a, b in product(fs.elements(), repeat=2):
            ea, eb = embed_element(a, fs, fb), embed_element(b, fs, fb)
            if embed_element(fs.mul(a, b), fs, fb) != fb.mul(ea, eb) or embed_element(a ^ b, fs, fb) != ea ^ eb:
                return False, {"from": small, "to": big, "a": a, "b": b}
    return True, None


# -- hypergraph-qrdh -------------------------------------------------------------------------

def _case2_certified_beta(ctx: Context):
    from .hypergraph import certified_beta, contained_edges, gen_random, qrdh_case2_holds

    for seed in range(40):
        h = gen_random(6, 7, 2, seed)
        beta = certified_beta(h, ctx.caps.subset_vertices)
        if not qrdh_case2_holds(h, beta).holds:
            return False, {"seed": seed, "beta": str(beta), "issue": "certified beta fails"}
        if beta > 0 and qrdh_case2_holds(h, beta - Fraction(1, 10**6)).holds:
            return False, {"seed": seed, "beta": str(beta), "issue": "smaller beta also holds"}
        # dual route: direct count over every subset
        worst = max(
            Fraction(contained_edges(h, s), h.n_edges) - Fraction(len(s) ** 2, 36)
            for k in range(7)
            for s in combinations(range(6), k)
        )
        if max(worst, Fraction(0)) != beta:
            return False, {"seed": seed, "beta": str(beta), "direct": str(worst)}
    return True, None


def _planted_certificate(ctx: Context):
    from .hypergraph import contained_edges, gen_planted, planted_edge_target

    for seed in range(40):
        ph = gen_planted(8, 10, 2, 2, Fraction(1, 2), seed)
        need = planted_edge_target(10, 2, 2, Fraction(1, 2))
        if contained_edges(ph.hypergraph, ph.certificate) < need:
            return False, {"seed": seed, "certificate": list(ph.certificate)}
    return True, None


def _hg_roundtrip(ctx: Context):
    from .hypergraph import dumps_hg, gen_random, loads_hg

    for seed in range(20):
        h = gen_random(7, 9, 3, seed)
        if loads_hg(dumps_hg(h)) != h:
            return False, {"seed": seed}
    return True, None


# -- vf-tensor -------------------------------------------------------------------------------

def _q_is_tensor_power(ctx: Context):
    from .core.intmatrix import tensor_power
    from .families import zero_one_matrices
    from .vf import vf_tensor

    for p in zero_one_matrices(2, 2):
        for q in (1, 2):
            if vf_tensor(p, 2, q).Q != tensor_power(p, q):
                return False, {"P": p.rows, "q": q}
    return True, None


def _legality_grid(ctx: Context):
    from .families import zero_one_matrices
    from .vf import illegal_grid_check, vf_tensor

    for m in (1, 2):
        for n in (1, 2):
            for p in zero_one_matrices(m, n):
                for q in (1, 2):
                    for t in sorted({1, m}):
                        rep = illegal_grid_check(vf_tensor(p, t, q), 2, ctx.caps.box_vectors)
                        if not rep.ok:
                            return False, {"P": p.rows, "t": t, "q": q, "x": list(rep.witness)}
    return True, None


def _kernel_supports(ctx: Context):
    from .families import zero_one_matrices
    from .vf import kernel_supports_legal, vf_tensor

    for p in zero_one_matrices(2, 2):
        for t in (1, 2):
            rep = kernel_supports_legal(vf_tensor(p, t, 2), ctx.caps)
            if not rep.ok:
                return False, {"P": p.rows, "t": t, "x": list(rep.witness)}
    return True, None


def _legal_expansion(ctx: Context):
    from .families import small_hypergraphs
    from .hypergraph import certified_beta, indicator_matrix
    from .vf import verify_legal_expansion

    for h in small_hypergraphs(4, 4):
        beta = certified_beta(h)
        p = indicator_matrix(h)
        for t in range(1, h.n_edges + 1):
            if h.n_edges % t or beta * t >= 1:
                continue
            for q in (1, 2):
                rep = verify_legal_expansion(p, t, q, beta, ctx.caps.closed_sets, check_case2=False)
                if not rep.ok:
                    return False, {"edges": [list(e) for e in h.edges], "n": h.n_vertices, "t": t, "q": q,
                                   "beta": str(beta), "set": [list(s) for s in rep.violation]}
    return True, None


# -- lattice-pipeline ------------------------------------------------------------------------

def _identity_block(ctx: Context):
    from .core.intmatrix import left_kernel_basis
    from .hypergraph import gen_planted
    from .lattice import choose_params, instance_from_hypergraph

    for seed in range(10):
        ph = gen_planted(6, 4, 2, 2, 1, seed)
        h = ph.hypergraph
        inst = instance_from_hypergraph(h, choose_params(1, h, 1, 2, 2, 0, t=4, q=2, h=1, w=1))
        for x in left_kernel_basis(inst.C):
            xb = inst.B.left_mul(x)
            if sum(1 for v in xb if v) != sum(1 for v in x if v):
                return False, {"seed": seed, "x": list(x)}
        rng = np.random.default_rng(seed)
        for _ in range(50):
            x = [int(v) for v in rng.integers(-2, 3, inst.C.nrows)]
            if any(inst.C.left_mul(x)) and sum(1 for v in inst.B.left_mul(x) if v) < 2 * inst.params.h:
                return False, {"seed": seed, "x": x}
    return True, None


def _completeness_toy(ctx: Context):
    from .hypergraph import gen_planted
    from .lattice import choose_params, completeness_witness, instance_from_hypergraph, planted_rows

    found, seed = 0, 0
    while found < 5 and seed < 200:
        ph = gen_planted(6, 4, 2, 2, 1, seed)
        seed += 1
        h = ph.hypergraph
        inst = instance_from_hypergraph(h, choose_params(1, h, 1, 2, 2, 0, t=4, q=2, h=1, w=1))
        dense = [i for i, e in enumerate(h.edges) if set(ph.certificate).issuperset(e)]
        rows = planted_rows(dense, 4, 2)
        wit = completeness_witness(inst.C, rows, len(rows), ctx.caps.collision_side)
        if wit is None:
            continue
        found += 1
        x = wit.x
        if any(inst.C.left_mul(x)) or any(v not in (-1, 0, 1) for v in x) or sum(1 for v in inst.B.left_mul(x) if v) > len(rows):
            return False, {"seed": seed - 1, "x": list(x)}
    return found == 5, None if found == 5 else {"found": found}


def _soundness_toy(ctx: Context):
    from .hypergraph import certified_beta, gen_expanding
    from .lattice import instance_from_hypergraph, min_support_lattice, no_short_kernel_vector, toy_soundness_params

    for seed in range(3):
        h = gen_expanding(5, 7, 2, Fraction(1, 4), seed)
        toy = toy_soundness_params(h, certified_beta(h), 1)
        inst = instance_from_hypergraph(h, toy.params)
        ms = min_support_lattice(inst.B, 2, ctx.caps.box_vectors)
        ok, rows = no_short_kernel_vector(inst.C, 2 * toy.params.h, ctx.caps.combinations)
        if ms.value < 2 * toy.params.h or not ok:
            return False, {"seed": seed, "min_support": ms.value, "x": list(ms.witness), "dependent_rows": rows}
    return True, None


def _tensor_l0(ctx: Context):
    from .families import zero_one_classes
    from .lattice import min_support_lattice, tensor_amplify

    equal = strict = 0
    for r, c in ((1, 1), (1, 2), (2, 1), (2, 2)):
        for b in zero_one_classes(r, c):
            one = min_support_lattice(b, 2, ctx.caps.box_vectors).value
            two = min_support_lattice(tensor_amplify(b, 2), 2, ctx.caps.box_vectors).value
            if two > one * one:
                return False, {"B": b.rows, "min": one, "tensor_min": two}
            equal += two == one * one
            strict += two < one * one
    return True, {"equal": equal, "strict": strict}


def _lp_l0_bridge(ctx: Context):
    from .lattice import lp_norm

    rng = np.random.default_rng(3)
    for _ in range(300):
        v = [int(x) for x in rng.integers(-3, 4, 6)]
        l0 = lp_norm(v, 0)
        for p in (1, 2, 3):
            lhs = lp_norm(v, p)
            rhs = l0 ** (1 / p)
            if lhs < rhs - 1e-9:
                return False, {"v": v, "p": p}
            tight = abs(lhs - rhs) < 1e-9
            if tight != all(x in (-1, 0, 1) for x in v):
                return False, {"v": v, "p": p, "tight": tight}
    return True, None


def _numeric_checkers(ctx: Context):
    from .lattice import avg_principle_check, gamma_bound_check

    rep = gamma_bound_check(2**16, 1, 2)
    if rep.lhs != 2**15:
        return False, {"gamma_lhs": str(rep.lhs)}
    rng = np.random.default_rng(9)
    for _ in range(50):
        n, m, nv, q, d, h = (int(v) for v in rng.integers(1, 20, 6))
        alpha, r = Fraction(int(rng.integers(1, 10)), 10), Fraction(int(rng.integers(10, 40)), 10)
        w = int(rng.integers(1, 10**4))
        rep = avg_principle_check(n, m, nv, alpha, r, q, d, h, w)
        with mpmath.workdps(50):
            lvl = mpmath.mpf(alpha.numerator) / alpha.denominator / (mpmath.mpf(r.numerator) / r.denominator) ** (d - 1)
            lhs = 2 * h * mpmath.mpf(d) ** q / (mpmath.mpf(nv) ** q * (lvl**q / n**2) ** (mpmath.mpf(1) / d))
            if (lhs < w) != rep.holds:
                return False, {"params": [n, m, nv, str(alpha), str(r), q, d, h, w]}
    return True, None


# -- code-amplify ----------------------------------------------------------------------------

def _vandcombo(ctx: Context):
    from .codes import vandcombo_check

    rep = vandcombo_check(4, 3)
    return rep.ok, rep.violation


def _toy_codes():
    from .codes import LinearCode
    from .core.gf2 import FieldMatrix, build_field

    f = build_field(4)
    rng = np.random.default_rng(11)
    out = []
    while len(out) < 12:
        m, n = int(rng.integers(1, 3)), int(rng.integers(2, 5))
        rows = [[int(v) for v in rng.integers(0, 16, n)] for _ in range(m)]
        try:
            out.append(LinearCode(FieldMatrix.from_rows(f, rows)))
        except Exception:
            continue
    return out


def _amplify_claims(ctx: Context):
    from .codes import amplify_claims, complete_graph, cycle_graph

    for i, code in enumerate(_toy_codes()):
        n = code.length
        graphs = [complete_graph(n)] + ([cycle_graph(n)] if n >= 3 else [])
        for g in graphs:
            for r in (1, 2, 3):
                rep = amplify_claims(code, g, r, max(r, 3), ctx.caps.messages)
                if not (rep.upper_ok and rep.lower_ok):
                    return False, {"code": code.G.rows, "graph": list(g.offsets), "r": r, **(rep.witness or {})}
    return True, None


def _walk_bound(ctx: Context):
    from .codes import build_regular_graph, max_walk_fraction, valid_degrees, walk_bound

    for n in range(2, 9):
        for d in valid_degrees(n):
            g, rho = build_regular_graph(n, d)
            for r in (1, 2, 3):
                for mask in range(1 << n):
                    s = [v for v in range(n) if mask >> v & 1]
                    frac = max_walk_fraction(g, r, s, ctx.caps.walks)
                    if float(frac) > walk_bound(g, r, len(s)) + 1e-9:
                        return False, {"n": n, "degree": d, "r": r, "S": s, "fraction": str(frac)}
    return True, None


def _code_tensor_distance(ctx: Context):
    from .codes import min_rel_distance, tensor_code

    for code in _toy_codes()[:6]:
        if code.dimension > 1:
            continue
        d = min_rel_distance(code, ctx.caps.messages)
        if min_rel_distance(tensor_code(code, code), ctx.caps.messages) != d * d:
            return False, {"code": code.G.rows}
    return True, None


# -- cli ---------------------------------------------------------------------------------------

def _determinism(ctx: Context):
    import filecmp
    import os

    from .pipeline import planted_toy_config, run_pipeline

    with tempfile.TemporaryDirectory() as tmp:
        a, b = os.path.join(tmp, "a"), os.path.join(tmp, "b")
        run_pipeline(planted_toy_config(a, seed=3))
        run_pipeline(planted_toy_config(b, seed=3))
        diff = []
        for root, _, files in os.walk(a):
            for name in files:
                pa = os.path.join(root, name)
                pb = os.path.join(b, os.path.relpath(pa, a))
                if not os.path.exists(pb) or not filecmp.cmp(pa, pb, shallow=False):
                    diff.append(os.path.relpath(pa, a))
        return not diff, diff or None


SUITES: dict[str, list[tuple[str, Check]]] = {
    "core-algebra": [
        ("vandermonde-minors", _vandermonde_minors),
        ("vandermonde-certificates", _vandermonde_certificates),
        ("irreducible-dual-route", _irreducible_dual_route),
        ("field-axioms", _field_axioms),
        ("tensor-mixed-product", _tensor_mixed_product),
        ("field-cast-homomorphism", _field_cast_homomorphism),
    ],
    "hypergraph-qrdh": [
        ("case2-certified-beta", _case2_certified_beta),
        ("planted-certificate", _planted_certificate),
        ("hg-roundtrip", _hg_roundtrip),
    ],
    "vf-tensor": [
        ("q-is-tensor-power", _q_is_tensor_power),
        ("illegal-grid", _legality_grid),
        ("kernel-supports-legal", _kernel_supports),
        ("legal-expansion", _legal_expansion),
    ],
    "lattice-pipeline": [
        ("identity-block-support", _identity_block),
        ("completeness-toy", _completeness_toy),
        ("soundness-toy", _soundness_toy),
        ("tensor-l0", _tensor_l0),
        ("lp-l0-bridge", _lp_l0_bridge),
        ("numeric-checkers", _numeric_checkers),
    ],
    "code-amplify": [
        ("vandcombo", _vandcombo),
        ("amplify-claims", _amplify_claims),
        ("walk-bound", _walk_bound),
        ("code-tensor-distance", _code_tensor_distance),
    ],
    "cli": [
        ("determinism", _determinism),
    ],
}


def verify(suite: str = "all", caps: _caps.Caps | None = None, faults=()) -> VerifyReport:
    if caps is None:
        caps = _caps.current()
    faults = frozenset(faults)
    unknown = faults - set(FAULTS)
    if unknown:
        from .errors import ParameterError

        raise ParameterError(f"unknown faults {sorted(unknown)}; expected {list(FAULTS)}")
    if suite == "all":
        names = list(SUITES)
    elif suite in SUITES:
        names = [suite]
    else:
        from .errors import ParameterError

        raise ParameterError(f"unknown suite {suite!r}; expected one of {['all', *SUITES]}")
    ctx = Context(caps, faults)
    results = []
    for name in names:
        for prop, check in SUITES[name]:
            start = time.perf_counter()
            try:
                ok, witness = check(ctx)
                status = PASS if ok else FAIL
            except SizeError as exc:
                status, witness = SKIP, {"reason": str(exc)}
            results.append(PropertyResult(name, prop, status, witness, round(time.perf_counter() - start, 3)))
    return VerifyReport(tuple(results))
