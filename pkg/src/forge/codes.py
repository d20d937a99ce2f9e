"""Linear codes over GF(2^lam), circulant expanders and walk-based distance amplification."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator

import mpmath
import numpy as np

from . import caps as _caps
from .core.gf2 import BinaryField, FieldMatrix, build_field, field_cast, field_hstack, field_vandermonde
from .errors import ParameterError, SizeError
from .numbers import ceil_frac, exact, floor_frac, to_json_number


@dataclass(frozen=True)
class LinearCode:
    G: FieldMatrix
    history: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.G.rank() != self.G.nrows:
            raise ParameterError("generator rows are linearly dependent")

    @property
    def field(self) -> BinaryField:
        return self.G.field

    @property
    def dimension(self) -> int:
        return self.G.nrows

    @property
    def length(self) -> int:
        return self.G.ncols

    def with_stage(self, g: FieldMatrix, stage: dict) -> "LinearCode":
        return LinearCode(g, self.history + (stage,))


# -- distance ---------------------------------------------------------------------

def _normalized_messages(order: int, m: int) -> Iterator[np.ndarray]:
    """Nonzero messages whose first nonzero entry is 1, in chunks.

    Scalar multiples have equal weight, so these cover every codeword weight.
    """
    for lead in range(m):
        tail = m - lead - 1
        total = order**tail
        chunk = 1 << 16
        for start in range(0, total, chunk):
            idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
            block = np.zeros((idx.size, m), dtype=np.int64)
            block[:, lead] = 1
            for k in range(m - 1, lead, -1):
                idx, block[:, k] = np.divmod(idx, order)
            yield block


def message_count(code: LinearCode) -> int:
    q, m = code.field.order, code.dimension
    return (q**m - 1) // (q - 1)


def _check_messages(code: LinearCode, cap: int | None) -> None:
    if cap is None:
        cap = _caps.current().messages
    total = message_count(code)
    if total > cap:
        raise SizeError(f"{total} messages exceed the cap {cap}")


def codewords(code: LinearCode, messages: np.ndarray) -> np.ndarray:
    g = code.G.to_numpy()
    f = code.field
    out = np.zeros((messages.shape[0], g.shape[1]), dtype=np.int64)
    for i in range(g.shape[0]):
        out ^= f.mul_arr(messages[:, i : i + 1], g[i][None, :])
    return out


def min_rel_distance(code: LinearCode, cap: int | None = None) -> Fraction:
    """Smallest weight of a nonzero codeword over the length, by enumeration."""
    _check_messages(code, cap)
    best = code.length
    for msgs in _normalized_messages(code.field.order, code.dimension):
        w = (codewords(code, msgs) != 0).sum(axis=1)
        best = min(best, int(w.min()))
    return Fraction(best, code.length)


def zero_patterns(code: LinearCode, cap: int | None = None) -> set[tuple[int, ...]]:
    """Distinct sets of zero coordinates over all nonzero codewords."""
    _check_messages(code, cap)
    out: set[tuple[int, ...]] = set()
    for msgs in _normalized_messages(code.field.order, code.dimension):
        zero = codewords(code, msgs) == 0
        for row in np.unique(zero, axis=0):
            out.add(tuple(int(j) for j in np.nonzero(row)[0]))
    return out


# -- regular graphs -----------------------------------------------------------------

@dataclass(frozen=True)
class RegularGraph:
    n: int
    offsets: tuple[int, ...]      # circulant connection multiset, in walk order

    @property
    def degree(self) -> int:
        return len(self.offsets)

    def neighbors(self, v: int) -> list[int]:
        return [(v + s) % self.n for s in self.offsets]

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.int64)
        for v in range(self.n):
            for u in self.neighbors(v):
                a[v, u] += 1
        return a

    def eigenvalues(self) -> list[float]:
        """Circulant spectrum: ``sum_s cos(2 pi j s / n)`` for ``j = 0..n-1``."""
        return [sum(math.cos(2 * math.pi * j * s / self.n) for s in self.offsets) for j in range(self.n)]

    def second_eigenvalue(self) -> float:
        """Largest magnitude among all eigenvalues except the trivial ``j = 0`` one."""
        vals = self.eigenvalues()[1:]
        return max((abs(v) for v in vals), default=0.0)


def build_regular_graph(n: int, degree_hint: int) -> tuple[RegularGraph, float]:
    """Circulant multigraph with offsets ``+-1 .. +-floor(hint/2)``.

    An odd hint adds the offset ``n/2`` (so needs even ``n``).  Returns the
    graph and the magnitude of its second eigenvalue.
    """
    if n < 2:
        raise ParameterError("need at least two vertices")
    if not 1 <= degree_hint <= n:
        raise ParameterError(f"degree hint must lie in 1..{n}, got {degree_hint}")
    if degree_hint % 2 and n % 2:
        raise ParameterError("odd degree on an odd number of vertices is impossible")
    k = degree_hint // 2
    offsets = [s for s in range(1, k + 1)] + [(n - s) % n for s in range(1, k + 1)]
    if degree_hint % 2:
        offsets.append(n // 2)
    g = RegularGraph(n, tuple(offsets))
    return g, g.second_eigenvalue()


def complete_graph(n: int) -> RegularGraph:
    return build_regular_graph(n, n - 1)[0]


def cycle_graph(n: int) -> RegularGraph:
    return build_regular_graph(n, 2)[0]


def valid_degrees(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if not (d % 2 and n % 2)]


def graph_for_delta(n: int, delta) -> tuple[RegularGraph, float, bool]:
    """Smallest-degree circulant with ``rho / degree <= delta``.

    Falls back to the densest one when no degree reaches ``delta``; the flag
    says whether the target was met.
    """
    delta = float(exact(delta))
    if n == 1:
        return RegularGraph(1, (0,)), 0.0, True
    best = None
    for d in valid_degrees(n):
        g, rho = build_regular_graph(n, d)
        if rho / d <= delta + 1e-12:
            return g, rho, True
        best = (g, rho)
    return best[0], best[1], False


def parse_graph_spec(spec: str) -> RegularGraph:
    """``circulant:n,d``, ``complete:n`` or ``cycle:n``."""
    kind, _, args = spec.partition(":")
    try:
        nums = [int(v) for v in args.split(",")] if args else []
    except ValueError:
        raise ParameterError(f"bad graph spec {spec!r}") from None
    if kind == "circulant" and len(nums) == 2:
        return build_regular_graph(*nums)[0]
    if kind == "complete" and len(nums) == 1:
        return complete_graph(nums[0])
    if kind == "cycle" and len(nums) == 1:
        return cycle_graph(nums[0])
    raise ParameterError(f"bad graph spec {spec!r}")


# -- walks ----------------------------------------------------------------------------

def walk_count(g: RegularGraph, r: int) -> int:
    return g.n * g.degree ** (r - 1)


def walks(g: RegularGraph, r: int, cap: int | None = None) -> np.ndarray:
    """All length-r walks (r visited vertices), ordered by start then offset sequence."""
    if r < 1:
        raise ParameterError("walk length must be >= 1")
    if cap is None:
        cap = _caps.current().walks
    total = walk_count(g, r)
    if total > cap:
        raise SizeError(f"{total} walks exceed the cap {cap}")
    offs = np.array(g.offsets, dtype=np.int64)
    out = np.arange(g.n, dtype=np.int64)[:, None]
    for _ in range(r - 1):
        last = out[:, -1:]
        nxt = (last + offs[None, :]) % g.n            # (K, degree)
        out = np.concatenate([np.repeat(out, g.degree, axis=0), nxt.reshape(-1, 1)], axis=1)
    return out


def max_walk_fraction(g: RegularGraph, r: int, subset: Iterable[int], cap: int | None = None) -> Fraction:
    """Fraction of length-r walks staying inside ``subset``, by transfer-matrix counting."""
    if r < 1:
        raise ParameterError("walk length must be >= 1")
    if cap is None:
        cap = _caps.current().walks
    total = walk_count(g, r)
    if total > cap:
        raise SizeError(f"{total} walks exceed the cap {cap}")
    inside = np.zeros(g.n, dtype=object)
    for v in set(subset):
        inside[v] = 1
    a = g.adjacency().astype(object)
    vec = inside.copy()
    for _ in range(r - 1):
        vec = (a @ vec) * inside
    return Fraction(int(vec.sum()), total)


def walk_bound(g: RegularGraph, r: int, size: int) -> float:
    """``(|S|/n + rho/degree)^r``."""
    return (size / g.n + g.second_eigenvalue() / g.degree) ** r


# -- amplification --------------------------------------------------------------------

def amplify(code: LinearCode, g: RegularGraph, r: int, w: int, cap: int | None = None) -> LinearCode:
    """One block ``C V`` per walk, C the walk's columns and V an r x w Vandermonde matrix."""
    f = code.field
    if w < r:
        raise ParameterError(f"need w >= r, got w={w}, r={r}")
    if w >= f.order:
        raise ParameterError(f"w={w} needs a field larger than {f.order}")
    if g.n != code.length:
        raise ParameterError(f"graph has {g.n} vertices, the code has {code.length} columns")
    ws = walks(g, r, cap)
    v = field_vandermonde(r, w, f).to_numpy()            # (r, w)
    gm = code.G.to_numpy()                                # (M, N)
    cols = gm[:, ws]                                      # (M, K, r)
    blocks = np.zeros((gm.shape[0], ws.shape[0], w), dtype=np.int64)
    for i in range(r):
        blocks ^= f.mul_arr(cols[:, :, i : i + 1], v[i][None, None, :])
    out = blocks.reshape(gm.shape[0], -1)
    stage = {"stage": "amplify", "graph": {"n": g.n, "offsets": list(g.offsets)}, "r": r, "w": w, "walks": int(ws.shape[0])}
    return code.with_stage(FieldMatrix(f, tuple(tuple(int(x) for x in row) for row in out)), stage)


@dataclass(frozen=True)
class AmplifyClaims:
    distance: Fraction
    amplified: Fraction
    walk_fraction: Fraction       # max over zero patterns of the in-set walk fraction
    upper_ok: bool                # amplified <= r * distance
    lower_ok: bool                # amplified >= 1 - (walk_fraction + r / w)
    witness: dict | None = None


def amplify_claims(code: LinearCode, g: RegularGraph, r: int, w: int, cap: int | None = None) -> AmplifyClaims:
    """Measure both distances and compare them with the two amplification bounds."""
    out = amplify(code, g, r, w, cap)
    d0 = min_rel_distance(code, cap)
    d1 = min_rel_distance(out, cap)
    fmax, worst = Fraction(0), None
    for zeros in zero_patterns(code, cap):
        frac = max_walk_fraction(g, r, zeros, cap)
        if frac >= fmax:
            fmax, worst = frac, zeros
    upper = d1 <= r * d0
    lower = d1 >= 1 - (fmax + Fraction(r, w))
    witness = None
    if not (upper and lower):
        witness = {"distance": str(d0), "amplified": str(d1), "walk_fraction": str(fmax), "zero_set": list(worst or ())}
    return AmplifyClaims(d0, d1, fmax, upper, lower, witness)


def tensor_code(a: LinearCode, b: LinearCode) -> LinearCode:
    return a.with_stage(a.G.tensor(b.G), {"stage": "tensor", "shape": [a.dimension * b.dimension, a.length * b.length]})


def tensor_power_code(code: LinearCode, k: int) -> LinearCode:
    if k < 1:
        raise ParameterError("tensor power needs k >= 1")
    out = code
    for _ in range(k - 1):
        out = LinearCode(out.G.tensor(code.G), out.history)
    if k > 1:
        out = out.with_stage(out.G, {"stage": "tensor_power", "k": k})
    return out


# -- boosting pipeline ------------------------------------------------------------------

@dataclass(frozen=True)
class ConstantsPlan:
    q: int
    q_prime: int
    w: int
    r: int
    delta: Fraction
    needed_field: int             # the field must be larger than this


def _rate_term(beta: Fraction, base_beta: Fraction, q: int) -> mpmath.mpf:
    """``2 log2(2/(1-beta)) / base_beta^q``."""
    with mpmath.workdps(60):
        two_over = mpmath.mpf(2) / (1 - mpmath.mpf(beta.numerator) / beta.denominator)
        return 2 * mpmath.log(two_over, 2) / mpmath.power(mpmath.mpf(base_beta.numerator) / base_beta.denominator, q)


def plan_constants(alpha, beta, base_alpha, base_beta, q: int | None = None, q_prime: int | None = None, q_limit: int = 64) -> ConstantsPlan:
    """Solve the tensor exponent q and walk length q' from their brackets.

    q is the least positive integer with
    ``ceil(2 log2(2/(1-beta)) / base_beta^q) <= floor(alpha / base_alpha^q)``,
    then q' the least integer between those two quantities.  Either may be
    fixed by the caller instead, which skips the bracket.
    """
    alpha, beta, base_alpha, base_beta = (exact(v) for v in (alpha, beta, base_alpha, base_beta))
    if not 0 < alpha < beta < 1:
        raise ParameterError("need 0 < alpha < beta < 1")
    if not 0 < base_alpha <= base_beta <= 1:
        raise ParameterError("need 0 < base alpha <= base beta <= 1")
    if q is None:
        for cand in range(1, q_limit + 1):
            lo = int(mpmath.ceil(_rate_term(beta, base_beta, cand)))
            hi = floor_frac(alpha / base_alpha**cand)
            if lo <= hi:
                q = cand
                break
        else:
            raise ParameterError(f"no tensor exponent q <= {q_limit} satisfies the bracket")
    if q_prime is None:
        lo = int(mpmath.ceil(_rate_term(beta, base_beta, q)))
        hi = floor_frac(alpha / base_alpha**q)
        if lo > hi:
            raise ParameterError(f"walk-length bracket [{lo}, {hi}] is empty at q={q}")
        q_prime = max(lo, 1)
    if q < 1 or q_prime < 1:
        raise ParameterError("q and q' must be positive")
    w = q_prime * ceil_frac(2 / (1 - beta))
    return ConstantsPlan(q, q_prime, w, q_prime, base_beta**q / 2, w)


def gap_to_constants(
    code: LinearCode,
    alpha,
    beta,
    base_alpha=None,
    base_beta=None,
    *,
    q: int | None = None,
    q_prime: int | None = None,
    degree: int | None = None,
    cap: int | None = None,
) -> LinearCode:
    """Tensor the code q times, then amplify with ``r = q'`` and ``w = q' ceil(2/(1-beta))``.

    ``base_alpha``/``base_beta`` are the completeness and soundness distances of
    the input family; they default to the measured distance of ``code``.
    """
    if base_alpha is None or base_beta is None:
        measured = min_rel_distance(code, cap)
        base_alpha = measured if base_alpha is None else base_alpha
        base_beta = measured if base_beta is None else base_beta
    plan = plan_constants(alpha, beta, base_alpha, base_beta, q, q_prime)
    if code.field.order <= plan.needed_field:
        raise ParameterError(f"field of size {code.field.order} is not larger than w={plan.w}")
    tensored = tensor_power_code(code, plan.q)
    n = tensored.length
    if degree is None:
        g, rho, met = graph_for_delta(n, plan.delta)
    else:
        g, rho = build_regular_graph(n, degree)
        met = rho / g.degree <= float(plan.delta)
    out = amplify(tensored, g, plan.r, plan.w, cap)
    stage = {
        "stage": "gap_to_constants",
        "q": plan.q,
        "q_prime": plan.q_prime,
        "w": plan.w,
        "r": plan.r,
        "delta": to_json_number(plan.delta),
        "degree": g.degree,
        "rho": rho,
        "delta_met": met,
    }
    return out.with_stage(out.G, stage)


def recursive_sparsify(
    code: LinearCode,
    levels: int,
    q: int,
    delta,
    r: int | None = None,
    w: int | None = None,
    *,
    beta=None,
    degree: int | None = None,
    verify: bool = False,
    cap: int | None = None,
) -> LinearCode:
    """``G(l) = amplify(G(l-1) x G)`` for ``l = 2..levels``.

    ``r`` defaults to ``q`` and ``w`` to ``q ceil(2/(1-beta))``.  With
    ``verify`` each stage records its measured distance when enumeration fits
    under the cap.
    """
    if levels < 1:
        raise ParameterError("need at least one level")
    r = q if r is None else r
    if w is None:
        if beta is None:
            raise ParameterError("give w or beta")
        w = q * ceil_frac(2 / (1 - exact(beta)))
    current = code
    for level in range(2, levels + 1):
        try:
            a = LinearCode(current.G.tensor(code.G), current.history)
            n = a.length
            g = build_regular_graph(n, degree)[0] if degree is not None else graph_for_delta(n, delta)[0]
            current = amplify(a, g, r, w, cap)
        except SizeError as exc:
            raise SizeError(str(exc), stage=f"level {level}") from None
        stage = {"stage": "sparsify", "level": level, "r": r, "w": w, "degree": g.degree, "length": current.length}
        if verify:
            try:
                stage["distance"] = to_json_number(min_rel_distance(current, cap))
            except SizeError:
                stage["distance"] = None
        current = current.with_stage(current.G, stage)
    return current


def cast_exponent(width: int, lam: int) -> int:
    """The unique x >= 0 with ``width <= 2^(2^x lam) < width^2``."""
    if width < 2**lam:
        raise ParameterError(f"width {width} is below 2^{lam}")
    x = 0
    while 2 ** (2**x * lam) < width:
        x += 1
    # the exponents double, so the first one reaching log2(width) stays below 2 log2(width)
    return x


def final_boost(code: LinearCode, r: int, w: int, delta, *, degree: int | None = None, cap: int | None = None) -> LinearCode:
    """Amplify once, pad with whole copies up to ``2^lam`` columns, then cast the field."""
    n = code.length
    g = build_regular_graph(n, degree)[0] if degree is not None else graph_for_delta(n, delta)[0]
    amp = amplify(code, g, r, w, cap)
    lam = amp.field.lam
    copies = max(1, -(-(2**lam) // amp.length))
    padded = field_hstack([amp.G] * copies) if copies > 1 else amp.G
    x = cast_exponent(padded.ncols, lam)
    target = build_field(2**x * lam) if x else amp.field
    cast = field_cast(padded, target) if x else padded
    stage = {"stage": "final_boost", "copies": copies, "cast_exponent": x, "lam": target.lam, "length": cast.ncols}
    return LinearCode(cast, amp.history + (stage,))


# -- Vandermonde combinations --------------------------------------------------------------

@dataclass(frozen=True)
class VandComboReport:
    ok: bool
    checked: int
    violation: dict | None


def vandcombo_check(max_lam: int = 4, max_rows: int = 3) -> VandComboReport:
    """Every nonzero ``u`` in F^a times an a x b Vandermonde matrix has at most a zeros.

    Sweeps ``lam`` over the powers of two up to ``max_lam``, ``a <= max_rows``
    and every ``b < 2^lam``.  Since ``x C`` ranges over all of F^a as C and x
    vary, enumerating ``u`` directly covers every pair.
    """
    checked = 0
    lam = 1
    while lam <= max_lam:
        f = build_field(lam)
        for a in range(1, min(max_rows, f.order - 1) + 1):
            us = np.array(list(product(range(f.order), repeat=a))[1:], dtype=np.int64)
            for b in range(1, f.order):
                v = field_vandermonde(a, b, f).to_numpy()
                vals = np.zeros((us.shape[0], b), dtype=np.int64)
                for i in range(a):
                    vals ^= f.mul_arr(us[:, i : i + 1], v[i][None, :])
                zeros = (vals == 0).sum(axis=1)
                checked += us.shape[0]
                bad = np.nonzero(zeros > a)[0]
                if bad.size:
                    u = [int(t) for t in us[bad[0]]]
                    return VandComboReport(False, checked, {"lam": lam, "a": a, "b": b, "u": u, "zeros": int(zeros[bad[0]])})
        lam *= 2
    return VandComboReport(True, checked, None)
