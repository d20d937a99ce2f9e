"""``forge`` command line: one subcommand group per module plus ``verify`` and ``run``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import caps as _caps
from .errors import ForgeError
from .numbers import exact, to_json_number

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _print_json(data) -> None:
    print(json.dumps(data, indent=2, sort_keys=True, default=str))


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")


# -- hg -------------------------------------------------------------------------------------

def _cap_overrides(args) -> _caps.Caps:
    caps = _caps.current()
    return _caps.with_overrides(caps, subset_vertices=args.cap) if getattr(args, "cap", None) else caps


def _gen(kind: str):
    def run(args) -> int:
        from .hypergraph import gen_expanding, gen_planted, gen_random, write_hg

        out: dict = {"kind": kind, "seed": args.seed}
        if kind == "planted":
            ph = gen_planted(args.n, args.m, args.d, exact(args.r), exact(args.alpha), args.seed)
            h = ph.hypergraph
            out.update(certificate=list(ph.certificate), planted_edges=ph.planted_edges)
        elif kind == "expanding":
            caps = _cap_overrides(args)
            h = gen_expanding(args.n, args.m, args.d, exact(args.beta), args.seed, args.max_tries, caps.subset_vertices)
        else:
            h = gen_random(args.n, args.m, args.d, args.seed)
        write_hg(args.out, h)
        if args.cert:
            _write_json(Path(args.cert), out)
        _print_json(out)
        return EXIT_OK

    return run


def cmd_hg_check(args) -> int:
    from .hypergraph import qrdh_case2_holds, read_hg

    res = qrdh_case2_holds(read_hg(args.hg), exact(args.beta), _cap_overrides(args).subset_vertices)
    _print_json({
        "holds": res.holds,
        "witness": list(res.witness) if res.witness else None,
        "tightest": list(res.tightest),
        "tightest_slack": to_json_number(res.tightest_slack),
        "certified_beta": to_json_number(res.certified_beta),
    })
    return EXIT_OK if res.holds else EXIT_FAIL


def cmd_hg_min_touch(args) -> int:
    from .hypergraph import min_touched_vertices, read_hg

    caps = _caps.current()
    cap = args.cap if args.cap else caps.combinations
    _print_json({"edges": args.h, "min_touched": min_touched_vertices(read_hg(args.hg), args.h, cap)})
    return EXIT_OK


# -- vf ---------------------------------------------------------------------------------------

def _load_matrix(path):
    from .core.intmatrix import read_latmat
    from .hypergraph import indicator_matrix, read_hg

    return indicator_matrix(read_hg(path)) if str(path).endswith(".hg") else read_latmat(path)


def cmd_vf_build(args) -> int:
    from .core.intmatrix import write_latmat
    from .vf import vf_tensor

    res = vf_tensor(_load_matrix(args.input), args.t, args.q)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        paths = (out / "A.latmat", out / "Q.latmat", out / "manifest.json")
    else:
        if not (args.out_a and args.out_q):
            print("error: give --out DIR or both --out-a and --out-q", file=sys.stderr)
            return EXIT_USAGE
        paths = (Path(args.out_a), Path(args.out_q), Path(args.manifest) if args.manifest else None)
    write_latmat(paths[0], res.A)
    write_latmat(paths[1], res.Q)
    if paths[2] is not None:
        _write_json(paths[2], res.manifest())
    _print_json(res.manifest())
    return EXIT_OK


def cmd_vf_legal(args) -> int:
    from .vf import illegal_grid_check, kernel_supports_legal, vf_tensor

    res = vf_tensor(_load_matrix(args.input), args.t, args.q)
    kern = kernel_supports_legal(res)
    grid = illegal_grid_check(res, args.bound)
    _print_json({"kernel": kern.__dict__, "grid": grid.__dict__})
    return EXIT_OK if kern.ok and grid.ok else EXIT_FAIL


def cmd_vf_expand(args) -> int:
    from .vf import verify_legal_expansion

    rep = verify_legal_expansion(_load_matrix(args.input), args.t, args.q, exact(args.beta), method=args.method)
    _print_json({
        "ok": rep.ok,
        "method": rep.method,
        "sets_checked": rep.sets_checked,
        "worst_ratio": to_json_number(rep.worst_ratio),
        "worst_set": [list(s) for s in rep.worst_set],
        "violation": [list(s) for s in rep.violation] if rep.violation else None,
    })
    return EXIT_OK if rep.ok else EXIT_FAIL


# -- lattice ------------------------------------------------------------------------------------

def _load_instance(path: Path):
    from .core.intmatrix import read_latmat

    manifest = json.loads((path / "manifest.json").read_text(encoding="utf-8"))
    mats = {name: read_latmat(path / f"{name}.latmat") for name in ("A", "R", "W", "C", "B")}
    return manifest, mats


def cmd_lattice_build(args) -> int:
    from .core.intmatrix import write_latmat
    from .hypergraph import read_hg
    from .lattice import choose_params, instance_from_hypergraph

    h = read_hg(args.hg)
    spec = json.loads(Path(args.params).read_text(encoding="utf-8"))
    params = choose_params(
        spec.get("n", 1), h, exact(spec.get("alpha", 1)), exact(spec.get("r", 1)), h.arity,
        exact(spec.get("beta", 0)), spec.get("mode", "manual"),
        t=spec.get("t"), q=spec.get("q"), h=spec.get("h"), w=spec.get("w"),
        duplication=spec.get("duplication", 1),
    )
    prov = {"hypergraph": os.path.basename(args.hg)}
    if args.cert:
        prov["certificate"] = json.loads(Path(args.cert).read_text(encoding="utf-8")).get("certificate")
    inst = instance_from_hypergraph(h, params, prov)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in ("A", "R", "W", "C", "B"):
        write_latmat(out / f"{name}.latmat", getattr(inst, name))
    _write_json(out / "manifest.json", inst.manifest())
    _print_json(inst.manifest())
    return EXIT_OK


def cmd_lattice_witness(args) -> int:
    from .hypergraph import read_hg
    from .lattice import completeness_witness, planted_rows

    path = Path(args.instance)
    manifest, mats = _load_instance(path)
    q = manifest["params"]["q"]
    if args.rows:
        rows = [int(v) for v in args.rows.split(",")]
    else:
        prov = manifest.get("provenance", {})
        cert = prov.get("certificate")
        hg_path = Path(args.hg) if args.hg else path.parent / prov.get("hypergraph", "")
        if cert is None or not hg_path.is_file():
            print("error: need --rows, or an instance built with a planting certificate and --hg", file=sys.stderr)
            return EXIT_USAGE
        h = read_hg(hg_path)
        dense = [i for i, e in enumerate(h.edges) if set(cert).issuperset(e)]
        rows = planted_rows(dense, h.n_edges, q)
    wit = completeness_witness(mats["C"], rows, len(rows))
    if wit is None:
        _print_json({"found": False, "h_minus": len(rows)})
        return EXIT_FAIL
    xb = mats["B"].left_mul(wit.x)
    _print_json({
        "found": True,
        "x": list(wit.x),
        "method": wit.method,
        "h_minus": len(rows),
        "x_support": sum(1 for v in wit.x if v),
        "xB_support": sum(1 for v in xb if v),
    })
    return EXIT_OK


def cmd_lattice_soundcheck(args) -> int:
    from .errors import SizeError
    from .lattice import min_support_lattice, no_short_kernel_vector

    manifest, mats = _load_instance(Path(args.instance))
    two_h = 2 * manifest["params"]["h"]
    ms = min_support_lattice(mats["B"], args.coeff_bound)
    rec = {"coeff_bound": args.coeff_bound, "min_support": ms.value, "witness": list(ms.witness), "two_h": two_h, "box_ok": ms.value >= two_h}
    try:
        ok, rows = no_short_kernel_vector(mats["C"], two_h)
        rec.update(kernel_ok=ok, dependent_rows=list(rows) if rows else None)
    except SizeError as exc:
        ok = True
        rec.update(kernel_ok=None, kernel_scan=f"skipped-by-cap: {exc}")
    _print_json(rec)
    return EXIT_OK if rec["box_ok"] and ok else EXIT_FAIL


def cmd_lattice_params(args) -> int:
    from .hypergraph import read_hg
    from .lattice import choose_params

    h = read_hg(args.hg)
    p = choose_params(args.n, h, exact(args.alpha), exact(args.r), h.arity, exact(args.beta), "asymptotic")
    _print_json(p.to_json())
    return EXIT_OK


# -- svp -------------------------------------------------------------------------------------

def cmd_svp_solve(args) -> int:
    import math

    from .core.intmatrix import read_latmat
    from .lattice import shortest_in_box

    p = math.inf if args.p in ("inf", "Infinity") else float(args.p)
    if p != math.inf and p == int(p):
        p = int(p)
    res = shortest_in_box(read_latmat(args.basis), p, args.coeff_bound)
    _print_json({"p": args.p, "value": res.value, "x": list(res.witness), "vector": list(res.vector), "vectors": res.vectors})
    return EXIT_OK


# -- mdc -------------------------------------------------------------------------------------

def _load_code(path):
    from .codes import LinearCode
    from .core.gf2 import read_ffmat

    return LinearCode(read_ffmat(path))


def cmd_mdc_distance(args) -> int:
    from .codes import min_rel_distance

    d = min_rel_distance(_load_code(args.code))
    _print_json({"distance": to_json_number(d)})
    return EXIT_OK


def _graph_for(args, n: int):
    from .codes import graph_for_delta, parse_graph_spec

    if args.graph:
        return parse_graph_spec(args.graph)
    return graph_for_delta(n, exact(args.delta))[0]


def cmd_mdc_amplify(args) -> int:
    from .codes import amplify
    from .core.gf2 import write_ffmat

    code = _load_code(args.code)
    out = amplify(code, _graph_for(args, code.length), args.r, args.w)
    write_ffmat(args.out, out.G)
    _print_json({"shape": list(out.G.shape), "history": list(out.history)})
    return EXIT_OK


def cmd_mdc_boost(args) -> int:
    from .codes import final_boost
    from .core.gf2 import write_ffmat

    code = _load_code(args.code)
    degree = None
    if args.graph:
        degree = _graph_for(args, code.length).degree
    out = final_boost(code, args.r, args.w, exact(args.delta), degree=degree)
    write_ffmat(args.out, out.G)
    _print_json({"shape": list(out.G.shape), "lam": out.field.lam, "history": list(out.history)})
    return EXIT_OK


# -- verify / run --------------------------------------------------------------------------------

def cmd_verify(args) -> int:
    from .verify import verify

    caps = _caps.caps_for(args.cap) if args.cap else _caps.current()
    report = verify(args.suite, caps, args.inject_fault or ())
    text = report.to_text()
    if args.report:
        Path(args.report).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    counts = report.counts()
    print(f"# {counts['pass']} pass, {counts['fail']} fail, {counts['skipped-by-cap']} skipped-by-cap", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_run(args) -> int:
    from .pipeline import RunConfig, run_pipeline

    cfg = RunConfig.load(args.config)
    if args.out:
        cfg.out_dir = args.out
    manifest = run_pipeline(cfg)
    _print_json(manifest)
    return EXIT_OK


# -- parser -------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="forge", description="Exact lattice and code gadgets with brute-force oracles.")
    sub = parser.add_subparsers(dest="command", required=True)

    hg = sub.add_parser("hg", help="hypergraph generation and density checks").add_subparsers(dest="action", required=True)
    for kind in ("planted", "expanding", "random"):
        p = hg.add_parser(f"gen-{kind}", help=f"generate a seeded {kind} hypergraph")
        p.add_argument("--n", type=int, required=True, help="vertices")
        p.add_argument("--m", type=int, required=True, help="edges")
        p.add_argument("--d", type=int, default=2, help="arity")
        if kind == "planted":
            p.add_argument("--r", default="2")
            p.add_argument("--alpha", default="1")
        if kind == "expanding":
            p.add_argument("--beta", default="1/4")
            p.add_argument("--max-tries", type=int, default=1000)
            p.add_argument("--cap", type=int, help="largest N for subset enumeration")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", required=True)
        p.add_argument("--cert", help="write the generator record (and planting certificate) as JSON")
        p.set_defaults(func=_gen(kind))
    p = hg.add_parser("check-case2", help="exhaustive case-2 density check")
    p.add_argument("--hg", required=True)
    p.add_argument("--beta", default="0")
    p.add_argument("--cap", type=int, help="largest N for subset enumeration")
    p.set_defaults(func=cmd_hg_check)
    p = hg.add_parser("min-touch", help="fewest vertices covered by h edges")
    p.add_argument("--hg", required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--cap", type=int, help="largest number of edge subsets")
    p.set_defaults(func=cmd_hg_min_touch)

    vf = sub.add_parser("vf", help="VF tensor product").add_subparsers(dest="action", required=True)
    for name, func, help_ in (("build", cmd_vf_build, "build A and Q"), ("legal", cmd_vf_legal, "kernel and grid legality checks"), ("expand", cmd_vf_expand, "legal expansion check")):
        p = vf.add_parser(name, help=help_)
        p.add_argument("--input", "--hg", dest="input", required=True, help=".hg or .latmat")
        p.add_argument("--t", type=int, required=True)
        p.add_argument("--q", type=int, required=True)
        if name == "build":
            p.add_argument("--out", help="directory for A.latmat, Q.latmat and manifest.json")
            p.add_argument("--out-a")
            p.add_argument("--out-q")
            p.add_argument("--manifest")
        if name == "legal":
            p.add_argument("--bound", type=int, default=2)
        if name == "expand":
            p.add_argument("--beta", required=True)
            p.add_argument("--method", choices=("auto", "exact", "bound"), default="auto")
        p.set_defaults(func=func)

    lat = sub.add_parser("lattice", help="lattice instances").add_subparsers(dest="action", required=True)
    p = lat.add_parser("build", help="write A, R, W, C, B and manifest.json")
    p.add_argument("--hg", required=True)
    p.add_argument("--params", required=True, help="JSON with t, q, h, w, n (manual) or mode")
    p.add_argument("--cert", help="planting certificate JSON from `hg gen --cert`")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_lattice_build)
    p = lat.add_parser("witness", help="search for a completeness witness")
    p.add_argument("--instance", required=True)
    p.add_argument("--hg", help="hypergraph file (defaults to the one named in the manifest)")
    p.add_argument("--rows", help="comma-separated row indices instead of the planted rows")
    p.set_defaults(func=cmd_lattice_witness)
    p = lat.add_parser("soundcheck", help="box oracle and kernel scan")
    p.add_argument("--instance", required=True)
    p.add_argument("--coeff-bound", type=int, default=2)
    p.set_defaults(func=cmd_lattice_soundcheck)
    p = lat.add_parser("params", help="asymptotic parameter selection")
    p.add_argument("--hg", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", default="1")
    p.add_argument("--r", default="1")
    p.add_argument("--beta", default="0")
    p.set_defaults(func=cmd_lattice_params)

    svp = sub.add_parser("svp", help="box-enumeration shortest vector").add_subparsers(dest="action", required=True)
    p = svp.add_parser("solve")
    p.add_argument("--basis", required=True)
    p.add_argument("--p", default="2", help="0, a real >= 1, or inf")
    p.add_argument("--coeff-bound", type=int, default=1)
    p.set_defaults(func=cmd_svp_solve)

    mdc = sub.add_parser("mdc", help="code distance and amplification").add_subparsers(dest="action", required=True)
    p = mdc.add_parser("distance")
    p.add_argument("--code", required=True)
    p.set_defaults(func=cmd_mdc_distance)
    for name, func in (("amplify", cmd_mdc_amplify), ("boost", cmd_mdc_boost)):
        p = mdc.add_parser(name)
        p.add_argument("--code", required=True)
        p.add_argument("--graph", help="circulant:n,d | complete:n | cycle:n")
        p.add_argument("--delta", default="1/2", help="target rho/degree when no graph is given")
        p.add_argument("--r", type=int, required=True)
        p.add_argument("--w", type=int, required=True)
        p.add_argument("--out", required=True)
        p.set_defaults(func=func)

    p = sub.add_parser("verify", help="run property suites")
    p.add_argument("suite", nargs="?", default="all")
    p.add_argument("--cap", choices=("tiny", "default", "max"))
    p.add_argument("--inject-fault", action="append", choices=("vandermonde",))
    p.add_argument("--report", help="also write the JSON-lines report here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("run", help="run a pipeline config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="override out_dir")
    p.set_defaults(func=cmd_run)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ForgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
