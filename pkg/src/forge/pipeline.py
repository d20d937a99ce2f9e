"""Config-driven runs: hypergraph, VF tensor, lattice, witness and soundness checks, or the code chain.

Every artifact is written with deterministic content, and ``manifest.json``
links each one to the parameters that produced it.  A failing stage leaves
its partial outputs in place next to a ``.partial`` marker.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import caps as _caps
from .codes import LinearCode, final_boost, gap_to_constants, graph_for_delta, amplify, min_rel_distance, parse_graph_spec, recursive_sparsify
from .core.gf2 import FieldMatrix, build_field, read_ffmat, write_ffmat
from .core.intmatrix import write_latmat
from .errors import ForgeError, ParameterError, SizeError, StageError
from .hypergraph import (
    Hypergraph,
    certified_beta,
    dumps_hg,
    gen_expanding,
    gen_planted,
    gen_random,
    read_hg,
)
from .lattice import (
    ReductionParams,
    choose_params,
    completeness_witness,
    instance_from_hypergraph,
    min_support_lattice,
    no_short_kernel_vector,
    planted_rows,
    toy_soundness_params,
)
from .numbers import exact, to_json_number

LATTICE_STAGES = ("hg", "vf", "lattice", "witness", "soundcheck")
ALL_STAGES = LATTICE_STAGES + ("mdc",)


@dataclass
class RunConfig:
    stages: list = field(default_factory=list)
    out_dir: str = "run"
    seed: int = 0
    cap_mode: str | None = None
    hypergraph: dict = field(default_factory=dict)    # kind, n, m, d, r, alpha, beta, path
    params: dict = field(default_factory=dict)        # manual t,q,h,w,n; or {"toy_soundness": true}
    coeff_bound: int = 2
    mdc: dict = field(default_factory=dict)           # lam, rows, op, graph, r, w, delta, ...

    @classmethod
    def from_json(cls, data: dict) -> "RunConfig":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(data) - known
        if extra:
            raise ParameterError(f"unknown config keys {sorted(extra)}")
        cfg = cls(**data)
        bad = [s for s in cfg.stages if s not in ALL_STAGES]
        if bad:
            raise ParameterError(f"unknown stages {bad}; expected a subset of {list(ALL_STAGES)}")
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))

    def to_json(self) -> dict:
        return asdict(self)

    def recorded(self) -> dict:
        """The config as stored in manifests: everything but the output path."""
        out = self.to_json()
        out.pop("out_dir")
        return out


def _dump_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


class _Run:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.out = Path(cfg.out_dir)
        self.caps = _caps.caps_for(cfg.cap_mode)
        self.manifest: dict = {"config": cfg.recorded(), "stages": {}}
        self.hg: Hypergraph | None = None
        self.certificate: tuple | None = None
        self.params: ReductionParams | None = None
        self.instance = None

    # -- stages ---------------------------------------------------------------------

    def stage_hg(self) -> dict:
        spec = dict(self.cfg.hypergraph)
        kind = spec.get("kind", "planted")
        seed = self.cfg.seed
        rec: dict = {"kind": kind, "seed": seed}
        if kind == "file":
            self.hg = read_hg(spec["path"])
        elif kind == "planted":
            ph = gen_planted(spec["n"], spec["m"], spec["d"], exact(spec.get("r", 2)), exact(spec.get("alpha", 1)), seed)
            self.hg, self.certificate = ph.hypergraph, ph.certificate
            rec.update(certificate=list(ph.certificate), planted_edges=ph.planted_edges)
        elif kind == "expanding":
            self.hg = gen_expanding(spec["n"], spec["m"], spec["d"], exact(spec.get("beta", "1/4")), seed, cap=self.caps.subset_vertices)
        elif kind == "random":
            self.hg = gen_random(spec["n"], spec["m"], spec["d"], seed)
        else:
            raise ParameterError(f"unknown hypergraph kind {kind!r}")
        (self.out / "H.hg").write_text(dumps_hg(self.hg), encoding="ascii")
        rec.update(file="H.hg", n=self.hg.n_vertices, m=self.hg.n_edges, d=self.hg.arity)
        rec["certified_beta"] = to_json_number(certified_beta(self.hg, self.caps.subset_vertices))
        return rec

    def _need_hg(self) -> Hypergraph:
        if self.hg is None:
            path = self.out / "H.hg"
            if not path.exists():
                raise ParameterError("no hypergraph: run the hg stage first")
            self.hg = read_hg(path)
        return self.hg

    def _need_params(self) -> ReductionParams:
        if self.params is not None:
            return self.params
        h = self._need_hg()
        spec = dict(self.cfg.params)
        if spec.get("toy_soundness"):
            beta = exact(spec["beta"]) if "beta" in spec else certified_beta(h, self.caps.subset_vertices)
            found = toy_soundness_params(h, beta, spec.get("q", 1))
            if found is None:
                raise ParameterError("no toy soundness parameters exist for this hypergraph")
            self.params = found.params
            self.manifest["toy_delta"] = to_json_number(found.delta)
        else:
            self.params = choose_params(
                spec.get("n", 1),
                h,
                exact(spec.get("alpha", 1)),
                exact(spec.get("r", 1)),
                h.arity,
                exact(spec.get("beta", 0)),
                spec.get("mode", "manual"),
                t=spec.get("t"),
                q=spec.get("q"),
                h=spec.get("h"),
                w=spec.get("w"),
                duplication=spec.get("duplication", 1),
            )
        return self.params

    def stage_vf(self) -> dict:
        from .hypergraph import indicator_matrix
        from .vf import vf_tensor

        params = self._need_params()
        vf = vf_tensor(indicator_matrix(self._need_hg()), params.t, params.q)
        d = self.out / "vf"
        d.mkdir(exist_ok=True)
        write_latmat(d / "A.latmat", vf.A)
        write_latmat(d / "Q.latmat", vf.Q)
        _dump_json(d / "manifest.json", vf.manifest())
        return {"dir": "vf", "A": list(vf.A.shape), "Q": list(vf.Q.shape), "prime_a": vf.prime_a}

    def stage_lattice(self) -> dict:
        params = self._need_params()
        prov = {"hypergraph": "H.hg"}
        if self.certificate is not None:
            prov["certificate"] = list(self.certificate)
        inst = instance_from_hypergraph(self._need_hg(), params, prov)
        self.instance = inst
        d = self.out / "instance"
        d.mkdir(exist_ok=True)
        for name in ("A", "R", "W", "C", "B"):
            write_latmat(d / f"{name}.latmat", getattr(inst, name))
        _dump_json(d / "manifest.json", inst.manifest())
        return {"dir": "instance", "params": params.to_json(), "B": list(inst.B.shape)}

    def _need_instance(self):
        if self.instance is None:
            self.instance = instance_from_hypergraph(self._need_hg(), self._need_params())
        return self.instance

    def stage_witness(self) -> dict:
        inst = self._need_instance()
        h = self._need_hg()
        if self.certificate is None:
            raise ParameterError("the witness stage needs a planted hypergraph")
        plant = set(self.certificate)
        dense = [i for i, e in enumerate(h.edges) if plant.issuperset(e)]
        rows = planted_rows(dense, h.n_edges * inst.params.duplication, inst.params.q) if inst.params.duplication == 1 else None
        if rows is None:
            raise ParameterError("witness search on duplicated instances is not supported")
        wit = completeness_witness(inst.C, rows, len(rows), self.caps.collision_side)
        rec = {"planted_rows": len(rows), "h_minus": len(rows), "found": wit is not None}
        if wit is not None:
            xb = inst.B.left_mul(wit.x)
            rec.update(
                x=list(wit.x),
                method=wit.method,
                x_support=sum(1 for v in wit.x if v),
                xB_support=sum(1 for v in xb if v),
                xC_zero=not any(inst.C.left_mul(wit.x)),
            )
        return rec

    def stage_soundcheck(self) -> dict:
        inst = self._need_instance()
        k = self.cfg.coeff_bound
        ms = min_support_lattice(inst.B, k, self.caps.box_vectors)
        two_h = 2 * inst.params.h
        rec = {"coeff_bound": k, "min_support": ms.value, "witness": list(ms.witness), "vectors": ms.vectors, "two_h": two_h, "box_ok": ms.value >= two_h}
        try:
            ok, rows = no_short_kernel_vector(inst.C, two_h, self.caps.combinations)
            rec.update(kernel_scan="done", kernel_ok=ok, dependent_rows=list(rows) if rows else None)
        except SizeError as exc:
            rec.update(kernel_scan="skipped-by-cap", reason=str(exc))
        return rec

    def stage_mdc(self) -> dict:
        spec = dict(self.cfg.mdc)
        if "code" in spec:
            g = read_ffmat(spec["code"])
        else:
            g = FieldMatrix.from_rows(build_field(spec.get("lam", 4)), spec["rows"])
        code = LinearCode(g)
        op = spec.get("op", "amplify")
        r, w = spec.get("r", 1), spec.get("w", 2)
        delta = exact(spec.get("delta", "1/2"))
        if op == "amplify":
            graph = parse_graph_spec(spec["graph"]) if "graph" in spec else graph_for_delta(code.length, delta)[0]
            out = amplify(code, graph, r, w)
        elif op == "constants":
            out = gap_to_constants(code, exact(spec["alpha"]), exact(spec["beta"]), spec.get("base_alpha"), spec.get("base_beta"), q=spec.get("q"), q_prime=spec.get("q_prime"))
        elif op == "sparsify":
            out = recursive_sparsify(code, spec.get("levels", 2), spec.get("q", r), delta, r, w, verify=spec.get("verify", False))
        elif op == "boost":
            out = final_boost(code, r, w, delta)
        else:
            raise ParameterError(f"unknown mdc op {op!r}")
        d = self.out / "mdc"
        d.mkdir(exist_ok=True)
        write_ffmat(d / "G_in.ffmat", code.G)
        write_ffmat(d / "G_out.ffmat", out.G)
        rec = {"op": op, "history": list(out.history), "shape": list(out.G.shape), "lam": out.field.lam}
        if spec.get("measure", True):
            for key, c in (("distance_in", code), ("distance_out", out)):
                try:
                    rec[key] = to_json_number(min_rel_distance(c, self.caps.messages))
                except SizeError:
                    rec[key] = None
        return rec

    def run(self) -> dict:
        self.out.mkdir(parents=True, exist_ok=True)
        marker = self.out / ".partial"
        if marker.exists():
            marker.unlink()
        order = [s for s in ALL_STAGES if s in self.cfg.stages]
        for stage in order:
            try:
                rec = getattr(self, f"stage_{stage}")()
            except ForgeError as exc:
                self.manifest["failed_stage"] = stage
                _dump_json(self.out / "manifest.json", self.manifest)
                marker.write_text(f"{stage}: {exc}\n", encoding="utf-8")
                raise StageError(stage, str(exc)) from exc
            self.manifest["stages"][stage] = rec
        if order:
            _dump_json(self.out / "manifest.json", self.manifest)
        return self.manifest


def run_pipeline(config: RunConfig) -> dict:
    """Run the configured stages in pipeline order and return the manifest."""
    if not config.stages:
        return {"config": config.recorded(), "stages": {}}
    return _Run(config).run()


def planted_toy_config(out_dir: str, seed: int = 1) -> RunConfig:
    return RunConfig(
        stages=list(LATTICE_STAGES[:4]),
        out_dir=out_dir,
        seed=seed,
        hypergraph={"kind": "planted", "n": 6, "m": 4, "d": 2, "r": 2, "alpha": 1},
        params={"t": 4, "q": 2, "h": 1, "w": 1, "n": 1},
    )


def expanding_toy_config(out_dir: str, seed: int = 1) -> RunConfig:
    return RunConfig(
        stages=["hg", "lattice", "soundcheck"],
        out_dir=out_dir,
        seed=seed,
        hypergraph={"kind": "expanding", "n": 5, "m": 7, "d": 2, "beta": "1/4"},
        params={"toy_soundness": True, "q": 1},
        coeff_bound=2,
    )
