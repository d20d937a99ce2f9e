import json
import subprocess
import sys

import pytest

import oracles

from forge.cli import main
from forge.core.intmatrix import read_latmat
from forge.hypergraph import read_hg


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def planted(tmp_path, capsys):
    hg, cert = tmp_path / "H.hg", tmp_path / "cert.json"
    code, out, _ = run(capsys, "hg", "gen-planted", "--n", "6", "--m", "4", "--d", "2", "--r", "2", "--seed", "1",
                       "--out", str(hg), "--cert", str(cert))
    assert code == 0
    return hg, cert


def test_hg_generators(tmp_path, capsys, planted):
    hg, cert = planted
    assert json.loads(cert.read_text())["certificate"] == [0, 4, 5]
    for kind, extra in (("gen-expanding", ["--beta", "1/4"]), ("gen-random", [])):
        out = tmp_path / f"{kind}.hg"
        code, _, _ = run(capsys, "hg", kind, "--n", "5", "--m", "6", "--d", "2", "--seed", "2", "--out", str(out), *extra)
        assert code == 0 and read_hg(out).n_edges == 6


def test_hg_checks(capsys, planted):
    hg, _ = planted
    code, out, _ = run(capsys, "hg", "check-case2", "--hg", str(hg), "--beta", "0")
    assert code == 1 and json.loads(out)["witness"] is not None
    code, out, _ = run(capsys, "hg", "check-case2", "--hg", str(hg), "--beta", "1")
    assert code == 0 and json.loads(out)["holds"]
    code, out, _ = run(capsys, "hg", "min-touch", "--hg", str(hg), "--h", "2")
    # the planted draw repeats edge (0, 5), so two edges can share both vertices
    assert code == 0 and json.loads(out)["min_touched"] == oracles.min_touched(read_hg(hg).edges, 2) == 2


def test_vf_commands(tmp_path, capsys, planted):
    hg, _ = planted
    code, out, _ = run(capsys, "vf", "build", "--hg", str(hg), "--t", "4", "--q", "1", "--out", str(tmp_path / "vf"))
    assert code == 0
    assert read_latmat(tmp_path / "vf" / "A.latmat").nrows == 4
    assert (tmp_path / "vf" / "manifest.json").exists()
    code, _, err = run(capsys, "vf", "build", "--hg", str(hg), "--t", "4", "--q", "1")
    assert code == 2 and "--out" in err
    code, out, _ = run(capsys, "vf", "legal", "--hg", str(hg), "--t", "4", "--q", "1")
    assert code == 0
    code, out, _ = run(capsys, "vf", "expand", "--hg", str(hg), "--t", "1", "--q", "1", "--beta", "1/2")
    assert code in (0, 1) and "worst_ratio" in json.loads(out)


def test_lattice_and_svp(tmp_path, capsys, planted):
    hg, cert = planted
    params = tmp_path / "params.json"
    params.write_text(json.dumps({"t": 4, "q": 2, "h": 1, "w": 1, "n": 1}))
    inst = tmp_path / "instance"
    code, _, _ = run(capsys, "lattice", "build", "--hg", str(hg), "--params", str(params), "--cert", str(cert), "--out", str(inst))
    assert code == 0
    code, out, _ = run(capsys, "lattice", "witness", "--instance", str(inst), "--hg", str(hg))
    wit = json.loads(out)
    assert code == 0 and wit["found"] and wit["xB_support"] == 4
    code, _, err = run(capsys, "lattice", "soundcheck", "--instance", str(inst), "--coeff-bound", "1")
    assert code == 2 and "cap" in err
    params.write_text(json.dumps({"t": 4, "q": 1, "h": 1, "w": 1, "n": 1}))
    small = tmp_path / "small"
    assert run(capsys, "lattice", "build", "--hg", str(hg), "--params", str(params), "--out", str(small))[0] == 0
    code, out, _ = run(capsys, "lattice", "soundcheck", "--instance", str(small), "--coeff-bound", "2")
    rec = json.loads(out)
    assert code == 0 and rec["min_support"] >= rec["two_h"] and rec["kernel_ok"]
    basis = tmp_path / "b.latmat"
    basis.write_text("2 3\n1 1 0\n0 1 1\n")
    code, out, _ = run(capsys, "svp", "solve", "--basis", str(basis), "--p", "2")
    res = json.loads(out)
    assert code == 0 and res["vector"] == [1, 0, -1] and abs(res["value"] - 2**0.5) < 1e-12
    code, out, _ = run(capsys, "svp", "solve", "--basis", str(basis), "--p", "0")
    assert code == 0 and json.loads(out)["value"] == 2


def test_lattice_params_errors_exit_2(capsys, planted):
    hg, _ = planted
    code, _, err = run(capsys, "lattice", "params", "--hg", str(hg), "--n", "2")
    assert code == 2 and err.startswith("error:")


def test_mdc_commands(tmp_path, capsys):
    g = tmp_path / "G.ffmat"
    g.write_text("1 2 2 7\n1 0\n")
    code, out, _ = run(capsys, "mdc", "distance", "--code", str(g))
    assert code == 0 and json.loads(out)["distance"] == "1/2"
    amp = tmp_path / "amp.ffmat"
    code, _, _ = run(capsys, "mdc", "amplify", "--code", str(g), "--graph", "complete:2", "--r", "2", "--w", "2", "--out", str(amp))
    assert code == 0 and amp.read_text().splitlines()[1] == "1 2 1 3"
    code, out, _ = run(capsys, "mdc", "distance", "--code", str(amp))
    assert code == 0 and json.loads(out)["distance"] == 1
    boost = tmp_path / "boost.ffmat"
    code, out, _ = run(capsys, "mdc", "boost", "--code", str(g), "--graph", "complete:2", "--r", "1", "--w", "2", "--out", str(boost))
    assert code == 0 and json.loads(out)["shape"][1] >= 4


def test_verify_exit_codes(tmp_path, capsys):
    report = tmp_path / "report.jsonl"
    code, out, err = run(capsys, "verify", "hypergraph-qrdh", "--report", str(report))
    assert code == 0 and report.read_text() == out and "0 fail" in err
    code, _, _ = run(capsys, "verify", "core-algebra", "--inject-fault", "vandermonde")
    assert code == 1
    code, _, _ = run(capsys, "verify", "nope")
    assert code == 2


def test_run_command(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"stages": ["hg"], "hypergraph": {"kind": "random", "n": 4, "m": 3, "d": 2}}))
    code, out, _ = run(capsys, "run", "--config", str(cfg), "--out", str(tmp_path / "r"))
    assert code == 0 and json.loads(out)["stages"]["hg"]["m"] == 3
    cfg.write_text(json.dumps({"stages": ["hg"], "bogus": 1}))
    code, _, _ = run(capsys, "run", "--config", str(cfg))
    assert code == 2


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["hg", "gen-planted"])
    assert exc.value.code == 2


def test_console_entry_point(tmp_path):
    out = tmp_path / "H.hg"
    args = ["hg", "gen-random", "--n", "4", "--m", "2", "--seed", "9", "--out", str(out)]
    proc = subprocess.run([sys.executable, "-m", "forge.cli", *args], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["kind"] == "random"
    first = out.read_text()
    subprocess.run([sys.executable, "-m", "forge.cli", *args], check=True, capture_output=True)
    assert out.read_text() == first
