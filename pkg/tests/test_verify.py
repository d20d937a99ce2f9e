import pytest

from forge import caps
from forge.core.intmatrix import IntMatrix
from forge.core.vandermonde import reduced_vandermonde
from forge.errors import ParameterError
from forge.verify import FAIL, PASS, SKIP, SUITES, VerifyReport, corrupted_vandermonde, verify


@pytest.fixture(scope="module")
def full_report():
    return verify("all")


def test_every_suite_passes_at_default_caps(full_report):
    assert full_report.ok
    assert full_report.counts() == {PASS: sum(len(v) for v in SUITES.values()), FAIL: 0, SKIP: 0}
    assert {r.suite for r in full_report.results} == set(SUITES)


def test_core_suite_alone():
    rep = verify("core-algebra")
    assert rep.ok and len(rep.results) == len(SUITES["core-algebra"])


def test_injected_fault_is_caught_with_a_witness():
    rep = verify("core-algebra", faults=["vandermonde"])
    assert not rep.ok
    fails = [r for r in rep.results if r.status == FAIL]
    assert {r.property for r in fails} == {"vandermonde-minors", "vandermonde-certificates"}
    for r in fails:
        w = r.witness
        assert w["rows"] == [0, 1] and w["det"] == 0


def test_fault_witness_reproduces_standalone():
    w = next(r for r in verify("core-algebra", faults=["vandermonde"]).results if r.status == FAIL).witness
    mx = corrupted_vandermonde(w["a"], w["b"])
    assert mx.select_rows(w["rows"]).det() == 0
    # the genuine matrix has a nonzero minor on the same rows
    assert reduced_vandermonde(w["a"], w["b"]).select_rows(w["rows"]).det() != 0
    assert isinstance(mx, IntMatrix)


def test_tiny_caps_skip_but_never_fail():
    rep = verify("all", caps=caps.caps_for("tiny"))
    counts = rep.counts()
    assert counts[FAIL] == 0 and counts[SKIP] >= 1
    for r in rep.results:
        if r.status == SKIP:
            assert "reason" in r.witness


def test_report_text_roundtrip(full_report):
    text = full_report.to_text()
    assert len(text.splitlines()) == len(full_report.results)
    assert VerifyReport.from_text(text) == full_report


def test_unknown_names_are_rejected():
    with pytest.raises(ParameterError):
        verify("everything")
    with pytest.raises(ParameterError):
        verify("core-algebra", faults=["cosmic-ray"])
