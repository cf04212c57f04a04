"""Acceptance suite: one printed PASS/FAIL line per criterion."""

import json

import pytest

from strobe import acceptance, cli, sphere


@pytest.fixture(scope="module")
def results():
    return {c.criterion_id: c for c in acceptance.run_all()}


@pytest.mark.parametrize("check", acceptance.CHECKS, ids=lambda f: f.__name__)
def test_criterion(check, capsys):
    crit = check()
    with capsys.disabled():
        print("\n" + crit.line())
    assert crit.passed, crit.line()
    assert crit.within_runtime, crit.line()


def test_fig2_count_reported_with_claim(results):
    crit = results["C7"]
    assert crit.measured == 90
    assert crit.details["claimed"] == 45
    assert crit.details["distinct_points_half_period"] == 45


def test_report_schema(results, tmp_path):
    path = acceptance.write_report(list(results.values()), tmp_path)
    data = json.loads(path.read_text())
    assert data["all_pass"]
    ids = [c["criterion_id"] for c in data["criteria"]]
    assert ids == [f"C{i}" for i in range(1, 11)]
    for rec in data["criteria"]:
        assert {"criterion_id", "description", "measured", "expected", "tolerance", "pass"} <= set(rec)
    assert data["errata"]
    assert (tmp_path / "acceptance.csv").read_text().startswith("criterion_id,pass,description\n")
    assert (tmp_path / "convergence.svg").exists()


def test_report_is_deterministic(results, tmp_path):
    a = acceptance.write_report(list(results.values()), tmp_path / "a")
    b = acceptance.write_report(list(results.values()), tmp_path / "b")
    assert a.read_bytes() == b.read_bytes()


def test_tampered_rotation_sign_is_caught(monkeypatch, tmp_path, capsys):
    honest = sphere.rotate_vector
    monkeypatch.setattr(sphere, "rotate_vector", lambda x, s, g: honest(x, s, -g))
    tampered = [acceptance.map_matches_closed_form(n_configs=10, k_max=200), acceptance.flow_is_sampled()]
    assert {c.criterion_id for c in tampered if not c.passed} == {"C2", "C3"}
    monkeypatch.setattr(acceptance, "run_all", lambda checks=None: tampered)
    code = cli.run(["acceptance", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 1
    assert "[FAIL] C2" in out and "[FAIL] C3" in out
    data = json.loads((tmp_path / "acceptance.json").read_text())
    assert {c["criterion_id"] for c in data["criteria"] if not c["pass"]} == {"C2", "C3"}
