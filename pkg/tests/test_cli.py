import json
import math
import re

import numpy as np
import pytest

from strobe import cli, io, plotting, sphere
from strobe.sphere import SphereConfig, Trajectory


def run(capsys, *argv):
    code = cli.run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_bounds_json(capsys):
    code, out, _ = run(capsys, "bounds", "--p", "1,0,0", "--q", "0,0,1", "--r0", "0.6,0,0.8")
    assert code == 0
    data = json.loads(out)
    assert data["a"] == pytest.approx(0.8) and data["b"] == 0 and data["c"] == 0
    assert data["A1"] == pytest.approx(-0.8, abs=1e-12) and data["A2"] == pytest.approx(0.8, abs=1e-12)


def test_exact_first_row(capsys):
    code, out, _ = run(capsys, "exact", "--alpha", "0.01", "--beta", "0.06", "--degrees", "--steps", "1")
    assert code == 0
    assert out == "index,theta,rx,ry,rz,r_dot_q\n0,0,0.6,0,0.8,0.8\n"


def test_empty_trajectory_csv_is_header_only():
    assert io.trajectory_csv(Trajectory.empty()) == io.CSV_HEADER + "\n"


def test_format_number_round_trips():
    for x in (0.1, 1 / 3, -2.5e-300, 12345678.9, math.pi):
        assert float(io.format_number(x)) == x
    assert io.format_number(-0.0) == "0"
    assert io.format_number(3.0) == "3"


def test_iterate_fig2_dots_rows(capsys, tmp_path):
    out = tmp_path / "dots.csv"
    code, _, _ = run(capsys, "iterate", "--alpha", "2", "--beta", "8", "--degrees", "--steps", "90", "--out", str(out))
    assert code == 0
    lines = out.read_bytes().split(b"\n")
    assert lines[0] == b"index,theta,rx,ry,rz,r_dot_q"
    assert len(lines) == 92 and lines[-1] == b""
    assert b"\r" not in out.read_bytes()


def test_compare_preset(capsys):
    code, out, _ = run(capsys, "compare", "--preset", "fig1", "--h", "1e-4", "--steps", "1000")
    assert code == 0
    data = json.loads(out)
    assert data["pass"] and data["sup_deviation"] <= 1e-8


def test_compare_failure_exit(capsys):
    code, out, _ = run(capsys, "compare", "--preset", "fig1", "--h", "1e-2", "--steps", "200", "--tol", "1e-16")
    assert code == 1 and not json.loads(out)["pass"]


def test_closure_modes(capsys):
    _, out, _ = run(capsys, "closure", "--alpha", "0.01", "--beta", "0.0205", "--degrees")
    assert json.loads(out) == {"closes": True, "K": 720000, "m": 41, "n": 40}
    _, out, _ = run(capsys, "closure", "--preset", "fig3-ergodic")
    assert json.loads(out) == {"closes": False}


def test_integrate_json(capsys):
    code, out, _ = run(capsys, "integrate", "--lambda", "2", "--theta-max", "1", "--steps", "3", "--format", "json")
    assert code == 0
    data = json.loads(out)
    cfg = SphereConfig(lam=2.0)
    got = np.array([s["r"] for s in data["samples"]])
    np.testing.assert_allclose(got, sphere.r_curve(cfg, np.linspace(0, 1, 3)), atol=1e-8)


def test_determinism(capsys, tmp_path):
    outs = []
    for name in ("a", "b"):
        path = tmp_path / f"{name}.json"
        run(capsys, "exact", "--preset", "fig2", "--steps", "50", "--format", "json", "--out", str(path))
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_config_file_and_flag_override(capsys, tmp_path):
    conf = tmp_path / "cfg.json"
    conf.write_text(json.dumps({"alpha": "2", "beta": "8", "degrees": True, "steps": 5}))
    _, out, _ = run(capsys, "iterate", "--config", str(conf))
    assert len(out.splitlines()) == 6
    _, out, _ = run(capsys, "iterate", "--config", str(conf), "--steps", "3")
    assert len(out.splitlines()) == 4


@pytest.mark.parametrize(
    "argv",
    [
        ("iterate",),
        ("bounds", "--p", "1,1"),
        ("bounds", "--p", "1,1,0"),
        ("figure", "nope"),
        ("closure", "--alpha", "2.0.0", "--beta", "1"),
        ("bounds", "extra"),
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


def test_bad_config_key_exit_2(capsys, tmp_path):
    conf = tmp_path / "cfg.json"
    conf.write_text('{"colour": 1}')
    assert run(capsys, "bounds", "--config", str(conf))[0] == 2


def test_io_failure_exit_3(capsys, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code, _, err = run(capsys, "bounds", "--out", str(blocker / "sub" / "out.json"))
    assert code == 3 and "I/O" in err


def test_instability_exit_3(capsys, monkeypatch):
    from strobe.errors import NumericalInstabilityError

    def boom(*a, **k):
        raise NumericalInstabilityError("norm left the window")

    monkeypatch.setattr(cli.sphere, "direct_trajectory", boom)
    assert run(capsys, "iterate", "--preset", "fig2")[0] == 3


def test_figure_outputs(capsys, tmp_path):
    code, _, _ = run(capsys, "figure", "fig2", "--out", str(tmp_path))
    assert code == 0
    assert (tmp_path / "fig2.csv").exists()
    dots = (tmp_path / "fig2-dots.csv").read_text().splitlines()
    assert len(dots) == 91
    svg = (tmp_path / "fig2.svg").read_text()
    assert svg.startswith("<?xml") and 'version="1.1"' in svg
    assert re.search(r'viewBox="0 0 640 640"', svg)


def test_figure_svg_is_deterministic(capsys, tmp_path):
    for sub in ("a", "b"):
        run(capsys, "figure", "fig1", "--out", str(tmp_path / sub), "--steps", "2000")
    assert (tmp_path / "a" / "fig1.svg").read_bytes() == (tmp_path / "b" / "fig1.svg").read_bytes()


def test_empty_svg(tmp_path):
    path = plotting.emit_svg(Trajectory.empty(), sphere.bounds(SphereConfig(lam=1.0)), tmp_path / "e.svg")
    assert 'viewBox="0 0 640 640"' in path.read_text()


def test_visibility_partition():
    view = plotting.View()
    pts = np.random.default_rng(2).normal(size=(500, 3))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    front = plotting.front_mask(pts, view)
    toward, _, _ = view.basis()
    np.testing.assert_array_equal(front, pts @ toward >= 0)
    runs = plotting.split_runs(front)
    covered = np.concatenate([np.arange(a, b) for a, b, _ in runs])
    np.testing.assert_array_equal(covered, np.arange(500))
    assert all(front[a:b].all() == v and (~front[a:b]).all() != v for a, b, v in runs)


def test_view_puts_q_up_and_right():
    _, right, up = plotting.View().basis()
    q = np.array([0.0, 0.0, 1.0])
    assert q @ up > 0.5 and q @ right > 0.1
