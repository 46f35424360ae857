import json
import math

import numpy as np
import pytest

from dualmink import io
from dualmink.cli import main
from dualmink.geometry import Polytope, hausdorff_distance, hemisphere_check, square

SQ2 = math.sqrt(2.0)


@pytest.fixture
def files(tmp_path, sq, square_measure, sq_redundant):
    io.write_body(tmp_path / "square.json", sq)
    io.write_body(tmp_path / "square2.json", sq.scaled(2.0))
    io.write_body(tmp_path / "redundant.json", sq_redundant)
    io.write_measure(tmp_path / "mu.json", square_measure)
    return tmp_path


def test_solve_square(files):
    out = files / "body.json"
    assert main(["solve", str(files / "mu.json"), "--q", "-1", "--out", str(out)]) == 0
    assert hausdorff_distance(io.read_body(out), square()) < 1e-6
    report = json.loads((files / "body.report.json").read_text())
    assert report["status"] == "Converged"
    assert {"iterations", "residual", "phi_trace", "bound_M"} <= set(report)


def test_solve_hemisphere_measure(files, capsys):
    (files / "bad.json").write_text('{"dim": 2, "atoms": [{"v": [1, 0], "w": 1}, '
                                    '{"v": [0, 1], "w": 1}]}')
    assert main(["solve", str(files / "bad.json"), "--q", "-1", "--out", str(files / "x")]) == 2
    assert "[0.707107, 0.707107]" in capsys.readouterr().err


def test_solve_forced_max_iter(files):
    main(["gen", "--kind", "measure", "--m", "11", "--seed", "2", "--out", str(files / "g.json")])
    code = main(["solve", str(files / "g.json"), "--q", "-1", "--tol", "1e-15", "--max-iter", "3",
                 "--out", str(files / "b.json")])
    assert code == 3
    report = json.loads((files / "b.report.json").read_text())
    assert report["status"] == "MaxIter" and report["residual"] > 0


def test_solve_with_starts(files):
    main(["solve", str(files / "mu.json"), "--q", "-1", "--starts", "3", "--out",
          str(files / "b.json"), "--report", str(files / "r.json")])
    assert json.loads((files / "r.json").read_text())["uniqueness_distance"] <= 1e-4


@pytest.mark.parametrize("argv", [["solve", "missing.json", "--q", "-1"],
                                  ["solve", "--q", "-1"],
                                  ["solve", "x.json"],
                                  ["frobnicate"]])
def test_usage_and_io_errors(files, argv):
    with pytest.raises(SystemExit) as info:
        code = main(argv)
        raise SystemExit(code)
    assert info.value.code == 1


def test_measure_square(files):
    out = files / "m.json"
    assert main(["measure", str(files / "square.json"), "--q", "-1", "--out", str(out)]) == 0
    mu = io.read_measure(out)
    np.testing.assert_allclose(mu.weights, SQ2 / 2, atol=1e-12)


def test_measure_drops_redundant_facet(files):
    out = files / "m.json"
    assert main(["measure", str(files / "redundant.json"), "--q", "-1", "--out", str(out)]) == 0
    assert len(io.read_measure(out)) == 4


def test_measure_then_solve(files, rng):
    from dualmink.geometry import random_polytope
    P = random_polytope(2, 9, rng)
    io.write_body(files / "p.json", P)
    main(["measure", str(files / "p.json"), "--q", "-0.7", "--out", str(files / "pm.json")])
    main(["solve", str(files / "pm.json"), "--q", "-0.7", "--out", str(files / "pb.json")])
    assert hausdorff_distance(io.read_body(files / "pb.json"), P) <= 1e-4


@pytest.mark.parametrize("text", [
    '{"dim": 2, "normals": [[1, 0], [0, 1], [-1, 0], [0, -1]], "supports": [1, 0, 1, 1]}',
    '{"dim": 2, "normals": [[1, 0], [0, 1], [0.6, 0.8]], "supports": [1, 1, 1]}',
])
def test_measure_invalid_body(files, text):
    (files / "bad.json").write_text(text)
    assert main(["measure", str(files / "bad.json"), "--q", "-1"]) == 4


def test_check_exact_pair(files, capsys):
    assert main(["check", str(files / "mu.json"), str(files / "square.json"), "--q", "-1"]) == 0
    out = capsys.readouterr().out
    assert "residual" in out and "bound M" in out and "identity gap" in out and "PASS" in out


def test_check_dilated_body(files, capsys):
    code = main(["check", str(files / "mu.json"), str(files / "square2.json"), "--q", "-1"])
    assert code == 7
    line = next(l for l in capsys.readouterr().out.splitlines() if l.startswith("residual"))
    assert float(line.split()[1]) == pytest.approx(0.125, rel=1e-12)


def test_check_shape_mismatch(files):
    io.write_body(files / "tri.json", Polytope([[1.0, 0.0], [-0.5, 0.75 ** 0.5],
                                                [-0.5, -0.75 ** 0.5]], [1, 1, 1]))
    assert main(["check", str(files / "mu.json"), str(files / "tri.json"), "--q", "-1"]) == 5


def test_gen_is_deterministic(files):
    for name in ("a.json", "b.json"):
        main(["gen", "--kind", "measure", "--dim", "2", "--m", "12", "--seed", "7", "--out",
              str(files / name)])
    assert (files / "a.json").read_bytes() == (files / "b.json").read_bytes()
    assert hemisphere_check(io.read_measure(files / "a.json"))


def test_gen_symmetric(files):
    main(["gen", "--kind", "measure", "--dim", "3", "--m", "10", "--symmetric", "--seed", "1",
          "--out", str(files / "s.json")])
    mu = io.read_measure(files / "s.json")
    np.testing.assert_array_equal(mu.directions[:5], -mu.directions[5:])
    assert hemisphere_check(mu)


def test_gen_body_3d(files):
    assert main(["gen", "--kind", "body", "--dim", "3", "--m", "20", "--seed", "4", "--out",
                 str(files / "b.json")]) == 0
    P = io.read_body(files / "b.json")
    assert len(P) == 20 and P.active.all()


def test_gen_too_few_atoms(files):
    assert main(["gen", "--kind", "measure", "--dim", "3", "--m", "3"]) == 1


def test_manifest_replay(files):
    man = files / "run.json"
    out = files / "b.json"
    main(["gen", "--kind", "measure", "--m", "14", "--seed", "3", "--out", str(files / "g.json")])
    main(["solve", str(files / "g.json"), "--q", "-2", "--out", str(out), "--manifest", str(man)])
    first = out.read_bytes()
    out.unlink()
    data = json.loads(man.read_text())
    assert data["command"] == "solve" and data["exit_code"] == 0
    assert len(data["inputs"]["measure"]["sha256"]) == 64
    assert {"numpy", "scipy", "kernel_backend"} <= set(data["versions"])
    assert main(["replay", str(man)]) == 0
    assert out.read_bytes() == first
