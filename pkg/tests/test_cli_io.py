import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohmatch import io as cio
from cohmatch.cli import ArgumentError, RunConfig, config_from_args, main
from cohmatch.complex import Bifiltration
from cohmatch.errors import ParseError
from cohmatch.fixtures import crossing_fixture, octahedron_height, random_complex

finite = st.floats(allow_nan=False, allow_infinity=False, min_value=-1e12, max_value=1e12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.data())
def test_round_trip(seed, data):
    K = random_complex(np.random.default_rng(seed))
    vals = np.array(data.draw(st.lists(st.tuples(finite, finite), min_size=K.n_vertices, max_size=K.n_vertices)))
    f = Bifiltration(vals.reshape(-1, 2))
    K2, f2 = cio.parse_text(cio.serialize(K, f))
    assert K2.simplices == K.simplices
    assert np.array_equal(f2.values, f.values)


def test_comments_and_blank_lines():
    K, f = cio.parse_text("# header\n\nv 0 1  # a vertex\nv 2 3\ns 0 1\n")
    assert K.counts() == [2, 1]
    assert f.values.tolist() == [[0.0, 1.0], [2.0, 3.0]]


@pytest.mark.parametrize(
    "text, line",
    [
        ("v 0 0\nv 1\n", 2),
        ("v 0 0\nv 1 x\n", 2),
        ("v 0 0\nq 1 2\n", 2),
        ("v 0 0\nv 1 1\ns 0 5\n", 3),
        ("v 0 0\nv 1 1\nv 2 2\ns 0 1 2\n", 4),
        ("v 0 nan\n", 1),
    ],
)
def test_parse_errors_name_line(text, line):
    with pytest.raises(ParseError) as err:
        cio.parse_text(text)
    assert err.value.line == line
    assert str(err.value).startswith(f"line {line}:")


def test_jsonable_handles_inf_and_numpy():
    out = cio.dumps({"x": np.float64(np.inf), "y": np.arange(2), "z": (1.5, None)})
    assert json.loads(out) == {"x": "inf", "y": [0, 1], "z": [1.5, None]}


def test_runconfig_validation():
    with pytest.raises(ArgumentError):
        RunConfig("diagram", ["x"], a=0.0)
    with pytest.raises(ArgumentError):
        RunConfig("dmatch", ["x"])
    with pytest.raises(ArgumentError):
        RunConfig("check", [], p=4)
    with pytest.raises(ArgumentError):
        RunConfig("check", [], resolution=0)


def test_args_to_config():
    cfg = config_from_args(["cdmatch", "f.txt", "g.txt", "--grid", "8", "--words", "1", "--field", "3"])
    assert cfg.inputs == ["f.txt", "g.txt"]
    assert (cfg.resolution, cfg.word_length, cfg.p) == (8, 1, 3)


@pytest.fixture
def octa_file(tmp_path):
    path = tmp_path / "octa.txt"
    cio.write_input(path, *octahedron_height())
    return path


def test_cmd_diagram_octahedron(octa_file, tmp_path):
    out = tmp_path / "d"
    assert main(["diagram", str(octa_file), "--a", "0.5", "--b", "0", "--out", str(out)]) == 0
    rows = (out / "diagram.csv").read_text().splitlines()
    assert rows == ["degree,birth,death,multiplicity", "0,-1,inf,1", "2,1,inf,1"]
    assert (out / "diagram.svg").exists() and (out / "diagram.json").exists()


def test_cmd_diagram_rejects_a_zero(octa_file, tmp_path, capsys):
    assert main(["diagram", str(octa_file), "--a", "0", "--out", str(tmp_path)]) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "ArgumentError" and "open interval" in err["message"]


def test_cmd_reports_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("v 0 0\nv 1 oops\n")
    assert main(["diagram", str(bad), "--out", str(tmp_path)]) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "ParseError" and err["line"] == 2


def test_cmd_monodromy_transposition(tmp_path):
    path = tmp_path / "cross.txt"
    K, f, star = crossing_fixture()
    cio.write_input(path, K, f)
    out = tmp_path / "m"
    assert main(["monodromy", str(path), "--out", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert [lp["permutation"]["0"] for lp in rep["loops"]] == ["(1 2)"]
    assert rep["loops"][0]["stable"]


def test_cmd_dmatch_equal_is_zero(octa_file, tmp_path):
    out = tmp_path / "dm"
    assert main(["dmatch", str(octa_file), str(octa_file), "--grid", "8", "--out", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["lower"] == rep["upper"] == 0.0


def test_gen_fixture_and_vineyard_deterministic(tmp_path):
    assert main(["gen-fixture", "crossing", "--out", str(tmp_path / "fx")]) == 0
    src = str(tmp_path / "fx" / "f.txt")
    for name in ("v1", "v2"):
        assert main(["vineyard", src, "--path", "0.3,-0.5;0.7,-0.6;0.8,0.8", "--out", str(tmp_path / name)]) == 0
    for fname in ("tracks.csv", "report.json", "vineyard.svg"):
        assert (tmp_path / "v1" / fname).read_bytes() == (tmp_path / "v2" / fname).read_bytes()


def test_singular_command(tmp_path):
    assert main(["gen-fixture", "crossing", "--out", str(tmp_path / "fx")]) == 0
    out = tmp_path / "s"
    assert main(["singular", str(tmp_path / "fx" / "f.txt"), "--out", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    (center,) = rep["pairs"]
    assert abs(center[0] - 0.5) < 2e-3 and abs(center[1] - 0.25) < 2e-3
    assert (out / "separation.svg").exists() and (out / "singular.csv").exists()


def test_check_command_passes(tmp_path):
    out = tmp_path / "c"
    assert main(["check", "--seed", "2", "--grid", "12", "--out", str(out)]) == 0
    rep = json.loads((out / "check.json").read_text())
    assert rep["passed"]
    assert {c["name"] for c in rep["checks"]} >= {"stability", "dmatch<=cdmatch", "transport_laws"}
